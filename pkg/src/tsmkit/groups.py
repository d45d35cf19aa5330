"""Step-two nilpotent group structures and their twist tables.

A group is parameterised by ``n`` (half the horizontal dimension), ``m``
(centre dimension) and ``m`` skew-symmetric ``2n x 2n`` structure
matrices ``U``.  Points are pairs ``(x, t)`` with ``x`` in R^{2n} and
``t`` in R^m, multiplied by

    (x, t) * (xi, tau) = (x + xi, t_j + tau_j + <x, U_j xi> / 2)

Horizontal coordinates are complexified as ``z_l = x_l + i x_{n+l}``.
The twist table of a centre direction ``lam`` collects the linear
coefficients that the complexified left-invariant fields pick up after
conjugation by a central character; only the structure matrices and
``lam`` enter.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.stats import norm, qmc

MODES = ("metivier", "htype", "heisenberg")

#: residual below which a structural condition counts as satisfied
STRUCT_TOL = 1e-12


def complexify(x: np.ndarray) -> np.ndarray:
    """Map real coordinates (..., 2n) to complex ones (..., n)."""
    x = np.asarray(x, dtype=float)
    n = x.shape[-1] // 2
    if x.shape[-1] != 2 * n:
        raise ValueError(f"horizontal dimension {x.shape[-1]} is not even")
    return x[..., :n] + 1j * x[..., n:]


def realify(z: np.ndarray) -> np.ndarray:
    """Inverse of :func:`complexify`: (..., n) complex -> (..., 2n) real."""
    z = np.asarray(z, dtype=complex)
    return np.concatenate([z.real, z.imag], axis=-1)


@dataclass(frozen=True)
class GroupPoint:
    """A point ``(x, t)`` with horizontal part ``x`` and central part ``t``."""

    x: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "t", np.asarray(self.t, dtype=float))


@dataclass(frozen=True)
class StepTwoGroup:
    """Immutable container for the structure data ``(n, m, U, mode)``.

    Construction rejects malformed dimensions outright; semantic
    conditions (skew-symmetry, independence, H-type algebra) are checked
    by :func:`validate_group` and reported rather than raised.
    """

    n: int
    m: int
    U: tuple
    mode: str = "metivier"

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError("need n >= 1 and m >= 1")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        mats = []
        for j, U in enumerate(self.U):
            U = np.asarray(U, dtype=float)
            if U.shape != (2 * self.n, 2 * self.n):
                raise ValueError(
                    f"structure matrix {j} has shape {U.shape}, expected "
                    f"{(2 * self.n, 2 * self.n)}"
                )
            U = U.copy()
            U.setflags(write=False)
            mats.append(U)
        if len(mats) != self.m:
            raise ValueError(f"expected {self.m} structure matrices, got {len(mats)}")
        object.__setattr__(self, "U", tuple(mats))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "U": [U.reshape(-1).tolist() for U in self.U],
            "mode": self.mode,
        }

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        """Stable identifier used in reports (sha256 of the canonical JSON)."""
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()[:16]


def group_from_dict(data: dict) -> StepTwoGroup:
    """Build a group from the JSON layout ``{"n", "m", "U", "mode"}``.

    Each entry of ``U`` may be a flat row-major list of length ``(2n)^2``
    or a nested ``2n x 2n`` list.
    """
    n = int(data["n"])
    m = int(data["m"])
    mats = []
    for j, entry in enumerate(data["U"]):
        arr = np.asarray(entry, dtype=float)
        if arr.ndim == 1:
            if arr.size != (2 * n) ** 2:
                raise ValueError(
                    f"structure matrix {j} has {arr.size} entries, "
                    f"expected {(2 * n) ** 2}"
                )
            arr = arr.reshape(2 * n, 2 * n)
        mats.append(arr)
    return StepTwoGroup(n=n, m=m, U=tuple(mats), mode=data.get("mode", "metivier"))


def load_group(path) -> StepTwoGroup:
    with open(path) as fh:
        return group_from_dict(json.load(fh))


def save_group(group: StepTwoGroup, path) -> None:
    Path(path).write_text(json.dumps(group.to_dict(), indent=2) + "\n")


# ---------------------------------------------------------------------------
# reference constructions


def heisenberg_group(n: int = 1) -> StepTwoGroup:
    """The 2n+1 dimensional Heisenberg group (m = 1, canonical block)."""
    U = np.zeros((2 * n, 2 * n))
    U[:n, n:] = -np.eye(n)
    U[n:, :n] = np.eye(n)
    return StepTwoGroup(n=n, m=1, U=(U,), mode="heisenberg")


def quaternionic_group() -> StepTwoGroup:
    """The quaternionic H-type group: left multiplication by i, j, k on R^4."""
    Li = np.array(
        [
            [0.0, -1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, -1.0],
            [0.0, 0.0, 1.0, 0.0],
        ]
    )
    Lj = np.array(
        [
            [0.0, 0.0, -1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, -1.0, 0.0, 0.0],
        ]
    )
    Lk = np.array(
        [
            [0.0, 0.0, 0.0, -1.0],
            [0.0, 0.0, -1.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
        ]
    )
    return StepTwoGroup(n=2, m=3, U=(Li, Lj, Lk), mode="htype")


def canonical_group(mu: Sequence[float]) -> StepTwoGroup:
    """m = 1 group whose single structure matrix is the canonical block

    ``[[0, -J], [J, 0]]`` with ``J = diag(mu)``.
    """
    mu = np.asarray(mu, dtype=float)
    n = mu.size
    U = np.zeros((2 * n, 2 * n))
    U[:n, n:] = -np.diag(mu)
    U[n:, :n] = np.diag(mu)
    return StepTwoGroup(n=n, m=1, U=(U,), mode="metivier")


# ---------------------------------------------------------------------------
# group law


def group_law(group: StepTwoGroup, a: GroupPoint, b: GroupPoint) -> GroupPoint:
    """Product of two points under the step-two group law."""
    x, t = np.asarray(a.x, dtype=float), np.asarray(a.t, dtype=float)
    xi, tau = np.asarray(b.x, dtype=float), np.asarray(b.t, dtype=float)
    if x.shape != (2 * group.n,) or xi.shape != (2 * group.n,):
        raise ValueError("horizontal parts must have dimension 2n")
    if t.shape != (group.m,) or tau.shape != (group.m,):
        raise ValueError("central parts must have dimension m")
    centre = np.array([t[j] + tau[j] + 0.5 * x @ (group.U[j] @ xi) for j in range(group.m)])
    return GroupPoint(x=x + xi, t=centre)


def group_inverse(group: StepTwoGroup, a: GroupPoint) -> GroupPoint:
    return GroupPoint(x=-np.asarray(a.x, dtype=float), t=-np.asarray(a.t, dtype=float))


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ValidationCondition:
    name: str
    passed: bool
    residual: float
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "residual": float(self.residual),
            "detail": self.detail,
        }


@dataclass(frozen=True)
class ValidationReport:
    mode: str
    conditions: tuple
    passed: bool

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "passed": bool(self.passed),
            "conditions": [c.to_dict() for c in self.conditions],
        }


def _skew_conditions(U: Sequence[np.ndarray]) -> list:
    out = []
    for j, M in enumerate(U):
        res = float(np.max(np.abs(M + M.T))) if M.size else 0.0
        out.append(
            ValidationCondition(
                name=f"skew_symmetry[{j}]",
                passed=res <= STRUCT_TOL,
                residual=res,
            )
        )
    return out


def _independence_condition(U: Sequence[np.ndarray]) -> ValidationCondition:
    stack = np.stack([M.reshape(-1) for M in U])
    norms = np.linalg.norm(stack, axis=1)
    if np.any(norms == 0.0):
        return ValidationCondition(
            name="linear_independence",
            passed=False,
            residual=0.0,
            detail="zero structure matrix",
        )
    sv = np.linalg.svd(stack / norms[:, None], compute_uv=False)
    return ValidationCondition(
        name="linear_independence",
        passed=bool(sv[-1] > 1e-10),
        residual=float(sv[-1]),
        detail="smallest singular value of the row-normalised stack",
    )


def _htype_conditions(U: Sequence[np.ndarray]) -> list:
    out = []
    dim = U[0].shape[0]
    orth = 0.0
    for M in U:
        orth = max(orth, float(np.max(np.abs(M.T @ M - np.eye(dim)))))
    out.append(
        ValidationCondition(
            name="orthogonality",
            passed=orth <= STRUCT_TOL,
            residual=orth,
        )
    )
    anti = 0.0
    for j in range(len(U)):
        for l in range(j + 1, len(U)):
            anti = max(anti, float(np.max(np.abs(U[j] @ U[l] + U[l] @ U[j]))))
    out.append(
        ValidationCondition(
            name="anticommutation",
            passed=anti <= STRUCT_TOL,
            residual=anti,
        )
    )
    return out


def validate_group(U, n: int, m: int, mode: str = "metivier") -> ValidationReport:
    """Check the structural conditions for the requested mode.

    Dimension mismatches raise ``ValueError`` naming the offending
    matrix; semantic failures (non-skew matrix, dependent matrices,
    broken H-type algebra) come back as failed conditions in the report.

    Modes: ``metivier`` checks skewness, independence and the sampled
    non-degeneracy heuristic; ``htype`` additionally requires each
    matrix orthogonal and all pairs anticommuting; ``heisenberg`` is
    ``htype`` with a single centre direction.
    """
    group = StepTwoGroup(n=n, m=m, U=tuple(U), mode=mode)
    conditions = _skew_conditions(group.U)
    conditions.append(_independence_condition(group.U))
    if mode in ("htype", "heisenberg"):
        conditions.extend(_htype_conditions(group.U))
    if mode == "heisenberg":
        conditions.append(
            ValidationCondition(
                name="single_centre",
                passed=m == 1,
                residual=float(m - 1),
            )
        )
    if mode == "metivier":
        rep = check_metivier(group)
        conditions.append(
            ValidationCondition(
                name="nondegenerate_combination",
                passed=rep.passed,
                residual=rep.min_abs_det,
                detail="certified" if rep.certified else (
                    f"sampled heuristic, {rep.sample_count} directions, "
                    f"seed {rep.seed}"
                ),
            )
        )
    passed = all(c.passed for c in conditions)
    return ValidationReport(mode=mode, conditions=tuple(conditions), passed=passed)


# ---------------------------------------------------------------------------
# Metivier non-degeneracy


@dataclass(frozen=True)
class MetivierReport:
    passed: bool
    certified: bool
    min_abs_det: float
    worst_lambda: np.ndarray
    sample_count: int
    seed: int
    tol: float

    def to_dict(self) -> dict:
        return {
            "passed": bool(self.passed),
            "certified": bool(self.certified),
            "min_abs_det": float(self.min_abs_det),
            "worst_lambda": [float(v) for v in self.worst_lambda],
            "sample_count": int(self.sample_count),
            "seed": int(self.seed),
            "tol": float(self.tol),
        }


def _direction_samples(m: int, count: int, seed: int) -> np.ndarray:
    """Unit directions on S^{m-1}: the coordinate axes plus a Sobol cloud."""
    axes = np.concatenate([np.eye(m), -np.eye(m)])
    if m == 1:
        return axes
    extra = max(count - axes.shape[0], 0)
    if extra == 0:
        return axes
    eng = qmc.Sobol(d=m, scramble=True, seed=seed)
    # oversample; rows mapped to ~N(0, I) then normalised, degenerate rows dropped
    raw = eng.random_base2(m=max(int(np.ceil(np.log2(2 * extra + 8))), 1))
    gauss = norm.ppf(np.clip(raw, 1e-12, 1 - 1e-12))
    norms = np.linalg.norm(gauss, axis=1)
    keep = gauss[norms > 1e-8]
    keep = keep[:extra] / np.linalg.norm(keep[:extra], axis=1)[:, None]
    return np.concatenate([axes, keep])


def check_metivier(
    group: StepTwoGroup,
    sample_count: int = 512,
    seed: int = 0,
    tol: float = 1e-10,
) -> MetivierReport:
    """Probe non-degeneracy of ``sum_j lam_j U_j`` over unit directions.

    If the structure matrices satisfy the H-type algebra the combination
    has determinant ``|lam|^{2n}`` and the result is certified; otherwise
    a deterministic sample of directions (coordinate axes plus a seeded
    Sobol cloud) gives a falsifiable heuristic, never a proof.
    """
    htype = all(c.passed for c in _htype_conditions(group.U)) and all(
        c.passed for c in _skew_conditions(group.U)
    )
    dirs = _direction_samples(group.m, sample_count, seed)
    dets = np.array([abs(np.linalg.det(sum(l_j * U for l_j, U in zip(lam, group.U)))) for lam in dirs])
    worst = int(np.argmin(dets))
    min_det = float(dets[worst])
    passed = bool(htype or min_det > tol)
    return MetivierReport(
        passed=passed,
        certified=htype,
        min_abs_det=min_det,
        worst_lambda=dirs[worst],
        sample_count=dirs.shape[0],
        seed=seed,
        tol=tol,
    )


# ---------------------------------------------------------------------------
# twist tables


@dataclass(frozen=True)
class TwistTable:
    """Linear coefficients of the twisted complex fields for a direction.

    Entry ``[l, j]`` belongs to coordinate ``l`` inside the field attached
    to coordinate ``j``.  The diagonal of ``eta`` vanishes identically for
    skew structure matrices.
    """

    lam: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    nu: np.ndarray
    eta: np.ndarray

    def __post_init__(self):
        for name in ("lam", "alpha", "beta", "nu", "eta"):
            arr = np.asarray(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return self.nu.shape[0]


def twist_coefficients(group: StepTwoGroup, lam) -> TwistTable:
    """Twist table of the direction ``lam`` (length m, not necessarily unit).

    With ``V = sum_k lam_k U_k`` written in the block coordinates of the
    complexification, for each target coordinate ``j``:

        alpha[l, j] = (V[l, j]     - i V[l, n+j]) / 2
        beta[l, j]  = (V[n+l, j]   - i V[n+l, n+j]) / 2
        nu = -beta + i alpha,   eta = beta + i alpha
    """
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (group.m,):
        raise ValueError(f"lam must have length m = {group.m}")
    n = group.n
    V = sum(l_j * U for l_j, U in zip(lam, group.U))
    alpha = 0.5 * (V[:n, :n] - 1j * V[:n, n:])
    beta = 0.5 * (V[n:, :n] - 1j * V[n:, n:])
    nu = -beta + 1j * alpha
    eta = beta + 1j * alpha
    return TwistTable(lam=lam, alpha=alpha, beta=beta, nu=nu, eta=eta)
