"""Canonical symplectic frames for skew combinations of structure matrices.

For a nonsingular skew ``2n x 2n`` matrix ``V`` there is an orthogonal
``A`` and positive ``mu_1 >= ... >= mu_n`` with

    V A = A * [[0, -J], [J, 0]],   J = diag(mu).

The frame transports points between the ambient coordinates and the
diagonal ones in which the twisted phase becomes a plain weighted
imaginary part.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import schur

from .groups import StepTwoGroup, TwistTable, complexify, realify


class DegenerateCombinationError(ValueError):
    """Raised when asked to reduce a singular skew combination."""


def structure_combination(group: StepTwoGroup, lam) -> np.ndarray:
    """The skew matrix ``sum_j lam_j U_j`` of a centre direction."""
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (group.m,):
        raise ValueError(f"lam must have length m = {group.m}")
    return sum(l_j * U for l_j, U in zip(lam, group.U))


def canonical_block(mu) -> np.ndarray:
    """The block matrix ``[[0, -J], [J, 0]]`` with ``J = diag(mu)``."""
    mu = np.asarray(mu, dtype=float)
    n = mu.size
    B = np.zeros((2 * n, 2 * n))
    B[:n, n:] = -np.diag(mu)
    B[n:, :n] = np.diag(mu)
    return B


@dataclass(frozen=True)
class ReducedFrame:
    """Orthogonal frame diagonalising a skew combination.

    ``A`` has columns ``(v_1 ... v_n u_1 ... u_n)`` where ``u_j, v_j``
    span the invariant plane of the spectral value ``mu_j``; ``block`` is
    the canonical form ``A^T V A``.
    """

    lam: np.ndarray
    V: np.ndarray
    A: np.ndarray
    mu: np.ndarray
    block: np.ndarray
    residual_orth: float
    residual_conj: float

    def __post_init__(self):
        for name in ("lam", "V", "A", "mu", "block"):
            arr = np.asarray(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return self.mu.size


def canonical_frame(V, lam=None, tol: float = 1e-10) -> ReducedFrame:
    """Reduce a nonsingular skew matrix to its canonical block form.

    Uses the real Schur form (block diagonal for skew input), orders the
    spectral values decreasingly and fixes signs so the first
    non-negligible entry of each ``v_j`` column is positive.  Raises
    :class:`DegenerateCombinationError` on singular input.
    """
    V = np.asarray(V, dtype=float)
    dim = V.shape[0]
    if V.shape != (dim, dim) or dim % 2:
        raise ValueError("V must be square with even dimension")
    scale = max(float(np.max(np.abs(V))), 1.0)
    if float(np.max(np.abs(V + V.T))) > 1e-10 * scale:
        raise ValueError("V must be skew-symmetric")
    n = dim // 2

    T, Q = schur(V, output="real")
    pairs = []
    i = 0
    while i < dim:
        off = abs(T[i, i + 1]) if i + 1 < dim else 0.0
        if i + 1 >= dim or off <= 1e-12 * scale:
            raise DegenerateCombinationError("degenerate symplectic form")
        b = 0.5 * (T[i, i + 1] - T[i + 1, i])
        if b > 0:
            u, v, mu_j = Q[:, i].copy(), Q[:, i + 1].copy(), b
        else:
            u, v, mu_j = Q[:, i + 1].copy(), Q[:, i].copy(), -b
        pairs.append((mu_j, u, v))
        i += 2

    order = np.argsort([-p[0] for p in pairs], kind="stable")
    us, vs, mus = [], [], []
    for idx in order:
        mu_j, u, v = pairs[idx]
        lead = np.flatnonzero(np.abs(v) > 1e-12 * max(np.max(np.abs(v)), 1e-300))
        if lead.size and v[lead[0]] < 0:
            u, v = -u, -v
        us.append(u)
        vs.append(v)
        mus.append(mu_j)

    A = np.column_stack(vs + us)
    mu = np.asarray(mus)
    block = canonical_block(mu)
    res_orth = float(np.max(np.abs(A.T @ A - np.eye(dim))))
    res_conj = float(np.max(np.abs(V @ A - A @ block)))
    if res_orth > tol or res_conj > tol * scale:
        # one polar re-orthogonalisation pass before giving up
        uu, _, vt = np.linalg.svd(A)
        A = uu @ vt
        res_orth = float(np.max(np.abs(A.T @ A - np.eye(dim))))
        res_conj = float(np.max(np.abs(V @ A - A @ block)))
        if res_orth > tol or res_conj > tol * scale:
            raise ArithmeticError(
                f"frame residuals {res_orth:.3e}/{res_conj:.3e} exceed {tol:.1e}"
            )
    lam_arr = np.zeros(0) if lam is None else np.asarray(lam, dtype=float)
    return ReducedFrame(
        lam=lam_arr,
        V=V,
        A=A,
        mu=mu,
        block=block,
        residual_orth=res_orth,
        residual_conj=res_conj,
    )


def reduce_direction(group: StepTwoGroup, lam, tol: float = 1e-10) -> ReducedFrame:
    """Frame of the combination ``sum_j lam_j U_j``."""
    return canonical_frame(structure_combination(group, lam), lam=lam, tol=tol)


def transport_point(frame: ReducedFrame, z, inverse: bool = False) -> np.ndarray:
    """Move complex coordinates into (or out of) the frame.

    Forward maps ``z`` to the complexification of ``A^T x``; the inverse
    direction applies ``A`` instead.
    """
    x = realify(np.asarray(z, dtype=complex))
    M = frame.A if inverse else frame.A.T
    return complexify(x @ M.T)


@dataclass(frozen=True)
class PhaseIdentity:
    lhs: float
    rhs: float
    residual: float


def phase_identity_check(group: StepTwoGroup, frame: ReducedFrame, z, w) -> PhaseIdentity:
    """Compare the structure-matrix phase with its diagonal form.

    The bilinear phase ``sum_j lam_j <x, U_j xi>`` must equal
    ``sum_j mu_j Im(z'_j conj(w'_j))`` after transporting both points
    into the frame.
    """
    if frame.lam.size != group.m:
        raise ValueError("frame does not carry a direction for this group")
    x = realify(np.asarray(z, dtype=complex))
    xi = realify(np.asarray(w, dtype=complex))
    lhs = float(x @ (structure_combination(group, frame.lam) @ xi))
    zp = transport_point(frame, z)
    wp = transport_point(frame, w)
    rhs = float(np.sum(frame.mu * np.imag(zp * np.conj(wp))))
    return PhaseIdentity(lhs=lhs, rhs=rhs, residual=abs(lhs - rhs))


def frame_twist_table(frame: ReducedFrame) -> TwistTable:
    """Diagonal twist table of the canonical block: ``nu = -diag(mu)``."""
    mu = frame.mu
    return TwistTable(
        lam=frame.lam,
        alpha=0.5j * np.diag(mu),
        beta=0.5 * np.diag(mu).astype(complex),
        nu=-np.diag(mu).astype(complex),
        eta=np.zeros((mu.size, mu.size), dtype=complex),
    )
