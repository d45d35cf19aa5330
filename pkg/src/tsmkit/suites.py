"""Structured verification suites with machine-readable reports.

Each suite bundles positive checks and negative controls over one group
configuration.  A control is a case whose *expected* outcome is a failed
check or a specific error; the suite passes only when every case lands
on its expected outcome, so a quadrature or sign regression that makes
the controls stop failing is itself a suite failure.

Reports are deterministic for a fixed config and seed: case records are
keyed and sorted, and wall-clock timing is excluded from the report
digest.  The ``TSMKIT_THREADS`` environment variable sets the worker
count used to evaluate cases; it does not affect the report content.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable

import numpy as np

from .groups import (
    StepTwoGroup,
    canonical_group,
    check_metivier,
    group_from_dict,
    group_law,
    GroupPoint,
    heisenberg_group,
    load_group,
    quaternionic_group,
    twist_coefficients,
    validate_group,
)
from .means import (
    QuadratureValue,
    boundary_ode_probe,
    frame_equivalence_check,
    hecke_bochner_check,
    laguerre_gaussian,
    laguerre_product_check,
    twisted_sphere_mean,
)
from .polynomials import (
    BiPolynomial,
    gamma_constant,
    harmonic_decompose,
    is_harmonic,
    laplacian,
    sphere_inner,
    split_coordinate_product,
)
from .radial import (
    RadialSum,
    TypeFunction,
    annihilation_check,
    apply_field,
    monomial_stack,
    null_family,
)
from .reduction import (
    DegenerateCombinationError,
    canonical_frame,
    frame_twist_table,
    phase_identity_check,
    reduce_direction,
    structure_combination,
    transport_point,
)

SUITES = (
    "structure",
    "reduce",
    "harmonics",
    "ode",
    "th42",
    "lemma32",
    "hecke",
    "boundary",
)

DEFAULT_TOL = {
    "structure": 1e-12,
    "frame": 1e-10,
    "phase": 1e-10,
    "harmonic": 1e-12,
    "annihilation": 1e-12,
    "operator": 1e-12,
    "vanishing": 1e-8,
    "vanishing_exact": 1e-12,
    "equivalence": 1e-8,
    "laguerre": 1e-6,
    "hecke": 1e-6,
    "boundary": 1e-10,
}


class SuiteConfigError(ValueError):
    """The suite configuration cannot be run as given."""


@dataclass(frozen=True)
class SuiteConfig:
    suite: str
    group: object = "heisenberg:1"
    seed: int = 0
    rule: str = "product:16"
    tol: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)

    def tolerance(self, key: str) -> float:
        return float(self.tol.get(key, DEFAULT_TOL[key]))

    @classmethod
    def from_dict(cls, obj: dict) -> "SuiteConfig":
        known = {"suite", "group", "seed", "rule", "tol", "options"}
        extra = set(obj) - known
        if extra:
            raise SuiteConfigError(f"unknown config fields: {sorted(extra)}")
        if "suite" not in obj:
            raise SuiteConfigError("config needs a 'suite' field")
        return cls(
            suite=str(obj["suite"]),
            group=obj.get("group", "heisenberg:1"),
            seed=int(obj.get("seed", 0)),
            rule=str(obj.get("rule", "product:16")),
            tol=dict(obj.get("tol", {})),
            options=dict(obj.get("options", {})),
        )

    @classmethod
    def load(cls, path) -> "SuiteConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def resolve_group(spec) -> StepTwoGroup:
    """Turn a group spec (object, dict, builtin name, or path) into a group."""
    if isinstance(spec, StepTwoGroup):
        return spec
    if isinstance(spec, dict):
        return group_from_dict(spec)
    s = str(spec)
    if s.startswith("heisenberg"):
        _, _, arg = s.partition(":")
        return heisenberg_group(int(arg) if arg else 1)
    if s in ("quaternionic", "htype"):
        return quaternionic_group()
    if s.startswith("canonical:"):
        mu = [float(x) for x in s.split(":", 1)[1].split(",")]
        return canonical_group(mu)
    path = Path(s)
    if path.exists():
        return load_group(path)
    raise SuiteConfigError(f"cannot resolve group spec {spec!r}")


# ---------------------------------------------------------------------------
# case plumbing


@dataclass(frozen=True)
class Case:
    key: str
    expected: str  # pass | fail | error
    thunk: Callable[[], tuple[bool, float | None, str]]
    expect_detail: str | None = None


@dataclass(frozen=True)
class CaseRecord:
    key: str
    expected: str
    status: str
    residual: float | None
    detail: str

    @property
    def ok(self) -> bool:
        return self.status == self.expected

    def to_dict(self) -> dict:
        return {
            "key": self.key,
            "expected": self.expected,
            "status": self.status,
            "ok": self.ok,
            "residual": self.residual,
            "detail": self.detail,
        }


def _run_case(case: Case) -> CaseRecord:
    try:
        passed, residual, detail = case.thunk()
        status = "pass" if passed else "fail"
    except Exception as exc:  # noqa: BLE001 - the status channel reports it
        status = "error"
        residual = None
        detail = f"{type(exc).__name__}: {exc}"
    if case.expected == "error" and status == "error" and case.expect_detail:
        if case.expect_detail not in detail:
            status = "fail"
            detail = f"raised the wrong error: {detail}"
    if residual is not None:
        residual = float(residual)
    return CaseRecord(
        key=case.key, expected=case.expected, status=status, residual=residual, detail=detail
    )


@dataclass(frozen=True)
class SuiteReport:
    suite: str
    group_digest: str
    group_mode: str
    seed: int
    rule: str
    cases: tuple
    elapsed_seconds: float

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.cases)

    @property
    def counts(self) -> dict:
        out = {"total": len(self.cases), "ok": 0, "mismatched": 0, "controls": 0}
        for c in self.cases:
            out["ok" if c.ok else "mismatched"] += 1
            if c.expected != "pass":
                out["controls"] += 1
        return out

    def to_json_obj(self, include_timing: bool = True) -> dict:
        obj = {
            "suite": self.suite,
            "group_digest": self.group_digest,
            "group_mode": self.group_mode,
            "seed": self.seed,
            "rule": self.rule,
            "passed": self.passed,
            "counts": self.counts,
            "cases": [c.to_dict() for c in self.cases],
        }
        if include_timing:
            obj["elapsed_seconds"] = self.elapsed_seconds
        return obj

    def digest(self) -> str:
        payload = json.dumps(self.to_json_obj(include_timing=False), sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["suite", "key", "expected", "status", "ok", "residual", "detail"])
        for c in self.cases:
            writer.writerow(
                [
                    self.suite,
                    c.key,
                    c.expected,
                    c.status,
                    str(c.ok).lower(),
                    "" if c.residual is None else repr(c.residual),
                    c.detail,
                ]
            )
        return buf.getvalue()

    def write(self, path, fmt: str = "json"):
        text = self.to_json() if fmt == "json" else self.to_csv()
        Path(path).write_text(text, encoding="utf-8")


def run_suite(config: SuiteConfig) -> SuiteReport:
    if config.suite not in SUITES:
        raise SuiteConfigError(f"unknown suite {config.suite!r}; choose from {SUITES}")
    group = resolve_group(config.group)
    builder = _BUILDERS[config.suite]
    cases = builder(group, config)
    start = time.perf_counter()
    threads = int(os.environ.get("TSMKIT_THREADS", "1") or "1")
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(_run_case, cases))
    else:
        records = [_run_case(c) for c in cases]
    records.sort(key=lambda r: r.key)
    return SuiteReport(
        suite=config.suite,
        group_digest=group.digest(),
        group_mode=group.mode,
        seed=config.seed,
        rule=config.rule,
        cases=tuple(records),
        elapsed_seconds=time.perf_counter() - start,
    )


# ---------------------------------------------------------------------------
# shared sampling helpers


def _sample_directions(group: StepTwoGroup, seed: int, count: int = 2) -> list[np.ndarray]:
    rng = np.random.default_rng(seed)
    dirs = [np.eye(group.m)[0]]
    if group.m > 1:
        dirs.append(np.eye(group.m)[group.m - 1])
    for _ in range(count):
        v = rng.standard_normal(group.m)
        v /= np.linalg.norm(v)
        dirs.append(v)
    return dirs


def _lam_key(lam) -> str:
    return ",".join(f"{x:+.3f}" for x in np.atleast_1d(lam))


def _check(value: float, tol: float, detail: str = "") -> tuple[bool, float, str]:
    return bool(value <= tol), float(value), detail or f"tol={tol:g}"


# ---------------------------------------------------------------------------
# structure suite


def _structure_cases(group: StepTwoGroup, cfg: SuiteConfig) -> list[Case]:
    tol = cfg.tolerance("structure")
    rng = np.random.default_rng(cfg.seed)
    cases = []

    def _validation():
        report = validate_group(group.U, group.n, group.m, group.mode)
        worst = max((c.residual for c in report.conditions), default=0.0)
        names = ",".join(c.name for c in report.conditions if not c.passed)
        return report.passed, worst, names or "all conditions hold"

    cases.append(Case("structure/validate", "pass", _validation))

    assoc_pts = [
        GroupPoint(rng.standard_normal(2 * group.n), rng.standard_normal(group.m))
        for _ in range(3)
    ]

    def _associativity(pts=assoc_pts):
        left = group_law(group, group_law(group, pts[0], pts[1]), pts[2])
        right = group_law(group, pts[0], group_law(group, pts[1], pts[2]))
        res = max(
            float(np.max(np.abs(left.x - right.x))), float(np.max(np.abs(left.t - right.t)))
        )
        return _check(res, tol)

    cases.append(Case("structure/associativity", "pass", _associativity))

    if group.mode == "heisenberg" and group.n == 1:

        def _frozen_product():
            a = GroupPoint(np.array([1.0, 0.0]), np.array([0.0]))
            b = GroupPoint(np.array([0.0, 1.0]), np.array([0.0]))
            out = group_law(group, a, b)
            res = max(
                float(np.max(np.abs(out.x - np.array([1.0, 1.0])))),
                float(abs(out.t[0] - (-0.5))),
            )
            return _check(res, tol, "product ((1,0),0)*((0,1),0) has centre -1/2")

        cases.append(Case("structure/frozen-product", "pass", _frozen_product))

    for lam in _sample_directions(group, cfg.seed):
        key = _lam_key(lam)

        def _twist(lam=lam):
            table = twist_coefficients(group, lam)
            res = max(
                float(np.max(np.abs(np.diag(table.eta)))),
                float(np.max(np.abs(np.imag(np.diag(table.nu))))),
            )
            return _check(res, tol, "eta diagonal vanishes and nu diagonal is real")

        cases.append(Case(f"structure/twist[{key}]", "pass", _twist))

    def _metivier():
        count = int(cfg.options.get("metivier_samples", 512))
        report = check_metivier(group, sample_count=count, seed=cfg.seed)
        return report.passed, -report.min_abs_det, f"certified={report.certified}"

    cases.append(Case("structure/metivier", "pass", _metivier))

    def _broken_skew():
        U = np.array(group.U[0])
        U[np.tril_indices_from(U, -1)] = 0.0
        report = validate_group(U[None, :, :], group.n, 1, "metivier")
        worst = max(c.residual for c in report.conditions)
        return report.passed, worst, "upper-triangular copy must fail skewness"

    cases.append(Case("structure/control-nonskew", "fail", _broken_skew))

    def _dependent_pair():
        U = np.stack([group.U[0], group.U[0]])
        report = validate_group(U, group.n, 2, "metivier")
        return report.passed, None, "duplicated matrix must fail independence"

    cases.append(Case("structure/control-dependent", "fail", _dependent_pair))

    def _degenerate_direction():
        U = np.zeros((4, 4))
        U[0, 2], U[2, 0] = -1.0, 1.0  # acts on the first pair only: singular
        g = StepTwoGroup(n=2, m=1, U=U[None, :, :], mode="metivier")
        report = check_metivier(g, seed=cfg.seed)
        return report.passed, report.min_abs_det, "rank-deficient form must fail"

    cases.append(Case("structure/control-degenerate", "fail", _degenerate_direction))
    return cases


# ---------------------------------------------------------------------------
# reduce suite


def _reduce_cases(group: StepTwoGroup, cfg: SuiteConfig) -> list[Case]:
    ftol = cfg.tolerance("frame")
    ptol = cfg.tolerance("phase")
    etol = cfg.tolerance("equivalence")
    rng = np.random.default_rng(cfg.seed)
    cases = []

    def _cpoint() -> np.ndarray:
        return rng.standard_normal(group.n) + 1j * rng.standard_normal(group.n)

    for lam in _sample_directions(group, cfg.seed):
        key = _lam_key(lam)

        def _frame(lam=lam):
            frame = reduce_direction(group, lam)
            res = max(frame.residual_orth, frame.residual_conj)
            ordered = bool(np.all(np.diff(frame.mu) <= 1e-12))
            positive = bool(np.all(frame.mu > 0))
            ok = res <= ftol and ordered and positive
            return ok, res, f"mu={np.round(frame.mu, 6).tolist()}"

        cases.append(Case(f"reduce/frame[{key}]", "pass", _frame))

        def _phase(lam=lam, z=_cpoint(), w=_cpoint()):
            frame = reduce_direction(group, lam)
            ident = phase_identity_check(group, frame, z, w)
            scale = max(1.0, abs(ident.lhs))
            return _check(ident.residual / scale, ptol)

        cases.append(Case(f"reduce/phase[{key}]", "pass", _phase))

        def _roundtrip(lam=lam, z=_cpoint()):
            frame = reduce_direction(group, lam)
            back = transport_point(frame, transport_point(frame, z), inverse=True)
            return _check(float(np.max(np.abs(back - z))), 1e-12)

        cases.append(Case(f"reduce/roundtrip[{key}]", "pass", _roundtrip))

    if group.mode in ("htype", "heisenberg") and group.m == 3:

        def _frozen_mu():
            frame = reduce_direction(group, [3.0, 4.0, 0.0])
            res = float(np.max(np.abs(frame.mu - 5.0)))
            return _check(res, 1e-10, "moments equal the direction length")

        cases.append(Case("reduce/frozen-mu", "pass", _frozen_mu))

    def _equivalence(z=0.4 * _cpoint()):
        lam = _sample_directions(group, cfg.seed)[0]
        poly = BiPolynomial.coordinate(group.n, 0) + BiPolynomial.coordinate(
            group.n, group.n - 1, bar=True
        ) * 0.5
        f = TypeFunction.from_parts(RadialSum.gaussian(-0.3), poly)
        rep = frame_equivalence_check(f, group, lam, z, 1.1, rule=cfg.rule, tol=etol)
        return rep.passed, rep.diff, "structural vs reduced mean"

    cases.append(Case("reduce/equivalence", "pass", _equivalence))

    def _degenerate():
        reduce_direction(group, [0.0] * group.m)
        return True, None, "unreachable"

    cases.append(
        Case("reduce/control-zero-direction", "error", _degenerate, expect_detail="degenerate")
    )

    def _tampered_phase(z=_cpoint(), w=_cpoint()):
        lam = _sample_directions(group, cfg.seed)[0]
        frame = reduce_direction(group, lam)
        bad = replace(frame, mu=2.0 * frame.mu)
        ident = phase_identity_check(group, bad, z, w)
        scale = max(1.0, abs(ident.lhs))
        return _check(ident.residual / scale, ptol, "doubled moments must break the identity")

    cases.append(Case("reduce/control-scaled-mu", "fail", _tampered_phase))
    return cases


# ---------------------------------------------------------------------------
# harmonics suite


def _harmonics_cases(group: StepTwoGroup, cfg: SuiteConfig) -> list[Case]:
    tol = cfg.tolerance("harmonic")
    rng = np.random.default_rng(cfg.seed)
    dims = sorted({group.n, 2})
    cases = []

    def _random_poly(n: int, degree: int) -> BiPolynomial:
        terms = {}
        for _ in range(6):
            total = rng.integers(0, degree + 1)
            pa = rng.integers(0, total + 1)
            alpha = tuple(np.bincount(rng.integers(0, n, pa), minlength=n))
            beta = tuple(np.bincount(rng.integers(0, n, total - pa), minlength=n))
            terms[(alpha, beta)] = complex(rng.standard_normal(), rng.standard_normal())
        return BiPolynomial(n, terms)

    for n in dims:

        def _reconstruct(n=n, P=_random_poly(n, 4)):
            worst = 0.0
            for (p, q), part in P.bihomogeneous_parts().items():
                layers = harmonic_decompose(part)
                r2 = BiPolynomial.radius_sq(n)
                rebuilt = BiPolynomial.zero(n)
                for k, layer in enumerate(layers):
                    if not is_harmonic(layer, tol=1e-10):
                        return False, None, f"layer {k} of grade ({p},{q}) is not harmonic"
                    rebuilt = rebuilt + (r2**k) * layer
                diff = (rebuilt - part).max_abs_coeff()
                worst = max(worst, diff / max(1.0, part.max_abs_coeff()))
            return _check(worst, tol)

        cases.append(Case(f"harmonics/reconstruct[n={n}]", "pass", _reconstruct))

        def _split(n=n):
            base = BiPolynomial.coordinate(n, 0) ** 2
            if n > 1:
                base = base + BiPolynomial.coordinate(n, 0) * BiPolynomial.coordinate(n, 1)
            parts = harmonic_decompose(base)
            P = parts[0]
            j = 0
            P0, gamma = split_coordinate_product(P, j, side="zbar")
            recon = P0 + gamma * BiPolynomial.radius_sq(n) * P.dz(j)
            target = BiPolynomial.coordinate(n, j, bar=True) * P
            res = (recon - target).max_abs_coeff() / max(1.0, target.max_abs_coeff())
            if not is_harmonic(P0, tol=1e-10):
                return False, res, "split head must be harmonic"
            return _check(res, tol)

        cases.append(Case(f"harmonics/split[n={n}]", "pass", _split))

    def _frozen_layers():
        P = BiPolynomial.coordinate(2, 0) * BiPolynomial.coordinate(2, 0, bar=True)
        layers = harmonic_decompose(P)
        want_head = P - 0.5 * BiPolynomial.radius_sq(2)
        res = max(
            (layers[0] - want_head).max_abs_coeff(),
            (layers[1] - BiPolynomial.constant(2, 0.5)).max_abs_coeff(),
        )
        return _check(res, tol, "layers of z1*conj(z1) in two variables")

    cases.append(Case("harmonics/frozen-layers", "pass", _frozen_layers))

    def _frozen_moments():
        from .polynomials import sphere_moment

        res = max(
            abs(sphere_moment((1, 0), (1, 0), 2) - 0.5),
            abs(sphere_moment((2, 0), (2, 0), 2) - 1.0 / 3.0),
        )
        return _check(res, 1e-15, "first diagonal moments in two variables")

    cases.append(Case("harmonics/frozen-moments", "pass", _frozen_moments))

    def _orthogonality():
        z1 = BiPolynomial.coordinate(2, 0)
        z2b = BiPolynomial.coordinate(2, 1, bar=True)
        head = harmonic_decompose(z1 * z1.conjugate())[0]
        res = max(abs(sphere_inner(z1, z2b)), abs(sphere_inner(head, BiPolynomial.one(2))))
        return _check(res, 1e-15, "distinct grades are orthogonal on the sphere")

    cases.append(Case("harmonics/orthogonality", "pass", _orthogonality))

    def _nonharmonic_control():
        P = BiPolynomial.coordinate(2, 0) * BiPolynomial.coordinate(2, 0, bar=True)
        return is_harmonic(P), laplacian(P).max_abs_coeff(), "|z1|^2 is not harmonic"

    cases.append(Case("harmonics/control-nonharmonic", "fail", _nonharmonic_control))

    def _split_rejects():
        P = BiPolynomial.coordinate(2, 0) * BiPolynomial.coordinate(2, 0, bar=True)
        split_coordinate_product(P, 0)
        return True, None, "unreachable"

    cases.append(
        Case("harmonics/control-split-input", "error", _split_rejects, expect_detail="harmonic")
    )
    return cases


# ---------------------------------------------------------------------------
# ode suite (annihilation of the degree-lowering stacks)


_GRADES = ((1, 0), (0, 1), (1, 1), (2, 0), (2, 1), (2, 2))


def _ode_cases(group: StepTwoGroup, cfg: SuiteConfig) -> list[Case]:
    tol = cfg.tolerance("annihilation")
    rng = np.random.default_rng(cfg.seed)
    frame = reduce_direction(group, _sample_directions(group, cfg.seed)[0])
    n = group.n
    nu_pairs = [(-frame.mu[0], -frame.mu[-1]), (-1.0, -2.0)]
    cases = []

    for nu1, nu2 in nu_pairs:
        for p, q in _GRADES:
            key = f"ode/annihilate[p={p},q={q},nu=({nu1:.3f},{nu2:.3f})]"
            A0 = rng.standard_normal(p) + 1j * rng.standard_normal(p) if p else None
            B0 = rng.standard_normal(q) + 1j * rng.standard_normal(q) if q else None

            def _ann(p=p, q=q, nu1=nu1, nu2=nu2, A=A0, B=B0):
                stack = monomial_stack(p, q, n, nu1, nu2)
                fam = null_family(p, q, n, nu1, nu2, A=A, B=B)
                rep = annihilation_check(stack, fam, tol=tol)
                return rep.passed, rep.residual, f"{len(stack.atoms)} atoms"

            cases.append(Case(key, "pass", _ann))

    def _eigen():
        nu = -frame.mu[0]
        fam = RadialSum([(1.0, -nu / 4.0, 6)])
        from .radial import twisted_euler

        out = twisted_euler(fam, nu) - 6.0 * fam
        return _check(out.max_abs_coeff(), tol, "Gaussian-weighted powers are eigenfunctions")

    cases.append(Case("ode/eigen", "pass", _eigen))

    def _variant_schedule():
        nu1, nu2 = -1.0, -2.0
        kappas = [gamma_constant(n, 1, 1), gamma_constant(n, 1, 1)]
        stack = monomial_stack(1, 1, n, nu1, nu2, kappa_schedule=kappas)
        fam = null_family(1, 1, n, nu1, nu2)
        rep = annihilation_check(stack, fam, tol=tol)
        return rep.passed, rep.residual, "repeated head constant must not annihilate"

    cases.append(Case("ode/control-schedule", "fail", _variant_schedule))

    def _flipped_exponent():
        nu1, nu2 = -1.0, -2.0
        stack = monomial_stack(2, 1, n, nu1, nu2)
        fam = null_family(2, 1, n, -nu1, -nu2)
        rep = annihilation_check(stack, fam, tol=tol)
        return rep.passed, rep.residual, "sign-flipped exponents must survive"

    cases.append(Case("ode/control-flipped", "fail", _flipped_exponent))

    def _bad_kappa():
        monomial_stack(1, 1, n, -1.0, -2.0, kappa_schedule=[0.123456, gamma_constant(n, 0, 1)])
        return True, None, "unreachable"

    cases.append(Case("ode/control-kappa", "error", _bad_kappa, expect_detail="admissible"))
    return cases


# ---------------------------------------------------------------------------
# th42 suite (vanishing of means of the singular family)


def _h_family(n: int, p: int, i: int, rate: float, flip: bool = False) -> TypeFunction:
    """``exp(rate rho^2/4) z1^p rho^(-2(n+p-i))`` as a product function."""
    sign = -1.0 if flip else 1.0
    rs = RadialSum([(1.0, sign * rate / 4.0, -2 * (n + p - i))])
    alpha = tuple([p] + [0] * (n - 1))
    poly = BiPolynomial.monomial(n, alpha, (0,) * n)
    return TypeFunction.from_parts(rs, poly)


def _th42_cases(group: StepTwoGroup, cfg: SuiteConfig) -> list[Case]:
    vtol = cfg.tolerance("vanishing")
    xtol = cfg.tolerance("vanishing_exact")
    rng = np.random.default_rng(cfg.seed)
    frame = reduce_direction(group, _sample_directions(group, cfg.seed)[0])
    if float(np.ptp(frame.mu)) > 1e-9 * float(np.max(frame.mu)):
        raise SuiteConfigError(
            "the vanishing suite needs equal frame moments; use an htype group"
        )
    n = group.n
    rate = float(frame.mu[0])
    mu = frame.mu
    rule = cfg.options.get("rule", "product:28")
    cases = []

    z = 0.45 * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    z = z / np.linalg.norm(z) * 0.5

    for p in (1, 2):
        for i in range(1, p + 1):
            for s in (1.2, 1.6):
                key = f"th42/vanish[p={p},i={i},s={s}]"

                def _vanish(p=p, i=i, s=s):
                    f = _h_family(n, p, i, rate)
                    val = twisted_sphere_mean(f, z, s, mu=mu, rule=rule)
                    return _check(abs(complex(val)), vtol, "outside-radius mean")

                cases.append(Case(key, "pass", _vanish))

    if n == 1:

        def _vanish_exact():
            f = _h_family(1, 1, 1, rate)
            val = twisted_sphere_mean(f, z, 1.3, mu=mu, rule="exact")
            return _check(abs(complex(val)), xtol, "closed-form moment path")

        cases.append(Case("th42/vanish-exact", "pass", _vanish_exact))

        def _inside_value():
            zc, s = complex(z[0]) / abs(complex(z[0])) * 0.8, 0.3
            f = _h_family(1, 1, 1, rate)
            val = twisted_sphere_mean(f, np.array([zc]), s, mu=mu, rule=rule)
            want = math.exp(rate * (abs(zc) ** 2 - s**2) / 4.0) / np.conj(zc)
            res = abs(complex(val) - want) / abs(want)
            return _check(res, vtol, "inside-radius mean matches the closed form")

        cases.append(Case("th42/inside-value", "pass", _inside_value))

    def _flipped():
        f = _h_family(n, 1, 1, rate, flip=True)
        val = twisted_sphere_mean(f, z, 1.3, mu=mu, rule=rule)
        return _check(abs(complex(val)), vtol, "decaying exponent must not vanish")

    cases.append(Case("th42/control-flipped", "fail", _flipped))

    def _inside_nonzero():
        f = _h_family(n, 1, 1, rate)
        zin = z / np.linalg.norm(z) * 0.9
        val = twisted_sphere_mean(f, zin, 0.35, mu=mu, rule=rule)
        return _check(abs(complex(val)), vtol, "inside-radius mean must not vanish")

    cases.append(Case("th42/control-inside", "fail", _inside_nonzero))

    def _conjugate_side():
        rs = RadialSum([(1.0, rate / 4.0, -2 * n)])
        poly = BiPolynomial.coordinate(n, 0, bar=True)
        f = TypeFunction.from_parts(rs, poly)
        val = twisted_sphere_mean(f, z, 1.3, mu=mu, rule=rule)
        return _check(abs(complex(val)), vtol, "conjugate grade must not vanish at this sign")

    cases.append(Case("th42/control-conjugate", "fail", _conjugate_side))

    def _singular_hit():
        f = _h_family(n, 1, 1, rate)
        from .quadrature import parse_sphere_rule

        nodes = parse_sphere_rule(rule, n).nodes
        s = 0.9
        z_hit = s * nodes[0]
        twisted_sphere_mean(f, z_hit, s, mu=mu, rule=rule)
        return True, None, "unreachable"

    cases.append(Case("th42/control-singular", "error", _singular_hit, expect_detail="singular"))
    return cases


# ---------------------------------------------------------------------------
# lemma32 suite (reduced field identities)


def _lemma32_cases(group: StepTwoGroup, cfg: SuiteConfig) -> list[Case]:
    tol = cfg.tolerance("operator")
    rng = np.random.default_rng(cfg.seed)
    frame = reduce_direction(group, _sample_directions(group, cfg.seed)[0])
    n = group.n
    cases = []

    def _random_radial() -> RadialSum:
        return RadialSum(
            [
                (complex(rng.standard_normal(), rng.standard_normal()), -0.4, 0),
                (complex(rng.standard_normal(), rng.standard_normal()), -0.3, 2),
            ]
        )

    for j in range(n):

        def _projection_identity(j=j, a=_random_radial()):
            f = TypeFunction.from_parts(a, BiPolynomial.coordinate(n, j))
            lhs = apply_field(frame, j, f).project(0, 0).radial_profile()
            mu_j = float(frame.mu[j])
            rhs = (1.0 / (2 * n)) * (a.rho_drho() + (-0.5 * mu_j) * a.shift_power(2)) + a
            res = (lhs - rhs).max_abs_coeff() / max(1.0, a.max_abs_coeff())
            return _check(res, tol, "radial projection of the lowered product")

        cases.append(Case(f"lemma32/project[j={j}]", "pass", _projection_identity))

        def _commutator(j=j, a=_random_radial()):
            f = TypeFunction.from_parts(a, BiPolynomial.coordinate(n, j))
            fwd = apply_field(frame, j, apply_field(frame, j, f, conjugate=True))
            bwd = apply_field(frame, j, apply_field(frame, j, f), conjugate=True)
            mu_j = float(frame.mu[j])
            res = (fwd - bwd - (0.5 * mu_j) * f).max_abs_coeff()
            return _check(res / max(1.0, f.max_abs_coeff()), tol, "commutator equals mu/2")

        cases.append(Case(f"lemma32/commutator[j={j}]", "pass", _commutator))

    def _gamma_split():
        N = max(n, 2)
        P = BiPolynomial.coordinate(N, 0)
        P0, gamma = split_coordinate_product(P, 0, side="zbar")
        want = gamma_constant(N, 1, 0)
        res = abs(gamma - want)
        if not is_harmonic(P0):
            return False, res, "head of the split must be harmonic"
        return _check(res, 1e-15, "splitting constant")

    cases.append(Case("lemma32/gamma", "pass", _gamma_split))

    def _wrong_sign_control(a=_random_radial()):
        f = TypeFunction.from_parts(a, BiPolynomial.coordinate(n, 0))
        lhs = apply_field(frame, 0, f).project(0, 0).radial_profile()
        mu0 = float(frame.mu[0])
        rhs = (1.0 / (2 * n)) * (a.rho_drho() + (0.5 * mu0) * a.shift_power(2)) + a
        res = (lhs - rhs).max_abs_coeff() / max(1.0, a.max_abs_coeff())
        return _check(res, tol, "flipped moment sign must break the identity")

    cases.append(Case("lemma32/control-sign", "fail", _wrong_sign_control))

    def _doubled_gamma_control():
        N = max(n, 2)
        P = BiPolynomial.coordinate(N, 0)
        P0, gamma = split_coordinate_product(P, 0, side="zbar")
        recon = P0 + (2.0 * gamma) * BiPolynomial.radius_sq(N) * P.dz(0)
        target = BiPolynomial.coordinate(N, 0, bar=True) * P
        res = (recon - target).max_abs_coeff()
        return _check(res, tol, "doubled constant must not reconstruct")

    cases.append(Case("lemma32/control-gamma", "fail", _doubled_gamma_control))
    return cases


# ---------------------------------------------------------------------------
# hecke suite (spectral projection identities)


def _hecke_cases(group: StepTwoGroup, cfg: SuiteConfig) -> list[Case]:
    ltol = cfg.tolerance("laguerre")
    htol = cfg.tolerance("hecke")
    rng = np.random.default_rng(cfg.seed)
    n = group.n
    z = 0.4 * (rng.standard_normal(n) + 1j * rng.standard_normal(n)) + 0.3
    cases = []

    pairs = [(0, 0), (1, 1), (0, 1), (2, 1)] if n == 1 else [(0, 0), (1, 1), (0, 1)]
    lams = [1.0, 2.0] if n == 1 else [1.0]
    for lam in lams:
        for k, m in pairs:
            key = f"hecke/laguerre[k={k},m={m},lam={lam}]"

            def _orth(k=k, m=m, lam=lam):
                rep = laguerre_product_check(n, k, m, lam, z, tol=ltol)
                return rep.passed, rep.diff, f"expected {rep.expected:.6g}"

            cases.append(Case(key, "pass", _orth))

    P = BiPolynomial.coordinate(n, 0)
    ks = (1, 2) if n == 1 else (1,)
    g = RadialSum.gaussian(-0.25)
    for k in ks:

        def _plain(k=k):
            rep = hecke_bochner_check(P, g, k, 1.0, z, tol=htol)
            return rep.passed, rep.diff, f"lhs={rep.lhs:.6g} rhs={rep.rhs:.6g}"

        cases.append(Case(f"hecke/plain[k={k}]", "pass", _plain))

    def _vanishing_branch():
        rep = hecke_bochner_check(P, g, 0, 1.0, z, tol=htol)
        return rep.passed, rep.diff, "projection below the grade must vanish"

    cases.append(Case("hecke/vanishing", "pass", _vanishing_branch))

    def _conjugate_branch():
        rep = hecke_bochner_check(P.conjugate(), g, 1, -1.0, z, tol=htol)
        return rep.passed, rep.diff, "negative twist pairs with the conjugate grade"

    cases.append(Case("hecke/conjugate", "pass", _conjugate_branch))

    def _conjugate_vanishing():
        rep = hecke_bochner_check(P.conjugate(), g, 0, -1.0, z, tol=htol)
        return rep.passed, rep.diff, "below-grade projection at negative twist"

    cases.append(Case("hecke/conjugate-vanishing", "pass", _conjugate_vanishing))

    def _scaled_control():
        rep = hecke_bochner_check(P, g, 1, 1.0, z, tol=htol)
        res = abs(rep.lhs - 2.0 * rep.rhs) / max(1.0, abs(rep.rhs))
        return _check(res, htol, "doubled projection factor must mismatch")

    cases.append(Case("hecke/control-factor", "fail", _scaled_control))

    def _mismatched_index_control():
        got = laguerre_product_check(n, 0, 1, 1.0, z, tol=ltol)
        want = laguerre_product_check(n, 0, 0, 1.0, z, tol=ltol).expected
        res = abs(got.value - want) / max(1.0, abs(want))
        return _check(res, ltol, "distinct indices must not reproduce the diagonal value")

    cases.append(Case("hecke/control-offdiagonal", "fail", _mismatched_index_control))
    return cases


# ---------------------------------------------------------------------------
# boundary suite (radial profile equation probes)


def _boundary_cases(group: StepTwoGroup, cfg: SuiteConfig) -> list[Case]:
    tol = cfg.tolerance("boundary")
    cases = []

    for mu, c in ((1.0, 1.0), (2.5, 0.3 - 0.7j)):
        key = f"boundary/family[mu={mu},c={c}]"

        def _family(mu=mu, c=c):
            rep = boundary_ode_probe(
                lambda r: c * np.exp(0.25 * mu * r**2) / r, mu, tol=tol
            )
            detail = (
                f"c_estimate={rep.c_estimate:.6g}, integral_residual={rep.integral_residual:.3g}"
            )
            return rep.passed, rep.family_residual, detail

        cases.append(Case(key, "pass", _family))

    def _zero_profile():
        rep = boundary_ode_probe(lambda r: np.zeros_like(r), 1.0, tol=tol)
        ok = rep.passed and rep.c_zero_consistent
        return ok, rep.family_residual, "zero profile is the only from-zero solution"

    cases.append(Case("boundary/zero", "pass", _zero_profile))

    def _integral_reading():
        rep = boundary_ode_probe(lambda r: np.exp(0.25 * r**2) / r, 1.0, tol=tol)
        ok = rep.integral_residual > 1e-2 and not rep.c_zero_consistent
        return (
            ok,
            rep.integral_residual,
            "nonzero family member violates the from-zero integral reading",
        )

    cases.append(Case("boundary/integral-reading", "pass", _integral_reading))

    def _linear_control():
        rep = boundary_ode_probe(lambda r: r, 1.0, tol=tol)
        return rep.passed, rep.family_residual, "a linear profile is not in the family"

    cases.append(Case("boundary/control-linear", "fail", _linear_control))

    def _perturbed_control():
        rep = boundary_ode_probe(
            lambda r: np.exp(0.25 * r**2) / r + 1e-6 * r, 1.0, tol=tol
        )
        return rep.passed, rep.family_residual, "a 1e-6 perturbation must be detected"

    cases.append(Case("boundary/control-perturbed", "fail", _perturbed_control))
    return cases


_BUILDERS = {
    "structure": _structure_cases,
    "reduce": _reduce_cases,
    "harmonics": _harmonics_cases,
    "ode": _ode_cases,
    "th42": _th42_cases,
    "lemma32": _lemma32_cases,
    "hecke": _hecke_cases,
    "boundary": _boundary_cases,
}
