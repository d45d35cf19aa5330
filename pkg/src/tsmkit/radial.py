"""Closed radial calculus and twisted Euler operator stacks.

The working class is the span of ``c * exp(a rho^2) * rho^k`` with
complex ``c, a`` and integer ``k`` (possibly negative).  It is closed
under the twisted Euler operators

    D(nu)    = rho d/drho + (nu/2) rho^2
    Dbar(nu) = rho d/drho - (conj(nu)/2) rho^2

and under multiplication by integer powers of rho, which is everything
the degree-lowering argument for products ``a(rho) * P(z)`` needs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .groups import TwistTable
from .polynomials import BiPolynomial, gamma_constant, harmonic_decompose


class RadialSum:
    """Finite sum of terms ``c * exp(a rho^2) * rho^k``.

    Terms with identical ``(k, a)`` are merged on construction.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable = ()):
        merged: dict = {}
        for c, a, k in terms:
            key = (int(k), complex(a))
            merged[key] = merged.get(key, 0j) + complex(c)
        self.terms = tuple(
            (c, a, k) for (k, a), c in sorted(merged.items(), key=lambda kv: (kv[0][0], kv[0][1].real, kv[0][1].imag)) if c != 0
        )

    @classmethod
    def gaussian(cls, a, c=1.0, k: int = 0) -> "RadialSum":
        return cls([(c, a, k)])

    @classmethod
    def power(cls, k: int, c=1.0) -> "RadialSum":
        return cls([(c, 0.0, k)])

    def __add__(self, other: "RadialSum") -> "RadialSum":
        return RadialSum(self.terms + other.terms)

    def __sub__(self, other: "RadialSum") -> "RadialSum":
        return self + (-1.0) * other

    def __mul__(self, other):
        if isinstance(other, RadialSum):
            return RadialSum(
                [
                    (c1 * c2, a1 + a2, k1 + k2)
                    for c1, a1, k1 in self.terms
                    for c2, a2, k2 in other.terms
                ]
            )
        c = complex(other)
        return RadialSum([(c * v, a, k) for v, a, k in self.terms])

    __rmul__ = __mul__

    def shift_power(self, dk: int) -> "RadialSum":
        """Multiply by ``rho^dk``."""
        return RadialSum([(c, a, k + dk) for c, a, k in self.terms])

    def d_drho2(self) -> "RadialSum":
        """Derivative with respect to ``rho^2``."""
        out = []
        for c, a, k in self.terms:
            out.append((c * a, a, k))
            if k != 0:
                out.append((c * k / 2.0, a, k - 2))
        return RadialSum(out)

    def rho_drho(self) -> "RadialSum":
        """The Euler operator ``rho d/drho``."""
        out = []
        for c, a, k in self.terms:
            if k != 0:
                out.append((c * k, a, k))
            out.append((2.0 * c * a, a, k + 2))
        return RadialSum(out)

    def eval(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=float)
        out = np.zeros(rho.shape, dtype=complex)
        for c, a, k in self.terms:
            out += c * np.exp(a * rho**2) * rho ** float(k)
        return out

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c, _, _ in self.terms), default=0.0)

    def is_zero(self, tol: float = 0.0) -> bool:
        return self.max_abs_coeff() <= tol

    def min_decay(self) -> float:
        """Smallest Gaussian decay rate ``-Re(a)`` over the terms."""
        return min((-a.real for _, a, _ in self.terms), default=np.inf)

    def min_power(self) -> int:
        return min((k for _, _, k in self.terms), default=0)

    def to_json_obj(self) -> list:
        return [
            {"re_c": c.real, "im_c": c.imag, "re_a": a.real, "im_a": a.imag, "k": k}
            for c, a, k in self.terms
        ]

    @classmethod
    def from_json_obj(cls, obj: Iterable) -> "RadialSum":
        return cls(
            [
                (complex(e["re_c"], e.get("im_c", 0.0)), complex(e["re_a"], e.get("im_a", 0.0)), int(e["k"]))
                for e in obj
            ]
        )

    def __repr__(self):
        bits = [f"({c:.3g})*e^({a:.3g} r^2)*r^{k}" for c, a, k in self.terms[:4]]
        more = "" if len(self.terms) <= 4 else f" + ... [{len(self.terms)} terms]"
        return f"RadialSum({' + '.join(bits) or '0'}{more})"


def twisted_euler(rs: RadialSum, nu, conjugate: bool = False) -> RadialSum:
    """Apply ``D(nu)`` (or ``Dbar(nu)`` when ``conjugate``) to a radial sum.

    On a single term: ``(c, a, k) -> k c rho^k + (2a +/- nu/2) c rho^{k+2}``
    with the conjugate variant using ``-conj(nu)/2``.
    """
    shift = -0.5 * np.conj(complex(nu)) if conjugate else 0.5 * complex(nu)
    out = []
    for c, a, k in rs.terms:
        if k != 0:
            out.append((c * k, a, k))
        out.append((c * (2.0 * a + shift), a, k + 2))
    return RadialSum(out)


# ---------------------------------------------------------------------------
# operator stacks


@dataclass(frozen=True)
class EulerAtom:
    """One factor ``(kappa * D + 2)`` with its coefficient ``nu``."""

    kappa: float
    nu: complex
    conjugate: bool = False

    def apply(self, rs: RadialSum) -> RadialSum:
        return self.kappa * twisted_euler(rs, self.nu, conjugate=self.conjugate) + 2.0 * rs


@dataclass(frozen=True)
class RadialMultAtom:
    """Multiplication by ``weight * rho^(2l)``."""

    weight: complex
    l: int

    def apply(self, rs: RadialSum) -> RadialSum:
        return complex(self.weight) * rs.shift_power(2 * self.l)


@dataclass(frozen=True)
class OperatorStack:
    """Atoms applied left to right (``atoms[0]`` acts first)."""

    atoms: tuple

    def apply(self, rs: RadialSum) -> RadialSum:
        for atom in self.atoms:
            rs = atom.apply(rs)
        return rs


def _allowed_kappas(n: int, p: int, q: int) -> list:
    denoms = {n + s - 1 for s in range(0, p + q + 1)}
    return [1.0 / d for d in sorted(denoms) if d > 0]


def monomial_stack(
    p: int,
    q: int,
    n: int,
    nu1,
    nu2,
    kappa_schedule: Sequence[float] | None = None,
) -> OperatorStack:
    """Annihilating stack for the coordinate-power product of grade (p, q).

    The plain-factor phase contributes ``(kappa_i D(nu1) + 2)`` with
    ``kappa_i = 1/(n+p+q-i)`` for ``i = 1..p``; the conjugate phase acts
    after it at grade ``(0, q')`` and contributes
    ``(kappa_k Dbar(nu2) + 2)`` with ``kappa_k = 1/(n+q-k)`` for
    ``k = 1..q``.  A custom ``kappa_schedule`` (length p+q, plain factors
    first) may override the defaults but must stay inside the admissible
    reconstruction constants ``1/(n+p'+q'-1)``.
    """
    if p < 0 or q < 0 or p + q == 0:
        raise ValueError("need p + q >= 1")
    defaults = [gamma_constant(n, p - i, q) for i in range(p)]
    defaults += [gamma_constant(n, 0, q - k) for k in range(q)]
    if kappa_schedule is None:
        kappas = defaults
    else:
        kappas = [float(k) for k in kappa_schedule]
        if len(kappas) != p + q:
            raise ValueError(f"schedule must have length {p + q}")
        allowed = _allowed_kappas(n, p, q)
        for kap in kappas:
            if not any(abs(kap - ok) <= 1e-12 for ok in allowed):
                raise ValueError(f"kappa {kap} outside the admissible set {allowed}")
    atoms = [EulerAtom(kappa=kappas[i], nu=complex(nu1)) for i in range(p)]
    atoms += [
        EulerAtom(kappa=kappas[p + k], nu=complex(nu2), conjugate=True) for k in range(q)
    ]
    return OperatorStack(atoms=tuple(atoms))


def null_family(
    p: int,
    q: int,
    n: int,
    nu1,
    nu2,
    A: Sequence[complex] | None = None,
    B: Sequence[complex] | None = None,
) -> RadialSum:
    """The two-sided family annihilated by the grade-(p, q) stack:

        sum_i A_i exp(-nu1 rho^2/4) rho^{-2(p+q+n-i)}    i = 1..p
      + sum_k B_k exp(+conj(nu2) rho^2/4) rho^{-2(p+q+n-k)}   k = 1..q
    """
    A = [1.0] * p if A is None else list(A)
    B = [1.0] * q if B is None else list(B)
    if len(A) != p or len(B) != q:
        raise ValueError("coefficient lists must have lengths p and q")
    nu1 = complex(nu1)
    nu2 = complex(nu2)
    terms = []
    for i in range(1, p + 1):
        terms.append((A[i - 1], -nu1 / 4.0, -2 * (p + q + n - i)))
    for k in range(1, q + 1):
        terms.append((B[k - 1], np.conj(nu2) / 4.0, -2 * (p + q + n - k)))
    return RadialSum(terms)


@dataclass(frozen=True)
class AnnihilationReport:
    residual: float
    input_scale: float
    passed: bool
    result: RadialSum

    def to_dict(self) -> dict:
        return {
            "residual": float(self.residual),
            "input_scale": float(self.input_scale),
            "passed": bool(self.passed),
            "result": self.result.to_json_obj(),
        }


def annihilation_check(stack: OperatorStack, rs: RadialSum, tol: float = 1e-12) -> AnnihilationReport:
    """Apply the stack and report the largest surviving coefficient."""
    out = stack.apply(rs)
    residual = out.max_abs_coeff()
    return AnnihilationReport(
        residual=residual,
        input_scale=rs.max_abs_coeff(),
        passed=bool(residual <= tol),
        result=out,
    )


# ---------------------------------------------------------------------------
# product-class functions radial * polynomial


class TypeFunction:
    """Finite sum of products ``radial(rho) * angular(z)``.

    The class is closed under the twisted complex fields: derivatives
    send a product to products again, with the radial part differentiated
    with respect to ``rho^2`` and coordinates multiplied into the angular
    part.
    """

    __slots__ = ("n", "summands")

    def __init__(self, n: int, summands: Iterable = ()):
        self.n = int(n)
        clean = []
        for rs, poly in summands:
            if not isinstance(rs, RadialSum) or not isinstance(poly, BiPolynomial):
                raise TypeError("summands must be (RadialSum, BiPolynomial) pairs")
            if poly.n != self.n:
                raise ValueError("angular part has wrong variable count")
            if rs.terms and poly.terms:
                clean.append((rs, poly))
        self.summands = tuple(clean)

    # -- constructors ---------------------------------------------------

    @classmethod
    def from_parts(cls, rs: RadialSum, poly: BiPolynomial) -> "TypeFunction":
        return cls(poly.n, [(rs, poly)])

    @classmethod
    def gaussian(cls, n: int, a) -> "TypeFunction":
        return cls(n, [(RadialSum.gaussian(a), BiPolynomial.one(n))])

    @classmethod
    def from_poly(cls, poly: BiPolynomial) -> "TypeFunction":
        return cls(poly.n, [(RadialSum.power(0), poly)])

    # -- algebra ---------------------------------------------------------

    def __add__(self, other: "TypeFunction") -> "TypeFunction":
        if other.n != self.n:
            raise ValueError("mixed variable counts")
        return TypeFunction(self.n, self.summands + other.summands)

    def __sub__(self, other: "TypeFunction") -> "TypeFunction":
        return self + (-1.0) * other

    def __mul__(self, other):
        if isinstance(other, TypeFunction):
            return TypeFunction(
                self.n,
                [
                    (r1 * r2, p1 * p2)
                    for r1, p1 in self.summands
                    for r2, p2 in other.summands
                ],
            )
        if isinstance(other, BiPolynomial):
            return TypeFunction(self.n, [(rs, poly * other) for rs, poly in self.summands])
        if isinstance(other, RadialSum):
            return TypeFunction(self.n, [(rs * other, poly) for rs, poly in self.summands])
        c = complex(other)
        return TypeFunction(self.n, [(c * rs, poly) for rs, poly in self.summands])

    __rmul__ = __mul__

    # -- evaluation --------------------------------------------------------

    def eval(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        rho = np.linalg.norm(z, axis=-1)
        out = np.zeros(z.shape[:-1], dtype=complex)
        for rs, poly in self.summands:
            out += rs.eval(rho) * poly.eval(z)
        return out

    # -- structure ----------------------------------------------------------

    def canonical(self) -> dict:
        """Flattened coefficients keyed by ``(alpha, beta, k, a)``."""
        flat: dict = {}
        for rs, poly in self.summands:
            for c_r, a, k in rs.terms:
                for (al, be), c_p in poly.terms.items():
                    key = (al, be, k, a)
                    flat[key] = flat.get(key, 0j) + c_r * c_p
        return {k: v for k, v in flat.items() if v != 0}

    def max_abs_diff(self, other: "TypeFunction") -> float:
        a, b = self.canonical(), other.canonical()
        keys = set(a) | set(b)
        return max((abs(a.get(k, 0j) - b.get(k, 0j)) for k in keys), default=0.0)

    def max_abs_coeff(self) -> float:
        return max((abs(v) for v in self.canonical().values()), default=0.0)

    def min_decay(self) -> float:
        return min((rs.min_decay() for rs, _ in self.summands), default=np.inf)

    def singular_at_origin(self) -> bool:
        return any(rs.min_power() < 0 for rs, _ in self.summands)

    def project(self, p: int, q: int) -> "TypeFunction":
        """Keep the component lying over the harmonic grade (p, q).

        Radial factors ``rho^{2k}`` produced by the layer expansion are
        absorbed into the radial parts.
        """
        out = []
        for rs, poly in self.summands:
            for (pp, qq), part in poly.bihomogeneous_parts().items():
                k = pp - p
                if k < 0 or qq - q != k or min(pp, qq) < k:
                    continue
                layers = harmonic_decompose(part)
                if k < len(layers) and not layers[k].is_zero():
                    out.append((rs.shift_power(2 * k), layers[k]))
        return TypeFunction(self.n, out)

    def radial_profile(self) -> RadialSum:
        """Collapse a purely radial function to a single radial sum."""
        total = RadialSum()
        for rs, poly in self.summands:
            degs = poly.bidegrees()
            if degs and degs != {(0, 0)}:
                raise ValueError("function has non-constant angular parts")
            const = poly.terms.get(((0,) * self.n, (0,) * self.n), 0j)
            total = total + const * rs
        return total

    # -- serialisation ---------------------------------------------------

    def to_json_obj(self) -> list:
        return [
            {"radial": rs.to_json_obj(), "angular": poly.to_json_obj()}
            for rs, poly in self.summands
        ]

    @classmethod
    def from_json_obj(cls, obj: Iterable, n: int | None = None) -> "TypeFunction":
        summands = []
        for entry in obj:
            poly = BiPolynomial.from_json_obj(entry["angular"], n=n)
            n = poly.n
            summands.append((RadialSum.from_json_obj(entry["radial"]), poly))
        if n is None:
            raise ValueError("cannot infer variable count from empty function")
        return cls(n, summands)

    def dumps(self) -> str:
        return json.dumps(self.to_json_obj())

    def __repr__(self):
        return f"TypeFunction(n={self.n}, {len(self.summands)} summands)"


def _coerce_table(table) -> TwistTable:
    if isinstance(table, TwistTable):
        return table
    # reduced frames expose mu; build the diagonal table
    from .reduction import frame_twist_table

    return frame_twist_table(table)


def apply_field(table, j: int, f: TypeFunction, conjugate: bool = False) -> TypeFunction:
    """Apply the twisted complex field of coordinate ``j`` to ``f``.

    The plain field is ``d/dz_j + (1/4) sum_l (eta[l,j] z_l + nu[l,j] zbar_l)``
    and the conjugate one is
    ``d/dzbar_j - (1/4) sum_l (conj(nu[l,j]) z_l + conj(eta[l,j]) zbar_l)``.
    A reduced frame may be passed instead of a table, giving the diagonal
    fields with ``nu = -diag(mu)``.
    """
    tab = _coerce_table(table)
    n = tab.n
    if f.n != n:
        raise ValueError("function and table dimensions differ")
    out = []
    for rs, poly in f.summands:
        drs = rs.d_drho2()
        if conjugate:
            out.append((drs, BiPolynomial.coordinate(n, j) * poly))
            out.append((rs, poly.dzbar(j)))
        else:
            out.append((drs, BiPolynomial.coordinate(n, j, bar=True) * poly))
            out.append((rs, poly.dz(j)))
        linear = BiPolynomial.zero(n)
        for l in range(n):
            if conjugate:
                linear = linear + BiPolynomial.coordinate(n, l) * (-0.25 * np.conj(tab.nu[l, j]))
                linear = linear + BiPolynomial.coordinate(n, l, bar=True) * (
                    -0.25 * np.conj(tab.eta[l, j])
                )
            else:
                linear = linear + BiPolynomial.coordinate(n, l) * (0.25 * tab.eta[l, j])
                linear = linear + BiPolynomial.coordinate(n, l, bar=True) * (0.25 * tab.nu[l, j])
        if not linear.is_zero():
            out.append((rs, linear * poly))
    return TypeFunction(f.n, out)
