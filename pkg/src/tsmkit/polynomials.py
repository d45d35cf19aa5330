"""Sparse polynomials in ``z_1..z_n, conj(z_1)..conj(z_n)`` and their
bigraded harmonic calculus.

Terms are stored sparsely as ``(alpha, beta) -> complex`` with
multi-indices ``alpha`` (holomorphic powers) and ``beta`` (conjugate
powers).  The complex Laplacian used throughout is
``4 sum_j d^2/dz_j dzbar_j`` so that ``lap(z1*conj(z1)) = 4``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

#: coefficients at or below this modulus are dropped during normalisation
PRUNE_TOL = 1e-15


def _as_index(idx, n: int) -> tuple:
    idx = tuple(int(v) for v in idx)
    if len(idx) != n or any(v < 0 for v in idx):
        raise ValueError(f"bad multi-index {idx} for n = {n}")
    return idx


class BiPolynomial:
    """Sparse polynomial in the complexified coordinates and conjugates.

    Example
    -------
    >>> p = BiPolynomial.coordinate(2, 0)          # z1
    >>> q = BiPolynomial.coordinate(2, 0, bar=True)
    >>> (p * q).terms
    {((1, 0), (1, 0)): (1+0j)}
    """

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping | None = None, prune: bool = True):
        self.n = int(n)
        data = {}
        if terms:
            for (alpha, beta), c in terms.items():
                c = complex(c)
                if prune and abs(c) <= PRUNE_TOL:
                    continue
                key = (_as_index(alpha, self.n), _as_index(beta, self.n))
                data[key] = data.get(key, 0j) + c
        self.terms = {k: v for k, v in data.items() if not (prune and abs(v) <= PRUNE_TOL)}

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> "BiPolynomial":
        return cls(n, {})

    @classmethod
    def constant(cls, n: int, c) -> "BiPolynomial":
        return cls(n, {((0,) * n, (0,) * n): complex(c)})

    @classmethod
    def one(cls, n: int) -> "BiPolynomial":
        return cls.constant(n, 1.0)

    @classmethod
    def coordinate(cls, n: int, j: int, bar: bool = False) -> "BiPolynomial":
        alpha = [0] * n
        beta = [0] * n
        (beta if bar else alpha)[j] = 1
        return cls(n, {(tuple(alpha), tuple(beta)): 1.0 + 0j})

    @classmethod
    def monomial(cls, n: int, alpha, beta, c=1.0) -> "BiPolynomial":
        return cls(n, {(tuple(alpha), tuple(beta)): complex(c)})

    @classmethod
    def radius_sq(cls, n: int) -> "BiPolynomial":
        """``|z|^2 = sum_j z_j conj(z_j)``."""
        out = {}
        for j in range(n):
            a = [0] * n
            a[j] = 1
            out[(tuple(a), tuple(a))] = 1.0 + 0j
        return cls(n, out)

    # -- ring operations ----------------------------------------------

    def __add__(self, other):
        if not isinstance(other, BiPolynomial):
            return NotImplemented
        if other.n != self.n:
            raise ValueError("mixed variable counts")
        data = dict(self.terms)
        for key, c in other.terms.items():
            data[key] = data.get(key, 0j) + c
        return BiPolynomial(self.n, data)

    def __sub__(self, other):
        return self + (-1.0) * other

    def __neg__(self):
        return (-1.0) * self

    def __mul__(self, other):
        if isinstance(other, BiPolynomial):
            if other.n != self.n:
                raise ValueError("mixed variable counts")
            data = {}
            for (a1, b1), c1 in self.terms.items():
                for (a2, b2), c2 in other.terms.items():
                    key = (
                        tuple(x + y for x, y in zip(a1, a2)),
                        tuple(x + y for x, y in zip(b1, b2)),
                    )
                    data[key] = data.get(key, 0j) + c1 * c2
            return BiPolynomial(self.n, data)
        c = complex(other)
        return BiPolynomial(self.n, {k: c * v for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = BiPolynomial.one(self.n)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def conjugate(self) -> "BiPolynomial":
        """The polynomial whose values are the complex conjugates."""
        return BiPolynomial(
            self.n, {(b, a): v.conjugate() for (a, b), v in self.terms.items()}
        )

    # -- calculus ------------------------------------------------------

    def dz(self, j: int) -> "BiPolynomial":
        data = {}
        for (a, b), c in self.terms.items():
            if a[j] == 0:
                continue
            a2 = list(a)
            a2[j] -= 1
            data[(tuple(a2), b)] = data.get((tuple(a2), b), 0j) + c * a[j]
        return BiPolynomial(self.n, data)

    def dzbar(self, j: int) -> "BiPolynomial":
        data = {}
        for (a, b), c in self.terms.items():
            if b[j] == 0:
                continue
            b2 = list(b)
            b2[j] -= 1
            data[(a, tuple(b2))] = data.get((a, tuple(b2)), 0j) + c * b[j]
        return BiPolynomial(self.n, data)

    # -- structure -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def bidegrees(self) -> set:
        return {(sum(a), sum(b)) for (a, b) in self.terms.keys()}

    def bidegree(self) -> tuple:
        """The (p, q) grade of a bihomogeneous polynomial."""
        degs = self.bidegrees()
        if len(degs) != 1:
            raise ValueError(f"polynomial is not bihomogeneous: grades {sorted(degs)}")
        return next(iter(degs))

    def bihomogeneous_parts(self) -> dict:
        parts: dict = {}
        for (a, b), c in self.terms.items():
            key = (sum(a), sum(b))
            parts.setdefault(key, {})[(a, b)] = c
        return {k: BiPolynomial(self.n, v) for k, v in parts.items()}

    def sorted_terms(self) -> list:
        """Terms in graded lexicographic order on (|alpha|+|beta|, alpha, beta)."""
        return sorted(
            self.terms.items(), key=lambda kv: (sum(kv[0][0]) + sum(kv[0][1]),) + kv[0]
        )

    def __repr__(self):
        bits = []
        for (a, b), c in self.sorted_terms()[:6]:
            bits.append(f"{c:.3g}*z^{a}*zb^{b}")
        more = "" if len(self.terms) <= 6 else f" ... ({len(self.terms)} terms)"
        return f"BiPolynomial(n={self.n}, {' + '.join(bits) or '0'}{more})"

    # -- evaluation -----------------------------------------------------

    def eval(self, z) -> np.ndarray:
        """Evaluate at complex points of shape (..., n)."""
        z = np.asarray(z, dtype=complex)
        if z.shape[-1] != self.n:
            raise ValueError(f"points must have last dimension {self.n}")
        zb = np.conj(z)
        max_a = [0] * self.n
        max_b = [0] * self.n
        for (a, b) in self.terms.keys():
            for j in range(self.n):
                max_a[j] = max(max_a[j], a[j])
                max_b[j] = max(max_b[j], b[j])
        pow_a = [
            np.stack([z[..., j] ** d for d in range(max_a[j] + 1)]) for j in range(self.n)
        ]
        pow_b = [
            np.stack([zb[..., j] ** d for d in range(max_b[j] + 1)]) for j in range(self.n)
        ]
        out = np.zeros(z.shape[:-1], dtype=complex)
        for (a, b), c in self.terms.items():
            term = np.full(z.shape[:-1], c, dtype=complex)
            for j in range(self.n):
                if a[j]:
                    term = term * pow_a[j][a[j]]
                if b[j]:
                    term = term * pow_b[j][b[j]]
            out += term
        return out

    # -- serialisation ---------------------------------------------------

    def to_json_obj(self) -> list:
        return [
            {"alpha": list(a), "beta": list(b), "re": c.real, "im": c.imag}
            for (a, b), c in self.sorted_terms()
        ]

    @classmethod
    def from_json_obj(cls, obj: Iterable, n: int | None = None) -> "BiPolynomial":
        entries = list(obj)
        if n is None:
            if not entries:
                raise ValueError("cannot infer variable count from empty polynomial")
            n = len(entries[0]["alpha"])
        terms = {}
        for e in entries:
            key = (tuple(e["alpha"]), tuple(e["beta"]))
            terms[key] = terms.get(key, 0j) + complex(e["re"], e.get("im", 0.0))
        return cls(n, terms)

    def dumps(self) -> str:
        return json.dumps(self.to_json_obj())


# ---------------------------------------------------------------------------
# harmonic calculus


def laplacian(P: BiPolynomial) -> BiPolynomial:
    """``4 sum_j d^2 P / dz_j dzbar_j``."""
    out = BiPolynomial.zero(P.n)
    for j in range(P.n):
        out = out + P.dz(j).dzbar(j)
    return 4.0 * out


def is_harmonic(P: BiPolynomial, tol: float = 1e-12) -> bool:
    return laplacian(P).max_abs_coeff() <= tol * max(P.max_abs_coeff(), 1.0)


def harmonic_decompose(P: BiPolynomial) -> list:
    """Layers ``[P_0, ..., P_l]`` with ``P = sum_k |z|^{2k} P_k`` and each
    ``P_k`` harmonic of grade ``(p-k, q-k)``; ``l = min(p, q)``.

    Layer ``k`` is recovered by applying the Laplacian ``k`` times, which
    kills every lower layer and multiplies layer ``k`` by the product of
    the explicit constants ``4t(n + p + q - 2k + t - 1)``.
    """
    if P.is_zero():
        return [P]
    p, q = P.bidegree()
    n = P.n
    l = min(p, q)
    r2 = BiPolynomial.radius_sq(n)
    layers = [BiPolynomial.zero(n)] * (l + 1)
    residual = P
    for k in range(l, -1, -1):
        lap_k = residual
        for _ in range(k):
            lap_k = laplacian(lap_k)
        d = 1.0
        for t in range(1, k + 1):
            d *= 4.0 * t * (n + p + q - 2 * k + t - 1)
        Pk = (1.0 / d) * lap_k
        layers[k] = Pk
        residual = residual - (r2**k) * Pk
    return layers


def gamma_constant(n: int, p: int, q: int) -> float:
    """The reconstruction constant ``1 / (n + p + q - 1)`` of a grade."""
    d = n + p + q - 1
    if d <= 0:
        raise ValueError(f"undefined constant for n={n}, p={p}, q={q}")
    return 1.0 / d


def split_coordinate_product(P: BiPolynomial, j: int, side: str = "zbar"):
    """Split a coordinate-times-harmonic product into its two layers.

    For harmonic ``P`` of grade (p, q):

        conj(z_j) * P = P0 + gamma * |z|^2 * dP/dz_j      (side="zbar")
        z_j * P       = P0 + gamma * |z|^2 * dP/dzbar_j   (side="z")

    with ``gamma = 1/(n+p+q-1)`` and ``P0`` harmonic.  Returns
    ``(P0, gamma)``.  Non-harmonic input is rejected.
    """
    if side not in ("z", "zbar"):
        raise ValueError("side must be 'z' or 'zbar'")
    if not is_harmonic(P):
        raise ValueError("split requires a harmonic polynomial")
    p, q = P.bidegree()
    gamma = gamma_constant(P.n, p, q)
    r2 = BiPolynomial.radius_sq(P.n)
    if side == "zbar":
        prod = BiPolynomial.coordinate(P.n, j, bar=True) * P
        grad = P.dz(j)
    else:
        prod = BiPolynomial.coordinate(P.n, j, bar=False) * P
        grad = P.dzbar(j)
    P0 = prod - gamma * (r2 * grad)
    return P0, gamma


def project_bidegree(P: BiPolynomial, p: int, q: int) -> BiPolynomial:
    """Component of ``P`` lying over the harmonic grade ``(p, q)``.

    Every bihomogeneous part is expanded into harmonic layers and the
    layers of grade ``(p, q)`` are kept, radial factors included.
    """
    out = BiPolynomial.zero(P.n)
    r2 = BiPolynomial.radius_sq(P.n)
    for (pp, qq), part in P.bihomogeneous_parts().items():
        k = pp - p
        if k < 0 or qq - q != k or min(pp, qq) < k:
            continue
        layers = harmonic_decompose(part)
        if k < len(layers):
            out = out + (r2**k) * layers[k]
    return out


# ---------------------------------------------------------------------------
# sphere moments


def sphere_moment(alpha, beta, n: int) -> float:
    """Normalised sphere average of ``w^alpha conj(w)^beta`` on S^{2n-1}.

    Vanishes unless ``alpha == beta``; the diagonal value is
    ``(n-1)! alpha! / (n-1+|alpha|)!``.
    """
    alpha = tuple(int(a) for a in alpha)
    beta = tuple(int(b) for b in beta)
    if len(alpha) != n or len(beta) != n:
        raise ValueError("multi-index length must equal n")
    if alpha != beta:
        return 0.0
    fact = math.factorial(n - 1)
    for a in alpha:
        fact *= math.factorial(a)
    return fact / math.factorial(n - 1 + sum(alpha))


def sphere_average(P: BiPolynomial) -> complex:
    """Exact normalised average of a polynomial over the unit sphere."""
    total = 0j
    for (a, b), c in P.terms.items():
        if a == b:
            total += c * sphere_moment(a, b, P.n)
    return total


def sphere_inner(P: BiPolynomial, Q: BiPolynomial) -> complex:
    """Exact ``integral of P * conj(Q)`` over the normalised unit sphere."""
    if P.n != Q.n:
        raise ValueError("mixed variable counts")
    return sphere_average(P * Q.conjugate())


# ---------------------------------------------------------------------------
# frame changes


def _frame_matrix(frame) -> np.ndarray:
    A = getattr(frame, "A", frame)
    return np.asarray(A, dtype=float)


def change_frame(P: BiPolynomial, frame, inverse: bool = False) -> BiPolynomial:
    """Compose with the real-linear map of an orthogonal frame matrix.

    Returns the polynomial ``z -> P(M z)`` where ``M`` is the
    complexified action of ``A`` (or of ``A^T`` when ``inverse``).
    """
    A = _frame_matrix(frame)
    if inverse:
        A = A.T
    n = P.n
    if A.shape != (2 * n, 2 * n):
        raise ValueError(f"frame matrix must be {2 * n} x {2 * n}")
    A11, A12 = A[:n, :n], A[:n, n:]
    A21, A22 = A[n:, :n], A[n:, n:]
    C = 0.5 * ((A11 + A22) + 1j * (A21 - A12))
    D = 0.5 * ((A11 - A22) + 1j * (A12 + A21))

    subs = []
    for j in range(n):
        terms = {}
        for k in range(n):
            ek = [0] * n
            ek[k] = 1
            terms[(tuple(ek), (0,) * n)] = C[j, k]
            terms[((0,) * n, tuple(ek))] = D[j, k]
        subs.append(BiPolynomial(n, terms))
    subs_bar = [L.conjugate() for L in subs]

    # cached powers of each substituted coordinate
    pow_cache: dict = {}

    def _power(base_idx: int, conj: bool, k: int) -> BiPolynomial:
        key = (base_idx, conj, k)
        if key not in pow_cache:
            base = subs_bar[base_idx] if conj else subs[base_idx]
            pow_cache[key] = base ** k
        return pow_cache[key]

    out = BiPolynomial.zero(n)
    for (a, b), c in P.terms.items():
        term = BiPolynomial.constant(n, c)
        for j in range(n):
            if a[j]:
                term = term * _power(j, False, a[j])
            if b[j]:
                term = term * _power(j, True, b[j])
        out = out + term
    return out


def in_frame_harmonic_class(P: BiPolynomial, p: int, q: int, frame, tol: float = 1e-12) -> bool:
    """Whether ``P`` lands in the harmonic grade (p, q) after the frame map."""
    Q = change_frame(P, frame)
    if Q.is_zero():
        return False
    scale = max(Q.max_abs_coeff(), 1.0)
    off_grade = max(
        (part.max_abs_coeff() for key, part in Q.bihomogeneous_parts().items() if key != (p, q)),
        default=0.0,
    )
    if off_grade > tol * scale:
        return False
    return laplacian(Q).max_abs_coeff() <= tol * scale
