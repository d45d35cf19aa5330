"""Quadrature rules on complex spheres and on the full phase space.

Sphere rules act on the unit sphere of ``C^n`` with the normalised
surface measure.  The deterministic product rule uses the complex-polar
factorisation of that measure: the squared moduli ``(|w_1|^2, ..,
|w_n|^2)`` are uniform on the probability simplex and the phases are
independent uniform angles.  Equispaced points handle each phase
exactly, and Gauss rules adapted to the simplex marginals handle the
moduli, so monomials ``w^alpha conj(w)^beta`` of total degree
``< order`` integrate exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

SPHERE_KINDS = ("product", "mc", "exact")


@dataclass(frozen=True)
class SphereRule:
    """Nodes on the unit sphere of ``C^n`` with weights summing to one."""

    kind: str
    n: int
    order: int
    nodes: np.ndarray  # (N, n) complex
    weights: np.ndarray  # (N,) real
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "nodes", np.asarray(self.nodes, dtype=complex))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    @property
    def count(self) -> int:
        return self.nodes.shape[0]

    def apply(self, values: np.ndarray) -> tuple[complex, float | None]:
        """Weighted sum of node values, with a standard error for mc rules."""
        values = np.asarray(values, dtype=complex)
        total = complex(np.sum(self.weights * values))
        if self.kind != "mc" or self.count < 2:
            return total, None
        resid = values - total
        var = float(np.sum(self.weights**2 * np.abs(resid) ** 2))
        return total, math.sqrt(var * self.count / max(self.count - 1, 1))


def _gauss_legendre01(m: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(m)
    return 0.5 * (x + 1.0), 0.5 * w


def _simplex_rule(n: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights for the uniform distribution on the (n-1)-simplex."""
    if n == 1:
        return np.ones((1, 1)), np.ones(1)
    if n == 2:
        t, w = _gauss_legendre01(m)
        return np.column_stack([t, 1.0 - t]), w
    if n == 3:
        # marginal density of s1 is 2(1 - s1); conditional s2 is uniform
        x, wx = roots_jacobi(m, 1, 0)
        s1 = 0.5 * (x + 1.0)
        w1 = 0.5 * wx
        t, wt = _gauss_legendre01(m)
        nodes, weights = [], []
        for a, wa in zip(s1, w1):
            for b, wb in zip(t, wt):
                s2 = (1.0 - a) * b
                nodes.append([a, s2, 1.0 - a - s2])
                weights.append(wa * wb)
        return np.array(nodes), np.array(weights)
    raise ValueError("product sphere rules cover n <= 3; use an mc rule instead")


@lru_cache(maxsize=64)
def product_sphere_rule(n: int, order: int) -> SphereRule:
    """Deterministic rule exact for monomials of total degree < order."""
    if order < 1:
        raise ValueError("order must be positive")
    m_ang = max(int(order), 1)
    m_rad = max((int(order) + 1) // 2, 1)
    s_nodes, s_weights = _simplex_rule(n, m_rad)
    theta = 2.0 * np.pi * np.arange(m_ang) / m_ang
    phases = np.exp(1j * theta)

    idx = np.indices((m_ang,) * n).reshape(n, -1).T  # all phase combinations
    radial = np.sqrt(s_nodes)  # (S, n)
    nodes = (radial[:, None, :] * phases[idx][None, :, :]).reshape(-1, n)
    weights = np.repeat(s_weights, idx.shape[0]) / float(m_ang**n)
    weights = weights / weights.sum()
    return SphereRule(kind="product", n=n, order=order, nodes=nodes, weights=weights)


def mc_sphere_rule(n: int, count: int, seed: int = 0) -> SphereRule:
    """Seeded Monte Carlo rule: normalised Gaussian directions."""
    if count < 1:
        raise ValueError("count must be positive")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((count, 2 * n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    nodes = g[:, :n] + 1j * g[:, n:]
    weights = np.full(count, 1.0 / count)
    return SphereRule(kind="mc", n=n, order=count, nodes=nodes, weights=weights, seed=seed)


def parse_sphere_rule(spec: str | SphereRule, n: int, seed: int = 0) -> SphereRule | None:
    """Build a rule from a ``kind:param`` string.

    ``product:ORDER`` and ``mc:COUNT`` produce node rules; ``exact``
    returns ``None``, signalling the caller to use the closed-form
    moment path instead of nodes.
    """
    if isinstance(spec, SphereRule):
        return spec
    parts = str(spec).split(":")
    kind = parts[0].strip().lower()
    if kind == "exact":
        return None
    if len(parts) != 2:
        raise ValueError(f"rule spec {spec!r} is not of the form kind:param")
    param = int(parts[1])
    if kind == "product":
        return product_sphere_rule(n, param)
    if kind == "mc":
        return mc_sphere_rule(n, param, seed=seed)
    raise ValueError(f"unknown sphere rule kind {kind!r}; expected one of {SPHERE_KINDS}")


# ---------------------------------------------------------------------------
# full-space rules


@dataclass(frozen=True)
class SpaceRule:
    """Nodes in ``R^d`` with weights for the Lebesgue integral."""

    kind: str
    dim: int
    nodes: np.ndarray  # (N, d)
    weights: np.ndarray  # (N,)
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "nodes", np.asarray(self.nodes, dtype=float))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    @property
    def count(self) -> int:
        return self.nodes.shape[0]

    def apply(self, values: np.ndarray) -> tuple[complex, float | None]:
        values = np.asarray(values, dtype=complex)
        total = complex(np.sum(self.weights * values))
        if self.kind != "mc" or self.count < 2:
            return total, None
        contrib = self.weights * values * self.count
        var = float(np.mean(np.abs(contrib - total) ** 2))
        return total, math.sqrt(var / self.count)


def truncation_radius(min_decay: float, tol: float = 1e-14, shift: float = 0.0) -> float:
    """Radius beyond which ``exp(-min_decay * r^2)`` falls below ``tol``.

    ``min_decay`` is the smallest Gaussian decay rate of the integrand
    envelope (``-Re a`` for ``exp(a rho^2)`` factors); ``shift`` widens
    the box to absorb translated centres.
    """
    if min_decay <= 0:
        raise ValueError("integrand envelope must decay")
    return shift + math.sqrt(-math.log(tol) / min_decay)


def tensor_grid_rule(dim: int, radius: float, per_axis: int) -> SpaceRule:
    """Tensor Gauss-Legendre rule on the cube ``[-radius, radius]^dim``."""
    if per_axis < 1:
        raise ValueError("per_axis must be positive")
    if per_axis**dim > 40_000_000:
        raise ValueError("grid rule too large; lower per_axis or use mc")
    x, w = np.polynomial.legendre.leggauss(per_axis)
    x = radius * x
    w = radius * w
    grids = np.meshgrid(*([x] * dim), indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=-1)
    weights = np.ones(nodes.shape[0])
    idx = np.indices((per_axis,) * dim).reshape(dim, -1)
    for d in range(dim):
        weights *= w[idx[d]]
    return SpaceRule(kind="grid", dim=dim, nodes=nodes, weights=weights)


def gaussian_mc_rule(dim: int, count: int, sigma: float, seed: int = 0) -> SpaceRule:
    """Importance rule: nodes from ``N(0, sigma^2 I)``, weights ``1/pdf/count``."""
    if count < 1:
        raise ValueError("count must be positive")
    rng = np.random.default_rng(seed)
    nodes = sigma * rng.standard_normal((count, dim))
    log_pdf = -0.5 * np.sum(nodes**2, axis=1) / sigma**2 - dim * math.log(
        sigma * math.sqrt(2.0 * math.pi)
    )
    weights = np.exp(-log_pdf) / count
    return SpaceRule(kind="mc", dim=dim, nodes=nodes, weights=weights, seed=seed)
