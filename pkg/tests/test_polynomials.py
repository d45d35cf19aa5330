import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tsmkit import (
    BiPolynomial,
    change_frame,
    gamma_constant,
    harmonic_decompose,
    in_frame_harmonic_class,
    is_harmonic,
    laplacian,
    mc_sphere_rule,
    project_bidegree,
    quaternionic_group,
    reduce_direction,
    sphere_average,
    sphere_inner,
    sphere_moment,
    split_coordinate_product,
)


def random_poly(rng, n, degree, nterms=6):
    terms = {}
    for _ in range(nterms):
        total = int(rng.integers(0, degree + 1))
        pa = int(rng.integers(0, total + 1))
        alpha = tuple(np.bincount(rng.integers(0, n, pa), minlength=n))
        beta = tuple(np.bincount(rng.integers(0, n, total - pa), minlength=n))
        terms[(alpha, beta)] = complex(rng.standard_normal(), rng.standard_normal())
    return BiPolynomial(n, terms)


def direct_eval(P, z):
    """Term-by-term reference evaluation, bypassing the library's eval."""
    out = 0.0 + 0.0j
    for (alpha, beta), c in P.terms.items():
        out += c * np.prod(z**np.array(alpha)) * np.prod(np.conj(z) ** np.array(beta))
    return out


# ---------------------------------------------------------------------------
# algebra


def test_product_expansion_frozen():
    z1 = BiPolynomial.coordinate(2, 0)
    z2b = BiPolynomial.coordinate(2, 1, bar=True)
    P = (z1 + z2b) ** 2
    want = {
        ((2, 0), (0, 0)): 2.0 + 0.0j,
        ((1, 0), (0, 1)): 2.0 + 0.0j,
        ((0, 0), (0, 2)): 2.0 + 0.0j,
    }
    got = {key: complex(c) for key, c in P.terms.items()}
    assert set(got) == set(want)
    assert got[((2, 0), (0, 0))] == 1.0
    assert got[((1, 0), (0, 1))] == 2.0
    assert got[((0, 0), (0, 2))] == 1.0


@settings(max_examples=40)
@given(
    st.integers(min_value=1, max_value=3),
    st.integers(min_value=0, max_value=2**31 - 1),
)
def test_eval_matches_direct(n, seed):
    rng = np.random.default_rng(seed)
    P = random_poly(rng, n, 4)
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    assert abs(complex(P.eval(z)) - direct_eval(P, z)) <= 1e-10 * max(
        1.0, abs(direct_eval(P, z))
    )


@settings(max_examples=30)
@given(
    st.integers(min_value=1, max_value=3),
    st.integers(min_value=0, max_value=2**31 - 1),
)
def test_product_eval_consistent(n, seed):
    rng = np.random.default_rng(seed)
    P = random_poly(rng, n, 3)
    Q = random_poly(rng, n, 3)
    z = 0.7 * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    lhs = complex((P * Q).eval(z))
    rhs = complex(P.eval(z)) * complex(Q.eval(z))
    assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(rhs))


def test_conjugate_eval():
    rng = np.random.default_rng(3)
    P = random_poly(rng, 2, 3)
    z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    assert abs(complex(P.conjugate().eval(z)) - np.conj(complex(P.eval(z)))) <= 1e-10


def test_derivatives_frozen():
    # d/dz1 (z1^2 zbar2) = 2 z1 zbar2 ; d/dzbar2 (z1^2 zbar2) = z1^2
    P = BiPolynomial.monomial(2, (2, 0), (0, 1))
    assert (P.dz(0) - 2.0 * BiPolynomial.monomial(2, (1, 0), (0, 1))).is_zero()
    assert (P.dzbar(1) - BiPolynomial.monomial(2, (2, 0), (0, 0))).is_zero()
    assert P.dz(1).is_zero()


# ---------------------------------------------------------------------------
# harmonicity and decomposition


def test_laplacian_of_radius_sq():
    for n in (1, 2, 3):
        L = laplacian(BiPolynomial.radius_sq(n))
        assert (L - BiPolynomial.constant(n, 4.0 * n)).is_zero()


def test_is_harmonic_examples():
    assert is_harmonic(BiPolynomial.coordinate(2, 0) ** 3)
    assert is_harmonic(BiPolynomial.coordinate(2, 0) * BiPolynomial.coordinate(2, 1, bar=True))
    assert not is_harmonic(BiPolynomial.radius_sq(2))


def brute_force_layers(P, n):
    """Solve P = sum_k rho^{2k} H_k by least squares over the monomial basis.

    Independent of harmonic_decompose: unknowns are the coefficients of
    each layer, constrained to be harmonic by appending the laplacian
    rows with a large weight.
    """
    p, q = P.bidegree()
    kmax = min(p, q)
    monos = {}
    for k in range(kmax + 1):
        for alpha in itertools.product(range(p - k + 1), repeat=n):
            if sum(alpha) != p - k:
                continue
            for beta in itertools.product(range(q - k + 1), repeat=n):
                if sum(beta) != q - k:
                    continue
                monos[(k, alpha, beta)] = len(monos)
    cols = []
    r2 = BiPolynomial.radius_sq(n)
    for (k, alpha, beta) in monos:
        contrib = (r2**k) * BiPolynomial.monomial(n, alpha, beta)
        lap = laplacian(BiPolynomial.monomial(n, alpha, beta))
        cols.append(((k, alpha, beta), contrib, lap))
    eq_keys = set()
    for _, contrib, lap in cols:
        eq_keys.update(("sum", key) for key in contrib.terms)
        eq_keys.update(("harm", key) for key in lap.terms)
    eq_keys.update(("sum", key) for key in P.terms)
    eq_index = {key: i for i, key in enumerate(sorted(eq_keys))}
    A = np.zeros((len(eq_index), len(monos)), dtype=complex)
    b = np.zeros(len(eq_index), dtype=complex)
    W = 1e3
    for j, (_, contrib, lap) in enumerate(cols):
        for key, c in contrib.terms.items():
            A[eq_index[("sum", key)], j] += c
        for key, c in lap.terms.items():
            A[eq_index[("harm", key)], j] += W * c
    for key, c in P.terms.items():
        b[eq_index[("sum", key)]] = c
    coeffs, *_ = np.linalg.lstsq(A, b, rcond=None)
    layers = []
    for k in range(kmax + 1):
        H = BiPolynomial.zero(n)
        for (kk, alpha, beta), j in monos.items():
            if kk == k:
                H = H + BiPolynomial.monomial(n, alpha, beta, coeffs[j])
        layers.append(H)
    return layers


@pytest.mark.parametrize("n", [1, 2, 3])
def test_decomposition_matches_least_squares(n):
    rng = np.random.default_rng(11 + n)
    P = random_poly(rng, n, 3)
    for part in P.bihomogeneous_parts().values():
        got = harmonic_decompose(part)
        want = brute_force_layers(part, n)
        assert len(got) == len(want)
        for G, Wt in zip(got, want):
            assert (G - Wt).max_abs_coeff() <= 1e-7 * max(1.0, part.max_abs_coeff())


@settings(max_examples=30, deadline=None)
@given(
    st.integers(min_value=1, max_value=3),
    st.integers(min_value=0, max_value=2**31 - 1),
)
def test_decomposition_reconstructs(n, seed):
    rng = np.random.default_rng(seed)
    P = random_poly(rng, n, 5)
    r2 = BiPolynomial.radius_sq(n)
    for part in P.bihomogeneous_parts().values():
        layers = harmonic_decompose(part)
        rebuilt = BiPolynomial.zero(n)
        for k, layer in enumerate(layers):
            assert is_harmonic(layer, tol=1e-9)
            rebuilt = rebuilt + (r2**k) * layer
        assert (rebuilt - part).max_abs_coeff() <= 1e-10 * max(1.0, part.max_abs_coeff())


def test_frozen_layers_two_variables():
    P = BiPolynomial.coordinate(2, 0) * BiPolynomial.coordinate(2, 0, bar=True)
    layers = harmonic_decompose(P)
    assert (layers[0] - (P - 0.5 * BiPolynomial.radius_sq(2))).max_abs_coeff() <= 1e-14
    assert (layers[1] - BiPolynomial.constant(2, 0.5)).max_abs_coeff() <= 1e-14


def test_project_bidegree_reconstructs():
    rng = np.random.default_rng(2)
    P = random_poly(rng, 2, 4)
    grades = set()
    for (pp, qq) in P.bihomogeneous_parts():
        for k in range(min(pp, qq) + 1):
            grades.add((pp - k, qq - k))
    total = BiPolynomial.zero(2)
    for (p, q) in grades:
        total = total + project_bidegree(P, p, q)
    assert (total - P).max_abs_coeff() <= 1e-10 * max(1.0, P.max_abs_coeff())


def test_project_bidegree_frozen():
    # |z1|^2 over two variables: grade (1,1) head plus rho^2/2 over (0,0)
    P = BiPolynomial.coordinate(2, 0) * BiPolynomial.coordinate(2, 0, bar=True)
    low = project_bidegree(P, 0, 0)
    assert (low - 0.5 * BiPolynomial.radius_sq(2)).max_abs_coeff() <= 1e-14


# ---------------------------------------------------------------------------
# sphere moments


def test_sphere_moment_frozen():
    assert sphere_moment((1, 0), (1, 0), 2) == pytest.approx(0.5, abs=1e-15)
    assert sphere_moment((2, 0), (2, 0), 2) == pytest.approx(1.0 / 3.0, abs=1e-15)
    assert sphere_moment((1,), (1,), 1) == pytest.approx(1.0, abs=1e-15)
    assert sphere_moment((1, 0), (0, 1), 2) == 0.0


def test_sphere_average_against_monte_carlo():
    rng = np.random.default_rng(17)
    n = 2
    P = random_poly(rng, n, 4)
    exact = complex(sphere_average(P))
    rule = mc_sphere_rule(n, 200_000, seed=5)
    est, stderr = rule.apply(P.eval(rule.nodes))
    assert abs(est - exact) <= 5.0 * max(stderr, 1e-12)


def test_sphere_inner_orthogonality():
    z1 = BiPolynomial.coordinate(2, 0)
    z2b = BiPolynomial.coordinate(2, 1, bar=True)
    head = harmonic_decompose(z1 * z1.conjugate())[0]
    assert abs(sphere_inner(z1, z2b)) <= 1e-15
    assert abs(sphere_inner(head, BiPolynomial.one(2))) <= 1e-15


# ---------------------------------------------------------------------------
# coordinate-product split


def test_gamma_constant():
    assert gamma_constant(1, 1, 0) == pytest.approx(1.0)
    assert gamma_constant(2, 1, 1) == pytest.approx(1.0 / 3.0)
    assert gamma_constant(3, 2, 1) == pytest.approx(1.0 / 5.0)


@pytest.mark.parametrize("n,p,q", [(1, 2, 0), (2, 1, 1), (2, 2, 0), (3, 1, 1)])
def test_split_coordinate_product(n, p, q):
    rng = np.random.default_rng(7 * n + p + q)
    raw = random_poly(rng, n, p + q)
    part = project_bidegree(raw, p, q)
    if part.is_zero():
        part = BiPolynomial.monomial(n, (p,) + (0,) * (n - 1), (q,) + (0,) * (n - 1))
    H = harmonic_decompose(part)[0]
    if H.is_zero():
        pytest.skip("no harmonic head for this draw")
    P0, gamma = split_coordinate_product(H, 0, side="zbar")
    assert gamma == pytest.approx(gamma_constant(n, p, q))
    recon = P0 + gamma * BiPolynomial.radius_sq(n) * H.dz(0)
    target = BiPolynomial.coordinate(n, 0, bar=True) * H
    assert (recon - target).max_abs_coeff() <= 1e-10 * max(1.0, H.max_abs_coeff())
    assert is_harmonic(P0, tol=1e-9)


def test_split_rejects_nonharmonic():
    P = BiPolynomial.coordinate(2, 0) * BiPolynomial.coordinate(2, 0, bar=True)
    with pytest.raises(ValueError, match="harmonic"):
        split_coordinate_product(P, 0)


# ---------------------------------------------------------------------------
# frame changes


def test_change_frame_matches_transport():
    from tsmkit import transport_point

    g = quaternionic_group()
    frame = reduce_direction(g, [0.6, -0.8, 0.0])
    rng = np.random.default_rng(23)
    P = random_poly(rng, 2, 3)
    z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    moved = change_frame(P, frame)
    # the reframed polynomial at the reduced coordinates equals the
    # original at the structural coordinates
    lhs = complex(moved.eval(transport_point(frame, z)))
    rhs = complex(P.eval(z))
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))
    # and the inverse change undoes it
    back = change_frame(moved, frame, inverse=True)
    assert (back - P).max_abs_coeff() <= 1e-10


def test_change_frame_preserves_harmonicity():
    g = quaternionic_group()
    frame = reduce_direction(g, [0.0, 1.0, 0.0])
    H = BiPolynomial.coordinate(2, 0) * BiPolynomial.coordinate(2, 1, bar=True)
    assert is_harmonic(change_frame(H, frame), tol=1e-10)
    # pulling a bigraded harmonic back through the frame lands it in the
    # frame's own (1, 1) class; the raw polynomial generally is not there
    pulled = change_frame(H, frame, inverse=True)
    assert in_frame_harmonic_class(pulled, 1, 1, frame)
