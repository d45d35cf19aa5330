import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tsmkit import (
    gaussian_mc_rule,
    mc_sphere_rule,
    parse_sphere_rule,
    product_sphere_rule,
    sphere_moment,
    tensor_grid_rule,
    truncation_radius,
)


def monomial_values(nodes, alpha, beta):
    return np.prod(nodes ** np.array(alpha), axis=1) * np.prod(
        np.conj(nodes) ** np.array(beta), axis=1
    )


# ---------------------------------------------------------------------------
# product rules on the sphere


@pytest.mark.parametrize("n", [1, 2, 3])
def test_product_rule_weights(n):
    rule = product_sphere_rule(n, 8)
    assert rule.weights.sum() == pytest.approx(1.0, abs=1e-14)
    assert np.all(rule.weights > 0)
    assert np.allclose(np.linalg.norm(rule.nodes, axis=1), 1.0, atol=1e-13)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_product_rule_moment_exactness(n):
    """Every monomial moment of total degree < order is reproduced."""
    rule = product_sphere_rule(n, 8)
    degrees = range(8)
    for total in degrees:
        for pa in range(total + 1):
            for alpha in itertools.product(range(pa + 1), repeat=n):
                if sum(alpha) != pa:
                    continue
                for beta in itertools.product(range(total - pa + 1), repeat=n):
                    if sum(beta) != total - pa:
                        continue
                    est, _ = rule.apply(monomial_values(rule.nodes, alpha, beta))
                    want = sphere_moment(alpha, beta, n)
                    assert abs(est - want) <= 1e-12, (alpha, beta)


def test_product_rule_is_cached():
    assert product_sphere_rule(2, 12) is product_sphere_rule(2, 12)


# ---------------------------------------------------------------------------
# Monte Carlo on the sphere


def test_mc_rule_nodes_on_sphere():
    rule = mc_sphere_rule(3, 500, seed=1)
    assert np.allclose(np.linalg.norm(rule.nodes, axis=1), 1.0, atol=1e-12)
    assert rule.weights.sum() == pytest.approx(1.0, abs=1e-12)


def test_mc_rule_seeded():
    a = mc_sphere_rule(2, 100, seed=9)
    b = mc_sphere_rule(2, 100, seed=9)
    c = mc_sphere_rule(2, 100, seed=10)
    assert np.array_equal(a.nodes, b.nodes)
    assert not np.array_equal(a.nodes, c.nodes)


@settings(max_examples=10, deadline=None)
@given(st.integers(min_value=0, max_value=2**31 - 1))
def test_mc_moment_within_four_sigma(seed):
    rule = mc_sphere_rule(2, 50_000, seed=seed)
    est, stderr = rule.apply(monomial_values(rule.nodes, (1, 0), (1, 0)))
    assert stderr is not None and stderr > 0
    assert abs(est - 0.5) <= 4.0 * stderr


# ---------------------------------------------------------------------------
# rule parsing


def test_parse_sphere_rule():
    rule = parse_sphere_rule("product:12", 2)
    assert rule.kind == "product" and rule.order == 12
    rule = parse_sphere_rule("mc:500", 2, seed=4)
    assert rule.kind == "mc" and rule.count == 500 and rule.seed == 4
    assert parse_sphere_rule("exact", 1) is None
    ready = product_sphere_rule(2, 6)
    assert parse_sphere_rule(ready, 2) is ready


def test_parse_sphere_rule_rejects_garbage():
    with pytest.raises(ValueError):
        parse_sphere_rule("simpson:3", 2)
    with pytest.raises(ValueError):
        parse_sphere_rule("product:no", 2)


# ---------------------------------------------------------------------------
# space rules


def test_truncation_radius():
    r = truncation_radius(1.0, tol=1e-14)
    assert math.exp(-1.0 * r * r) <= 1e-14 * 1.01
    assert truncation_radius(1.0, tol=1e-14, shift=2.5) == pytest.approx(r + 2.5)
    assert truncation_radius(4.0, tol=1e-14) < r


def test_tensor_grid_integrates_gaussian():
    radius = truncation_radius(1.0)
    rule = tensor_grid_rule(2, radius, 64)
    vals = np.exp(-np.sum(rule.nodes**2, axis=1))
    est, _ = rule.apply(vals)
    assert abs(est - math.pi) <= 1e-12


def test_tensor_grid_node_budget():
    with pytest.raises(ValueError):
        tensor_grid_rule(4, 5.0, 100)  # 1e8 nodes


def test_gaussian_mc_integrates_gaussian():
    rule = gaussian_mc_rule(2, 200_000, sigma=1.0, seed=12)
    vals = np.exp(-np.sum(rule.nodes**2, axis=1))
    est, stderr = rule.apply(vals)
    assert abs(est - math.pi) <= 5.0 * stderr
