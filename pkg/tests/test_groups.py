import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tsmkit import (
    GroupPoint,
    StepTwoGroup,
    canonical_group,
    check_metivier,
    complexify,
    group_from_dict,
    group_law,
    heisenberg_group,
    load_group,
    quaternionic_group,
    realify,
    save_group,
    twist_coefficients,
    validate_group,
)
from tsmkit.groups import group_inverse


def random_skew(rng, size):
    M = rng.standard_normal((size, size))
    return M - M.T


# ---------------------------------------------------------------------------
# complexification


@given(st.integers(min_value=1, max_value=5), st.integers(min_value=0, max_value=2**31 - 1))
def test_complexify_roundtrip(n, seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(2 * n)
    assert np.allclose(realify(complexify(x)), x)


def test_complexify_convention():
    # z_l = x_l + i x_{n+l}
    x = np.array([1.0, 2.0, 3.0, 4.0])
    z = complexify(x)
    assert np.allclose(z, np.array([1.0 + 3.0j, 2.0 + 4.0j]))


# ---------------------------------------------------------------------------
# group law


def test_heisenberg_frozen_product():
    g = heisenberg_group(1)
    a = GroupPoint(np.array([1.0, 0.0]), np.array([0.0]))
    b = GroupPoint(np.array([0.0, 1.0]), np.array([0.0]))
    out = group_law(g, a, b)
    assert np.allclose(out.x, [1.0, 1.0])
    assert np.allclose(out.t, [-0.5])


@settings(max_examples=30)
@given(st.integers(min_value=0, max_value=2**31 - 1))
def test_associativity_quaternionic(seed):
    g = quaternionic_group()
    rng = np.random.default_rng(seed)
    pts = [GroupPoint(rng.standard_normal(4), rng.standard_normal(3)) for _ in range(3)]
    left = group_law(g, group_law(g, pts[0], pts[1]), pts[2])
    right = group_law(g, pts[0], group_law(g, pts[1], pts[2]))
    assert np.allclose(left.x, right.x, atol=1e-12)
    assert np.allclose(left.t, right.t, atol=1e-12)


@given(st.integers(min_value=0, max_value=2**31 - 1))
def test_inverse(seed):
    g = heisenberg_group(2)
    rng = np.random.default_rng(seed)
    a = GroupPoint(rng.standard_normal(4), rng.standard_normal(1))
    e = group_law(g, a, group_inverse(g, a))
    assert np.allclose(e.x, 0.0, atol=1e-12)
    assert np.allclose(e.t, 0.0, atol=1e-12)


# ---------------------------------------------------------------------------
# validation


DEFECT_CONDITIONS = ("skew_symmetry", "orthogonality", "anticommutation")


def defect_residual(report):
    return max(
        c.residual for c in report.conditions if c.name.startswith(DEFECT_CONDITIONS)
    )


def test_validate_heisenberg_htype():
    g = heisenberg_group(1)
    report = validate_group(g.U, g.n, g.m, mode="htype")
    assert report.passed
    assert defect_residual(report) <= 1e-12


def test_validate_quaternionic_htype():
    g = quaternionic_group()
    report = validate_group(g.U, g.n, g.m, mode="htype")
    assert report.passed
    assert defect_residual(report) <= 1e-12


def test_quaternionic_anticommutation_exact():
    g = quaternionic_group()
    for i in range(3):
        Ui = g.U[i]
        assert np.array_equal(Ui.T @ Ui, np.eye(4))
        assert np.array_equal(Ui.T, -Ui)
        for j in range(i + 1, 3):
            Uj = g.U[j]
            assert np.array_equal(Ui @ Uj + Uj @ Ui, np.zeros((4, 4)))


def test_validate_rejects_nonskew():
    g = heisenberg_group(1)
    bad = (np.eye(2),)
    report = validate_group(bad, 1, 1, mode="metivier")
    assert not report.passed
    assert any("skew" in c.name for c in report.conditions if not c.passed)


def test_validate_rejects_dependent_matrices():
    U = heisenberg_group(1).U[0]
    report = validate_group((U, 2.0 * U), 1, 2, mode="metivier")
    assert not report.passed


def test_group_shape_errors():
    with pytest.raises(ValueError):
        StepTwoGroup(n=1, m=1, U=(np.eye(3),))
    with pytest.raises(ValueError):
        StepTwoGroup(n=0, m=1, U=())
    with pytest.raises(ValueError):
        StepTwoGroup(n=1, m=2, U=(np.eye(2),))
    with pytest.raises(ValueError):
        StepTwoGroup(n=1, m=1, U=(np.eye(2),), mode="nonsense")


# ---------------------------------------------------------------------------
# serialization


def test_group_json_roundtrip(tmp_path):
    g = quaternionic_group()
    path = tmp_path / "quat.json"
    save_group(g, path)
    back = load_group(path)
    assert back.canonical_json() == g.canonical_json()
    assert back.digest() == g.digest()


def test_group_from_dict_nested_and_flat():
    g = heisenberg_group(1)
    flat = json.loads(g.canonical_json())
    nested = dict(flat, U=[g.U[0].tolist()])
    assert group_from_dict(flat).canonical_json() == g.canonical_json()
    assert group_from_dict(nested).canonical_json() == g.canonical_json()


def test_group_from_dict_rejects_bad_length():
    with pytest.raises(ValueError):
        group_from_dict({"n": 1, "m": 1, "U": [[1.0, 2.0, 3.0]]})


# ---------------------------------------------------------------------------
# metivier probe


def test_metivier_certifies_htype():
    report = check_metivier(quaternionic_group(), seed=3)
    assert report.passed and report.certified
    # H-type with |lam| = 1 forces |det| = |lam|^{2n} = 1 on the unit sphere
    assert abs(report.min_abs_det - 1.0) <= 1e-10


def test_metivier_heuristic_on_canonical_group():
    g = canonical_group([1.0, 3.0])
    report = check_metivier(g, seed=3)
    assert report.passed and not report.certified
    # det(lam * Ucanon) = lam^4 * (1*3)^2 for m = 1, |lam| = 1
    assert abs(report.min_abs_det - 9.0) <= 1e-10


def test_metivier_flags_degenerate_direction():
    # rank-2 skew 4x4 matrix: the only structure matrix, singular at lam = 1
    U = np.zeros((4, 4))
    U[0, 2], U[2, 0] = -1.0, 1.0
    g = StepTwoGroup(n=2, m=1, U=(U,), mode="metivier")
    report = check_metivier(g, seed=0)
    assert not report.passed
    assert report.min_abs_det <= 1e-10


# ---------------------------------------------------------------------------
# twist tables


def test_heisenberg_twist_frozen():
    g = heisenberg_group(1)
    table = twist_coefficients(g, [1.0])
    assert np.allclose(table.nu, [[-1.0]], atol=1e-15)
    assert np.allclose(table.eta, [[0.0]], atol=1e-15)


@settings(max_examples=50, deadline=None)
@given(
    st.integers(min_value=1, max_value=4),
    st.integers(min_value=0, max_value=2**31 - 1),
)
def test_twist_structure_for_random_skew(n, seed):
    """eta diagonal vanishes and nu diagonal is real for any skew matrix."""
    rng = np.random.default_rng(seed)
    g = StepTwoGroup(n=n, m=1, U=(random_skew(rng, 2 * n),), mode="metivier")
    table = twist_coefficients(g, [1.0])
    assert np.max(np.abs(np.diag(table.eta))) <= 1e-12
    assert np.max(np.abs(np.imag(np.diag(table.nu)))) <= 1e-12
