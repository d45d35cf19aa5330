import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tsmkit import (
    DegenerateCombinationError,
    canonical_frame,
    canonical_group,
    frame_twist_table,
    heisenberg_group,
    phase_identity_check,
    quaternionic_group,
    reduce_direction,
    structure_combination,
    transport_point,
)


def unit_direction(rng, m):
    lam = rng.standard_normal(m)
    return lam / np.linalg.norm(lam)


def frame_defects(frame):
    d = frame.A.shape[0]
    orth = np.max(np.abs(frame.A.T @ frame.A - np.eye(d)))
    conj = np.max(np.abs(frame.V @ frame.A - frame.A @ frame.block))
    return float(orth), float(conj)


# ---------------------------------------------------------------------------
# frozen frames


def test_heisenberg_frame():
    frame = reduce_direction(heisenberg_group(1), [1.0])
    assert np.allclose(frame.mu, [1.0], atol=1e-12)
    orth, conj = frame_defects(frame)
    assert orth <= 1e-10 and conj <= 1e-10


def test_quaternionic_frozen_moments():
    frame = reduce_direction(quaternionic_group(), [3.0, 4.0, 0.0])
    assert np.allclose(frame.mu, [5.0, 5.0], atol=1e-10)


def test_canonical_group_recovers_moments():
    frame = reduce_direction(canonical_group([1.0, 3.0]), [1.0])
    assert np.allclose(sorted(frame.mu), [1.0, 3.0], atol=1e-10)


def test_moments_positive_and_sorted():
    rng = np.random.default_rng(5)
    frame = reduce_direction(quaternionic_group(), unit_direction(rng, 3))
    assert np.all(frame.mu > 0)
    assert np.all(np.diff(frame.mu) >= -1e-12)


# ---------------------------------------------------------------------------
# random directions


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=2**31 - 1))
def test_frame_residuals_quaternionic(seed):
    g = quaternionic_group()
    rng = np.random.default_rng(seed)
    lam = unit_direction(rng, 3)
    frame = reduce_direction(g, lam)
    orth, conj = frame_defects(frame)
    assert orth <= 1e-10
    assert conj <= 1e-10
    # H-type: every moment equals |lam|
    assert np.max(np.abs(frame.mu - 1.0)) <= 1e-10


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=2**31 - 1))
def test_transport_roundtrip(seed):
    g = quaternionic_group()
    rng = np.random.default_rng(seed)
    frame = reduce_direction(g, unit_direction(rng, 3))
    z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    back = transport_point(frame, transport_point(frame, z, inverse=True))
    assert np.max(np.abs(back - z)) <= 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=2**31 - 1))
def test_phase_identity(seed):
    """The structural pairing equals the reduced diagonal pairing."""
    g = quaternionic_group()
    rng = np.random.default_rng(seed)
    lam = 2.0 * unit_direction(rng, 3)
    frame = reduce_direction(g, lam)
    z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    w = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    ident = phase_identity_check(g, frame, z, w)
    assert ident.residual <= 1e-10 * max(1.0, abs(ident.lhs))


def test_phase_identity_breaks_with_scaled_moments():
    from dataclasses import replace

    g = quaternionic_group()
    frame = reduce_direction(g, [0.0, 0.0, 1.0])
    bad = replace(frame, mu=2.0 * frame.mu)
    rng = np.random.default_rng(0)
    z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    w = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    ident = phase_identity_check(g, bad, z, w)
    assert ident.residual > 1e-6


# ---------------------------------------------------------------------------
# degenerate inputs


def test_zero_direction_raises():
    with pytest.raises(DegenerateCombinationError):
        reduce_direction(quaternionic_group(), [0.0, 0.0, 0.0])


def test_singular_combination_raises():
    # rank-2 skew matrix on R^4: not a symplectic form
    V = np.zeros((4, 4))
    V[0, 2], V[2, 0] = -1.0, 1.0
    with pytest.raises(DegenerateCombinationError):
        canonical_frame(V)


def test_structure_combination_matches_sum():
    g = quaternionic_group()
    lam = np.array([0.3, -1.2, 0.4])
    V = structure_combination(g, lam)
    assert np.allclose(V, sum(l * U for l, U in zip(lam, g.U)), atol=1e-15)


# ---------------------------------------------------------------------------
# frame twist table


def test_frame_twist_table_is_diagonal():
    frame = reduce_direction(quaternionic_group(), [3.0, 4.0, 0.0])
    table = frame_twist_table(frame)
    assert np.allclose(table.nu, -np.diag(frame.mu), atol=1e-12)
    assert np.max(np.abs(table.eta)) <= 1e-12
