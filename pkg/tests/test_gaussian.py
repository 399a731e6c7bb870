"""Gaussian-state core: symplectic algebra, loss model, closed forms.

The closed-form joint variances are checked against an independent oracle:
the same quantities read off covariance matrices built by explicit matrix
products (squeeze, then one beamsplitter per arm against vacuum ancillas).
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sqzkit.errors import DimensionMismatchError, InvalidArgumentError
from sqzkit.gaussian import (
    GaussianState,
    analytic_joint_variances,
    analytic_squeezing,
    apply_map,
    beamsplitter_map,
    joint_variances,
    lossy_tmsv_state,
    phase_rotation_map,
    symplectic_form,
    two_mode_squeeze_map,
    vacuum_state,
    variance_to_db,
)


def chain_state(r, t_b, t_c):
    """Oracle: build the lossy pair state by explicit matrix products only."""
    n = 4
    v = np.eye(2 * n)
    for smap in (
        two_mode_squeeze_map(r, (1, 2), n),
        beamsplitter_map(t_b, (0, 1), n),
        beamsplitter_map(t_c, (2, 3), n),
    ):
        s = smap.matrix
        v = s @ v @ s.T
    return v


def oracle_variances(r, t_b, t_c):
    v = chain_state(r, t_b, t_c)
    qb, qc = 2 * 1, 2 * 2  # q indices of the two surviving modes
    var_sum = (v[qb, qb] + v[qc, qc] + 2 * v[qb, qc]) / 2.0
    var_diff = (v[qb, qb] + v[qc, qc] - 2 * v[qb, qc]) / 2.0
    return min(var_diff, var_sum), max(var_diff, var_sum)


def test_vacuum_state_is_identity():
    state = vacuum_state(3)
    assert np.array_equal(state.covariance, np.eye(6))
    assert np.array_equal(state.displacement, np.zeros(6))
    assert state.n_modes == 3
    state.validate()


def test_symplectic_form_blocks():
    omega = symplectic_form(2)
    w = np.array([[0.0, 1.0], [-1.0, 0.0]])
    assert np.array_equal(omega[:2, :2], w)
    assert np.array_equal(omega[2:, 2:], w)
    assert np.array_equal(omega[:2, 2:], np.zeros((2, 2)))


def test_squeeze_map_matrix_structure():
    r = 0.3
    s = two_mode_squeeze_map(r, (0, 1), 2).matrix
    ch, sh = math.cosh(r), math.sinh(r)
    expected = np.array(
        [
            [ch, 0, sh, 0],
            [0, ch, 0, -sh],
            [sh, 0, ch, 0],
            [0, -sh, 0, ch],
        ]
    )
    assert np.allclose(s, expected, atol=1e-15)
    assert two_mode_squeeze_map(r, (0, 1), 2).is_symplectic()


def test_beamsplitter_map_structure():
    t = 0.36
    s = beamsplitter_map(t, (0, 1), 2).matrix
    a, b = math.sqrt(t), math.sqrt(1 - t)
    assert np.allclose(s[:2, :2], a * np.eye(2), atol=1e-15)
    assert np.allclose(s[:2, 2:], b * np.eye(2), atol=1e-15)
    assert np.allclose(s[2:, :2], -b * np.eye(2), atol=1e-15)
    assert np.allclose(s[2:, 2:], a * np.eye(2), atol=1e-15)


def test_phase_rotation_quarter_turn_swaps_quadratures():
    squeezed = GaussianState(np.zeros(2), np.diag([4.0, 0.25]))
    state = apply_map(squeezed, phase_rotation_map(math.pi / 2, 0, 1))
    assert np.allclose(np.diag(state.covariance), [0.25, 4.0], atol=1e-12)


def test_vacuum_invariant_under_beamsplitter_and_rotation():
    state = vacuum_state(2)
    for smap in (beamsplitter_map(0.7, (0, 1), 2), phase_rotation_map(1.1, 0, 2)):
        out = apply_map(state, smap)
        assert np.allclose(out.covariance, np.eye(4), atol=1e-12)


def test_apply_map_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        apply_map(vacuum_state(2), phase_rotation_map(0.5, 0, 3))


def test_validate_rejects_unphysical_covariance():
    bad = GaussianState(np.zeros(2), 0.5 * np.eye(2))  # below vacuum in both quadratures
    with pytest.raises(InvalidArgumentError):
        bad.validate()


def test_validate_rejects_asymmetric_covariance():
    cov = np.eye(2)
    cov[0, 1] = 1e-6
    with pytest.raises(InvalidArgumentError):
        GaussianState(np.zeros(2), cov).validate()


def test_mode_pair_validation():
    with pytest.raises(InvalidArgumentError):
        two_mode_squeeze_map(0.5, (1, 1), 3)
    with pytest.raises(InvalidArgumentError):
        beamsplitter_map(0.5, (0, 3), 3)
    with pytest.raises(InvalidArgumentError):
        beamsplitter_map(1.2, (0, 1), 2)


def test_lossy_state_matches_matrix_chain_oracle():
    state = lossy_tmsv_state(0.986, 0.31, 0.26)
    assert np.allclose(state.covariance, chain_state(0.986, 0.31, 0.26), atol=1e-12)
    state.validate()


def test_joint_variances_against_oracle():
    rng = np.random.default_rng(42)
    for _ in range(200):
        r = rng.uniform(0.0, 2.5)
        t_b = rng.uniform(0.01, 1.0)
        t_c = rng.uniform(0.01, 1.0)
        lo, hi = oracle_variances(r, t_b, t_c)
        v_minus, v_plus = analytic_joint_variances(r, t_b, t_c)
        assert math.isclose(v_minus, lo, rel_tol=0, abs_tol=1e-10)
        assert math.isclose(v_plus, hi, rel_tol=0, abs_tol=1e-10)

        jv = joint_variances(lossy_tmsv_state(r, t_b, t_c), 1, 2)
        assert math.isclose(min(jv.v_q_minus, jv.v_q_plus), lo, abs_tol=1e-10)
        assert math.isclose(max(jv.v_q_minus, jv.v_q_plus), hi, abs_tol=1e-10)


def test_symplectic_invariant_fuzz():
    # SΩSᵀ = Ω for random compositions of the three generator families.
    rng = np.random.default_rng(7)
    omega = symplectic_form(4)
    for _ in range(300):
        smap = two_mode_squeeze_map(rng.uniform(0, 2), (1, 2), 4)
        for _ in range(rng.integers(1, 4)):
            kind = rng.integers(0, 3)
            if kind == 0:
                pair = tuple(sorted(rng.choice(4, size=2, replace=False)))
                inner = beamsplitter_map(rng.uniform(0.01, 1.0), pair, 4)
            elif kind == 1:
                inner = phase_rotation_map(rng.uniform(-math.pi, math.pi), rng.integers(0, 4), 4)
            else:
                pair = tuple(sorted(rng.choice(4, size=2, replace=False)))
                inner = two_mode_squeeze_map(rng.uniform(0, 1.5), pair, 4)
            smap = smap.compose(inner)
        s = smap.matrix
        assert np.max(np.abs(s @ omega @ s.T - omega)) < 1e-10


def test_compose_order():
    # compose(inner) applies inner first: matrices multiply as outer @ inner.
    outer = beamsplitter_map(0.5, (0, 1), 2)
    inner = phase_rotation_map(0.3, 0, 2)
    assert np.allclose(outer.compose(inner).matrix, outer.matrix @ inner.matrix, atol=1e-15)


def test_variance_to_db():
    assert variance_to_db(1.0) == 0.0
    assert math.isclose(variance_to_db(0.1), -10.0, abs_tol=1e-12)
    with pytest.raises(InvalidArgumentError):
        variance_to_db(0.0)


def test_analytic_squeezing_lossless_symmetry():
    sq, anti = analytic_squeezing(0.986, 1.0, 1.0)
    assert math.isclose(sq, -anti, abs_tol=1e-12)
    assert math.isclose(sq, -20.0 * 0.986 / math.log(10.0), abs_tol=1e-9)


@settings(max_examples=50, deadline=None)
@given(
    r=st.floats(0.0, 3.0),
    t_b=st.floats(0.001, 1.0),
    t_c=st.floats(0.001, 1.0),
)
def test_joint_variance_bounds(r, t_b, t_c):
    """Loss never creates squeezing beyond the source, nor drops below 1-T mixing."""
    v_minus, v_plus = analytic_joint_variances(r, t_b, t_c)
    assert 0.0 < v_minus <= v_plus
    # loss only pulls both variances toward vacuum: neither lossless bound is beaten
    assert v_minus >= math.exp(-2.0 * r) - 1e-12
    assert v_plus <= math.exp(2.0 * r) * (1.0 + 1e-12)


@settings(max_examples=50, deadline=None)
@given(r=st.floats(0.0, 3.0), t=st.floats(0.001, 1.0))
def test_equal_arm_loss_monotone(r, t):
    """More balanced loss -> shallower squeezing, monotonically."""
    sq_full, _ = analytic_squeezing(r, 1.0, 1.0)
    sq_lossy, _ = analytic_squeezing(r, t, t)
    assert sq_full - 1e-12 <= sq_lossy <= 1e-9
