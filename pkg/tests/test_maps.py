import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from detdiff import (
    EMPTY_INTERVAL,
    MapDefinitionError,
    PiecewiseLinearLiftMap,
    compute_route,
    eval_map,
    fractional_part,
    linear_map,
    map_from_spec,
    nearest_integer,
    reconstruct_initial,
    shift_function,
    validate_stretching,
    zigzag_map,
)
from conftest import make_random_monotone_map

# hypothesis draws away from exact half-integers, where the half-open
# cell convention makes float identities brittle by design
finite_x = st.floats(-10.0, 10.0).filter(lambda x: abs(x + 0.5 - round(x + 0.5)) > 1e-9)


def test_nearest_integer_convention():
    assert nearest_integer(0.4) == 0
    assert nearest_integer(-0.5) == 0
    assert nearest_integer(2.5) == 3
    assert nearest_integer(0.0) == 0
    np.testing.assert_array_equal(nearest_integer([0.4, -0.5, 2.5]), [0, 0, 3])


def test_nearest_integer_rejects_non_finite():
    with pytest.raises(ValueError):
        nearest_integer(float("nan"))
    with pytest.raises(ValueError):
        nearest_integer(float("inf"))


def test_fractional_part_range():
    xs = np.linspace(-7.3, 7.3, 101)
    fr = fractional_part(xs)
    assert np.all(fr >= -0.5) and np.all(fr < 0.5)
    np.testing.assert_allclose(fr + nearest_integer(xs), xs, rtol=0, atol=0)


def test_eval_linear_examples():
    m3 = linear_map(3.0)
    assert eval_map(m3, 0.25) == 0.75
    assert eval_map(m3, 1.25) == 1.75


def test_eval_zigzag_peak():
    zz = zigzag_map(1, 0.25)
    assert zz(0.25) == 1.5
    assert zz(0.0) == 0.0
    assert zz(0.5) == pytest.approx(0.5, abs=1e-15)


@given(x=finite_x, k=st.integers(-5, 5), lam=st.sampled_from([2.5, 3.0, 4.0, 5.5]))
def test_lift_identity(x, k, lam):
    m = linear_map(lam)
    lhs = m(x + k)
    rhs = m(x) + k
    assert abs(lhs - rhs) <= 4e-15 * max(1.0, abs(rhs))


@given(x=finite_x, lam=st.sampled_from([2.5, 3.0, 4.0]))
def test_linear_map_fractional_rewrite(x, lam):
    m = linear_map(lam)
    expected = x + (lam - 1.0) * fractional_part(x)
    assert abs(m(x) - expected) <= 4e-15 * max(1.0, abs(expected))


@given(x=finite_x)
def test_shift_periodicity(x):
    zz = zigzag_map(2, 0.3)
    assert shift_function(zz, x + 1.0) == pytest.approx(shift_function(zz, x), abs=5e-15)


def test_shift_examples():
    m3 = linear_map(3.0)
    assert shift_function(m3, 0.25) == 0.5
    assert shift_function(m3, 0.0) == 0.0


@given(x=st.floats(-0.49, 0.49), y=st.floats(-0.49, 0.49), lam=st.sampled_from([2.2, 3.0, 6.0]))
def test_stretching_inequality_same_piece(x, y, lam):
    m = linear_map(lam)
    assert abs(m(x) - m(y)) >= m.min_slope() * abs(x - y) - 1e-12


def test_validate_stretching():
    assert validate_stretching(linear_map(3.0)) == 3.0
    assert validate_stretching(zigzag_map(1, 0.25)) == pytest.approx(4.0)


def test_zero_slope_piece_rejected():
    with pytest.raises(MapDefinitionError):
        PiecewiseLinearLiftMap([-0.5, 0.0, 0.5], [(-0.5, 0.5), (0.25, 0.25)])


def test_map_validation_errors():
    with pytest.raises(MapDefinitionError):
        PiecewiseLinearLiftMap([-0.4, 0.5], [(-1.0, 1.0)])
    with pytest.raises(MapDefinitionError):
        PiecewiseLinearLiftMap([-0.5, 0.3, 0.2, 0.5], [(-1, 0), (0, 1), (1, 2)])
    with pytest.raises(MapDefinitionError):
        PiecewiseLinearLiftMap([-0.5, 0.5], [(-1.0, float("inf"))])


def test_route_examples():
    m3 = linear_map(3.0)
    assert compute_route(m3, 0.25, 4) == (0, 1, 0, 1)
    assert compute_route(m3, 0.0, 3) == (0, 0, 0)
    assert compute_route(linear_map(5.0), 0.1, 2) == (0, 1)


def test_route_input_validation():
    with pytest.raises(ValueError):
        compute_route(linear_map(3.0), 0.1, 0)
    with pytest.raises(ValueError):
        compute_route(linear_map(3.0), float("nan"), 3)


def test_route_index_overflow():
    # a shift of 1e15 per step leaves the exact-integer range within ten steps
    jumper = PiecewiseLinearLiftMap([-0.5, 0.5], [(1e15 - 0.5, 1e15 + 0.5)])
    with pytest.raises(OverflowError):
        compute_route(jumper, 0.1, 15)


def test_reconstruct_route_0101():
    m3 = linear_map(3.0)
    iv = reconstruct_initial(m3, (0, 1, 0, 1))
    assert iv.contains(0.25)
    assert iv.width <= 3.0 ** -3 + 1e-12


def test_reconstruct_fixed_point_route():
    m3 = linear_map(3.0)
    for n in (2, 5, 9):
        iv = reconstruct_initial(m3, (0,) * n)
        assert iv.contains(0.0)
        assert iv.width <= 3.0 ** -(n - 1) + 1e-12


def test_reconstruct_inadmissible_route():
    # slope 3 never jumps five cells in one step
    iv = reconstruct_initial(linear_map(3.0), (0, 5))
    assert iv.is_empty
    assert iv is EMPTY_INTERVAL or iv.width == 0.0


def test_reconstruct_requires_stretching():
    flat = PiecewiseLinearLiftMap([-0.5, 0.5], [(-0.25, 0.25)])
    with pytest.raises(MapDefinitionError):
        reconstruct_initial(flat, (0, 0))


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_route_round_trip_random_monotone_maps(seed):
    rng = np.random.default_rng(seed)
    m = make_random_monotone_map(rng)
    x0 = float(rng.uniform(-0.499, 0.499))
    n = 8
    route = compute_route(m, x0, n)
    iv = reconstruct_initial(m, route)
    lam_min = m.min_slope()
    assert iv.contains(x0, slack=1e-9)
    assert iv.width <= lam_min ** -(n - 1) * (1 + 1e-9) + 1e-15
    assert abs(x0 - iv.midpoint) <= lam_min ** -(n - 1) + 1e-12


def test_zigzag_fold_reconstruction_contains_start():
    # non-monotone map: two branches share a route, the hull still
    # brackets the true start
    zz = zigzag_map(1, 0.25)
    x0 = 0.1
    route = compute_route(zz, x0, 6)
    iv = reconstruct_initial(zz, route)
    assert iv.contains(x0, slack=1e-9)


def test_map_from_spec_forms():
    m = map_from_spec({"type": "linear", "lambda": 3.0})
    assert m(0.25) == 0.75
    z = map_from_spec({"type": "zigzag", "p": 1, "xi": 0.25})
    assert z(0.25) == 1.5
    p = map_from_spec({
        "type": "pieces",
        "breakpoints": [-0.5, -0.13397459621556135, 0.13397459621556135, 0.5],
        "values": [[-1.8660254037844386, -0.5], [-0.5, 0.5], [0.5, 1.8660254037844386]],
    })
    assert p.n_pieces == 3
    with pytest.raises(MapDefinitionError):
        map_from_spec({"type": "unknown"})
    with pytest.raises(MapDefinitionError):
        map_from_spec({"type": "linear"})
    with pytest.raises(MapDefinitionError):
        map_from_spec([1, 2, 3])


def test_to_spec_round_trip():
    zz = zigzag_map(2, 0.3)
    again = map_from_spec(zz.to_spec())
    xs = np.linspace(-3, 3, 101)
    np.testing.assert_array_equal(zz(xs), again(xs))


def test_vectorised_eval_matches_scalar():
    m = zigzag_map(1, 0.3)
    xs = np.linspace(-4.2, 4.2, 57)
    vec = m(xs)
    for x, v in zip(xs, vec):
        assert m(float(x)) == v


def test_half_integer_detection():
    assert linear_map(3.0).has_half_integer_values()
    assert zigzag_map(1, 0.3).has_half_integer_values()
    assert not linear_map(3.7).has_half_integer_values()
