import math

import numpy as np
import pytest

from detdiff import (
    CASES,
    ConsistencyError,
    IrreducibilityError,
    MarkovPartition,
    PiecewiseLinearLiftMap,
    TransitionMatrixSet,
    build_transition_matrices,
    characteristic_matrix,
    diffusion_spectral,
    leading_eigenpair,
    leading_eigenvalue,
    linear_map,
    stationary_density,
    zigzag_map,
)

SQRT3 = math.sqrt(3.0)


def _swap(mat):
    # reference listings put the [k, k+1/2) cell first; we order cells
    # left to right, so destination/source indices are both swapped
    P = np.array([[0.0, 1.0], [1.0, 0.0]])
    return P @ mat @ P


def test_matrices_even_lambda_4():
    tset = build_transition_matrices(linear_map(4.0), MarkovPartition.half_integer())
    assert tset.shifts == (-2, -1, 0, 1, 2)
    quarter = 0.25
    expected_plus_first = {
        0: quarter * np.eye(2),
        1: quarter * np.array([[1.0, 0.0], [1.0, 0.0]]),
        2: quarter * np.array([[0.0, 0.0], [1.0, 0.0]]),
        -1: quarter * np.array([[0.0, 1.0], [0.0, 1.0]]),
        -2: quarter * np.array([[0.0, 1.0], [0.0, 0.0]]),
    }
    for shift, ref in expected_plus_first.items():
        np.testing.assert_allclose(_swap(tset.matrix(shift)), ref, atol=1e-15)


def test_matrices_three_cell_surd():
    case = CASES["two-plus-sqrt3"]
    tset = build_transition_matrices(case.lift_map(), case.partition())
    E = tset.total()
    np.testing.assert_allclose(
        E, np.array([[1, 1, 2], [1, 1, 1], [2, 1, 1]]) / case.lam, atol=1e-14)


def test_matrices_scalar_lambda_3(unit_tset_lam3):
    tset = unit_tset_lam3
    assert tset.shifts == (-1, 0, 1)
    np.testing.assert_allclose(tset.matrices[:, 0, 0], [1 / 3, 1 / 3, 1 / 3])


def test_build_rejects_misaligned_partition():
    with pytest.raises(ConsistencyError):
        build_transition_matrices(linear_map(3.7), MarkovPartition.unit())


@pytest.mark.parametrize("name", list(CASES))
def test_mass_conservation(name, golden_tsets):
    assert golden_tsets[name].mass_residual() <= 1e-12


def test_mass_conservation_random_half_integer_maps():
    rng = np.random.default_rng(2024)
    for _ in range(40):
        n_pieces = int(rng.integers(1, 4))
        cuts = np.sort(rng.uniform(-0.4, 0.4, size=n_pieces - 1))
        bps = np.concatenate([[-0.5], cuts, [0.5]])
        values = []
        for _ in range(n_pieces):
            a = rng.integers(-3, 4) - 0.5
            b = rng.integers(-3, 4) - 0.5
            if a == b:
                b = a + 1.0
            values.append((a, b))
        lift = PiecewiseLinearLiftMap(bps, values)
        tset = build_transition_matrices(lift, MarkovPartition.unit())
        assert tset.mass_residual() <= 1e-12
        assert np.all(tset.matrices >= 0)


def test_characteristic_matrix_at_zero(golden_tsets):
    for tset in golden_tsets.values():
        P0 = characteristic_matrix(tset, 0.0)
        assert np.max(np.abs(P0.imag)) == 0.0
        np.testing.assert_allclose(P0.real, tset.total())


@pytest.mark.parametrize("s", [2, 3])
def test_even_lambda_det_and_trace(s):
    lam = 2.0 * s
    tset = build_transition_matrices(linear_map(lam), MarkovPartition.half_integer())
    for t in (0.3, 0.7, 1.5, 2.4):
        P = characteristic_matrix(tset, t)
        assert abs(np.linalg.det(P)) < 1e-14
        trace_ref = (math.sin(t * s / 2) / (s * math.sin(t / 2))
                     * math.cos(t * (s - 1) / 2))
        assert np.trace(P).real == pytest.approx(trace_ref, abs=1e-13)
        assert abs(np.trace(P).imag) < 1e-13
        # rank one: the nontrivial eigenvalue is the trace
        assert leading_eigenvalue(P) == pytest.approx(trace_ref, abs=1e-12)


def test_leading_eigenvalue_lambda4_quarter_pi():
    tset = build_transition_matrices(linear_map(4.0), MarkovPartition.half_integer())
    z = leading_eigenvalue(characteristic_matrix(tset, math.pi / 4))
    assert z.real == pytest.approx(math.cos(math.pi / 8) ** 2, abs=1e-13)


@pytest.mark.parametrize("name", list(CASES))
def test_leading_eigenvalue_one_at_zero(name, golden_tsets):
    z = leading_eigenvalue(characteristic_matrix(golden_tsets[name], 0.0))
    assert abs(z - 1.0) < 1e-12


def test_closed_form_eigenvalue_three_cell():
    case = CASES["two-plus-sqrt3"]
    tset = build_transition_matrices(case.lift_map(), case.partition())
    v = None
    for t in np.linspace(-1.4, 1.4, 15):
        c = math.cos(t)
        ref = (1.0 + c + math.sqrt(c * c + 2.0 * c)) / case.lam
        z, v = leading_eigenpair(characteristic_matrix(tset, t), warm_start=v)
        assert z.real == pytest.approx(ref, abs=1e-12)
        assert abs(z.imag) < 1e-12


def test_closed_form_eigenvalue_four_cell_cases():
    case = CASES["one-plus-sqrt3"]
    tset = build_transition_matrices(case.lift_map(), case.partition())
    for t in (0.2, 0.8, 1.3):
        ref = (1.0 + math.sqrt(1.0 + 2.0 * math.cos(t))) / case.lam
        z = leading_eigenvalue(characteristic_matrix(tset, t))
        assert z.real == pytest.approx(ref, abs=1e-12)
    case = CASES["two-plus-sqrt2"]
    tset = build_transition_matrices(case.lift_map(), case.partition())
    for t in (0.2, 0.8, 1.3):
        ref = (1.0 + math.cos(t) + math.sqrt(2.0 - math.sin(t) ** 2)) / case.lam
        z = leading_eigenvalue(characteristic_matrix(tset, t))
        assert z.real == pytest.approx(ref, abs=1e-12)


def test_eigenvalue_polynomial_residual_three_plus_sqrt6():
    # the leading eigenvalue satisfies the characteristic cubic
    # lam^3 z^3 - lam^2 z^2 (1 + 2cos t + 2cos 2t) - lam z (1 + 2cos t)
    #   + 1 + 2cos t = 0
    case = CASES["three-plus-sqrt6"]
    lam = case.lam
    tset = build_transition_matrices(case.lift_map(), case.partition())
    ts = np.linspace(0.0, 3.0, 10)
    checked = 0
    for sign in (1.0, -1.0):
        v = None  # continue the branch outward from the stationary point
        for t in sign * ts:
            z, v = leading_eigenpair(characteristic_matrix(tset, t), warm_start=v)
            resid = (lam**3 * z**3
                     - lam**2 * z**2 * (1 + 2 * np.cos(t) + 2 * np.cos(2 * t))
                     - lam * z * (1 + 2 * np.cos(t))
                     + 1 + 2 * np.cos(t))
            assert abs(resid) < 1e-10, (t, z, resid)
            checked += 1
    assert checked == 20


def test_symmetry_conjugate_eigenvalue(golden_tsets):
    tset = golden_tsets["two-plus-sqrt7"]
    for t in (0.3, 0.9):
        zp = leading_eigenvalue(characteristic_matrix(tset, t))
        zm = leading_eigenvalue(characteristic_matrix(tset, -t))
        assert zm == pytest.approx(zp.conjugate(), abs=1e-12)


@pytest.mark.parametrize("name", list(CASES))
def test_stationary_density_golden(name, golden_tsets):
    case = CASES[name]
    alpha = stationary_density(golden_tsets[name])
    np.testing.assert_allclose(alpha, case.alpha, rtol=0, atol=1e-10)
    assert abs(alpha @ golden_tsets[name].cell_lengths - 1.0) < 1e-12
    assert np.all(alpha > 0)


def test_stationary_density_reducible_rejected():
    matrices = np.array([np.eye(2)])
    tset = TransitionMatrixSet(shifts=(0,), matrices=matrices,
                               breakpoints=(-0.5, 0.0, 0.5))
    with pytest.raises(IrreducibilityError):
        stationary_density(tset)


@pytest.mark.parametrize("name", list(CASES))
def test_spectral_diffusion_golden(name, golden_tsets):
    case = CASES[name]
    rep = diffusion_spectral(golden_tsets[name])
    assert rep.d == pytest.approx(case.d, abs=1e-8)
    assert abs(rep.drift) < 1e-10
    assert rep.method == "spectral"
    assert rep.diagnostics["fd_disagreement"] < 1e-7
    assert rep.d > 0


def test_spectral_diffusion_with_drift():
    # jumps: stay with prob 3/4, move right with prob 1/4
    lift = PiecewiseLinearLiftMap([-0.5, 0.0, 0.5], [(-0.5, 1.5), (-0.5, 0.5)])
    tset = build_transition_matrices(lift, MarkovPartition.unit())
    rep = diffusion_spectral(tset)
    assert rep.drift == pytest.approx(0.25, abs=1e-11)
    # raw-moment convention: D = sigma2 / 2 for the unit partition
    assert rep.d == pytest.approx(0.125, abs=1e-10)


def test_scalar_degeneration_matches_moments(unit_tset_lam3):
    from detdiff import second_moment
    sigma1, sigma2 = second_moment(unit_tset_lam3)
    rep = diffusion_spectral(unit_tset_lam3)
    assert abs(rep.d - 0.5 * sigma2) < 1e-12
    assert abs(rep.drift - sigma1) < 1e-12


def test_spectral_zigzag_matches_closed_form():
    from detdiff import closed_form_d
    zz = zigzag_map(1, 0.3)
    part = MarkovPartition((-0.5, -0.3, 0.3, 0.5))
    rep = diffusion_spectral(build_transition_matrices(zz, part))
    assert rep.d == pytest.approx(closed_form_d(zz), abs=1e-9)


def test_to_json_dict_round_trip(unit_tset_lam3):
    data = unit_tset_lam3.to_json_dict()
    assert set(data) == {"-1", "0", "1"}
    assert data["0"] == [pytest.approx(1 / 3)]
