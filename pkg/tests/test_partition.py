import math
from fractions import Fraction

import numpy as np
import pytest

from detdiff import (
    CASES,
    Equation,
    MarkovPartition,
    PartitionEquationSystem,
    PartitionError,
    RootSolveError,
    SystemStructureError,
    largest_real_root,
    linear_map,
    solve_partition_system,
    solve_three_interval,
    validate_consistency,
)

SQRT3 = math.sqrt(3.0)
SQRT33 = math.sqrt(33.0)


# ---------------------------------------------------------------------------
# MarkovPartition
# ---------------------------------------------------------------------------


def test_partition_basics():
    p = MarkovPartition.symmetric([0.2], include_zero=False)
    assert p.breakpoints == (-0.5, -0.2, 0.2, 0.5)
    assert p.m == 3
    assert p.cell_lengths.sum() == pytest.approx(1.0)
    assert p.is_symmetric()
    assert MarkovPartition.unit().m == 1
    assert MarkovPartition.half_integer().m == 2


def test_partition_validation():
    with pytest.raises(PartitionError):
        MarkovPartition((-0.4, 0.5))
    with pytest.raises(PartitionError):
        MarkovPartition((-0.5, 0.3, 0.2, 0.5))
    with pytest.raises(PartitionError):
        MarkovPartition.symmetric([0.7], include_zero=False)


# ---------------------------------------------------------------------------
# closed three-interval family
# ---------------------------------------------------------------------------


def test_three_interval_example():
    lam, xi = solve_three_interval(1, 2, +1, -1)
    assert lam == pytest.approx((3.0 + SQRT33) / 2.0, abs=1e-14)
    assert xi == pytest.approx(2.0 / (5.0 + SQRT33), abs=1e-14)
    assert abs(lam * xi - 1 - (-1) * xi) < 1e-12
    assert abs(lam / 2 - 2 - (+1) * xi) < 1e-12


def test_three_interval_boundary_rejected():
    # closed form gives xi = 1/2, not interior
    with pytest.raises(PartitionError):
        solve_three_interval(1, 2, -1, +1)


def test_three_interval_parameter_validation():
    with pytest.raises(PartitionError):
        solve_three_interval(2, 2, 1, 1)
    with pytest.raises(PartitionError):
        solve_three_interval(0, 2, 1, 1)
    with pytest.raises(PartitionError):
        solve_three_interval(1, 2, 0, 1)


def _three_interval_system(m, n, eps1, eps2):
    return PartitionEquationSystem(
        ("xi",),
        (Equation("xi", Fraction(m), eps2, "xi"),
         Equation("half", Fraction(n), eps1, "xi")),
    )


def test_three_interval_agrees_with_system_solver():
    found = 0
    for m in range(1, 5):
        for n in range(m + 1, 6):
            for e1 in (-1, 1):
                for e2 in (-1, 1):
                    try:
                        lam, xi = solve_three_interval(m, n, e1, e2)
                    except PartitionError:
                        continue
                    solved = solve_partition_system(_three_interval_system(m, n, e1, e2))
                    assert abs(solved.lam - lam) < 1e-10
                    assert abs(solved.breakpoints[0] - xi) < 1e-10
                    found += 1
    assert found >= 8


# ---------------------------------------------------------------------------
# general systems: golden polynomials and roots
# ---------------------------------------------------------------------------


def test_system_quadratic_case():
    case = CASES["two-plus-sqrt3"]
    solved = solve_partition_system(case.system)
    assert solved.polynomial == (1, -4, 1)
    assert solved.lam == pytest.approx(2.0 + SQRT3, abs=1e-13)
    assert solved.breakpoints[0] == pytest.approx((2.0 - SQRT3) / 2.0, abs=1e-13)
    assert solved.residual < 1e-13


def test_system_cubic_case():
    case = CASES["cubic-4p71"]
    solved = solve_partition_system(case.system)
    assert solved.polynomial == (3, -4, -4, 1)
    assert solved.lam == pytest.approx(case.lam, abs=1e-12)


def test_system_quartic_case():
    case = CASES["quartic-3p98"]
    solved = solve_partition_system(case.system)
    assert solved.polynomial == (1, 0, 0, -4, 1)
    assert solved.lam == pytest.approx(case.lam, abs=1e-12)
    assert solved.breakpoints[2] == pytest.approx(1.0 / (2.0 * solved.lam), abs=1e-12)


@pytest.mark.parametrize("name", list(CASES))
def test_all_catalog_systems(name):
    case = CASES[name]
    solved = solve_partition_system(case.system)
    assert solved.polynomial == case.polynomial
    assert abs(solved.lam - case.lam) < 1e-12
    assert solved.residual < 1e-13
    np.testing.assert_allclose(solved.breakpoints, case.positive_breakpoints,
                               rtol=0, atol=1e-12)


@pytest.mark.parametrize("name", list(CASES))
def test_root_against_numpy_oracle(name):
    # independent root oracle for the bracketing + Newton path
    coeffs = CASES[name].polynomial
    roots = np.roots(list(coeffs)[::-1])
    real = roots[np.abs(roots.imag) < 1e-9].real
    expected = float(np.max(real))
    assert largest_real_root(coeffs) == pytest.approx(expected, abs=1e-12)


def test_largest_real_root_errors():
    with pytest.raises(RootSolveError):
        largest_real_root((1, 0, 1))        # x^2 + 1: no real root
    with pytest.raises(RootSolveError):
        largest_real_root((2, 1))           # root at -2 < 1
    with pytest.raises(RootSolveError):
        largest_real_root((5,))             # constant


def test_system_structure_validation():
    with pytest.raises(SystemStructureError):
        PartitionEquationSystem(("xi",), (Equation("xi", Fraction(1)),))  # no half
    with pytest.raises(SystemStructureError):
        PartitionEquationSystem(
            ("xi",),
            (Equation("xi", Fraction(1)), Equation("xi", Fraction(1)),
             Equation("half", Fraction(2))))
    with pytest.raises(SystemStructureError):
        Equation("xi", Fraction(1, 3))      # not a half-integer constant
    with pytest.raises(SystemStructureError):
        Equation("xi", Fraction(1), 2, "xi")
    with pytest.raises(SystemStructureError):
        solve_partition_system(PartitionEquationSystem(
            ("xi",), (Equation("half", Fraction(2)),)))  # equation count


def test_system_breakpoint_interiority():
    # lam*xi = 0 + xi forces xi = 0: rejected as non-interior
    system = PartitionEquationSystem(
        ("xi",),
        (Equation("xi", Fraction(0), 1, "xi"), Equation("half", Fraction(2))))
    with pytest.raises(PartitionError):
        solve_partition_system(system)


def test_system_breakpoint_ordering():
    # forces xi1 = 3/(2 lam) > xi2 = 1/(2 lam): order violation
    system = PartitionEquationSystem(
        ("xi1", "xi2"),
        (Equation("xi1", Fraction(3, 2)),
         Equation("xi2", Fraction(1, 2)),
         Equation("half", Fraction(2), -1, "xi1")))
    with pytest.raises(PartitionError):
        solve_partition_system(system)


def test_from_dict_matches_spec_schema():
    data = {
        "unknowns": ["xi1", "xi2"],
        "equations": [
            {"lhs": "xi1", "target": {"const": 1.5}},
            {"lhs": "xi2", "target": {"const": 2, "coef": -1, "ref": "xi1"}},
            {"lhs": "half", "target": {"const": 2, "coef": 1, "ref": "xi2"}},
        ],
    }
    system = PartitionEquationSystem.from_dict(data)
    solved = solve_partition_system(system)
    assert solved.polynomial == (3, -4, -4, 1)
    assert solved.lam == pytest.approx(CASES["cubic-4p71"].lam, abs=1e-12)
    back = system.to_dict()
    assert PartitionEquationSystem.from_dict(back) == system


def test_from_dict_malformed():
    with pytest.raises(SystemStructureError):
        PartitionEquationSystem.from_dict({"unknowns": ["xi"]})


# ---------------------------------------------------------------------------
# consistency checks
# ---------------------------------------------------------------------------


def test_consistency_pass_examples():
    assert validate_consistency(linear_map(3.0), MarkovPartition.unit())
    assert validate_consistency(linear_map(4.0), MarkovPartition.half_integer())


def test_consistency_failure_with_violation():
    report = validate_consistency(linear_map(3.7), MarkovPartition.unit())
    assert not report
    assert report.worst_violation == pytest.approx(0.35, abs=1e-9)
    assert report.messages


@pytest.mark.parametrize("name", list(CASES))
def test_solver_output_is_consistent(name):
    case = CASES[name]
    solved = solve_partition_system(case.system)
    part = MarkovPartition.symmetric(solved.breakpoints, case.include_zero)
    report = validate_consistency(linear_map(solved.lam), part)
    assert report, report.messages
