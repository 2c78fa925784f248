#!/usr/bin/env python3
"""Solving for slopes consistent with a Markov partition.

Fixing the combinatorics of a symmetric partition (which boundary each
cell edge lands on) turns consistency into a linear system in the
breakpoints whose coefficients contain the slope.  Eliminating the
breakpoints yields an integer polynomial R(lam); the admissible slope is
its largest real root.
"""

from detdiff import (
    CASES,
    MarkovPartition,
    linear_map,
    solve_partition_system,
    solve_three_interval,
    validate_consistency,
)

# --- the closed-form three-cell family --------------------------------

print("three cells [-1/2,-xi), [-xi,xi), [xi,1/2): lam*xi = m + eps2*xi,")
print("lam/2 = n + eps1*xi has the closed form")
print("lam = (2n + eps2 + sqrt((2n - eps2)^2 + 8 m eps1)) / 2\n")

print(f"{'m':>2} {'n':>2} {'eps1':>4} {'eps2':>4} {'lam':>10} {'xi':>10}")
for m, n, e1, e2 in [(1, 2, 1, -1), (1, 2, 1, 1), (2, 3, -1, -1), (1, 3, 1, 1)]:
    lam, xi = solve_three_interval(m, n, e1, e2)
    print(f"{m:>2} {n:>2} {e1:>4} {e2:>4} {lam:>10.6f} {xi:>10.6f}")

# --- general boundary-equation systems ---------------------------------

print("\ncatalog of solvable systems (polynomial coefficients low -> high):")
print(f"{'case':18} {'polynomial':>22} {'lam':>10} {'|R(lam)|':>9}")
for name, case in CASES.items():
    solved = solve_partition_system(case.system)
    print(f"{name:18} {str(solved.polynomial):>22} {solved.lam:>10.6f} "
          f"{solved.residual:>9.1e}")

# --- every solution really is Markov-consistent ------------------------

case = CASES["quartic-3p98"]
solved = solve_partition_system(case.system)
part = MarkovPartition.symmetric(solved.breakpoints, include_zero=False)
report = validate_consistency(linear_map(solved.lam), part)
print(f"\nquartic case: {part.m} cells at", [round(b, 5) for b in part.breakpoints])
print("consistency check passed:", bool(report),
      f"(worst violation {report.worst_violation:.2e})")
