#!/usr/bin/env python3
"""Anomalous transport in a long billiard channel.

Reflections off a periodically distorted wall obey a second-order
recurrence: the chord slope is rotated by twice the local normal tilt.
In the wide-channel limit the update linearises to
x_{n+1} - x_n = x_n - x_{n-1} + f(x_n) with a 1-periodic kick f.  The
kick weights accumulate linearly in the closed sum form, so the
ensemble variance grows cubically rather than linearly: the transport
is anomalous.
"""

import numpy as np

from detdiff import (
    BilliardState,
    DEFAULT_SEED,
    approximate_step,
    exact_step,
    sawtooth_kick,
    simulate_channel,
    tangent_kick,
    theoretical_variance,
)

# --- one exact reflection vs its wide-channel linearisation -------------

h = 5.0
angle = lambda x: 0.02 * np.sin(2 * np.pi * np.asarray(x))
state = BilliardState(-1.0, 0.0, h=h, normal_angle=angle)
exact = exact_step(state)
approx = approximate_step(state, tangent_kick(h, angle))
print(f"exact reflection: x2 = {exact.x_curr:.6f}")
print(f"linearised step : x2 = {approx.x_curr:.6f}"
      f"   (gap {abs(exact.x_curr - approx.x_curr):.2e})")

# --- cubic variance growth ----------------------------------------------

print("\nsawtooth kick f(x) = lam * {x), ensembles of 100000 trajectories:")
print(f"{'lam':>4} {'exponent':>9} {'var(200)':>12} {'independent-kick':>17}")
for lam in (0.0, 2.0, 3.0, 5.0):
    rep = simulate_channel(sawtooth_kick(lam), 100_000, 200, seed=DEFAULT_SEED)
    theo = theoretical_variance(200, lam)
    print(f"{lam:>4.1f} {rep.growth_exponent:>9.3f} {rep.variances[-1]:>12.1f} "
          f"{theo:>17.1f}")

print("\nlam = 0 rides on the spread of the initial slope alone (variance"
      " ~ n^2/12,\nexponent 2); any stretching kick drives the cubic regime.")

# --- checkpoint detail for one ensemble ----------------------------------

rep = simulate_channel(sawtooth_kick(3.0), 100_000, 400, seed=DEFAULT_SEED,
                       checkpoints=[50, 100, 200, 400])
print(f"\nlam = 3, checkpoints: {'n':>6} {'variance':>14} {'theory':>14}")
for (c, v, t, e) in rep.rows():
    print(f"{'':21}{c:>6} {v:>14.1f} {t:>14.1f}   exponent so far: {e:.3f}"
          if not np.isnan(e) else f"{'':21}{c:>6} {v:>14.1f} {t:>14.1f}")
