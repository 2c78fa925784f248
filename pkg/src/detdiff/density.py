"""Lattice densities, their evolution, and closed-form diffusion constants.

Densities are piecewise constant over the translated partition cells:
value P[k, j] is the density on cell j of unit interval k.  Masses are
densities times cell lengths.  Evolution applies the shift-indexed
transfer matrices as a discrete convolution; the long-time profile is a
Gaussian in k modulated per cell by the stationary density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import HalfIntegerValueError
from .maps import PiecewiseLinearLiftMap
from .transfer import TransitionMatrixSet

__all__ = [
    "LatticeDensity",
    "unit_pulse",
    "evolve",
    "gaussian_profile",
    "kolmogorov_distance",
    "closed_form_d",
    "second_moment",
    "heuristic_d",
    "omega_factor",
    "omega_approx_d",
]


@dataclass(frozen=True)
class LatticeDensity:
    """Piecewise-constant density over cells I_{k,j}, k integer, j = 1..m."""

    k_min: int
    values: np.ndarray            # (n_units, m) nonnegative densities
    breakpoints: tuple            # cell boundaries inside one unit interval
    step_count: int = 0

    def __post_init__(self):
        vals = np.atleast_2d(np.asarray(self.values, dtype=float))
        object.__setattr__(self, "values", vals)
        if vals.shape[1] != len(self.breakpoints) - 1:
            raise ValueError("values width must match the number of cells")
        if np.any(vals < -1e-15):
            raise ValueError("densities must be nonnegative")

    @property
    def m(self) -> int:
        return self.values.shape[1]

    @property
    def k_max(self) -> int:
        return self.k_min + self.values.shape[0] - 1

    @property
    def cell_lengths(self) -> np.ndarray:
        return np.diff(np.asarray(self.breakpoints))

    @property
    def masses(self) -> np.ndarray:
        """Per-cell masses, shape (n_units, m)."""
        return self.values * self.cell_lengths[None, :]

    @property
    def mass(self) -> float:
        return float(self.masses.sum())

    def unit_masses(self) -> np.ndarray:
        """Mass per unit interval k."""
        return self.masses.sum(axis=1)

    def lattice_moments(self):
        """Mean and variance of the unit-interval label k."""
        w = self.unit_masses()
        ks = np.arange(self.k_min, self.k_max + 1, dtype=float)
        mean = float(ks @ w) / float(w.sum())
        var = float(((ks - mean) ** 2) @ w) / float(w.sum())
        return mean, var

    def continuous_moments(self):
        """Mean and variance of the position x itself (exact cell integrals)."""
        bp = np.asarray(self.breakpoints)
        ks = np.arange(self.k_min, self.k_max + 1, dtype=float)
        lo = ks[:, None] + bp[None, :-1]
        hi = ks[:, None] + bp[None, 1:]
        m0 = self.masses
        m1 = self.values * (hi**2 - lo**2) / 2.0
        m2 = self.values * (hi**3 - lo**3) / 3.0
        total = m0.sum()
        mean = float(m1.sum()) / total
        var = float(m2.sum()) / total - mean**2
        return mean, var

    def rows(self):
        """Yield (k, j, density, mass) in (k, j) order, for CSV export."""
        lengths = self.cell_lengths
        for idx in range(self.values.shape[0]):
            k = self.k_min + idx
            for j in range(self.m):
                d = float(self.values[idx, j])
                yield k, j + 1, d, d * float(lengths[j])


def unit_pulse(breakpoints) -> LatticeDensity:
    """Unit density on the fundamental interval, zero elsewhere."""
    m = len(breakpoints) - 1
    return LatticeDensity(k_min=0, values=np.ones((1, m)),
                          breakpoints=tuple(float(b) for b in breakpoints))


def evolve(tset: TransitionMatrixSet, initial: LatticeDensity, n: int) -> LatticeDensity:
    """Apply the matrix convolution P_k(t+1) = sum_j p_j P_{k-j}(t), n times.

    The support grows by at most max|shift| per step; mass is conserved
    to rounding accuracy.
    """
    if n < 0:
        raise ValueError("step count must be nonnegative")
    if np.max(np.abs(np.asarray(initial.breakpoints)
                     - np.asarray(tset.breakpoints))) > 1e-12:
        raise ValueError("density and matrix set use different partitions")
    if n == 0:
        return initial

    shifts = np.asarray(tset.shifts)
    smax = int(np.max(np.abs(shifts)))
    pad = smax * n
    n_units = initial.values.shape[0]
    vals = np.zeros((n_units + 2 * pad, initial.m))
    vals[pad:pad + n_units] = initial.values
    transposed = [mat.T.copy() for mat in tset.matrices]

    for _ in range(n):
        new = np.zeros_like(vals)
        for shift, matT in zip(tset.shifts, transposed):
            contrib = vals @ matT
            if shift >= 0:
                new[shift:] += contrib[:vals.shape[0] - shift]
            else:
                new[:shift] += contrib[-shift:]
        vals = new

    return LatticeDensity(k_min=initial.k_min - pad, values=vals,
                          breakpoints=initial.breakpoints,
                          step_count=initial.step_count + n)


def gaussian_profile(d: float, drift: float, alpha, breakpoints, n: int,
                     floor: float = 1e-16) -> LatticeDensity:
    """Cell-modulated Gaussian limit profile after n steps.

    P[k, j] = alpha_j / (2 sqrt(pi D n)) * exp(-(k - drift*n)^2 / (4 D n)),
    evaluated at integer k, truncated below `floor` and renormalised to
    unit mass.
    """
    if d <= 0:
        raise ValueError("diffusion coefficient must be positive")
    if n < 1:
        raise ValueError("step count must be >= 1")
    alpha = np.asarray(alpha, dtype=float)
    center = drift * n
    spread = math.sqrt(4.0 * d * n)
    # e^-40 ~ 4e-18 is safely below any double floor we renormalise away
    half_width = int(math.ceil(spread * math.sqrt(40.0))) + 1
    k_lo = int(math.floor(center)) - half_width
    ks = np.arange(k_lo, k_lo + 2 * half_width + 1, dtype=float)
    peak = 1.0 / (2.0 * math.sqrt(math.pi * d * n))
    profile = peak * np.exp(-((ks - center) ** 2) / (4.0 * d * n))
    vals = alpha[None, :] * profile[:, None]
    vals[vals < floor] = 0.0
    dens = LatticeDensity(k_min=k_lo, values=vals,
                          breakpoints=tuple(float(b) for b in breakpoints),
                          step_count=n)
    return LatticeDensity(k_min=k_lo, values=vals / dens.mass,
                          breakpoints=dens.breakpoints, step_count=n)


def kolmogorov_distance(a: LatticeDensity, b: LatticeDensity) -> float:
    """Sup-norm distance between the two cumulative distributions.

    CDFs are accumulated cell by cell in (k, j) order and compared at
    every cell boundary; both densities must live on the same partition.
    """
    if np.max(np.abs(np.asarray(a.breakpoints) - np.asarray(b.breakpoints))) > 1e-12:
        raise ValueError("densities live on different partitions")
    k_lo = min(a.k_min, b.k_min)
    k_hi = max(a.k_max, b.k_max)
    m = a.m

    def flat_masses(dens):
        full = np.zeros((k_hi - k_lo + 1, m))
        full[dens.k_min - k_lo: dens.k_max - k_lo + 1] = dens.masses
        return full.ravel()

    ca = np.cumsum(flat_masses(a))
    cb = np.cumsum(flat_masses(b))
    return float(np.max(np.abs(ca - cb)))


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------


def closed_form_d(lift_map: PiecewiseLinearLiftMap, tol: float = 1e-9) -> float:
    """Exact diffusion coefficient for half-integer-valued piecewise maps.

    Requires every linear piece to take (distinct) half-integer values at
    its ends.  Each piece is split at the preimages of half-integers;
    a subsegment of length L whose values sweep [c - 1/2, c + 1/2]
    contributes (c^2 + 1/12) * L to the integral of |f|^2, and

        D = (1/2) * integral_{-1/2}^{1/2} |f(x)|^2 dx - 1/24.
    """
    if not lift_map.has_half_integer_values(tol):
        raise HalfIntegerValueError(
            "closed form requires half-integer values at all piece endpoints")
    total = 0.0
    bp = lift_map.breakpoints
    for j in range(lift_map.n_pieces):
        va = float(lift_map.left_values[j])
        vb = float(lift_map.right_values[j])
        va = round(va + 0.5) - 0.5
        vb = round(vb + 0.5) - 0.5
        width = float(bp[j + 1] - bp[j])
        count = int(round(abs(vb - va)))
        seg = width / count
        v_lo = min(va, vb)
        for i in range(count):
            center = int(round(v_lo + i + 0.5))
            total += (center**2 + 1.0 / 12.0) * seg
    return 0.5 * total - 1.0 / 24.0


def second_moment(tset: TransitionMatrixSet):
    """First and second moments (sigma1, sigma2) of the scalar jump law.

    Only defined for the unit partition (m = 1), where the matrices
    degenerate to the jump probabilities p_k.
    """
    if tset.m != 1:
        raise ValueError("second_moment needs the unit partition (m = 1)")
    ks = np.asarray(tset.shifts, dtype=float)
    ps = tset.matrices[:, 0, 0]
    return float(ks @ ps), float((ks**2) @ ps)


def heuristic_d(lam: float) -> float:
    """Independent-fractional-parts estimate D = (lam - 1)^2 / 24 (approximate)."""
    lam = float(lam)
    if lam <= 2.0:
        raise ValueError("the heuristic needs a stretching slope lam > 2")
    return (lam - 1.0) ** 2 / 24.0


def omega_factor(lam: float) -> float:
    """2-periodic correction factor: 2 - 3|lam - 4| on [3, 5], repeated."""
    lam = float(lam)
    if lam < 3.0:
        raise ValueError("omega correction is defined for lam >= 3")
    folded = 3.0 + math.fmod(lam - 3.0, 2.0)
    return 2.0 - 3.0 * abs(folded - 4.0)


def omega_approx_d(lam: float) -> float:
    """First-approximation D(lam) = (lam - 1)(lam - omega(lam)) / 24."""
    lam = float(lam)
    return (lam - 1.0) * (lam - omega_factor(lam)) / 24.0
