"""Transfer-operator matrices over a consistent Markov partition.

For a map that is linear on every partition cell, one application of the
Perron-Frobenius operator sends a density that is constant per cell to
another such density.  The action is encoded by finitely many m x m
matrices p_j indexed by the integer shift j: entry (i, l) of p_j is the
density deposited into cell i of the j-th translated unit interval by a
unit density on cell l of the fundamental interval.

The characteristic matrix P(t) = sum_j p_j e^(i j t) governs the lattice
dynamics; its leading eigenvalue z(t) carries the transport
coefficients via D = -Re z''(0) / 2 and drift = Im z'(0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    ConsistencyError,
    DerivativeInstabilityError,
    EigenConvergenceError,
    IrreducibilityError,
)
from .maps import PiecewiseLinearLiftMap
from .partition import MarkovPartition

__all__ = [
    "TransitionMatrixSet",
    "DiffusionReport",
    "build_transition_matrices",
    "characteristic_matrix",
    "leading_eigenpair",
    "leading_eigenvalue",
    "stationary_density",
    "diffusion_spectral",
]


@dataclass(frozen=True)
class TransitionMatrixSet:
    """Shift-indexed transfer matrices plus the cell geometry they act on."""

    shifts: tuple                 # sorted integers
    matrices: np.ndarray          # (n_shifts, m, m), nonnegative
    breakpoints: tuple            # partition breakpoints inside I0

    @property
    def m(self) -> int:
        return self.matrices.shape[1]

    @property
    def cell_lengths(self) -> np.ndarray:
        return np.diff(np.asarray(self.breakpoints))

    def matrix(self, shift: int) -> np.ndarray:
        try:
            return self.matrices[self.shifts.index(shift)]
        except ValueError:
            return np.zeros((self.m, self.m))

    def total(self) -> np.ndarray:
        """E = sum_j p_j, the transfer matrix of the compactified system."""
        return self.matrices.sum(axis=0)

    def mass_residual(self) -> float:
        """Worst violation of per-cell mass conservation."""
        lengths = self.cell_lengths
        col_mass = np.einsum("sij,i->j", self.matrices, lengths)
        return float(np.max(np.abs(col_mass - lengths)))

    def to_json_dict(self) -> dict:
        """Shift -> row-major entries, for golden tests and reports."""
        return {str(s): [float(v) for v in mat.ravel()]
                for s, mat in zip(self.shifts, self.matrices)}


def _boundary_index(value: float, offsets: np.ndarray, tol: float):
    """Express a cell boundary as (unit cell k, breakpoint index i)."""
    k = math.floor(value + 0.5)
    off = value - k
    dists = np.abs(offsets - off)
    i = int(np.argmin(dists))
    if dists[i] <= tol:
        return k, i
    if abs(off - 0.5) <= tol:
        return k + 1, 0
    return None


def build_transition_matrices(lift_map: PiecewiseLinearLiftMap,
                              partition: MarkovPartition,
                              tol: float = 1e-9) -> TransitionMatrixSet:
    """Transfer matrices of a map over a consistent partition.

    Every maximal linear segment of the map inside a cell must map onto
    an exact union of (integer-translated) cells; each covered cell
    receives density 1/|slope|.  Misaligned images raise
    ConsistencyError naming the offending cell.

    Parameters
    ----------
    lift_map : PiecewiseLinearLiftMap
    partition : MarkovPartition
        Cell boundaries; usually every map breakpoint is one of them, in
        which case each cell carries a single slope.  Cells containing
        several whole pieces are also accepted.
    """
    bp_part = np.asarray(partition.breakpoints)
    m = partition.m
    offsets = bp_part[:-1]
    bp_map = lift_map.breakpoints

    # maximal linear segments: map pieces refined by the cell boundaries
    cuts = np.union1d(bp_part, bp_map)
    matrices: dict[int, np.ndarray] = {}

    for lo, hi in zip(cuts[:-1], cuts[1:]):
        mid = 0.5 * (lo + hi)
        src = int(np.searchsorted(bp_part, mid) - 1)
        piece = int(lift_map._piece_of(np.asarray(mid)))
        slope = float(lift_map.slopes[piece])
        icpt = float(lift_map.intercepts[piece])
        va, vb = slope * lo + icpt, slope * hi + icpt
        img_lo, img_hi = min(va, vb), max(va, vb)

        start = _boundary_index(img_lo, offsets, tol)
        if start is None:
            raise ConsistencyError(
                f"image endpoint {img_lo!r} of cell segment [{lo!r}, {hi!r}) "
                "is not on the cell-boundary grid")
        k, i = start
        weight = 1.0 / abs(slope)
        guard = 0
        while True:
            nxt = k + bp_part[i + 1]
            # the covered cell is (k, i); record then advance
            mat = matrices.setdefault(k, np.zeros((m, m)))
            mat[i, src] += weight
            if abs(nxt - img_hi) <= tol:
                break
            if nxt > img_hi + tol:
                raise ConsistencyError(
                    f"image of cell segment [{lo!r}, {hi!r}) ends at {img_hi!r}, "
                    f"inside a cell ending at {nxt!r}")
            if i + 1 < m:
                i += 1
            else:
                k, i = k + 1, 0
            guard += 1
            if guard > 100000:
                raise ConsistencyError("runaway cell enumeration; image span too large")

    shifts = tuple(sorted(matrices))
    stack = np.stack([matrices[s] for s in shifts])
    tset = TransitionMatrixSet(shifts=shifts, matrices=stack,
                               breakpoints=tuple(partition.breakpoints))
    resid = tset.mass_residual()
    if resid > 1e-12:
        raise ConsistencyError(f"mass conservation violated by {resid:.3g}")
    return tset


def characteristic_matrix(tset: TransitionMatrixSet, t: float) -> np.ndarray:
    """P(t) = sum_j p_j e^(i j t); equals E at t = 0."""
    phases = np.exp(1j * t * np.asarray(tset.shifts, dtype=float))
    return np.tensordot(phases, tset.matrices, axes=(0, 0))


def leading_eigenpair(matrix: np.ndarray,
                      warm_start: Optional[np.ndarray] = None,
                      tol: float = 1e-13,
                      max_iter: int = 400):
    """Dominant eigenpair by power iteration with Rayleigh-quotient refinement.

    Convergence requires the relative residual ||A v - z v|| / ||A|| to
    drop below `tol`.  A warm-start vector selects the branch connected
    to a previous solution, which keeps z(t) continuous along a sweep in
    t; without one the modulus-dominant eigenvalue is verified against a
    dense spectrum computation and the iteration is restarted if it
    stalled on a subdominant branch.

    Returns
    -------
    (z, v) : complex eigenvalue and unit eigenvector with a fixed phase
        convention (largest component real positive).
    """
    A = np.asarray(matrix, dtype=complex)
    n = A.shape[0]
    eye = np.eye(n)
    scale = max(1.0, float(np.max(np.abs(A))) * n)

    def iterate(v0):
        """Power steps with Rayleigh-quotient acceleration from v0."""
        v = np.asarray(v0, dtype=complex)
        v = v / np.linalg.norm(v)
        z = complex(v.conj() @ (A @ v))
        resid = np.inf
        for it in range(max_iter):
            if it < 2:
                w = A @ v          # a couple of power steps settle the direction
            else:
                try:
                    w = np.linalg.solve(A - z * eye, v)
                except np.linalg.LinAlgError:
                    w = np.linalg.solve(A - (z * (1.0 + 1e-12) + 1e-290) * eye, v)
                if not np.all(np.isfinite(w)):
                    w = A @ v
            nw = np.linalg.norm(w)
            if nw == 0.0:
                raise EigenConvergenceError("iterate vanished; matrix is nilpotent here")
            v = w / nw
            z = complex(v.conj() @ (A @ v))
            resid = np.linalg.norm(A @ v - z * v)
            if resid <= tol * scale:
                return z, v, resid
        raise EigenConvergenceError(
            f"no convergence after {max_iter} iterations (residual {resid:.3g}); "
            "possible eigenvalue crossing, try a smaller t step")

    if warm_start is not None:
        # Rayleigh iteration from the warm vector continues its branch
        z, v, _ = iterate(np.asarray(warm_start, dtype=complex))
    else:
        z, v, _ = iterate(np.ones(n, dtype=complex))
        radius = float(np.max(np.abs(np.linalg.eigvals(A))))
        if abs(z) < radius - 1e-10 * scale:
            # stalled on a subdominant branch; deterministic restart
            seed = np.cos(np.arange(1, n + 1)) + 1j * np.sin(0.7 * np.arange(n))
            z, v, _ = iterate(seed)
            if abs(z) < radius - 1e-10 * scale:
                raise EigenConvergenceError(
                    f"iteration stalled below the spectral radius ({abs(z)!r} < {radius!r})")

    # two-sided Rayleigh quotient: for non-normal matrices the one-sided
    # quotient is only first-order accurate in the eigenvector error
    try:
        u = np.linalg.solve((A - z * np.eye(n)).conj().T, v)
        nu = np.linalg.norm(u)
        if np.all(np.isfinite(u)) and nu > 0:
            u = u / nu
            denom = complex(u.conj() @ v)
            if abs(denom) > 1e-6:
                z = complex(u.conj() @ (A @ v) / denom)
    except np.linalg.LinAlgError:
        pass

    top = int(np.argmax(np.abs(v)))
    phase = v[top] / abs(v[top])
    return z, v * phase.conjugate()


def leading_eigenvalue(matrix: np.ndarray,
                       warm_start: Optional[np.ndarray] = None) -> complex:
    """Eigenvalue of largest modulus (branch-continued when warm-started)."""
    z, _ = leading_eigenpair(matrix, warm_start=warm_start)
    return z


def stationary_density(tset: TransitionMatrixSet, tol: float = 1e-10) -> np.ndarray:
    """Per-cell stationary density of the compactified dynamics.

    The positive right eigenvector of E = sum_j p_j at eigenvalue 1,
    normalised so that sum_j alpha_j * len_j = 1 (unit mass over one
    period).
    """
    E = tset.total()
    eigvals = np.linalg.eigvals(E)
    near_one = np.sum(np.abs(eigvals - 1.0) < 1e-8)
    if near_one != 1:
        raise IrreducibilityError(
            f"eigenvalue-1 eigenspace has dimension {near_one}; matrix not irreducible")
    z, v = leading_eigenpair(E)
    if abs(z - 1.0) > tol:
        raise IrreducibilityError(f"leading eigenvalue {z!r} differs from 1 beyond {tol}")
    alpha = np.real(v)
    if np.max(np.abs(np.imag(v))) > 1e-12:
        raise IrreducibilityError("stationary eigenvector has a nonreal component")
    if alpha.sum() < 0:
        alpha = -alpha
    if np.min(alpha) <= 0:
        raise IrreducibilityError("stationary eigenvector is not strictly positive")
    return alpha / float(alpha @ tset.cell_lengths)


@dataclass
class DiffusionReport:
    """Transport coefficients with provenance of the method that produced them."""

    d: float
    drift: float
    method: str
    alpha: Optional[np.ndarray] = None
    diagnostics: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        out = {
            "d": float(self.d),
            "drift": float(self.drift),
            "method": self.method,
            "diagnostics": {k: (float(v) if isinstance(v, (int, float, np.floating)) else v)
                            for k, v in self.diagnostics.items()},
        }
        if self.alpha is not None:
            out["alpha"] = [float(a) for a in self.alpha]
        return out


def _richardson(values, order=2):
    """Iterated Richardson extrapolation over a step-halving ladder.

    `values` are estimates at steps s, s/2, s/4, ...; the leading error
    term has the given `order` and successive terms gain two orders.
    Returns the final extrapolant and the spread of the last level.
    """
    level = list(values)
    power = order
    while len(level) > 1:
        factor = 2.0**power
        level = [(factor * b - a) / (factor - 1.0) for a, b in zip(level, level[1:])]
        power += 2
    # spread of the previous level measures the remaining uncertainty
    return level[0]


def _derivatives_at_zero(tset, h, depth=4):
    """Extrapolated z'(0) and z''(0) from a warm-started step ladder."""
    steps = [h / 2**i for i in range(depth)]
    z0, v0 = leading_eigenpair(characteristic_matrix(tset, 0.0))
    zs = {0.0: z0}
    for sign in (1.0, -1.0):
        v = v0
        for t in reversed(steps):
            z, v = leading_eigenpair(characteristic_matrix(tset, sign * t), warm_start=v)
            zs[sign * t] = z

    seconds = [(zs[s] - 2.0 * z0 + zs[-s]) / s**2 for s in steps]
    firsts = [(zs[s] - zs[-s]) / (2.0 * s) for s in steps]
    d2_full = _richardson(seconds)
    d2_drop = _richardson(seconds[:-1])
    d1_full = _richardson(firsts)
    d1_drop = _richardson(firsts[:-1])
    gap = max(abs(d2_full - d2_drop), abs(d1_full - d1_drop))
    return d1_full, d2_full, gap, abs(z0 - 1.0)


def diffusion_spectral(tset: TransitionMatrixSet,
                       h: float = 1e-3,
                       agreement_target: float = 1e-13,
                       failure_threshold: float = 1e-7) -> DiffusionReport:
    """Diffusion coefficient and drift from the leading-eigenvalue curvature.

    D = -Re z''(0) / 2 and drift = Im z'(0), with both derivatives taken
    by central differences at steps h and h/2 combined by Richardson
    extrapolation.  The step is adapted away from the default, coarser
    first since eigen-solver roundoff grows like 1/h^2, until the two
    extrapolation levels agree to `agreement_target`; disagreement
    beyond `failure_threshold` raises DerivativeInstabilityError.
    """
    best = None
    for factor in (1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 0.5, 0.25):
        step = h * factor
        d1, d2, gap, z0_err = _derivatives_at_zero(tset, step)
        if best is None or gap < best[2]:
            best = (d1, d2, gap, z0_err, step)
        if gap <= agreement_target:
            break
    d1, d2, gap, z0_err, step = best
    if gap > failure_threshold:
        raise DerivativeInstabilityError(
            f"finite-difference levels disagree by {gap:.3g} (threshold {failure_threshold})")

    alpha = stationary_density(tset)
    return DiffusionReport(
        d=-0.5 * d2.real,
        drift=d1.imag,
        method="spectral",
        alpha=alpha,
        diagnostics={
            "fd_step": step,
            "fd_disagreement": gap,
            "z0_error": z0_err,
            "mass_residual": tset.mass_residual(),
        },
    )
