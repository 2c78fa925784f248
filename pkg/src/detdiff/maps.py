"""Piecewise-linear lifting maps on the real line.

A lifting map is defined by its restriction to the fundamental interval
I0 = [-1/2, 1/2) and extended to the whole line through the lift-1
identity f(k + x) = k + f(x) for every integer k.  The restriction is
piecewise linear: strictly increasing breakpoints x_0 = -1/2 < ... <
x_m = 1/2 and, for each piece, the pair of endpoint values
(f(x_{j-1}+), f(x_j-)).  Pieces may be mutually discontinuous, but every
piece must have nonzero slope.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Sequence

import numpy as np

from .errors import MapDefinitionError

__all__ = [
    "PiecewiseLinearLiftMap",
    "Interval",
    "nearest_integer",
    "fractional_part",
    "eval_map",
    "shift_function",
    "validate_stretching",
    "compute_route",
    "reconstruct_initial",
    "linear_map",
    "zigzag_map",
    "map_from_spec",
]

_HALF = 0.5
_BREAKPOINT_TOL = 1e-12

# Interval indices are exact in doubles only below 2**53.
_MAX_INDEX = float(2**53)


def nearest_integer(x):
    """Nearest-integer label [x): the k with x in [k - 1/2, k + 1/2).

    Ties at half-integers round up, consistent with the half-open cells.
    Scalars return ``int``, arrays return an int64 array.
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("nearest_integer requires finite input")
    k = np.floor(arr + _HALF)
    if arr.ndim == 0:
        return int(k)
    return k.astype(np.int64)


def fractional_part(x):
    """Signed fractional part {x) = x - [x), lying in [-1/2, 1/2)."""
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("fractional_part requires finite input")
    out = arr - np.floor(arr + _HALF)
    if arr.ndim == 0:
        return float(out)
    return out


class Interval(NamedTuple):
    """Closed interval; empty when hi < lo."""

    lo: float
    hi: float

    @property
    def is_empty(self) -> bool:
        return self.hi < self.lo

    @property
    def width(self) -> float:
        return 0.0 if self.is_empty else self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x: float, slack: float = 0.0) -> bool:
        return (not self.is_empty) and (self.lo - slack <= x <= self.hi + slack)


EMPTY_INTERVAL = Interval(math.inf, -math.inf)


class PiecewiseLinearLiftMap:
    """Piecewise-linear map on I0 = [-1/2, 1/2) with its lift-1 extension.

    Parameters
    ----------
    breakpoints : sequence of float
        Strictly increasing, first exactly -1/2 and last exactly +1/2
        (a tolerance of 1e-12 is accepted and snapped).
    values : sequence of (float, float)
        One pair per piece: the value at the left end and the value
        approached at the right end of the piece.  Equal endpoint values
        (zero slope) are rejected.
    """

    def __init__(self, breakpoints: Sequence[float], values: Sequence[Sequence[float]]):
        bp = np.array([float(b) for b in breakpoints], dtype=float)
        if bp.ndim != 1 or bp.size < 2:
            raise MapDefinitionError("need at least two breakpoints")
        if abs(bp[0] + _HALF) > _BREAKPOINT_TOL or abs(bp[-1] - _HALF) > _BREAKPOINT_TOL:
            raise MapDefinitionError(
                f"breakpoints must span [-1/2, 1/2], got [{bp[0]}, {bp[-1]}]")
        bp[0], bp[-1] = -_HALF, _HALF
        if np.any(np.diff(bp) <= 0):
            raise MapDefinitionError("breakpoints must be strictly increasing")
        vals = [(float(a), float(b)) for a, b in values]
        if len(vals) != bp.size - 1:
            raise MapDefinitionError(
                f"{bp.size - 1} pieces require {bp.size - 1} value pairs, got {len(vals)}")
        if not all(math.isfinite(a) and math.isfinite(b) for a, b in vals):
            raise MapDefinitionError("piece values must be finite")

        self.breakpoints = bp
        self.left_values = np.array([a for a, _ in vals])
        self.right_values = np.array([b for _, b in vals])
        widths = np.diff(bp)
        self.slopes = (self.right_values - self.left_values) / widths
        if np.any(self.slopes == 0.0) or np.any(~np.isfinite(self.slopes)):
            raise MapDefinitionError("every piece must have nonzero finite slope")
        self.intercepts = self.left_values - self.slopes * bp[:-1]

    # -- basic queries ------------------------------------------------

    @property
    def n_pieces(self) -> int:
        return self.slopes.size

    def min_slope(self) -> float:
        """Minimum of |slope| over the pieces (the stretching constant)."""
        return float(np.min(np.abs(self.slopes)))

    def is_stretching(self, threshold: float = 1.0) -> bool:
        return self.min_slope() > threshold

    def has_half_integer_values(self, tol: float = 1e-9) -> bool:
        """True when every piece endpoint value sits on the k + 1/2 grid."""
        v = np.concatenate([self.left_values, self.right_values])
        return bool(np.all(np.abs(v + _HALF - np.round(v + _HALF)) <= tol))

    # -- evaluation ---------------------------------------------------

    def _piece_of(self, u):
        # u must lie in [-1/2, 1/2); right-open cells
        return np.clip(
            np.searchsorted(self.breakpoints[1:-1], u, side="right"), 0, self.n_pieces - 1
        )

    def _eval_array(self, x):
        """Vectorised evaluation without finiteness checks (hot path)."""
        k = np.floor(x + _HALF)
        u = x - k
        j = self._piece_of(u)
        return k + self.slopes[j] * u + self.intercepts[j]

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise ValueError("map evaluation requires finite input")
        out = self._eval_array(arr)
        if arr.ndim == 0:
            return float(out)
        return out

    def fundamental(self, u):
        """Evaluate the defining branch on I0 (no lift applied)."""
        arr = np.asarray(u, dtype=float)
        if np.any(arr < -_HALF) or np.any(arr >= _HALF):
            raise ValueError("fundamental() expects arguments in [-1/2, 1/2)")
        j = self._piece_of(arr)
        out = self.slopes[j] * arr + self.intercepts[j]
        return float(out) if arr.ndim == 0 else out

    def shift(self, x):
        """Shift function s(x) = f(x) - x; 1-periodic by construction."""
        arr = np.asarray(x, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise ValueError("shift evaluation requires finite input")
        out = self._eval_array(arr) - arr
        return float(out) if arr.ndim == 0 else out

    # -- serialisation ------------------------------------------------

    def to_spec(self) -> dict:
        return {
            "type": "pieces",
            "breakpoints": [float(b) for b in self.breakpoints],
            "values": [[float(a), float(b)]
                       for a, b in zip(self.left_values, self.right_values)],
        }

    def __repr__(self):
        return (f"PiecewiseLinearLiftMap({self.n_pieces} pieces, "
                f"min|slope|={self.min_slope():.4g})")


# -- constructors -----------------------------------------------------


def linear_map(lam: float) -> PiecewiseLinearLiftMap:
    """The single-piece map f(x) = lam * x on I0."""
    lam = float(lam)
    if lam == 0.0 or not math.isfinite(lam):
        raise MapDefinitionError("linear map needs a nonzero finite slope")
    return PiecewiseLinearLiftMap([-_HALF, _HALF], [(-lam / 2, lam / 2)])


def zigzag_map(p: int, xi: float) -> PiecewiseLinearLiftMap:
    """Odd three-piece map with f(0)=0, f(xi)=p+1/2 and f(1/2)=1/2.

    The rising middle piece carries [-xi, xi] to [-(p+1/2), p+1/2]; the
    outer pieces fall back to +-1/2 at the interval ends.
    """
    p = int(p)
    xi = float(xi)
    if p < 1:
        raise MapDefinitionError("zigzag map needs p >= 1")
    if not 0.0 < xi < _HALF:
        raise MapDefinitionError("zigzag map needs 0 < xi < 1/2")
    peak = p + _HALF
    return PiecewiseLinearLiftMap(
        [-_HALF, -xi, xi, _HALF],
        [(-_HALF, -peak), (-peak, peak), (peak, _HALF)],
    )


def map_from_spec(spec: dict) -> PiecewiseLinearLiftMap:
    """Build a map from its JSON-style description.

    Three forms are accepted::

        {"type": "linear", "lambda": 3.0}
        {"type": "zigzag", "p": 1, "xi": 0.25}
        {"type": "pieces", "breakpoints": [...], "values": [[a, b], ...]}
    """
    if not isinstance(spec, dict) or "type" not in spec:
        raise MapDefinitionError("map spec must be an object with a 'type' field")
    kind = spec["type"]
    try:
        if kind == "linear":
            return linear_map(spec["lambda"])
        if kind == "zigzag":
            return zigzag_map(spec["p"], spec["xi"])
        if kind == "pieces":
            return PiecewiseLinearLiftMap(spec["breakpoints"], spec["values"])
    except KeyError as exc:
        raise MapDefinitionError(f"map spec is missing field {exc}") from exc
    raise MapDefinitionError(f"unknown map type {kind!r}")


# -- spec-named operation aliases ------------------------------------


def eval_map(lift_map: PiecewiseLinearLiftMap, x):
    """Evaluate the lifted map anywhere on the line."""
    return lift_map(x)


def shift_function(lift_map: PiecewiseLinearLiftMap, x):
    return lift_map.shift(x)


def validate_stretching(lift_map: PiecewiseLinearLiftMap) -> float:
    """Return min |slope| over the pieces; the caller compares with 1."""
    return lift_map.min_slope()


# -- routes -----------------------------------------------------------


def compute_route(lift_map: PiecewiseLinearLiftMap, x0: float, n: int) -> tuple:
    """Integer labels of the cells visited by x0, f(x0), ..., f^(n-1)(x0)."""
    if n < 1:
        raise ValueError("route length n must be >= 1")
    x = float(x0)
    if not math.isfinite(x):
        raise ValueError("route computation requires a finite start point")
    route = []
    for _ in range(n):
        if abs(x) >= _MAX_INDEX:
            raise OverflowError("interval index exceeded the exact-integer range")
        route.append(int(math.floor(x + _HALF)))
        x = float(lift_map._eval_array(np.asarray(x)))
    return tuple(route)


def _preimages_in_cell(lift_map, segments, cell):
    """Preimages of the given closed segments inside unit cell `cell`.

    Returns a merged list of closed segments.  Pieces are handled one by
    one, so non-monotone maps produce several branches.
    """
    bp = lift_map.breakpoints
    out = []
    for j in range(lift_map.n_pieces):
        s, t = lift_map.slopes[j], lift_map.intercepts[j]
        d0, d1 = bp[j], bp[j + 1]
        for lo, hi in segments:
            # in cell coordinates: f(cell + u) = cell + s*u + t
            a = (lo - cell - t) / s
            b = (hi - cell - t) / s
            if a > b:
                a, b = b, a
            a, b = max(a, d0), min(b, d1)
            if a <= b:
                out.append((cell + a, cell + b))
    if not out:
        return []
    out.sort()
    merged = [out[0]]
    for lo, hi in out[1:]:
        if lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return merged


def reconstruct_initial(lift_map: PiecewiseLinearLiftMap, route) -> Interval:
    """Interval of starting points whose route begins with the given labels.

    Built by nesting preimages backwards from the last visited cell.  The
    result is the closed hull of all admissible branches; its width is at
    most min|slope|^-(n-1) for maps that are injective on each unit cell.
    An empty interval signals an inadmissible route.
    """
    route = tuple(int(k) for k in route)
    if not route:
        raise ValueError("route must be nonempty")
    if not lift_map.is_stretching():
        raise MapDefinitionError("route reconstruction requires min |slope| > 1")
    segments = [(route[-1] - _HALF, route[-1] + _HALF)]
    for cell in reversed(route[:-1]):
        segments = _preimages_in_cell(lift_map, segments, cell)
        if not segments:
            return EMPTY_INTERVAL
    return Interval(segments[0][0], segments[-1][1])
