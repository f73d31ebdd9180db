"""Orthonormal scaling-function families on a closed interval.

Two families are supported. Haar box functions have a closed form and are
mainly useful as an exactly solvable cross-check. Daubechies tap-4 fathers
have no closed form; they are evaluated from a dyadic table built once by
the cascade (refinement) algorithm and linearly interpolated in between.

A family member is phi_nk(s) = 2**(n/2) * phi(2**n * s - k), where phi is
the mother scaling function with support [0, 1] (Haar) or [0, 3]
(Daubechies 4). Translates whose support crosses the interval boundary are
kept as-is, truncated by the domain; no folding or periodization is
applied. As a consequence the family is only orthonormal for interior
translates, and projections onto the family are only approximately
idempotent near the boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

_SQRT3 = math.sqrt(3.0)

# Tap-4 refinement coefficients in the convention where they sum to 2, so
# that the partition of unity sum_k phi(x - k) = 1 holds.
DAUB4_TAPS = np.array([
    (1.0 + _SQRT3) / 4.0,
    (3.0 + _SQRT3) / 4.0,
    (3.0 - _SQRT3) / 4.0,
    (1.0 - _SQRT3) / 4.0,
])

#: Largest cascade level accepted by :func:`scaling_values_daub4`. The table
#: at level m holds 3 * 2**m + 1 doubles, about 100 MB at the cap.
MAX_TABLE_LEVEL = 22

FAMILIES = ("haar", "daubechies4")

_SUPPORT_WIDTH = {"haar": 1, "daubechies4": 3}


@dataclass(frozen=True)
class Interval:
    """A closed interval [lo, hi] with the Lebesgue measure."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("interval bounds must be finite")
        if not self.lo < self.hi:
            raise ValueError(f"need lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        return (s >= self.lo) & (s <= self.hi)


class Grid:
    """Uniform quadrature grid on an interval.

    Stores the strictly increasing point vector and the common spacing h.
    Integration is composite trapezoid with a fixed summation order, so
    repeated runs produce bit-identical results.
    """

    __slots__ = ("points", "h")

    def __init__(self, points):
        points = np.ascontiguousarray(points, dtype=float)
        if points.ndim != 1 or points.size < 2:
            raise ValueError("grid needs a 1-d vector of at least 2 points")
        steps = np.diff(points)
        if np.any(steps <= 0):
            raise ValueError("grid points must be strictly increasing")
        h = (points[-1] - points[0]) / (points.size - 1)
        if np.max(np.abs(steps - h)) > 1e-12 * max(1.0, abs(h)):
            raise ValueError("grid spacing is not uniform")
        points.flags.writeable = False
        self.points = points
        self.h = float(h)

    @classmethod
    def uniform(cls, interval: Interval, cells: int) -> "Grid":
        """Grid with `cells` equal cells (cells + 1 points) on `interval`."""
        if cells < 1:
            raise ValueError(f"need at least 1 cell, got {cells}")
        return cls(np.linspace(interval.lo, interval.hi, cells + 1))

    @property
    def cells(self) -> int:
        return self.points.size - 1

    @property
    def interval(self) -> Interval:
        return Interval(float(self.points[0]), float(self.points[-1]))

    def weights(self) -> np.ndarray:
        """Trapezoid quadrature weights aligned with the points."""
        w = np.full(self.points.size, self.h)
        w[0] *= 0.5
        w[-1] *= 0.5
        return w

    def integrate(self, values) -> float:
        values = np.asarray(values, dtype=float)
        if values.shape != self.points.shape:
            raise ValueError(
                f"values shape {values.shape} does not match grid "
                f"({self.points.shape})"
            )
        interior = float(np.sum(values[1:-1]))
        return self.h * (interior + 0.5 * (float(values[0]) + float(values[-1])))

    def __eq__(self, other):
        return (
            isinstance(other, Grid)
            and self.points.shape == other.points.shape
            and bool(np.all(self.points == other.points))
        )

    def __repr__(self):
        return (
            f"Grid({self.points[0]:g}..{self.points[-1]:g}, "
            f"{self.cells} cells)"
        )


@lru_cache(maxsize=8)
def scaling_values_daub4(levels: int) -> np.ndarray:
    """Daubechies tap-4 scaling function at dyadic points j / 2**levels.

    Returns a read-only vector of length 3 * 2**levels + 1 covering the
    mother support [0, 3]. Values at the integers come from the eigenvalue-1
    eigenvector of the 2x2 interior refinement matrix, normalized so that
    phi(1) + phi(2) = 1; each finer level fills the odd midpoints through
    the two-scale relation phi(x) = sum_t c_t phi(2x - t).

    Parameters
    ----------
    levels : int
        Dyadic refinement depth m >= 0. Capped at MAX_TABLE_LEVEL to bound
        memory.
    """
    if levels < 0:
        raise ValueError(f"levels must be >= 0, got {levels}")
    if levels > MAX_TABLE_LEVEL:
        raise ValueError(
            f"levels {levels} exceeds table cap {MAX_TABLE_LEVEL}"
        )
    # Integer-point seed: the interior refinement matrix [[c1, c0], [c3, c2]]
    # has eigenvalue 1 with eigenvector proportional to (1 + sqrt 3, 1 - sqrt 3).
    vals = np.zeros(4)
    vals[1] = (1.0 + _SQRT3) / 2.0
    vals[2] = (1.0 - _SQRT3) / 2.0
    c = DAUB4_TAPS
    for lev in range(1, levels + 1):
        n_old = vals.size
        new = np.zeros(3 * 2 ** lev + 1)
        new[0::2] = vals
        half = 2 ** (lev - 1)
        base = 2 * np.arange(3 * half) + 1
        acc = np.zeros(base.size)
        for t in range(4):
            idx = base - t * half
            ok = (idx >= 0) & (idx < n_old)
            acc[ok] += c[t] * vals[idx[ok]]
        new[1::2] = acc
        vals = new
    vals.flags.writeable = False
    return vals


@dataclass(frozen=True)
class BasisSpec:
    """A scaling-function family phi_nk restricted to an interval.

    translate_range is derived, not chosen: it is the minimal integer range
    [k_min, k_max] such that every translate whose support intersects the
    interval is included. For Daubechies 4 the support of phi(2**n s - k)
    is [k / 2**n, (k + 3) / 2**n].
    """

    family: str
    scale_n: int
    interval: Interval
    table_level: int = 12
    translate_range: tuple = field(init=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(
                f"unknown family {self.family!r}; expected one of {FAMILIES}"
            )
        if self.scale_n < 0:
            raise ValueError(f"scale_n must be >= 0, got {self.scale_n}")
        if not 0 <= self.table_level <= MAX_TABLE_LEVEL:
            raise ValueError(
                f"table_level must be in [0, {MAX_TABLE_LEVEL}], "
                f"got {self.table_level}"
            )
        width = _SUPPORT_WIDTH[self.family]
        two_n = 2 ** self.scale_n
        # k is kept iff k/2^n < hi and (k+width)/2^n > lo, i.e. the open
        # support interior meets the interval.
        k_min = math.floor(self.interval.lo * two_n - width) + 1
        k_max = math.ceil(self.interval.hi * two_n) - 1
        object.__setattr__(self, "translate_range", (k_min, k_max))

    @property
    def translates(self) -> np.ndarray:
        k_min, k_max = self.translate_range
        return np.arange(k_min, k_max + 1)

    @property
    def size(self) -> int:
        k_min, k_max = self.translate_range
        return k_max - k_min + 1

    def support(self, k: int) -> Interval:
        """Support of the translate phi_nk before domain truncation."""
        width = _SUPPORT_WIDTH[self.family]
        two_n = 2 ** self.scale_n
        return Interval(k / two_n, (k + width) / two_n)

    def span(self) -> Interval:
        """Union of the interval and every active translate support."""
        k_min, k_max = self.translate_range
        width = _SUPPORT_WIDTH[self.family]
        two_n = 2 ** self.scale_n
        return Interval(
            min(self.interval.lo, k_min / two_n),
            max(self.interval.hi, (k_max + width) / two_n),
        )

    def interior_translates(self) -> np.ndarray:
        """Translates whose full support lies inside the interval."""
        ks = self.translates
        width = _SUPPORT_WIDTH[self.family]
        two_n = 2 ** self.scale_n
        keep = (ks / two_n >= self.interval.lo - 1e-12) & (
            (ks + width) / two_n <= self.interval.hi + 1e-12
        )
        return ks[keep]


def _mother_daub4(x: np.ndarray, table_level: int) -> np.ndarray:
    """Mother tap-4 scaling function, linear interpolation on the table."""
    table = scaling_values_daub4(table_level)
    out = np.zeros_like(x)
    inside = (x > 0.0) & (x < 3.0)
    if np.any(inside):
        t = x[inside] * 2 ** table_level
        i = np.floor(t).astype(np.int64)
        np.clip(i, 0, table.size - 2, out=i)
        frac = t - i
        out[inside] = table[i] * (1.0 - frac) + table[i + 1] * frac
    return out


def eval_father(spec: BasisSpec, k: int, s) -> np.ndarray:
    """Evaluate phi_nk(s) = 2**(n/2) phi(2**n s - k).

    Haar uses the half-open support convention [k/2^n, (k+1)/2^n), so the
    value at the right edge of a box is 0. Points outside the support
    return 0; no interval check is applied, since curve grids may extend
    past the interval to cover boundary translates.
    """
    s = np.asarray(s, dtype=float)
    scalar = s.ndim == 0
    x = np.atleast_1d(s) * 2 ** spec.scale_n - k
    amp = 2.0 ** (spec.scale_n / 2.0)
    if spec.family == "haar":
        out = np.where((x >= 0.0) & (x < 1.0), amp, 0.0)
    else:
        out = amp * _mother_daub4(x, spec.table_level)
    return float(out[0]) if scalar else out


def basis_matrix(spec: BasisSpec, s_values) -> np.ndarray:
    """Matrix of phi_nk(s) values, one row per translate k."""
    s_values = np.asarray(s_values, dtype=float)
    out = np.empty((spec.size, s_values.size))
    for row, k in enumerate(spec.translates):
        out[row] = eval_father(spec, int(k), s_values)
    return out


def _require_resolution(spec: BasisSpec, grid: Grid):
    need = 2 ** (spec.scale_n + 8)
    if grid.cells < need:
        raise ValueError(
            f"grid has {grid.cells} cells; scale n={spec.scale_n} "
            f"needs at least {need}"
        )


def gram_check(spec: BasisSpec, grid: Grid) -> np.ndarray:
    """Pairwise quadrature inner products G(k, k') of the translates.

    Diagnostic only: for interior translates G approaches the identity as
    the grid refines, while boundary-truncated translates deviate. For a
    clean 1e-6 identity check, evaluate on a grid whose spacing is a
    multiple of 2**-(table_level + scale_n) so the sample points fall on
    the dyadic table.
    """
    _require_resolution(spec, grid)
    b = basis_matrix(spec, grid.points)
    return (b * grid.weights()) @ b.T


def wavelet_approximation(f_values, spec: BasisSpec, grid: Grid) -> np.ndarray:
    """Project function values onto the family: sum_k <phi_nk, f> phi_nk.

    The coefficients are trapezoid inner products on the given grid and the
    reconstruction is evaluated on the same grid. The output can take
    negative values even for nonnegative f; that is inherent to wavelet
    approximation, not an error.
    """
    _require_resolution(spec, grid)
    f_values = np.asarray(f_values, dtype=float)
    if f_values.shape != grid.points.shape:
        raise ValueError(
            f"function values shape {f_values.shape} does not match grid "
            f"({grid.points.shape})"
        )
    b = basis_matrix(spec, grid.points)
    coeffs = (b * grid.weights()) @ f_values
    return coeffs @ b
