"""Bayesian learning of densities in coefficient form.

The learning equations come in two coordinate systems that must agree: the
position-basis posterior over a density curve, and the coefficient-basis
posterior over a symmetric matrix in some orthonormal basis. Their
agreement on discrete spaces is the package's central invariance check.
Under a homogeneous prior and noiseless samples the posterior mode has a
closed form, the empirical coefficient matrix, and the matching embedded
density can be evaluated through the squared kernel without ever building
basis projections of the samples.

Noisy embedded learning has no closed form; for that case only the
posterior evaluator `log_posterior_position` is provided (it accepts any
density curve, embedded or not) and `map_coefficients` refuses noisy
input rather than silently returning the wrong estimator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import BasisSpec, Grid, Interval, basis_matrix
from .embedding import (
    EmbeddingOperator,
    kernel_diag,
    kernel_matrix,
    trace_k_map,
    trace_k_rho,
)

_BLOCK = 512


@dataclass(frozen=True)
class GaussianNoise:
    """Gaussian measurement kernel truncated and renormalized on an interval.

    density(center, s) integrates to 1 over s in the interval for every
    fixed center, which is what makes the posterior a proper likelihood on
    a bounded domain.
    """

    sigma: float
    interval: Interval

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")

    def density(self, center: float, s):
        s = np.asarray(s, dtype=float)
        z = (s - center) / self.sigma
        root2 = math.sqrt(2.0)
        norm = 0.5 * (
            math.erf((self.interval.hi - center) / (self.sigma * root2))
            - math.erf((self.interval.lo - center) / (self.sigma * root2))
        )
        if norm <= 0:
            raise ValueError(
                f"noise kernel mass vanishes for center {center}"
            )
        raw = np.exp(-0.5 * z * z) / (self.sigma * math.sqrt(2.0 * math.pi))
        out = np.where(
            (s >= self.interval.lo) & (s <= self.interval.hi), raw / norm, 0.0
        )
        return out


@dataclass(frozen=True)
class SampleSet:
    """Ordered sample points with seed provenance and an optional noise kernel."""

    points: np.ndarray
    seed: int | None = None
    noise: GaussianNoise | None = None

    def __post_init__(self):
        points = np.ascontiguousarray(self.points, dtype=float)
        if points.ndim != 1:
            raise ValueError("sample points must form a 1-d vector")
        if points.size and not np.all(np.isfinite(points)):
            raise ValueError("sample points must be finite")
        points.flags.writeable = False
        object.__setattr__(self, "points", points)

    @property
    def n(self) -> int:
        return self.points.size


@dataclass(frozen=True)
class DensityCurve:
    """A nonnegative function tabulated on a grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=float)
        if values.shape != self.grid.points.shape:
            raise ValueError(
                f"values shape {values.shape} does not match grid "
                f"({self.grid.points.shape})"
            )
        if np.any(values < -1e-12):
            raise ValueError("density values must be nonnegative")
        values = np.maximum(values, 0.0)
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def mass(self) -> float:
        return self.grid.integrate(self.values)


@dataclass(frozen=True)
class MapCoefficients:
    """Empirical coefficient matrix w(j, l) = mean of psi_j(S_i) psi_l(S_i)."""

    basis: BasisSpec
    matrix: np.ndarray

    def __post_init__(self):
        m = np.ascontiguousarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("coefficient matrix must be square")
        if m.shape[0] != self.basis.size:
            raise ValueError(
                f"matrix size {m.shape[0]} does not match the "
                f"{self.basis.size} basis translates"
            )
        if np.max(np.abs(m - m.T)) > 1e-12:
            raise ValueError("coefficient matrix must be symmetric")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    def trace(self) -> float:
        return float(np.trace(self.matrix))


def homogeneous_log_prior(_state) -> float:
    """The flat prior: every state is equally likely a priori."""
    return 0.0


def quadratic_penalty_log_prior(strength: float = 1.0):
    """Log prior -strength * sum of squared entries of a coefficient matrix."""
    if strength < 0:
        raise ValueError(f"strength must be >= 0, got {strength}")

    def prior(state) -> float:
        arr = np.asarray(getattr(state, "matrix", state), dtype=float)
        return -strength * float(np.sum(arr * arr))

    return prior


def log_posterior_position(prior_log, zeta: DensityCurve, samples: SampleSet) -> float:
    """Unnormalized log posterior of a density curve given samples.

    With no noise kernel the likelihood of a sample is the curve value at
    the sample point, linearly interpolated on the grid; with Gaussian
    noise it is the quadrature of noise.density(S_i, .) against the curve.
    A sample with zero likelihood returns -inf (the evidence constant is
    dropped throughout, so only differences of return values mean anything).
    """
    if samples.n == 0:
        raise ValueError("empty sample set")
    total = 0.0
    if samples.noise is None:
        vals = np.interp(samples.points, zeta.grid.points, zeta.values)
        if np.any(vals <= 0.0):
            return -math.inf
        total = float(np.sum(np.log(vals)))
    else:
        for s_i in samples.points:
            like = zeta.grid.integrate(
                samples.noise.density(float(s_i), zeta.grid.points) * zeta.values
            )
            if like <= 0.0:
                return -math.inf
            total += math.log(like)
    return float(prior_log(zeta)) + total


def _check_noise_matrix(noise_matrix, d: int) -> np.ndarray:
    noise = np.asarray(noise_matrix, dtype=float)
    if noise.shape != (d, d):
        raise ValueError(
            f"noise matrix shape {noise.shape} does not match dimension {d}"
        )
    if np.any(noise < -1e-12):
        raise ValueError("noise matrix entries must be nonnegative")
    rows = noise.sum(axis=1)
    if np.max(np.abs(rows - 1.0)) > 1e-10:
        raise ValueError("noise matrix rows must each sum to 1")
    return noise


def log_posterior_discrete(prior_log, probabilities, sample_indices,
                           noise_matrix=None) -> float:
    """Position-basis log posterior on a discrete sample space.

    `probabilities` is the distribution Z over states (a DiscreteDistribution
    or bare vector); `noise_matrix[true, observed]` is row-stochastic. The
    likelihood of observing index b is then (Z @ noise)[b].
    """
    z = np.asarray(getattr(probabilities, "probabilities", probabilities),
                   dtype=float)
    if z.ndim != 1:
        raise ValueError("probabilities must form a vector")
    observed = z if noise_matrix is None else z @ _check_noise_matrix(
        noise_matrix, z.size)
    total = 0.0
    for b in sample_indices:
        like = float(observed[int(b)])
        if like <= 0.0:
            return -math.inf
        total += math.log(like)
    return float(prior_log(z)) + total


def log_posterior_coefficients(prior_log, w, unitary, sample_indices,
                               noise_matrix=None) -> float:
    """Log posterior computed entirely in an arbitrary orthonormal basis.

    `w` is the coefficient matrix of the state in the basis whose columns
    are given by `unitary` (a UnitaryBasis or bare matrix). Position-basis
    probabilities are recovered through the double contraction
    p_j = sum_kl w[k, l] U[j, k] conj(U[j, l]) rather than by transforming
    w back, so agreement with `log_posterior_discrete` exercises a
    genuinely different computation route. For priors that do not depend on
    the coordinate system (the homogeneous default), the two are equal.
    """
    w = np.asarray(getattr(w, "entries", w))
    u = np.asarray(getattr(unitary, "columns", unitary))
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ValueError("coefficient matrix must be square")
    if u.shape != w.shape:
        raise ValueError(
            f"unitary shape {u.shape} does not match coefficients {w.shape}"
        )
    d = w.shape[0]
    if d > 64:
        raise ValueError(f"discrete dimension {d} exceeds the oracle scale 64")
    p = np.einsum("jk,kl,jl->j", u, w, np.conj(u)).real
    observed = p if noise_matrix is None else p @ _check_noise_matrix(
        noise_matrix, d)
    total = 0.0
    for b in sample_indices:
        like = float(observed[int(b)])
        if like <= 0.0:
            return -math.inf
        total += math.log(like)
    return float(prior_log(w)) + total


def map_coefficients(samples: SampleSet, basis: BasisSpec) -> MapCoefficients:
    """Closed-form posterior mode under the flat prior and noiseless samples.

    w(j, l) = (1/N) sum_i psi_j(S_i) psi_l(S_i). Refuses noisy sample sets,
    for which the closed form is invalid; evaluate the posterior through
    log_posterior_position instead.
    """
    if samples.noise is not None:
        raise ValueError(
            "closed-form MAP requires non-noisy samples; use "
            "log_posterior_position for noisy data"
        )
    if samples.n == 0:
        raise ValueError("empty sample set")
    b = basis_matrix(basis, samples.points)
    m = (b @ b.T) / samples.n
    m = 0.5 * (m + m.T)
    return MapCoefficients(basis=basis, matrix=m)


def embedded_density_exact(A: EmbeddingOperator, zeta: DensityCurve,
                           grid: Grid) -> DensityCurve:
    """Embedded image of a known density: (1/T) integral zeta(s') K(s, s')^2.

    T is trace_k_rho on zeta's own grid. For projection operators the
    output integrates to 1 up to quadrature error, provided the grid covers
    the span of the active translates.
    """
    trace = trace_k_rho(A, zeta.values, zeta.grid)
    weighted = zeta.grid.weights() * zeta.values
    out = np.empty(grid.points.size)
    for start in range(0, out.size, _BLOCK):
        stop = min(start + _BLOCK, out.size)
        cross = kernel_matrix(A, grid.points[start:stop], zeta.grid.points)
        out[start:stop] = (cross * cross) @ weighted
    return DensityCurve(grid=grid, values=out / trace)


def embedded_density_map(A: EmbeddingOperator, samples: SampleSet,
                         grid: Grid) -> DensityCurve:
    """Kernel-trick MAP density: sum_i K(S_i, s)^2 / (N tr).

    The samples never get projected onto the basis; only kernel values
    appear. Requires a nonempty, non-noisy sample set.
    """
    if samples.n == 0:
        raise ValueError("empty sample set")
    if samples.noise is not None:
        raise ValueError("kernel-trick MAP requires non-noisy samples")
    trace = trace_k_map(A, samples)
    out = np.empty(grid.points.size)
    for start in range(0, out.size, _BLOCK):
        stop = min(start + _BLOCK, out.size)
        cross = kernel_matrix(A, samples.points, grid.points[start:stop])
        out[start:stop] = np.sum(cross * cross, axis=0)
    return DensityCurve(grid=grid, values=out / (samples.n * trace))


def normalized_ratio(curve: DensityCurve, A: EmbeddingOperator) -> DensityCurve:
    """curve / kernel_diag, masked where the diagonal nearly vanishes,
    then renormalized to unit quadrature mass on the curve's grid.

    The mask threshold is 1e-8 times the largest diagonal value, which
    suppresses the boundary regions where the diagonal decays to zero and
    the raw ratio would blow up.
    """
    diag = kernel_diag(A, curve.grid.points)
    peak = float(np.max(diag))
    if peak <= 0.0:
        raise ValueError("kernel diagonal vanishes everywhere on the grid")
    eps = 1e-8 * peak
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.where(diag > eps, curve.values / diag, 0.0)
    mass = curve.grid.integrate(vals)
    if mass <= 0.0:
        raise ValueError("ratio curve has zero mass; nothing to normalize")
    return DensityCurve(grid=curve.grid, values=vals / mass)
