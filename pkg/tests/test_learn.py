"""Posterior evaluators, the closed-form MAP, and embedded densities.

Hand oracles: interpolated likelihoods on a 4-point grid, a discrete
distribution whose posterior is log(1/128), a spike curve that turns the
noisy likelihood into a single kernel value, and Haar embeddings whose
piecewise-constant closed forms are exact.
"""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from densop import (
    BasisSpec,
    BetaTarget,
    DensityCurve,
    EmbeddingOperator,
    GaussianNoise,
    Grid,
    Interval,
    MapCoefficients,
    SampleSet,
    basis_matrix,
    change_basis,
    embedded_density_exact,
    embedded_density_map,
    ensemble_from_distribution,
    homogeneous_log_prior,
    kernel_diag,
    log_posterior_coefficients,
    log_posterior_discrete,
    log_posterior_position,
    map_coefficients,
    normalized_ratio,
    quadratic_penalty_log_prior,
    trace_k_map,
)
from densop.discrete import random_distribution, random_unitary

UNIT = Interval(0.0, 3.0)


# ------------------------------------------------------------ data types


def test_sample_set_basics():
    s = SampleSet(np.array([0.5, 1.5]), seed=7)
    assert s.n == 2
    assert s.seed == 7
    assert s.noise is None
    assert not s.points.flags.writeable
    assert SampleSet(np.array([])).n == 0


def test_sample_set_validation():
    with pytest.raises(ValueError):
        SampleSet(np.array([[1.0, 2.0]]))
    with pytest.raises(ValueError):
        SampleSet(np.array([1.0, np.nan]))


def test_density_curve_validation():
    grid = Grid.uniform(UNIT, 4)
    with pytest.raises(ValueError):
        DensityCurve(grid, np.zeros(3))
    with pytest.raises(ValueError):
        DensityCurve(grid, np.array([1.0, -0.5, 1.0, 1.0, 1.0]))
    # values inside the rounding band get clipped to zero
    curve = DensityCurve(grid, np.array([1.0, -1e-13, 1.0, 1.0, 1.0]))
    assert curve.values[1] == 0.0
    assert not curve.values.flags.writeable


def test_map_coefficients_validation():
    spec = BasisSpec("haar", 0, UNIT)  # 3 translates
    good = MapCoefficients(spec, np.eye(3) / 3.0)
    assert_allclose(good.trace(), 1.0)
    with pytest.raises(ValueError):
        MapCoefficients(spec, np.eye(4))
    with pytest.raises(ValueError):
        MapCoefficients(spec, np.zeros((3, 2)))
    bad = np.eye(3)
    bad[0, 1] = 1e-6
    with pytest.raises(ValueError):
        MapCoefficients(spec, bad)


def test_gaussian_noise_validation_and_support():
    with pytest.raises(ValueError):
        GaussianNoise(0.0, UNIT)
    noise = GaussianNoise(0.4, UNIT)
    assert noise.density(1.0, 3.5) == 0.0
    assert noise.density(1.0, -0.1) == 0.0


def test_gaussian_noise_has_unit_mass_for_any_center():
    # truncation to the interval is renormalized, so even a center on the
    # boundary keeps total mass one
    noise = GaussianNoise(0.4, UNIT)
    grid = Grid.uniform(UNIT, 8192)
    for center in (0.0, 0.5, 1.5, 2.9, 3.0):
        mass = grid.integrate(noise.density(center, grid.points))
        assert abs(mass - 1.0) <= 1e-6


# ------------------------------------------------------------ priors


def test_priors():
    assert homogeneous_log_prior(object()) == 0.0
    prior = quadratic_penalty_log_prior(2.0)
    m = np.array([[1.0, 0.5], [0.5, 0.25]])
    assert_allclose(prior(m), -2.0 * np.sum(m * m))
    coeffs = map_coefficients(
        SampleSet(np.array([1.3])), BasisSpec("daubechies4", 2, UNIT)
    )
    assert_allclose(prior(coeffs), -2.0 * np.sum(coeffs.matrix ** 2))
    with pytest.raises(ValueError):
        quadratic_penalty_log_prior(-1.0)


# ------------------------------------------- position-basis posterior


def test_position_posterior_interpolates():
    grid = Grid(np.array([0.0, 1.0, 2.0, 3.0]))
    curve = DensityCurve(grid, np.array([0.0, 0.5, 0.5, 0.0]))
    samples = SampleSet(np.array([0.5, 2.0]))
    lp = log_posterior_position(homogeneous_log_prior, curve, samples)
    assert_allclose(lp, math.log(0.25) + math.log(0.5), rtol=1e-14)
    shifted = log_posterior_position(lambda _c: -1.0, curve, samples)
    assert_allclose(shifted, lp - 1.0, rtol=1e-14)


def test_position_posterior_zero_likelihood_is_minus_inf():
    grid = Grid(np.array([0.0, 1.0, 2.0, 3.0]))
    curve = DensityCurve(grid, np.array([0.0, 0.5, 0.5, 0.0]))
    bad = SampleSet(np.array([0.5, 3.0]))
    assert log_posterior_position(homogeneous_log_prior, curve, bad) == -math.inf


def test_position_posterior_rejects_empty_samples():
    grid = Grid.uniform(UNIT, 4)
    curve = DensityCurve(grid, np.full(5, 1.0 / 3.0))
    with pytest.raises(ValueError):
        log_posterior_position(homogeneous_log_prior, curve, SampleSet(np.array([])))


def test_position_posterior_uniform_curve():
    grid = Grid.uniform(UNIT, 128)
    curve = DensityCurve(grid, np.full(129, 1.0 / 3.0))
    samples = SampleSet(np.linspace(0.1, 2.9, 20))
    lp = log_posterior_position(homogeneous_log_prior, curve, samples)
    assert_allclose(lp, 20.0 * math.log(1.0 / 3.0), rtol=1e-12)


def test_noisy_posterior_spike_curve_reads_off_the_kernel():
    # a unit-mass spike at a grid point turns each likelihood quadrature
    # into the noise density evaluated at the spike; with 3072 cells the
    # spacing is exactly 2**-10, so the quadrature is bit-exact
    grid = Grid.uniform(UNIT, 3072)
    i0 = 1500
    center = float(grid.points[i0])
    values = np.zeros(grid.points.size)
    values[i0] = 1024.0
    curve = DensityCurve(grid, values)
    noise = GaussianNoise(0.4, UNIT)
    samples = SampleSet(np.array([0.7, 1.9, 2.2]), noise=noise)
    lp = log_posterior_position(homogeneous_log_prior, curve, samples)
    oracle = sum(
        math.log(float(noise.density(float(s), grid.points)[i0]))
        for s in samples.points
    )
    assert lp == oracle


def test_noisy_posterior_zero_curve_is_minus_inf():
    grid = Grid.uniform(UNIT, 64)
    curve = DensityCurve(grid, np.zeros(65))
    noise = GaussianNoise(0.4, UNIT)
    samples = SampleSet(np.array([1.0]), noise=noise)
    assert log_posterior_position(homogeneous_log_prior, curve, samples) == -math.inf


def test_noisy_posterior_stable_under_grid_refinement():
    target = BetaTarget(2.0, 5.0, UNIT)
    noise = GaussianNoise(0.3, UNIT)
    pts = target.sample(25, seed=5).points
    samples = SampleSet(pts, seed=5, noise=noise)
    values = []
    for cells in (2048, 4096):
        grid = Grid.uniform(UNIT, cells)
        curve = DensityCurve(grid, target.density(grid.points))
        values.append(
            log_posterior_position(homogeneous_log_prior, curve, samples)
        )
    assert abs(values[1] - values[0]) <= 1e-4


# ------------------------------------------- discrete posterior routes


def test_discrete_posterior_hand_oracle():
    z = np.array([0.5, 0.25, 0.25])
    idx = [0, 1, 1, 2]
    lp = log_posterior_discrete(homogeneous_log_prior, z, idx)
    assert_allclose(lp, math.log(1.0 / 128.0), rtol=1e-14)
    # a DiscreteDistribution and its bare vector are interchangeable
    from densop import DiscreteDistribution
    wrapped = log_posterior_discrete(
        homogeneous_log_prior, DiscreteDistribution(z), idx
    )
    assert wrapped == lp
    # identity noise changes nothing
    assert_allclose(
        log_posterior_discrete(homogeneous_log_prior, z, idx, np.eye(3)),
        lp, rtol=1e-14,
    )


def test_discrete_posterior_with_noise_matrix():
    z = np.array([0.5, 0.25, 0.25])
    noise = np.array([
        [0.8, 0.2, 0.0],
        [0.1, 0.8, 0.1],
        [0.0, 0.2, 0.8],
    ])
    observed = z @ noise
    idx = [0, 1, 1, 2]
    lp = log_posterior_discrete(homogeneous_log_prior, z, idx, noise)
    expected = sum(math.log(observed[b]) for b in idx)
    assert_allclose(lp, expected, rtol=1e-14)


def test_discrete_posterior_minus_inf_and_prior():
    z = np.array([1.0, 0.0])
    assert log_posterior_discrete(homogeneous_log_prior, z, [1]) == -math.inf
    prior = quadratic_penalty_log_prior(2.0)
    z = np.array([0.5, 0.5])
    lp = log_posterior_discrete(prior, z, [0])
    assert_allclose(lp, -2.0 * 0.5 + math.log(0.5), rtol=1e-14)


def test_noise_matrix_validation():
    z = np.array([0.5, 0.5])
    with pytest.raises(ValueError):
        log_posterior_discrete(homogeneous_log_prior, z, [0], np.eye(3))
    with pytest.raises(ValueError):
        log_posterior_discrete(
            homogeneous_log_prior, z, [0], np.array([[1.1, -0.1], [0.0, 1.0]])
        )
    with pytest.raises(ValueError):
        log_posterior_discrete(
            homogeneous_log_prior, z, [0], np.array([[0.5, 0.4], [0.0, 1.0]])
        )


def test_coefficient_posterior_identity_basis():
    z = np.array([0.5, 0.25, 0.25])
    idx = [0, 1, 1, 2]
    lp = log_posterior_coefficients(
        homogeneous_log_prior, np.diag(z), np.eye(3), idx
    )
    assert_allclose(lp, math.log(1.0 / 128.0), rtol=1e-14)


@pytest.mark.parametrize("seed", range(10))
def test_coefficient_route_matches_position_route(seed):
    # the same samples scored in position coordinates and in a random
    # rotated basis must give the same posterior, with and without noise
    rng = np.random.Generator(np.random.PCG64(900 + seed))
    d = int(rng.integers(2, 9))
    z = random_distribution(d, rng)
    u = random_unitary(d, rng)
    w = change_basis(ensemble_from_distribution(z), u)
    idx = rng.integers(0, d, size=7)
    a = log_posterior_discrete(homogeneous_log_prior, z, idx)
    b = log_posterior_coefficients(homogeneous_log_prior, w, u, idx)
    assert abs(a - b) <= 1e-12
    noise = rng.random((d, d)) + 0.1
    noise /= noise.sum(axis=1, keepdims=True)
    a = log_posterior_discrete(homogeneous_log_prior, z, idx, noise)
    b = log_posterior_coefficients(homogeneous_log_prior, w, u, idx, noise)
    assert abs(a - b) <= 1e-12


def test_coefficient_posterior_validation():
    with pytest.raises(ValueError):
        log_posterior_coefficients(
            homogeneous_log_prior, np.eye(65) / 65.0, np.eye(65), [0]
        )
    with pytest.raises(ValueError):
        log_posterior_coefficients(
            homogeneous_log_prior, np.eye(3) / 3.0, np.eye(4), [0]
        )
    with pytest.raises(ValueError):
        log_posterior_coefficients(
            homogeneous_log_prior, np.zeros((2, 3)), np.eye(3), [0]
        )


# ------------------------------------------------------- closed-form MAP


def test_map_single_sample_is_rank_one():
    spec = BasisSpec("daubechies4", 2, UNIT)
    coeffs = map_coefficients(SampleSet(np.array([1.3])), spec)
    col = basis_matrix(spec, np.array([1.3]))[:, 0]
    assert np.array_equal(coeffs.matrix, np.outer(col, col))


def test_map_is_invariant_under_sample_duplication():
    spec = BasisSpec("daubechies4", 2, UNIT)
    once = map_coefficients(SampleSet(np.array([0.4, 1.7])), spec)
    twice = map_coefficients(SampleSet(np.array([0.4, 1.7, 0.4, 1.7])), spec)
    assert_allclose(twice.matrix, once.matrix, rtol=1e-14, atol=1e-16)


def test_map_trace_equals_mean_kernel_diagonal():
    spec = BasisSpec("daubechies4", 2, UNIT)
    target = BetaTarget(2.0, 5.0, UNIT)
    samples = target.sample(200, seed=4)
    coeffs = map_coefficients(samples, spec)
    op = EmbeddingOperator.projection(spec)
    assert_allclose(coeffs.trace(), trace_k_map(op, samples), rtol=1e-12)


def test_map_matrix_is_positive_semidefinite():
    spec = BasisSpec("daubechies4", 2, UNIT)
    samples = BetaTarget(2.0, 5.0, UNIT).sample(300, seed=6)
    coeffs = map_coefficients(samples, spec)
    assert np.linalg.eigvalsh(coeffs.matrix)[0] >= -1e-12


def test_map_haar_diagonal_converges_to_bin_masses():
    # with Haar translates the diagonal of the empirical matrix is
    # 2**n times the empirical bin frequency, so the law of large numbers
    # pins it to 2**n times the bin mass; the off-diagonal is exactly zero
    spec = BasisSpec("haar", 2, UNIT)
    target = BetaTarget(2.0, 5.0, UNIT)
    n = 200000
    samples = target.sample(n, seed=17)
    coeffs = map_coefficients(samples, spec)
    off = coeffs.matrix - np.diag(np.diag(coeffs.matrix))
    assert np.all(off == 0.0)
    edges = np.arange(13) / 4.0
    q = np.diff(target.cdf(edges))
    sigma = 4.0 * np.sqrt(q * (1.0 - q) / n)
    assert np.all(np.abs(np.diag(coeffs.matrix) - 4.0 * q) <= 3.0 * sigma)


def test_map_refuses_noisy_and_empty_samples():
    spec = BasisSpec("haar", 1, UNIT)
    noisy = SampleSet(np.array([1.0]), noise=GaussianNoise(0.4, UNIT))
    with pytest.raises(ValueError, match="non-noisy"):
        map_coefficients(noisy, spec)
    with pytest.raises(ValueError, match="empty"):
        map_coefficients(SampleSet(np.array([])), spec)


# ------------------------------------------------------- embedded curves


def test_exact_embedding_haar_closed_form():
    # for Haar at scale 2 the squared kernel is 16 times the shared-bin
    # indicator, so the embedded curve is piecewise constant with value
    # 16 q_k / T on bin k, where q_k is the quadrature mass of zeta there
    spec = BasisSpec("haar", 2, UNIT)
    op = EmbeddingOperator.projection(spec)
    zeta_grid = Grid.uniform(UNIT, 3072)
    target = BetaTarget(2.0, 5.0, UNIT)
    zeta = DensityCurve(zeta_grid, target.density(zeta_grid.points))
    weighted = zeta_grid.weights() * zeta.values
    ind_z = basis_matrix(spec, zeta_grid.points) ** 2 / 4.0
    q = ind_z @ weighted
    trace = zeta_grid.integrate(4.0 * ind_z.sum(axis=0) * zeta.values)
    for out_grid in (zeta_grid, Grid.uniform(UNIT, 600)):
        curve = embedded_density_exact(op, zeta, out_grid)
        ind_out = basis_matrix(spec, out_grid.points) ** 2 / 4.0
        expected = (16.0 / trace) * (q @ ind_out)
        assert np.max(np.abs(curve.values - expected)) <= 1e-12


def test_map_embedding_single_bin_samples():
    # all samples inside one Haar bin: the estimate is the flat density of
    # that bin, exactly 4 inside and 0 outside, with no quadrature at all
    spec = BasisSpec("haar", 2, UNIT)
    op = EmbeddingOperator.projection(spec)
    samples = SampleSet(np.array([1.01, 1.05, 1.2, 1.24]))
    grid = Grid.uniform(UNIT, 300)
    curve = embedded_density_map(op, samples, grid)
    inside = (grid.points >= 1.0) & (grid.points < 1.25)
    assert np.all(curve.values[inside] == 4.0)
    assert np.all(curve.values[~inside] == 0.0)


def test_map_embedding_matches_histogram():
    spec = BasisSpec("haar", 3, UNIT)
    op = EmbeddingOperator.projection(spec)
    target = BetaTarget(2.0, 5.0, UNIT)
    samples = target.sample(500, seed=11)
    grid = Grid.uniform(UNIT, 1000)
    curve = embedded_density_map(op, samples, grid)
    counts, _ = np.histogram(samples.points, bins=np.linspace(0.0, 3.0, 25))
    hist = counts / (samples.n * 0.125)
    idx = np.minimum((grid.points * 8.0).astype(int), 23)
    assert np.max(np.abs(curve.values[:-1] - hist[idx[:-1]])) <= 1e-12
    # the right domain endpoint sits outside every half-open bin
    assert curve.values[-1] == 0.0


def test_map_embedding_single_sample_has_unit_mass():
    # integral of K(S, .)^2 equals the kernel diagonal at S, so one sample
    # already produces a normalized curve up to quadrature error
    spec = BasisSpec("daubechies4", 2, UNIT)
    op = EmbeddingOperator.projection(spec)
    grid = Grid.uniform(spec.span(), 4 * 4096)
    curve = embedded_density_map(op, SampleSet(np.array([1.3])), grid)
    assert abs(curve.mass() - 1.0) <= 1e-4


def test_map_embedding_rejects_bad_samples():
    spec = BasisSpec("haar", 1, UNIT)
    op = EmbeddingOperator.projection(spec)
    grid = Grid.uniform(UNIT, 50)
    with pytest.raises(ValueError, match="empty"):
        embedded_density_map(op, SampleSet(np.array([])), grid)
    noisy = SampleSet(np.array([1.0]), noise=GaussianNoise(0.4, UNIT))
    with pytest.raises(ValueError, match="non-noisy"):
        embedded_density_map(op, noisy, grid)


# ------------------------------------------------------- normalized ratio


def test_ratio_with_constant_diagonal_preserves_shape():
    # Haar diagonals are flat, so dividing and renormalizing must return
    # the input shape normalized to unit mass, bit for bit
    spec = BasisSpec("haar", 2, UNIT)
    op = EmbeddingOperator.projection(spec)
    grid = Grid.uniform(UNIT, 2048)
    target = BetaTarget(2.0, 5.0, UNIT)
    curve = DensityCurve(grid, target.density(grid.points))
    ratio = normalized_ratio(curve, op)
    assert np.array_equal(ratio.values, curve.values / curve.mass())


def test_ratio_of_the_diagonal_is_flat():
    spec = BasisSpec("daubechies4", 2, UNIT)
    op = EmbeddingOperator.projection(spec)
    grid = Grid.uniform(spec.span(), 4096)
    diag = kernel_diag(op, grid.points)
    ratio = normalized_ratio(DensityCurve(grid, diag), op)
    live = diag > 1e-8 * float(np.max(diag))
    assert np.ptp(ratio.values[live]) == 0.0
    assert np.all(ratio.values[~live] == 0.0)
    assert_allclose(ratio.mass(), 1.0, rtol=0, atol=1e-12)


def test_ratio_error_paths():
    spec = BasisSpec("haar", 0, Interval(0.0, 1.0))
    op = EmbeddingOperator.projection(spec)
    # curve mass sits entirely where the diagonal vanishes
    grid = Grid.uniform(Interval(0.0, 2.0), 200)
    vals = np.where(grid.points >= 1.5, 2.0, 0.0)
    with pytest.raises(ValueError, match="zero mass"):
        normalized_ratio(DensityCurve(grid, vals), op)
    # grid entirely outside the diagonal support
    far = Grid.uniform(Interval(1.5, 2.0), 50)
    with pytest.raises(ValueError, match="vanishes"):
        normalized_ratio(DensityCurve(far, np.full(51, 2.0)), op)
