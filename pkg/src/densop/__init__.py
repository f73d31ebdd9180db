"""Bayesian density learning with density operators and wavelet embeddings.

The package splits into small modules: `discrete` for exact
finite-dimensional states and measurements, `basis` for scaling-function
families on an interval, `embedding` for weighted basis embeddings and
their squared kernel, `learn` for the posterior functionals and the
kernel-trick MAP estimator, `target` for the beta target and its seeded
sampler, and `cli`/`config`/`oracles` for the deterministic command-line
experiments.
"""

from .basis import (
    BasisSpec,
    DAUB4_TAPS,
    Grid,
    Interval,
    basis_matrix,
    eval_father,
    gram_check,
    scaling_values_daub4,
    wavelet_approximation,
)
from .config import ExperimentConfig, load_config, parse_config
from .discrete import (
    DensityMatrix,
    DiscreteDistribution,
    UnitaryBasis,
    WaveFunction,
    born_probability,
    change_basis,
    ensemble_from_distribution,
    probability_from_coefficients,
    wavefunction_from_distribution,
)
from .embedding import (
    EmbeddingOperator,
    kernel_diag,
    kernel_eval,
    kernel_matrix,
    trace_k_map,
    trace_k_rho,
)
from .learn import (
    DensityCurve,
    GaussianNoise,
    MapCoefficients,
    SampleSet,
    embedded_density_exact,
    embedded_density_map,
    homogeneous_log_prior,
    log_posterior_coefficients,
    log_posterior_discrete,
    log_posterior_position,
    map_coefficients,
    normalized_ratio,
    quadratic_penalty_log_prior,
)
from .target import (
    BetaTarget,
    load_samples,
    regularized_incomplete_beta,
    save_samples,
)

__version__ = "0.1.0"

__all__ = [
    "BasisSpec",
    "BetaTarget",
    "DAUB4_TAPS",
    "DensityCurve",
    "DensityMatrix",
    "DiscreteDistribution",
    "EmbeddingOperator",
    "ExperimentConfig",
    "GaussianNoise",
    "Grid",
    "Interval",
    "MapCoefficients",
    "SampleSet",
    "UnitaryBasis",
    "WaveFunction",
    "basis_matrix",
    "born_probability",
    "change_basis",
    "embedded_density_exact",
    "embedded_density_map",
    "ensemble_from_distribution",
    "eval_father",
    "gram_check",
    "homogeneous_log_prior",
    "kernel_diag",
    "kernel_eval",
    "kernel_matrix",
    "load_config",
    "load_samples",
    "log_posterior_coefficients",
    "log_posterior_discrete",
    "log_posterior_position",
    "map_coefficients",
    "normalized_ratio",
    "parse_config",
    "probability_from_coefficients",
    "quadratic_penalty_log_prior",
    "regularized_incomplete_beta",
    "save_samples",
    "scaling_values_daub4",
    "trace_k_map",
    "trace_k_rho",
    "wavefunction_from_distribution",
    "wavelet_approximation",
]
