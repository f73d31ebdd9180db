"""Weighted basis embeddings and their squared kernel.

An embedding operator is a nonnegative combination A = sum_j alpha_j
|psi_j><psi_j| over an active subset of basis translates. Everything
downstream only ever needs the kernel K(s, t) = sum_j alpha_j^2
psi_j(s) psi_j(t) and its diagonal, so the embedded states themselves are
never materialized. The projection case (all weights 1) is the one used by
the experiment commands.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .basis import BasisSpec, Grid, basis_matrix, eval_father

# Cross-kernel matrices are built in fixed-size row blocks so peak memory
# stays bounded and the reduction order never depends on input size.
_BLOCK = 512


@dataclass(frozen=True)
class EmbeddingOperator:
    """A = sum over active translates of weight_j |psi_j><psi_j|."""

    basis: BasisSpec
    active: tuple
    weights: np.ndarray

    def __post_init__(self):
        active = tuple(int(k) for k in self.active)
        w = np.ascontiguousarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size != len(active):
            raise ValueError(
                f"need one weight per active translate, got {w.size} "
                f"weights for {len(active)} translates"
            )
        if w.size == 0:
            raise ValueError("active set must be nonempty")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        if not np.any(w > 0):
            raise ValueError("weights must not all be zero")
        k_min, k_max = self.basis.translate_range
        for k in active:
            if not k_min <= k <= k_max:
                raise ValueError(
                    f"translate {k} outside basis range [{k_min}, {k_max}]"
                )
        w.flags.writeable = False
        object.__setattr__(self, "active", active)
        object.__setattr__(self, "weights", w)

    @classmethod
    def projection(cls, basis: BasisSpec) -> "EmbeddingOperator":
        """Orthogonal projection onto the full family (all weights 1)."""
        ks = tuple(int(k) for k in basis.translates)
        return cls(basis, ks, np.ones(len(ks)))

    @property
    def is_projection(self) -> bool:
        return bool(np.all(self.weights == 1.0))

    def _basis_rows(self, s_values) -> np.ndarray:
        s_values = np.asarray(s_values, dtype=float)
        if self.active == tuple(int(k) for k in self.basis.translates):
            return basis_matrix(self.basis, s_values)
        out = np.empty((len(self.active), s_values.size))
        for row, k in enumerate(self.active):
            out[row] = eval_father(self.basis, k, s_values)
        return out


def kernel_eval(A: EmbeddingOperator, s, t):
    """K(s, t) = sum_j alpha_j^2 psi_j(s) psi_j(t), elementwise in (s, t)."""
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    scalar = s.ndim == 0 and t.ndim == 0
    s, t = np.broadcast_arrays(np.atleast_1d(s), np.atleast_1d(t))
    bs = A._basis_rows(s.ravel())
    bt = A._basis_rows(t.ravel())
    w2 = A.weights ** 2
    out = np.einsum("j,jp,jp->p", w2, bs, bt).reshape(s.shape)
    return float(out.ravel()[0]) if scalar else out


def kernel_diag(A: EmbeddingOperator, s):
    """K(s, s) = sum_j alpha_j^2 psi_j(s)^2, always >= 0."""
    s = np.asarray(s, dtype=float)
    scalar = s.ndim == 0
    b = A._basis_rows(np.atleast_1d(s).ravel())
    out = ((A.weights ** 2)[:, None] * b * b).sum(axis=0)
    out = out.reshape(np.atleast_1d(s).shape)
    return float(out.ravel()[0]) if scalar else out


def kernel_matrix(A: EmbeddingOperator, s_values, t_values) -> np.ndarray:
    """Cross matrix K(s_a, t_b) for point vectors, built in row blocks."""
    s_values = np.asarray(s_values, dtype=float).ravel()
    t_values = np.asarray(t_values, dtype=float).ravel()
    w2 = A.weights ** 2
    bt = A._basis_rows(t_values)
    out = np.empty((s_values.size, t_values.size))
    for start in range(0, s_values.size, _BLOCK):
        stop = min(start + _BLOCK, s_values.size)
        bs = A._basis_rows(s_values[start:stop])
        out[start:stop] = (bs * w2[:, None]).T @ bt
    return out


def trace_k_rho(A: EmbeddingOperator, zeta_values, grid: Grid) -> float:
    """tr(A rho A*) for the density with position diagonal zeta.

    Equals the quadrature of zeta(s) K(s, s) on the grid. Raises if zeta is
    not a valid density on the grid or if the result vanishes, which means
    the density lives in the kernel of A and no embedded density exists.
    """
    zeta_values = np.asarray(zeta_values, dtype=float)
    if zeta_values.shape != grid.points.shape:
        raise ValueError(
            f"zeta shape {zeta_values.shape} does not match grid "
            f"({grid.points.shape})"
        )
    if np.any(zeta_values < 0):
        raise ValueError("zeta must be nonnegative")
    mass = grid.integrate(zeta_values)
    if abs(mass - 1.0) > 1e-6:
        raise ValueError(
            f"zeta quadrature mass {mass:.9f} is not 1 within 1e-6"
        )
    value = grid.integrate(zeta_values * kernel_diag(A, grid.points))
    if value <= 1e-14:
        raise ValueError(
            "density is supported in the kernel of the embedding operator"
        )
    return float(value)


def trace_k_map(A: EmbeddingOperator, samples) -> float:
    """Mean of K(S_i, S_i) over a sample set.

    `samples` may be a SampleSet or any array of sample points; only the
    points are used.
    """
    points = np.asarray(getattr(samples, "points", samples), dtype=float)
    if points.size == 0:
        raise ValueError("empty sample set")
    return float(np.mean(kernel_diag(A, points.ravel())))
