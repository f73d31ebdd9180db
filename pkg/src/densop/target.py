"""Beta target density on an interval and a deterministic seeded sampler.

The incomplete beta function and its quantile are implemented here rather
than pulled from a statistics package so that sampled streams are
bit-reproducible from (seed, n) alone: a log-gamma front factor, the Lentz
continued fraction for the regularized incomplete beta, and a fixed-count
bisection for the quantile. The uniform stream is numpy's PCG64 generator,
whose output for a given seed is stable under numpy's random-stream
compatibility policy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import Interval
from .learn import SampleSet

_FPMIN = 1e-300
_CF_EPS = 1e-15
_CF_MAX_ITER = 300
_BISECT_ITER = 60


def _log_beta(a: float, b: float) -> float:
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def _betacf(a: float, b: float, x: np.ndarray) -> np.ndarray:
    """Continued fraction for the incomplete beta (modified Lentz).

    Vectorized over x; lanes freeze once their increment is within
    _CF_EPS of 1, so converged entries stop changing and the result is
    independent of how many extra iterations the slowest lane needs.
    """
    x = np.asarray(x, dtype=float)
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    np.copyto(d, _FPMIN, where=np.abs(d) < _FPMIN)
    d = 1.0 / d
    h = d.copy()
    done = np.zeros(x.shape, dtype=bool)
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        np.copyto(d, _FPMIN, where=np.abs(d) < _FPMIN)
        c = 1.0 + aa / c
        np.copyto(c, _FPMIN, where=np.abs(c) < _FPMIN)
        d = 1.0 / d
        h = np.where(done, h, h * d * c)
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        np.copyto(d, _FPMIN, where=np.abs(d) < _FPMIN)
        c = 1.0 + aa / c
        np.copyto(c, _FPMIN, where=np.abs(c) < _FPMIN)
        d = 1.0 / d
        delta = d * c
        h = np.where(done, h, h * delta)
        done |= np.abs(delta - 1.0) < _CF_EPS
        if bool(done.all()):
            break
    return h


def regularized_incomplete_beta(x, a: float, b: float):
    """I_x(a, b), the regularized incomplete beta function, vectorized in x.

    Uses the continued fraction directly for x below the crossover point
    (a + 1) / (a + b + 2) and the symmetry I_x(a,b) = 1 - I_{1-x}(b,a)
    above it, which keeps the fraction in its fast-converging regime.
    """
    if a <= 0 or b <= 0:
        raise ValueError(f"need a > 0 and b > 0, got a={a}, b={b}")
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x).astype(float)
    if np.any((x < 0) | (x > 1)):
        raise ValueError("x must lie in [0, 1]")
    out = np.empty_like(x)
    lo_edge = x == 0.0
    hi_edge = x == 1.0
    out[lo_edge] = 0.0
    out[hi_edge] = 1.0
    mid = ~(lo_edge | hi_edge)
    if np.any(mid):
        xm = x[mid]
        log_bt = a * np.log(xm) + b * np.log1p(-xm) - _log_beta(a, b)
        bt = np.exp(log_bt)
        direct = xm < (a + 1.0) / (a + b + 2.0)
        res = np.empty_like(xm)
        if np.any(direct):
            xd = xm[direct]
            res[direct] = bt[direct] * _betacf(a, b, xd) / a
        if np.any(~direct):
            xs = xm[~direct]
            res[~direct] = 1.0 - bt[~direct] * _betacf(b, a, 1.0 - xs) / b
        out[mid] = res
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class BetaTarget:
    """Beta(a, b) density rescaled from [0, 1] onto an interval."""

    a: float
    b: float
    interval: Interval

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError(
                f"beta parameters must be positive, got a={self.a}, b={self.b}"
            )

    def density(self, s):
        """Density value at s; 0 outside the interval.

        At an endpoint the one-sided limit is returned, which is infinite
        when the corresponding shape parameter is below 1.
        """
        s = np.asarray(s, dtype=float)
        scalar = s.ndim == 0
        s = np.atleast_1d(s).astype(float)
        lo, width = self.interval.lo, self.interval.width
        x = (s - lo) / width
        out = np.zeros_like(x)
        log_norm = _log_beta(self.a, self.b) + math.log(width)
        inside = (x > 0.0) & (x < 1.0)
        if np.any(inside):
            xi = x[inside]
            out[inside] = np.exp(
                (self.a - 1.0) * np.log(xi)
                + (self.b - 1.0) * np.log1p(-xi)
                - log_norm
            )
        out[x == 0.0] = self._edge_value(self.a, self.b)
        out[x == 1.0] = self._edge_value(self.b, self.a)
        return float(out[0]) if scalar else out

    def _edge_value(self, shape_here: float, shape_other: float) -> float:
        if shape_here > 1.0:
            return 0.0
        if shape_here == 1.0:
            return math.exp(-_log_beta(self.a, self.b)) / self.interval.width
        return math.inf

    def cdf(self, s):
        s = np.asarray(s, dtype=float)
        x = (s - self.interval.lo) / self.interval.width
        return regularized_incomplete_beta(np.clip(x, 0.0, 1.0), self.a, self.b)

    def quantile(self, u):
        """Inverse CDF by bisection, accurate to about 1e-12 in s.

        The bisection interval halves deterministically, so _BISECT_ITER
        iterations pin the root to width / 2**_BISECT_ITER regardless of
        the data.
        """
        u = np.asarray(u, dtype=float)
        scalar = u.ndim == 0
        u = np.atleast_1d(u).astype(float)
        if np.any((u < 0) | (u > 1)):
            raise ValueError("u must lie in [0, 1]")
        lo = np.zeros_like(u)
        hi = np.ones_like(u)
        for _ in range(_BISECT_ITER):
            mid = 0.5 * (lo + hi)
            below = regularized_incomplete_beta(mid, self.a, self.b) < u
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        x = 0.5 * (lo + hi)
        out = self.interval.lo + self.interval.width * x
        return float(out[0]) if scalar else out

    def sample(self, n: int, seed: int) -> SampleSet:
        """n points by inverse-CDF from a PCG64 uniform stream.

        Deterministic given (n, seed). Samples are clipped to lie strictly
        inside the interval so every downstream half-open convention sees
        them unambiguously.
        """
        if n < 1:
            raise ValueError(f"need n >= 1, got {n}")
        if seed < 0:
            raise ValueError(f"seed must be unsigned, got {seed}")
        rng = np.random.Generator(np.random.PCG64(seed))
        u = rng.random(n)
        s = self.quantile(u)
        s = np.clip(
            s,
            np.nextafter(self.interval.lo, self.interval.hi),
            np.nextafter(self.interval.hi, self.interval.lo),
        )
        return SampleSet(points=s, seed=seed, noise=None)


def save_samples(path, samples) -> None:
    """Write sample points one per line at full precision."""
    points = np.asarray(getattr(samples, "points", samples), dtype=float)
    with open(path, "w") as fh:
        for value in points:
            fh.write(f"{value:.17g}\n")


def load_samples(path) -> SampleSet:
    """Read a one-column sample file written by save_samples.

    Blank lines are ignored. A malformed line raises ValueError naming the
    line number. The returned set carries no seed provenance.
    """
    points = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                points.append(float(text))
            except ValueError:
                raise ValueError(
                    f"{path}: line {lineno}: could not parse {text!r}"
                ) from None
    return SampleSet(points=np.asarray(points, dtype=float), seed=None)
