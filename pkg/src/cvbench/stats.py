"""Correlation estimation with confidence intervals, and CM-level predictions.

``corr_coeff`` is the frame-averaged second-order correlation coefficient of
two intensity series. ``cm_to_intensity_corr`` predicts the same quantity
analytically from a covariance matrix, which the Monte Carlo tests use as a
cross-module oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .states import GaussianState

__all__ = [
    "CorrelationEstimate",
    "corr_coeff",
    "confidence_interval",
    "cm_to_intensity_corr",
]


@dataclass(frozen=True)
class CorrelationEstimate:
    """Estimated correlation with its confidence interval, all within [-1, 1]."""

    c: float
    n_frames: int
    ci_low: float
    ci_high: float
    level: float

    def __post_init__(self) -> None:
        if not -1.0 <= self.ci_low <= self.c <= self.ci_high <= 1.0:
            raise ValueError(
                f"interval [{self.ci_low}, {self.ci_high}] must contain c={self.c} "
                "and stay within [-1, 1]"
            )


def _fsum(values: np.ndarray) -> float:
    # error-free accumulation; series reach 1e5-1e6 squared intensities
    return math.fsum(values.tolist())


def corr_coeff(series_h, series_k) -> float:
    """Pearson correlation of two equal-length frame series, clamped to [-1, 1].

    Sums are compensated, so 1e5+ frame accumulations do not lose precision.
    """
    h = np.asarray(series_h, dtype=float)
    k = np.asarray(series_k, dtype=float)
    if h.ndim != 1 or h.shape != k.shape:
        raise ValueError("series must be one-dimensional and of equal length")
    n = h.size
    if n < 2:
        raise ValueError("need at least two frames")
    dh = h - _fsum(h) / n
    dk = k - _fsum(k) / n
    var_h = _fsum(dh * dh)
    var_k = _fsum(dk * dk)
    if var_h <= 0.0 or var_k <= 0.0:
        raise ValueError("correlation undefined: a series has zero variance")
    c = _fsum(dh * dk) / math.sqrt(var_h * var_k)
    return min(1.0, max(-1.0, c))


def _fisher_z_interval(c: float, n_frames: int, level: float) -> CorrelationEstimate:
    if 1.0 - abs(c) <= 1e-15:
        return CorrelationEstimate(c, n_frames, c, c, level)
    z_crit = float(norm.ppf(0.5 + level / 2.0))
    half = z_crit / math.sqrt(n_frames - 3.0)
    z = math.atanh(c)
    lo = max(-1.0, math.tanh(z - half))
    hi = min(1.0, math.tanh(z + half))
    return CorrelationEstimate(c, n_frames, lo, hi, level)


#: interval constructions by name; register here to plug in another method
CI_METHODS = {"fisher-z": _fisher_z_interval}


def confidence_interval(
    c: float, n_frames: int, level: float = 0.99, method: str = "fisher-z"
) -> CorrelationEstimate:
    """Confidence interval for a correlation, clamped to [-1, 1].

    The default is the Fisher z-transform interval; |c| = 1 gives the
    degenerate interval [c, c], and the width shrinks like 1/sqrt(n_frames).
    Alternative constructions (e.g. a bounded-Bayesian one) can be registered
    in ``CI_METHODS``.
    """
    if not -1.0 <= c <= 1.0:
        raise ValueError(f"correlation must lie in [-1, 1], got {c!r}")
    if n_frames < 4:
        raise ValueError(f"need at least 4 frames, got {n_frames!r}")
    if not 0.0 < level < 1.0:
        raise ValueError(f"confidence level must lie in (0, 1), got {level!r}")
    try:
        build = CI_METHODS[method]
    except KeyError:
        raise ValueError(f"unknown CI method {method!r}; registered: {sorted(CI_METHODS)}") from None
    return build(c, n_frames, level)


def _ladder_moments(cm: np.ndarray, h: int, k: int) -> tuple[complex, complex]:
    # <a_h^dag a_k> and <a_h a_k> read off the quadrature covariances,
    # a = (x + i p)/sqrt(2); for h == k the commutator shifts the first by 1/2
    xh, ph = 2 * h, 2 * h + 1
    xk, pk = 2 * k, 2 * k + 1
    cross = complex(
        (cm[xh, xk] + cm[ph, pk]) / 2.0,
        (cm[xh, pk] - cm[ph, xk]) / 2.0,
    )
    pair = complex(
        (cm[xh, xk] - cm[ph, pk]) / 2.0,
        (cm[xh, pk] + cm[ph, xk]) / 2.0,
    )
    if h == k:
        cross -= 0.5
    return cross, pair


def cm_to_intensity_corr(
    state: GaussianState, mode_h: int, mode_k: int, shot_noise: bool = False
) -> float:
    """Intensity correlation coefficient between two modes of a Gaussian state.

    For zero-mean Gaussian fields the intensity covariance is
    |<a_h^dag a_k>|^2 + |<a_h a_k>|^2 and the intensity variance of a mode is
    n^2 + |<a a>|^2, plus a shot term n when ``shot_noise`` is set. The
    default matches analog detection of bright fields (no shot term) and is
    what the speckle bench realizes; the value is independent of how many
    equal-intensity copies of the modes a detector collects.
    """
    n_modes = state.n_modes
    if not (0 <= mode_h < n_modes and 0 <= mode_k < n_modes):
        raise IndexError("mode index out of range")
    if mode_h == mode_k:
        raise ValueError("intensity correlation needs two distinct modes")
    cm = state.cm
    n_h, pair_h = _ladder_moments(cm, mode_h, mode_h)
    n_k, pair_k = _ladder_moments(cm, mode_k, mode_k)
    n_h, n_k = n_h.real, n_k.real
    if n_h <= 0.0 or n_k <= 0.0:
        raise ValueError("intensity correlation undefined for a mode with zero mean photons")
    cross, pair = _ladder_moments(cm, mode_h, mode_k)
    cov = abs(cross) ** 2 + abs(pair) ** 2
    var_h = n_h**2 + abs(pair_h) ** 2
    var_k = n_k**2 + abs(pair_k) ** 2
    if shot_noise:
        var_h += n_h
        var_k += n_k
    c = cov / math.sqrt(var_h * var_k)
    return min(1.0, max(-1.0, c))
