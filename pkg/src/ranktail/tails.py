"""Empirical CCDFs and power-law tail fitting.

The CCDF uses the strict greater-than convention: each point is
(x, fraction of all samples strictly greater than x).  Exponents are the
*cumulative* ones (CCDF slope), estimated by the continuous maximum
likelihood estimator over the tail x >= x_min; the log-log intercept is
fit afterwards with the slope pinned to the estimate.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np


class InsufficientTailError(ValueError):
    """Too few samples at or above the tail threshold."""

    def __init__(self, tail_count: int, needed: int = 10):
        super().__init__(f"only {tail_count} tail samples (need >= {needed})")
        self.tail_count = tail_count


@dataclass(frozen=True)
class CcdfSeries:
    """Empirical tail fractions P(X > x) at the distinct positive values."""

    xs: np.ndarray
    fractions: np.ndarray
    source_count: int

    def __post_init__(self):
        self.xs.setflags(write=False)
        self.fractions.setflags(write=False)


@dataclass(frozen=True)
class TailFit:
    """Fitted cumulative power law: log10 P(X > x) ~ -alpha_hat*log10 x + intercept
    over x >= x_min."""

    alpha_hat: float
    x_min: float
    intercept: float
    tail_count: int

    def to_dict(self) -> dict:
        return {"alpha": self.alpha_hat, "x_min": self.x_min,
                "intercept": self.intercept, "tail_count": self.tail_count}


def ccdf(values) -> CcdfSeries:
    """Empirical CCDF of non-negative data.

    Zeros count in the denominator but produce no point (log-log plots);
    the trailing zero-fraction point at the maximum is omitted.
    """
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        raise ValueError("empty input")
    if (v < 0).any():
        raise ValueError("values must be non-negative")
    pos = np.sort(v[v > 0])
    if pos.size == 0:
        raise ValueError("all values are zero; CCDF undefined on log-log axes")
    n = v.size
    xs, counts = np.unique(pos, return_counts=True)
    greater = pos.size - np.cumsum(counts)
    fractions = greater / n
    keep = greater > 0
    if not keep.any():
        warnings.warn("degenerate CCDF: single distinct value, no plottable points")
    return CcdfSeries(xs=xs[keep], fractions=fractions[keep], source_count=n)


def decimate_ccdf(series: CcdfSeries, max_points: int = 4096) -> CcdfSeries:
    """Thin a CCDF to at most max_points log-spaced x positions."""
    if series.xs.size <= max_points:
        return series
    grid = np.geomspace(series.xs[0], series.xs[-1], max_points)
    idx = np.unique(np.searchsorted(series.xs, grid, side="left").clip(0, series.xs.size - 1))
    return CcdfSeries(xs=series.xs[idx], fractions=series.fractions[idx],
                      source_count=series.source_count)


def write_ccdf_csv(series: CcdfSeries, dest) -> None:
    own = not hasattr(dest, "write")
    stream = open(dest, "w", newline="", encoding="utf-8") if own else dest
    try:
        writer = csv.writer(stream)
        writer.writerow(["x", "ccdf"])
        for x, f in zip(series.xs, series.fractions):
            writer.writerow([repr(float(x)), repr(float(f))])
    finally:
        if own:
            stream.close()


def fit_exponent_mle(values, x_min: float) -> TailFit:
    """Continuous MLE of the cumulative exponent over samples >= x_min.

    The density exponent estimate is 1 + n_tail / sum(ln(x_i/x_min)); the
    cumulative exponent is that minus 1.  The intercept is least squares on
    the log10 CCDF points at x >= x_min with the slope fixed at -alpha_hat.
    """
    if x_min <= 0:
        raise ValueError("x_min must be positive")
    v = np.asarray(values, dtype=float).ravel()
    tail = v[v >= x_min]
    if tail.size < 10:
        raise InsufficientTailError(int(tail.size))
    log_sum = np.log(tail / x_min).sum()
    if log_sum <= 0:
        raise ValueError("tail has no spread above x_min; exponent undefined")
    alpha_hat = tail.size / log_sum  # = (density exponent) - 1
    series = ccdf(v)
    mask = series.xs >= x_min
    if not mask.any():
        raise ValueError("no CCDF points at or above x_min")
    intercept = float(np.mean(np.log10(series.fractions[mask])
                              + alpha_hat * np.log10(series.xs[mask])))
    return TailFit(alpha_hat=float(alpha_hat), x_min=float(x_min),
                   intercept=intercept, tail_count=int(tail.size))


def choose_xmin(values) -> float:
    """Default tail threshold: smallest distinct value exceeded by between
    1% and 10% of the samples.  Falls back to the median (with a warning)
    when no value qualifies, e.g. for (near-)constant data."""
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        raise ValueError("empty input")
    pos = np.sort(v[v > 0])
    n = v.size
    if pos.size:
        xs, counts = np.unique(pos, return_counts=True)
        frac_greater = (pos.size - np.cumsum(counts)) / n
        ok = (frac_greater >= 0.01) & (frac_greater <= 0.10)
        if ok.any():
            return float(xs[np.argmax(ok)])
    warnings.warn("degenerate data for x_min heuristic; falling back to the median")
    return float(np.median(v))
