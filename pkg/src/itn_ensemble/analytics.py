"""Descriptive statistics for comparing real and simulated trade networks.

Log-scale tables exclude zeros and report them as a separate count.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DataError, TradeSnapshot

USD_PER_MILLION = 1e6
DEFAULT_FLOOR_USD = 1000.0


@dataclass(frozen=True)
class GlobalIndicators:
    year: int
    N: int
    X: float
    T: float


@dataclass(frozen=True, eq=False)
class BinnedCurve:
    bin_lo: np.ndarray
    bin_hi: np.ndarray
    mean_x: np.ndarray  # NaN in empty bins
    mean_y: np.ndarray
    count: np.ndarray


@dataclass(frozen=True, eq=False)
class LogHistogram:
    bin_lo: np.ndarray
    bin_hi: np.ndarray
    density: np.ndarray
    count: np.ndarray
    zero_count: int
    total: int


def global_series(snapshots) -> list[GlobalIndicators]:
    """Country count, world GDP and world trade per snapshot, sorted by year."""
    if not snapshots:
        raise DataError("no snapshots")
    return [
        GlobalIndicators(s.year, s.n, float(s.gdp.sum()), float(s.weights.sum()))
        for s in sorted(snapshots, key=lambda s: s.year)
    ]


def log_bin_edges(lo: float, hi: float, bins_per_decade: int) -> np.ndarray:
    """Geometric edges starting at ``lo`` with ratio ``10**(1/bins_per_decade)``,
    extended until they cover ``hi``."""
    if bins_per_decade < 1:
        raise DataError("bins_per_decade must be >= 1")
    if not lo > 0:
        raise DataError("log bins need positive values")
    n_bins = max(1, math.ceil(math.log10(hi / lo) * bins_per_decade - 1e-12))
    edges = lo * 10.0 ** (np.arange(n_bins + 1) / bins_per_decade)
    if edges[-1] < hi:
        edges[-1] = hi
    return edges


def _bin_index(values, edges):
    idx = np.searchsorted(edges, values, side="right") - 1
    return np.clip(idx, 0, len(edges) - 2)


def log_binned_curve(points, bins_per_decade: int = 5) -> BinnedCurve:
    """Arithmetic means of ``x`` and ``y`` in logarithmic bins of ``x``."""
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        raise DataError("no points to bin")
    pts = pts.reshape(-1, 2)
    # canonical order makes the floating-point sums independent of input order
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]
    x, y = pts[:, 0], pts[:, 1]
    if np.any(~(x > 0)):
        raise DataError("x values must be positive for logarithmic binning")
    edges = log_bin_edges(x.min(), x.max(), bins_per_decade)
    idx = _bin_index(x, edges)
    nb = len(edges) - 1
    count = np.bincount(idx, minlength=nb)
    with np.errstate(invalid="ignore", divide="ignore"):
        mean_x = np.bincount(idx, weights=x, minlength=nb) / count
        mean_y = np.bincount(idx, weights=y, minlength=nb) / count
    return BinnedCurve(edges[:-1], edges[1:], mean_x, mean_y, count)


def weight_distribution(weights, bins_per_decade: int = 10) -> LogHistogram:
    """Log-binned probability density of nonnegative weights.

    Densities are normalized by the total count including zeros, so they
    integrate to the fraction of positive weights.
    """
    w = np.asarray(weights, dtype=float).ravel()
    if w.size == 0:
        raise DataError("no weights")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise DataError("weights must be finite and nonnegative")
    pos = w[w > 0]
    zeros = int(w.size - pos.size)
    if pos.size == 0:
        empty = np.empty(0)
        return LogHistogram(empty, empty, empty, np.empty(0, dtype=int), zeros, int(w.size))
    edges = log_bin_edges(pos.min(), pos.max(), bins_per_decade)
    count = np.bincount(_bin_index(pos, edges), minlength=len(edges) - 1)
    density = count / (np.diff(edges) * w.size)
    return LogHistogram(edges[:-1], edges[1:], density, count, zeros, int(w.size))


def censor_below_threshold(weights, floor_usd: float = DEFAULT_FLOOR_USD) -> np.ndarray:
    """Zero every flow below ``floor_usd`` (plain USD; weights are in millions)."""
    if floor_usd < 0:
        raise DataError("censoring floor must be >= 0")
    w = np.asarray(weights, dtype=float)
    return np.where(w < floor_usd / USD_PER_MILLION, 0.0, w)


def ks_distance(sample_a, sample_b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic ``sup |F_a - F_b|``."""
    a = np.sort(np.asarray(sample_a, dtype=float).ravel())
    b = np.sort(np.asarray(sample_b, dtype=float).ravel())
    if a.size == 0 or b.size == 0:
        raise DataError("KS distance needs two nonempty samples")
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.abs(fa - fb).max())


def ks_critical_value(n: int, m: int, alpha: float = 0.01) -> float:
    """Asymptotic two-sample critical value ``c(alpha) sqrt((n + m) / (n m))``."""
    c = math.sqrt(-0.5 * math.log(alpha / 2))
    return c * math.sqrt((n + m) / (n * m))


def scatter_points(snapshot_or_gdp, weights=None) -> np.ndarray:
    """``(x_i x_j, w_ij)`` for every ordered pair with a positive flow."""
    if isinstance(snapshot_or_gdp, TradeSnapshot):
        x, w = snapshot_or_gdp.gdp, snapshot_or_gdp.weights
    else:
        x, w = np.asarray(snapshot_or_gdp, dtype=float), np.asarray(weights, dtype=float)
    prod = np.outer(x, x)
    mask = (w > 0) & ~np.eye(len(x), dtype=bool)
    return np.column_stack([prod[mask], w[mask]])
