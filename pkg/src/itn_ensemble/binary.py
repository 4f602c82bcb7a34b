"""Binary GDP-fitness ensemble of undirected trade partnerships.

A pair of countries is linked with probability ``p_ij = d x_i x_j / (1 + d x_i x_j)``,
which is the configuration-model form with node fields
``theta_i = -ln(x_i sqrt(d))``. Everything is computed from the log-odds
``s_ij = ln d + ln x_i + ln x_j`` so that GDP products spanning many orders
of magnitude neither overflow nor lose precision near ``p -> 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .core import BinarySnapshot, CountryRecord, DataError, FitError

MAX_BISECTIONS = 200
FIT_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class BinaryModel:
    x: np.ndarray
    delta: float
    codes: tuple[str, ...] | None = None

    def __post_init__(self):
        x = np.array(self.x, dtype=float)
        x.flags.writeable = False
        if x.ndim != 1 or x.size < 2:
            raise DataError("need a GDP vector with at least two countries")
        if not np.all(np.isfinite(x)) or np.any(x <= 0):
            raise DataError("GDP values must be finite and positive")
        if not (math.isfinite(self.delta) and self.delta > 0):
            raise DataError(f"delta must be finite and positive, got {self.delta}")
        object.__setattr__(self, "x", x)
        if self.codes is not None:
            object.__setattr__(self, "codes", tuple(self.codes))
            if len(self.codes) != x.size:
                raise DataError("codes and GDP vector differ in length")

    @property
    def n(self) -> int:
        return self.x.size

    @property
    def theta(self) -> np.ndarray:
        """Node fields of the equivalent configuration model."""
        return -(np.log(self.x) + 0.5 * math.log(self.delta))

    def log_odds(self) -> np.ndarray:
        """Matrix ``ln(d x_i x_j)``; the diagonal is meaningless."""
        lx = np.log(self.x)
        return math.log(self.delta) + lx[:, None] + lx[None, :]

    def probability_matrix(self) -> np.ndarray:
        p = expit(self.log_odds())
        np.fill_diagonal(p, 0.0)
        return p

    def country_records(self) -> tuple[CountryRecord, ...]:
        codes = self.codes or tuple(f"C{i}" for i in range(self.n))
        return tuple(CountryRecord(c, 0, float(g)) for c, g in zip(codes, self.x))


def _edge_sum(log_x_pairs: np.ndarray, log_delta: float) -> float:
    return float(expit(log_delta + log_x_pairs).sum())


def link_probability(model: BinaryModel, i: int, j: int) -> float:
    if i == j:
        raise DataError("self-links are undefined in a simple graph")
    if not (0 <= i < model.n and 0 <= j < model.n):
        raise IndexError(f"pair ({i}, {j}) out of range for {model.n} countries")
    return float(expit(math.log(model.delta) + math.log(model.x[i]) + math.log(model.x[j])))


def fit_delta(x, L_target: float) -> float:
    """Find ``d`` whose expected number of links equals ``L_target``.

    The expected link count is strictly increasing in ``d``, so bisection on
    ``ln d`` over a bracket grown geometrically from ``d = 1`` always works.
    Raises ``DataError`` if ``L_target`` is outside ``(0, N(N-1)/2)`` and
    ``FitError`` if the residual is not below ``1e-9 * L_target`` after
    200 bisections.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 2 or np.any(~np.isfinite(x)) or np.any(x <= 0):
        raise DataError("GDP values must be a vector of at least two finite positive numbers")
    n = x.size
    n_pairs = n * (n - 1) / 2
    if not (0 < L_target < n_pairs):
        raise DataError(f"L out of range: need 0 < L < {n_pairs:g}, got {L_target}")
    iu = np.triu_indices(n, 1)
    lx = np.log(x)
    pair_logs = (lx[:, None] + lx[None, :])[iu]
    tol = FIT_RTOL * L_target

    def residual(log_d):
        return _edge_sum(pair_logs, log_d) - L_target

    lo = hi = 0.0
    r0 = residual(0.0)
    if abs(r0) <= tol:
        return 1.0
    step = 1.0
    if r0 < 0:
        while residual(hi) < 0:
            lo, hi = hi, hi + step
            step *= 2
            if hi > 1e4:
                raise FitError("could not bracket delta from above")
    else:
        while residual(lo) > 0:
            hi, lo = lo, lo - step
            step *= 2
            if lo < -1e4:
                raise FitError("could not bracket delta from below")

    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        r = residual(mid)
        if abs(r) <= tol:
            return math.exp(mid)
        if r < 0:
            lo = mid
        else:
            hi = mid
    raise FitError(f"delta fit did not converge in {MAX_BISECTIONS} bisections (residual {r:.3e})")


def expected_degrees(model: BinaryModel) -> np.ndarray:
    return model.probability_matrix().sum(axis=1)


def expected_edges(model: BinaryModel) -> float:
    iu = np.triu_indices(model.n, 1)
    return float(expit(model.log_odds()[iu]).sum())


def _check_dims(graph: BinarySnapshot, model: BinaryModel):
    if graph.n != model.n:
        raise DataError(f"graph has {graph.n} nodes, model has {model.n}")


def binary_hamiltonian(graph: BinarySnapshot, model: BinaryModel) -> float:
    """Energy ``-sum_i ln(x_i sqrt(d)) k_i`` of a partnership graph."""
    _check_dims(graph, model)
    return float(np.dot(model.theta, graph.degrees))


def binary_hamiltonian_pairs(graph: BinarySnapshot, model: BinaryModel) -> float:
    """Same energy summed over links, ``sum_{i<j} (theta_i + theta_j) a_ij``."""
    _check_dims(graph, model)
    th = model.theta
    iu = np.triu_indices(model.n, 1)
    return float(((th[:, None] + th[None, :])[iu] * graph.adjacency[iu]).sum())


def binary_log_partition(model: BinaryModel) -> float:
    """``ln Z = sum_{i<j} ln(1 + d x_i x_j)``."""
    iu = np.triu_indices(model.n, 1)
    return float(np.logaddexp(0.0, model.log_odds()[iu]).sum())


def binary_graph_log_probability(graph: BinarySnapshot, model: BinaryModel) -> float:
    _check_dims(graph, model)
    iu = np.triu_indices(model.n, 1)
    s = model.log_odds()[iu]
    a = graph.adjacency[iu]
    # ln p = -ln(1 + e^-s), ln(1 - p) = -ln(1 + e^s)
    return float(-np.where(a, np.logaddexp(0.0, -s), np.logaddexp(0.0, s)).sum())
