"""Weighted directed ensemble with exponentially distributed bilateral flows.

Each directed flow ``w_ij`` is an independent exponential variable with rate
``theta_ij = theta_i theta_j = 1 / (T xi_i xi_j)``, so the model is fixed
entirely by the GDP shares ``xi`` and the world trade volume ``T``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DataError, RelativeSnapshot, TradeSnapshot


@dataclass(frozen=True, eq=False)
class WeightedModel:
    xi: np.ndarray
    T: float
    codes: tuple[str, ...] | None = None
    year: int | None = None

    def __post_init__(self):
        xi = np.array(self.xi, dtype=float)
        xi.flags.writeable = False
        if xi.ndim != 1 or xi.size < 2:
            raise DataError("a weighted model needs at least two countries")
        if not np.all(np.isfinite(xi)) or np.any(xi <= 0):
            raise DataError("GDP shares must be finite and positive")
        if abs(xi.sum() - 1.0) > 1e-12:
            raise DataError(f"GDP shares must sum to 1, got {xi.sum()!r}")
        if not (math.isfinite(self.T) and self.T > 0):
            raise DataError(f"trade volume must be positive, got {self.T}")
        object.__setattr__(self, "xi", xi)
        if self.codes is not None:
            object.__setattr__(self, "codes", tuple(self.codes))
            if len(self.codes) != xi.size:
                raise DataError("codes and share vector differ in length")

    @property
    def n(self) -> int:
        return self.xi.size

    def log_mean_weights(self) -> np.ndarray:
        """``ln <w_ij> = ln T + ln xi_i + ln xi_j`` (diagonal meaningless)."""
        lxi = np.log(self.xi)
        return math.log(self.T) + lxi[:, None] + lxi[None, :]

    def rates(self) -> np.ndarray:
        """``theta_ij`` with a zero diagonal (self-flows do not exist)."""
        th = np.exp(-self.log_mean_weights())
        np.fill_diagonal(th, 0.0)
        return th


def theta_parameters(model: WeightedModel) -> tuple[np.ndarray, np.ndarray]:
    """Node fields ``theta_i = 1/(sqrt(T) xi_i)`` and pair rates ``theta_i theta_j``.

    The diagonal of the pair matrix is NaN: it is never defined.
    """
    theta_i = 1.0 / (math.sqrt(model.T) * model.xi)
    theta_ij = np.outer(theta_i, theta_i)
    np.fill_diagonal(theta_ij, np.nan)
    return theta_i, theta_ij


def relative_rates(model: WeightedModel) -> np.ndarray:
    """``1 / (xi_i xi_j)``, the rates coupling to flow shares ``v_ij``."""
    th = 1.0 / np.outer(model.xi, model.xi)
    np.fill_diagonal(th, 0.0)
    return th


def expected_weight_matrix(model: WeightedModel) -> np.ndarray:
    w = model.T * np.outer(model.xi, model.xi)
    np.fill_diagonal(w, 0.0)
    return w


def expected_strengths(model: WeightedModel) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    """Expected out/in strengths, both ways.

    ``exact`` sums ``<w_ij>`` over ``j != i``, giving ``T xi_i (1 - xi_i)``;
    ``paper_approx`` is ``T xi_i``, the small-share limit in which a
    country's share of trade equals its share of GDP. Values are in the
    units of ``T``.
    """
    exact = model.T * model.xi * (1.0 - model.xi)
    approx = model.T * model.xi
    return {"exact": (exact, exact.copy()), "paper_approx": (approx, approx.copy())}


def _weights_of(data) -> np.ndarray:
    if isinstance(data, TradeSnapshot):
        return data.weights
    return np.asarray(data, dtype=float)


def weighted_hamiltonian(weights, model: WeightedModel) -> float:
    """``H = sum_{i != j} theta_ij w_ij`` for a snapshot or weight matrix."""
    w = _weights_of(weights)
    if w.shape != (model.n, model.n):
        raise DataError(f"weight matrix shape {w.shape} does not match model size {model.n}")
    return float((model.rates() * w).sum())


def weighted_hamiltonian_relative(v, model: WeightedModel) -> float:
    """``H = sum_{i != j} v_ij / (xi_i xi_j)`` with ``v = w / T``."""
    v = np.asarray(v, dtype=float)
    if v.shape != (model.n, model.n):
        raise DataError(f"share matrix shape {v.shape} does not match model size {model.n}")
    return float((relative_rates(model) * v).sum())


def weighted_log_partition(model: WeightedModel) -> tuple[float, np.ndarray]:
    """Total ``ln Z = -sum_{i != j} ln theta_ij`` and its per-country factors.

    Country ``i`` contributes ``(N - 1) ln(T xi_i^2)``; the factors sum to the
    total because every ordered pair splits its ``ln T`` evenly between its
    two endpoints.
    """
    n = model.n
    lw = model.log_mean_weights()
    off = ~np.eye(n, dtype=bool)
    total = float(lw[off].sum())
    per_country = (n - 1) * (math.log(model.T) + 2.0 * np.log(model.xi))
    return total, per_country


def weight_log_density(w, theta):
    """Log of the exponential density ``theta exp(-theta w)``."""
    w = np.asarray(w, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if np.any(w < 0):
        raise DataError("weights must be nonnegative")
    if np.any(theta <= 0):
        raise DataError("rate must be positive")
    out = np.log(theta) - theta * w
    return float(out) if out.ndim == 0 else out


def build_model_from_snapshot(relative: RelativeSnapshot) -> WeightedModel:
    """Read ``xi`` and ``T`` off the data; no further fitting is involved."""
    if relative.n < 2:
        raise DataError("a weighted model needs at least two countries")
    if np.any(relative.xi <= 0):
        bad = [c for c, s in zip(relative.codes, relative.xi) if s <= 0]
        raise DataError(f"countries with zero GDP share must be dropped first: {bad}")
    return WeightedModel(relative.xi, relative.T, codes=relative.codes, year=relative.year)


def expected_weight_mixture_density(model: WeightedModel, w) -> np.ndarray:
    """Density of a flow drawn from a uniformly chosen ordered pair.

    This is the distribution a single snapshot's off-diagonal weights follow
    when pooled together.
    """
    w = np.atleast_1d(np.asarray(w, dtype=float))
    th = model.rates()[~np.eye(model.n, dtype=bool)]
    return (th[None, :] * np.exp(-np.outer(w, th))).mean(axis=1)
