"""Linear response of expected trade shares to changes in GDP shares.

Under the weighted model ``<v_ij> = xi_i xi_j``, so

    d<v_ij> / <v_ij> = dxi_i / xi_i + dxi_j / xi_j

to first order, and exactly ``<v'_ij> / <v_ij> = xi'_i xi'_j / (xi_i xi_j)``
between two epochs. The multiplicative form is the operational predictor;
the differential form is reported alongside it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import CountryRecord, DataError, RelativeSnapshot, TradeSnapshot


@dataclass(frozen=True, eq=False)
class RelativeChange:
    differential: np.ndarray
    multiplicative: np.ndarray  # ratio <v'_ij> / <v_ij>, zero diagonal


@dataclass(frozen=True, eq=False)
class ResponsePrediction:
    base_year: int | None
    target_year: int | None
    codes: tuple[str, ...]
    v_base: np.ndarray
    predicted_v: np.ndarray
    relative_change: np.ndarray
    excluded: tuple[str, ...] = ()


@dataclass(frozen=True)
class PredictionReport:
    log_ratio: np.ndarray  # ln(actual / predicted), NaN where not comparable
    relative_error: np.ndarray  # (actual - predicted) / predicted, NaN where not comparable
    median_abs_relative_error: float
    mean_relative_error: float
    fraction_within: float
    tolerance: float
    n_compared: int
    n_zero_actual: int

    def as_dict(self) -> dict:
        return {
            "median_abs_relative_error": self.median_abs_relative_error,
            "mean_relative_error": self.mean_relative_error,
            "fraction_within": self.fraction_within,
            "tolerance": self.tolerance,
            "n_compared": self.n_compared,
            "n_zero_actual": self.n_zero_actual,
        }


def _shares(xi, name):
    xi = np.asarray(xi, dtype=float)
    if xi.ndim != 1:
        raise DataError(f"{name} must be a vector")
    if not np.all(np.isfinite(xi)) or np.any(xi <= 0):
        raise DataError(f"{name} must be strictly positive")
    return xi


def predict_relative_changes(xi_base, xi_next) -> RelativeChange:
    xb = _shares(xi_base, "xi_base")
    xn = _shares(xi_next, "xi_next")
    if xb.shape != xn.shape:
        raise DataError(f"country-set mismatch: {xb.size} vs {xn.size} shares")
    r = (xn - xb) / xb
    diff = r[:, None] + r[None, :]
    ratio = xn / xb
    mult = np.outer(ratio, ratio)
    np.fill_diagonal(diff, 0.0)
    np.fill_diagonal(mult, 0.0)
    return RelativeChange(diff, mult)


def align_shares(codes_base, xi_base, codes_next, xi_next):
    """Restrict two share vectors to the countries present with positive share in both.

    Returns ``(codes, xi_base, xi_next, excluded)`` in the base ordering.
    The shares are not renormalized.
    """
    base = {c: s for c, s in zip(codes_base, xi_base) if s > 0}
    nxt = {c: s for c, s in zip(codes_next, xi_next) if s > 0}
    codes = tuple(c for c in codes_base if c in base and c in nxt)
    excluded = tuple(sorted((set(codes_base) | set(codes_next)) - set(codes)))
    if len(codes) < 2:
        raise DataError("fewer than two countries common to both epochs")
    return (codes, np.array([base[c] for c in codes]), np.array([nxt[c] for c in codes]), excluded)


def restrict_relative(rel: RelativeSnapshot, codes) -> RelativeSnapshot:
    """Sub-snapshot on ``codes`` with shares renormalized over that subset."""
    idx = [rel.codes.index(c) for c in codes]
    xi = rel.xi[idx]
    v = rel.v[np.ix_(idx, idx)]
    sx, sv = xi.sum(), v.sum()
    if not (sx > 0 and sv > 0):
        raise DataError("restricted snapshot has no GDP or no trade")
    v = v / sv
    return RelativeSnapshot(rel.year, tuple(codes), xi / sx, v, v.sum(axis=1), v.sum(axis=0),
                            rel.X * sx, rel.T * sv)


def predict_response(relative_base: RelativeSnapshot, codes_next, xi_next,
                     target_year: int | None = None) -> ResponsePrediction:
    """Project base-year flow shares onto next-epoch GDP shares."""
    codes, xb, xn, excluded = align_shares(relative_base.codes, relative_base.xi, codes_next, xi_next)
    idx = [relative_base.codes.index(c) for c in codes]
    v_base = relative_base.v[np.ix_(idx, idx)]
    change = predict_relative_changes(xb, xn)
    return ResponsePrediction(
        base_year=relative_base.year,
        target_year=target_year,
        codes=codes,
        v_base=v_base,
        predicted_v=v_base * change.multiplicative,
        relative_change=change.differential,
        excluded=excluded,
    )


def project_next_snapshot(relative_base: RelativeSnapshot, xi_next, T_next: float,
                          year: int | None = None) -> TradeSnapshot:
    """Model-expected flows ``T' xi'_i xi'_j`` for the next epoch.

    This is the ensemble mean, not a sample. GDP totals are reported as
    ``xi'_i X`` with the base-year world GDP ``X``.
    """
    xn = _shares(xi_next, "xi_next")
    if xn.size != relative_base.n:
        raise DataError(f"country-set mismatch: {relative_base.n} vs {xn.size} shares")
    if not T_next > 0:
        raise DataError("T_next must be positive")
    w = T_next * np.outer(xn, xn)
    np.fill_diagonal(w, 0.0)
    yr = relative_base.year + 1 if year is None else year
    countries = [CountryRecord(c, yr, float(s * relative_base.X)) for c, s in zip(relative_base.codes, xn)]
    return TradeSnapshot(yr, countries, w)


def evaluate_prediction(predicted, actual, tolerance: float = 0.1) -> PredictionReport:
    """Compare predicted and actual off-diagonal flows.

    Pairs whose actual flow is zero are counted in ``n_zero_actual`` and left
    out of every error statistic; so are pairs with a zero prediction.
    """
    p = np.asarray(predicted, dtype=float)
    a = np.asarray(actual, dtype=float)
    if p.shape != a.shape:
        raise DataError(f"shape mismatch: {p.shape} vs {a.shape}")
    off = ~np.eye(p.shape[0], dtype=bool) if p.ndim == 2 else np.ones(p.shape, dtype=bool)
    zero_actual = off & (a == 0)
    ok = off & (a > 0) & (p > 0)
    log_ratio = np.full(p.shape, np.nan)
    rel = np.full(p.shape, np.nan)
    log_ratio[ok] = np.log(a[ok] / p[ok])
    rel[ok] = (a[ok] - p[ok]) / p[ok]
    r = rel[ok]
    n = int(ok.sum())
    return PredictionReport(
        log_ratio=log_ratio,
        relative_error=rel,
        median_abs_relative_error=float(np.median(np.abs(r))) if n else float("nan"),
        mean_relative_error=float(r.mean()) if n else float("nan"),
        fraction_within=float(np.mean(np.abs(r) <= tolerance)) if n else float("nan"),
        tolerance=tolerance,
        n_compared=n,
        n_zero_actual=int(zero_actual.sum()),
    )
