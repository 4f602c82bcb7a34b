"""Domain types and normalization conventions for yearly trade snapshots.

All monetary quantities are in millions of current USD. Matrices are dense
``(N, N)`` float arrays indexed in the order of the snapshot's country list,
with ``w[i, j]`` the flow from country ``i`` (exporter) to ``j`` (importer).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class DataError(ValueError):
    """Input data violates a precondition (bad shape, sign, missing rows...)."""


class FitError(RuntimeError):
    """A numerical procedure failed to converge."""


def _frozen_array(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class CountryRecord:
    code: str
    year: int
    gdp_total: float
    population: int | None = None

    def __post_init__(self):
        if not isinstance(self.code, str) or not self.code:
            raise DataError("country code must be a nonempty string")
        if not math.isfinite(self.gdp_total) or self.gdp_total < 0:
            raise DataError(f"{self.code}: gdp_total must be finite and >= 0, got {self.gdp_total}")
        if self.population is not None and self.population < 0:
            raise DataError(f"{self.code}: negative population")


def _check_countries(countries) -> tuple[CountryRecord, ...]:
    countries = tuple(countries)
    codes = [c.code for c in countries]
    if len(set(codes)) != len(codes):
        raise DataError("duplicate country codes in snapshot")
    return countries


@dataclass(frozen=True, eq=False)
class TradeSnapshot:
    """One year of directed bilateral trade, ``weights[i, j]`` = exports i -> j."""

    year: int
    countries: tuple[CountryRecord, ...]
    weights: np.ndarray

    def __post_init__(self):
        countries = _check_countries(self.countries)
        for c in countries:
            if c.gdp_total <= 0:
                raise DataError(f"{c.code}: zero GDP is not allowed in a snapshot")
        w = _frozen_array(self.weights)
        n = len(countries)
        if w.shape != (n, n):
            raise DataError(f"weight matrix shape {w.shape} does not match {n} countries")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise DataError("weights must be finite and nonnegative")
        if np.any(np.diag(w) != 0):
            raise DataError("self-trade (nonzero diagonal) is not allowed")
        object.__setattr__(self, "countries", countries)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return len(self.countries)

    @property
    def codes(self) -> tuple[str, ...]:
        return tuple(c.code for c in self.countries)

    @property
    def gdp(self) -> np.ndarray:
        return np.array([c.gdp_total for c in self.countries], dtype=float)


@dataclass(frozen=True, eq=False)
class RelativeSnapshot:
    """GDP shares ``xi``, flow shares ``v`` and strength shares for one year.

    ``codes`` carries the country order so that two epochs can be aligned.
    """

    year: int
    codes: tuple[str, ...]
    xi: np.ndarray
    v: np.ndarray
    sigma_out: np.ndarray
    sigma_in: np.ndarray
    X: float
    T: float

    def __post_init__(self):
        for name in ("xi", "v", "sigma_out", "sigma_in"):
            object.__setattr__(self, name, _frozen_array(getattr(self, name)))
        object.__setattr__(self, "codes", tuple(self.codes))
        n = len(self.codes)
        if self.xi.shape != (n,) or self.v.shape != (n, n):
            raise DataError("relative snapshot dimensions do not match country list")
        if abs(self.xi.sum() - 1.0) > 1e-12:
            raise DataError("GDP shares must sum to 1")
        if abs(self.v.sum() - 1.0) > 1e-12 or np.any(np.diag(self.v) != 0):
            raise DataError("flow shares must sum to 1 with zero diagonal")

    @property
    def n(self) -> int:
        return len(self.codes)


@dataclass(frozen=True, eq=False)
class BinarySnapshot:
    """Undirected simple graph of trade partnerships."""

    year: int | None
    countries: tuple[CountryRecord, ...]
    adjacency: np.ndarray
    threshold: float = 0.0
    L: int = field(init=False)

    def __post_init__(self):
        countries = _check_countries(self.countries)
        a = _frozen_array(self.adjacency, dtype=bool)
        n = len(countries)
        if a.shape != (n, n):
            raise DataError(f"adjacency shape {a.shape} does not match {n} countries")
        if not np.array_equal(a, a.T) or np.any(np.diag(a)):
            raise DataError("adjacency must be symmetric with an empty diagonal")
        object.__setattr__(self, "countries", countries)
        object.__setattr__(self, "adjacency", a)
        object.__setattr__(self, "L", int(a.sum()) // 2)

    @property
    def n(self) -> int:
        return len(self.countries)

    @property
    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)


def symmetrize_flows(exports_reported, imports_reported) -> np.ndarray:
    """Reconcile the two reports of every directed flow.

    Both arguments describe flow ``i -> j`` at ``[i, j]``: the first as reported
    by the exporter, the second as reported by the importer. Missing reports
    are ``NaN``. Two reports are averaged, a single report is taken as is and a
    flow with no report is zero.
    """
    ex = np.asarray(exports_reported, dtype=float)
    im = np.asarray(imports_reported, dtype=float)
    if ex.shape != im.shape or ex.ndim != 2 or ex.shape[0] != ex.shape[1]:
        raise DataError(f"report matrices must be square and equal in shape: {ex.shape} vs {im.shape}")
    for m in (ex, im):
        present = ~np.isnan(m)
        if np.any(m[present] < 0) or np.any(np.isinf(m)):
            raise DataError("reported flows must be finite and nonnegative")
        if np.any(np.diag(m)[present.diagonal()] != 0):
            raise DataError("reported self-trade must be zero")
    both = ~np.isnan(ex) & ~np.isnan(im)
    w = np.where(both, (ex + im) / 2, np.fmax(ex, im))
    return np.nan_to_num(w, nan=0.0)


def strengths(snapshot: TradeSnapshot) -> tuple[np.ndarray, np.ndarray]:
    """Total exports (out-strength) and imports (in-strength) per country."""
    w = snapshot.weights
    return w.sum(axis=1), w.sum(axis=0)


def relative_quantities(snapshot: TradeSnapshot) -> RelativeSnapshot:
    x = snapshot.gdp
    X = float(x.sum())
    T = float(snapshot.weights.sum())
    if not X > 0:
        raise DataError(f"year {snapshot.year}: total GDP is zero")
    if not T > 0:
        raise DataError(f"year {snapshot.year}: total trade is zero")
    s_out, s_in = strengths(snapshot)
    v = snapshot.weights / T
    return RelativeSnapshot(
        year=snapshot.year,
        codes=snapshot.codes,
        xi=x / X,
        v=v,
        sigma_out=v.sum(axis=1),
        sigma_in=v.sum(axis=0),
        X=X,
        T=T,
    )


def binarize(snapshot: TradeSnapshot, threshold: float = 0.0) -> BinarySnapshot:
    """Undirected partnership graph: edge iff ``w_ij + w_ji > threshold``."""
    if not threshold >= 0:
        raise DataError(f"threshold must be >= 0, got {threshold}")
    w = snapshot.weights
    a = (w + w.T) > threshold
    np.fill_diagonal(a, False)
    return BinarySnapshot(snapshot.year, snapshot.countries, a, float(threshold))
