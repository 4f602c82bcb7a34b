"""CSV ingestion of dyadic trade tables and country GDP tables.

Trade CSV, one row per directed flow::

    year,reporter,partner,export,import
    1975,USA,CAN,100.5,99.5

``export`` is the flow ``reporter -> partner`` as recorded by the reporter,
``import`` the same flow as recorded by the partner. Values are millions of
current USD and an empty field means the report is missing.

GDP CSV::

    year,code,population,gdp_per_capita

with GDP per capita in current USD; total GDP in millions is
``population * gdp_per_capita / 1e6``.
"""
from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass

import numpy as np

from .core import CountryRecord, DataError, TradeSnapshot, symmetrize_flows

log = logging.getLogger(__name__)

TRADE_HEADER = ("year", "reporter", "partner", "export", "import")
GDP_HEADER = ("year", "code", "population", "gdp_per_capita")


@dataclass(frozen=True)
class TradeTableRow:
    year: int
    reporter: str
    partner: str
    export_reported: float | None
    import_reported: float | None


@dataclass(frozen=True)
class GdpTableRow:
    year: int
    code: str
    population: int
    gdp_per_capita: float

    @property
    def gdp_total(self) -> float:
        """Total GDP in millions of USD."""
        return self.population * self.gdp_per_capita / 1e6


def _year(s, lineno):
    try:
        y = int(s)
    except ValueError:
        raise DataError(f"line {lineno}: bad year {s!r}") from None
    if not 1900 <= y <= 2100:
        raise DataError(f"line {lineno}: year {y} outside 1900-2100")
    return y


def _amount(s, lineno, name, allow_missing=True):
    s = s.strip()
    if s == "":
        if allow_missing:
            return None
        raise DataError(f"line {lineno}: missing {name}")
    try:
        v = float(s)
    except ValueError:
        raise DataError(f"line {lineno}: bad {name} {s!r}") from None
    if not math.isfinite(v) or v < 0:
        raise DataError(f"line {lineno}: {name} must be finite and nonnegative, got {s!r}")
    return v


def _code(s, lineno, name):
    s = s.strip()
    if not s:
        raise DataError(f"line {lineno}: empty {name}")
    return s


def _rows(text, header):
    reader = csv.reader(io.StringIO(text))
    try:
        first = next(reader)
    except StopIteration:
        raise DataError("empty table") from None
    if tuple(h.strip() for h in first) != header:
        raise DataError(f"line 1: expected header {','.join(header)}, got {','.join(first)}")
    for row in reader:
        lineno = reader.line_num
        if not row or (len(row) == 1 and not row[0].strip()) or row[0].startswith("#"):
            continue
        if len(row) != len(header):
            raise DataError(f"line {lineno}: expected {len(header)} fields, got {len(row)}")
        yield lineno, row


def parse_trade_table(text: str) -> list[TradeTableRow]:
    rows = []
    seen = set()
    for lineno, (y, rep, par, ex, im) in _rows(text, TRADE_HEADER):
        year = _year(y, lineno)
        rep, par = _code(rep, lineno, "reporter"), _code(par, lineno, "partner")
        if rep == par:
            raise DataError(f"line {lineno}: self-pair {rep}->{par}")
        key = (year, rep, par)
        if key in seen:
            raise DataError(f"line {lineno}: duplicate row for {year},{rep},{par}")
        seen.add(key)
        rows.append(TradeTableRow(year, rep, par, _amount(ex, lineno, "export"), _amount(im, lineno, "import")))
    return rows


def parse_gdp_table(text: str) -> list[GdpTableRow]:
    rows = []
    seen = set()
    for lineno, (y, code, pop, gdppc) in _rows(text, GDP_HEADER):
        year = _year(y, lineno)
        code = _code(code, lineno, "code")
        try:
            population = int(pop)
        except ValueError:
            raise DataError(f"line {lineno}: bad population {pop!r}") from None
        if population < 0:
            raise DataError(f"line {lineno}: negative population")
        if (year, code) in seen:
            raise DataError(f"line {lineno}: duplicate row for {year},{code}")
        seen.add((year, code))
        rows.append(GdpTableRow(year, code, population, _amount(gdppc, lineno, "gdp_per_capita", False)))
    return rows


def _fmt(v):
    return "" if v is None else repr(float(v))


def format_trade_table(rows) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(TRADE_HEADER)
    for r in rows:
        w.writerow([r.year, r.reporter, r.partner, _fmt(r.export_reported), _fmt(r.import_reported)])
    return out.getvalue()


def format_gdp_table(rows) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(GDP_HEADER)
    for r in rows:
        w.writerow([r.year, r.code, r.population, repr(float(r.gdp_per_capita))])
    return out.getvalue()


def assemble_snapshot(trade_rows, gdp_rows, year: int, warnings: list | None = None) -> TradeSnapshot:
    """Build the trade matrix for one year.

    Countries are those with positive GDP in ``year``, sorted by code. Flows
    touching any other country are dropped, and every drop is logged (and
    appended to ``warnings`` when given).
    """
    def warn(msg):
        log.warning(msg)
        if warnings is not None:
            warnings.append(msg)

    gdp_year = [r for r in gdp_rows if r.year == year]
    trade_year = [r for r in trade_rows if r.year == year]
    if not gdp_year and not trade_year:
        raise DataError(f"no rows for year {year}")

    countries = []
    for r in sorted(gdp_year, key=lambda r: r.code):
        x = r.gdp_total
        if not x > 0:
            warn(f"{year}: dropping {r.code}, total GDP is zero")
            continue
        countries.append(CountryRecord(r.code, year, x, r.population))
    if not countries:
        raise DataError(f"no countries with positive GDP for year {year}")

    index = {c.code: k for k, c in enumerate(countries)}
    n = len(countries)
    ex = np.full((n, n), np.nan)
    im = np.full((n, n), np.nan)
    np.fill_diagonal(ex, 0.0)
    np.fill_diagonal(im, 0.0)
    unknown = set()
    for r in trade_year:
        i, j = index.get(r.reporter), index.get(r.partner)
        if i is None or j is None:
            unknown.update(c for c in (r.reporter, r.partner) if c not in index)
            continue
        if r.export_reported is not None:
            ex[i, j] = r.export_reported
        if r.import_reported is not None:
            im[i, j] = r.import_reported
    for code in sorted(unknown):
        warn(f"{year}: dropping trade rows of {code}, no positive GDP for that year")
    return TradeSnapshot(year, countries, symmetrize_flows(ex, im))


def snapshot_to_tables(snapshot: TradeSnapshot) -> tuple[list[TradeTableRow], list[GdpTableRow]]:
    """Express a snapshot as table rows that :func:`assemble_snapshot` maps back onto it.

    Each positive flow is written with identical export and import reports.
    GDP is written with a population of one million so that GDP per capita
    equals total GDP in millions.
    """
    codes = snapshot.codes
    trade = []
    w = snapshot.weights
    for i, j in zip(*np.nonzero(w)):
        trade.append(TradeTableRow(snapshot.year, codes[i], codes[j], float(w[i, j]), float(w[i, j])))
    gdp = [
        GdpTableRow(snapshot.year, c.code, 1_000_000 if c.population is None else c.population,
                    c.gdp_total * 1e6 / (1_000_000 if c.population is None else c.population))
        for c in snapshot.countries
    ]
    return trade, gdp
