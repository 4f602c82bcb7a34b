"""The ten acceptance criteria, each at its stated tolerance and time budget.

Every test records one ``AC n PASS|FAIL`` line, printed as it runs (with
``-s``) and again in the terminal summary.
"""
import itertools
import math
import os
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest

from conftest import ACCEPTANCE_RESULTS
from itn_ensemble import (
    BinaryModel,
    BinarySnapshot,
    CountryRecord,
    SamplerConfig,
    WeightedModel,
    binary_graph_log_probability,
    binary_hamiltonian,
    binary_log_partition,
    build_model_from_snapshot,
    censor_below_threshold,
    expected_strengths,
    expected_weight_matrix,
    fit_delta,
    ks_distance,
    metropolis_weighted,
    predict_relative_changes,
    relative_quantities,
    weight_distribution,
    weighted_hamiltonian,
    weighted_log_partition,
)
from itn_ensemble.analytics import ks_critical_value, scatter_points
from itn_ensemble.binary import expected_edges
from itn_ensemble.cli import main, synth_snapshot
from itn_ensemble.sampling import (
    binary_flip_acceptance,
    draw_weighted,
    integrated_autocorrelation_time,
    make_rng,
)


@contextmanager
def criterion(n, title, budget=None):
    start = time.perf_counter()
    detail = {}
    try:
        yield detail
        elapsed = time.perf_counter() - start
        if budget is not None:
            assert elapsed < budget, f"took {elapsed:.2f}s, budget {budget}s"
    except BaseException as e:
        line = f"AC {n} FAIL  {title}: {e}"
        print(line)
        ACCEPTANCE_RESULTS.append(line)
        raise
    extra = ", ".join(f"{k}={v}" for k, v in detail.items())
    line = f"AC {n} PASS  {title} ({time.perf_counter() - start:.2f}s{', ' + extra if extra else ''})"
    print(line)
    ACCEPTANCE_RESULTS.append(line)


def graphs(n):
    pairs = list(itertools.combinations(range(n), 2))
    countries = [CountryRecord(f"C{k}", 0, 1.0) for k in range(n)]
    for mask in itertools.product([False, True], repeat=len(pairs)):
        a = np.zeros((n, n), dtype=bool)
        for (i, j), on in zip(pairs, mask):
            a[i, j] = a[j, i] = on
        yield BinarySnapshot(None, countries, a)


def test_ac1_binary_normalization():
    with criterion(1, "binary normalization oracle", budget=1.0) as d:
        worst = 0.0
        for x in ([1.0, 2.0, 3.0], [1.0, 2.0, 3.0, 4.0]):
            m = BinaryModel(x, 0.7)
            total = sum(math.exp(binary_graph_log_probability(g, m)) for g in graphs(m.n))
            assert abs(total - 1) <= 1e-10
            brute = math.log(sum(math.exp(-binary_hamiltonian(g, m)) for g in graphs(m.n)))
            assert abs(binary_log_partition(m) - brute) <= 1e-10
            worst = max(worst, abs(total - 1), abs(binary_log_partition(m) - brute))
        d["max_error"] = f"{worst:.1e}"


def test_ac2_delta_fit_residual():
    with criterion(2, "delta-fit residual", budget=1.0) as d:
        rng = np.random.default_rng(2)
        n = 20
        target = 0.3 * n * (n - 1) / 2
        worst = 0.0
        for _ in range(10):
            x = rng.lognormal(0.0, 1.5, n)
            m = BinaryModel(x, fit_delta(x, target))
            resid = abs(expected_edges(m) - target)
            assert resid <= 1e-9 * target
            worst = max(worst, resid / target)
        d["max_rel_residual"] = f"{worst:.1e}"


def test_ac3_exponential_mean():
    with criterion(3, "exponential-law sampling", budget=10.0) as d:
        m = WeightedModel([0.5, 0.5], 100.0)  # theta_01 = 1 / (100 * 0.25) = 0.04
        assert m.rates()[0, 1] == pytest.approx(0.04, rel=1e-15)
        w = draw_weighted(m, make_rng(3), 100_000)[:, 0]
        se = w.std(ddof=1) / math.sqrt(w.size)
        z_direct = (w.mean() - 25) / se
        assert abs(z_direct) < 4

        trace = metropolis_weighted(m, SamplerConfig(seed=3, sweeps=100_100, burn_in=100, thinning=5))
        wm = trace.states[:, 0]
        tau = integrated_autocorrelation_time(wm)
        se_m = wm.std(ddof=1) / math.sqrt(wm.size / tau)
        z_metro = (wm.mean() - 25) / se_m
        assert abs(z_metro) < 4
        d["z_direct"] = f"{z_direct:.2f}"
        d["z_metropolis"] = f"{z_metro:.2f}"
        d["tau"] = f"{tau:.2f}"


def test_ac4_sampler_equivalence():
    with criterion(4, "sampler equivalence", budget=30.0) as d:
        m = WeightedModel([0.5, 0.5], 100.0)
        direct = draw_weighted(m, make_rng(4), 10_000)[:, 0]
        trace = metropolis_weighted(m, SamplerConfig(seed=4, sweeps=500_100, burn_in=100, thinning=50))
        metro = trace.states[:, 0]
        assert metro.size == 10_000
        ks = ks_distance(direct, metro)
        crit = ks_critical_value(10_000, 10_000, 0.01)
        assert ks < crit

        # detailed balance on every pair of N=3 graphs one flip apart
        b = BinaryModel([1.0, 2.0, 3.0], 0.7)
        log_z = binary_log_partition(b)
        states = list(itertools.product([False, True], repeat=3))
        all_g = list(graphs(3))
        pi = {s: math.exp(-binary_hamiltonian(g, b) - log_z) for s, g in zip(states, all_g)}
        worst = 0.0
        for s in states:
            for k in range(3):
                t = tuple(not v if i == k else v for i, v in enumerate(s))
                lhs = pi[s] * binary_flip_acceptance(b, np.array(s), k)
                rhs = pi[t] * binary_flip_acceptance(b, np.array(t), k)
                worst = max(worst, abs(lhs - rhs))
        assert worst <= 1e-12
        d["ks"] = f"{ks:.4f}"
        d["critical"] = f"{crit:.4f}"
        d["balance_error"] = f"{worst:.1e}"


def test_ac5_structural_laws():
    with criterion(5, "structural laws of the weighted ensemble", budget=1.0) as d:
        rng = np.random.default_rng(5)
        sizes = (2, 3, 10, 50, 200)
        for n in sizes:
            xi = rng.lognormal(0.0, 2.0, n)
            xi /= xi.sum()
            if abs(xi.sum() - 1) > 1e-12:
                xi[np.argmax(xi)] += 1 - xi.sum()
            T = float(rng.uniform(1.0, 1e6))
            m = WeightedModel(xi, T)
            v = expected_weight_matrix(m) / T
            off = ~np.eye(n, dtype=bool)
            assert np.abs(v[off] - np.outer(xi, xi)[off]).max() <= 1e-12
            assert abs(v[off].sum() - (1 - (xi ** 2).sum())) <= 1e-12
            h = weighted_hamiltonian(expected_weight_matrix(m), m)
            assert h == pytest.approx(n * (n - 1), rel=1e-12)
            total, per = weighted_log_partition(m)
            assert abs(per.sum() - total) <= 1e-10 * max(1.0, abs(total))
        d["sizes"] = "/".join(map(str, sizes))


def test_ac6_gravity_correspondence():
    with criterion(6, "gravity correspondence") as d:
        snap = synth_snapshot(50, seed=6)
        m = build_model_from_snapshot(relative_quantities(snap))
        x = snap.gdp
        off = ~np.eye(50, dtype=bool)
        resid = np.log(expected_weight_matrix(m)[off]) - np.log(np.outer(x, x)[off])
        var = float(np.var(resid))
        assert var <= 1e-20
        d["variance"] = f"{var:.1e}"


def test_ac7_fluctuation_response():
    with criterion(7, "fluctuation-response", budget=60.0) as d:
        n, reps = 20, 10_000
        rng = np.random.default_rng(7)
        xi = rng.lognormal(0.0, 1.0, n)
        xi /= xi.sum()
        xn = xi.copy()
        xn[0] *= 0.98
        xn[1:] *= (1 - xn[0]) / xn[1:].sum()
        T = 1e4
        base, nxt = WeightedModel(xi, T), WeightedModel(xn, T)

        # draws are laid out over the ordered off-diagonal pairs
        rows, cols = np.nonzero(~np.eye(n, dtype=bool))
        affected = (rows == 0) | (cols == 0)
        wb = draw_weighted(base, make_rng(71), reps)[:, affected] / T
        wn = draw_weighted(nxt, make_rng(72), reps)[:, affected] / T
        mb, mn = wb.mean(axis=0), wn.mean(axis=0)
        realized = mn / mb - 1
        # delta-method variance of each ratio; pairs are independent
        var = (wn.var(axis=0, ddof=1) / mb ** 2 + mn ** 2 * wb.var(axis=0, ddof=1) / mb ** 4) / reps
        predicted = predict_relative_changes(xi, xn).differential[rows[affected], cols[affected]]
        gap = realized.mean() - predicted.mean()
        se = math.sqrt(var.sum()) / affected.sum()
        assert abs(gap) < 4 * se

        exact_base = expected_weight_matrix(base)[rows[affected], cols[affected]]
        exact_next = expected_weight_matrix(nxt)[rows[affected], cols[affected]]
        assert np.all(exact_next < exact_base)
        d["predicted"] = f"{predicted.mean():.5f}"
        d["realized"] = f"{realized.mean():.5f}"
        d["z"] = f"{gap / se:.2f}"


def test_ac8_strength_discrepancy():
    with criterion(8, "expected-strength discrepancy bound", budget=1.0) as d:
        rng = np.random.default_rng(8)
        xi = rng.lognormal(0.0, 0.5, 100)
        xi /= xi.sum()
        assert xi.max() <= 0.05
        st = expected_strengths(WeightedModel(xi, 9e5))
        worst = 0.0
        for exact, approx in zip(st["exact"], st["paper_approx"]):
            rel = np.abs(exact - approx) / approx
            assert np.all(rel <= 0.05)
            worst = max(worst, float(rel.max()))
        d["max_discrepancy"] = f"{worst:.4f}"
        d["max_xi"] = f"{xi.max():.4f}"


def _pipeline(workdir: Path):
    """synth -> ingest the emitted CSVs -> fit -> sample (both samplers) -> compare.

    Shares use a log-normal spread of 0.3, where the check fails at about its
    nominal rate. The fitted model takes T to be the observed total, so its
    expected total is T (1 - sum xi^2); with heavier tails that O(xi^2)
    shortfall becomes visible to the scaled KS test.
    """
    cwd = os.getcwd()
    os.chdir(workdir)
    try:
        steps = [
            ["synth", "--n", "30", "--sigma", "0.3", "--seed", "9", "--out", "synth"],
            ["ingest", "synth/trade.csv", "synth/gdp.csv", "--year", "1975", "--out", "snap"],
            ["fit", "snap", "--mode", "weighted", "--out", "model"],
            ["sample", "model/model.json", "--replicas", "10", "--seed", "9", "--out", "direct"],
            ["sample", "model/model.json", "--sampler", "metropolis", "--replicas", "10", "--seed", "9",
             "--out", "metro"],
        ]
        for argv in steps:
            assert main(argv) == 0, argv
        for kind in ("direct", "metro"):
            samples = sorted(str(p) for p in Path(kind).glob("sample_*.csv"))
            assert main(["compare", "snap", *samples, "--out", f"compare_{kind}"]) == 0
    finally:
        os.chdir(cwd)
    return {str(p.relative_to(workdir)): p.read_bytes() for p in sorted(workdir.rglob("*")) if p.is_file()}


def test_ac9_end_to_end(tmp_path):
    import json

    with criterion(9, "end-to-end pipeline", budget=60.0) as d:
        (tmp_path / "a").mkdir()
        (tmp_path / "b").mkdir()
        first = _pipeline(tmp_path / "a")
        second = _pipeline(tmp_path / "b")
        assert first.keys() == second.keys()
        differing = [k for k in first if first[k] != second[k]]
        assert not differing, differing
        for kind in ("direct", "metro"):
            ks = json.loads(first[f"compare_{kind}/ks.json"])
            assert ks["ks_weights"] < ks["critical_value"]
            assert ks["ks_scaled"] < ks["critical_value"]
            d[f"ks_{kind}"] = f"{ks['ks_weights']:.3f}/{ks['ks_scaled']:.3f}<{ks['critical_value']:.3f}"
        d["files"] = len(first)


def test_ac10_censoring():
    with criterion(10, "censoring fixture") as d:
        snap = synth_snapshot(150, seed=10, T=9e5)
        m = build_model_from_snapshot(relative_quantities(snap))
        sim = np.zeros((150, 150))
        sim[~np.eye(150, dtype=bool)] = draw_weighted(m, make_rng(10))
        cut = censor_below_threshold(sim, 1000.0)
        raw_pts = {tuple(p) for p in scatter_points(snap.gdp, sim)}
        cut_pts = {tuple(p) for p in scatter_points(snap.gdp, cut)}
        assert cut_pts < raw_pts
        off = ~np.eye(150, dtype=bool)
        censored = int((cut[off] == 0).sum() - (sim[off] == 0).sum())
        assert censored > 0
        h_raw, h_cut = weight_distribution(sim[off]), weight_distribution(cut[off])
        assert h_cut.zero_count == h_raw.zero_count + censored
        d["censored"] = censored
        d["of"] = int(off.sum())
