"""Command-line pipeline: synth/ingest -> fit -> sample/expected -> compare/predict.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
Each command computes all of its outputs before writing any of them, writes
every file atomically, and finishes with ``manifest.json`` in the output
directory. If a command fails after ``--out`` was given, only a ``FAILED``
marker is written there.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analytics import (
    censor_below_threshold,
    ks_critical_value,
    ks_distance,
    log_binned_curve,
    scatter_points,
    weight_distribution,
)
from .binary import (
    BinaryModel,
    binary_log_partition,
    expected_degrees,
    expected_edges,
    fit_delta,
)
from .core import DataError, FitError, TradeSnapshot, binarize, relative_quantities
from .files import (
    FORMAT_VERSION,
    atomic_write,
    csv_text,
    dump_json,
    load_snapshot_dir,
    model_from_json,
    read_csv_table,
    relative_to_json,
    sample_from_text,
    sample_to_text,
    snapshot_to_json,
)
from .response import evaluate_prediction, predict_response, project_next_snapshot, restrict_relative
from .sampling import (
    GENERATOR,
    SamplerConfig,
    metropolis_binary,
    metropolis_weighted,
    replica_seeds,
    sample_binary_direct,
    sample_weighted_direct,
    sampler_diagnostics,
)
from .tables import (
    assemble_snapshot,
    format_gdp_table,
    format_trade_table,
    parse_gdp_table,
    parse_trade_table,
    snapshot_to_tables,
)
from .weighted import (
    WeightedModel,
    build_model_from_snapshot,
    expected_strengths,
    expected_weight_matrix,
    theta_parameters,
    weighted_log_partition,
)

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise DataError(f"cannot read {path}: {e.strerror}") from None


def _write_all(out_dir, files: dict, manifest: dict):
    out = Path(out_dir)
    for name, text in files.items():
        atomic_write(out / name, text)
    marker = out / "FAILED"
    if marker.exists():
        marker.unlink()
    manifest = dict(manifest, outputs=sorted(files), format_version=FORMAT_VERSION,
                    tool_version=__version__)
    atomic_write(out / "manifest.json", dump_json(manifest))


def _matrix_csv(codes, m, fmt=float) -> str:
    return csv_text(["code", *codes], [[c, *[fmt(v) for v in row]] for c, row in zip(codes, m)])


def _snapshot_files(snap: TradeSnapshot, warnings) -> dict:
    rel = relative_quantities(snap)
    return {
        "trade_snapshot.json": dump_json(snapshot_to_json(snap)),
        "relative_snapshot.json": dump_json(relative_to_json(rel)),
        "warnings.log": "".join(w + "\n" for w in warnings),
    }


# -- commands ----------------------------------------------------------------


def cmd_ingest(args):
    trade = parse_trade_table(_read(args.trade_csv))
    gdp = parse_gdp_table(_read(args.gdp_csv))
    if not any(r.year == args.year for r in trade) and not any(r.year == args.year for r in gdp):
        raise DataError(f"no rows for year {args.year}")
    warnings = []
    snap = assemble_snapshot(trade, gdp, args.year, warnings)
    files = _snapshot_files(snap, warnings)
    config = {"year": args.year}
    return files, {"inputs": {"trade_csv": args.trade_csv, "gdp_csv": args.gdp_csv}, "config": config}


def cmd_fit(args):
    snap, rel = load_snapshot_dir(args.snapshot_dir)
    if args.mode == "binary":
        graph = binarize(snap, args.threshold)
        delta = fit_delta(snap.gdp, graph.L)
        model = BinaryModel(snap.gdp, delta, codes=snap.codes)
        obj = {
            "mode": "binary", "year": snap.year, "codes": list(snap.codes), "x": snap.gdp.tolist(),
            "delta": delta, "L": graph.L, "N": snap.n, "threshold": args.threshold,
            "expected_edges": expected_edges(model),
        }
    else:
        model = build_model_from_snapshot(rel)
        theta_i, theta_ij = theta_parameters(model)
        off = theta_ij[~np.isnan(theta_ij)]
        obj = {
            "mode": "weighted", "year": rel.year, "codes": list(rel.codes), "xi": rel.xi.tolist(),
            "T": rel.T, "X": rel.X, "N": rel.n, "theta": theta_i.tolist(),
            "theta_pair_min": float(off.min()), "theta_pair_max": float(off.max()),
        }
    obj["format_version"] = FORMAT_VERSION
    config = {"mode": args.mode, "threshold": args.threshold}
    return {"model.json": dump_json(obj)}, {"inputs": {"snapshot_dir": args.snapshot_dir}, "config": config}


def _load_model(path):
    try:
        return model_from_json(json.loads(_read(path)))
    except (KeyError, json.JSONDecodeError) as e:
        raise DataError(f"{path}: malformed model file ({e})") from None


def _codes(model):
    return model.codes or tuple(f"C{i}" for i in range(model.n))


def cmd_sample(args):
    model = _load_model(args.model)
    if args.replicas < 1:
        raise UsageError("--replicas must be >= 1")
    seeds = replica_seeds(args.seed, args.replicas)
    codes = _codes(model)
    binary = isinstance(model, BinaryModel)
    files = {}
    diagnostics = {}
    config = {
        "sampler": args.sampler, "replicas": args.replicas, "seed_rule": "SeedSequence(seed, spawn_key=(r,))",
        "replica_seeds": seeds, "generator": GENERATOR,
    }
    if args.sampler == "direct":
        draw = sample_binary_direct if binary else sample_weighted_direct
        samples = [draw(model, s) for s in seeds]
        for r, smp in enumerate(samples):
            files[f"sample_{r:03d}.csv"] = sample_to_text(smp, codes)
        diagnostics = sampler_diagnostics(samples).as_dict()
    else:
        try:
            cfgs = [SamplerConfig(s, args.sweeps, args.burn_in, args.halfwidth, args.thinning) for s in seeds]
        except DataError as e:
            raise UsageError(str(e)) from None
        run = metropolis_binary if binary else metropolis_weighted
        reps = []
        for r, cfg in enumerate(cfgs):
            trace = run(model, cfg)
            if len(trace) == 0:
                raise UsageError("configuration emits no samples (sweeps - burn_in < thinning)")
            keep = range(len(trace)) if args.keep_all else [len(trace) - 1]
            for k in keep:
                smp = trace[k]
                files[f"sample_{r:03d}_sweep_{smp.sweep:06d}.csv"] = sample_to_text(smp, codes)
            reps.append(dict(sampler_diagnostics(trace).as_dict(), seed=cfg.seed))
        acc = [d["acceptance_rate"] for d in reps]
        diagnostics = {"replicas": reps, "acceptance_rate": float(np.mean(acc))}
        config.update(sweeps=args.sweeps, burn_in=args.burn_in, thinning=args.thinning,
                      halfwidth=args.halfwidth, keep_all=args.keep_all)
    diagnostics["format_version"] = FORMAT_VERSION
    files["diagnostics.json"] = dump_json(_jsonable(diagnostics))
    return files, {"inputs": {"model": args.model}, "seed": args.seed, "config": config}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def cmd_expected(args):
    model = _load_model(args.model)
    codes = _codes(model)
    if isinstance(model, BinaryModel):
        k = expected_degrees(model)
        files = {
            "expected_degrees.csv": csv_text(["code", "expected_degree"], zip(codes, map(float, k))),
            "log_partition.json": dump_json({
                "format_version": FORMAT_VERSION, "mode": "binary",
                "total": binary_log_partition(model), "expected_edges": expected_edges(model),
            }),
        }
    else:
        w = expected_weight_matrix(model)
        st = expected_strengths(model)
        (eo, ei), (ao, ai) = st["exact"], st["paper_approx"]
        total, per = weighted_log_partition(model)
        files = {
            "expected_weights.csv": _matrix_csv(codes, w),
            "expected_strengths.csv": csv_text(
                ["code", "s_out_exact", "s_in_exact", "s_out_approx", "s_in_approx"],
                [[c, float(a), float(b), float(d), float(e)] for c, a, b, d, e in zip(codes, eo, ei, ao, ai)],
            ),
            "log_partition.json": dump_json({
                "format_version": FORMAT_VERSION, "mode": "weighted", "total": total,
                "per_country": dict(zip(codes, per.tolist())), "per_country_sum": float(per.sum()),
            }),
        }
    return files, {"inputs": {"model": args.model}, "config": {}}


def _read_shares(path):
    header, rows = read_csv_table(_read(path))
    if [h.strip() for h in header] != ["code", "xi"]:
        raise DataError(f"{path}: expected header code,xi")
    try:
        return [r[0].strip() for r in rows], np.array([float(r[1]) for r in rows])
    except (IndexError, ValueError):
        raise DataError(f"{path}: malformed share row") from None


def cmd_predict(args):
    _, rel = load_snapshot_dir(args.base_dir)
    codes_next, xi_next = _read_shares(args.xi_next)
    if not args.T_next > 0:
        raise DataError("--T-next must be positive")
    actual_rel = None
    target_year = rel.year + 1
    if args.actual:
        _, actual_rel = load_snapshot_dir(args.actual)
        target_year = actual_rel.year
    pred = predict_response(rel, codes_next, xi_next, target_year)
    idx_next = {c: k for k, c in enumerate(codes_next)}
    xn = np.array([xi_next[idx_next[c]] for c in pred.codes])
    base_sub = rel if pred.codes == rel.codes else restrict_relative(rel, pred.codes)
    projected = project_next_snapshot(base_sub, xn, args.T_next, target_year)

    v_actual = None
    summary = {
        "format_version": FORMAT_VERSION, "base_year": rel.year, "target_year": target_year,
        "codes": list(pred.codes), "excluded": list(pred.excluded), "T_next": args.T_next,
    }
    if actual_rel is not None:
        missing = [c for c in pred.codes if c not in actual_rel.codes]
        if missing:
            raise DataError(f"country-set mismatch: actual snapshot lacks {missing}")
        ia = [actual_rel.codes.index(c) for c in pred.codes]
        v_actual = actual_rel.v[np.ix_(ia, ia)]
        report = evaluate_prediction(pred.predicted_v, v_actual, args.tolerance)
        summary["evaluation"] = _jsonable(report.as_dict())

    rows = []
    n = len(pred.codes)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            va = None if v_actual is None else float(v_actual[i, j])
            vp = float(pred.predicted_v[i, j])
            err = None if va is None or va == 0 or vp == 0 else (va - vp) / vp
            rows.append([f"{pred.codes[i]}->{pred.codes[j]}", float(pred.v_base[i, j]), vp,
                         float(pred.relative_change[i, j]), va, err])
    off = ~np.eye(n, dtype=bool)
    summary["mean_relative_change"] = float(pred.relative_change[off].mean())
    files = {
        "prediction.csv": csv_text(["pair", "v_base", "v_pred", "rel_change", "v_actual", "rel_error"], rows),
        "projected_weights.csv": _matrix_csv(pred.codes, projected.weights),
        "summary.json": dump_json(_jsonable(summary)),
    }
    inputs = {"base_dir": args.base_dir, "xi_next": args.xi_next, "actual": args.actual}
    return files, {"inputs": inputs, "config": {"T_next": args.T_next, "tolerance": args.tolerance}}


def _curve_rows(curve):
    return [[float(a), float(b), float(mx), float(my), int(c)]
            for a, b, mx, my, c in zip(curve.bin_lo, curve.bin_hi, curve.mean_x, curve.mean_y, curve.count)]


def _dist_rows(hist):
    return [[float(a), float(b), float(d), int(c)]
            for a, b, d, c in zip(hist.bin_lo, hist.bin_hi, hist.density, hist.count)]


def cmd_compare(args):
    snap, rel = load_snapshot_dir(args.snapshot_dir)
    if not args.samples:
        raise UsageError("need at least one sample file")
    off = ~np.eye(snap.n, dtype=bool)
    model = build_model_from_snapshot(rel)
    mean_w = expected_weight_matrix(model)
    sims = []
    for path in args.samples:
        header, m = sample_from_text(_read(path))
        if header.get("kind") != "weighted":
            raise DataError(f"{path}: only weighted samples can be compared")
        if tuple(header["codes"]) != snap.codes:
            raise DataError(f"{path}: country-set mismatch with the snapshot")
        sims.append(censor_below_threshold(m, args.floor_usd) if args.floor_usd > 0 else m)

    real_w = snap.weights[off]
    sim_w = np.concatenate([m[off] for m in sims])
    real_scaled = real_w / mean_w[off]
    sim_scaled = sim_w / np.tile(mean_w[off], len(sims))
    crit = ks_critical_value(real_w.size, sim_w.size, args.alpha)
    ks_w = ks_distance(real_w, sim_w)
    ks_s = ks_distance(real_scaled, sim_scaled)

    x = snap.gdp
    real_pts = scatter_points(x, snap.weights)
    sim_pts = np.concatenate([scatter_points(x, m) for m in sims])
    hist_exp = weight_distribution(mean_w[off], args.dist_bins)
    files = {
        "scatter_real.csv": csv_text(["gdp_product", "w"], real_pts.tolist()),
        "scatter_sim.csv": csv_text(["gdp_product", "w"], sim_pts.tolist()),
        "curve_real.csv": csv_text(["bin_lo", "bin_hi", "mean_x", "mean_y", "count"],
                                   _curve_rows(log_binned_curve(real_pts, args.curve_bins))),
        "curve_sim.csv": csv_text(["bin_lo", "bin_hi", "mean_x", "mean_y", "count"],
                                  _curve_rows(log_binned_curve(sim_pts, args.curve_bins))),
        "dist_real.csv": csv_text(["bin_lo", "bin_hi", "density", "count"],
                                  _dist_rows(weight_distribution(real_w, args.dist_bins))),
        "dist_sim.csv": csv_text(["bin_lo", "bin_hi", "density", "count"],
                                 _dist_rows(weight_distribution(sim_w, args.dist_bins))),
        "dist_expected.csv": csv_text(["bin_lo", "bin_hi", "density", "count"], _dist_rows(hist_exp)),
        "ks.json": dump_json({
            "format_version": FORMAT_VERSION,
            "alpha": args.alpha,
            "critical_value": crit,
            "n_real": int(real_w.size),
            "n_sim": int(sim_w.size),
            "ks_weights": ks_w,
            "ks_scaled": ks_s,
            "pass_weights": ks_w < crit,
            "pass_scaled": ks_s < crit,
            "floor_usd": args.floor_usd,
            "sim_zero_count": int((sim_w == 0).sum()),
            "real_zero_count": int((real_w == 0).sum()),
        }),
    }
    inputs = {"snapshot_dir": args.snapshot_dir, "samples": list(args.samples)}
    config = {"floor_usd": args.floor_usd, "curve_bins": args.curve_bins, "dist_bins": args.dist_bins,
              "alpha": args.alpha}
    return files, {"inputs": inputs, "config": config}


def synth_snapshot(n: int, seed: int, sigma: float = 1.5, T: float = 9e5, X: float = 6e6,
                   year: int = 1975, equal: bool = False) -> TradeSnapshot:
    """Model-consistent synthetic year: log-normal GDP shares, exponential flows."""
    from .core import CountryRecord

    share_seed, flow_seed = replica_seeds(seed, 2)
    if equal:
        xi = np.full(n, 1.0 / n)
    else:
        raw = np.random.Generator(np.random.PCG64(share_seed)).lognormal(0.0, sigma, n)
        xi = raw / raw.sum()
    width = len(str(n - 1))
    codes = tuple(f"S{k:0{width}d}" for k in range(n))
    model = WeightedModel(xi, T, codes=codes, year=year)
    w = sample_weighted_direct(model, flow_seed).payload
    countries = [CountryRecord(c, year, float(s * X), 1_000_000) for c, s in zip(codes, xi)]
    return TradeSnapshot(year, countries, w)


def cmd_synth(args):
    if args.n < 2:
        raise UsageError("--n must be >= 2")
    if not (args.T > 0 and args.X > 0 and args.sigma >= 0):
        raise UsageError("--T and --X must be positive, --sigma nonnegative")
    snap = synth_snapshot(args.n, args.seed, args.sigma, args.T, args.X, args.year, args.equal)
    trade_rows, gdp_rows = snapshot_to_tables(snap)
    files = _snapshot_files(snap, [])
    files["trade.csv"] = format_trade_table(trade_rows)
    files["gdp.csv"] = format_gdp_table(gdp_rows)
    config = {"n": args.n, "sigma": args.sigma, "T": args.T, "X": args.X, "year": args.year,
              "equal": args.equal, "generator": GENERATOR, "seed_rule": "SeedSequence(seed, spawn_key=(r,)), r=0 shares, r=1 flows"}
    return files, {"inputs": {}, "seed": args.seed, "config": config}


# -- entry point -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master RNG seed (default 0)")
    common.add_argument("--out", required=True, help="output directory")
    common.add_argument("--format-version", type=int, default=FORMAT_VERSION,
                        help=f"output format version (only {FORMAT_VERSION} is supported)")

    p = _Parser(prog="itn-ensemble", description="Maximum-entropy ensembles of the trade network.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("ingest", parents=[common], help="build a snapshot from trade and GDP CSVs")
    s.add_argument("trade_csv")
    s.add_argument("gdp_csv")
    s.add_argument("--year", type=int, required=True)
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("fit", parents=[common], help="calibrate a binary or weighted model")
    s.add_argument("snapshot_dir")
    s.add_argument("--mode", choices=["binary", "weighted"], required=True)
    s.add_argument("--threshold", type=float, default=0.0,
                   help="binarization threshold on w_ij + w_ji, millions USD (default 0)")
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser("sample", parents=[common], help="draw ensemble samples")
    s.add_argument("model")
    s.add_argument("--sampler", choices=["direct", "metropolis"], default="direct")
    s.add_argument("--replicas", type=int, default=1)
    s.add_argument("--sweeps", type=int, default=1100)
    s.add_argument("--burn-in", type=int, default=100)
    s.add_argument("--thinning", type=int, default=10)
    s.add_argument("--halfwidth", type=float, default=None,
                   help="absolute proposal half-width; default is each pair's mean weight")
    s.add_argument("--keep-all", action="store_true", help="write every thinned sample, not just the last")
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("expected", parents=[common], help="write ensemble averages and log-partition values")
    s.add_argument("model")
    s.set_defaults(func=cmd_expected)

    s = sub.add_parser("predict", parents=[common], help="fluctuation-response projection")
    s.add_argument("base_dir")
    s.add_argument("--xi-next", required=True, help="CSV with header code,xi")
    s.add_argument("--T-next", type=float, required=True, help="next-epoch world trade, millions USD")
    s.add_argument("--actual", default=None, help="snapshot directory of the next epoch to evaluate against")
    s.add_argument("--tolerance", type=float, default=0.1)
    s.set_defaults(func=cmd_predict)

    s = sub.add_parser("compare", parents=[common], help="compare a snapshot with simulated samples")
    s.add_argument("snapshot_dir")
    s.add_argument("samples", nargs="+")
    s.add_argument("--floor-usd", type=float, default=0.0,
                   help="censor simulated flows below this many USD (source data: 1000)")
    s.add_argument("--curve-bins", type=int, default=5, help="bins per decade for mean-weight curves")
    s.add_argument("--dist-bins", type=int, default=10, help="bins per decade for distributions")
    s.add_argument("--alpha", type=float, default=0.01)
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("synth", parents=[common], help="generate a synthetic snapshot")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--sigma", type=float, default=1.5, help="log-normal spread of GDP")
    s.add_argument("--equal", action="store_true", help="equal GDP shares")
    s.add_argument("--T", type=float, default=9e5, help="world trade volume, millions USD")
    s.add_argument("--X", type=float, default=6e6, help="world GDP, millions USD")
    s.add_argument("--year", type=int, default=1975)
    s.set_defaults(func=cmd_synth)
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.format_version != FORMAT_VERSION:
            raise UsageError(f"unsupported --format-version {args.format_version}")
        files, manifest = args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as e:
        _fail(args.out, e)
        print(f"data error: {e}", file=sys.stderr)
        return EXIT_DATA
    except FitError as e:
        _fail(args.out, e)
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    manifest = {"command": args.command, "seed": args.seed, **manifest}
    _write_all(args.out, files, manifest)
    return EXIT_OK


def _fail(out, err):
    try:
        atomic_write(Path(out) / "FAILED", f"{type(err).__name__}: {err}\n")
    except OSError:
        pass


if __name__ == "__main__":
    sys.exit(main())
