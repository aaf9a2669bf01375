"""Command-line front end.

Exit codes: 0 success, 1 invalid input/config, 2 numeric or certification failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import harness, spectral, weights
from .errors import InputError, NumericError

CONFIG_HELP = """\
config schema (JSON; unknown keys are rejected):

  run / spectra / certify-eps:
    graph       {"kind": "random", "n": 6, "extra_edge_prob": 0.3, "seed": <seed>}
                {"kind": "cycle" | "complete", "n": 6}
                {"kind": "edge_list", "path": "g.txt"}   first line n, then "i j" (j sends to i)
    algorithm   "ddgd" | "dgd_doubly" | "dgd_row" | "dgd_col" | "gradient_push"
    epsilon     positive number or "auto" (widest certified spectral margin)
    weights     {"scheme": "uniform" | "lazy", "self_weight": 0.5}
    schedule    {"kind": "inverse_sqrt" | "inverse" | "inverse_pow", "scale": 1.0, "exponent": q}
    iterations  K (trace has K+1 rows)
    problem     {"kind": "least_squares", "p": 3, "m": 3, "noise": 0.1, "heterogeneity": 0.0,
                 "squared": false, "radius": 1000.0, "seed": <seed>}
                {"kind": "file", "path": "problem.txt"}
    init        "zero" | "random"
    seed        integer; default for graph/problem seeds and random init
    allow_uncertified, debug   booleans

  compare:  {"base": <run config>, "variants": [{"algorithm": "ddgd"}, {"algorithm": "dgd_row"}]}
  sweep:    {"base": <run config>, "extra_edge_probs": [0.0, 0.3, 0.8], "threshold": 0.01}
"""

log = logging.getLogger("ddgd")


def _read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"config {path} is not valid JSON: {exc}") from None


def _with_seed(raw, seed):
    if not isinstance(raw, dict):
        raise InputError("config must be a JSON object")
    raw = dict(raw)
    raw.pop("config_hash", None)
    if seed is not None:
        raw["seed"] = seed
    return raw


def _nested(args, keys):
    raw = _read_json(args.config)
    harness._strict(raw, keys, "config")
    if "base" not in raw:
        raise InputError("config: missing key 'base'")
    return raw, _with_seed(raw["base"], args.seed)


def cmd_run(args):
    cfg = harness.RunConfig.from_dict(_with_seed(_read_json(args.config), args.seed))
    trace = harness.run(cfg)
    paths = harness.write_outputs(trace, args.out, args.run_id)
    s = trace.summary()
    print(f"run {s['run_id']}: {cfg.algorithm}, K={cfg.iterations}, epsilon={s['epsilon']}")
    print(f"  final residual       {s['final_residual']:.6e}")
    print(f"  consensus error      {s['final_consensus_error']:.6e}")
    print(f"  f_m - f*             {s['f_m'] - s['f_star']:.6e}  (best k={s['best_k']})")
    for p in paths.values():
        print(f"  wrote {p}")
    return 0


def cmd_compare(args):
    raw, base = _nested(args, {"base", "variants"})
    overrides = raw.get("variants", [{}])
    if not isinstance(overrides, list) or not all(isinstance(v, dict) for v in overrides):
        raise InputError("config: 'variants' must be a list of objects")
    cmp = harness.compare(harness.variants(base, overrides))
    out = Path(args.out)
    for name, trace in cmp.traces.items():
        harness.write_outputs(trace, out, f"{name.replace('#', '_')}-{trace.config.config_hash[:12]}")
    series = cmp.residual_series()
    names = list(series)
    with open(out / "comparison.csv", "w") as fh:
        fh.write("k," + ",".join(names) + "\n")
        for k in range(len(series[names[0]])):
            fh.write(f"{k}," + ",".join(repr(float(series[nm][k])) for nm in names) + "\n")
    print(f"{'name':<16}{'final residual':>18}{'consensus':>14}")
    for row in cmp.table():
        print(f"{row['name']:<16}{row['final_residual']:>18.6e}{row['final_consensus_error']:>14.3e}")
    for claim, ok in cmp.claims.items():
        print(f"  claim {claim}: {'holds' if ok else 'FAILS'}")
    print(f"  wrote {out / 'comparison.csv'}")
    return 0


def cmd_sweep(args):
    raw, base = _nested(args, {"base", "extra_edge_probs", "threshold"})
    probs = raw.get("extra_edge_probs")
    if not isinstance(probs, list) or not probs:
        raise InputError("config: 'extra_edge_probs' must be a non-empty list")
    threshold = raw.get("threshold", 1e-2)
    result = harness.density_sweep(harness.RunConfig.from_dict(base), probs, threshold)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "sweep.json").write_text(json.dumps(
        {"rows": result.rows, "inversions": result.inversions, "trend_ok": result.trend_ok}, indent=2) + "\n")
    print(f"{'p':>6}{'links':>7}{'epsilon':>9}{'iters to thr':>14}")
    for r in result.rows:
        its = "never" if r["iterations_to_threshold"] is None else r["iterations_to_threshold"]
        print(f"{r['extra_edge_prob']:>6.2f}{r['links']:>7}{r['epsilon']!s:>9}{its!s:>14}")
    print(f"  trend {'non-increasing' if result.trend_ok else 'VIOLATED'} ({result.inversions} inversion(s))")
    print(f"  wrote {out / 'sweep.json'}")
    return 0


def _weight_system(args, allow_zero):
    cfg = harness.RunConfig.from_dict(_with_seed(_read_json(args.config), args.seed),
                                      allow_zero_epsilon=allow_zero)
    g = harness.build_graph(cfg)
    if not g.is_strongly_connected():
        raise InputError("graph is not strongly connected")
    a, b = harness.build_weights(cfg, g)
    return cfg, a, b, harness.resolve_epsilon(cfg, a, b)


def cmd_certify(args):
    cfg, a, b, eps = _weight_system(args, allow_zero=True)
    verdict = spectral.certify(weights.assemble_m(a, b, eps))
    print(f"epsilon={eps}: simple unit eigenvalue: {verdict.unit_eigenvalue_simple}")
    print(f"  |lambda_2| = {verdict.second_magnitude:.12g}, margin = {verdict.margin:.6g}")
    if a.shape[0] > 1:
        print(f"  sufficient bound Upsilon = {weights.epsilon_bound(weights.assemble_m(a, b, 0.0)):.6g}")
    if not verdict.unit_eigenvalue_simple:
        print("  not certified: eigenvalue 1 is repeated or another eigenvalue has modulus >= 1")
        return 2
    return 0


def cmd_spectra(args):
    cfg, a, b, eps = _weight_system(args, allow_zero=False)
    m = weights.assemble_m(a, b, eps)
    verdict = spectral.certify(m)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = cfg.run_id
    for name, mat in (("A", a), ("B", b), ("M", m)):
        (out / f"{stem}.{name}.csv").write_text(weights.matrix_to_csv(mat))
    print(f"epsilon={eps}: simple unit eigenvalue: {verdict.unit_eigenvalue_simple}, "
          f"|lambda_2| = {verdict.second_magnitude:.6g}")
    print("  eigenvalues: " + ", ".join(f"{v:.4g}" for v in verdict.eigenvalues[:8])
          + (" ..." if len(verdict.eigenvalues) > 8 else ""))
    print("  pi (left eigenvector of A): " + np.array2string(verdict.left_pi, precision=4))
    if a.shape[0] > 1:
        print(f"  sufficient bound Upsilon = {weights.epsilon_bound(weights.assemble_m(a, b, 0.0)):.6g}")
    if not verdict.unit_eigenvalue_simple:
        raise NumericError("matrix powers do not converge: unit eigenvalue not simple")
    fit = spectral.power_convergence(m, args.k_max, args.tol)
    (out / f"{stem}.spectra.csv").write_text(fit.to_csv())
    print(f"  fitted gamma = {fit.gamma_hat:.6g}, Gamma = {fit.Gamma_hat:.6g}, "
          f"first k with distance <= {args.tol:g}: {fit.first_k_below_tol}")
    print(f"  wrote {out / (stem + '.spectra.csv')}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ddgd", description="Distributed gradient descent over directed graphs.",
        epilog=CONFIG_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)
    handlers = {"run": cmd_run, "compare": cmd_compare, "sweep": cmd_sweep,
                "spectra": cmd_spectra, "certify-eps": cmd_certify}
    helps = {"run": "run one experiment", "compare": "run several algorithms on one instance",
             "sweep": "density sweep over extra-edge probabilities",
             "spectra": "eigenvalues and matrix-power decay of M",
             "certify-eps": "check that M(epsilon) has a simple unit eigenvalue"}
    for name, fn in handlers.items():
        p = sub.add_parser(name, help=helps[name], epilog=CONFIG_HELP,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--out", default="out", help="output directory (default: out)")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        if name == "run":
            p.add_argument("--run-id", default=None, help="output file stem (default: algorithm-hash)")
        if name == "spectra":
            p.add_argument("--k-max", type=int, default=10000)
            p.add_argument("--tol", type=float, default=1e-8)
        p.set_defaults(func=fn)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
