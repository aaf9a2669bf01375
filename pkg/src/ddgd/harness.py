"""Experiment configuration, execution, metrics and persistence."""

from __future__ import annotations

import copy
import csv
import hashlib
import io
import json
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import nnls

from . import algorithms, digraph, objective, spectral, weights
from .errors import CertificationError, InputError, NumericError
from .schedule import StepSchedule

log = logging.getLogger(__name__)

ALGORITHMS = ("ddgd", "dgd_doubly", "dgd_row", "dgd_col", "gradient_push")
TRACE_COLUMNS = ("k", "alpha", "residual", "consensus_error", "y_norm", "objective_gap")
CONSERVATION_TOL = 1e-10

GRAPH_KEYS = {"kind", "n", "extra_edge_prob", "seed", "path"}
GRAPH_KINDS = ("random", "cycle", "complete", "edge_list")
PROBLEM_KEYS = {"kind", "p", "m", "noise", "heterogeneity", "squared", "seed", "radius", "path"}
WEIGHT_KEYS = {"scheme", "self_weight"}
SCHEDULE_KEYS = {"kind", "scale", "exponent"}
CONFIG_KEYS = {"graph", "algorithm", "epsilon", "weights", "schedule", "iterations", "problem",
               "init", "seed", "allow_uncertified", "debug"}


def _strict(d, allowed, where):
    if not isinstance(d, dict):
        raise InputError(f"{where} must be a JSON object")
    unknown = sorted(set(d) - allowed)
    if unknown:
        raise InputError(f"unknown key(s) in {where}: {', '.join(unknown)}")


def _number(d, key, where, default=None, integer=False):
    v = d.get(key, default)
    kind = int if integer else (int, float)
    if isinstance(v, bool) or not isinstance(v, kind):
        raise InputError(f"{where}.{key} must be {'an integer' if integer else 'a number'}, got {v!r}")
    return v


@dataclass(frozen=True)
class RunConfig:
    graph: dict
    algorithm: str = "ddgd"
    epsilon: float | str = "auto"
    weights: dict = field(default_factory=lambda: {"scheme": "uniform", "self_weight": 0.5})
    schedule: StepSchedule = field(default_factory=StepSchedule)
    iterations: int = 1000
    problem: dict = field(default_factory=dict)
    init: str = "zero"
    seed: int = 0
    allow_uncertified: bool = False
    debug: bool = False

    @classmethod
    def from_dict(cls, raw: dict, allow_zero_epsilon: bool = False) -> RunConfig:
        """Validate and resolve a config dict; every default is filled in."""
        _strict(raw, CONFIG_KEYS, "config")
        seed = _number(raw, "seed", "config", 0, integer=True)

        g = dict(raw.get("graph", {}))
        _strict(g, GRAPH_KEYS, "graph")
        kind = g.get("kind", "random")
        if kind not in GRAPH_KINDS:
            raise InputError(f"graph.kind must be one of {GRAPH_KINDS}, got {kind!r}")
        if kind == "edge_list":
            if not isinstance(g.get("path"), str):
                raise InputError("graph.path is required for edge_list graphs")
            graph = {"kind": kind, "path": g["path"]}
        else:
            n = _number(g, "n", "graph", None, integer=True)
            if n < 1:
                raise InputError(f"graph.n must be >= 1, got {n}")
            graph = {"kind": kind, "n": n}
            if kind == "random":
                prob = _number(g, "extra_edge_prob", "graph", 0.0)
                if not 0 <= prob <= 1:
                    raise InputError(f"graph.extra_edge_prob must lie in [0, 1], got {prob}")
                graph["extra_edge_prob"] = float(prob)
                graph["seed"] = _number(g, "seed", "graph", seed, integer=True)

        algorithm = raw.get("algorithm", "ddgd")
        if algorithm not in ALGORITHMS:
            raise InputError(f"algorithm must be one of {ALGORITHMS}, got {algorithm!r}")

        eps = raw.get("epsilon", "auto")
        if eps != "auto":
            if isinstance(eps, bool) or not isinstance(eps, (int, float)) or not math.isfinite(eps):
                raise InputError(f"epsilon must be a positive number or 'auto', got {eps!r}")
            if eps < 0 or (eps == 0 and not allow_zero_epsilon):
                raise InputError(f"epsilon must be positive, got {eps!r}")
            eps = float(eps)

        w = dict(raw.get("weights", {}))
        _strict(w, WEIGHT_KEYS, "weights")
        scheme = w.get("scheme", "uniform")
        if scheme not in ("uniform", "lazy"):
            raise InputError(f"weights.scheme must be 'uniform' or 'lazy', got {scheme!r}")
        self_weight = float(_number(w, "self_weight", "weights", 0.5))
        if not 0 <= self_weight < 1:
            raise InputError(f"weights.self_weight must lie in [0, 1), got {self_weight}")
        wspec = {"scheme": scheme, "self_weight": self_weight}

        s = dict(raw.get("schedule", {}))
        _strict(s, SCHEDULE_KEYS, "schedule")
        try:
            sched = StepSchedule(s.get("kind", "inverse_sqrt"), _number(s, "scale", "schedule", 1.0),
                                 s.get("exponent"))
        except InputError as exc:
            raise InputError(f"schedule: {exc}") from None

        iterations = _number(raw, "iterations", "config", 1000, integer=True)
        if iterations < 0:
            raise InputError(f"iterations must be >= 0, got {iterations}")

        p = dict(raw.get("problem", {}))
        _strict(p, PROBLEM_KEYS, "problem")
        pkind = p.get("kind", "least_squares")
        if pkind == "file":
            if not isinstance(p.get("path"), str):
                raise InputError("problem.path is required for file problems")
            problem = {"kind": "file", "path": p["path"]}
        elif pkind == "least_squares":
            problem = {
                "kind": pkind,
                "p": _number(p, "p", "problem", 3, integer=True),
                "m": _number(p, "m", "problem", 3, integer=True),
                "noise": float(_number(p, "noise", "problem", 0.1)),
                "heterogeneity": float(_number(p, "heterogeneity", "problem", 0.0)),
                "squared": bool(p.get("squared", False)),
                "radius": float(_number(p, "radius", "problem", 1e3)),
                "seed": _number(p, "seed", "problem", seed, integer=True),
            }
            for key in ("p", "m"):
                if problem[key] < 1:
                    raise InputError(f"problem.{key} must be >= 1, got {problem[key]}")
            for key in ("noise", "heterogeneity"):
                if problem[key] < 0:
                    raise InputError(f"problem.{key} must be >= 0, got {problem[key]}")
        else:
            raise InputError(f"problem.kind must be 'least_squares' or 'file', got {pkind!r}")

        init = raw.get("init", "zero")
        if init not in ("zero", "random"):
            raise InputError(f"init must be 'zero' or 'random', got {init!r}")
        flags = {}
        for key in ("allow_uncertified", "debug"):
            flags[key] = raw.get(key, False)
            if not isinstance(flags[key], bool):
                raise InputError(f"{key} must be true or false, got {flags[key]!r}")

        return cls(graph, algorithm, eps, wspec, sched, iterations, problem, init, seed, **flags)

    def to_dict(self) -> dict:
        return {
            "graph": dict(self.graph),
            "algorithm": self.algorithm,
            "epsilon": self.epsilon,
            "weights": dict(self.weights),
            "schedule": self.schedule.to_dict(),
            "iterations": self.iterations,
            "problem": dict(self.problem),
            "init": self.init,
            "seed": self.seed,
            "allow_uncertified": self.allow_uncertified,
            "debug": self.debug,
        }

    def replace(self, **changes) -> RunConfig:
        """Copy with top-level keys (or nested dict keys) overridden, re-validated."""
        d = self.to_dict()
        for key, value in changes.items():
            if isinstance(value, dict) and isinstance(d.get(key), dict):
                d[key] = {**d[key], **value}
            else:
                d[key] = value
        return RunConfig.from_dict(d)

    @property
    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    @property
    def run_id(self) -> str:
        return f"{self.algorithm}-{self.config_hash[:12]}"


# -- building blocks -------------------------------------------------------

def build_graph(cfg: RunConfig) -> digraph.Digraph:
    spec = cfg.graph
    kind = spec["kind"]
    if kind == "random":
        g = digraph.random_strongly_connected(spec["n"], spec["extra_edge_prob"], spec["seed"])
    elif kind == "cycle":
        g = digraph.cycle(spec["n"])
    elif kind == "complete":
        g = digraph.complete(spec["n"])
    else:
        try:
            g = digraph.load_edge_list(spec["path"])
        except OSError as exc:
            raise InputError(f"graph.path: cannot read {spec['path']!r}: {exc}") from None
    return g


def build_problem(cfg: RunConfig, n: int) -> objective.LeastSquaresProblem:
    spec = cfg.problem
    if spec["kind"] == "file":
        try:
            prob = objective.LeastSquaresProblem.loads(Path(spec["path"]).read_text())
        except OSError as exc:
            raise InputError(f"problem.path: cannot read {spec['path']!r}: {exc}") from None
        if prob.n != n:
            raise InputError(f"problem.path has {prob.n} agents but the graph has {n}")
        return prob
    return objective.generate_least_squares(
        n, p=spec["p"], m=spec["m"], noise=spec["noise"], heterogeneity=spec["heterogeneity"],
        squared=spec["squared"], seed=spec["seed"], radius=spec["radius"])


def build_weights(cfg: RunConfig, g: digraph.Digraph):
    a, b = weights.uniform_weights(g)
    if cfg.weights["scheme"] == "lazy":
        s = cfg.weights["self_weight"]
        eye = np.eye(g.n)
        a = s * eye + (1 - s) * a
        b = s * eye + (1 - s) * b
    return a, b


def resolve_epsilon(cfg: RunConfig, a, b) -> float:
    if cfg.epsilon == "auto":
        return weights.choose_epsilon(a, b)[0]
    return cfg.epsilon


def initial_states(cfg: RunConfig, n: int, p: int) -> np.ndarray:
    if cfg.init == "zero":
        return np.zeros((n, p))
    return np.random.default_rng(cfg.seed).standard_normal((n, p))


# -- traces ----------------------------------------------------------------

@dataclass
class RunTrace:
    config: RunConfig
    columns: dict
    f_values: np.ndarray
    f_star: float
    x_star: np.ndarray
    final_x: np.ndarray
    final_y: np.ndarray | None
    epsilon: float | None
    verdict: spectral.SpectralVerdict | None
    wall_time: float
    converged_at_start: bool = False

    @property
    def f_m(self) -> float:
        return float(self.f_values.min())

    @property
    def best_k(self) -> int:
        return int(self.f_values.argmin())

    @property
    def residual(self) -> np.ndarray:
        return self.columns["residual"]

    def __len__(self):
        return len(self.columns["k"])

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        cols = [self.columns[c] for c in TRACE_COLUMNS]
        for row in zip(*cols):
            writer.writerow([int(row[0])] + [repr(float(v)) for v in row[1:]])
        return buf.getvalue()

    def plot_csv(self) -> str:
        lines = ["k,log10_residual"]
        with np.errstate(divide="ignore"):
            logs = np.log10(self.residual)
        lines += [f"{int(k)},{float(v)!r}" for k, v in zip(self.columns["k"], logs)]
        return "\n".join(lines) + "\n"

    def summary(self) -> dict:
        return {
            "run_id": self.config.run_id,
            "algorithm": self.config.algorithm,
            "iterations": self.config.iterations,
            "epsilon": self.epsilon,
            "f_star": self.f_star,
            "f_m": self.f_m,
            "best_k": self.best_k,
            "final_residual": float(self.residual[-1]),
            "final_consensus_error": float(self.columns["consensus_error"][-1]),
            "final_y_norm": float(self.columns["y_norm"][-1]),
            "wall_time": self.wall_time,
        }


def _residual_fn(x0, x_star):
    denom = float(np.linalg.norm(x0 - x_star))
    if denom == 0.0:
        return (lambda x: float(np.linalg.norm(x - x_star))), True
    return (lambda x: float(np.linalg.norm(x - x_star)) / denom), False


def _certified_ws(cfg, a, b):
    eps = resolve_epsilon(cfg, a, b)
    ws = weights.WeightSystem.build(a, b, eps)
    verdict = spectral.certify(ws.m)
    if not verdict.unit_eigenvalue_simple:
        msg = (f"epsilon={eps}: augmented matrix has no simple unit eigenvalue "
               f"(second magnitude {verdict.second_magnitude:.6g})")
        if not cfg.allow_uncertified:
            raise CertificationError(msg)
        log.warning("%s; running anyway (allow_uncertified)", msg)
    return ws, verdict


def run(cfg: RunConfig, problem: objective.Objective | None = None,
        g: digraph.Digraph | None = None) -> RunTrace:
    """Execute one configured run and record K+1 metric rows.

    ``problem`` and ``g`` override the configured ones (used by tests and
    sweeps that share instances).
    """
    t0 = time.perf_counter()
    g = build_graph(cfg) if g is None else g
    if not g.is_strongly_connected():
        raise InputError("graph is not strongly connected")
    prob = build_problem(cfg, g.n) if problem is None else problem
    if prob.n != g.n:
        raise InputError(f"problem has {prob.n} agents but graph has {g.n}")
    x_star, f_star = prob.optimum
    a, b = build_weights(cfg, g)
    n, K = g.n, cfg.iterations
    x0 = initial_states(cfg, n, prob.p)
    alphas = cfg.schedule.alphas(K + 1)
    resid, at_start = _residual_fn(x0, x_star)

    cols = {c: np.empty(K + 1) for c in TRACE_COLUMNS}
    cols["k"] = np.arange(K + 1, dtype=float)
    cols["alpha"] = alphas
    f_values = np.empty(K + 1)
    verdict, eps, final_y = None, None, None

    algo = cfg.algorithm
    if algo == "ddgd":
        ws, verdict = _certified_ws(cfg, a, b)
        eps = ws.eps
        st = algorithms.AgentStates.initial(x0)
        for k in range(K + 1):
            zbar = st.accumulation_point
            cols["residual"][k] = resid(st.x)
            cols["consensus_error"][k] = np.linalg.norm(st.x - zbar, axis=1).max()
            cols["y_norm"][k] = np.linalg.norm(st.y, axis=1).max()
            f_values[k] = prob.value(zbar)
            if k == K:
                break
            nxt = algorithms.ddgd_step(st, ws, prob, alphas[k])
            if cfg.debug:
                _check_sum(st.z, nxt.z, prob.subgradients(st.x), alphas[k], k)
            st = nxt
        final_x, final_y = st.x, st.y
    elif algo == "gradient_push":
        st = algorithms.PushSumState.initial(x0)
        for k in range(K + 1):
            _record_plain(cols, f_values, k, st.x, prob, resid)
            if k == K:
                break
            st = algorithms.gradient_push_step(st, b, prob, alphas[k])
        final_x = st.x
    else:
        w = {"dgd_row": a, "dgd_col": b, "dgd_doubly": None}[algo]
        if w is None:
            w = weights.metropolis_weights(g)
        x = x0
        for k in range(K + 1):
            _record_plain(cols, f_values, k, x, prob, resid)
            if k == K:
                break
            nxt = algorithms.dgd_step(x, w, prob, alphas[k])
            if cfg.debug and algo != "dgd_row":
                _check_sum(x, nxt, prob.subgradients(x), alphas[k], k)
            x = nxt
        final_x = x
    cols["objective_gap"] = f_values - f_star
    if algo != "ddgd":
        cols["y_norm"][:] = np.nan
    return RunTrace(cfg, cols, f_values, float(f_star), x_star, final_x, final_y, eps, verdict,
                    time.perf_counter() - t0, at_start)


def _record_plain(cols, f_values, k, x, prob, resid):
    xbar = x.mean(axis=0)
    cols["residual"][k] = resid(x)
    cols["consensus_error"][k] = np.linalg.norm(x - xbar, axis=1).max()
    f_values[k] = prob.value(xbar)


def _check_sum(before, after, g, alpha, k):
    expected = before.sum(axis=0) - alpha * g.sum(axis=0)
    err = float(np.abs(after.sum(axis=0) - expected).max())
    if err > CONSERVATION_TOL * (1 + float(np.abs(before).sum())):
        raise NumericError(f"state-sum recursion violated at k={k} (error {err:.3g})")


# -- rate report -----------------------------------------------------------

@dataclass(frozen=True)
class RateReport:
    C1_emp: float
    C2_emp: float
    envelope_ok: bool | None
    grid: tuple
    gaps: tuple
    ratios: tuple

    def to_dict(self) -> dict:
        return {"C1_emp": self.C1_emp, "C2_emp": self.C2_emp, "envelope_ok": self.envelope_ok,
                "grid": list(self.grid), "gaps": list(self.gaps), "ratios": list(self.ratios)}


def k_grid(K: int) -> tuple:
    if K < 8:
        raise InputError(f"rate report needs at least 8 iterations, got {K}")
    return (K // 8, K // 4, K // 2, K)


def fit_rate_constants(trace: RunTrace, sched: StepSchedule, grid=None):
    """Non-negative fit of ``f_m - f* <= C1/S1 + C2 S2/S1`` over the K grid.

    ``S1`` and ``S2`` are the partial sums of ``alpha_k`` and ``alpha_k^2`` up
    to each grid point.
    """
    if trace.f_star is None or not np.isfinite(trace.f_star):
        raise InputError("rate report needs the optimum value f*")
    grid = k_grid(trace.config.iterations) if grid is None else tuple(grid)
    alphas = sched.alphas(grid[-1] + 1)
    s1, s2 = np.cumsum(alphas), np.cumsum(alphas ** 2)
    running_min = np.minimum.accumulate(trace.f_values)
    gaps = np.array([max(running_min[K] - trace.f_star, 0.0) for K in grid])
    design = np.array([[1.0 / s1[K], s2[K] / s1[K]] for K in grid])
    (c1, c2), _ = nnls(design, gaps)
    return float(c1), float(c2), gaps


def rate_envelope(trace: RunTrace, sched: StepSchedule, slack: float = 0.2) -> RateReport:
    """Check ``(f_m - f*) / (ln K / sqrt K)`` is non-increasing (within ``slack``) over the K grid."""
    if sched.exponent != 0.5:
        raise InputError(f"rate envelope needs an inverse_sqrt schedule, got exponent {sched.exponent}")
    grid = k_grid(trace.config.iterations)
    c1, c2, gaps = fit_rate_constants(trace, sched, grid)
    ratios = gaps / np.array([math.log(K) / math.sqrt(K) for K in grid])
    ok = bool(all(ratios[j + 1] <= (1 + slack) * ratios[j] for j in range(len(grid) - 1)))
    return RateReport(c1, c2, ok, grid, tuple(map(float, gaps)), tuple(map(float, ratios)))


def rate_report(trace: RunTrace) -> dict:
    """Everything written to ``<runid>.rate.json``."""
    out = {"f_star": trace.f_star, "f_m": trace.f_m, "best_k": trace.best_k,
           "wall_time": trace.wall_time, "config_hash": trace.config.config_hash}
    sched = trace.config.schedule
    if trace.config.iterations >= 8:
        if sched.exponent == 0.5:
            out.update(rate_envelope(trace, sched).to_dict())
        else:
            c1, c2, gaps = fit_rate_constants(trace, sched)
            out.update({"C1_emp": c1, "C2_emp": c2, "envelope_ok": None,
                        "grid": list(k_grid(trace.config.iterations)), "gaps": gaps.tolist()})
    return out


def write_outputs(trace: RunTrace, out_dir, run_id: str | None = None) -> dict:
    """Write trace CSV, resolved config JSON, rate JSON and plot CSV; return the paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    run_id = run_id or trace.config.run_id
    paths = {
        "trace": out_dir / f"{run_id}.trace.csv",
        "config": out_dir / f"{run_id}.config.json",
        "rate": out_dir / f"{run_id}.rate.json",
        "plot": out_dir / f"{run_id}.plot.csv",
    }
    paths["trace"].write_text(trace.to_csv())
    cfg = trace.config.to_dict()
    paths["config"].write_text(json.dumps(
        {**cfg, "config_hash": trace.config.config_hash}, indent=2, sort_keys=True) + "\n")
    paths["rate"].write_text(json.dumps(rate_report(trace), indent=2, sort_keys=True) + "\n")
    paths["plot"].write_text(trace.plot_csv())
    return paths


def load_config(path) -> RunConfig:
    """Read a config file; a ``config_hash`` key (from an echoed config) is ignored."""
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"config {path} is not valid JSON: {exc}") from None
    if isinstance(raw, dict):
        raw.pop("config_hash", None)
    return RunConfig.from_dict(raw)


# -- comparisons and sweeps ------------------------------------------------

@dataclass
class Comparison:
    traces: dict
    x_hat_star: np.ndarray | None
    claims: dict

    def table(self) -> list[dict]:
        return [{"name": name, **t.summary()} for name, t in self.traces.items()]

    def residual_series(self) -> dict:
        return {name: t.residual for name, t in self.traces.items()}


def compare(cfgs, problem=None) -> Comparison:
    """Run several algorithms on one graph/problem and evaluate the qualitative claims.

    Claims (only those whose algorithms are present): ``dgd_row_wrong_limit``
    (row-stochastic DGD settles nearer the pi-weighted minimizer than the true
    one and ends at least 5x farther than D-DGD), ``decays_<algo>`` for D-DGD
    and gradient-push (terminal residual below 0.1), and ``push_parity``
    (D-DGD and gradient-push terminal residuals within 10x).
    """
    cfgs = list(cfgs)
    if not cfgs:
        raise InputError("compare needs at least one config")
    ref = cfgs[0]
    for c in cfgs[1:]:
        for key in ("graph", "problem", "init", "iterations"):
            if getattr(c, key) != getattr(ref, key):
                raise InputError(f"configs disagree on '{key}': {getattr(ref, key)} vs {getattr(c, key)}")
    g = build_graph(ref)
    prob = build_problem(ref, g.n) if problem is None else problem
    traces = {}
    for c in cfgs:
        name, i = c.algorithm, 2
        while name in traces:
            name, i = f"{c.algorithm}#{i}", i + 1
        traces[name] = run(c, prob, g)

    claims, x_hat = {}, None
    final = {name: float(t.residual[-1]) for name, t in traces.items()}
    if "dgd_row" in traces:
        a, _ = build_weights(traces["dgd_row"].config, g)
        pi = spectral.stationary_distribution(a)
        x_hat, _ = objective.weighted_objective(prob, pi).optimum
        xbar = traces["dgd_row"].final_x.mean(axis=0)
        x_star = traces["dgd_row"].x_star
        claim = np.linalg.norm(xbar - x_hat) < np.linalg.norm(xbar - x_star)
        if "ddgd" in traces:
            claim = claim and final["dgd_row"] >= 5 * final["ddgd"]
        claims["dgd_row_wrong_limit"] = bool(claim)
    for algo in ("ddgd", "gradient_push"):
        if algo in traces:
            claims[f"decays_{algo}"] = final[algo] < 0.1
    if "ddgd" in traces and "gradient_push" in traces:
        lo, hi = sorted((final["ddgd"], final["gradient_push"]))
        claims["push_parity"] = bool(hi <= 10 * lo)
    return Comparison(traces, x_hat, claims)


def iterations_to(residual: np.ndarray, threshold: float = 1e-2):
    hit = np.flatnonzero(residual <= threshold)
    return int(hit[0]) if hit.size else None


@dataclass
class SweepResult:
    rows: list
    inversions: int
    trend_ok: bool


def density_sweep(base: RunConfig, extra_edge_probs, threshold: float = 1e-2) -> SweepResult:
    """Run ``base`` on random graphs of increasing density; count iterations to ``threshold``.

    The trend is accepted when iterations-to-threshold is non-increasing with
    at most one inversion; runs that never reach the threshold count as infinite.
    """
    probs = [float(p) for p in extra_edge_probs]
    if probs != sorted(probs):
        raise InputError("extra_edge_probs must be sorted ascending")
    if base.graph["kind"] != "random":
        raise InputError("density sweep needs a random graph spec")
    g0 = build_graph(base)
    prob = build_problem(base, g0.n)
    rows = []
    for p in probs:
        cfg = base.replace(graph={"extra_edge_prob": p})
        g = build_graph(cfg)
        trace = run(cfg, prob, g)
        rows.append({"extra_edge_prob": p, "links": g.num_links, "epsilon": trace.epsilon,
                     "iterations_to_threshold": iterations_to(trace.residual, threshold),
                     "final_residual": float(trace.residual[-1])})
    steps = [math.inf if r["iterations_to_threshold"] is None else r["iterations_to_threshold"]
             for r in rows]
    inversions = sum(1 for u, v in zip(steps, steps[1:]) if v > u)
    return SweepResult(rows, inversions, inversions <= 1)


def variants(base: dict, overrides) -> list[RunConfig]:
    out = []
    for ov in overrides:
        d = copy.deepcopy(base)
        for key, value in ov.items():
            if isinstance(value, dict) and isinstance(d.get(key), dict):
                d[key] = {**d[key], **value}
            else:
                d[key] = value
        out.append(RunConfig.from_dict(d))
    return out
