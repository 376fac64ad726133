"""Experiment configuration and the trace-producing runner behind ``dacnet run``."""

from __future__ import annotations

import dataclasses
import hashlib
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .baselines import SOLVERS, StackedProblem
from .dac import DacConfig, DacSolver, InnerConfig
from .formats import read_edge_list
from .graph import random_geometric_graph
from .objective import make_objective
from .oracle import solve
from .partition import build_partition
from .svgplot import line_plot
from .trace import ConvergenceTrace, fmt

log = logging.getLogger(__name__)

OUTPUT_ENV = "DACNET_OUTPUT_DIR"
METHODS = ("dac", "dac-inexact", "dgd", "diffusion", "extra", "pg-extra", "nids")
SMOOTH_ONLY = {"dgd", "diffusion", "extra"}
LASSO_ONLY = {"pg-extra", "nids"}
# keys that do not change any number written to disk
_UNHASHED = {"output", "emit_svg", "jobs"}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    n: int = 256
    graph_seed: int = 1
    edge_list: str = ""
    kind: str = "ls"
    sigma: float = 5.0
    mu: float = 10.0
    rhs_seed: int = 1
    rhs_trials: int = 1
    r0: int = 1
    R: int = 3
    m: int = 1
    method: str = "dac"
    max_iter: int = 100
    baseline_max_iter: int = 100_000
    stop_tol: float = 1e-14
    target_err: float = 0.0
    inner_tol: float = 1e-12
    eps0: float = 1e-4
    eps_decay: float = 0.5
    workers: int = 1
    jobs: int = 1
    clock: str = "wall"
    buckets: int = 50
    output: str = "out"
    emit_svg: bool = False

    @property
    def methods(self) -> list[str]:
        return [s.strip() for s in self.method.split(",") if s.strip()]

    def validate(self):
        if self.kind not in ("ls", "lasso"):
            raise ConfigError(f"field 'kind': expected ls or lasso, got {self.kind!r}")
        if not self.methods:
            raise ConfigError("field 'method': no method given")
        for meth in self.methods:
            if meth not in METHODS:
                raise ConfigError(f"field 'method': unknown method {meth!r}")
            if meth in SMOOTH_ONLY and self.kind != "ls":
                raise ConfigError(f"method {meth} needs kind=ls")
            if meth in LASSO_ONLY and self.kind != "lasso":
                raise ConfigError(f"method {meth} needs kind=lasso")
        if self.clock not in ("wall", "iter"):
            raise ConfigError(f"field 'clock': expected wall or iter, got {self.clock!r}")
        if self.rhs_trials < 1 or self.buckets < 2:
            raise ConfigError("rhs_trials must be >= 1 and buckets >= 2")
        if self.R < 1 or self.m < 1 or self.r0 < 1:
            raise ConfigError("r0, R and m must be >= 1")
        return self

    def canonical(self) -> str:
        items = sorted((f.name, getattr(self, f.name)) for f in fields(self)
                       if f.name not in _UNHASHED)
        return "".join(f"{k}={v}\n" for k, v in items)

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:10]


def _coerce(name: str, raw: str, where: str):
    ftype = {f.name: f.type for f in fields(ExperimentConfig)}.get(name)
    if ftype is None:
        raise ConfigError(f"{where}: unknown field {name!r}")
    raw = raw.strip()
    try:
        if ftype == "int":
            return int(raw)
        if ftype == "float":
            return float(raw)
        if ftype == "bool":
            low = raw.lower()
            if low not in ("1", "0", "true", "false", "yes", "no"):
                raise ValueError(raw)
            return low in ("1", "true", "yes")
        return raw
    except ValueError:
        raise ConfigError(f"{where}: field {name!r} expects {ftype}, got {raw!r}") from None


def parse_config_text(text: str, source: str = "<config>") -> dict:
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key=value")
        key, raw = line.split("=", 1)
        key = key.strip()
        values[key] = _coerce(key, raw, f"{source}:{lineno}")
    return values


def load_config(path=None, overrides: dict | None = None) -> ExperimentConfig:
    values = {}
    if path is not None:
        values.update(parse_config_text(Path(path).read_text(), str(path)))
    for key, raw in (overrides or {}).items():
        values[key] = _coerce(key, str(raw), f"--{key}")
    cfg = ExperimentConfig(**values)
    if os.environ.get(OUTPUT_ENV):
        cfg.output = os.environ[OUTPUT_ENV]
    return cfg.validate()


# ------------------------------------------------------------------ running

def build_graph(cfg: ExperimentConfig):
    if cfg.edge_list:
        return read_edge_list(cfg.edge_list)
    return random_geometric_graph(cfg.n, cfg.graph_seed).graph


def run_method(method: str, obj, part, cfg: ExperimentConfig, x_hat) -> ConvergenceTrace:
    target = cfg.target_err if cfg.target_err > 0 else None
    if method in ("dac", "dac-inexact"):
        eps = None
        if method == "dac-inexact":
            eps0, decay = cfg.eps0, cfg.eps_decay
            eps = lambda n: eps0 * decay ** n  # noqa: E731
        inner = InnerConfig(method="cg" if method == "dac-inexact" and obj.smooth else "auto",
                            tol=cfg.inner_tol)
        dcfg = DacConfig(r0=cfg.r0, radius=cfg.R, max_iter=cfg.max_iter, stop_tol=cfg.stop_tol,
                         inner=inner, eps_schedule=eps, workers=cfg.workers, target_err=target)
        solver = DacSolver(obj, part, dcfg)
        try:
            _, trace = solver.solve(x_ref=x_hat, inexact=method == "dac-inexact")
        finally:
            solver.close()
    else:
        problem = StackedProblem(obj, part)
        _, trace = SOLVERS[method](problem, x_ref=x_hat, max_iter=cfg.baseline_max_iter,
                                   stop_tol=cfg.stop_tol, target_err=target)
    if cfg.clock == "iter":
        trace.rows = [(it, float(it), e2, ei, f) for it, _, e2, ei, f in trace.rows]
    trace.method = method
    return trace


def _trial(cfg, g, part, trial: int):
    obj = make_objective(cfg.kind, g, cfg.sigma, cfg.mu, cfg.rhs_seed + trial)
    x_hat = solve(obj)
    traces = {meth: run_method(meth, obj, part, cfg, x_hat) for meth in cfg.methods}
    return x_hat, traces


def bucket_times(traces: list, buckets: int) -> np.ndarray:
    t_end = max(tr.rows[-1][1] for tr in traces)
    return np.linspace(0.0, t_end, buckets)


def log_error_at(trace: ConvergenceTrace, t: float) -> float:
    """log10 of ``err_l2`` at the last row with ``seconds <= t``."""
    secs = trace.column("seconds")
    k = int(np.searchsorted(secs, t, side="right")) - 1
    err = trace.rows[max(k, 0)][2]
    return float(np.log10(max(err, 1e-300)))


def aggregate(traces_by_method: dict, buckets: int) -> dict:
    """``method -> (times, mean log10 error)`` over trials."""
    out = {}
    for meth, traces in traces_by_method.items():
        times = bucket_times(traces, buckets)
        means = np.array([np.mean([log_error_at(tr, t) for tr in traces]) for t in times])
        out[meth] = (times, means)
    return out


@dataclass
class ExperimentResult:
    files: list
    traces: dict
    aggregate: dict
    digest: str


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    cfg.validate()
    outdir = Path(cfg.output)
    outdir.mkdir(parents=True, exist_ok=True)
    g = build_graph(cfg)
    part = build_partition(g, cfg.r0, cfg.R, cfg.m)
    log.info("graph n=%d, %d centers", g.n, len(part.centers))
    trials = range(cfg.rhs_trials)
    if cfg.jobs > 1:
        with ThreadPoolExecutor(cfg.jobs) as pool:
            results = list(pool.map(lambda t: _trial(cfg, g, part, t), trials))
    else:
        results = [_trial(cfg, g, part, t) for t in trials]

    digest = cfg.digest
    files = []
    by_method = {meth: [] for meth in cfg.methods}
    for trial, (x_hat, traces) in enumerate(results):
        path = outdir / f"oracle_t{trial:03d}_{digest}.csv"
        path.write_text("vertex,value\n" + "".join(f"{i},{fmt(v)}\n" for i, v in enumerate(x_hat)))
        files.append(path)
        for meth, tr in traces.items():
            path = outdir / f"trace_{meth}_t{trial:03d}_{digest}.csv"
            tr.write_csv(path)
            files.append(path)
            by_method[meth].append(tr)
    agg = aggregate(by_method, cfg.buckets)
    path = outdir / f"aggregate_{digest}.csv"
    with open(path, "w", newline="\n") as fh:
        fh.write("method,bucket,seconds,mean_log10_err\n")
        for meth, (times, means) in agg.items():
            for k, (t, v) in enumerate(zip(times, means)):
                fh.write(f"{meth},{k},{fmt(t)},{fmt(v)}\n")
    files.append(path)
    if cfg.emit_svg:
        title = f"{cfg.kind} n={g.n}: mean log10 error over {cfg.rhs_trials} trial(s)"
        xlabel = "iterations" if cfg.clock == "iter" else "seconds"
        svg = line_plot(agg, title=title, xlabel=xlabel)
        path = outdir / f"panel_{digest}.svg"
        path.write_text(svg)
        files.append(path)
    (outdir / f"config_{digest}.txt").write_text(cfg.canonical())
    return ExperimentResult(files, by_method, agg, digest)


def config_field_names() -> list[str]:
    return [f.name for f in dataclasses.fields(ExperimentConfig)]
