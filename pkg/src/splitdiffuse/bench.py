"""Monte Carlo error benchmarks: the layout table, parameter sweeps and the
greedy-vs-iterative comparison.

Every trial draws its own stream from ``(master_seed, trial)``, so a run is a
pure function of its arguments and can be split across worker processes
without changing any number.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .core import GREEDY, ITERATIVE, SplitStrategy, dimension_ranks, validate_layout
from .samplers import SamplerSpec, stream

CSV_HEADER = [
    "layout", "sampling", "strategy", "constraints", "trials",
    "err1_mean", "err1_stderr", "err2_mean", "err2_stderr",
]

TABLE1_LAYOUTS = ((4, 4), (8, 8), (16, 16), (32, 32), (64, 64))
TABLE1_THETAS = (4 / math.pi, math.pi / 4)

THETA_GRID = np.linspace(0.0, math.pi, 64, endpoint=False)
LOG_GRID = np.logspace(-3, 3, 32, base=2.0)


def strategy_label(strategy: SplitStrategy) -> str:
    label = strategy.mode
    if strategy.tie_break is not None:
        label += "[" + "-".join(map(str, strategy.tie_break)) + "]"
    if strategy.start_dimension is not None:
        label += f"@{strategy.start_dimension}"
    return label


def format_layout(extents) -> str:
    return "x".join(str(int(e)) for e in extents)


@dataclass(frozen=True)
class Stat:
    mean: float
    std: float
    stderr: float
    trials: int

    @classmethod
    def of(cls, values: np.ndarray) -> "Stat":
        values = np.asarray(values, dtype=np.float64)
        t = values.size
        std = float(values.std(ddof=1)) if t > 1 else 0.0
        return cls(float(values.mean()), std, std / math.sqrt(t), t)


@dataclass(frozen=True)
class AggregateStats:
    err_1: Stat
    err_2: Stat
    err_1_dim: tuple
    err_2_dim: tuple

    @property
    def trials(self) -> int:
        return self.err_1.trials


@dataclass(frozen=True)
class TrialResult:
    layout: tuple
    sampling: str
    strategy: str
    trial: int
    err_1: float
    err_2: float
    err_1_dim: tuple
    err_2_dim: tuple


@dataclass(frozen=True)
class BenchRow:
    layout: tuple
    sampling: SamplerSpec
    strategy: str
    stats: AggregateStats

    @property
    def constraints(self) -> int:
        n = math.prod(self.layout)
        return math.comb(n, 2) * len(self.layout)


class TrialError(RuntimeError):
    def __init__(self, trial, cause):
        super().__init__(f"trial {trial}: {cause}")
        self.trial = trial


def _count_block(layout, spec, strategies, lo, hi, master_seed):
    """Violation counts for trials [lo, hi): int64 array (hi-lo, S, 2, k)."""
    k = len(layout)
    n = math.prod(layout)
    ext = np.asarray(layout, dtype=np.int64)
    plans = [(s.mode_code(), s.preference(k), s.start(k)) for s in strategies]
    out = np.empty((hi - lo, len(strategies), 2, k), dtype=np.int64)
    for t in range(lo, hi):
        try:
            coords = spec.draw(stream(master_seed, t), n)
            ranks = dimension_ranks(coords)
            for si, (mode, prefs, start) in enumerate(plans):
                cells = _kernels.split_diffuse(ranks, ext, mode, prefs, start)
                v1, v2 = _kernels.pair_violations(coords, cells)
                out[t - lo, si, 0] = v1
                out[t - lo, si, 1] = v2
        except Exception as exc:
            raise TrialError(t, exc) from exc
    return out


def trial_counts(layout, spec: SamplerSpec, strategies: Sequence[SplitStrategy], trials: int,
                 master_seed: int, workers: int = 1) -> np.ndarray:
    """Per-trial violation counts, ordered by trial index regardless of workers."""
    layout = tuple(int(g) for g in layout)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if spec.family in ("uniform", "gaussian") and len(layout) != 2:
        raise ValueError("the samplers produce 2-d points; layout must have two extents")
    validate_layout(layout, math.prod(layout), len(layout))
    strategies = tuple(strategies)
    if workers <= 1 or trials < 2 * workers:
        return _count_block(layout, spec, strategies, 0, trials, master_seed)
    bounds = np.linspace(0, trials, workers + 1).astype(int)
    with ProcessPoolExecutor(workers) as pool:
        futures = [
            pool.submit(_count_block, layout, spec, strategies, int(a), int(b), master_seed)
            for a, b in zip(bounds[:-1], bounds[1:]) if b > a
        ]
        return np.concatenate([f.result() for f in futures])


def _ratios(counts: np.ndarray, layout) -> tuple:
    """counts (..., 2, k) -> (err1, err2, err1_dim, err2_dim) float arrays."""
    pairs = math.comb(math.prod(layout), 2)
    k = len(layout)
    if pairs == 0:
        zero = np.zeros(counts.shape[:-2])
        dim = np.zeros(counts.shape[:-2] + (k,))
        return zero, zero, dim, dim
    per_dim = counts / pairs
    total = counts.sum(axis=-1) / (pairs * k)
    return total[..., 0], total[..., 1], per_dim[..., 0, :], per_dim[..., 1, :]


def aggregate(counts: np.ndarray, layout) -> AggregateStats:
    """``counts`` (trials, 2, k) for a single strategy."""
    e1, e2, d1, d2 = _ratios(counts, layout)
    k = len(layout)
    return AggregateStats(
        Stat.of(e1), Stat.of(e2),
        tuple(Stat.of(d1[:, l]) for l in range(k)),
        tuple(Stat.of(d2[:, l]) for l in range(k)),
    )


def run_trials(layout, sampler_spec: SamplerSpec, strategy: SplitStrategy = GREEDY, trials: int = 1000,
               master_seed: int = 0, workers: int = 1) -> AggregateStats:
    counts = trial_counts(layout, sampler_spec, [strategy], trials, master_seed, workers)
    return aggregate(counts[:, 0], layout)


def run_paired(layout, sampler_spec: SamplerSpec, strategies=(GREEDY, ITERATIVE), trials: int = 1000,
               master_seed: int = 0, workers: int = 1) -> dict:
    """Run several strategies on the same sampled clouds; keyed by strategy label."""
    counts = trial_counts(layout, sampler_spec, strategies, trials, master_seed, workers)
    return {strategy_label(s): aggregate(counts[:, i], layout) for i, s in enumerate(strategies)}


def trial_results(layout, sampler_spec: SamplerSpec, strategies=(GREEDY,), trials: int = 1000,
                  master_seed: int = 0) -> list:
    layout = tuple(int(g) for g in layout)
    counts = trial_counts(layout, sampler_spec, strategies, trials, master_seed)
    e1, e2, d1, d2 = _ratios(counts, layout)
    out = []
    for t in range(trials):
        for si, s in enumerate(strategies):
            out.append(TrialResult(layout, str(sampler_spec), strategy_label(s), t,
                                   float(e1[t, si]), float(e2[t, si]),
                                   tuple(d1[t, si].tolist()), tuple(d2[t, si].tolist())))
    return out


def table1(trials: int = 1000, master_seed: int = 0, thetas=TABLE1_THETAS, layouts=TABLE1_LAYOUTS,
           strategy: SplitStrategy = GREEDY, workers: int = 1) -> list:
    """Uniform rows for every layout, then one Gaussian block per theta."""
    specs = [SamplerSpec("uniform", rho=1.0)]
    specs += [SamplerSpec("gaussian", theta=float(t), phi=2.0) for t in thetas]
    rows = []
    for spec in specs:
        for layout in layouts:
            stats = run_trials(layout, spec, strategy, trials, master_seed, workers)
            rows.append(BenchRow(tuple(layout), spec, strategy_label(strategy), stats))
    return rows


def default_grid(parameter: str) -> np.ndarray:
    if parameter == "theta":
        return THETA_GRID.copy()
    if parameter in ("rho", "phi"):
        return LOG_GRID.copy()
    raise ValueError(f"unknown sweep parameter {parameter!r}")


def sweep(parameter: str, values=None, base: SamplerSpec | None = None, layout=(8, 8), trials: int = 1000,
          master_seed: int = 0, strategies=(GREEDY,), workers: int = 1) -> list:
    """One row per (value, strategy). Every value reuses the same trial seeds,
    and every strategy sees the same clouds."""
    if parameter not in ("rho", "theta", "phi"):
        raise ValueError(f"unknown sweep parameter {parameter!r}")
    if base is None:
        base = SamplerSpec("uniform") if parameter == "rho" else SamplerSpec("gaussian", theta=math.pi / 2, phi=2.0)
    if parameter == "rho" and base.family != "uniform" or parameter != "rho" and base.family != "gaussian":
        raise ValueError(f"{parameter} is not a parameter of {base.family}")
    values = default_grid(parameter) if values is None else np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("sweep needs at least one value")
    layout = tuple(int(g) for g in layout)
    rows = []
    for v in values:
        spec = SamplerSpec(base.family, **{**_params(base), parameter: float(v)})
        counts = trial_counts(layout, spec, strategies, trials, master_seed, workers)
        for si, s in enumerate(strategies):
            rows.append(BenchRow(layout, spec, strategy_label(s), aggregate(counts[:, si], layout)))
    return rows


def _params(spec: SamplerSpec) -> dict:
    if spec.family == "uniform":
        return {"rho": spec.rho}
    return {"theta": spec.theta, "phi": spec.phi}


def _g(x: float) -> str:
    return f"{x:.6g}"


def rows_to_csv(rows: Sequence[BenchRow]) -> str:
    k = max((len(r.layout) for r in rows), default=2)
    header = list(CSV_HEADER)
    for e in (1, 2):
        for l in range(k):
            header += [f"err{e}_d{l}_mean", f"err{e}_d{l}_stderr"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        s = r.stats
        line = [format_layout(r.layout), str(r.sampling), r.strategy, r.constraints, s.trials,
                _g(s.err_1.mean), _g(s.err_1.stderr), _g(s.err_2.mean), _g(s.err_2.stderr)]
        for dims in (s.err_1_dim, s.err_2_dim):
            for st in dims:
                line += [_g(st.mean), _g(st.stderr)]
        w.writerow(line)
    return buf.getvalue()
