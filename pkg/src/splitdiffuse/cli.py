"""``splitdiffuse`` command line.

Exit status is 0 on success, 1 for invalid input and 2 for I/O failures.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from datetime import date
from pathlib import Path

from . import bench, io, render, topics
from .core import SplitStrategy, ValidationError, split_diffuse
from .metrics import check_bound, evaluate
from .samplers import SamplerSpec


def parse_layout(text: str) -> tuple:
    try:
        ext = tuple(int(p) for p in text.lower().replace("×", "x").split("x"))
    except ValueError:
        raise ValidationError(f"bad layout {text!r}; expected e.g. 8x8") from None
    if not ext or any(e < 1 for e in ext):
        raise ValidationError(f"bad layout {text!r}")
    return ext


def _strategy(args) -> SplitStrategy:
    tie = tuple(int(d) for d in args.tie_break.split(",")) if args.tie_break else None
    return SplitStrategy(args.strategy, tie, args.start_dimension)


def _window(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise ValidationError(f"bad window {text!r}; expected START,END")
    try:
        return tuple(topics.parse_ts(p) for p in parts)
    except ValueError:
        raise ValidationError(f"bad window {text!r}") from None


def _g6(x: float) -> float:
    return float(f"{x:.6g}")


def _emit(text: str, out) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _topic_ids(assignment):
    t = len(assignment.ids)
    expected = [str(i) for i in range(t)]
    if sorted(assignment.ids, key=str) != sorted(expected):
        raise ValidationError("topic placement ids must be the topic indices 0..T-1")
    return expected


def _render_spec(args) -> render.RenderSpec:
    dom = tuple(float(v) for v in args.domain.split(",")) if getattr(args, "domain", None) else None
    return render.RenderSpec(cell=args.cell, scale=args.scale, domain=dom, labels=args.labels)


def _write_grid(gv, args) -> None:
    if args.format == "svg":
        _emit(render.grid_svg(gv, _render_spec(args)), args.output)
    else:
        _emit(io.grid_values_to_csv(gv), args.output)


def cmd_place(args):
    cloud = io.load_points(args.points)
    layout = parse_layout(args.layout)
    _emit(io.assignment_to_csv(split_diffuse(cloud, layout, _strategy(args))), args.output)


def cmd_eval(args):
    cloud = io.load_points(args.points)
    assignment = io.load_assignment(args.assignment)
    report = evaluate(cloud, assignment)
    d = report.to_dict()
    for key in ("err_1", "err_2"):
        d[key] = _g6(d[key])
    for key in ("err_1_per_dim", "err_2_per_dim"):
        d[key] = [_g6(v) for v in d[key]]
    d["within_bound"] = check_bound(report)
    _emit(json.dumps(d, indent=2) + "\n", args.output)


def cmd_sample(args):
    spec = SamplerSpec.parse(args.spec)
    n = args.n if args.n is not None else math.prod(parse_layout(args.layout))
    cloud = spec.sample(n, args.seed)
    cloud = type(cloud)(tuple(f"p{i}" for i in range(n)), cloud.coords)
    _emit(io.points_to_csv(cloud), args.output)


def cmd_bench_table1(args):
    trials = args.trials if args.trials is not None else (100 if args.quick else 1000)
    thetas = tuple(float(t) for t in args.thetas.split(",")) if args.thetas else bench.TABLE1_THETAS
    layouts = tuple(parse_layout(t) for t in args.layouts.split(",")) if args.layouts else bench.TABLE1_LAYOUTS
    rows = bench.table1(trials, args.seed, thetas, layouts, _strategy(args), args.workers)
    _emit(bench.rows_to_csv(rows), args.output)


def cmd_bench_sweep(args):
    trials = args.trials if args.trials is not None else (100 if args.quick else 1000)
    values = [float(v) for v in args.values.split(",")] if args.values else None
    base = SamplerSpec.parse(args.base) if args.base else None
    strategies = [SplitStrategy(m.strip(), None if not args.tie_break else tuple(int(d) for d in args.tie_break.split(",")),
                                args.start_dimension)
                  for m in args.strategies.split(",")]
    rows = bench.sweep(args.param, values, base, parse_layout(args.layout), trials, args.seed, strategies, args.workers)
    text = bench.rows_to_csv(rows)
    if args.format == "svg":
        text = render.curves_svg(text, _render_spec(args))
    _emit(text, args.output)


def cmd_volume(args):
    records = io.load_activities(args.activities)
    a = io.load_assignment(args.assignment)
    who = args.group.split(",") if args.group else args.entity
    b = topics.build_behavior_set(records, who, _window(args.window))
    _write_grid(topics.topical_volume(b, a, _topic_ids(a)), args)


def cmd_risk(args):
    records = io.load_activities(args.activities)
    a = io.load_assignment(args.assignment)
    bench_who = args.peers.split(",") if args.peers else args.entity
    b1 = topics.build_behavior_set(records, bench_who, _window(args.benchmark))
    b2 = topics.build_behavior_set(records, args.entity, _window(args.current))
    _write_grid(topics.topical_risk(b1, b2, a, _topic_ids(a)), args)


def _month(text: str) -> date:
    try:
        y, m = text.strip().split("-")[:2]
        return date(int(y), int(m), 1)
    except ValueError:
        raise ValidationError(f"bad month {text!r}; expected YYYY-MM") from None


def cmd_curtain(args):
    records = io.load_activities(args.activities)
    a = io.load_assignment(args.assignment)
    months = [_month(m) for m in args.months.split(",")]
    matrix, steps = topics.topic_curtain(records, args.entity, months, a, _window(args.benchmark), _topic_ids(a))
    if args.format == "svg":
        _emit(render.curtain_svg(matrix, _render_spec(args)), args.output)
    else:
        _emit(io.curtain_to_csv(matrix, steps), args.output)


def cmd_shower(args):
    records = io.load_activities(args.activities)
    a = io.load_assignment(args.assignment)
    windows = [_window(w) for w in args.windows.split(";")]
    grids = topics.topic_shower(records, args.entity, windows, a, _window(args.benchmark), _topic_ids(a))
    outdir = Path(args.output or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    for i, gv in enumerate(grids):
        if args.format == "svg":
            (outdir / f"shower_{i:03d}.svg").write_text(render.grid_svg(gv, _render_spec(args)))
        else:
            io.save_grid_values(gv, outdir / f"shower_{i:03d}.csv")


def cmd_render(args):
    kind = io.sniff(args.input)
    spec = _render_spec(args)
    if kind == "grid":
        text = render.grid_svg(io.load_grid_values(args.input, args.kind), spec)
    elif kind == "curtain":
        text = render.curtain_svg(io.load_curtain(args.input)[0], spec)
    elif kind == "bench":
        text = render.curves_svg(Path(args.input).read_text(), spec)
    else:
        raise ValidationError(f"cannot render a {kind} file")
    _emit(text, args.output)


def _add_strategy(p):
    p.add_argument("--strategy", choices=("greedy", "iterative"), default="greedy")
    p.add_argument("--tie-break", help="dimension preference order, e.g. 1,0 (default: last dimension first)")
    p.add_argument("--start-dimension", type=int, help="first split dimension for iterative mode")


def _add_render(p):
    p.add_argument("--cell", type=float, default=24.0)
    p.add_argument("--scale", choices=("auto", "sequential", "diverging"), default="auto")
    p.add_argument("--domain", help="fixed color domain MIN,MAX")
    p.add_argument("--labels", choices=("none", "topic-id", "index"), default="none")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="splitdiffuse", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("place", help="place points onto a grid")
    p.add_argument("points")
    p.add_argument("--layout", required=True)
    _add_strategy(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_place)

    p = sub.add_parser("eval", help="topology error of an assignment (JSON)")
    p.add_argument("points")
    p.add_argument("assignment")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sample", help="draw a synthetic point cloud")
    p.add_argument("spec", help="e.g. uniform:rho=1 or gaussian:theta=0.785398,phi=2")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--n", type=int)
    g.add_argument("--layout")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_sample)

    pb = sub.add_parser("bench", help="Monte Carlo error benchmarks (CSV)")
    bsub = pb.add_subparsers(dest="bench_command", required=True)
    for name, func in (("table1", cmd_bench_table1), ("sweep", cmd_bench_sweep)):
        p = bsub.add_parser(name)
        p.add_argument("--trials", type=int)
        p.add_argument("--quick", action="store_true", help="100 trials unless --trials is given")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("-o", "--output")
        p.set_defaults(func=func)
        if name == "table1":
            _add_strategy(p)
            p.add_argument("--thetas", help="comma-separated Gaussian angles in radians")
            p.add_argument("--layouts", help="comma-separated layouts, e.g. 4x4,8x8")
        else:
            p.add_argument("--param", choices=("rho", "theta", "phi"), required=True)
            p.add_argument("--values", help="comma-separated values (default grid otherwise)")
            p.add_argument("--base", help="sampler providing the fixed parameters")
            p.add_argument("--layout", default="8x8")
            p.add_argument("--strategies", default="greedy", help="e.g. greedy,iterative (paired)")
            p.add_argument("--tie-break")
            p.add_argument("--start-dimension", type=int)
            p.add_argument("--format", choices=("csv", "svg"), default="csv")
            _add_render(p)

    for name, func in (("volume", cmd_volume), ("risk", cmd_risk), ("curtain", cmd_curtain), ("shower", cmd_shower)):
        p = sub.add_parser(name)
        p.add_argument("activities", help="JSON-lines activity log")
        p.add_argument("assignment", help="topic placement CSV")
        p.add_argument("--format", choices=("csv", "svg"), default="csv")
        p.add_argument("-o", "--output", help="file (directory for shower)")
        _add_render(p)
        if name == "volume":
            g = p.add_mutually_exclusive_group(required=True)
            g.add_argument("--entity")
            g.add_argument("--group", help="comma-separated entities")
            p.add_argument("--window", required=True, help="START,END (ISO-8601, UTC)")
        else:
            p.add_argument("--entity", required=True)
            p.add_argument("--benchmark", required=True, help="START,END of the benchmark window")
        if name == "risk":
            p.add_argument("--current", required=True, help="START,END of the current window")
            p.add_argument("--peers", help="comma-separated peer entities for the benchmark")
        elif name == "curtain":
            p.add_argument("--months", required=True, help="comma-separated YYYY-MM")
        elif name == "shower":
            p.add_argument("--windows", required=True, help="semicolon-separated START,END windows")
        p.set_defaults(func=func)

    p = sub.add_parser("render", help="render a grid, curtain or benchmark CSV to SVG")
    p.add_argument("input")
    p.add_argument("--kind", choices=("volume", "risk"), default="risk")
    p.add_argument("-o", "--output")
    _add_render(p)
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, bench.TrialError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
