"""Self-contained SVG output for topic grids, curtains and benchmark curves.

Cell (0, ..., 0) is drawn at the upper-left corner; the first index grows to
the right and the second grows downward. 3-D grids are drawn as one panel
per value of the third index. Output bytes depend only on the inputs.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .core import ValidationError
from .samplers import SamplerSpec
from .topics import GridValues

WHITE = (255, 255, 255)
RED = (178, 24, 43)
BLUE = (33, 102, 172)
PALETTE = ("#1b1b1b", "#2166ac", "#b2182b", "#1a9850", "#762a83", "#e08214", "#35978f", "#8c510a")


@dataclass(frozen=True)
class RenderSpec:
    cell: float = 24.0
    scale: str = "auto"  # "sequential", "diverging" or "auto"
    domain: tuple | None = None
    labels: str = "none"  # "none", "topic-id" or "index"

    def __post_init__(self):
        if not self.cell > 0:
            raise ValidationError("cell size must be positive")
        if self.scale not in ("auto", "sequential", "diverging"):
            raise ValidationError(f"unknown color scale {self.scale!r}")
        if self.labels not in ("none", "topic-id", "index"):
            raise ValidationError(f"unknown label mode {self.labels!r}")
        if self.domain is not None and not self.domain[0] < self.domain[1]:
            raise ValidationError("fixed domain needs min < max")


def _mix(a, b, t):
    return tuple(int(round(x + (y - x) * t)) for x, y in zip(a, b))


def _hex(rgb):
    return "#%02x%02x%02x" % rgb


def color_for(value, scale, domain):
    lo, hi = domain
    if scale == "diverging":
        mid = 0.5 * (lo + hi)
        if value >= mid:
            t = 0.0 if hi == mid else min(1.0, (value - mid) / (hi - mid))
            return _hex(_mix(WHITE, RED, t))
        t = 0.0 if lo == mid else min(1.0, (mid - value) / (mid - lo))
        return _hex(_mix(WHITE, BLUE, t))
    t = 0.0 if hi == lo else min(1.0, max(0.0, (value - lo) / (hi - lo)))
    return _hex(_mix(WHITE, RED, t))


def _domain(values, scale, fixed):
    if fixed is not None:
        return float(fixed[0]), float(fixed[1])
    values = np.asarray(values, dtype=float)
    if scale == "diverging":
        m = float(np.abs(values).max()) if values.size else 0.0
        return -m, m
    if values.size == 0:
        return 0.0, 0.0
    return float(values.min()), float(values.max())


def _num(x: float) -> str:
    s = f"{x:.2f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


def _svg(width, height, body):
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_num(width)}" height="{_num(height)}" '
            f'viewBox="0 0 {_num(width)} {_num(height)}">\n')
    return head + "".join(body) + "</svg>\n"


def grid_svg(gv: GridValues, spec: RenderSpec = RenderSpec()) -> str:
    a = gv.assignment
    if a.k > 3:
        raise ValidationError("grids of more than three dimensions cannot be drawn")
    scale = spec.scale if spec.scale != "auto" else ("diverging" if gv.kind == "risk" else "sequential")
    dom = _domain(list(gv.values.values()), scale, spec.domain)
    ext = list(a.extents) + [1] * (3 - a.k)
    gap = spec.cell
    c = spec.cell
    width = ext[2] * ext[0] * c + (ext[2] - 1) * gap
    height = ext[1] * c
    body = []
    order = np.lexsort(a.cells.T[::-1])
    for r in order:
        pid = a.ids[r]
        cell = list(a.cells[r]) + [0] * (3 - a.k)
        x = cell[2] * (ext[0] * c + gap) + cell[0] * c
        y = cell[1] * c
        v = gv.values[pid]
        body.append(f'<rect x="{_num(x)}" y="{_num(y)}" width="{_num(c)}" height="{_num(c)}" '
                    f'fill="{color_for(v, scale, dom)}" stroke="#cccccc" stroke-width="0.5">'
                    f"<title>{escape(str(pid))}: {v:.6g}</title></rect>\n")
        if spec.labels != "none":
            text = str(pid) if spec.labels == "topic-id" else ",".join(str(int(i)) for i in a.cells[r])
            body.append(f'<text x="{_num(x + c / 2)}" y="{_num(y + c / 2)}" font-size="{_num(c / 3)}" '
                        f'text-anchor="middle" dominant-baseline="middle">{escape(text)}</text>\n')
    return _svg(width, height, body)


def curtain_svg(matrix, spec: RenderSpec = RenderSpec()) -> str:
    """Rows are time steps drawn top to bottom; columns are 1-D topic indices."""
    m = np.asarray(matrix, dtype=float)
    scale = spec.scale if spec.scale != "auto" else "diverging"
    dom = _domain(m.ravel(), scale, spec.domain)
    c = spec.cell
    body = []
    for t in range(m.shape[0]):
        for x in range(m.shape[1]):
            body.append(f'<rect x="{_num(x * c)}" y="{_num(t * c)}" width="{_num(c)}" height="{_num(c)}" '
                        f'fill="{color_for(m[t, x], scale, dom)}"/>\n')
    return _svg(m.shape[1] * c, m.shape[0] * c, body)


def _sweep_axis(specs):
    """Name and values of the sampler parameter that varies across rows."""
    for name in ("theta", "phi", "rho"):
        vals = [getattr(s, name) for s in specs]
        if len(set(vals)) > 1:
            return name, vals
    return "row", list(range(len(specs)))


def curves_svg(csv_text: str, spec: RenderSpec = RenderSpec(), width: float = 480, height: float = 320) -> str:
    """Line chart of the mean columns of a benchmark CSV against the swept parameter."""
    rows = list(csv.DictReader(csv_text.splitlines()))
    if not rows:
        raise ValidationError("no benchmark rows to plot")
    mean_cols = [c for c in rows[0] if c and c.endswith("_mean")]
    strategies = list(dict.fromkeys(r["strategy"] for r in rows))
    series = []
    for s in strategies:
        sub = [r for r in rows if r["strategy"] == s]
        name, xs = _sweep_axis([SamplerSpec.parse(r["sampling"]) for r in sub])
        for col in mean_cols:
            series.append((f"{s} {col[:-5]}", np.array(xs, float), np.array([float(r[col]) for r in sub])))
    xs_all = np.concatenate([x for _, x, _ in series])
    ys_all = np.concatenate([y for _, _, y in series])
    x0, x1 = float(xs_all.min()), float(xs_all.max())
    y0, y1 = 0.0, float(ys_all.max()) or 1.0
    if x1 == x0:
        x1 = x0 + 1.0
    pad = 40.0
    w, h = width - 2 * pad, height - 2 * pad

    def px(x):
        return pad + (x - x0) / (x1 - x0) * w

    def py(y):
        return pad + h - (y - y0) / (y1 - y0) * h

    body = [f'<rect x="{_num(pad)}" y="{_num(pad)}" width="{_num(w)}" height="{_num(h)}" fill="none" stroke="#000000"/>\n',
            f'<text x="{_num(pad)}" y="{_num(height - 8)}" font-size="11">{escape(name)}: {x0:.4g} .. {x1:.4g}</text>\n',
            f'<text x="4" y="{_num(pad - 8)}" font-size="11">max {y1:.4g}</text>\n']
    for i, (label, x, y) in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{_num(px(a))},{_num(py(b))}" for a, b in zip(x, y))
        body.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5">'
                    f"<title>{escape(label)}</title></polyline>\n")
        body.append(f'<text x="{_num(width - pad + 4 - 140)}" y="{_num(pad + 12 + 12 * i)}" font-size="10" '
                    f'fill="{color}">{escape(label)}</text>\n')
    return _svg(width, height, body)


def render_svg(obj, spec: RenderSpec = RenderSpec(), path=None) -> str:
    """Render GridValues, a curtain matrix or benchmark CSV text; optionally write ``path``."""
    if isinstance(obj, GridValues):
        text = grid_svg(obj, spec)
    elif isinstance(obj, str):
        text = curves_svg(obj, spec)
    else:
        text = curtain_svg(obj, spec)
    if path is not None:
        Path(path).write_text(text)
    return text
