"""Behavioral analytics on a fixed topic placement.

Relevance vectors are indexed by topic position ``t``; the topic ids of a
placement default to ``0..T-1`` in that order. Volume of a behavior set is
``log(sum r + 1)`` per topic, so risk is current volume minus benchmark
volume.
"""

from __future__ import annotations

import calendar
import json
from dataclasses import dataclass
from datetime import date, datetime, timedelta, timezone
from typing import Iterable, Sequence

import numpy as np

from .core import GridAssignment, ValidationError


@dataclass(frozen=True, eq=False)
class ActivityRecord:
    entity: str
    ts: datetime
    doc_id: str
    relevance: np.ndarray

    def __post_init__(self):
        rel = np.array(self.relevance, dtype=np.float64, copy=True).ravel()
        if not np.isfinite(rel).all() or (rel < 0).any():
            raise ValidationError(f"relevance for doc {self.doc_id!r} must be finite and non-negative")
        rel.setflags(write=False)
        object.__setattr__(self, "relevance", rel)
        object.__setattr__(self, "ts", _utc(self.ts))

    def __eq__(self, other):
        if not isinstance(other, ActivityRecord):
            return NotImplemented
        return (self.entity, self.ts, self.doc_id) == (other.entity, other.ts, other.doc_id) and np.array_equal(
            self.relevance, other.relevance
        )

    def __hash__(self):
        return hash((self.entity, self.ts, self.doc_id))

    def to_json(self) -> str:
        return json.dumps({
            "entity": self.entity,
            "ts": self.ts.isoformat().replace("+00:00", "Z"),
            "doc_id": self.doc_id,
            "relevance": [float(v) for v in self.relevance],
        })

    @classmethod
    def from_dict(cls, d: dict) -> "ActivityRecord":
        return cls(str(d["entity"]), parse_ts(d["ts"]), str(d["doc_id"]), d["relevance"])


def parse_ts(text) -> datetime:
    if isinstance(text, datetime):
        return _utc(text)
    text = str(text).strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    return _utc(datetime.fromisoformat(text))


def _utc(ts) -> datetime:
    if isinstance(ts, date) and not isinstance(ts, datetime):
        ts = datetime(ts.year, ts.month, ts.day)
    if ts.tzinfo is None:
        return ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


@dataclass(frozen=True)
class BehaviorSet:
    entities: frozenset
    start: datetime
    end: datetime
    records: tuple

    @property
    def topic_count(self) -> int | None:
        return len(self.records[0].relevance) if self.records else None

    def relevance_sum(self, topics: int | None = None) -> np.ndarray:
        t = topics if topics is not None else self.topic_count
        if t is None:
            raise ValidationError("empty behavior set: topic count must be given")
        total = np.zeros(t)
        for r in self.records:
            if len(r.relevance) != t:
                raise ValidationError(f"record {r.doc_id!r} has {len(r.relevance)} topics, expected {t}")
            total += r.relevance
        return total


def build_behavior_set(records: Iterable[ActivityRecord], entities, window) -> BehaviorSet:
    """Records of ``entities`` (one id or several) inside ``[start, end)``,
    keeping the earliest record for each content document."""
    start, end = (_utc(w) for w in window)
    if not start < end:
        raise ValidationError(f"empty window [{start}, {end})")
    who = frozenset([entities] if isinstance(entities, str) else entities)
    chosen = [r for r in records if r.entity in who and start <= r.ts < end]
    chosen.sort(key=lambda r: r.ts)  # stable: ties keep input order
    seen, kept = set(), []
    for r in chosen:
        if r.doc_id not in seen:
            seen.add(r.doc_id)
            kept.append(r)
    return BehaviorSet(who, start, end, tuple(kept))


@dataclass(frozen=True)
class GridValues:
    assignment: GridAssignment
    values: dict
    kind: str

    def __post_init__(self):
        if self.kind not in ("volume", "risk"):
            raise ValidationError(f"unknown grid value kind {self.kind!r}")
        if set(self.values) != set(self.assignment.ids):
            raise ValidationError("values must cover exactly the assigned topics")

    def as_array(self) -> np.ndarray:
        """Dense array shaped like the layout, indexed by grid cell."""
        out = np.zeros(self.assignment.extents)
        for pid, cell in zip(self.assignment.ids, self.assignment.cells):
            out[tuple(cell)] = self.values[pid]
        return out


def _topic_ids(assignment: GridAssignment, topics: Sequence | None) -> list:
    topics = list(range(len(assignment.ids))) if topics is None else list(topics)
    if set(topics) != set(assignment.ids) or len(topics) != len(assignment.ids):
        raise ValidationError("topic ids do not match the placement ids")
    return topics


def volume_vector(b: BehaviorSet, topics: int | None = None) -> np.ndarray:
    return np.log(b.relevance_sum(topics) + 1.0)


def risk_vector(benchmark: BehaviorSet, current: BehaviorSet, topics: int | None = None) -> np.ndarray:
    t = topics or current.topic_count or benchmark.topic_count
    if t is None:
        raise ValidationError("both behavior sets are empty: topic count must be given")
    if benchmark.topic_count not in (None, t) or current.topic_count not in (None, t):
        raise ValidationError("benchmark and current behavior sets differ in topic count")
    return volume_vector(current, t) - volume_vector(benchmark, t)


def _grid(assignment, topics, vec, kind) -> GridValues:
    ids = _topic_ids(assignment, topics)
    if len(vec) != len(ids):
        raise ValidationError(f"{len(vec)} topic values for {len(ids)} placed topics")
    return GridValues(assignment, {t: float(v) for t, v in zip(ids, vec)}, kind)


def topical_volume(b: BehaviorSet, assignment: GridAssignment, topics: Sequence | None = None) -> GridValues:
    return _grid(assignment, topics, volume_vector(b, len(assignment.ids)), "volume")


def topical_risk(benchmark: BehaviorSet, current: BehaviorSet, assignment: GridAssignment,
                 topics: Sequence | None = None) -> GridValues:
    """Per-topic risk of ``current`` against ``benchmark``."""
    return _grid(assignment, topics, risk_vector(benchmark, current, len(assignment.ids)), "risk")


def peer_risk(records, entity: str, peers, current_window, benchmark_window, assignment,
              topics=None) -> GridValues:
    """Entity's current behavior against its peers' benchmark behavior.

    Peer sums are not normalised by group size.
    """
    bench = build_behavior_set(records, peers, benchmark_window)
    cur = build_behavior_set(records, entity, current_window)
    return topical_risk(bench, cur, assignment, topics)


def month_start(d) -> date:
    d = d.date() if isinstance(d, datetime) else d
    return date(d.year, d.month, 1)


def _midnight(d: date) -> datetime:
    return datetime(d.year, d.month, d.day, tzinfo=timezone.utc)


def topic_curtain(records, entity: str, months: Sequence, assignment_1d: GridAssignment, benchmark_window,
                  topics: Sequence | None = None, step: timedelta = timedelta(days=1)):
    """Month-to-date risk per time step, columns ordered by 1-D grid index.

    Returns ``(matrix, steps)``: ``matrix[τ, x]`` is the risk of the topic
    placed at index ``x``, and ``steps`` holds the start of each row.
    """
    if assignment_1d.k != 1:
        raise ValidationError("the curtain needs a 1-d placement")
    starts = [month_start(m) for m in months]
    if any(a >= b for a, b in zip(starts, starts[1:])):
        raise ValidationError("months must be strictly increasing")
    if any(month_start(m) != (m.date() if isinstance(m, datetime) else m) for m in months):
        raise ValidationError("months must be given by their first day")
    records = list(records)
    ids = _topic_ids(assignment_1d, topics)
    column = np.empty(len(ids), dtype=np.int64)
    pos = {pid: i for i, pid in enumerate(assignment_1d.ids)}
    for t, tid in enumerate(ids):
        column[t] = assignment_1d.cells[pos[tid], 0]
    bench = build_behavior_set(records, entity, benchmark_window)
    t_count = len(ids)
    bench_vol = volume_vector(bench, t_count)
    rows, steps = [], []
    for m in starts:
        lo = _midnight(m)
        hi = _midnight(date(m.year, m.month, calendar.monthrange(m.year, m.month)[1]) + timedelta(days=1))
        tau = lo
        while tau < hi:
            end = min(tau + step, hi)
            cur = build_behavior_set(records, entity, (lo, end))
            row = np.empty(t_count)
            row[column] = volume_vector(cur, t_count) - bench_vol
            rows.append(row)
            steps.append(tau)
            tau = end
    return np.array(rows).reshape(len(rows), t_count), steps


def topic_shower(records, entity: str, windows: Sequence, assignment_2d: GridAssignment, benchmark_window,
                 topics: Sequence | None = None) -> list:
    """One risk grid per window, all on the same placement."""
    bounds = [tuple(_utc(w) for w in win) for win in windows]
    for (a0, a1), (b0, b1) in zip(bounds, bounds[1:]):
        if not a1 <= b0:
            raise ValidationError("windows must be sorted and non-overlapping")
    records = list(records)
    bench = build_behavior_set(records, entity, benchmark_window)
    return [topical_risk(bench, build_behavior_set(records, entity, w), assignment_2d, topics) for w in bounds]
