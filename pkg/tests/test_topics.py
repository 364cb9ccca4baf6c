import math
from datetime import date, datetime, timedelta, timezone

import numpy as np
import pytest
from hypothesis import given, strategies as st

from splitdiffuse.core import GridAssignment, ValidationError
from splitdiffuse.topics import (
    ActivityRecord,
    build_behavior_set,
    parse_ts,
    peer_risk,
    risk_vector,
    topic_curtain,
    topic_shower,
    topical_risk,
    topical_volume,
    volume_vector,
)

UTC = timezone.utc
JAN = (datetime(2024, 1, 1, tzinfo=UTC), datetime(2024, 2, 1, tzinfo=UTC))
FEB = (datetime(2024, 2, 1, tzinfo=UTC), datetime(2024, 3, 1, tzinfo=UTC))
GRID4 = GridAssignment((0, 1, 2, 3), [[0, 0], [1, 0], [0, 1], [1, 1]], (2, 2))


def rec(entity, day, doc, rel, month=1):
    return ActivityRecord(entity, datetime(2024, month, day, 12, tzinfo=UTC), doc, rel)


def test_earliest_duplicate_kept():
    late = rec("u", 20, "d1", [0, 5, 0, 0])
    early = rec("u", 3, "d1", [1, 0, 0, 0])
    b = build_behavior_set([late, early], "u", JAN)
    assert b.records == (early,)


def test_equal_timestamps_keep_input_order():
    a, b_ = rec("u", 3, "d1", [1, 0, 0, 0]), rec("u", 3, "d1", [0, 1, 0, 0])
    assert build_behavior_set([a, b_], "u", JAN).records == (a,)


def test_window_is_half_open():
    at_start = ActivityRecord("u", JAN[0], "a", [1, 0, 0, 0])
    at_end = ActivityRecord("u", JAN[1], "b", [1, 0, 0, 0])
    assert build_behavior_set([at_start, at_end], "u", JAN).records == (at_start,)


def test_group_and_entity_filter():
    rs = [rec("u", 2, "a", [1, 0, 0, 0]), rec("v", 2, "b", [1, 0, 0, 0]), rec("w", 2, "c", [1, 0, 0, 0])]
    assert len(build_behavior_set(rs, ["u", "v"], JAN).records) == 2
    assert len(build_behavior_set(rs, "w", JAN).records) == 1


def test_volume_of_e_minus_one_is_one():
    b = build_behavior_set([rec("u", 5, "a", [math.e - 1, 0, 0, 0])], "u", JAN)
    v = topical_volume(b, GRID4)
    assert math.isclose(v.values[0], 1.0) and v.values[1] == 0.0
    assert v.as_array()[0, 0] == v.values[0]


def test_volume_sums_relevance():
    rs = [rec("u", 5, "a", [1, 0, 0, 0]), rec("u", 6, "b", [1, 0, 0, 0])]
    assert math.isclose(volume_vector(build_behavior_set(rs, "u", JAN))[0], math.log(3))


def test_risk_against_empty_current_is_negative():
    bench = build_behavior_set([rec("u", 5, "a", [math.e - 1, 0, 0, 0])], "u", JAN)
    cur = build_behavior_set([], "u", FEB)
    r = topical_risk(bench, cur, GRID4)
    assert math.isclose(r.values[0], -1.0) and r.values[3] == 0.0


@given(st.lists(st.floats(0, 100), min_size=4, max_size=4), st.lists(st.floats(0, 100), min_size=4, max_size=4))
def test_risk_antisymmetric(x, y):
    b1 = build_behavior_set([rec("u", 5, "a", x)], "u", JAN)
    b2 = build_behavior_set([rec("u", 5, "b", y, month=2)], "u", FEB)
    assert np.allclose(risk_vector(b1, b2), -risk_vector(b2, b1))
    assert np.allclose(risk_vector(b1, b1), 0.0)


def test_peer_risk_uses_peer_benchmark():
    rs = [rec("p", 4, "a", [math.e - 1, 0, 0, 0]), rec("q", 4, "b", [0, math.e - 1, 0, 0]),
          rec("u", 3, "c", [0, 0, 0, 0], month=2)]
    g = peer_risk(rs, "u", ["p", "q"], FEB, JAN, GRID4)
    assert np.allclose([g.values[t] for t in range(4)], [-1, -1, 0, 0])


def test_topic_ids_follow_relevance_positions():
    a = GridAssignment(("t0", "t1", "t2", "t3"), GRID4.cells, (2, 2))
    b = build_behavior_set([rec("u", 5, "a", [0, 0, math.e - 1, 0])], "u", JAN)
    v = topical_volume(b, a, ["t0", "t1", "t2", "t3"])
    assert math.isclose(v.values["t2"], 1.0)
    with pytest.raises(ValidationError):
        topical_volume(b, a)


LINE = GridAssignment((0, 1, 2), [[2], [0], [1]], (3,))


def test_curtain_month_to_date():
    rs = [rec("u", 10, "a", [1, 0, 0], month=3), rec("u", 20, "b", [0, 2, 0], month=3),
          rec("u", 1, "c", [0, 0, 5], month=4)]
    m, steps = topic_curtain(rs, "u", [date(2024, 3, 1), date(2024, 4, 1)], LINE,
                             (datetime(2023, 1, 1), datetime(2023, 2, 1)))
    assert m.shape == (31 + 30, 3)
    assert steps[0] == datetime(2024, 3, 1, tzinfo=UTC) and steps[31] == datetime(2024, 4, 1, tzinfo=UTC)
    # topic 0 sits at column 2, topic 1 at column 0
    assert m[8, 2] == 0 and math.isclose(m[9, 2], math.log(2))
    assert math.isclose(m[19, 0], math.log(3))
    # monotone within a month, reset at the month boundary
    assert (np.diff(m[:31], axis=0) >= 0).all()
    assert m[31, 2] == 0 and m[31, 0] == 0 and math.isclose(m[31, 1], math.log(6))


def test_curtain_step_and_errors():
    m, steps = topic_curtain([], "u", [date(2024, 2, 1)], LINE, JAN, step=timedelta(days=7))
    assert m.shape == (5, 3) and steps[-1] == datetime(2024, 2, 29, tzinfo=UTC)
    with pytest.raises(ValidationError):
        topic_curtain([], "u", [date(2024, 2, 1), date(2024, 1, 1)], LINE, JAN)
    with pytest.raises(ValidationError):
        topic_curtain([], "u", [date(2024, 2, 3)], LINE, JAN)
    with pytest.raises(ValidationError):
        topic_curtain([], "u", [date(2024, 2, 1)], GRID4, JAN)


def test_shower():
    rs = [rec("u", 5, "a", [math.e - 1, 0, 0, 0]), rec("u", 9, "b", [0, math.e - 1, 0, 0], month=2)]
    w1 = (datetime(2024, 2, 1), datetime(2024, 2, 8))
    w2 = (datetime(2024, 2, 8), datetime(2024, 2, 15))
    g1, g2 = topic_shower(rs, "u", [w1, w2], GRID4, JAN)
    assert np.allclose([g1.values[t] for t in range(4)], [-1, 0, 0, 0])
    assert np.allclose([g2.values[t] for t in range(4)], [-1, 1, 0, 0])
    assert g1.assignment is g2.assignment
    with pytest.raises(ValidationError):
        topic_shower(rs, "u", [w2, w1], GRID4, JAN)
    with pytest.raises(ValidationError):
        topic_shower(rs, "u", [(w1[0], w2[0] + timedelta(days=1)), w2], GRID4, JAN)


def test_record_validation_and_timestamps():
    with pytest.raises(ValidationError):
        rec("u", 1, "a", [1, -0.5])
    with pytest.raises(ValidationError):
        rec("u", 1, "a", [1, np.nan])
    assert parse_ts("2024-01-01T05:00:00Z") == datetime(2024, 1, 1, 5, tzinfo=UTC)
    assert parse_ts("2024-01-01T05:00:00+02:00") == datetime(2024, 1, 1, 3, tzinfo=UTC)
    r = rec("u", 1, "a", [0.5, 1])
    assert ActivityRecord.from_dict(__import__("json").loads(r.to_json())) == r


def test_behavior_set_errors():
    with pytest.raises(ValidationError):
        build_behavior_set([], "u", (JAN[1], JAN[0]))
    b = build_behavior_set([rec("u", 2, "a", [1, 2, 3])], "u", JAN)
    with pytest.raises(ValidationError):
        topical_volume(b, GRID4)
    with pytest.raises(ValidationError):
        risk_vector(build_behavior_set([], "u", JAN), build_behavior_set([], "u", FEB))
