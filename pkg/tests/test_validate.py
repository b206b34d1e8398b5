import json
from dataclasses import replace

from hypothesis import given, strategies as st

import oracles
from shoprepair.dispatch import Rule, schedule_with_rule
from shoprepair.lrcp import Breakdown, repair
from shoprepair.model import Instance, Schedule, ScheduledOp
from shoprepair.validate import Kind, validate_schedule
from strategies import instances


def _modify(schedule, key, **changes):
    return Schedule(replace(o, **changes) if o.key == key else o for o in schedule.ops)


def test_ref_schedule_is_valid(demo, ref_schedule):
    assert validate_schedule(demo, ref_schedule).ok


def test_repaired_demo_valid_with_window(demo, ref_schedule):
    out = repair(demo, ref_schedule, Breakdown(1, 5, 3))
    assert validate_schedule(demo, out.schedule, [(1, 5, 3)]).ok
    assert out.makespan == 22


def test_precedence_violation(demo, ref_schedule):
    # J2(3) moved to start at 2 while J2(2) still runs until 3
    bad = _modify(ref_schedule, (1, 2), start=2, end=6)
    report = validate_schedule(demo, bad)
    assert Kind.PRECEDENCE in report.kinds()
    v = [v for v in report.violations if v.kind is Kind.PRECEDENCE][0]
    assert (v.job, v.step) == (1, 2)


def test_capacity_violation_and_touching_allowed():
    inst = Instance.from_lists("c", [[(0, 3)], [(0, 3)]])
    touching = Schedule([ScheduledOp(0, 0, 0, 0, 3), ScheduledOp(1, 0, 0, 3, 6)])
    assert validate_schedule(inst, touching).ok
    overlap = Schedule([ScheduledOp(0, 0, 0, 0, 3), ScheduledOp(1, 0, 0, 2, 5)])
    assert validate_schedule(inst, overlap).kinds() == {Kind.CAPACITY}


def test_capacity_catches_non_adjacent_overlap():
    inst = Instance.from_lists("c", [[(0, 10)], [(0, 1)], [(0, 1)]])
    s = Schedule([ScheduledOp(0, 0, 0, 0, 10), ScheduledOp(1, 0, 0, 0, 1),
                  ScheduledOp(2, 0, 0, 5, 6)])
    report = validate_schedule(inst, s)
    assert {(v.job, v.kind) for v in report.violations} >= {(2, Kind.CAPACITY)}


def test_completeness(demo, ref_schedule):
    missing = Schedule(ref_schedule.ops[1:])
    assert Kind.COMPLETENESS in validate_schedule(demo, missing).kinds()
    dup = Schedule(list(ref_schedule.ops) + [ref_schedule.ops[0]])
    assert Kind.COMPLETENESS in validate_schedule(demo, dup).kinds()


def test_breakdown_overlap_half_open(demo, ref_schedule):
    # M1 is busy 3-7 with J2(3); a window [7, 10) touches but does not overlap... J4(3) runs 7-10
    report = validate_schedule(demo, ref_schedule, [(1, 5, 3)])
    assert {(v.job, v.step) for v in report.violations if v.kind is Kind.BREAKDOWN_OVERLAP} == {
        (1, 2), (3, 2)}
    assert validate_schedule(demo, ref_schedule, [(0, 19, 5), (2, 11, 3)]).ok


def test_duration_and_negative_start(demo, ref_schedule):
    short = _modify(ref_schedule, (0, 0), end=5)
    assert Kind.DURATION_MISMATCH in validate_schedule(demo, short).kinds()
    wrong_machine = _modify(ref_schedule, (0, 0), machine=2)
    assert Kind.DURATION_MISMATCH in validate_schedule(demo, wrong_machine).kinds()
    inst = Instance.from_lists("n", [[(0, 2)]])
    neg = Schedule([ScheduledOp(0, 0, 0, -1, 1)])
    assert validate_schedule(inst, neg).kinds() == {Kind.NEGATIVE_START}


def test_report_sorted_and_serializable(demo, ref_schedule):
    bad = _modify(_modify(ref_schedule, (4, 2), start=0, end=1), (0, 0), start=-3, end=0)
    report = validate_schedule(demo, bad)
    keys = [(v.kind, v.job, v.step) for v in report.violations]
    assert keys == sorted(keys)
    data = json.loads(report.to_json())
    assert data["ok"] is False and all(v["step"] >= 1 for v in data["violations"])
    assert "precedence" in report.to_text() or "capacity" in report.to_text()


@st.composite
def perturbed(draw):
    inst = draw(instances(max_jobs=4, max_machines=3))
    sched = schedule_with_rule(inst, Rule.parse("spt"))
    ops = list(sched.ops)
    for _ in range(draw(st.integers(0, 3))):
        i = draw(st.integers(0, len(ops) - 1))
        shift = draw(st.integers(-6, 6))
        ops[i] = replace(ops[i], start=ops[i].start + shift, end=ops[i].end + shift)
    windows = draw(st.lists(st.tuples(st.integers(0, inst.num_machines - 1), st.integers(0, 30),
                                      st.integers(1, 5)), max_size=2))
    return inst, Schedule(ops), windows


@given(perturbed())
def test_agrees_with_independent_checker(case):
    inst, sched, windows = case
    jobs = [list(o) for o in inst.jobs]
    ops = {o.key: (o.machine, o.start, o.end) for o in sched.ops}
    assert validate_schedule(inst, sched, windows).ok == oracles.feasible(jobs, ops, windows)
