import pytest
from hypothesis import given

from shoprepair.dispatch import ALL_RULES, Rule, schedule_with_rule
from shoprepair.model import (Instance, RepairConfig, Schedule, ScheduledOp, Status, lower_bound,
                              makespan, schedule_from_orders, tracker_from_schedule)
from strategies import instances


def test_makespan_ref_schedule(ref_schedule):
    assert makespan(ref_schedule) == 19


def test_makespan_single_and_empty():
    assert makespan(Schedule([ScheduledOp(0, 0, 0, 0, 5)])) == 5
    assert makespan(Schedule()) == 0


def test_lower_bound_demo(demo):
    loads = [0, 0, 0]
    for ops in demo.jobs:
        for m, d in ops:
            loads[m] += d
    assert loads == [12, 15, 9]
    assert [sum(d for _, d in ops) for ops in demo.jobs] == [7, 7, 9, 6, 7]
    assert lower_bound(demo) == 15


def test_lower_bound_trivial():
    assert lower_bound(Instance.from_lists("a", [[(0, 7)]])) == 7
    assert lower_bound(Instance.from_lists("b", [[(0, 3)], [(0, 3)]])) == 6


def test_instance_rejects_bad_machine_and_duration():
    with pytest.raises(ValueError):
        Instance.from_lists("x", [[(2, 1)]], num_machines=2)
    with pytest.raises(ValueError):
        Instance.from_lists("x", [[(0, -1)]])


def test_tracker_queue_order_ref_schedule(demo, ref_schedule):
    t = tracker_from_schedule(demo, ref_schedule)
    # M1 row: J5(1), J2(3), J4(3), J3(1), J1(2) in 1-based naming
    assert t.queues[1] == [(4, 0), (1, 2), (3, 2), (2, 0), (0, 1)]
    assert all(e.status is Status.WAITING for e in t.entries.values())
    assert len(t.entries) == demo.total_ops


def test_tracker_trivial_cases():
    empty = Instance.from_lists("e", [], num_machines=0)
    t = tracker_from_schedule(empty, Schedule())
    assert t.entries == {} and t.queues == {}
    one = Instance.from_lists("o", [[(0, 4)]])
    t = tracker_from_schedule(one, Schedule([ScheduledOp(0, 0, 0, 0, 4)]))
    assert list(t.entries) == [(0, 0)]
    assert t.entries[(0, 0)].status is Status.WAITING


def test_tracker_rejects_incomplete(demo, ref_schedule):
    with pytest.raises(ValueError):
        tracker_from_schedule(demo, Schedule(ref_schedule.ops[:-1]))


def test_tracker_tie_break_by_job_step():
    inst = Instance.from_lists("t", [[(0, 0)], [(0, 0)], [(0, 2)]])
    s = Schedule([ScheduledOp(2, 0, 0, 0, 2), ScheduledOp(1, 0, 0, 0, 0), ScheduledOp(0, 0, 0, 0, 0)])
    assert tracker_from_schedule(inst, s).queues[0] == [(0, 0), (1, 0), (2, 0)]


def test_records_round_trip(ref_schedule):
    recs = ref_schedule.to_records()
    assert recs[0] == {"job": 0, "step": 1, "machine": 0, "start": 3, "end": 6}
    assert Schedule.from_records(recs) == ref_schedule


def test_schedule_from_orders_detects_deadlock():
    inst = Instance.from_lists("d", [[(0, 1), (1, 1)], [(1, 1), (0, 1)]])
    # each machine waits for the other job's second operation
    assert schedule_from_orders(inst, {0: [(1, 1), (0, 0)], 1: [(0, 1), (1, 0)]}) is None
    ok = schedule_from_orders(inst, {0: [(0, 0), (1, 1)], 1: [(1, 0), (0, 1)]})
    assert ok.makespan == 2


def test_repair_config_defaults():
    cfg = RepairConfig()
    assert cfg.t_wip == 1 and cfg.swap_budget >= 1
    with pytest.raises(ValueError):
        RepairConfig(t_wip=-1)


@given(instances())
def test_valid_schedules_respect_lower_bound(inst):
    for kind in ALL_RULES:
        assert schedule_with_rule(inst, Rule(kind, 3)).makespan >= lower_bound(inst)


@given(instances())
def test_tracker_is_bijective_and_deterministic(inst):
    s = schedule_with_rule(inst, Rule.parse("spt"))
    a, b = tracker_from_schedule(inst, s), tracker_from_schedule(inst, s)
    assert len(a.entries) == inst.total_ops
    assert a.queues == b.queues
    for m, q in a.queues.items():
        starts = [a.entries[k].op.start for k in q]
        assert starts == sorted(starts)
