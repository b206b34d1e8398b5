from fractions import Fraction

import pytest
from hypothesis import given

import oracles
from shoprepair.dispatch import ALL_RULES, Rule, RuleKind, priority, schedule_with_rule
from shoprepair.model import Instance
from shoprepair.validate import validate_schedule
from strategies import instances


def _as_dict(schedule):
    return {o.key: (o.start, o.end) for o in schedule.ops}


def test_rule_names_and_parse():
    assert [k.value for k in ALL_RULES] == ["random", "spt", "lpt", "stpt", "mpsr", "lso",
                                            "sptxtwk", "spttwkr"]
    assert Rule.parse("SPT").kind is RuleKind.SPT
    assert Rule.parse("random", 4).name == "random(seed=4)"
    with pytest.raises(ValueError):
        Rule.parse("edd")


def test_priority_keys(demo):
    # job 2 (J3) = [(1,4),(2,3),(0,2)], total 9
    assert priority(demo, RuleKind.SPT, 2, 1) == 3
    assert priority(demo, RuleKind.LPT, 2, 1) == -3
    assert priority(demo, RuleKind.STPT, 2, 1) == 9
    assert priority(demo, RuleKind.MPSR, 2, 1) == -2
    assert priority(demo, RuleKind.LSO, 2, 1) == -2
    assert priority(demo, RuleKind.SPT_X_TWK, 2, 1) == 27
    assert priority(demo, RuleKind.SPT_DIV_TWKR, 2, 1) == Fraction(3, 5)


def test_spt_on_demo(demo):
    s = schedule_with_rule(demo, Rule(RuleKind.SPT))
    assert validate_schedule(demo, s).ok
    assert s.makespan == 15


def test_tie_break_lowest_job():
    inst = Instance.from_lists("t", [[(0, 2)], [(0, 2)], [(0, 2)]])
    s = schedule_with_rule(inst, Rule(RuleKind.SPT))
    assert [o.start for o in s.ops] == [0, 2, 4]


def test_random_is_seeded(demo):
    a = schedule_with_rule(demo, Rule(RuleKind.RANDOM, 1))
    b = schedule_with_rule(demo, Rule(RuleKind.RANDOM, 1))
    assert a == b
    seen = {schedule_with_rule(demo, Rule(RuleKind.RANDOM, s)) for s in range(20)}
    assert len(seen) > 1


@given(instances(max_jobs=5, max_machines=3, max_dur=5))
def test_spt_lpt_match_clock_oracle(inst):
    jobs = [list(o) for o in inst.jobs]
    for kind, key in ((RuleKind.SPT, oracles.spt_key(jobs)), (RuleKind.LPT, oracles.lpt_key(jobs))):
        assert _as_dict(schedule_with_rule(inst, Rule(kind))) == oracles.dispatch_by_clock(jobs, key)


@given(instances(max_jobs=5, max_machines=3, max_dur=5))
def test_every_rule_matches_clock_oracle(inst):
    jobs = [list(o) for o in inst.jobs]
    for kind in ALL_RULES[1:]:
        key = (lambda kind: lambda j, k: priority(inst, kind, j, k))(kind)
        assert _as_dict(schedule_with_rule(inst, Rule(kind))) == oracles.dispatch_by_clock(jobs, key)


@given(instances())
def test_non_delay_and_valid(inst):
    for kind in ALL_RULES:
        s = schedule_with_rule(inst, Rule(kind, 11))
        assert validate_schedule(inst, s).ok
        by_key = s.by_key()
        # no machine sits idle while the next operation of some job could already run on it
        for o in s.ops:
            ready = by_key[(o.job, o.step - 1)].end if o.step else 0
            busy = [p for p in s.ops if p.machine == o.machine and p.start < o.start]
            free_at = [t for t in range(ready, o.start)
                       if not any(p.start <= t < p.end for p in busy)]
            assert not free_at, (kind, o)
