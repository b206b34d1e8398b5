import logging

import pytest
from hypothesis import given, strategies as st

from shoprepair.instances import (DEMO_5X3, ParseError, builtin_names, bundled_bounds,
                                  load_bounds, load_instance, parse_any,
                                  parse_standard, parse_taillard, random_instance, write_standard,
                                  write_taillard)
from shoprepair.model import Instance, lower_bound
from shoprepair.rng import SplitMix64
from strategies import instances

TWO_BY_TWO = [[(0, 3), (1, 2)], [(1, 4), (0, 6)]]


def test_parse_standard_example():
    inst = parse_standard("2 2\n0 3 1 2\n1 4 0 6")
    assert inst.jobs == tuple(tuple(j) for j in TWO_BY_TWO)
    assert (inst.num_jobs, inst.num_machines) == (2, 2)


def test_parse_standard_whitespace_and_comments():
    inst = parse_standard("# comment\n 2\t2 \n0 3\n 1 2\n\n1 4 0\t6\n")
    assert inst.jobs == tuple(tuple(j) for j in TWO_BY_TWO)


@pytest.mark.parametrize("text", ["2 2\n0 3 1 2\n1 4 0", "2 2\n0 3 1 2\n1 4 2 6",
                                  "2 2\n0 3 1 2\n1 -4 0 6", "2 x\n", "", "2 2\n0 3 1 2\n1 4 0 6 7"])
def test_parse_standard_errors(text):
    with pytest.raises(ParseError):
        parse_standard(text)


def test_parse_error_names_location():
    with pytest.raises(ParseError) as err:
        parse_standard("2 2\n0 3 1 2\n1 4 5 6")
    assert err.value.line == 3


def test_parse_taillard_equivalent():
    text = "2 2\nTimes\n3 2\n4 6\nMachines\n1 2\n2 1\n"
    assert parse_taillard(text) == parse_standard("2 2\n0 3 1 2\n1 4 0 6")
    bare = "2 2\n3 2\n4 6\n1 2\n2 1\n"
    assert parse_taillard(bare) == parse_standard("2 2\n0 3 1 2\n1 4 0 6")


def test_parse_taillard_canonical_header():
    text = ("Nb of jobs, Nb of Machines, Time seed, Machine seed, Upper bound, Lower bound\n"
            "  2  2  840612802  398197754  10  9\nTimes\n 3 2\n 4 6\nMachines\n 1 2\n 2 1\n")
    assert parse_taillard(text) == parse_standard("2 2\n0 3 1 2\n1 4 0 6")


@pytest.mark.parametrize("text", ["2 2\nTimes\n3 2\n4 6\nMachines\n0 2\n2 1\n",
                                  "2 2\nTimes\n3 2\n4 6\nMachines\n1 2\n",
                                  "2 2\nTimes\n3 2\nMachines\n1 2\n2 1\n",
                                  "2 2\nTimes\n3 2\n4 6\nMachines\n1 3\n2 1\n"])
def test_parse_taillard_errors(text):
    with pytest.raises(ParseError):
        parse_taillard(text)


def test_write_standard_demo():
    text = write_standard(DEMO_5X3)
    lines = text.splitlines()
    assert len(lines) == 6 and lines[0] == "5 3"


def test_write_standard_empty():
    empty = Instance.from_lists("e", [], num_machines=4)
    assert write_standard(empty).splitlines() == ["0 4"]
    assert parse_standard(write_standard(empty)) == Instance("instance", 0, 4, ())


@given(instances(full_routes=True))
def test_round_trip_standard(inst):
    back = parse_standard(write_standard(inst), inst.name)
    assert back == inst


@given(instances(full_routes=True))
def test_taillard_and_standard_agree(inst):
    assert parse_taillard(write_taillard(inst), inst.name) == inst
    assert parse_any(write_taillard(inst), inst.name) == parse_any(write_standard(inst), inst.name)


@given(st.text(max_size=80))
def test_parsers_are_total(text):
    for parse in (parse_standard, parse_taillard, parse_any):
        try:
            parse(text)
        except ParseError:
            pass


def test_load_bounds():
    assert load_bounds("ta01 1231") == {"ta01": 1231}
    assert load_bounds("") == {}
    with pytest.raises(ParseError):
        load_bounds("ta01 12.5")


def test_load_bounds_duplicate_warns(caplog):
    with caplog.at_level(logging.WARNING):
        reg = load_bounds("ta01 1300\nTA01 1231\n")
    assert reg == {"ta01": 1231}
    assert "duplicate" in caplog.text


def test_bundled_instances():
    ta01 = load_instance("ta01")
    assert (ta01.num_jobs, ta01.num_machines) == (15, 15)
    ta52 = load_instance("ta52")
    assert (ta52.num_jobs, ta52.num_machines) == (50, 15)
    dmu03 = load_instance("dmu03")
    assert (dmu03.num_jobs, dmu03.num_machines) == (20, 15)
    assert len([n for n in builtin_names() if n.startswith("ta")]) == 80
    assert ta01 == parse_standard(write_standard(ta01), "ta01")


def test_bundled_bounds():
    b = bundled_bounds()
    assert b["ta01"] == 1231
    assert b["dmu03"] == 2731 and b["dmu04"] == 2669
    for name in ("ta01", "ta52", "dmu03", "dmu04"):
        assert b[name] >= lower_bound(load_instance(name))


def test_load_instance_file(tmp_path):
    p = tmp_path / "x.txt"
    p.write_text("2 2\n0 3 1 2\n1 4 0 6\n")
    assert load_instance(str(p)).jobs == tuple(tuple(j) for j in TWO_BY_TWO)
    with pytest.raises(FileNotFoundError):
        load_instance(str(tmp_path / "missing.txt"))


def test_random_instance_deterministic():
    a = random_instance(SplitMix64(5), 4, 3)
    b = random_instance(SplitMix64(5), 4, 3)
    assert a == b
    assert all(sorted(m for m, _ in ops) == [0, 1, 2] for ops in a.jobs)
