"""Command-line entry point: ``shoprepair <command> ...``.

Exit codes: 0 success, 2 input error (unreadable/invalid files, bad flags,
schedules that fail validation), 3 internal invariant breach.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bench as benchmod
from .dispatch import ALL_RULES, Rule, RuleKind, schedule_with_rule
from .gantt import render_svg
from .improve import improve
from .instances import DEMO_5X3_SCHEDULE, ParseError, bundled_bounds, load_instance
from .lrcp import Breakdown, RepairError, repair
from .model import Instance, RepairConfig, RestartPolicy, Schedule
from .simulate import (DisruptionScenario, EventLog, LogError, generate_scenario, read_log,
                       replay, run_scenario)
from .validate import validate_schedule

EXIT_OK, EXIT_INPUT, EXIT_INTERNAL = 0, 2, 3


class InputError(Exception):
    pass


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {v}")
    return v


def _breakdown_arg(text: str) -> tuple[int, int, int]:
    try:
        m, t, d = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected MACHINE,START,LENGTH") from None
    return m, t, d


def _instance(ref: str) -> Instance:
    try:
        return load_instance(ref)
    except FileNotFoundError as e:
        raise InputError(f"cannot read instance {ref!r}: {e}") from None
    except (ParseError, ValueError) as e:
        raise InputError(f"cannot parse instance {ref!r}: {e}") from None


def _read_schedule(path: str | None, instance: Instance, ref: str) -> tuple[Schedule, dict]:
    """Schedule from a JSON file (bare list, solve output, repair or simulate
    report); without a path the built-in demo instance uses its reference schedule."""
    if path is None:
        if ref.lower() in ("demo:5x3", "demo_5x3"):
            return DEMO_5X3_SCHEDULE, {}
        raise InputError("--schedule is required for this instance")
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as e:
        raise InputError(f"cannot read schedule {path!r}: {e}") from None
    except json.JSONDecodeError as e:
        raise InputError(f"schedule {path!r} is not valid JSON: {e}") from None
    records = raw.get("schedule") if isinstance(raw, dict) else raw
    try:
        sched = Schedule.from_records(records)
    except (TypeError, KeyError, ValueError, AttributeError) as e:
        raise InputError(f"schedule {path!r} is malformed: {e}") from None
    return sched, raw if isinstance(raw, dict) else {}


def _emit(obj: dict, as_json: bool, human: str, out: str | None = None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    sys.stdout.write(text if as_json else human)


def _table(schedule: Schedule) -> str:
    lines = [f"{'job':>4} {'step':>4} {'mach':>4} {'start':>6} {'end':>6}"]
    for o in schedule.ops:
        lines.append(f"{o.job:>4} {o.step + 1:>4} {o.machine:>4} {o.start:>6} {o.end:>6}")
    return "\n".join(lines) + "\n"


def _config(args) -> RepairConfig:
    return RepairConfig(t_wip=args.twip, swap_budget=args.swap_budget,
                        restart_policy=RestartPolicy(args.policy))


# -- commands ----------------------------------------------------------------------

def cmd_solve(args) -> int:
    inst = _instance(args.instance)
    rule = Rule.parse(args.rule, args.seed)
    sched = schedule_with_rule(inst, rule)
    params = {"rule": rule.kind.value, "seed": args.seed}
    algorithm = rule.kind.value
    trace = None
    if args.improve:
        sched, trace = improve(inst, sched, budget=args.budget, seed=args.seed)
        params["budget"] = args.budget
        algorithm += "+improve"
    report = validate_schedule(inst, sched)
    if not report.ok:
        print(report.to_text(), file=sys.stderr)
        return EXIT_INTERNAL
    obj = {"instance": inst.name, "makespan": sched.makespan, "algorithm": algorithm,
           "params": params, "schedule": sched.to_records()}
    if trace is not None:
        obj["trace"] = [{"iteration": t.iteration, "makespan": t.makespan} for t in trace]
    human = f"{inst.name}: makespan {sched.makespan} ({algorithm})\n" + _table(sched)
    _emit(obj, args.json, human, args.out)
    return EXIT_OK


def cmd_repair(args) -> int:
    inst = _instance(args.instance)
    sched, _ = _read_schedule(args.schedule, inst, args.instance)
    bd = Breakdown(args.machine, args.td, args.dt)
    windows: dict[int, list[tuple[int, int]]] = {}
    for m, t, d in args.prior or ():
        windows.setdefault(m, []).append((t, t + d))
    try:
        outcome = repair(inst, sched, bd, _config(args), windows)
    except ValueError as e:
        raise InputError(str(e)) from None
    obj = outcome.to_dict()
    obj["breakdown"] = {"machine": bd.machine, "t_d": bd.t_d, "delta_t": bd.delta_t}
    trace = " -> ".join(f"{p} {ms}" for p, ms in outcome.phase_trace)
    human = (f"{inst.name}: makespan {sched.makespan} -> {outcome.makespan}, "
             f"wip_moves {outcome.wip_moves}, messages {outcome.messages}\n{trace}\n"
             + _table(outcome.schedule))
    _emit(obj, args.json, human, args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    inst = _instance(args.instance)
    if args.scenario:
        try:
            scenario = DisruptionScenario.from_json(Path(args.scenario).read_text())
        except (OSError, ValueError, KeyError, TypeError) as e:
            raise InputError(f"cannot load scenario {args.scenario!r}: {e}") from None
    else:
        if args.max_dur < args.min_dur:
            raise InputError(f"--max-dur {args.max_dur} < --min-dur {args.min_dur}")
        scenario = generate_scenario(inst, args.seed, args.failures, args.min_dur, args.max_dur)
    if args.save_scenario:
        Path(args.save_scenario).write_text(scenario.to_json() + "\n")
    base = schedule_with_rule(inst, Rule.parse(args.rule, args.seed))
    log_path = args.log or f"{inst.name}_seed{args.seed}.events.jsonl"
    with EventLog(log_path) as log:
        report = run_scenario(inst, base, scenario, _config(args), log)
    obj = report.to_dict()
    obj["log"] = str(log_path)
    human = (f"{inst.name}: {len(scenario.events)} breakdowns, makespan {report.base_makespan} -> "
             f"{report.makespan}, wip_moves {report.wip_moves}, messages {report.messages}\n"
             f"event log: {log_path}\n")
    _emit(obj, args.json, human, args.out)
    return EXIT_OK


def cmd_replay(args) -> int:
    try:
        sched = replay(read_log(args.log))
    except OSError as e:
        raise InputError(f"cannot read log {args.log!r}: {e}") from None
    except LogError as e:
        raise InputError(str(e)) from None
    obj = {"makespan": sched.makespan, "schedule": sched.to_records()}
    _emit(obj, args.json, f"replayed makespan {sched.makespan}\n" + _table(sched), args.out)
    return EXIT_OK


def _rules(text: str) -> list[str]:
    if text.strip().lower() == "all":
        return [k.value for k in ALL_RULES]
    return [r.strip() for r in text.split(",") if r.strip()]


def cmd_bench(args) -> int:
    names = [n.strip() for n in args.instances.split(",") if n.strip()]
    insts = [_instance(n) for n in names]
    if args.methods:
        methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    else:
        methods = []
        for r in _rules(args.rules):
            methods.append(r)
            if args.improve:
                methods.append(f"{r}+improve")
    try:
        parsed = [benchmod.Method.parse(m) for m in methods]
    except ValueError as e:
        raise InputError(str(e)) from None
    scenarios = {}
    if any(m.lrcp for m in parsed):
        for inst in insts:
            scenarios[inst.name] = generate_scenario(inst, args.seed, args.failures,
                                                     args.min_dur, args.max_dur)
    result = benchmod.run_suite(insts, parsed, scenarios, bundled_bounds(), seed=args.seed,
                                budget=args.budget, config=_config(args))
    if args.csv:
        Path(args.csv).write_text(result.to_csv())
    obj = json.loads(result.to_json())
    if args.probe:
        sizes = []
        for s in args.probe.split(","):
            j, m = s.lower().split("x")
            sizes.append((int(j), int(m)))
        probe = benchmod.complexity_probe(sizes, args.probe_trials, args.seed, config=_config(args))
        obj["probe"] = {"c": probe.c, "c_lsq": probe.c_lsq, "within_jmo": probe.within(1.0)}
    human = result.to_csv() + "".join(
        f"mean gap {k}: {'n/a' if v is None else f'{v:.2f}%'}\n" for k, v in result.mean_gap.items())
    if "probe" in obj:
        human += f"probe: c = {obj['probe']['c']:.4f} (messages <= c*J*M*O_max)\n"
    _emit(obj, args.json, human, args.out)
    return EXIT_OK


def cmd_gantt(args) -> int:
    inst = _instance(args.instance)
    sched, raw = _read_schedule(args.schedule, inst, args.instance)
    breakdowns = list(args.breakdown or ())
    if "breakdown" in raw:
        b = raw["breakdown"]
        breakdowns.append((b["machine"], b["t_d"], b["delta_t"]))
    for w in raw.get("windows", []):
        breakdowns.append((w["machine"], w["start"], w["end"] - w["start"]))
    by_key = sched.by_key()
    staging = [(by_key[(s["job"], s["step"] - 1)].machine, s["start"], s["end"] - s["start"])
               for s in raw.get("staging", [])]
    svg = render_svg(sched, inst.num_machines, breakdowns, staging,
                     title=f"{inst.name}  makespan {sched.makespan}")
    if args.out:
        Path(args.out).write_text(svg)
    else:
        sys.stdout.write(svg)
    return EXIT_OK


def cmd_validate(args) -> int:
    inst = _instance(args.instance)
    sched, _ = _read_schedule(args.schedule, inst, args.instance)
    report = validate_schedule(inst, sched, list(args.breakdown or ()))
    if args.json:
        sys.stdout.write(report.to_json() + "\n")
    else:
        sys.stdout.write(("ok\n" if report.ok else report.to_text() + "\n"))
    return EXIT_OK if report.ok else EXIT_INPUT


# -- parser ------------------------------------------------------------------------

def _repair_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--twip", type=_nonneg, default=1, help="WIP staging cost per move")
    p.add_argument("--swap-budget", type=_nonneg, default=16,
                   help="max reorder evaluations per machine")
    p.add_argument("--policy", choices=[p.value for p in RestartPolicy], default="restart",
                   help="interrupted operations restart in full or resume")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="shoprepair", description="Job-shop scheduling and "
                                 "breakdown repair.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="build a schedule with a dispatching rule")
    p.add_argument("instance", help="file path, bundled name (ta01, dmu03) or demo:5x3")
    p.add_argument("--rule", default="spt", choices=[k.value for k in RuleKind])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--improve", action="store_true", help="run critical-path local search")
    p.add_argument("--budget", type=_nonneg, default=200)
    p.add_argument("--json", action="store_true")
    p.add_argument("-o", "--out", help="also write the JSON result here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("repair", help="repair a schedule after one machine breakdown")
    p.add_argument("instance", nargs="?", default="demo:5x3")
    p.add_argument("--schedule", help="schedule JSON (solve output or a bare record list)")
    p.add_argument("--machine", type=_nonneg, required=True)
    p.add_argument("--td", type=_nonneg, required=True, help="breakdown start")
    p.add_argument("--dt", type=_positive, required=True, help="breakdown length")
    p.add_argument("--prior", type=_breakdown_arg, action="append",
                   help="earlier downtime the schedule already respects: M,START,LENGTH")
    _repair_flags(p)
    p.add_argument("--json", action="store_true")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_repair)

    p = sub.add_parser("simulate", help="run a multi-breakdown scenario with an event log")
    p.add_argument("instance")
    p.add_argument("--failures", type=_nonneg, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-dur", type=_positive, default=5)
    p.add_argument("--max-dur", type=_positive, default=50)
    p.add_argument("--scenario", help="load breakdowns from a scenario JSON instead")
    p.add_argument("--save-scenario", help="write the scenario JSON here")
    p.add_argument("--rule", default="spt", choices=[k.value for k in RuleKind],
                   help="baseline schedule rule")
    p.add_argument("--log", help="event log path (default: <instance>_seed<seed>.events.jsonl)")
    _repair_flags(p)
    p.add_argument("--json", action="store_true")
    p.add_argument("-o", "--out", help="write the JSON report here")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("replay", help="rebuild the final schedule from an event log")
    p.add_argument("log")
    p.add_argument("--json", action="store_true")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("bench", help="gap-to-upper-bound table over instances and methods")
    p.add_argument("--instances", required=True, help="comma-separated names or paths")
    p.add_argument("--rules", default="all", help="'all' or comma-separated rule names")
    p.add_argument("--methods", help="explicit methods, e.g. spt,spt+improve,spt+lrcp")
    p.add_argument("--improve", action="store_true", help="add rule+improve for every rule")
    p.add_argument("--budget", type=_nonneg, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--failures", type=_nonneg, default=20)
    p.add_argument("--min-dur", type=_positive, default=5)
    p.add_argument("--max-dur", type=_positive, default=50)
    p.add_argument("--probe", help="also run the message-count probe, e.g. 5x3,10x5")
    p.add_argument("--probe-trials", type=_positive, default=10)
    p.add_argument("--csv", help="write the CSV table here")
    _repair_flags(p)
    p.add_argument("--json", action="store_true")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gantt", help="render a schedule as SVG")
    p.add_argument("instance", nargs="?", default="demo:5x3")
    p.add_argument("--schedule", help="schedule JSON; repair/simulate reports add their windows")
    p.add_argument("--breakdown", type=_breakdown_arg, action="append", help="M,START,LENGTH")
    p.add_argument("-o", "--out", help="SVG path (default: stdout)")
    p.set_defaults(func=cmd_gantt)

    p = sub.add_parser("validate", help="check a schedule against the instance")
    p.add_argument("instance", nargs="?", default="demo:5x3")
    p.add_argument("--schedule")
    p.add_argument("--breakdown", type=_breakdown_arg, action="append", help="M,START,LENGTH")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_validate)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INPUT
    try:
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (RepairError, RuntimeError) as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
