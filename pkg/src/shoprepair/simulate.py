"""Disruption scenarios, the sequential repair loop and its append-only event log."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .dispatch import Rule, RuleKind, schedule_with_rule
from .lrcp import Breakdown, RepairConfig, repair
from .model import Instance, Schedule, ScheduledOp
from .rng import SplitMix64
from .validate import validate_schedule

KINDS = ("Scheduled", "BreakdownStart", "Rescheduled", "DelaySent", "DelayApplied",
         "SwapApplied", "RepairDone")


class LogError(ValueError):
    def __init__(self, msg: str, last_valid_seq: int):
        super().__init__(f"{msg} (last valid seq: {last_valid_seq})")
        self.last_valid_seq = last_valid_seq


@dataclass(frozen=True)
class DisruptionScenario:
    seed: int
    events: tuple[Breakdown, ...] = ()

    def to_json(self) -> str:
        return json.dumps({"seed": self.seed,
                           "events": [{"machine": b.machine, "t_d": b.t_d, "delta_t": b.delta_t}
                                      for b in self.events]}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> DisruptionScenario:
        raw = json.loads(text)
        events = sorted((Breakdown(int(e["machine"]), int(e["t_d"]), int(e["delta_t"]))
                         for e in raw.get("events", [])),
                        key=lambda b: (b.t_d, b.machine, b.delta_t))
        return cls(int(raw.get("seed", 0)), tuple(events))


def generate_scenario(instance: Instance, seed: int, n_failures: int,
                      min_dur: int, max_dur: int) -> DisruptionScenario:
    """Draw breakdowns: machine uniform over all machines, start uniform over
    [0, H) with H the SPT makespan, duration uniform over [min_dur, max_dur]."""
    if n_failures < 0:
        raise ValueError("n_failures must be >= 0")
    if min_dur < 1:
        raise ValueError("min_dur must be >= 1")
    if max_dur < min_dur:
        raise ValueError(f"max_dur {max_dur} < min_dur {min_dur}")
    if n_failures == 0:
        return DisruptionScenario(seed)
    horizon = schedule_with_rule(instance, Rule(RuleKind.SPT)).makespan
    rng = SplitMix64(seed)
    events = []
    for _ in range(n_failures):
        m = rng.below(instance.num_machines)
        t = rng.below(horizon) if horizon > 0 else 0
        d = rng.between(min_dur, max_dur)
        events.append(Breakdown(m, t, d))
    events.sort(key=lambda b: (b.t_d, b.machine, b.delta_t))
    return DisruptionScenario(seed, tuple(events))


class EventLog:
    """Append-only log; optionally mirrored to a line-delimited JSON file."""

    def __init__(self, path: str | os.PathLike | None = None):
        self.entries: list[dict] = []
        self.path = Path(path) if path is not None else None
        self._fh = open(self.path, "w") if self.path is not None else None

    def append(self, t: int, kind: str, payload: dict) -> dict:
        if kind not in KINDS:
            raise ValueError(f"unknown event kind {kind!r}")
        entry = {"seq": len(self.entries), "t": t, "kind": kind, "payload": payload}
        self.entries.append(entry)
        if self._fh is not None:
            self._fh.write(json.dumps(entry, sort_keys=True) + "\n")
            if kind == "RepairDone":
                self._fh.flush()
                os.fsync(self._fh.fileno())
        return entry

    def close(self) -> None:
        if self._fh is not None:
            self._fh.flush()
            os.fsync(self._fh.fileno())
            self._fh.close()
            self._fh = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_log(path: str | os.PathLike) -> list[dict]:
    entries = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                entry = json.loads(line)
            except json.JSONDecodeError:
                raise LogError(f"corrupt entry on line {lineno}", len(entries) - 1) from None
            if not isinstance(entry, dict) or set(entry) != {"seq", "t", "kind", "payload"}:
                raise LogError(f"malformed entry on line {lineno}", len(entries) - 1)
            entries.append(entry)
    return entries


def _op_payload(o: ScheduledOp) -> dict:
    return {"job": o.job, "step": o.step + 1, "machine": o.machine,
            "start": o.start, "end": o.end, "processed": o.processed}


def replay(entries: Iterable[dict], base: Schedule | None = None) -> Schedule:
    """Rebuild the final schedule from ``Scheduled`` and ``Rescheduled`` entries alone."""
    ops = dict(base.by_key()) if base is not None else {}
    last = -1
    for entry in entries:
        seq = entry.get("seq")
        if seq != last + 1:
            raise LogError(f"sequence gap: expected {last + 1}, found {seq}", last)
        kind = entry.get("kind")
        if kind not in KINDS:
            raise LogError(f"unknown kind {kind!r} at seq {seq}", last)
        if kind in ("Scheduled", "Rescheduled"):
            p = entry["payload"]
            try:
                op = ScheduledOp(int(p["job"]), int(p["step"]) - 1, int(p["machine"]),
                                 int(p["start"]), int(p["end"]), int(p.get("processed", 0)))
            except (KeyError, TypeError, ValueError):
                raise LogError(f"bad payload at seq {seq}", last) from None
            if kind == "Rescheduled" and op.key not in ops:
                raise LogError(f"rescheduling unknown operation at seq {seq}", last)
            ops[op.key] = op
        last = seq
    return Schedule(ops.values())


@dataclass
class ScenarioReport:
    instance: str
    seed: int
    base_makespan: int
    schedule: Schedule
    wip_moves: int
    messages: int
    events: list[dict] = field(default_factory=list)
    windows: dict[int, list[tuple[int, int]]] = field(default_factory=dict)

    @property
    def makespan(self) -> int:
        return self.schedule.makespan

    def breakdowns(self) -> list[tuple[int, int, int]]:
        return [(m, lo, hi - lo) for m, ws in sorted(self.windows.items()) for lo, hi in ws]

    def to_dict(self) -> dict:
        return {"instance": self.instance, "seed": self.seed,
                "base_makespan": self.base_makespan, "makespan": self.makespan,
                "wip_moves": self.wip_moves, "messages": self.messages,
                "events": self.events,
                "windows": [{"machine": m, "start": lo, "end": hi}
                            for m, ws in sorted(self.windows.items()) for lo, hi in ws],
                "schedule": self.schedule.to_records()}


def _merge(ws: list[tuple[int, int]]) -> list[tuple[int, int]]:
    out: list[tuple[int, int]] = []
    for lo, hi in sorted(ws):
        if out and lo <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], hi))
        else:
            out.append((lo, hi))
    return out


def run_scenario(instance: Instance, base: Schedule, scenario: DisruptionScenario,
                 config: RepairConfig = RepairConfig(), log: EventLog | None = None) -> ScenarioReport:
    """Apply each breakdown in time order, repairing before the next arrives.

    A breakdown starting inside an earlier window on the same machine extends
    that window.
    """
    report = validate_schedule(instance, base)
    if not report.ok:
        raise ValueError(f"base schedule is invalid:\n{report.to_text()}")
    if log is None:
        log = EventLog()
    for o in base.ops:
        log.append(o.start, "Scheduled", _op_payload(o))
    current = base
    windows: dict[int, list[tuple[int, int]]] = {}
    wip = messages = 0
    per_event = []
    for bd in sorted(scenario.events, key=lambda b: (b.t_d, b.machine, b.delta_t)):
        log.append(bd.t_d, "BreakdownStart", {"machine": bd.machine, "t_d": bd.t_d,
                                              "delta_t": bd.delta_t})
        outcome = repair(instance, current, bd, config, windows)
        for what, msg in outcome.journal:
            kind = "DelaySent" if what == "sent" else "DelayApplied"
            log.append(bd.t_d, kind, {"job": msg.job, "step": msg.step + 1, "new_end": msg.new_end})
        for s in outcome.swap_log:
            log.append(bd.t_d, "SwapApplied", {"machine": s.machine, "pos_a": s.pos_a,
                                               "pos_b": s.pos_b, "kind": s.kind, "delta": s.delta})
        before = current.by_key()
        for o in outcome.schedule.ops:
            if before[o.key] != o:
                log.append(bd.t_d, "Rescheduled", _op_payload(o))
        windows.setdefault(bd.machine, []).append((bd.t_d, bd.end))
        windows[bd.machine] = _merge(windows[bd.machine])
        every = [(m, lo, hi - lo) for m, ws in windows.items() for lo, hi in ws]
        check = validate_schedule(instance, outcome.schedule, every)
        if not check.ok:
            raise RuntimeError(f"intermediate schedule invalid after {bd}:\n{check.to_text()}")
        current = outcome.schedule
        wip += outcome.wip_moves
        messages += outcome.messages
        log.append(bd.t_d, "RepairDone", {"makespan": current.makespan,
                                          "wip_moves": outcome.wip_moves,
                                          "messages": outcome.messages})
        per_event.append({"machine": bd.machine, "t_d": bd.t_d, "delta_t": bd.delta_t,
                          "makespan": current.makespan, "wip_moves": outcome.wip_moves,
                          "messages": outcome.messages})
    return ScenarioReport(instance.name, scenario.seed, base.makespan, current, wip, messages,
                          per_event, windows)
