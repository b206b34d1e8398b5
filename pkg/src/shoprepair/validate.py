"""Independent feasibility checker for schedules, optionally with breakdown windows."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Iterable

from .model import Instance, Schedule


class Kind(enum.IntEnum):
    PRECEDENCE = 0
    CAPACITY = 1
    COMPLETENESS = 2
    BREAKDOWN_OVERLAP = 3
    DURATION_MISMATCH = 4
    NEGATIVE_START = 5


@dataclass(frozen=True, order=True)
class Violation:
    kind: Kind
    job: int
    step: int
    machine: int
    detail: str = field(compare=False)

    def to_dict(self) -> dict:
        return {"kind": self.kind.name.lower(), "job": self.job, "step": self.step + 1,
                "machine": self.machine, "detail": self.detail}


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[Kind]:
        return {v.kind for v in self.violations}

    def to_text(self) -> str:
        if self.ok:
            return "ok"
        return "\n".join(f"{v.kind.name.lower()} job={v.job} step={v.step + 1} "
                         f"machine={v.machine}: {v.detail}" for v in self.violations)

    def to_json(self) -> str:
        return json.dumps({"ok": self.ok, "violations": [v.to_dict() for v in self.violations]},
                          sort_keys=True)


def validate_schedule(instance: Instance, schedule: Schedule,
                      breakdowns: Iterable[tuple[int, int, int]] = ()) -> ValidationReport:
    """Check precedence, capacity, completeness, breakdown windows, durations, starts.

    Intervals are half-open, so back-to-back operations on one machine and an
    operation ending exactly when a window opens are both legal.
    """
    out: list[Violation] = []
    seen: dict[tuple[int, int], list] = {}
    for o in schedule.ops:
        seen.setdefault(o.key, []).append(o)

    for (j, k), occ in seen.items():
        if not (0 <= j < instance.num_jobs and 0 <= k < instance.num_ops(j)):
            out.append(Violation(Kind.COMPLETENESS, j, k, occ[0].machine, "operation not in instance"))
        elif len(occ) > 1:
            out.append(Violation(Kind.COMPLETENESS, j, k, occ[0].machine,
                                 f"scheduled {len(occ)} times"))
    for j in range(instance.num_jobs):
        for k in range(instance.num_ops(j)):
            if (j, k) not in seen:
                out.append(Violation(Kind.COMPLETENESS, j, k, instance.jobs[j][k][0], "not scheduled"))

    for o in schedule.ops:
        if o.start < 0:
            out.append(Violation(Kind.NEGATIVE_START, o.job, o.step, o.machine, f"start {o.start}"))
        if 0 <= o.job < instance.num_jobs and 0 <= o.step < instance.num_ops(o.job):
            m, d = instance.jobs[o.job][o.step]
            if o.machine != m:
                out.append(Violation(Kind.DURATION_MISMATCH, o.job, o.step, o.machine,
                                     f"runs on machine {o.machine}, instance requires {m}"))
            if o.end - o.start + o.processed != d:
                out.append(Violation(Kind.DURATION_MISMATCH, o.job, o.step, o.machine,
                                     f"interval {o.start}-{o.end} (+{o.processed} done) != duration {d}"))

    by_key = {key: occ[0] for key, occ in seen.items()}
    for (j, k), o in by_key.items():
        prev = by_key.get((j, k - 1))
        if k > 0 and prev is not None and o.start < prev.end:
            out.append(Violation(Kind.PRECEDENCE, j, k, o.machine,
                                 f"starts at {o.start} before step {k} ends at {prev.end}"))

    for m, seq in schedule.machine_sequences().items():
        busy = [o for o in seq if o.end > o.start]
        for i, b in enumerate(busy[1:], start=1):
            a = max(busy[:i], key=lambda o: o.end)
            if b.start < a.end:
                out.append(Violation(Kind.CAPACITY, b.job, b.step, m,
                                     f"{b.start}-{b.end} overlaps job {a.job} step {a.step + 1} "
                                     f"{a.start}-{a.end}"))

    windows = [(m, td, td + dt) for m, td, dt in breakdowns]
    for o in schedule.ops:
        if o.end <= o.start:
            continue
        for m, lo, hi in windows:
            if o.machine == m and o.start < hi and lo < o.end:
                out.append(Violation(Kind.BREAKDOWN_OVERLAP, o.job, o.step, m,
                                     f"{o.start}-{o.end} intersects downtime {lo}-{hi}"))
    return ValidationReport(tuple(sorted(out)))
