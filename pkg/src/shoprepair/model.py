"""Domain types shared by every module: instances, schedules, the execution tracker."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Iterable

OpKey = tuple[int, int]  # (job, step), both 0-based


@dataclass(frozen=True)
class Operation:
    job: int
    step: int
    machine: int
    duration: int


@dataclass(frozen=True)
class Instance:
    """J jobs, each an ordered chain of (machine, duration) operations."""

    name: str
    num_jobs: int
    num_machines: int
    jobs: tuple[tuple[tuple[int, int], ...], ...]

    def __post_init__(self):
        if len(self.jobs) != self.num_jobs:
            raise ValueError(f"expected {self.num_jobs} jobs, got {len(self.jobs)}")
        for j, ops in enumerate(self.jobs):
            for k, (m, d) in enumerate(ops):
                if not 0 <= m < self.num_machines:
                    raise ValueError(f"job {j} step {k}: machine {m} out of range")
                if d < 0:
                    raise ValueError(f"job {j} step {k}: negative duration {d}")

    @classmethod
    def from_lists(cls, name: str, jobs: Iterable[Iterable[tuple[int, int]]],
                   num_machines: int | None = None) -> Instance:
        jobs = tuple(tuple((int(m), int(d)) for m, d in ops) for ops in jobs)
        if num_machines is None:
            num_machines = 1 + max((m for ops in jobs for m, _ in ops), default=-1)
        return cls(name, len(jobs), num_machines, jobs)

    def op(self, job: int, step: int) -> Operation:
        m, d = self.jobs[job][step]
        return Operation(job, step, m, d)

    def operations(self) -> list[Operation]:
        return [self.op(j, k) for j in range(self.num_jobs) for k in range(len(self.jobs[j]))]

    def num_ops(self, job: int) -> int:
        return len(self.jobs[job])

    def is_terminal(self, job: int, step: int) -> bool:
        return step == len(self.jobs[job]) - 1

    @property
    def o_max(self) -> int:
        return max((len(ops) for ops in self.jobs), default=0)

    @property
    def total_ops(self) -> int:
        return sum(len(ops) for ops in self.jobs)


@dataclass(frozen=True, order=True)
class ScheduledOp:
    """One placed operation.

    ``processed`` is work already done before an interruption; it stays 0
    unless an operation was resumed rather than restarted after a breakdown.
    """

    job: int
    step: int
    machine: int
    start: int
    end: int
    processed: int = 0

    @property
    def key(self) -> OpKey:
        return (self.job, self.step)


@dataclass(frozen=True)
class Schedule:
    ops: tuple[ScheduledOp, ...]

    def __init__(self, ops: Iterable[ScheduledOp] = ()):
        object.__setattr__(self, "ops", tuple(sorted(ops, key=lambda o: (o.job, o.step))))

    @property
    def makespan(self) -> int:
        return makespan(self)

    def by_key(self) -> dict[OpKey, ScheduledOp]:
        return {o.key: o for o in self.ops}

    def machine_sequences(self) -> dict[int, list[ScheduledOp]]:
        seqs: dict[int, list[ScheduledOp]] = {}
        for o in self.ops:
            seqs.setdefault(o.machine, []).append(o)
        for seq in seqs.values():
            seq.sort(key=lambda o: (o.start, o.job, o.step))
        return seqs

    def to_records(self) -> list[dict]:
        """External form: 1-based steps, machine ids as given."""
        out = []
        for o in self.ops:
            rec = {"job": o.job, "step": o.step + 1, "machine": o.machine,
                   "start": o.start, "end": o.end}
            if o.processed:
                rec["processed"] = o.processed
            out.append(rec)
        return out

    @classmethod
    def from_records(cls, records: Iterable[dict]) -> Schedule:
        return cls(ScheduledOp(int(r["job"]), int(r["step"]) - 1, int(r["machine"]),
                               int(r["start"]), int(r["end"]), int(r.get("processed", 0)))
                   for r in records)


def makespan(schedule: Schedule) -> int:
    return max((o.end for o in schedule.ops), default=0)


def lower_bound(instance: Instance) -> int:
    machine_load = [0] * instance.num_machines
    for ops in instance.jobs:
        for m, d in ops:
            machine_load[m] += d
    job_load = [sum(d for _, d in ops) for ops in instance.jobs]
    return max(max(machine_load, default=0), max(job_load, default=0))


def schedule_from_orders(instance: Instance, orders: dict[int, list[OpKey]]) -> Schedule | None:
    """Semi-active timing for fixed machine sequences; None if the orders deadlock."""
    pos = {key: (m, i) for m, seq in orders.items() for i, key in enumerate(seq)}
    nxt_step = [0] * instance.num_jobs
    ptr = {m: 0 for m in orders}
    job_end = [0] * instance.num_jobs
    mach_end = {m: 0 for m in orders}
    placed: list[ScheduledOp] = []
    progress = True
    while progress:
        progress = False
        for m, seq in orders.items():
            while ptr[m] < len(seq):
                j, k = seq[ptr[m]]
                if nxt_step[j] != k:
                    break
                d = instance.jobs[j][k][1]
                s = max(job_end[j], mach_end[m])
                placed.append(ScheduledOp(j, k, m, s, s + d))
                job_end[j] = mach_end[m] = s + d
                nxt_step[j] += 1
                ptr[m] += 1
                progress = True
    if len(placed) != len(pos):
        return None
    return Schedule(placed)


class Status(enum.IntEnum):
    WAITING = 0
    IN_PROGRESS = 1
    COMPLETED = 2


class RestartPolicy(enum.Enum):
    RESTART_FULL = "restart"
    RESUME_REMAINING = "resume"


@dataclass(frozen=True)
class RepairConfig:
    t_wip: int = 1
    swap_budget: int = 16
    restart_policy: RestartPolicy = RestartPolicy.RESTART_FULL

    def __post_init__(self):
        if self.t_wip < 0:
            raise ValueError("t_wip must be non-negative")
        if self.swap_budget < 0:
            raise ValueError("swap_budget must be non-negative")


@dataclass(frozen=True)
class Metrics:
    makespan: int
    wip_moves: int = 0
    messages: int = 0
    gap_percent: float | None = None


@dataclass
class TrackerEntry:
    op: ScheduledOp
    status: Status = Status.WAITING
    interrupted: bool = False

    @property
    def frozen(self) -> bool:
        # completed work and operations running on healthy machines cannot move
        return self.status == Status.COMPLETED or (
            self.status == Status.IN_PROGRESS and not self.interrupted)


@dataclass
class ExecutionTracker:
    """Per-operation status plus per-machine queues ordered by start time.

    ``windows`` holds every known breakdown interval per machine (half-open),
    ``baseline`` the start times before the current repair episode began and
    ``staged`` the WIP staging interval of each operation advanced at a cost.
    """

    instance: Instance
    entries: dict[OpKey, TrackerEntry]
    queues: dict[int, list[OpKey]]
    windows: dict[int, list[tuple[int, int]]] = field(default_factory=dict)
    baseline: dict[OpKey, int] = field(default_factory=dict)
    now: int = 0
    staged: dict[OpKey, tuple[int, int]] = field(default_factory=dict)

    def copy(self) -> ExecutionTracker:
        return ExecutionTracker(
            self.instance,
            {k: replace(e) for k, e in self.entries.items()},
            {m: list(q) for m, q in self.queues.items()},
            {m: list(w) for m, w in self.windows.items()},
            dict(self.baseline),
            self.now,
            dict(self.staged),
        )

    def schedule(self) -> Schedule:
        return Schedule(e.op for e in self.entries.values())

    def makespan(self) -> int:
        return max((e.op.end for e in self.entries.values()), default=0)

    def resort(self, machine: int) -> None:
        self.queues[machine].sort(key=lambda k: (self.entries[k].op.start, k))


def tracker_from_schedule(instance: Instance, schedule: Schedule,
                          windows: dict[int, list[tuple[int, int]]] | None = None) -> ExecutionTracker:
    expected = {(j, k) for j in range(instance.num_jobs) for k in range(instance.num_ops(j))}
    got = schedule.by_key()
    if set(got) != expected or len(got) != len(schedule.ops):
        missing = sorted(expected - set(got))
        raise ValueError(f"schedule is incomplete or has extra operations (missing {missing[:5]})")
    entries = {key: TrackerEntry(op) for key, op in got.items()}
    queues: dict[int, list[OpKey]] = {m: [] for m in range(instance.num_machines)}
    for key in sorted(got, key=lambda k: (got[k].start, k)):
        queues[got[key].machine].append(key)
    return ExecutionTracker(instance, entries, queues,
                            {m: list(w) for m, w in (windows or {}).items()},
                            {key: op.start for key, op in got.items()})
