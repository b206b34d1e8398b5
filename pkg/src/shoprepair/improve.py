"""Validation-replan loop: critical-path local search with strict-improvement acceptance."""

from __future__ import annotations

from dataclasses import dataclass

from .model import Instance, OpKey, Schedule, schedule_from_orders
from .rng import SplitMix64
from .validate import validate_schedule


@dataclass(frozen=True)
class TraceEntry:
    iteration: int
    makespan: int
    valid: bool


def machine_orders(schedule: Schedule) -> dict[int, list[OpKey]]:
    return {m: [o.key for o in seq] for m, seq in schedule.machine_sequences().items()}


def critical_path(schedule: Schedule, rng: SplitMix64 | None = None) -> list[OpKey]:
    """One longest chain ending at the makespan, earliest operation first.

    Where several predecessors are tight, ``rng`` picks one; without it the
    machine predecessor wins, then the job predecessor.
    """
    if not schedule.ops:
        return []
    by_key = schedule.by_key()
    mach_prev = {}
    for seq in schedule.machine_sequences().values():
        for a, b in zip(seq, seq[1:]):
            mach_prev[b.key] = a.key
    ms = schedule.makespan
    ends = sorted(k for k, o in by_key.items() if o.end == ms)
    cur = ends[rng.below(len(ends))] if rng and len(ends) > 1 else ends[0]
    path = [cur]
    while True:
        o = by_key[cur]
        tight = []
        mp = mach_prev.get(cur)
        if mp is not None and by_key[mp].end == o.start:
            tight.append(mp)
        jp = (o.job, o.step - 1)
        if o.step > 0 and by_key[jp].end == o.start:
            tight.append(jp)
        if not tight:
            break
        cur = tight[rng.below(len(tight))] if rng and len(tight) > 1 else tight[0]
        path.append(cur)
    path.reverse()
    return path


def neighbours(schedule: Schedule, orders: dict[int, list[OpKey]], path: list[OpKey]):
    """Adjacent same-machine pairs on the critical path, as (machine, index) swaps."""
    by_key = schedule.by_key()
    pos = {key: i for seq in orders.values() for i, key in enumerate(seq)}
    moves = []
    for a, b in zip(path, path[1:]):
        ma, mb = by_key[a].machine, by_key[b].machine
        if ma == mb and pos[b] == pos[a] + 1:
            moves.append((ma, pos[a]))
    return moves


def improve(instance: Instance, initial: Schedule, budget: int = 200,
            seed: int = 0) -> tuple[Schedule, list[TraceEntry]]:
    report = validate_schedule(instance, initial)
    if not report.ok:
        raise ValueError(f"initial schedule is invalid:\n{report.to_text()}")
    rng = SplitMix64(seed)
    orders = machine_orders(initial)
    current = schedule_from_orders(instance, orders)
    # re-timing can only tighten a feasible schedule
    if current is None or current.makespan > initial.makespan:
        current = initial
    trace = [TraceEntry(0, current.makespan, True)]
    for it in range(1, budget + 1):
        path = critical_path(current, rng)
        best = None
        for m, i in neighbours(current, orders, path):
            cand_orders = dict(orders)
            seq = list(orders[m])
            seq[i], seq[i + 1] = seq[i + 1], seq[i]
            cand_orders[m] = seq
            cand = schedule_from_orders(instance, cand_orders)
            if cand is None:
                continue
            if cand.makespan < current.makespan and (best is None or cand.makespan < best[0].makespan):
                best = (cand, cand_orders)
        if best is None:
            break
        cand, cand_orders = best
        valid = validate_schedule(instance, cand).ok
        if not valid:
            break
        current, orders = cand, cand_orders
        trace.append(TraceEntry(it, current.makespan, True))
    return current, trace
