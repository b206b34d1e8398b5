"""Local reactive compensation after a machine breakdown.

The repair runs as message passing between per-machine agents inside a
single deterministic loop:

1. status update: label operations, restart the interrupted one after the
   downtime and push the broken machine's queue right;
2. propagation: every moved non-terminal operation sends a DELAY_NOTIFY to
   the machine hosting its job successor;
3. cascade: FIFO delivery of notifications, pushing successors (and whatever
   queues behind them) later and forwarding further notices;
4. queue reordering: per-machine reorders that sink job-terminal operations,
   accepted only when makespan plus WIP staging cost drops;
5. a second cascade so reorder-driven changes are announced downstream.

Operations advanced ahead of their pre-repair start need a WIP staging
interval of ``t_wip`` on their machine right before they start. The cost is
masked when that interval falls in idle machine time, or when the job's
previous operation finished at least ``t_wip`` earlier (the job is already
waiting at the machine). Unmasked staging is charged as a WIP move and
occupies the machine.
"""

from __future__ import annotations

import collections
from dataclasses import dataclass, field, replace

from .model import (ExecutionTracker, Instance, OpKey, RepairConfig, RestartPolicy, Schedule,
                    Status, tracker_from_schedule)
from .validate import validate_schedule


class RepairError(RuntimeError):
    """An internal invariant broke; the repaired schedule cannot be trusted."""


@dataclass(frozen=True)
class Breakdown:
    machine: int
    t_d: int
    delta_t: int

    def __post_init__(self):
        if self.t_d < 0:
            raise ValueError(f"breakdown time must be >= 0, got {self.t_d}")
        if self.delta_t < 1:
            raise ValueError(f"breakdown duration must be >= 1, got {self.delta_t}")

    @property
    def end(self) -> int:
        return self.t_d + self.delta_t

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.machine, self.t_d, self.delta_t)


@dataclass(frozen=True)
class DelayNotify:
    job: int
    step: int
    new_end: int


@dataclass(frozen=True)
class SwapRecord:
    machine: int
    pos_a: int
    pos_b: int
    kind: str  # "sink" (terminal ops to the tail) or "swap"
    delta: int


@dataclass
class RepairOutcome:
    schedule: Schedule
    wip_moves: int
    messages: int
    phase_trace: list[tuple[str, int]]
    swap_log: list[SwapRecord] = field(default_factory=list)
    staging: dict[OpKey, tuple[int, int]] = field(default_factory=dict)
    evaluations: dict[int, int] = field(default_factory=dict)
    journal: list[tuple[str, DelayNotify]] = field(default_factory=list)

    @property
    def makespan(self) -> int:
        return self.schedule.makespan

    def to_dict(self) -> dict:
        return {
            "makespan": self.makespan,
            "wip_moves": self.wip_moves,
            "messages": self.messages,
            "phase_trace": [{"phase": p, "makespan": ms} for p, ms in self.phase_trace],
            "swaps": [{"machine": s.machine, "pos_a": s.pos_a, "pos_b": s.pos_b,
                       "kind": s.kind, "delta": s.delta} for s in self.swap_log],
            "staging": [{"job": j, "step": k + 1, "start": lo, "end": hi}
                        for (j, k), (lo, hi) in sorted(self.staging.items())],
            "schedule": self.schedule.to_records(),
        }


# -- time placement ------------------------------------------------------------

def _fit(windows: list[tuple[int, int]], t: int, length: int, pre: int = 0) -> int:
    """Earliest x >= t with [x - pre, x + length) clear of every window."""
    x = t
    moved = True
    while moved:
        moved = False
        for lo, hi in windows:
            if x - pre < hi and lo < x + length and (length > 0 or pre > 0):
                x = hi + pre
                moved = True
    return x


def _remaining(tracker: ExecutionTracker, key: OpKey) -> int:
    e = tracker.entries[key]
    return tracker.instance.jobs[key[0]][key[1]][1] - e.op.processed


def _place(tracker: ExecutionTracker, key: OpKey, start: int) -> None:
    e = tracker.entries[key]
    e.op = replace(e.op, start=start, end=start + (e.op.end - e.op.start))


# -- phase I -------------------------------------------------------------------

def phase1_status_update(tracker: ExecutionTracker, breakdown: Breakdown,
                         config: RepairConfig = RepairConfig()) -> ExecutionTracker:
    inst = tracker.instance
    if not 0 <= breakdown.machine < inst.num_machines:
        raise ValueError(f"machine {breakdown.machine} out of range [0, {inst.num_machines})")
    t = tracker.copy()
    k, td = breakdown.machine, breakdown.t_d
    t.now = td
    t.windows.setdefault(k, []).append((td, breakdown.end))
    t.windows[k].sort()
    for key, e in t.entries.items():
        s, en = e.op.start, e.op.end
        if en <= td:
            e.status = Status.COMPLETED
        elif s <= td < en:
            e.status = Status.IN_PROGRESS
            e.interrupted = e.op.machine == k
        else:
            e.status = Status.WAITING
    win = t.windows[k]
    cursor = 0
    for key in t.queues.get(k, []):
        e = t.entries[key]
        if e.status == Status.COMPLETED:
            cursor = max(cursor, e.op.end)
            continue
        if e.interrupted:
            done = e.op.processed
            if config.restart_policy is RestartPolicy.RESUME_REMAINING:
                done += td - e.op.start
            else:
                done = 0
            dur = inst.jobs[key[0]][key[1]][1] - done
            ns = _fit(win, max(td, cursor), dur)
            e.op = replace(e.op, start=ns, end=ns + dur, processed=done)
        else:
            ns = _fit(win, max(e.op.start, cursor), e.op.end - e.op.start)
            _place(t, key, ns)
        cursor = e.op.end
    return t


# -- phase II ------------------------------------------------------------------

def phase2_propagate(tracker: ExecutionTracker) -> tuple[ExecutionTracker, list[DelayNotify]]:
    t = tracker.copy()
    outbox = []
    for m in sorted(t.queues):
        t.resort(m)
        for key in t.queues[m]:
            e = t.entries[key]
            if e.op.start != t.baseline[key] and not t.instance.is_terminal(*key):
                outbox.append(DelayNotify(key[0], key[1], e.op.end))
    return t, outbox


# -- phase IV ------------------------------------------------------------------

def phase4_cascade(tracker: ExecutionTracker, inbox: list[DelayNotify],
                   journal: list | None = None) -> tuple[ExecutionTracker, int]:
    t = tracker.copy()
    inst = t.instance
    queue = collections.deque(inbox)
    processed = 0
    while queue:
        msg = queue.popleft()
        processed += 1
        if (msg.job, msg.step) not in t.entries or (msg.job, msg.step + 1) not in t.entries:
            raise ValueError(f"DELAY_NOTIFY names no successor: job {msg.job} step {msg.step}")
        succ = (msg.job, msg.step + 1)
        e = t.entries[succ]
        if e.op.start >= msg.new_end:
            continue
        if e.frozen:
            raise RepairError(f"operation {succ} is completed or running and cannot be delayed")
        m = e.op.machine
        win = t.windows.get(m, [])
        changed = [succ]
        _place(t, succ, _fit(win, msg.new_end, e.op.end - e.op.start))
        q = t.queues[m]
        cursor = e.op.end
        for nxt in q[q.index(succ) + 1:]:
            f = t.entries[nxt]
            ns = _fit(win, max(f.op.start, cursor), f.op.end - f.op.start)
            if ns == f.op.start:
                break
            if f.frozen:
                raise RepairError(f"operation {nxt} is completed or running and cannot be delayed")
            _place(t, nxt, ns)
            changed.append(nxt)
            cursor = f.op.end
        if journal is not None:
            journal.append(("applied", msg))
        for key in changed:
            if not inst.is_terminal(*key) and t.entries[key].status != Status.COMPLETED:
                out = DelayNotify(key[0], key[1], t.entries[key].op.end)
                queue.append(out)
                if journal is not None:
                    journal.append(("sent", out))
    return t, processed


# -- phase III -----------------------------------------------------------------

@dataclass
class _Rebuild:
    times: dict[OpKey, tuple[int, int]]
    staged: dict[OpKey, tuple[int, int]]
    makespan: int

    def cost(self, t_wip: int) -> int:
        return self.makespan + t_wip * len(self.staged)


def _rebuild(tracker: ExecutionTracker, orders: dict[int, list[OpKey]],
             config: RepairConfig) -> _Rebuild | None:
    """Earliest-start timing for fixed queue orders; None when orders deadlock."""
    inst = tracker.instance
    entries = tracker.entries
    succs: dict[OpKey, list[OpKey]] = {key: [] for key in entries}
    indeg = dict.fromkeys(entries, 0)
    mach_prev: dict[OpKey, OpKey] = {}
    for q in orders.values():
        for a, b in zip(q, q[1:]):
            succs[a].append(b)
            indeg[b] += 1
            mach_prev[b] = a
    for (j, k) in entries:
        if k > 0:
            succs[(j, k - 1)].append((j, k))
            indeg[(j, k)] += 1
    ready = collections.deque(sorted(key for key, d in indeg.items() if d == 0))
    times: dict[OpKey, tuple[int, int]] = {}
    staged: dict[OpKey, tuple[int, int]] = {}
    w = config.t_wip
    now = tracker.now
    while ready:
        key = ready.popleft()
        e = entries[key]
        if e.frozen:
            times[key] = (e.op.start, e.op.end)
        else:
            p = _remaining(tracker, key)
            m = e.op.machine
            win = tracker.windows.get(m, [])
            prev_end = times[mach_prev[key]][1] if key in mach_prev else 0
            pred_end = times[(key[0], key[1] - 1)][1] if key[1] > 0 else None
            est = _fit(win, max(prev_end, pred_end or 0, now), p)
            base = tracker.baseline.get(key, est)
            if w > 0 and est < base:
                idle = est - w >= max(prev_end, now) and all(
                    not (lo < est and est - w < hi) for lo, hi in win)
                waiting = pred_end is not None and pred_end <= est - w
                if not (idle or waiting):
                    staged_start = _fit(win, max(est, prev_end + w, now + w), p, pre=w)
                    if staged_start < base:
                        staged[key] = (staged_start - w, staged_start)
                        est = staged_start
                    else:
                        est = _fit(win, max(est, base), p)
            times[key] = (est, est + p)
        for nxt in succs[key]:
            indeg[nxt] -= 1
            if indeg[nxt] == 0:
                ready.append(nxt)
    if len(times) != len(entries):
        return None
    return _Rebuild(times, staged, max((e for _, e in times.values()), default=0))


def _cost(tracker: ExecutionTracker, config: RepairConfig) -> int:
    return tracker.makespan() + config.t_wip * len(tracker.staged)


def _evaluate(tracker: ExecutionTracker, machine: int, new_queue: list[OpKey],
              config: RepairConfig) -> tuple[int | None, _Rebuild | None]:
    orders = dict(tracker.queues)
    orders[machine] = new_queue
    res = _rebuild(tracker, orders, config)
    if res is None:
        return None, None
    return res.cost(config.t_wip) - _cost(tracker, config), res


def eval_swap(tracker: ExecutionTracker, machine: int, pos_a: int, pos_b: int,
              config: RepairConfig = RepairConfig()) -> int | None:
    """Cost change (makespan plus WIP staging) of exchanging two queue entries.

    Negative means the exchange helps. Returns None when the exchange would
    deadlock the precedence graph.
    """
    q = tracker.queues[machine]
    if not 0 <= pos_a < pos_b < len(q):
        raise IndexError(f"positions {pos_a}, {pos_b} invalid for a queue of {len(q)}")
    if tracker.entries[q[pos_a]].frozen or tracker.entries[q[pos_b]].frozen:
        raise ValueError("completed or running operations cannot be reordered")
    new_q = list(q)
    new_q[pos_a], new_q[pos_b] = new_q[pos_b], new_q[pos_a]
    return _evaluate(tracker, machine, new_q, config)[0]


def _apply(tracker: ExecutionTracker, machine: int, new_queue: list[OpKey], res: _Rebuild,
           outbox: list[DelayNotify]) -> None:
    before = {key: e.op.end for key, e in tracker.entries.items()}
    tracker.queues[machine] = list(new_queue)
    for key, (s, en) in res.times.items():
        e = tracker.entries[key]
        if (s, en) != (e.op.start, e.op.end):
            e.op = replace(e.op, start=s, end=en)
    tracker.staged = dict(res.staged)
    for m in tracker.queues:
        if m != machine:
            tracker.resort(m)
    for key in sorted(tracker.entries):
        e = tracker.entries[key]
        if e.op.end != before[key] and not tracker.instance.is_terminal(*key):
            outbox.append(DelayNotify(key[0], key[1], e.op.end))


def phase3_queue_reorder(tracker: ExecutionTracker, config: RepairConfig = RepairConfig(),
                         outbox: list[DelayNotify] | None = None,
                         evaluations: dict[int, int] | None = None,
                         ) -> tuple[ExecutionTracker, int, list[SwapRecord]]:
    """Per-machine queue reordering under a budget of ``swap_budget`` evaluations.

    First candidate per queue moves every job-terminal operation behind the
    non-terminal ones (relative order kept); afterwards pairwise exchanges in
    which the earlier operation is job-terminal, best first with ties to the
    smallest (pos_a, pos_b). Only strictly negative cost changes are applied.
    """
    t = tracker.copy()
    inst = t.instance
    swap_log: list[SwapRecord] = []
    if outbox is None:
        outbox = []
    for m in sorted(t.queues):
        used = 0
        q = t.queues[m]
        movable = [i for i, key in enumerate(q) if not t.entries[key].frozen]
        if not movable:
            if evaluations is not None:
                evaluations[m] = 0
            continue
        offset = movable[0]
        # frozen entries always precede movable ones in a start-sorted queue
        mov = q[offset:]
        sunk = ([key for key in mov if not inst.is_terminal(*key)]
                + [key for key in mov if inst.is_terminal(*key)])
        if sunk != mov and used < config.swap_budget:
            used += 1
            new_q = q[:offset] + sunk
            delta, res = _evaluate(t, m, new_q, config)
            if delta is not None and delta < 0:
                changed = [i for i in range(len(q)) if q[i] != new_q[i]]
                _apply(t, m, new_q, res, outbox)
                swap_log.append(SwapRecord(m, changed[0], changed[-1], "sink", delta))
        while used < config.swap_budget:
            q = t.queues[m]
            best = None
            for a in range(offset, len(q)):
                if not inst.is_terminal(*q[a]):
                    continue
                for b in range(a + 1, len(q)):
                    if used >= config.swap_budget:
                        break
                    used += 1
                    new_q = list(q)
                    new_q[a], new_q[b] = new_q[b], new_q[a]
                    delta, res = _evaluate(t, m, new_q, config)
                    if delta is not None and delta < 0 and (best is None or delta < best[0]):
                        best = (delta, a, b, new_q, res)
            if best is None:
                break
            delta, a, b, new_q, res = best
            _apply(t, m, new_q, res, outbox)
            swap_log.append(SwapRecord(m, a, b, "swap", delta))
        if evaluations is not None:
            evaluations[m] = used
    return t, len(t.staged), swap_log


# -- driver --------------------------------------------------------------------

def repair(instance: Instance, schedule: Schedule, breakdown: Breakdown,
           config: RepairConfig = RepairConfig(),
           windows: dict[int, list[tuple[int, int]]] | None = None) -> RepairOutcome:
    """Repair ``schedule`` after ``breakdown``.

    ``windows`` lists earlier downtime per machine that the schedule already
    respects; the outcome respects those and the new window.
    """
    prior = [(m, lo, hi - lo) for m, ws in (windows or {}).items() for lo, hi in ws]
    report = validate_schedule(instance, schedule, prior)
    if not report.ok:
        raise ValueError(f"input schedule is invalid:\n{report.to_text()}")
    if not 0 <= breakdown.machine < instance.num_machines:
        raise ValueError(f"machine {breakdown.machine} out of range [0, {instance.num_machines})")
    journal: list[tuple[str, DelayNotify]] = []
    trace = []
    t0 = tracker_from_schedule(instance, schedule, windows)
    t1 = phase1_status_update(t0, breakdown, config)
    trace.append(("status_update", t1.makespan()))
    t2, outbox = phase2_propagate(t1)
    journal += [("sent", msg) for msg in outbox]
    trace.append(("propagate", t2.makespan()))
    t3, n1 = phase4_cascade(t2, outbox, journal)
    trace.append(("cascade", t3.makespan()))
    disrupted = any(e.op.start != t3.baseline[key] for key, e in t3.entries.items())
    box: list[DelayNotify] = []
    evaluations: dict[int, int] = {}
    if disrupted:
        t4, _, swaps = phase3_queue_reorder(t3, config, box, evaluations)
    else:
        t4, swaps = t3, []
    journal += [("sent", msg) for msg in box]
    trace.append(("reorder", t4.makespan()))
    t5, n2 = phase4_cascade(t4, box, journal)
    trace.append(("cascade", t5.makespan()))

    result = t5.schedule()
    every = prior + [breakdown.as_tuple()]
    report = validate_schedule(instance, result, every)
    if not report.ok:
        raise RepairError(f"repaired schedule is invalid:\n{report.to_text()}")
    return RepairOutcome(result, len(t5.staged), n1 + n2, trace, swaps,
                         dict(t5.staged), evaluations, journal)
