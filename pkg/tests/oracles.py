"""Independent reference implementations used only by the tests.

Nothing here imports the package under test, so agreement with it is
evidence rather than tautology. Instances are plain lists of (machine,
duration) pairs per job.
"""

from __future__ import annotations

import itertools


def gt_optimum(jobs: list[list[tuple[int, int]]]) -> int:
    """Exact optimum by enumerating every active schedule (Giffler-Thompson branching).

    Every instance has an optimal active schedule, so exhausting the GT tree
    with only a ``>= best`` cut is exact. Durations must be positive.
    """
    n = len(jobs)
    n_mach = 1 + max((m for ops in jobs for m, _ in ops), default=-1)
    best = [sum(d for ops in jobs for _, d in ops) + 1]

    def dfs(nxt, job_ready, mach_free, ms):
        if ms >= best[0]:
            return
        cand = [(max(job_ready[j], mach_free[jobs[j][nxt[j]][0]]), j)
                for j in range(n) if nxt[j] < len(jobs[j])]
        if not cand:
            best[0] = ms
            return
        ect = min(s + jobs[j][nxt[j]][1] for s, j in cand)
        m_star = min(jobs[j][nxt[j]][0] for s, j in cand if s + jobs[j][nxt[j]][1] == ect)
        for s, j in cand:
            m, d = jobs[j][nxt[j]]
            if m == m_star and s < ect:
                n2 = list(nxt)
                n2[j] += 1
                jr = list(job_ready)
                jr[j] = s + d
                mf = list(mach_free)
                mf[m] = s + d
                dfs(n2, jr, mf, max(ms, s + d))

    dfs([0] * n, [0] * n, [0] * n_mach, 0)
    return best[0]


def permutation_optimum(jobs: list[list[tuple[int, int]]]) -> int:
    """Exact optimum by trying every machine-order combination (tiny instances only)."""
    n_mach = 1 + max((m for ops in jobs for m, _ in ops), default=-1)
    per_machine = [[(j, k) for j, ops in enumerate(jobs) for k, (m, _) in enumerate(ops) if m == mm]
                   for mm in range(n_mach)]
    best = None
    for combo in itertools.product(*(itertools.permutations(seq) for seq in per_machine)):
        ms = _time_orders(jobs, combo)
        if ms is not None and (best is None or ms < best):
            best = ms
    return 0 if best is None else best


def _time_orders(jobs, orders):
    end = {}
    ptr = [0] * len(orders)
    mach_end = [0] * len(orders)
    remaining = sum(len(o) for o in orders)
    while remaining:
        moved = False
        for m, seq in enumerate(orders):
            if ptr[m] == len(seq):
                continue
            j, k = seq[ptr[m]]
            if k > 0 and (j, k - 1) not in end:
                continue
            start = max(mach_end[m], end.get((j, k - 1), 0))
            end[(j, k)] = mach_end[m] = start + jobs[j][k][1]
            ptr[m] += 1
            remaining -= 1
            moved = True
        if not moved:
            return None
    return max(end.values(), default=0)


def dispatch_by_clock(jobs: list[list[tuple[int, int]]], key) -> dict[tuple[int, int], tuple[int, int]]:
    """Non-delay dispatch simulated one time unit at a time.

    At every clock tick, as long as some operation can start right now (job
    predecessor finished, machine free), the best one by ``key(job, step)``
    with ties to the lower (job, step) starts. Returns {(job, step): (start, end)}.
    """
    n = len(jobs)
    n_mach = 1 + max((m for ops in jobs for m, _ in ops), default=-1)
    nxt = [0] * n
    job_free = [0] * n
    mach_free = [0] * n_mach
    out = {}
    total = sum(len(ops) for ops in jobs)
    clock = 0
    while len(out) < total:
        while True:
            ready = [(key(j, nxt[j]), j, nxt[j]) for j in range(n)
                     if nxt[j] < len(jobs[j]) and job_free[j] <= clock
                     and mach_free[jobs[j][nxt[j]][0]] <= clock]
            if not ready:
                break
            _, j, k = min(ready)
            m, d = jobs[j][k]
            out[(j, k)] = (clock, clock + d)
            job_free[j] = mach_free[m] = clock + d
            nxt[j] += 1
        clock += 1
    return out


def spt_key(jobs):
    return lambda j, k: jobs[j][k][1]


def lpt_key(jobs):
    return lambda j, k: -jobs[j][k][1]


def feasible(jobs, ops, windows=()) -> bool:
    """Plain pairwise feasibility check: ops is {(job, step): (machine, start, end)}."""
    want = {(j, k) for j, o in enumerate(jobs) for k in range(len(o))}
    if set(ops) != want:
        return False
    for (j, k), (m, s, e) in ops.items():
        if s < 0 or m != jobs[j][k][0] or e - s != jobs[j][k][1]:
            return False
        if k > 0 and ops[(j, k - 1)][2] > s:
            return False
        for wm, lo, length in windows:
            if wm == m and s < lo + length and lo < e and e > s:
                return False
    items = list(ops.values())
    for a, b in itertools.combinations(items, 2):
        if a[0] == b[0] and a[2] > a[1] and b[2] > b[1] and a[1] < b[2] and b[1] < a[2]:
            return False
    return True
