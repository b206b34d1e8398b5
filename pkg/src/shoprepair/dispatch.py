"""Greedy non-delay schedule generation driven by dispatching rules."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .model import Instance, Schedule, ScheduledOp
from .rng import SplitMix64


class RuleKind(enum.Enum):
    RANDOM = "random"
    SPT = "spt"
    LPT = "lpt"
    STPT = "stpt"
    MPSR = "mpsr"
    LSO = "lso"
    SPT_X_TWK = "sptxtwk"
    SPT_DIV_TWKR = "spttwkr"


@dataclass(frozen=True)
class Rule:
    kind: RuleKind
    seed: int = 0

    @classmethod
    def parse(cls, name: str, seed: int = 0) -> Rule:
        return cls(RuleKind(name.lower()), seed)

    @property
    def name(self) -> str:
        if self.kind is RuleKind.RANDOM:
            return f"random(seed={self.seed})"
        return self.kind.value


ALL_RULES = [RuleKind.RANDOM, RuleKind.SPT, RuleKind.LPT, RuleKind.STPT,
             RuleKind.MPSR, RuleKind.LSO, RuleKind.SPT_X_TWK, RuleKind.SPT_DIV_TWKR]


def priority(instance: Instance, kind: RuleKind, job: int, step: int):
    """Sort key for a ready operation; smaller is dispatched first.

    Maximizing rules are negated so every rule is a minimization.
    """
    ops = instance.jobs[job]
    d = ops[step][1]
    remaining_work = sum(dd for _, dd in ops[step:])
    if kind is RuleKind.SPT:
        return d
    if kind is RuleKind.LPT:
        return -d
    if kind is RuleKind.STPT:
        return sum(dd for _, dd in ops)
    if kind is RuleKind.MPSR:
        return -(len(ops) - step)
    if kind is RuleKind.LSO:
        return -(remaining_work - d)
    if kind is RuleKind.SPT_X_TWK:
        return d * sum(dd for _, dd in ops)
    if kind is RuleKind.SPT_DIV_TWKR:
        return Fraction(d, remaining_work) if remaining_work else Fraction(0)
    raise ValueError(f"rule {kind} has no static key")


def schedule_with_rule(instance: Instance, rule: Rule) -> Schedule:
    """Non-delay serial generation.

    At each decision the earliest start t* over every job's next operation is
    found; among operations able to start at t* the rule picks one, ties going
    to the smallest (job, step).
    """
    rng = SplitMix64(rule.seed) if rule.kind is RuleKind.RANDOM else None
    nxt = [0] * instance.num_jobs
    job_ready = [0] * instance.num_jobs
    mach_free = [0] * instance.num_machines
    placed = []
    remaining = instance.total_ops
    while remaining:
        est = {}
        for j in range(instance.num_jobs):
            k = nxt[j]
            if k < len(instance.jobs[j]):
                m = instance.jobs[j][k][0]
                est[j] = max(job_ready[j], mach_free[m])
        t_star = min(est.values())
        ready = sorted((j, nxt[j]) for j, t in est.items() if t == t_star)
        if rng is not None:
            j, k = ready[rng.below(len(ready))]
        else:
            j, k = min(ready, key=lambda jk: (priority(instance, rule.kind, *jk), jk))
        m, d = instance.jobs[j][k]
        placed.append(ScheduledOp(j, k, m, t_star, t_star + d))
        job_ready[j] = mach_free[m] = t_star + d
        nxt[j] += 1
        remaining -= 1
    return Schedule(placed)
