"""Benchmark harness: gap-to-upper-bound tables and message-count scaling probes."""

from __future__ import annotations

import csv
import io
import json
import logging
import time
from dataclasses import asdict, dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal
from fractions import Fraction
from importlib import resources
from typing import Iterable, Sequence

from .dispatch import Rule, RuleKind, schedule_with_rule
from .improve import improve
from .instances import random_instance
from .lrcp import RepairConfig
from .model import Instance, Schedule
from .rng import SplitMix64
from .simulate import DisruptionScenario, generate_scenario, run_scenario
from .validate import validate_schedule

log = logging.getLogger(__name__)

_CENT = Decimal("0.01")


def _round2(x: Fraction) -> Decimal:
    return (Decimal(x.numerator) / Decimal(x.denominator)).quantize(_CENT, rounding=ROUND_HALF_EVEN)


def gap(makespan: int, ub: int) -> Decimal:
    """100 * (makespan - ub) / ub, rounded half-even to two decimals."""
    if ub <= 0:
        raise ValueError(f"upper bound must be positive, got {ub}")
    return _round2(Fraction(100 * (makespan - ub), ub))


@dataclass(frozen=True)
class Method:
    """``rule[+improve][+lrcp]``: a dispatching start, optional local search,
    optional replay of the instance's disruption scenario through repair."""

    rule: RuleKind
    improve: bool = False
    lrcp: bool = False

    @classmethod
    def parse(cls, text: str) -> Method:
        parts = [p.strip().lower() for p in text.split("+")]
        extras = set(parts[1:])
        unknown = extras - {"improve", "lrcp"}
        if unknown:
            raise ValueError(f"unknown method component(s): {sorted(unknown)}")
        return cls(RuleKind(parts[0]), "improve" in extras, "lrcp" in extras)

    @property
    def name(self) -> str:
        return "+".join([self.rule.value] + ["improve"] * self.improve + ["lrcp"] * self.lrcp)


@dataclass
class BenchRow:
    instance: str
    method: str
    makespan: int
    gap: Decimal | None
    wip: int = 0
    messages: int = 0
    ms: float = 0.0

    def as_record(self) -> dict:
        rec = asdict(self)
        rec["gap"] = None if self.gap is None else f"{self.gap:.2f}"
        rec["ms"] = round(self.ms, 3)
        return rec


@dataclass
class SuiteResult:
    rows: list[BenchRow]
    mean_gap: dict[str, Decimal | None] = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["instance", "method", "makespan", "gap", "wip", "messages", "ms"])
        for r in self.rows:
            rec = r.as_record()
            w.writerow([rec["instance"], rec["method"], rec["makespan"],
                        "" if rec["gap"] is None else rec["gap"], rec["wip"], rec["messages"],
                        f"{rec['ms']:.3f}"])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({"rows": [r.as_record() for r in self.rows],
                           "mean_gap": {k: None if v is None else f"{v:.2f}"
                                        for k, v in self.mean_gap.items()}},
                          indent=2, sort_keys=True)


def published_results() -> dict:
    """Reference numbers shipped for comparison only; see the ``reproduced`` flag."""
    path = resources.files("shoprepair") / "data" / "published_results.json"
    return json.loads(path.read_text())


def mean_gap(rows: Iterable[BenchRow]) -> dict[str, Decimal | None]:
    """Arithmetic mean of the reported (rounded) row gaps per method."""
    acc: dict[str, list[Decimal]] = {}
    for r in rows:
        acc.setdefault(r.method, [])
        if r.gap is not None:
            acc[r.method].append(r.gap)
    out = {}
    for method, gaps in acc.items():
        out[method] = _round2(sum(Fraction(g) for g in gaps) / len(gaps)) if gaps else None
    return out


def run_method(instance: Instance, method: Method, scenario: DisruptionScenario | None = None,
               seed: int = 0, budget: int = 200,
               config: RepairConfig = RepairConfig()) -> tuple[Schedule, int, int, list]:
    """Returns (schedule, wip_moves, messages, breakdown triples for validation)."""
    sched = schedule_with_rule(instance, Rule(method.rule, seed))
    if method.improve:
        sched, _ = improve(instance, sched, budget=budget, seed=seed)
    wip = messages = 0
    windows: list = []
    if method.lrcp:
        report = run_scenario(instance, sched, scenario or DisruptionScenario(seed), config)
        sched, wip, messages = report.schedule, report.wip_moves, report.messages
        windows = report.breakdowns()
    return sched, wip, messages, windows


def run_suite(instances: Sequence[Instance], methods: Sequence[str | Method],
              scenarios: dict[str, DisruptionScenario] | None = None,
              bounds: dict[str, int] | None = None, seed: int = 0, budget: int = 200,
              config: RepairConfig = RepairConfig()) -> SuiteResult:
    """One row per (instance, method) in input order. Every schedule is validated."""
    scenarios = scenarios or {}
    bounds = {k.lower(): v for k, v in (bounds or {}).items()}
    parsed = [m if isinstance(m, Method) else Method.parse(m) for m in methods]
    rows = []
    for inst in instances:
        ub = bounds.get(inst.name.lower())
        if ub is None:
            log.warning("no upper bound for %s; gap left empty", inst.name)
        for method in parsed:
            t0 = time.perf_counter()
            sched, wip, messages, windows = run_method(inst, method, scenarios.get(inst.name),
                                                       seed, budget, config)
            ms = 1000 * (time.perf_counter() - t0)
            report = validate_schedule(inst, sched, windows)
            if not report.ok:
                raise RuntimeError(f"{inst.name}/{method.name}: infeasible schedule\n{report.to_text()}")
            rows.append(BenchRow(inst.name, method.name, sched.makespan,
                                 None if ub is None else gap(sched.makespan, ub), wip, messages, ms))
    return SuiteResult(rows, mean_gap(rows))


@dataclass(frozen=True)
class ProbeRecord:
    num_jobs: int
    num_machines: int
    o_max: int
    trial: int
    messages: int
    ms: float

    @property
    def scale(self) -> int:
        return self.num_jobs * self.num_machines * self.o_max


@dataclass
class ProbeResult:
    records: list[ProbeRecord]
    c: float            # smallest constant with messages <= c * J * M * O_max in every trial
    c_lsq: float        # least-squares slope through the origin, for reference

    def within(self, c: float) -> bool:
        return all(r.messages <= c * r.scale for r in self.records)

    def to_dict(self) -> dict:
        return {"c": self.c, "c_lsq": self.c_lsq,
                "records": [asdict(r) | {"scale": r.scale} for r in self.records]}


def complexity_probe(sizes: Sequence[tuple[int, int]], trials: int = 10, seed: int = 0,
                     failures: int = 1, config: RepairConfig = RepairConfig()) -> ProbeResult:
    """Random instances per size, random breakdowns, message counts per trial."""
    if not sizes:
        raise ValueError("sizes must be non-empty")
    rng = SplitMix64(seed)
    records = []
    for j, m in sizes:
        for trial in range(trials):
            inst = random_instance(rng, j, m)
            base = schedule_with_rule(inst, Rule(RuleKind.SPT))
            scen = generate_scenario(inst, rng.next_u64(), failures, 1, max(1, base.makespan // 5))
            t0 = time.perf_counter()
            report = run_scenario(inst, base, scen, config)
            ms = 1000 * (time.perf_counter() - t0)
            records.append(ProbeRecord(j, m, inst.o_max, trial, report.messages, ms))
    ratios = [r.messages / r.scale for r in records if r.scale]
    c = max(ratios, default=0.0)
    num = sum(r.messages * r.scale for r in records)
    den = sum(r.scale * r.scale for r in records)
    return ProbeResult(records, c, num / den if den else 0.0)
