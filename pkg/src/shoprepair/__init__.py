"""Job-shop scheduling with dispatching rules, local search and local breakdown repair."""

from .dispatch import Rule, RuleKind, schedule_with_rule
from .improve import improve
from .instances import load_instance
from .lrcp import Breakdown, RepairOutcome, repair
from .model import Instance, RepairConfig, RestartPolicy, Schedule, ScheduledOp
from .validate import validate_schedule

__all__ = ["Breakdown", "Instance", "RepairConfig", "RepairOutcome", "RestartPolicy", "Rule",
           "RuleKind", "Schedule", "ScheduledOp", "improve", "load_instance", "repair",
           "schedule_with_rule", "validate_schedule"]
