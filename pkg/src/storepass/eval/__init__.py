"""Interpreters: big-step for the reference and target languages, a
small-step machine for the control-effect calculi, and run-time state
typing."""
from .bigstep import DEFAULT_FUEL, eval_source, eval_target
from .dispatch import LANGS, evaluate, lang_of
from .machine import (
    DEEP, SHALLOW, SmallStep, TraceEvent, eval_alg, eval_exn,
    eval_ref_smallstep, eval_sym,
)
from .runtime import (
    MonitorReport, RuntimeCheck, check_runtime_state,
    check_runtime_state_exhaustive, initial_state, monitor_eval,
)
from .values import (
    BOOL_DOMAIN, INT_DOMAIN, UNIT, Closure, ContValue, Failed, Fuel, LocV,
    Oracle, OutOfFuel, RandomOracle, Stuck, SymV, TupleV, Uncaught, Val,
    domain_for, render, same_outcome, sharable_value,
)

__all__ = [
    "DEFAULT_FUEL", "eval_source", "eval_target", "LANGS", "evaluate", "lang_of", "DEEP", "SHALLOW", "SmallStep",
    "TraceEvent", "eval_alg", "eval_exn", "eval_ref_smallstep", "eval_sym",
    "MonitorReport", "RuntimeCheck", "check_runtime_state",
    "check_runtime_state_exhaustive", "initial_state", "monitor_eval",
    "BOOL_DOMAIN", "INT_DOMAIN", "UNIT", "Closure", "ContValue", "Failed", "Fuel",
    "LocV", "Oracle", "OutOfFuel", "RandomOracle", "Stuck", "SymV", "TupleV",
    "Uncaught", "Val", "domain_for", "render", "same_outcome", "sharable_value",
]
