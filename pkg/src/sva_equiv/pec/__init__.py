"""Bounded property-equivalence checking."""

from .check import bmc_check, check_equivalence, emit_smt_pair
from .lower import admits_empty, lower, signal_key, signals, span
from .semantics import Kernel, eval_property
from .smt import emit_smt
from .verdict import (
    REASONS,
    BmcOutcome,
    CheckConfig,
    Outcome,
    TraceAssignment,
    Verdict,
    VerdictKind,
    verdict_from_outcomes,
)

__all__ = [
    "REASONS",
    "BmcOutcome",
    "CheckConfig",
    "Kernel",
    "Outcome",
    "TraceAssignment",
    "Verdict",
    "VerdictKind",
    "admits_empty",
    "bmc_check",
    "check_equivalence",
    "emit_smt",
    "emit_smt_pair",
    "eval_property",
    "lower",
    "signal_key",
    "signals",
    "span",
    "verdict_from_outcomes",
]
