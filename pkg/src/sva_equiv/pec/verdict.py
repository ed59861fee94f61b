"""Value types for the property-equivalence checker."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from ..errors import ConfigError

BACKENDS = ("enumerate", "smt")

# Abstention reasons, highest priority first. ``unsupported_fn`` and
# ``capacity`` extend the base set (see the decisions ledger).
REASONS = ("liveness", "multi_clock", "unbounded_range", "goto_repeat", "unsupported_fn", "timeout", "capacity")


class Outcome(str, enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    TIMEOUT = "TIMEOUT"


class VerdictKind(str, enum.Enum):
    EQUIVALENT = "EQUIVALENT"
    IMPLIES_REF_TO_LM = "IMPLIES_REF_TO_LM"
    IMPLIES_LM_TO_REF = "IMPLIES_LM_TO_REF"
    NOT_EQUIVALENT = "NOT_EQUIVALENT"
    UNSUPPORTED = "UNSUPPORTED"

    @property
    def decided(self) -> bool:
        return self is not VerdictKind.UNSUPPORTED

    @property
    def one_sided(self) -> bool:
        return self in (VerdictKind.IMPLIES_REF_TO_LM, VerdictKind.IMPLIES_LM_TO_REF)


@dataclass(frozen=True)
class CheckConfig:
    depth_K: int = 20
    timeout: float = 60.0
    backend: str = "enumerate"
    max_enum_bits: int = 20

    def __post_init__(self):
        if not isinstance(self.depth_K, int) or self.depth_K < 1:
            raise ConfigError(f"depth_K must be a positive integer, got {self.depth_K!r}")
        if not self.timeout > 0:
            raise ConfigError(f"timeout must be positive, got {self.timeout!r}")
        if self.backend not in BACKENDS:
            raise ConfigError(f"unknown backend {self.backend!r}")
        if self.max_enum_bits < 1:
            raise ConfigError("max_enum_bits must be positive")


@dataclass(frozen=True)
class TraceAssignment:
    """One value per (signal, cycle); signals keyed by their flattened name."""

    values: dict = field(default_factory=dict)  # name -> tuple[bool, ...]

    @property
    def depth(self) -> int:
        return len(next(iter(self.values.values()))) if self.values else 0

    @property
    def signals(self) -> list:
        return sorted(self.values)

    def __getitem__(self, name: str) -> tuple:
        return self.values[name]

    def to_dict(self) -> dict:
        return {k: [int(b) for b in v] for k, v in sorted(self.values.items())}

    def table(self) -> str:
        if not self.values:
            return "(no signals)"
        width = max(len(k) for k in self.values)
        rows = [f"{'cycle':<{width}}  " + " ".join(str(c % 10) for c in range(self.depth))]
        for k in self.signals:
            rows.append(f"{k:<{width}}  " + " ".join("1" if b else "0" for b in self.values[k]))
        return "\n".join(rows)


@dataclass(frozen=True)
class BmcOutcome:
    value: Outcome
    counterexample: TraceAssignment | None = None
    elapsed: float = 0.0

    def to_dict(self) -> dict:
        d = {"value": self.value.value, "elapsed": round(self.elapsed, 6)}
        if self.counterexample is not None:
            d["counterexample"] = self.counterexample.to_dict()
        return d


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    reason: str | None = None
    forward: BmcOutcome | None = None  # assume(candidate), assert(reference)
    backward: BmcOutcome | None = None  # assume(reference), assert(candidate)
    detail: str = ""

    def __post_init__(self):
        if (self.kind is VerdictKind.UNSUPPORTED) != (self.reason is not None):
            raise ValueError("UNSUPPORTED carries exactly one reason; decided verdicts carry none")

    def __str__(self) -> str:
        return f"UNSUPPORTED({self.reason})" if self.reason else self.kind.value

    def to_dict(self) -> dict:
        d = {"verdict": self.kind.value, "reason": self.reason}
        if self.forward is not None:
            d["forward"] = self.forward.to_dict()
        if self.backward is not None:
            d["backward"] = self.backward.to_dict()
        if self.detail:
            d["detail"] = self.detail
        return d


_MATRIX = {
    (Outcome.PASS, Outcome.PASS): VerdictKind.EQUIVALENT,
    (Outcome.PASS, Outcome.FAIL): VerdictKind.IMPLIES_REF_TO_LM,
    (Outcome.FAIL, Outcome.PASS): VerdictKind.IMPLIES_LM_TO_REF,
    (Outcome.FAIL, Outcome.FAIL): VerdictKind.NOT_EQUIVALENT,
}


def verdict_from_outcomes(forward: BmcOutcome, backward: BmcOutcome) -> Verdict:
    """Map the two one-sided checks onto the verdict matrix."""
    if Outcome.TIMEOUT in (forward.value, backward.value):
        return Verdict(VerdictKind.UNSUPPORTED, "timeout", forward, backward)
    return Verdict(_MATRIX[forward.value, backward.value], None, forward, backward)
