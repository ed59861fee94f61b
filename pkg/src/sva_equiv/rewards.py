"""Verdict-to-reward mappings and token weighting for training-time scoring."""

from __future__ import annotations

from dataclasses import dataclass

from .pec.verdict import Verdict, VerdictKind

# Reward for each decided verdict; everything else scores 0 unless a floor applies.
EQUIVALENCE_REWARD = {
    VerdictKind.EQUIVALENT: 1.0,
    VerdictKind.IMPLIES_REF_TO_LM: 0.6,
    VerdictKind.IMPLIES_LM_TO_REF: 0.4,
}
UNSUPPORTED_FLOOR = 0.15
DEFAULT_ALPHA = 3.0

TEMPORAL_OPS = (
    "##", "[*", "[=", "|->", "|=>", "until", "eventually", "s_eventually", "s_until",
    "s_always", "throughout", "within", "intersect", "$rose", "$fell",
)


def _kind(verdict) -> VerdictKind:
    if isinstance(verdict, Verdict):
        return verdict.kind
    if isinstance(verdict, VerdictKind):
        return verdict
    text = str(verdict)
    if text.startswith("UNSUPPORTED"):
        return VerdictKind.UNSUPPORTED
    return VerdictKind(text)


def rwopd_weight(verdict, syntax_ok: bool = True) -> float:
    """Distillation weight: 1.0 / 0.6 / 0.4 for the decided positives, else 0."""
    if not syntax_ok:
        return 0.0
    return EQUIVALENCE_REWARD.get(_kind(verdict), 0.0)


def rlvf_reward(verdict, syntax_ok: bool = True) -> float:
    """RL reward: the distillation weight plus a 0.15 floor for well-formed abstentions."""
    if not syntax_ok:
        return 0.0
    kind = _kind(verdict)
    if kind is VerdictKind.UNSUPPORTED:
        return UNSUPPORTED_FLOOR
    return EQUIVALENCE_REWARD.get(kind, 0.0)


@dataclass(frozen=True)
class RolloutScore:
    verdict: object
    syntax_ok: bool
    opd_loss: float | None = None

    @property
    def weight(self) -> float:
        return rwopd_weight(self.verdict, self.syntax_ok)


def rwopd_aggregate(scores) -> float | None:
    """Weight-normalized mean loss; None when no rollout carries weight."""
    num = den = 0.0
    for s in scores:
        if s.opd_loss is None:
            raise ValueError("every rollout needs an opd_loss")
        if s.opd_loss < 0:
            raise ValueError("opd_loss must be non-negative")
        w = s.weight
        if w > 0:
            num += w * s.opd_loss
            den += w
    if den == 0:
        return None
    return num / den


@dataclass(frozen=True)
class TokenWeight:
    token_text: str
    weight: float


def is_temporal_token(token: str) -> bool:
    return any(op in token for op in TEMPORAL_OPS)


def temporal_token_weights(tokens, alpha: float = DEFAULT_ALPHA) -> list:
    """Weight ``alpha`` for tokens containing a temporal operator, 1 otherwise."""
    if alpha < 1:
        raise ValueError("alpha must be at least 1")
    return [TokenWeight(t, alpha if is_temporal_token(t) else 1.0) for t in tokens]


def weighted_ce(per_token_ce, weights) -> float:
    """Mean of ``w_t * ce_t`` over the sequence."""
    ce = list(per_token_ce)
    ws = [w.weight if isinstance(w, TokenWeight) else float(w) for w in weights]
    if len(ce) != len(ws):
        raise ValueError(f"length mismatch: {len(ce)} losses vs {len(ws)} weights")
    if not ce:
        return 0.0
    return sum(c * w for c, w in zip(ce, ws)) / len(ce)
