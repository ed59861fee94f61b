"""Two-sided bounded equivalence check and the verdict matrix."""

from __future__ import annotations

import time

from ..errors import CheckSyntaxError, SvaError, UnsupportedConstruct
from ..syntax import parse
from .enumerate import bmc_enumerate
from .lower import lower, signals
from .smt import bmc_smt
from .verdict import (
    REASONS,
    BmcOutcome,
    CheckConfig,
    Outcome,
    Verdict,
    VerdictKind,
    verdict_from_outcomes,
)


def _as_ast(src):
    return parse(src) if isinstance(src, str) else src


def bmc_check(assumed, asserted, cfg: CheckConfig | None = None, deadline: float | None = None) -> BmcOutcome:
    """One bounded instance: FAIL iff a trace satisfies ``assumed`` and violates ``asserted``.

    Inputs may be source text, parsed or lowered trees. Raises
    UnsupportedConstruct when either side leaves the bounded core or the
    enumerate backend is over capacity.
    """
    cfg = cfg or CheckConfig()
    if deadline is None:
        deadline = time.monotonic() + cfg.timeout
    a, b = lower(_as_ast(assumed)), lower(_as_ast(asserted))
    names = signals(a, b)
    if cfg.backend == "smt":
        return bmc_smt(a, b, names, cfg.depth_K, deadline - time.monotonic())
    return bmc_enumerate(a, b, names, cfg.depth_K, cfg.max_enum_bits, deadline)


def _parse_side(src: str, side: str, normalize: bool):
    text = src
    if normalize:
        from ..normalize import normalize as run_normalize

        try:
            text, _ = run_normalize(src, profile="pec")
        except SvaError:
            text = src
    try:
        return parse(text)
    except SvaError as exc:
        raise CheckSyntaxError(side, exc) from exc


def check_equivalence(candidate, reference, cfg: CheckConfig | None = None, normalize: bool = True) -> Verdict:
    """Five-way verdict for ``candidate`` against ``reference``.

    Check one assumes the candidate and asserts the reference; check two is the
    mirror image. Parse failures raise CheckSyntaxError naming the side.
    """
    cfg = cfg or CheckConfig()
    cand = candidate if not isinstance(candidate, str) else _parse_side(candidate, "candidate", normalize)
    ref = reference if not isinstance(reference, str) else _parse_side(reference, "reference", normalize)

    lowered, issues = [], []
    for ast in (cand, ref):
        try:
            lowered.append(lower(ast))
        except UnsupportedConstruct as exc:
            issues.append(exc)
    if issues:
        worst = min(issues, key=lambda e: REASONS.index(e.reason))
        return Verdict(VerdictKind.UNSUPPORTED, worst.reason, detail=worst.detail)

    low_cand, low_ref = lowered
    names = signals(low_cand, low_ref)
    deadline = time.monotonic() + cfg.timeout
    try:
        if cfg.backend == "smt":
            forward = bmc_smt(low_cand, low_ref, names, cfg.depth_K, deadline - time.monotonic())
            if forward.value is Outcome.TIMEOUT:
                return verdict_from_outcomes(forward, BmcOutcome(Outcome.TIMEOUT))
            backward = bmc_smt(low_ref, low_cand, names, cfg.depth_K, deadline - time.monotonic())
        else:
            forward = bmc_enumerate(low_cand, low_ref, names, cfg.depth_K, cfg.max_enum_bits, deadline)
            if forward.value is Outcome.TIMEOUT:
                return verdict_from_outcomes(forward, BmcOutcome(Outcome.TIMEOUT))
            backward = bmc_enumerate(low_ref, low_cand, names, cfg.depth_K, cfg.max_enum_bits, deadline)
    except UnsupportedConstruct as exc:
        return Verdict(VerdictKind.UNSUPPORTED, exc.reason, detail=exc.detail)
    return verdict_from_outcomes(forward, backward)


def emit_smt_pair(candidate, reference, cfg: CheckConfig | None = None) -> str:
    """Script for check one: assume ``candidate``, assert ``reference``."""
    from .smt import emit_smt

    cfg = cfg or CheckConfig()
    a, b = lower(_as_ast(candidate)), lower(_as_ast(reference))
    return emit_smt(a, b, signals(a, b), cfg.depth_K)
