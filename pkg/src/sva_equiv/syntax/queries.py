"""Read-only queries over a PropertyAst."""

from __future__ import annotations

from .nodes import (
    Call,
    Clocked,
    Delay,
    DisableIff,
    Identifier,
    Implication,
    Liveness,
    PropNot,
    ReductionFn,
    Repeat,
    SampledFn,
    Segment,
    SeqBinop,
    SignalRef,
    walk,
)

LIVENESS_OPS = frozenset(
    {"s_eventually", "s_until", "s_always", "until_with", "s_until_with", "until", "eventually"}
)
BOUNDED_TEMPORAL_OPS = frozenset(
    {"##", "[*", "[=", "[->", "|->", "|=>", "throughout", "within", "intersect"}
)
SAMPLED_OPS = frozenset({"$rose", "$fell", "$stable", "$changed", "$past"})

_REPEAT_OP = {"consecutive": "[*", "nonconsecutive": "[=", "goto": "[->"}


def node_operators(node) -> tuple:
    """Operator kinds contributed by ``node`` itself (not its children)."""
    if isinstance(node, Delay):
        return ("##",)
    if isinstance(node, Repeat):
        return (_REPEAT_OP[node.kind],)
    if isinstance(node, Implication):
        return ("|->" if node.kind == "overlap" else "|=>",)
    if isinstance(node, SeqBinop):
        return (node.kind,)
    if isinstance(node, Liveness):
        return (node.kind,)
    if isinstance(node, PropNot):
        return ("not",)
    if isinstance(node, DisableIff):
        return ("disable iff",)
    if isinstance(node, Clocked):
        return ("@",)
    if isinstance(node, (SampledFn, ReductionFn)):
        return ("$" + node.kind,)
    return ()


def operators(ast) -> set:
    found = set()
    for n in walk(ast):
        found.update(node_operators(n))
    return found


def contains_operator(ast, op_set) -> bool:
    """True iff some node of ``ast`` is one of the operator kinds in ``op_set``."""
    wanted = set(op_set)
    return any(op in wanted for n in walk(ast) for op in node_operators(n))


def _identifier(ref: SignalRef) -> Identifier:
    *head, last = ref.path
    return Identifier(tuple(head) + (Segment(last.name),), last.indices)


def identifier_occurrences(ast):
    """Yield ``(Identifier, SignalRef, role)`` for every reference in the tree.

    ``role`` is ``"clock"`` for clocking-event signals, ``"call"`` for function
    names in call position and ``"signal"`` otherwise.
    """
    clocks = set()
    callees = set()
    for n in walk(ast):
        if isinstance(n, Clocked):
            clocks.add(id(n.clock))
        elif isinstance(n, Call):
            callees.add(id(n.func))
    for n in walk(ast):
        if isinstance(n, SignalRef):
            role = "clock" if id(n) in clocks else "call" if id(n) in callees else "signal"
            yield _identifier(n), n, role


def free_identifiers(ast) -> set:
    """Every referenced name, deduplicated by flattened spelling."""
    seen: dict[str, Identifier] = {}
    for ident, _, _ in identifier_occurrences(ast):
        seen.setdefault(ident.flat, ident)
    return set(seen.values())


def clock_signals(ast) -> list:
    out = []
    for n in walk(ast):
        if isinstance(n, Clocked) and n.clock not in out:
            out.append(n.clock)
    return out
