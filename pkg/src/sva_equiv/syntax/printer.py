"""Canonical text for a PropertyAst; ``parse(render(x)) == x``."""

from __future__ import annotations

import re

from .nodes import (
    UNBOUNDED,
    BoolExpr,
    Call,
    Clocked,
    Delay,
    DisableIff,
    Implication,
    Labeled,
    Literal,
    Liveness,
    PropNot,
    ReductionFn,
    Repeat,
    SampledFn,
    SeqBinop,
    SignalRef,
    SystemCall,
    Unbounded,
)
from .parser import BINARY_PREC, RIGHT_ASSOC, TERNARY_PREC, UNARY_PREC

# Property/sequence levels; a larger number binds tighter.
PREFIX, IMPL, UNTIL, OR, AND, NOT, INTERSECT, WITHIN, THROUGHOUT, DELAY, REPEAT, BOOL = range(12)
_SEQ_LEVEL = {"or": OR, "and": AND, "intersect": INTERSECT, "within": WITHIN, "throughout": THROUGHOUT}
_EDGE = {"pos": "posedge ", "neg": "negedge ", "any": ""}
_PRIMARY = 15


def render(node) -> str:
    return _prop(node, PREFIX)


def level(node) -> int:
    if isinstance(node, (Labeled, Clocked, DisableIff)):
        return PREFIX
    if isinstance(node, Liveness):
        return PREFIX if len(node.operands) == 1 else UNTIL
    if isinstance(node, Implication):
        return IMPL
    if isinstance(node, SeqBinop):
        return _SEQ_LEVEL[node.kind]
    if isinstance(node, PropNot):
        return NOT
    if isinstance(node, Delay):
        return DELAY
    if isinstance(node, Repeat):
        return REPEAT
    return BOOL


def _prop(node, need: int, tail: bool = True) -> str:
    """Render ``node`` where the context requires binding level ``need``.

    Prefix operators (and ``not``, whose operand extends right) may appear
    unparenthesized only in a trailing position.
    """
    lv = level(node)
    text = _prop_raw(node)
    if lv < need or (lv == PREFIX and not tail and need > PREFIX):
        return f"({text})"
    return text


def _prop_raw(node) -> str:
    if isinstance(node, Labeled):
        return f"{node.label}: {_prop(node.body, PREFIX)}"
    if isinstance(node, Clocked):
        return f"@({_EDGE[node.edge]}{render_expr(node.clock)}) {_prop(node.body, PREFIX)}"
    if isinstance(node, DisableIff):
        return f"disable iff ({render_expr(node.cond)}) {_prop(node.body, PREFIX)}"
    if isinstance(node, Liveness):
        if len(node.operands) == 1:
            rng = "" if node.lo is None else f" [{_range(node.lo, node.hi)}]"
            return f"{node.kind}{rng} {_prop(node.operands[0], PREFIX)}"
        lhs, rhs = node.operands
        return f"{_prop(lhs, UNTIL + 1, tail=False)} {node.kind} {_prop(rhs, UNTIL)}"
    if isinstance(node, Implication):
        op = "|->" if node.kind == "overlap" else "|=>"
        return f"{_prop(node.antecedent, IMPL + 1, tail=False)} {op} {_prop(node.consequent, PREFIX)}"
    if isinstance(node, SeqBinop):
        lv = _SEQ_LEVEL[node.kind]
        if node.kind == "throughout":
            return f"{_prop(node.lhs, BOOL, tail=False)} throughout {_prop(node.rhs, lv, tail=False)}"
        return f"{_prop(node.lhs, lv, tail=False)} {node.kind} {_prop(node.rhs, lv + 1, tail=False)}"
    if isinstance(node, PropNot):
        return f"not {_prop(node.body, NOT, tail=False)}"
    if isinstance(node, Delay):
        spec = _delay_spec(node.lo, node.hi)
        if node.lhs is None:
            return f"{spec} {_prop(node.rhs, REPEAT, tail=False)}"
        return f"{_prop(node.lhs, DELAY, tail=False)} {spec} {_prop(node.rhs, REPEAT, tail=False)}"
    if isinstance(node, Repeat):
        op = {"consecutive": "[*", "nonconsecutive": "[=", "goto": "[->"}[node.kind]
        return f"{_prop(node.body, REPEAT + 1, tail=False)}{op}{_range(node.lo, node.hi)}]"
    return render_expr(node)


def _bound(b) -> str:
    if isinstance(b, Unbounded):
        return "$"
    if isinstance(b, int):
        return str(b)
    return render_expr(b)


def _range(lo, hi) -> str:
    return _bound(lo) if lo == hi else f"{_bound(lo)}:{_bound(hi)}"


def _delay_spec(lo, hi) -> str:
    if lo == hi:
        if isinstance(lo, int):
            return f"##{lo}"
        if isinstance(lo, SignalRef) and lo.is_simple:
            return f"##{render_expr(lo)}"
        return f"##({render_expr(lo)})"
    return f"##[{_bound(lo)}:{_bound(hi)}]"


def _expr_prec(e) -> int:
    if isinstance(e, BoolExpr):
        if e.op == "?:":
            return TERNARY_PREC
        if len(e.args) == 1:
            return UNARY_PREC
        if e.op in BINARY_PREC:
            return BINARY_PREC[e.op]
    return _PRIMARY


def _sub(e, need: int) -> str:
    if level(e) != BOOL:
        return f"({_prop(e, PREFIX)})"
    text = render_expr(e)
    return f"({text})" if _expr_prec(e) < need else text


def render_expr(e) -> str:
    if isinstance(e, SignalRef):
        return render_path(e.path)
    if isinstance(e, Literal):
        return e.text
    if isinstance(e, SampledFn):
        args = ", ".join(render_expr_top(a) for a in (e.arg, *e.extra))
        return f"${e.kind}({args})"
    if isinstance(e, ReductionFn):
        return f"${e.kind}({render_expr_top(e.arg)})"
    if isinstance(e, SystemCall):
        if not e.args:
            return f"${e.name}"
        return f"${e.name}({', '.join(render_expr_top(a) for a in e.args)})"
    if isinstance(e, Call):
        return f"{render_path(e.func.path)}({', '.join(render_expr_top(a) for a in e.args)})"
    if isinstance(e, BoolExpr):
        op, args = e.op, e.args
        if op == "{}":
            return "{" + ", ".join(render_expr_top(a) for a in args) + "}"
        if op == "{{}}":
            return "{" + render_expr_top(args[0]) + "{" + ", ".join(render_expr_top(a) for a in args[1:]) + "}}"
        if op in (":", "+:", "-:"):
            return f"{render_expr_top(args[0])}{op}{render_expr_top(args[1])}"
        if op == "?:":
            c, a, b = args
            return f"{_sub(c, TERNARY_PREC + 1)} ? {_sub(a, 0)} : {_sub(b, TERNARY_PREC)}"
        if len(args) == 1:
            inner = args[0]
            if isinstance(inner, BoolExpr) and len(inner.args) == 1 and inner.op not in ("{}", "{{}}"):
                return f"{op}({render_expr_top(inner)})"
            return f"{op}{_sub(inner, UNARY_PREC)}"
        p = BINARY_PREC[op]
        if op in RIGHT_ASSOC:
            left, right = p + 1, p
        else:
            left, right = p, p + 1
        return f"{_sub(args[0], left)} {op} {_sub(args[1], right)}"
    return _prop(e, PREFIX)


def render_expr_top(e) -> str:
    return _sub(e, 0)


def _index(e) -> str:
    return render_expr_top(e)


def render_path(path) -> str:
    parts = []
    for seg in path:
        name = seg.name + (" " if seg.name.startswith("\\") else "")
        parts.append(name + "".join(f"[{_index(i)}]" for i in seg.indices))
    return ".".join(parts)


_NON_WORD = re.compile(r"\W+")


def flatten_path(path) -> str:
    """``a.b[0].c`` -> ``a_b_0_c``; trailing selects are not part of the name."""
    pieces = []
    for k, seg in enumerate(path):
        pieces.append(seg.name.lstrip("\\"))
        if k < len(path) - 1:
            pieces.extend(_NON_WORD.sub("_", _index(i)).strip("_") for i in seg.indices)
    return "_".join(p for p in pieces if p)


__all__ = ["render", "render_expr", "render_path", "flatten_path", "level", "UNBOUNDED"]
