"""Lowering from the parsed AST to the bounded core the checker evaluates.

The lowered tree uses the same node classes with a narrower shape:

* every signal is a one-segment ``SignalRef`` whose name is the flattened key;
* literals are reduced to one bit;
* clocking events are gone (all clocks alias one global tick);
* ``disable iff`` survives only as the root;
* leading delays gain an explicit ``1`` operand and ``r |=> p`` becomes
  ``(r ##1 1) |-> p``;
* ``$onehot``/``$onehot0`` are expanded into plain predicates;
* all delay and repetition bounds are finite integers.
"""

from __future__ import annotations

from ..errors import UnsupportedConstruct
from ..syntax.nodes import (
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
    Segment,
    SeqBinop,
    SignalRef,
    SystemCall,
    Unbounded,
    is_boolean,
    is_sequence,
    walk,
)
from ..syntax.printer import flatten_path, render_expr, render_expr_top
from .verdict import REASONS

ONE = Literal(1, "1'b1")
ZERO = Literal(0, "1'b0")

_AND_OPS = {"&&", "&"}
_OR_OPS = {"||", "|"}
_LOGIC_OPS = _AND_OPS | _OR_OPS | {
    "^", "~^", "^~", "==", "!=", "===", "!==", "==?", "!=?", "<", "<=", ">", ">=", "->", "<->",
}
_UNARY_ID = {"&", "|", "^"}
_UNARY_NEG = {"!", "~", "~&", "~|", "~^", "^~"}


def signal_key(ref: SignalRef) -> str:
    """Flattened name plus any trailing selects, e.g. ``a_b_0_c[3]``."""
    base = flatten_path(ref.path)
    return base + "".join(f"[{render_expr_top(i)}]" for i in ref.path[-1].indices)


def _priority(reason: str) -> int:
    return REASONS.index(reason)


def structural_issue(ast):
    """Highest-priority structural reason the AST is outside the bounded core."""
    found = []
    clocks = set()
    for n in walk(ast):
        if isinstance(n, Liveness):
            found.append(("liveness", n.kind))
        elif isinstance(n, Clocked):
            clocks.add(render_expr(n.clock))
        elif isinstance(n, (Delay, Repeat)):
            if isinstance(n, Repeat) and n.kind != "consecutive":
                found.append(("goto_repeat", "[=" if n.kind == "nonconsecutive" else "[->"))
            if isinstance(n.hi, Unbounded):
                found.append(("unbounded_range", "open upper bound"))
            elif not isinstance(n.lo, int) or not isinstance(n.hi, int):
                found.append(("unsupported_fn", "non-constant bound"))
    if len(clocks) > 1:
        found.append(("multi_clock", ", ".join(sorted(clocks))))
    if not found:
        return None
    return min(found, key=lambda rd: _priority(rd[0]))


def lower(ast):
    """Lower a parsed property; raises UnsupportedConstruct outside the core."""
    issue = structural_issue(ast)
    if issue is not None:
        raise UnsupportedConstruct(*issue)
    body = ast
    cond = None
    while True:
        if isinstance(body, (Labeled, Clocked)):
            body = body.body
        elif isinstance(body, DisableIff):
            if cond is not None:
                raise UnsupportedConstruct("unsupported_fn", "nested disable iff")
            cond = _expr(body.cond)
            body = body.body
        else:
            break
    low = _prop(body)
    return low if cond is None else DisableIff(cond, low)


def _prop(node):
    if isinstance(node, (Labeled, Clocked)):
        return _prop(node.body)
    if isinstance(node, DisableIff):
        raise UnsupportedConstruct("unsupported_fn", "disable iff below the top level")
    if isinstance(node, Implication):
        ant = _seq(node.antecedent)
        if node.kind == "nonoverlap":
            ant = Delay(1, 1, ant, ONE)
        return Implication("overlap", ant, _prop(node.consequent))
    if isinstance(node, PropNot):
        return PropNot(_prop(node.body))
    if isinstance(node, SeqBinop) and node.kind in ("and", "or"):
        if is_sequence(node):
            _require_nonempty(node.lhs, node.kind)
            _require_nonempty(node.rhs, node.kind)
        return SeqBinop(node.kind, _prop(node.lhs), _prop(node.rhs))
    return _seq(node)


def _seq(node):
    if isinstance(node, (Labeled, Clocked)):
        return _seq(node.body)
    if is_boolean(node):
        return _expr(node)
    if isinstance(node, Delay):
        lhs = ONE if node.lhs is None else _seq(node.lhs)
        return Delay(node.lo, node.hi, lhs, _seq(node.rhs))
    if isinstance(node, Repeat):
        return Repeat("consecutive", node.lo, node.hi, _seq(node.body))
    if isinstance(node, SeqBinop):
        if node.kind == "throughout":
            _require_nonempty(node.rhs, node.kind)
            return SeqBinop("throughout", _expr(node.lhs), _seq(node.rhs))
        _require_nonempty(node.lhs, node.kind)
        _require_nonempty(node.rhs, node.kind)
        return SeqBinop(node.kind, _seq(node.lhs), _seq(node.rhs))
    raise UnsupportedConstruct("unsupported_fn", f"{type(node).__name__} in sequence position")


def _require_nonempty(node, op: str) -> None:
    if admits_empty(node):
        raise UnsupportedConstruct("unsupported_fn", f"operand of {op} admits an empty match")


def admits_empty(node) -> bool:
    if isinstance(node, Repeat):
        return node.lo == 0 or admits_empty(node.body)
    if isinstance(node, SeqBinop) and node.kind == "or":
        return admits_empty(node.lhs) or admits_empty(node.rhs)
    if isinstance(node, (Labeled, Clocked)):
        return admits_empty(node.body)
    return False


def _bit(value: int) -> Literal:
    return ONE if value % 2 else ZERO


def _expr(node):
    if isinstance(node, SignalRef):
        return SignalRef((Segment(signal_key(node)),))
    if isinstance(node, Literal):
        return _bit(node.value)
    if isinstance(node, SampledFn):
        if node.kind == "past":
            if len(node.extra) > 1:
                raise UnsupportedConstruct("unsupported_fn", "$past with gating or clock")
            if node.extra:
                depth = node.extra[0]
                if not isinstance(depth, Literal):
                    raise UnsupportedConstruct("unsupported_fn", "$past with non-constant depth")
                if depth.value == 0:
                    return _expr(node.arg)
                if depth.value != 1:
                    raise UnsupportedConstruct("unsupported_fn", f"$past depth {depth.value}")
        elif node.extra:
            raise UnsupportedConstruct("unsupported_fn", f"${node.kind} with a clocking argument")
        return SampledFn(node.kind, _expr(node.arg))
    if isinstance(node, ReductionFn):
        return _onehot(node.kind, [_expr(x) for x in _concat_items(node.arg)])
    if isinstance(node, BoolExpr):
        op, args = node.op, node.args
        if len(args) == 1 and (op in _UNARY_ID or op in _UNARY_NEG):
            inner = _expr(args[0])
            return inner if op in _UNARY_ID else BoolExpr("!", (inner,))
        if op == "?:" or (len(args) == 2 and op in _LOGIC_OPS):
            return BoolExpr(op, tuple(_expr(a) for a in args))
        raise UnsupportedConstruct("unsupported_fn", f"operator {op}")
    if isinstance(node, SystemCall):
        raise UnsupportedConstruct("unsupported_fn", f"${node.name}")
    if isinstance(node, Call):
        raise UnsupportedConstruct("unsupported_fn", f"call to {node.func.name}")
    raise UnsupportedConstruct("unsupported_fn", f"{type(node).__name__} in boolean position")


def _concat_items(node) -> list:
    if isinstance(node, BoolExpr) and node.op == "{}":
        return [item for a in node.args for item in _concat_items(a)]
    if isinstance(node, BoolExpr) and node.op == "{{}}":
        count = node.args[0]
        if not isinstance(count, Literal):
            raise UnsupportedConstruct("unsupported_fn", "non-constant replication")
        inner = [item for a in node.args[1:] for item in _concat_items(a)]
        return inner * count.value
    return [node]


def _conj(items):
    out = items[0]
    for x in items[1:]:
        out = BoolExpr("&&", (out, x))
    return out


def _disj(items):
    out = items[0]
    for x in items[1:]:
        out = BoolExpr("||", (out, x))
    return out


def _not(x):
    return BoolExpr("!", (x,))


def _onehot(kind: str, items: list):
    """Exactly one (``onehot``) or at most one (``onehot0``) item is set."""
    if not items:
        return ZERO if kind == "onehot" else ONE
    if len(items) == 1:
        return items[0] if kind == "onehot" else ONE
    if kind == "onehot" and len(items) == 2:
        return BoolExpr("^", (items[0], items[1]))
    pairs = [_not(BoolExpr("&&", (a, b))) for i, a in enumerate(items) for b in items[i + 1 :]]
    at_most_one = _conj(pairs)
    if kind == "onehot0":
        return at_most_one
    return BoolExpr("&&", (_disj(items), at_most_one))


def span(node) -> int:
    """Upper bound on the cycles an attempt starting at t inspects (t .. t+span-1)."""
    if is_boolean(node):
        return 1
    if isinstance(node, Delay):
        return span(node.lhs) + node.hi + span(node.rhs)
    if isinstance(node, Repeat):
        return node.hi * span(node.body)
    if isinstance(node, SeqBinop):
        if node.kind == "throughout":
            return span(node.rhs)
        return max(span(node.lhs), span(node.rhs))
    if isinstance(node, Implication):
        return span(node.antecedent) + span(node.consequent)
    if isinstance(node, (PropNot, DisableIff)):
        return span(node.body)
    raise TypeError(f"not a lowered node: {node!r}")


def signals(*lowered) -> list:
    """Sorted signal keys referenced by lowered trees."""
    names = set()
    for ast in lowered:
        for n in walk(ast):
            if isinstance(n, SignalRef):
                names.add(n.path[0].name)
    return sorted(names)
