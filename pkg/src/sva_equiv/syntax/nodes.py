"""Typed AST for the supported SVA fragment.

Every node is an immutable dataclass, so structural equality and hashing come
for free and trees can be shared between workers without copying.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Union


class Unbounded:
    """The ``$`` upper bound of a range."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNBOUNDED"

    def __reduce__(self):
        return (Unbounded, ())


UNBOUNDED = Unbounded()


@dataclass(frozen=True)
class Segment:
    name: str
    indices: tuple = ()


@dataclass(frozen=True)
class SignalRef:
    path: tuple  # of Segment

    @property
    def bit_selects(self) -> tuple:
        return self.path[-1].indices

    @property
    def is_simple(self) -> bool:
        return len(self.path) == 1 and not self.path[0].indices

    @property
    def name(self) -> str:
        return self.path[0].name if len(self.path) == 1 else ".".join(s.name for s in self.path)


@dataclass(frozen=True)
class Literal:
    value: int
    text: str


@dataclass(frozen=True)
class BoolExpr:
    """Expression-level operator node.

    ``op`` is the operator lexeme (``"&&"``, ``"!"``, ``"=="``, ``"?:"`` ...);
    concatenation uses ``"{}"`` and replication ``"{{}}"`` with the count first.
    Part-select ranges inside brackets use ``":"``, ``"+:"`` and ``"-:"``.
    """

    op: str
    args: tuple


@dataclass(frozen=True)
class SampledFn:
    kind: str  # rose, fell, stable, changed, past
    arg: object
    extra: tuple = ()


@dataclass(frozen=True)
class ReductionFn:
    kind: str  # onehot, onehot0
    arg: object


@dataclass(frozen=True)
class SystemCall:
    name: str  # without the leading '$'
    args: tuple


@dataclass(frozen=True)
class Call:
    func: SignalRef
    args: tuple


@dataclass(frozen=True)
class Delay:
    lo: object  # int or expression
    hi: object  # int, expression or UNBOUNDED
    lhs: object  # None for a leading delay
    rhs: object


@dataclass(frozen=True)
class Repeat:
    kind: str  # consecutive, nonconsecutive, goto
    lo: object
    hi: object
    body: object


@dataclass(frozen=True)
class Implication:
    kind: str  # overlap, nonoverlap
    antecedent: object
    consequent: object


@dataclass(frozen=True)
class SeqBinop:
    kind: str  # throughout, within, intersect, and, or
    lhs: object
    rhs: object


@dataclass(frozen=True)
class PropNot:
    body: object


@dataclass(frozen=True)
class Liveness:
    kind: str  # s_eventually, eventually, s_always, until, s_until, until_with, s_until_with
    operands: tuple
    lo: object = None
    hi: object = None


@dataclass(frozen=True)
class DisableIff:
    cond: object
    body: object


@dataclass(frozen=True)
class Clocked:
    edge: str  # pos, neg, any
    clock: SignalRef
    body: object


@dataclass(frozen=True)
class Labeled:
    label: str
    body: object


Expr = Union[SignalRef, Literal, BoolExpr, SampledFn, ReductionFn, SystemCall, Call]
PropertyAst = Union[
    Expr, Delay, Repeat, Implication, SeqBinop, PropNot, Liveness, DisableIff, Clocked, Labeled
]

BOOLEAN_NODES = (SignalRef, Literal, BoolExpr, SampledFn, ReductionFn, SystemCall, Call)
UNARY_LIVENESS = frozenset({"s_eventually", "eventually", "s_always"})
BINARY_LIVENESS = frozenset({"until", "s_until", "until_with", "s_until_with"})

TRUE = Literal(1, "1'b1")


def is_boolean(node) -> bool:
    return isinstance(node, BOOLEAN_NODES)


def is_sequence(node) -> bool:
    if is_boolean(node):
        return True
    if isinstance(node, (Delay, Repeat)):
        return True
    if isinstance(node, SeqBinop):
        return is_sequence(node.lhs) and is_sequence(node.rhs)
    return False


def children(node) -> Iterator:
    """Direct sub-nodes, including index expressions and symbolic bounds."""
    if isinstance(node, SignalRef):
        for seg in node.path:
            yield from seg.indices
    elif isinstance(node, BoolExpr):
        yield from node.args
    elif isinstance(node, SampledFn):
        yield node.arg
        yield from node.extra
    elif isinstance(node, ReductionFn):
        yield node.arg
    elif isinstance(node, SystemCall):
        yield from node.args
    elif isinstance(node, Call):
        yield node.func
        yield from node.args
    elif isinstance(node, Delay):
        yield from _bound_nodes(node.lo, node.hi)
        if node.lhs is not None:
            yield node.lhs
        yield node.rhs
    elif isinstance(node, Repeat):
        yield from _bound_nodes(node.lo, node.hi)
        yield node.body
    elif isinstance(node, Implication):
        yield node.antecedent
        yield node.consequent
    elif isinstance(node, SeqBinop):
        yield node.lhs
        yield node.rhs
    elif isinstance(node, PropNot):
        yield node.body
    elif isinstance(node, Liveness):
        yield from _bound_nodes(node.lo, node.hi)
        yield from node.operands
    elif isinstance(node, DisableIff):
        yield node.cond
        yield node.body
    elif isinstance(node, Clocked):
        yield node.clock
        yield node.body
    elif isinstance(node, Labeled):
        yield node.body


def _bound_nodes(*bounds):
    for b in bounds:
        if b is not None and not isinstance(b, (int, Unbounded)):
            yield b


def walk(node) -> Iterator:
    """Pre-order traversal over the whole tree."""
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(list(children(n))))


@dataclass(frozen=True, eq=False)
class Identifier:
    """A referenced name, deduplicated by its flattened spelling."""

    segments: tuple  # of Segment; the last one carries no trailing selects
    bit_selects: tuple = field(default=())

    @property
    def flat(self) -> str:
        from .printer import flatten_path

        return flatten_path(self.segments)

    def __str__(self) -> str:
        from .printer import render_path

        return render_path(self.segments)

    def __eq__(self, other) -> bool:
        return isinstance(other, Identifier) and self.flat == other.flat

    def __hash__(self) -> int:
        return hash(self.flat)

    def __repr__(self) -> str:
        return f"Identifier({str(self)!r})"
