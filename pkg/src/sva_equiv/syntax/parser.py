"""Recursive-descent parser for the SVA fragment.

Precedence, loosest first: clocking / ``disable iff`` / prefix liveness
operators, implication (right-assoc), the until family (right-assoc), ``or``,
``and``, ``not``, ``intersect``, ``within``, ``throughout`` (right-assoc),
``##`` (left-assoc), repetition (postfix), then boolean expressions.
"""

from __future__ import annotations

from ..errors import ParseError
from .lexer import Token, tokenize
from .nodes import (
    BINARY_LIVENESS,
    UNARY_LIVENESS,
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
    Segment,
    SeqBinop,
    SignalRef,
    SystemCall,
    is_boolean,
    is_sequence,
)

# Binary expression operators and their binding power.
BINARY_PREC = {
    "->": 1, "<->": 1,
    "||": 3,
    "&&": 4,
    "|": 5,
    "^": 6, "~^": 6, "^~": 6,
    "&": 7,
    "==": 8, "!=": 8, "===": 8, "!==": 8, "==?": 8, "!=?": 8,
    "<": 9, "<=": 9, ">": 9, ">=": 9,
    "<<": 10, ">>": 10, "<<<": 10, ">>>": 10,
    "+": 11, "-": 11,
    "*": 12, "/": 12, "%": 12,
    "**": 13,
}
RIGHT_ASSOC = frozenset({"->", "<->"})
TERNARY_PREC = 2
UNARY_PREC = 14
UNARY_OPS = frozenset({"!", "~", "-", "+", "&", "|", "^", "~&", "~|", "~^", "^~"})

SAMPLED = frozenset({"rose", "fell", "stable", "changed", "past"})
REDUCTIONS = frozenset({"onehot", "onehot0"})


DIRECTIVES = frozenset({"assert", "assume", "cover"})


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.toks: list[Token] = [t for t in tokenize(src) if not t.trivia]
        self.i = 0

    # -- token helpers -------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("OP", "KEYWORD") and t.text == text

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(repr(text))
        return self.advance()

    def fail(self, expected: str):
        t = self.tok
        raise ParseError(t.pos, expected, t.text or "end of input")

    # -- top level -----------------------------------------------------
    def parse_top(self):
        if self.tok.kind == "EOF":
            self.fail("a property")
        label = None
        if self.tok.kind == "IDENT" and self.peek().kind == "OP" and self.peek().text == ":":
            label = self.advance().value
            self.advance()
        if self.tok.kind == "KEYWORD" and self.tok.text in DIRECTIVES:
            self.advance()
            self.expect("property")
            self.expect("(")
            node = self.parse_property(top=True)
            self.expect(")")
        else:
            node = self.parse_property(top=True)
        while self.at(";"):
            self.advance()
        if self.tok.kind != "EOF":
            self.fail("end of property")
        return Labeled(label, node) if label is not None else node

    def parse_property(self, top: bool = False):
        t = self.tok
        if self.at("@"):
            return self.parse_clocked(top)
        if self.at("disable"):
            if not top:
                self.fail("'disable iff' only at the top of a property")
            self.advance()
            self.expect("iff")
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            body = self.parse_property()
            return DisableIff(cond, body)
        if t.kind == "KEYWORD" and t.text in UNARY_LIVENESS:
            self.advance()
            lo = hi = None
            if self.at("["):
                self.advance()
                lo, hi = self.parse_range_body()
                self.expect("]")
            body = self.parse_property()
            return Liveness(t.text, (body,), lo, hi)
        return self.parse_implication()

    def parse_clocked(self, top: bool):
        self.expect("@")
        edge = "any"
        if self.at("("):
            self.advance()
            if self.at("posedge") or self.at("negedge") or self.at("edge"):
                edge = {"posedge": "pos", "negedge": "neg", "edge": "any"}[self.advance().text]
            clock = self.parse_signal_ref()
            self.expect(")")
        else:
            clock = self.parse_signal_ref()
        body = self.parse_property(top=top)
        return Clocked(edge, clock, body)

    def parse_implication(self):
        start = self.tok
        lhs = self.parse_until()
        if self.at("|->") or self.at("|=>"):
            op = self.advance()
            if not is_sequence(lhs):
                raise ParseError(start.pos, "a sequence before " + op.text)
            rhs = self.parse_property()
            return Implication("overlap" if op.text == "|->" else "nonoverlap", lhs, rhs)
        return lhs

    def parse_until(self):
        lhs = self.parse_or()
        t = self.tok
        if t.kind == "KEYWORD" and t.text in BINARY_LIVENESS:
            self.advance()
            rhs = self.parse_until_rhs()
            return Liveness(t.text, (lhs, rhs))
        return lhs

    def parse_until_rhs(self):
        t = self.tok
        if t.kind == "KEYWORD" and t.text in UNARY_LIVENESS or self.at("@"):
            return self.parse_property()
        return self.parse_until()

    def parse_or(self):
        node = self.parse_and()
        while self.at("or"):
            self.advance()
            node = SeqBinop("or", node, self.parse_and())
        return node

    def parse_and(self):
        node = self.parse_not()
        while self.at("and"):
            self.advance()
            node = SeqBinop("and", node, self.parse_not())
        return node

    def parse_not(self):
        if self.at("not"):
            self.advance()
            t = self.tok
            if t.kind == "KEYWORD" and t.text in UNARY_LIVENESS:
                return PropNot(self.parse_property())
            return PropNot(self.parse_not())
        return self.parse_intersect()

    def parse_intersect(self):
        node = self.parse_within()
        while self.at("intersect"):
            self.advance()
            rhs = self.parse_within()
            self._need_seq(node, rhs, "intersect")
            node = SeqBinop("intersect", node, rhs)
        return node

    def parse_within(self):
        node = self.parse_throughout()
        while self.at("within"):
            self.advance()
            rhs = self.parse_throughout()
            self._need_seq(node, rhs, "within")
            node = SeqBinop("within", node, rhs)
        return node

    def parse_throughout(self):
        start = self.tok
        lhs = self.parse_delay()
        if self.at("throughout"):
            self.advance()
            if not is_boolean(lhs):
                raise ParseError(start.pos, "a boolean before 'throughout'")
            rhs = self.parse_throughout()
            self._need_seq(lhs, rhs, "throughout")
            return SeqBinop("throughout", lhs, rhs)
        return lhs

    def _need_seq(self, lhs, rhs, op: str):
        if not (is_sequence(lhs) and is_sequence(rhs)):
            self.fail(f"sequence operands for '{op}'")

    def _at_delay(self) -> bool:
        return self.tok.kind == "DELAY" or self.at("##")

    def parse_delay(self):
        node = None
        if not self._at_delay():
            node = self.parse_repeat()
        while self._at_delay():
            lo, hi = self.parse_delay_spec()
            rhs = self.parse_repeat()
            if node is not None and not is_sequence(node):
                self.fail("a sequence before '##'")
            node = Delay(lo, hi, node, rhs)
        return node

    def parse_delay_spec(self):
        t = self.advance()
        if t.kind == "DELAY":
            return t.value
        if self.at("["):
            self.advance()
            lo, hi = self.parse_range_body()
            self.expect("]")
            return lo, hi
        if self.at("("):
            self.advance()
            e = self.parse_expr()
            self.expect(")")
            b = self._bound_of(e)
            return b, b
        if self.tok.kind == "IDENT":
            b = self._bound_of(self.parse_signal_ref())
            return b, b
        if self.tok.kind == "NUMBER":
            b = self._bound_of(self._literal(self.advance()))
            return b, b
        self.fail("a delay value")

    def parse_range_body(self):
        lo = self._bound_of(self.parse_expr())
        if not self.at(":"):
            return lo, lo
        self.advance()
        if self.tok.kind == "DOLLAR":
            self.advance()
            return lo, UNBOUNDED
        hi = self._bound_of(self.parse_expr())
        if isinstance(lo, int) and isinstance(hi, int) and lo > hi:
            self.fail(f"a range with low bound <= high bound ({lo}:{hi})")
        return lo, hi

    @staticmethod
    def _bound_of(e):
        if isinstance(e, Literal) and e.text.replace("_", "").isdigit():
            return e.value
        return e

    def parse_repeat(self):
        start = self.tok
        node = self.parse_primary_seq()
        while True:
            t = self.tok
            if t.kind == "REPEAT":
                kind, lo, hi = self.advance().value
            elif self.at("[*") or self.at("[=") or self.at("[->"):
                kind = {"[*": "consecutive", "[=": "nonconsecutive", "[->": "goto"}[self.advance().text]
                lo, hi = self.parse_range_body()
                self.expect("]")
            elif self.at("[+]"):
                self.advance()
                kind, lo, hi = "consecutive", 1, UNBOUNDED
            else:
                return node
            if kind == "consecutive" and not is_sequence(node):
                raise ParseError(start.pos, "a sequence before repetition")
            if kind != "consecutive" and not is_boolean(node):
                raise ParseError(start.pos, "a boolean before '[=' / '[->'")
            node = Repeat(kind, lo, hi, node)

    def parse_primary_seq(self):
        t = self.tok
        if t.kind == "KEYWORD" and (t.text in UNARY_LIVENESS or t.text in ("disable", "not")):
            self.fail("a sequence operand (parenthesize the property)")
        return self.parse_expr()

    # -- boolean expressions -------------------------------------------
    def parse_expr(self, min_prec: int = 0):
        start = self.tok
        lhs = self.parse_unary()
        while True:
            t = self.tok
            if t.kind == "OP" and t.text == "?" and min_prec <= TERNARY_PREC:
                self._need_bool(lhs, start)
                self.advance()
                then = self.parse_expr(0)
                self.expect(":")
                other = self.parse_expr(TERNARY_PREC)
                lhs = BoolExpr("?:", (lhs, then, other))
                continue
            if t.kind != "OP" or t.text not in BINARY_PREC:
                return lhs
            prec = BINARY_PREC[t.text]
            if prec < min_prec:
                return lhs
            self._need_bool(lhs, start)
            self.advance()
            rstart = self.tok
            rhs = self.parse_expr(prec if t.text in RIGHT_ASSOC else prec + 1)
            self._need_bool(rhs, rstart)
            lhs = BoolExpr(t.text, (lhs, rhs))

    def _need_bool(self, node, start: Token):
        if not is_boolean(node):
            raise ParseError(start.pos, "a boolean operand")

    def parse_unary(self):
        t = self.tok
        if t.kind == "OP" and t.text in UNARY_OPS:
            self.advance()
            start = self.tok
            arg = self.parse_expr(UNARY_PREC)
            self._need_bool(arg, start)
            return BoolExpr(t.text, (arg,))
        return self.parse_primary()

    def parse_primary(self):
        t = self.tok
        if self.at("("):
            self.advance()
            inner = self.parse_property()
            self.expect(")")
            return inner
        if t.kind == "NUMBER":
            return self._literal(self.advance())
        if self.at("{"):
            return self.parse_concat()
        if t.kind == "SYSIDENT":
            return self.parse_system_call()
        if t.kind == "IDENT":
            ref = self.parse_signal_ref()
            if self.at("("):
                return Call(ref, self.parse_args())
            return ref
        if t.kind == "MACRO":
            self.fail("an identifier (backtick macros must be normalized first)")
        self.fail("an expression")

    @staticmethod
    def _literal(t: Token) -> Literal:
        return Literal(t.value, t.text.replace(" ", ""))

    def parse_args(self) -> tuple:
        self.expect("(")
        args = []
        if not self.at(")"):
            args.append(self.parse_arg())
            while self.at(","):
                self.advance()
                args.append(self.parse_arg())
        self.expect(")")
        return tuple(args)

    def parse_arg(self):
        start = self.tok
        e = self.parse_expr()
        self._need_bool(e, start)
        return e

    def parse_system_call(self):
        t = self.advance()
        name = t.value
        args = self.parse_args() if self.at("(") else ()
        if name in SAMPLED:
            if not args:
                self.fail(f"an argument to ${name}")
            if name != "past" and len(args) > 1:
                return SystemCall(name, args)
            return SampledFn(name, args[0], args[1:])
        if name in REDUCTIONS and len(args) == 1:
            return ReductionFn(name, args[0])
        return SystemCall(name, args)

    def parse_concat(self):
        self.expect("{")
        first = self.parse_arg()
        if self.at("{"):
            self.advance()
            items = [self.parse_arg()]
            while self.at(","):
                self.advance()
                items.append(self.parse_arg())
            self.expect("}")
            self.expect("}")
            return BoolExpr("{{}}", (first, *items))
        items = [first]
        while self.at(","):
            self.advance()
            items.append(self.parse_arg())
        self.expect("}")
        return BoolExpr("{}", tuple(items))

    def parse_signal_ref(self) -> SignalRef:
        segs = []
        while True:
            t = self.tok
            if t.kind != "IDENT":
                self.fail("an identifier")
            self.advance()
            indices = []
            while self.at("["):
                self.advance()
                indices.append(self.parse_index())
                self.expect("]")
            segs.append(Segment(t.value, tuple(indices)))
            if self.at(".") and self.peek().kind == "IDENT":
                self.advance()
                continue
            return SignalRef(tuple(segs))

    def parse_index(self):
        lo = self.parse_arg()
        for op in (":", "+:", "-:"):
            if self.at(op):
                self.advance()
                hi = self.parse_arg()
                return BoolExpr(op, (lo, hi))
        return lo


def parse(src: str):
    """Parse assertion text into a PropertyAst.

    Raises LexError or ParseError; comments are dropped.
    """
    return _Parser(src).parse_top()


def parse_expression(src: str):
    p = _Parser(src)
    e = p.parse_expr()
    if p.tok.kind != "EOF":
        p.fail("end of expression")
    return e
