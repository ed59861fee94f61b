"""Bounded trace semantics over bit-parallel trace sets.

A value of the kernel is an int used as a bitset: bit ``j`` tells whether the
quantity holds on trace ``j`` of the batch being evaluated. With a batch of one
trace the same code is a plain evaluator.

The bound follows the truncated-path reading of weak semantics: at or past the
cut every letter satisfies every boolean (``ext=True``), and negation swaps to
the dual view where every letter falsifies every boolean (``ext=False``).
Obligations that reach past the bound therefore pass, and antecedents, which sit
under an implicit negation, cannot match past it. Sampled-value functions read
0 as the value before cycle 0. An empty sequence match started at ``t`` ends at
``t - 1``.
"""

from __future__ import annotations

from ..syntax import parse
from ..syntax.nodes import (
    BoolExpr,
    Delay,
    DisableIff,
    Implication,
    Literal,
    PropNot,
    Repeat,
    SampledFn,
    SeqBinop,
    SignalRef,
    is_boolean,
)
from .lower import ONE, lower, signals, span
from .verdict import TraceAssignment


class Kernel:
    def __init__(self, var, full: int, depth: int):
        self.var = var  # (name, cycle) -> bitset
        self.full = full
        self.depth = depth
        self._val = {}
        self._match = {}
        self._hold = {}

    # booleans ----------------------------------------------------------
    def value(self, e, c: int) -> int:
        key = (id(e), c)
        hit = self._val.get(key)
        if hit is None:
            hit = self._val[key] = self._value(e, c)
        return hit

    def _prev(self, e, c: int) -> int:
        return 0 if c == 0 else self.value(e, c - 1)

    def _value(self, e, c: int) -> int:
        full = self.full
        if isinstance(e, SignalRef):
            return self.var(e.path[0].name, c)
        if isinstance(e, Literal):
            return full if e.value & 1 else 0
        if isinstance(e, SampledFn):
            v, p = self.value(e.arg, c), self._prev(e.arg, c)
            if e.kind == "rose":
                return v & ~p & full
            if e.kind == "fell":
                return ~v & p & full
            if e.kind == "stable":
                return ~(v ^ p) & full
            if e.kind == "changed":
                return v ^ p
            return p
        op, args = e.op, e.args
        if len(args) == 1:
            return ~self.value(args[0], c) & full
        if op == "?:":
            k = self.value(args[0], c)
            return (k & self.value(args[1], c)) | (~k & self.value(args[2], c) & full)
        a, b = self.value(args[0], c), self.value(args[1], c)
        if op in ("&&", "&"):
            return a & b
        if op in ("||", "|"):
            return a | b
        if op in ("^", "!=", "!==", "!=?"):
            return a ^ b
        if op in ("~^", "^~", "==", "===", "==?", "<->"):
            return ~(a ^ b) & full
        if op == "<":
            return ~a & b & full
        if op == ">":
            return a & ~b & full
        if op in ("<=", "->"):
            return (~a | b) & full
        if op == ">=":
            return (a | ~b) & full
        raise ValueError(f"operator {op} is not in the lowered core")

    def letter(self, e, c: int, ext: bool, cut: int) -> int:
        if c >= cut:
            return self.full if ext else 0
        return self.value(e, c)

    # sequences ---------------------------------------------------------
    def matches(self, s, t: int, ext: bool, cut: int) -> dict:
        """Map end cycle -> traces on which ``s`` matches over [t, end]."""
        key = (id(s), t, ext, cut)
        hit = self._match.get(key)
        if hit is None:
            hit = self._match[key] = self._matches(s, t, ext, cut)
        return hit

    def _matches(self, s, t, ext, cut) -> dict:
        if is_boolean(s):
            b = self.letter(s, t, ext, cut)
            return {t: b} if b else {}
        if isinstance(s, Delay):
            return self._concat(self.matches(s.lhs, t, ext, cut), t, s.lo, s.hi, s.rhs, ext, cut)
        if isinstance(s, Repeat):
            return self._repeat(s, t, ext, cut)
        kind = s.kind
        if kind == "or":
            out = dict(self.matches(s.lhs, t, ext, cut))
            for e, b in self.matches(s.rhs, t, ext, cut).items():
                out[e] = out.get(e, 0) | b
            return out
        if kind == "throughout":
            out = {}
            for e, b in self.matches(s.rhs, t, ext, cut).items():
                for c in range(t, e + 1):
                    b &= self.letter(s.lhs, c, ext, cut)
                if b:
                    out[e] = b
            return out
        left = self.matches(s.lhs, t, ext, cut)
        right = self.matches(s.rhs, t, ext, cut)
        out = {}
        if kind == "intersect":
            for e, b in left.items():
                m = b & right.get(e, 0)
                if m:
                    out[e] = m
        elif kind == "and":
            for e1, b1 in left.items():
                for e2, b2 in right.items():
                    m = b1 & b2
                    if m:
                        e = max(e1, e2)
                        out[e] = out.get(e, 0) | m
        elif kind == "within":
            for e2, b2 in self.matches(s.rhs, t, ext, cut).items():
                inner = 0
                for t1 in range(t, e2 + 1):
                    for e1, b1 in self.matches(s.lhs, t1, ext, cut).items():
                        if e1 <= e2:
                            inner |= b1
                m = b2 & inner
                if m:
                    out[e2] = m
        else:
            raise ValueError(f"sequence operator {kind} is not in the lowered core")
        return out

    def _concat(self, left: dict, t, lo, hi, rhs, ext, cut) -> dict:
        """``left ##[lo:hi] rhs`` given the match map of ``left`` from ``t``."""
        out = {}
        for e1, b1 in left.items():
            for n in range(lo, hi + 1):
                if e1 == t - 1:
                    # empty ##n s == 1 ##(n-1) s; empty ##0 s never matches
                    if n == 0:
                        continue
                    b, end, gap = b1 & self.letter(ONE, t, ext, cut), t, n - 1
                else:
                    b, end, gap = b1, e1, n
                if not b:
                    continue
                start = end if gap == 0 else end + gap
                for e2, b2 in self.matches(rhs, start, ext, cut).items():
                    if gap == 0 and e2 < start:
                        continue  # fusion needs a non-empty right operand
                    m = b & b2
                    if m:
                        out[e2] = out.get(e2, 0) | m
        return out

    def _repeat(self, s: Repeat, t, ext, cut) -> dict:
        out = {}
        power = {t - 1: self.full}
        for k in range(0, s.hi + 1):
            if k == 1:
                power = self.matches(s.body, t, ext, cut)
            elif k > 1:
                power = self._concat(power, t, 1, 1, s.body, ext, cut)
            if k >= s.lo:
                for e, b in power.items():
                    out[e] = out.get(e, 0) | b
            if not power:
                break
        return out

    # properties --------------------------------------------------------
    def holds(self, p, t: int, ext: bool = True, cut: int | None = None) -> int:
        cut = self.depth if cut is None else cut
        key = (id(p), t, ext, cut)
        hit = self._hold.get(key)
        if hit is None:
            hit = self._hold[key] = self._holds(p, t, ext, cut)
        return hit

    def _holds(self, p, t, ext, cut) -> int:
        full = self.full
        if isinstance(p, Implication):
            out = full
            for e, b in self.matches(p.antecedent, t, not ext, cut).items():
                if e >= t:
                    out &= ~b | self.holds(p.consequent, e, ext, cut)
            return out & full
        if isinstance(p, PropNot):
            return ~self.holds(p.body, t, not ext, cut) & full
        if isinstance(p, DisableIff):
            out = self.holds(p.body, t, ext, cut)
            last = min(cut - 1, t + span(p.body) - 1)
            for k in range(t, last + 1):
                rst = self.value(p.cond, k)
                if rst & ~out:
                    out |= rst & self.holds(p.body, t, ext, k)
            return out
        if isinstance(p, SeqBinop) and p.kind in ("and", "or"):
            a = self.holds(p.lhs, t, ext, cut)
            b = self.holds(p.rhs, t, ext, cut)
            return a & b if p.kind == "and" else a | b
        out = 0
        for e, b in self.matches(p, t, ext, cut).items():
            if e >= t:
                out |= b
        return out

    def always(self, p) -> int:
        """Traces on which ``p`` holds at every start cycle of the bound."""
        out = self.full
        for t in range(self.depth):
            out &= self.holds(p, t)
            if not out:
                break
        return out


def eval_property(ast, trace, depth: int | None = None) -> bool:
    """Whether ``ast`` holds at every start cycle of ``trace``.

    ``ast`` may be source text, a raw AST or a lowered one (lowering is
    idempotent). ``trace`` is a TraceAssignment or a mapping from signal key
    to a sequence of bits. ``depth`` is only needed when the trace has no
    signals to take it from.
    """
    if isinstance(ast, str):
        ast = parse(ast)
    values = trace.values if isinstance(trace, TraceAssignment) else trace
    ast = lower(ast)
    if values:
        depth = len(next(iter(values.values())))
    depth = depth or 0
    missing = set(signals(ast)) - set(values)
    if missing:
        raise KeyError(f"trace lacks signals {sorted(missing)}")
    if depth == 0:
        raise ValueError("trace must cover at least one cycle")
    kernel = Kernel(lambda name, c: 1 if values[name][c] else 0, 1, depth)
    return bool(kernel.always(ast))
