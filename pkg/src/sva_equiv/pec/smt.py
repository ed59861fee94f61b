"""SMT-LIB 2 backend.

The bounded semantics is unrolled pointwise into propositional terms: one Bool
constant per (signal, cycle), a relation ``M(s, t, e)`` for "sequence ``s``
matches from ``t`` to ``e``" and ``H(p, t)`` for "property ``p`` holds at
``t``". Shared subterms become ``define-fun`` entries. The script asks for a
trace where the assumed property holds and the asserted one fails, so ``sat``
means FAIL. It is written independently of the bitset kernel so the two
backends can be cross-checked.
"""

from __future__ import annotations

import os
import re
import shutil
import subprocess
import time

from ..errors import SolverError
from ..syntax.nodes import (
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
from .lower import ONE, span
from .verdict import BmcOutcome, Outcome, TraceAssignment

T, F = "true", "false"


class Terms:
    """Hash-consed propositional terms rendered as SMT-LIB names."""

    def __init__(self):
        self.defs: list[str] = []
        self._memo: dict = {}
        self._neg: dict = {T: F, F: T}

    def _define(self, key, body: str) -> str:
        name = self._memo.get(key)
        if name is None:
            name = f"d{len(self.defs)}"
            self.defs.append(f"(define-fun {name} () Bool {body})")
            self._memo[key] = name
        return name

    def not_(self, x: str) -> str:
        hit = self._neg.get(x)
        if hit is None:
            hit = self._define(("not", x), f"(not {x})")
            self._neg[x] = hit
            self._neg[hit] = x
        return hit

    def and_(self, *xs) -> str:
        items = set()
        for x in xs:
            if x == F:
                return F
            if x != T:
                items.add(x)
        if not items:
            return T
        if len(items) == 1:
            return items.pop()
        ordered = sorted(items)
        return self._define(("and", *ordered), f"(and {' '.join(ordered)})")

    def or_(self, *xs) -> str:
        items = set()
        for x in xs:
            if x == T:
                return T
            if x != F:
                items.add(x)
        if not items:
            return F
        if len(items) == 1:
            return items.pop()
        ordered = sorted(items)
        return self._define(("or", *ordered), f"(or {' '.join(ordered)})")

    def xor(self, a: str, b: str) -> str:
        if a in (T, F):
            return b if a == F else self.not_(b)
        if b in (T, F):
            return a if b == F else self.not_(a)
        if a == b:
            return F
        x, y = sorted((a, b))
        return self._define(("xor", x, y), f"(xor {x} {y})")

    def ite(self, c: str, a: str, b: str) -> str:
        return self.or_(self.and_(c, a), self.and_(self.not_(c), b))


class Unroller:
    def __init__(self, names: list, depth: int):
        self.depth = depth
        self.names = names
        self.index = {n: i for i, n in enumerate(names)}
        self.terms = Terms()
        self._memo: dict = {}
        self._spans: dict = {}

    def span(self, node) -> int:
        hit = self._spans.get(id(node))
        if hit is None:
            hit = self._spans[id(node)] = span(node)
        return hit

    @staticmethod
    def var_name(i: int, c: int) -> str:
        return f"|s{i}@{c}|"

    def _cached(self, key, fn):
        hit = self._memo.get(key)
        if hit is None:
            hit = self._memo[key] = fn()
        return hit

    # booleans
    def V(self, e, c: int) -> str:
        return self._cached(("V", id(e), c), lambda: self._V(e, c))

    def _V(self, e, c: int) -> str:
        tm = self.terms
        if isinstance(e, SignalRef):
            return self.var_name(self.index[e.path[0].name], c)
        if isinstance(e, Literal):
            return T if e.value & 1 else F
        if isinstance(e, SampledFn):
            now = self.V(e.arg, c)
            before = F if c == 0 else self.V(e.arg, c - 1)
            return {
                "rose": lambda: tm.and_(now, tm.not_(before)),
                "fell": lambda: tm.and_(tm.not_(now), before),
                "stable": lambda: tm.not_(tm.xor(now, before)),
                "changed": lambda: tm.xor(now, before),
                "past": lambda: before,
            }[e.kind]()
        op, args = e.op, e.args
        vals = [self.V(a, c) for a in args]
        if len(vals) == 1:
            return tm.not_(vals[0])
        if op == "?:":
            return tm.ite(*vals)
        a, b = vals
        table = {
            "&&": lambda: tm.and_(a, b),
            "&": lambda: tm.and_(a, b),
            "||": lambda: tm.or_(a, b),
            "|": lambda: tm.or_(a, b),
            "^": lambda: tm.xor(a, b),
            "!=": lambda: tm.xor(a, b),
            "!==": lambda: tm.xor(a, b),
            "!=?": lambda: tm.xor(a, b),
            "~^": lambda: tm.not_(tm.xor(a, b)),
            "^~": lambda: tm.not_(tm.xor(a, b)),
            "==": lambda: tm.not_(tm.xor(a, b)),
            "===": lambda: tm.not_(tm.xor(a, b)),
            "==?": lambda: tm.not_(tm.xor(a, b)),
            "<->": lambda: tm.not_(tm.xor(a, b)),
            "<": lambda: tm.and_(tm.not_(a), b),
            ">": lambda: tm.and_(a, tm.not_(b)),
            "<=": lambda: tm.or_(tm.not_(a), b),
            "->": lambda: tm.or_(tm.not_(a), b),
            ">=": lambda: tm.or_(a, tm.not_(b)),
        }
        return table[op]()

    def L(self, e, c: int, ext: bool, cut: int) -> str:
        if c >= cut:
            return T if ext else F
        return self.V(e, c)

    # sequences
    def M(self, s, t: int, e: int, ext: bool, cut: int) -> str:
        if e < t - 1 or e > t + self.span(s) - 1:
            return F
        return self._cached(("M", id(s), t, e, ext, cut), lambda: self._M(s, t, e, ext, cut))

    def _M(self, s, t, e, ext, cut) -> str:
        tm = self.terms
        if is_boolean(s):
            return self.L(s, t, ext, cut) if e == t else F
        if isinstance(s, Delay):
            return self._delay(lambda e1: self.M(s.lhs, t, e1, ext, cut), self.span(s.lhs), t, e, s.lo, s.hi, s.rhs, ext, cut)
        if isinstance(s, Repeat):
            return tm.or_(*(self.P(s, k, t, e, ext, cut) for k in range(s.lo, s.hi + 1)))
        kind = s.kind
        if kind == "or":
            return tm.or_(self.M(s.lhs, t, e, ext, cut), self.M(s.rhs, t, e, ext, cut))
        if kind == "intersect":
            return tm.and_(self.M(s.lhs, t, e, ext, cut), self.M(s.rhs, t, e, ext, cut))
        if kind == "and":
            lhs_any = tm.or_(*(self.M(s.lhs, t, x, ext, cut) for x in range(t - 1, e)))
            rhs_any = tm.or_(*(self.M(s.rhs, t, x, ext, cut) for x in range(t - 1, e)))
            return tm.or_(
                tm.and_(self.M(s.lhs, t, e, ext, cut), self.M(s.rhs, t, e, ext, cut)),
                tm.and_(self.M(s.lhs, t, e, ext, cut), rhs_any),
                tm.and_(self.M(s.rhs, t, e, ext, cut), lhs_any),
            )
        if kind == "within":
            inner = tm.or_(
                *(self.M(s.lhs, t1, e1, ext, cut) for t1 in range(t, e + 1) for e1 in range(t1, e + 1))
            )
            return tm.and_(self.M(s.rhs, t, e, ext, cut), inner)
        if kind == "throughout":
            guard = tm.and_(*(self.L(s.lhs, c, ext, cut) for c in range(t, e + 1)))
            return tm.and_(self.M(s.rhs, t, e, ext, cut), guard)
        raise ValueError(f"sequence operator {kind} is not in the lowered core")

    def _delay(self, left, left_span: int, t, e, lo, hi, rhs, ext, cut) -> str:
        """``left ##[lo:hi] rhs`` ending at ``e``; ``left(e1)`` is the left match term."""
        tm = self.terms
        alts = []
        for e1 in range(t - 1, t + left_span):
            m1 = left(e1)
            if m1 == F:
                continue
            for n in range(lo, hi + 1):
                if e1 == t - 1:
                    if n == 0:
                        continue
                    pre = tm.and_(m1, self.L(ONE, t, ext, cut))
                    anchor, gap = t, n - 1
                else:
                    pre, anchor, gap = m1, e1, n
                if gap == 0 and e < anchor:
                    continue
                alts.append(tm.and_(pre, self.M(rhs, anchor + gap, e, ext, cut)))
        return tm.or_(*alts)

    def P(self, s: Repeat, k: int, t: int, e: int, ext: bool, cut: int) -> str:
        """``s.body[*k]`` matching over [t, e]."""
        if k == 0:
            return T if e == t - 1 else F
        if k == 1:
            return self.M(s.body, t, e, ext, cut)
        body_span = self.span(s.body)
        if e > t + k * body_span - 1:
            return F
        return self._cached(
            ("P", id(s), k, t, e, ext, cut),
            lambda: self._delay(
                lambda e1: self.P(s, k - 1, t, e1, ext, cut), (k - 1) * body_span, t, e, 1, 1, s.body, ext, cut
            ),
        )

    # properties
    def H(self, p, t: int, ext: bool, cut: int) -> str:
        return self._cached(("H", id(p), t, ext, cut), lambda: self._H(p, t, ext, cut))

    def _H(self, p, t, ext, cut) -> str:
        tm = self.terms
        reach = t + self.span(p)
        if isinstance(p, Implication):
            return tm.and_(
                *(
                    tm.or_(tm.not_(self.M(p.antecedent, t, e, not ext, cut)), self.H(p.consequent, e, ext, cut))
                    for e in range(t, t + self.span(p.antecedent))
                )
            )
        if isinstance(p, PropNot):
            return tm.not_(self.H(p.body, t, not ext, cut))
        if isinstance(p, DisableIff):
            aborts = [
                tm.and_(self.V(p.cond, k), self.H(p.body, t, ext, k))
                for k in range(t, min(cut - 1, t + self.span(p.body) - 1) + 1)
            ]
            return tm.or_(self.H(p.body, t, ext, cut), *aborts)
        if isinstance(p, SeqBinop) and p.kind in ("and", "or"):
            a, b = self.H(p.lhs, t, ext, cut), self.H(p.rhs, t, ext, cut)
            return tm.and_(a, b) if p.kind == "and" else tm.or_(a, b)
        return tm.or_(*(self.M(p, t, e, ext, cut) for e in range(t, reach)))

    def always(self, p) -> str:
        return self.terms.and_(*(self.H(p, t, True, self.depth) for t in range(self.depth)))


def emit_smt(assumed, asserted, names: list, depth: int) -> str:
    """SMT-LIB 2 script that is sat iff a trace satisfies ``assumed`` and violates ``asserted``."""
    u = Unroller(names, depth)
    holds = u.always(assumed)
    violated = u.terms.not_(u.always(asserted))
    lines = ["(set-logic QF_UF)"]
    for i, name in enumerate(names):
        lines.append(f"; s{i} = {name}")
        for c in range(depth):
            lines.append(f"(declare-const {u.var_name(i, c)} Bool)")
    lines.extend(u.terms.defs)
    lines.append(f"(assert {holds})")
    lines.append(f"(assert {violated})")
    lines.append("(check-sat)")
    lines.append("(get-model)")
    return "\n".join(lines) + "\n"


def solver_path() -> str:
    path = os.environ.get("SVA_EQUIV_SOLVER") or shutil.which("z3")
    if not path:
        raise SolverError("no SMT solver found; install z3 or set SVA_EQUIV_SOLVER")
    return path


# solvers may print the symbol with or without its |quotes|
_MODEL_ENTRY = re.compile(r"\(define-fun\s+\|?s(\d+)@(\d+)\|?\s+\(\)\s+Bool\s+(true|false)\s*\)")


def parse_model(text: str, names: list, depth: int) -> TraceAssignment:
    """Counterexample from a ``get-model`` reply; unmentioned constants read false."""
    bits = {n: [False] * depth for n in names}
    for i, c, val in _MODEL_ENTRY.findall(text):
        bits[names[int(i)]][int(c)] = val == "true"
    return TraceAssignment({n: tuple(v) for n, v in bits.items()})


def bmc_smt(assumed, asserted, names: list, depth: int, timeout: float) -> BmcOutcome:
    start = time.monotonic()
    script = emit_smt(assumed, asserted, names, depth)
    if timeout <= 0:
        return BmcOutcome(Outcome.TIMEOUT, None, 0.0)
    try:
        proc = subprocess.run(
            [solver_path(), "-in", "-smt2"],
            input=script,
            capture_output=True,
            text=True,
            timeout=timeout,
        )
    except subprocess.TimeoutExpired:
        return BmcOutcome(Outcome.TIMEOUT, None, time.monotonic() - start)
    elapsed = time.monotonic() - start
    out = proc.stdout.lstrip()
    status = out.split(None, 1)[0] if out else ""
    if status == "unsat":
        return BmcOutcome(Outcome.PASS, None, elapsed)
    if status == "sat":
        return BmcOutcome(Outcome.FAIL, parse_model(out, names, depth), elapsed)
    if status == "unknown":
        return BmcOutcome(Outcome.TIMEOUT, None, elapsed)
    raise SolverError(f"unexpected solver reply: {(proc.stdout + proc.stderr).strip()[:200]}")
