"""Labeled temporal-class corpus built from the operator definitions.

Each case is assembled from a combinational base plus the operator that sets
its class, so the label is known from construction rather than from the
classifier under test.
"""

from __future__ import annotations

import random

from sva_equiv.tcl import TclClass

C1_ATOMS = (
    "a", "b", "req", "ack", "valid", "data[3]", "fifo.full", "x[1][2]",
    "$rose(a)", "$fell(b)", "$stable(data)", "$past(req)", "$changed(ack)",
    "$onehot(sel)", "$onehot0(gnt)", "$countones(v) == 1", "cnt == 4'd3", "(state != IDLE)",
)
C1_OPS = ("&&", "||", "^", "==", "!=", "&", "|")

C2_TEMPLATES = (
    "{p} |-> {q}",
    "{p} |=> {q}",
    "{p} ##1 {q}",
    "{p} ##[1:3] {q}",
    "{p} |-> ##2 {q}",
    "{p}[*2] |-> {q}",
    "{p} ##1 {q}[*1:4]",
    "{p}[=2] |-> {q}",
    "{p}[->1] |=> {q}",
    "{p} throughout ({q} ##1 {r})",
    "({p} ##1 {q}) within ({r} ##3 {p})",
    "({p} ##1 {q}) intersect ({r} ##1 {p})",
    "{p} |-> ##[0:2] {q}",
    "{p} ##[2:$] {q}",
)
C3_TEMPLATES = (
    "s_eventually {p}",
    "{p} |-> s_eventually {q}",
    "{p} |=> s_eventually ({q} && {r})",
    "{p} s_until {q}",
    "{p} |-> {q} s_until {r}",
    "{p} until_with {q}",
    "s_always {p}",
    "{p} |=> ({q} |-> s_eventually {r})",
    "{p} ##[1:3] {q} |-> s_eventually {r}",
    "{p} until {q}",
    "{p} |-> eventually {q}",
    "{p}[*2] |-> {q} s_until_with {r}",
)


def _combinational(rng: random.Random) -> str:
    a, b = rng.sample(C1_ATOMS, 2)
    shape = rng.randrange(4)
    if shape == 0:
        return a
    if shape == 1:
        return f"!{a}"
    if shape == 2:
        return f"({a} {rng.choice(C1_OPS)} {b})"
    c = rng.choice(C1_ATOMS)
    return f"({a} ? {b} : {c})"


def _fill(template: str, rng: random.Random) -> str:
    return template.format(p=_combinational(rng), q=_combinational(rng), r=_combinational(rng))


def build_corpus(per_class: int = 30, seed: int = 7) -> list:
    """``per_class`` distinct (source, label) pairs for each class."""
    rng = random.Random(seed)
    out = []
    for label, make in (
        (TclClass.C1, lambda: _combinational(rng) if rng.random() < 0.5 else f"({_combinational(rng)} && {_combinational(rng)})"),
        (TclClass.C2, lambda: _fill(rng.choice(C2_TEMPLATES), rng)),
        (TclClass.C3, lambda: _fill(rng.choice(C3_TEMPLATES), rng)),
    ):
        seen = set()
        while len(seen) < per_class:
            src = make()
            if src not in seen:
                seen.add(src)
                out.append((src, label))
    return out
