"""Synthetic raw assertions with recorded rule-trigger counts.

Each row starts from a clean property and receives independent injections;
the generator records how many occurrences of each rule trigger it planted.
"""

from __future__ import annotations

import random
from collections import Counter

from sva_equiv.normalize import PROFILES, RuleId

R = RuleId

CLEAN_BASES = (
    "{x} |-> {y}",
    "{x} && {y}",
    "{x} |=> ({y} || {z})",
    "{x} ##1 {y} |-> {z}",
    "!{x} || {y}",
    "{x} |-> ##2 {y}",
)


def _signal(rng: random.Random, counts: Counter, allow: set) -> str:
    """A signal reference, possibly decorated with a trigger."""
    name = rng.choice(("req", "ack", "gnt", "valid", "ready"))
    choice = rng.choice(("plain", "plain", "R1", "R2", "R9", "R3", "R10"))
    if choice not in allow:
        return name
    counts[R[choice]] += 1
    if choice == "R1":
        return "`" + name.upper() + "_M"
    if choice == "R2":
        return f"top.u_{rng.randrange(3)}.{name}"
    if choice == "R9":
        counts[R.R2] += 1  # a middle select is still a hierarchical path
        return f"top.u[{rng.randrange(4)}].{name}"
    if choice == "R3":
        return f"pkg_{rng.randrange(2)}::{name}"
    return f"logic'({name})"


def gen_row(rng: random.Random, profile: str = "lint", with_liveness: bool = True):
    """``(text, Counter)`` where the counter holds planted trigger counts for ``profile``."""
    active = PROFILES[profile]
    allow = {r.name for r in active}
    counts: Counter = Counter()
    base = rng.choice(CLEAN_BASES)
    body = base.format(**{k: _signal(rng, counts, allow) for k in "xyz" if "{" + k + "}" in base})

    extras = rng.sample(["R5", "R7", "R16", "R13", "R14", "R15"], rng.randrange(3)) if profile == "lint" else []
    if not with_liveness:
        extras = [e for e in extras if e not in ("R5", "R7", "R16")]
    for e in extras:
        counts[R[e]] += 1
        if e == "R5":
            body = f"({body}) and (s_eventually done)"
        elif e == "R7":
            body = f"({body}) and (busy s_until done)"
        elif e == "R16":
            body = f"({body}) and (busy until done)"
        elif e == "R13":
            body = f"start ##[1:3] go |-> ({body})"
        elif e == "R14":
            body = f"go[*1:2] |-> ({body})"
        else:
            body = f"go[->1:3] |-> ({body})"

    directive = rng.random() < 0.6
    unbalanced = rng.random() < 0.3
    if unbalanced:
        counts[R.R12] += 1
        if not directive:
            body = "(" + body
    if directive:
        clocked = rng.random() < 0.4
        if clocked:
            body = f"@(posedge clk) {body}"
        elif R.R8 in active:
            counts[R.R8] += 1
        inner = f"assert property ({body})"
        if rng.random() < 0.3:
            counts[R.R6] += 1
            inner = f"assert property ({inner};)"
        if unbalanced:
            inner += ")"
        action = rng.choice(("", "", "else", "pass", "both"))
        if action == "else":
            counts[R.R4] += 1
            text = f'{inner} else $error("failed");'
        elif action == "pass":
            counts[R.R17] += 1
            text = f'{inner} $display("ok");'
        elif action == "both":
            counts[R.R17] += 1
            text = f'{inner} cnt++; else begin $error("x"); end'
        else:
            text = inner + ";"
    else:
        text = body
    if rng.random() < 0.3:
        counts[R.R11] += 1
        text = "/* scraped */ " + text
    if rng.random() < 0.2:
        counts[R.R11] += 1
        text = text + " // trailing note"
    return text, counts
