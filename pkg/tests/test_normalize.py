from __future__ import annotations

import random
import re
from collections import Counter

import pytest
from gen import gen_prop
from hypothesis import given, settings
from hypothesis import strategies as st
from normgen import gen_row

from sva_equiv.errors import NormalizeError, SvaError
from sva_equiv.normalize import (
    AST_GUARDED,
    DESCRIPTIONS,
    PROFILES,
    TEXTUAL,
    TOKEN_LEVEL,
    RuleId,
    normalize,
    rule_fire_stats,
)
from sva_equiv.pec import CheckConfig, VerdictKind, check_equivalence
from sva_equiv.syntax import parse

R = RuleId


def fired(src, profile="lint", **kw):
    return {str(r): n for r, n in normalize(src, profile, **kw)[1].fired}


class TestGoldens:
    def test_backtick(self):
        out, rep = normalize("`SIG && a")
        assert out == "SIG && a" and rep.counts() == {R.R1: 1}

    def test_hierarchical_path(self):
        out, rep = normalize("a.b[0].c |-> d")
        assert out == "a_b_0_c |-> d"
        assert rep.counts() == {R.R2: 1, R.R9: 1}

    def test_trailing_select_kept(self):
        assert normalize("top.u.data[3] |-> d")[0] == "top_u_data[3] |-> d"

    def test_liveness_lint(self):
        out, rep = normalize("s_eventually done", "lint")
        assert out == "##1 done" and rep.counts() == {R.R5: 1}

    def test_liveness_pec_untouched(self):
        out, rep = normalize("s_eventually done", "pec")
        assert out == "s_eventually done" and rep.fired == []
        v = check_equivalence("a", out, CheckConfig(depth_K=3))
        assert v.kind is VerdictKind.UNSUPPORTED and v.reason == "liveness"

    def test_package_scope(self):
        assert normalize("pkg::a |-> b", "pec")[0] == "a |-> b"

    def test_comments(self):
        out, rep = normalize("a /* c */ && b // x", "pec")
        assert out == "a && b" and rep.counts() == {R.R11: 2}

    def test_parens(self):
        assert normalize("(a && (b || c)", "pec")[0] == "(a && (b || c))"
        assert normalize("a && b)", "pec")[0] == "a && b"

    def test_else_systask(self):
        out = normalize('assert property (a |-> b) else $error("bad");', "pec")[0]
        assert out == "assert property (a |-> b);"

    def test_action_blocks(self):
        out, rep = normalize('assert property (a) $display("ok"); else begin $error("x"); end', "pec")
        assert out == "assert property (a);"
        assert rep.counts() == {R.R17: 1}

    def test_nested_directive(self):
        assert normalize("assert property (assert property (a |-> b););", "pec")[0] == "assert property (a |-> b);"

    def test_cast(self):
        assert normalize("logic'(a) && b", "pec")[0] == "(a) && b"

    def test_clock_insertion(self):
        assert normalize("assert property (a |-> b);")[0] == "assert property (@(posedge clk) a |-> b);"
        assert fired("assert property (@(posedge c) a |-> b);") == {}
        assert fired("a |-> b") == {}

    @pytest.mark.parametrize(
        "collapse,expected", [("lower", "a ##1 b |-> c[*2] ##1 d[->1]"), ("upper", "a ##3 b |-> c[*4] ##1 d[->5]")]
    )
    def test_range_collapse(self, collapse, expected):
        assert normalize("a ##[1:3] b |-> c[*2:4] ##1 d[->1:5]", "lint", collapse)[0] == expected

    def test_unbounded_collapses_to_lower(self):
        assert normalize("a ##[2:$] b", "lint", "upper")[0] == "a ##2 b"

    def test_until_rules(self):
        assert fired("a s_until b") == {"R7": 1}
        assert fired("a until_with b") == {"R16": 1}


class TestRules:
    def test_seventeen_descriptions(self):
        assert len(DESCRIPTIONS) == 17
        assert all(r.description for r in RuleId)
        assert len({r.description for r in RuleId}) == 17

    def test_groups_partition(self):
        assert TEXTUAL | TOKEN_LEVEL | AST_GUARDED == set(RuleId)
        assert not (TEXTUAL & TOKEN_LEVEL)

    def test_pec_profile(self):
        skipped = {R.R5, R.R7, R.R8, R.R13, R.R14, R.R15, R.R16}
        assert PROFILES["pec"] == set(RuleId) - skipped

    def test_unknown_profile(self):
        with pytest.raises(NormalizeError):
            normalize("a", "nope")
        with pytest.raises(NormalizeError):
            normalize("a", "lint", collapse="middle")

    def test_ast_rules_skipped_when_unparseable(self):
        out, rep = normalize("top.x |-> |-> b", "lint")
        assert out == "top.x |-> |-> b"
        assert R.R2 in rep.skipped

    def test_textual_rules_run_when_unparseable(self):
        out, _ = normalize("`A |-> |-> b // c", "lint")
        assert out == "A |-> |-> b"

    def test_report_dict(self):
        _, rep = normalize("`A && b", "pec")
        d = rep.to_dict()
        assert d["profile"] == "pec" and d["fired"] == [["R1", 1]] and d["after"] == "A && b"


class TestFireStats:
    def test_examples(self):
        stats = rule_fire_stats(["`A", "b.c"])
        assert {str(r): n for r, n in stats.counts.items()} == {"R1": 1, "R2": 1}
        assert stats.any_fired_fraction == 1.0
        clean = rule_fire_stats(["a && b"])
        assert clean.counts == {} and clean.any_fired_fraction == 0.0

    @pytest.mark.parametrize("profile", ["pec", "lint"])
    def test_injected_counts_recovered(self, profile):
        rows, truth = [], Counter()
        for seed in range(100):
            text, counts = gen_row(random.Random(seed), profile)
            rows.append(text)
            truth.update(counts)
        stats = rule_fire_stats(rows, profile)
        assert stats.counts == {r: n for r, n in truth.items() if n}
        assert 0.0 <= stats.any_fired_fraction <= 1.0

    @pytest.mark.parametrize("profile", ["pec", "lint"])
    def test_per_row_counts(self, profile):
        for seed in range(200):
            text, counts = gen_row(random.Random(1000 + seed), profile)
            assert normalize(text, profile)[1].counts() == {r: n for r, n in counts.items() if n}, text


_TRIGGERS = re.compile(r"`|::|\b\w+\s*\.\s*[A-Za-z_]|\belse\b|s_eventually|\buntil|s_until|//|/\*|##\s*\[|\[\s*[*=]\s*\d+\s*:|\[->\s*\d+\s*:")


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["pec", "lint"]))
def test_idempotence(seed, profile):
    text, _ = gen_row(random.Random(seed), profile)
    once, _ = normalize(text, profile)
    twice, rep = normalize(once, profile)
    assert twice == once and rep.fired == []


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10**6))
def test_lint_removes_every_trigger(seed):
    text, _ = gen_row(random.Random(seed), "lint")
    out, _ = normalize(text, "lint")
    assert not _TRIGGERS.search(out), out
    body = re.sub(r"^assert property \((.*)\);$", r"\1", out)
    assert "@(" in out or not out.startswith("assert")
    parse(body)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["pec", "lint"]))
def test_fired_iff_changed(seed, profile):
    rng = random.Random(seed)
    text = gen_row(rng, profile)[0] if rng.random() < 0.7 else gen_prop(rng)
    out, rep = normalize(text, profile)
    assert bool(rep.fired) == (out.split() != text.split())


@settings(max_examples=300, deadline=None)
@given(st.text(alphabet="ab()&| ", max_size=25))
def test_paren_balance(src):
    try:
        out, _ = normalize(src, "pec")
    except SvaError:
        pytest.fail("R12 should always balance")
    depth = 0
    for ch in out:
        depth += {"(": 1, ")": -1}.get(ch, 0)
        assert depth >= 0
    assert depth == 0


def _decorate(prop: str, rng: random.Random) -> str:
    """Rename signals to hierarchical paths and sprinkle comments; stays parseable."""
    paths = {"a": "top.u_a.a", "b": "top.blk[1].b", "c": "c"}
    out = re.sub(r"\b[abc]\b", lambda m: paths[m.group()] if rng.random() < 0.7 else m.group(), prop)
    if rng.random() < 0.5:
        out = f"/* note */ {out} // tail"
    if rng.random() < 0.4:
        out = f"assert property ({out.replace('// tail', '')});"
    return out


def test_pec_profile_preserves_meaning():
    rng = random.Random(11)
    cfg = CheckConfig(depth_K=4)
    checked = 0
    while checked < 100:
        x = _decorate(gen_prop(rng, 2), rng)
        try:
            parse(x)
        except SvaError:
            continue
        after, _ = normalize(x, "pec")
        v = check_equivalence(x, after, cfg, normalize=False)
        assert v.kind is VerdictKind.EQUIVALENT, (x, after, str(v))
        checked += 1
