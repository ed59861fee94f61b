"""Rewrite rules that turn scraped assertions into lint-ready text.

Rules edit the source text in place (by token spans or regex matches), so
formatting outside a rewrite survives. They run in ascending id order and
the whole list repeats until nothing fires, with at most ten rounds.

Rules fall into three groups by what they need:

* textual: R1, R3, R11, R12 always run;
* token-level: R4, R6, R10, R17 need the text to tokenize;
* AST-guarded: R2, R5, R7, R8, R9, R13, R14, R15, R16 run only when the
  text parses, and are reported as skipped otherwise.
"""

from __future__ import annotations

import enum
import re
from collections import Counter
from dataclasses import dataclass, field

from .errors import LexError, NormalizeError, SvaError
from .syntax import parse, parse_expression, tokenize
from .syntax.nodes import Clocked, walk
from .syntax.printer import flatten_path

MAX_ROUNDS = 10


class RuleId(enum.Enum):
    R1 = 1
    R2 = 2
    R3 = 3
    R4 = 4
    R5 = 5
    R6 = 6
    R7 = 7
    R8 = 8
    R9 = 9
    R10 = 10
    R11 = 11
    R12 = 12
    R13 = 13
    R14 = 14
    R15 = 15
    R16 = 16
    R17 = 17

    @property
    def description(self) -> str:
        return DESCRIPTIONS[self]

    def __str__(self) -> str:
        return self.name


DESCRIPTIONS = {
    RuleId.R1: "strip backtick macro prefixes",
    RuleId.R2: "flatten hierarchical paths",
    RuleId.R3: "drop package scope prefixes",
    RuleId.R4: "strip else system-task actions",
    RuleId.R5: "rewrite s_eventually/eventually to ##1",
    RuleId.R6: "strip nested assertion directives",
    RuleId.R7: "rewrite s_until/s_until_with to ##1",
    RuleId.R8: "clock unclocked directive bodies with @(posedge clk)",
    RuleId.R9: "flatten bit-selects in the middle of a path",
    RuleId.R10: "strip typed casts",
    RuleId.R11: "strip comments",
    RuleId.R12: "balance parentheses",
    RuleId.R13: "collapse delay ranges to a fixed delay",
    RuleId.R14: "collapse consecutive-repetition ranges",
    RuleId.R15: "collapse goto and non-consecutive repetition ranges",
    RuleId.R16: "rewrite until/until_with to ##1",
    RuleId.R17: "strip pass and else action blocks",
}

TEXTUAL = frozenset({RuleId.R1, RuleId.R3, RuleId.R11, RuleId.R12})
TOKEN_LEVEL = frozenset({RuleId.R4, RuleId.R6, RuleId.R10, RuleId.R17})
AST_GUARDED = frozenset(RuleId) - TEXTUAL - TOKEN_LEVEL

PROFILES = {
    "lint": frozenset(RuleId),
    "pec": frozenset(
        {RuleId.R1, RuleId.R2, RuleId.R9, RuleId.R3, RuleId.R4, RuleId.R6, RuleId.R10, RuleId.R11, RuleId.R12, RuleId.R17}
    ),
}


@dataclass
class NormalizationReport:
    before: str
    after: str
    profile: str
    fired: list = field(default_factory=list)  # (RuleId, count), ascending id
    skipped: list = field(default_factory=list)  # AST-guarded rules that could not run
    rounds: int = 0

    @property
    def changed(self) -> bool:
        return bool(self.fired)

    def counts(self) -> dict:
        return {r: n for r, n in self.fired}

    def to_dict(self) -> dict:
        return {
            "profile": self.profile,
            "before": self.before,
            "after": self.after,
            "fired": [[str(r), n] for r, n in self.fired],
            "skipped": [str(r) for r in self.skipped],
        }


# -- helpers ----------------------------------------------------------------

_LITERAL_OR_COMMENT = re.compile(r'"(?:\\.|[^"\\])*"|//[^\n]*|/\*.*?(?:\*/|$)', re.DOTALL)


def _code_sub(pattern: re.Pattern, repl, text: str) -> tuple[str, int]:
    """``re.subn`` restricted to text outside strings and comments."""
    out, n, last = [], 0, 0
    for m in _LITERAL_OR_COMMENT.finditer(text):
        chunk, k = pattern.subn(repl, text[last : m.start()])
        out.append(chunk)
        out.append(m.group())
        n += k
        last = m.end()
    chunk, k = pattern.subn(repl, text[last:])
    out.append(chunk)
    return "".join(out), n + k


def _splice(text: str, edits: list) -> str:
    """Apply non-overlapping ``(start, end, replacement)`` edits."""
    out, last = [], 0
    for start, end, repl in sorted(edits):
        if start < last:
            continue
        out.append(text[last:start])
        out.append(repl)
        last = end
    out.append(text[last:])
    return "".join(out)


def _tokens(text: str):
    return [t for t in tokenize(text) if not t.trivia]


def _is(tok, text: str) -> bool:
    return tok.kind in ("OP", "KEYWORD") and tok.text == text


def _match_close(toks, i: int, open_: str = "(", close: str = ")") -> int:
    """Index of the token closing the bracket at ``toks[i]``; -1 if unbalanced."""
    depth = 0
    for j in range(i, len(toks)):
        if _is(toks[j], open_):
            depth += 1
        elif _is(toks[j], close):
            depth -= 1
            if depth == 0:
                return j
    return -1


def _directives(toks):
    """``(keyword index, open paren index, close paren index)`` per directive."""
    found = []
    for i, t in enumerate(toks):
        if t.kind == "KEYWORD" and t.text in ("assert", "assume", "cover"):
            if i + 2 < len(toks) and _is(toks[i + 1], "property") and _is(toks[i + 2], "("):
                close = _match_close(toks, i + 2)
                if close > 0:
                    found.append((i, i + 2, close))
    return found


def _outermost(spans):
    out = []
    for d in spans:
        if not any(o[1] < d[0] and d[2] < o[2] for o in spans):
            out.append(d)
    return out


# -- textual rules ----------------------------------------------------------

_BACKTICK = re.compile(r"`(?=[A-Za-z_])")
_SCOPE = re.compile(r"\b[A-Za-z_][A-Za-z0-9_$]*\s*::\s*(?=[A-Za-z_\\$])")
_COMMENT = re.compile(r'("(?:\\.|[^"\\])*")|//[^\n]*|/\*.*?\*/', re.DOTALL)


def r1_backticks(text: str):
    return _code_sub(_BACKTICK, "", text)


def r3_scopes(text: str):
    return _code_sub(_SCOPE, "", text)


def r11_comments(text: str):
    n = 0

    def repl(m):
        nonlocal n
        if m.group(1) is not None:
            return m.group(1)
        n += 1
        return " " if m.group().startswith("/*") else ""

    out = _COMMENT.sub(repl, text)
    if n:
        out = re.sub(r"[ \t]+\n", "\n", out)
        out = re.sub(r"[ \t]{2,}", " ", out).strip()
    return out, n


def r12_parens(text: str):
    """Drop unmatched ``)`` and close any ``(`` left open."""
    drop, depth = [], 0
    for m in re.finditer(r'"(?:\\.|[^"\\])*"|[()]', text):
        ch = m.group()
        if ch == "(":
            depth += 1
        elif ch == ")":
            if depth == 0:
                drop.append(m.start())
            else:
                depth -= 1
    if not drop and depth == 0:
        return text, 0
    out = _splice(text, [(i, i + 1, "") for i in drop])
    if depth:
        body = out.rstrip()
        tail = ""
        while body.endswith(";"):
            body, tail = body[:-1].rstrip(), ";" + tail
        out = body + ")" * depth + tail
    return out, len(drop) + depth


# -- token-level rules ------------------------------------------------------


def r4_else_systask(text: str):
    toks = _tokens(text)
    edits = []
    for i, t in enumerate(toks[:-2]):
        if _is(t, "else") and toks[i + 1].kind == "SYSIDENT":
            end = i + 1
            if _is(toks[i + 2], "("):
                end = _match_close(toks, i + 2)
                if end < 0:
                    continue
            start = toks[i - 1].end if i else t.pos
            edits.append((start, toks[end].end, ""))
    return _splice(text, edits), len(edits)


def r6_nested_directives(text: str):
    toks = _tokens(text)
    spans = _directives(toks)
    outer = _outermost(spans)
    edits = []
    for kw, open_, close in spans:
        if (kw, open_, close) in outer:
            continue
        edits.append((toks[kw].pos, toks[open_].end, ""))
        end = toks[close].end
        if close + 1 < len(toks) and _is(toks[close + 1], ";"):
            end = toks[close + 1].end
        edits.append((toks[close].pos, end, ""))
    return _splice(text, edits), len(edits) // 2


def r10_casts(text: str):
    toks = _tokens(text)
    edits = []
    for i in range(len(toks) - 2):
        a, b, c = toks[i], toks[i + 1], toks[i + 2]
        if a.kind == "IDENT" and _is(b, "'") and _is(c, "(") and a.end == b.pos:
            edits.append((a.pos, b.end, ""))
    return _splice(text, edits), len(edits)


def _statement_end(toks, i: int) -> int:
    """Index of the last token of the statement starting at ``toks[i]``."""
    t = toks[i]
    if t.kind == "IDENT" and t.text == "begin":
        depth = 0
        for j in range(i, len(toks)):
            if toks[j].kind == "IDENT" and toks[j].text == "begin":
                depth += 1
            elif toks[j].kind == "IDENT" and toks[j].text == "end":
                depth -= 1
                if depth == 0:
                    return j
        return len(toks) - 2
    depth = 0
    for j in range(i, len(toks)):
        if toks[j].kind == "EOF":
            return j - 1
        if _is(toks[j], "(") or _is(toks[j], "{") or _is(toks[j], "["):
            depth += 1
        elif _is(toks[j], ")") or _is(toks[j], "}") or _is(toks[j], "]"):
            depth -= 1
        elif _is(toks[j], ";") and depth <= 0:
            return j
    return len(toks) - 2


def r17_action_blocks(text: str):
    toks = _tokens(text)
    edits = []
    for _, _, close in _outermost(_directives(toks)):
        j, last = close + 1, close
        while toks[j].kind != "EOF" and not _is(toks[j], ";"):
            if _is(toks[j], "else"):
                j += 1
                continue
            last = _statement_end(toks, j)
            j = last + 1
            if not _is(toks[j], "else"):
                break
        region = toks[close + 1 : last + 1]
        if region and not (len(region) == 1 and _is(region[0], ";")):
            edits.append((toks[close].end, toks[last].end, ";"))
    return _splice(text, edits), len(edits)


# -- AST-guarded rules ------------------------------------------------------


def _path_spans(toks):
    """Token spans ``(i, j)`` of dotted paths; ``j`` is exclusive."""
    spans = []
    i = 0
    while i < len(toks):
        if toks[i].kind != "IDENT" or (i and _is(toks[i - 1], ".")):
            i += 1
            continue
        j = i + 1
        dots = 0
        while True:
            while j < len(toks) and _is(toks[j], "["):
                k = _match_close(toks, j, "[", "]")
                if k < 0:
                    break
                j = k + 1
            if j + 1 < len(toks) and _is(toks[j], ".") and toks[j + 1].kind == "IDENT":
                dots += 1
                j += 2
                continue
            break
        if dots:
            spans.append((i, j))
        i = j
    return spans


def r2_r9_paths(text: str):
    toks = _tokens(text)
    edits = []
    plain = middle = 0
    for i, j in _path_spans(toks):
        src = text[toks[i].pos : toks[j - 1].end]
        try:
            ref = parse_expression(src)
        except SvaError:
            continue
        path = ref.path
        last_dot, depth = i, 0
        for k in range(i, j):
            if _is(toks[k], "["):
                depth += 1
            elif _is(toks[k], "]"):
                depth -= 1
            elif depth == 0 and _is(toks[k], "."):
                last_dot = k
        # keep the trailing selects exactly as written
        trailing = text[toks[last_dot + 2].pos : toks[j - 1].end] if last_dot + 2 < j else ""
        plain += 1
        if any(seg.indices for seg in path[:-1]):
            middle += 1
        edits.append((toks[i].pos, toks[j - 1].end, flatten_path(path) + trailing))
    return _splice(text, edits), plain, middle


def _liveness_rewrite(text: str, kinds):
    toks = _tokens(text)
    edits = []
    for i, t in enumerate(toks):
        if t.kind == "KEYWORD" and t.text in kinds:
            end = t.end
            if t.text in ("s_eventually", "eventually") and _is(toks[i + 1], "["):
                k = _match_close(toks, i + 1, "[", "]")
                if k > 0:
                    end = toks[k].end
            edits.append((t.pos, end, "##1"))
    return _splice(text, edits), len(edits)


def r8_clock(text: str):
    toks = _tokens(text)
    edits = []
    for _, open_, close in _outermost(_directives(toks)):
        body = text[toks[open_].end : toks[close].pos]
        try:
            ast = parse(body)
        except SvaError:
            continue
        if not any(isinstance(n, Clocked) for n in walk(ast)):
            edits.append((toks[open_].end, toks[open_].end, "@(posedge clk) "))
    return _splice(text, edits), len(edits)


def _range_text(toks, text, open_i: int, close_i: int, collapse: str):
    """Collapsed bound text for the ``[ ... ]`` body between two indices."""
    inner = toks[open_i + 1 : close_i]
    colon = next((k for k, t in enumerate(inner) if _is(t, ":")), None)
    if colon is None:
        return None
    lo = text[inner[0].pos : inner[colon - 1].end].strip()
    hi = text[inner[colon + 1].pos : inner[-1].end].strip() if colon + 1 < len(inner) else ""
    pick = hi if collapse == "upper" and hi not in ("", "$") else lo
    return pick


def _bound_token(pick: str) -> str:
    return pick if re.fullmatch(r"\d+|[A-Za-z_][A-Za-z0-9_]*", pick) else f"({pick})"


def r13_delay_ranges(text: str, collapse: str = "lower"):
    toks = _tokens(text)
    edits = []
    for i, t in enumerate(toks):
        if t.kind == "DELAY" and "[" in t.text:
            lo, hi = t.value
            if "*" in t.text:
                pick = 0
            elif "+" in t.text:
                pick = 1
            else:
                pick = hi if collapse == "upper" and isinstance(hi, int) else lo
            edits.append((t.pos, t.end, f"##{pick}"))
        elif _is(t, "##") and i + 1 < len(toks) and _is(toks[i + 1], "["):
            k = _match_close(toks, i + 1, "[", "]")
            pick = _range_text(toks, text, i + 1, k, collapse) if k > 0 else None
            if pick is not None:
                edits.append((t.pos, toks[k].end, "##" + _bound_token(pick)))
    return _splice(text, edits), len(edits)


_REPEAT_OPEN = {"[*": "consecutive", "[=": "nonconsecutive", "[->": "goto"}


def _repeat_ranges(text: str, kinds, collapse: str):
    toks = _tokens(text)
    edits = []
    for i, t in enumerate(toks):
        if t.kind == "REPEAT":
            kind, lo, hi = t.value
            if kind not in kinds or lo == hi:
                continue
            op = {"consecutive": "[*", "nonconsecutive": "[=", "goto": "[->"}[kind]
            pick = hi if collapse == "upper" and isinstance(hi, int) else lo
            edits.append((t.pos, t.end, f"{op}{pick}]"))
        elif t.kind == "OP" and t.text in _REPEAT_OPEN and _REPEAT_OPEN[t.text] in kinds:
            depth, k = 1, i + 1
            while k < len(toks) and depth:
                if _is(toks[k], "["):
                    depth += 1
                elif _is(toks[k], "]"):
                    depth -= 1
                k += 1
            close = k - 1
            if depth:
                continue
            inner = toks[i + 1 : close]
            colon = next((m for m, x in enumerate(inner) if _is(x, ":")), None)
            if colon is None:
                continue
            lo = text[inner[0].pos : inner[colon - 1].end].strip()
            hi = text[inner[colon + 1].pos : inner[-1].end].strip() if colon + 1 < len(inner) else ""
            pick = hi if collapse == "upper" and hi not in ("", "$") else lo
            edits.append((t.pos, toks[close].end, f"{t.text}{pick}]"))
    return _splice(text, edits), len(edits)


# -- driver -----------------------------------------------------------------


def _parses(text: str) -> bool:
    try:
        parse(text)
    except SvaError:
        return False
    return True


def _lexes(text: str) -> bool:
    try:
        tokenize(text)
    except LexError:
        return False
    return True


def _apply(rule: RuleId, text: str, collapse: str):
    """Run one rule; returns ``(text, {rule: count})``."""
    if rule is RuleId.R1:
        out, n = r1_backticks(text)
    elif rule is RuleId.R3:
        out, n = r3_scopes(text)
    elif rule is RuleId.R11:
        out, n = r11_comments(text)
    elif rule is RuleId.R12:
        out, n = r12_parens(text)
    elif rule is RuleId.R4:
        out, n = r4_else_systask(text)
    elif rule is RuleId.R6:
        out, n = r6_nested_directives(text)
    elif rule is RuleId.R10:
        out, n = r10_casts(text)
    elif rule is RuleId.R17:
        out, n = r17_action_blocks(text)
    elif rule in (RuleId.R2, RuleId.R9):
        out, plain, middle = r2_r9_paths(text)
        return out, {RuleId.R2: plain, RuleId.R9: middle}
    elif rule is RuleId.R5:
        out, n = _liveness_rewrite(text, {"s_eventually", "eventually"})
    elif rule is RuleId.R7:
        out, n = _liveness_rewrite(text, {"s_until", "s_until_with"})
    elif rule is RuleId.R16:
        out, n = _liveness_rewrite(text, {"until", "until_with"})
    elif rule is RuleId.R8:
        out, n = r8_clock(text)
    elif rule is RuleId.R13:
        out, n = r13_delay_ranges(text, collapse)
    elif rule is RuleId.R14:
        out, n = _repeat_ranges(text, {"consecutive"}, collapse)
    elif rule is RuleId.R15:
        out, n = _repeat_ranges(text, {"nonconsecutive", "goto"}, collapse)
    else:  # pragma: no cover
        raise NormalizeError(f"no implementation for {rule}")
    return out, {rule: n}


def normalize(src: str, profile: str = "lint", collapse: str = "lower") -> tuple[str, NormalizationReport]:
    """Normalize ``src`` under ``profile`` (``lint`` or ``pec``).

    ``collapse`` picks the kept endpoint for R13-R15 (``lower`` or ``upper``).
    Returns the rewritten text and a report of what fired.
    """
    if profile not in PROFILES:
        raise NormalizeError(f"unknown profile {profile!r}")
    if collapse not in ("lower", "upper"):
        raise NormalizeError(f"unknown collapse mode {collapse!r}")
    active = sorted(PROFILES[profile], key=lambda r: r.value)
    text = src
    totals: Counter = Counter()
    skipped: set = set()
    rounds = 0
    for rounds in range(1, MAX_ROUNDS + 1):
        fired_this_round = False
        skipped = set()
        done_paths = False
        for rule in active:
            if rule in (RuleId.R2, RuleId.R9):
                if done_paths:
                    continue
                done_paths = True
            if rule in TOKEN_LEVEL and not _lexes(text):
                skipped.add(rule)
                continue
            if rule in AST_GUARDED and not _parses(text):
                skipped.add(rule)
                if rule in (RuleId.R2, RuleId.R9):
                    skipped.update({RuleId.R2, RuleId.R9} & PROFILES[profile])
                continue
            out, counts = _apply(rule, text, collapse)
            if out != text:
                fired_this_round = True
                totals.update({r: n for r, n in counts.items() if n})
                text = out
        if not fired_this_round:
            break
    if _paren_depth(text) != 0 and RuleId.R12 in PROFILES[profile]:
        raise NormalizeError("parentheses still unbalanced after R12")
    fired = sorted(((r, n) for r, n in totals.items() if n), key=lambda rn: rn[0].value)
    report = NormalizationReport(
        before=src,
        after=text,
        profile=profile,
        fired=fired,
        skipped=sorted(skipped, key=lambda r: r.value),
        rounds=rounds,
    )
    return text, report


def _paren_depth(text: str) -> int:
    depth = 0
    for m in re.finditer(r'"(?:\\.|[^"\\])*"|[()]', text):
        if m.group() == "(":
            depth += 1
        elif m.group() == ")":
            depth -= 1
            if depth < 0:
                return depth
    return depth


@dataclass
class FireStats:
    rows: int
    counts: dict  # RuleId -> total occurrences
    rows_fired: int

    @property
    def any_fired_fraction(self) -> float:
        return self.rows_fired / self.rows if self.rows else 0.0

    def to_dict(self) -> dict:
        return {
            "rows": self.rows,
            "rows_fired": self.rows_fired,
            "any_fired_fraction": self.any_fired_fraction,
            "counts": {str(r): n for r, n in sorted(self.counts.items(), key=lambda rn: rn[0].value)},
        }


def rule_fire_stats(rows, profile: str = "lint") -> FireStats:
    counts: Counter = Counter()
    fired_rows = n = 0
    for row in rows:
        n += 1
        _, report = normalize(row, profile)
        if report.fired:
            fired_rows += 1
        for rule, k in report.fired:
            counts[rule] += k
    return FireStats(n, dict(counts), fired_rows)
