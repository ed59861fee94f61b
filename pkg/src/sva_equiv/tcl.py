"""Temporal Complexity Level (TCL) classifier.

An assertion's class is set by the strongest temporal operator it contains:
C3 for liveness operators, C2 for bounded delays, repetitions, implications
and the sequence-composition keywords, C1 otherwise. Sampled-value functions
such as ``$rose`` stay C1.
"""

from __future__ import annotations

import enum
import functools
import re
from collections import Counter
from dataclasses import dataclass, field

from .errors import ClassifyError, SvaError
from .syntax import BOUNDED_TEMPORAL_OPS, LIVENESS_OPS, operators, parse


@functools.total_ordering
class TclClass(enum.Enum):
    C1 = 1
    C2 = 2
    C3 = 3

    def __lt__(self, other):
        if not isinstance(other, TclClass):
            return NotImplemented
        return self.value < other.value

    def __str__(self) -> str:
        return self.name


_COMMENT = re.compile(r"//[^\n]*|/\*.*?\*/", re.DOTALL)
_LABEL = re.compile(r"^\s*[A-Za-z_][A-Za-z0-9_$]*\s*:(?!:)")
_STRING = re.compile(r'"(?:\\.|[^"\\])*"')

_LIVENESS_RE = re.compile(r"\b(?:s_eventually|s_until_with|s_until|s_always|until_with|until|eventually)\b")
_BOUNDED_RE = re.compile(
    r"##|\[\s*\*|\[\s*=|\[\s*->|\[\s*\+\s*\]|\|->|\|=>|\b(?:throughout|within|intersect)\b"
)


def strip_trivia(src: str) -> str:
    """Drop comments, string literals and a leading label."""
    text = _COMMENT.sub(" ", src)
    text = _STRING.sub('""', text)
    return _LABEL.sub("", text, count=1).strip()


def _classify_ops(ops) -> TclClass:
    if ops & LIVENESS_OPS:
        return TclClass.C3
    if ops & BOUNDED_TEMPORAL_OPS:
        return TclClass.C2
    return TclClass.C1


def classify_regex(text: str) -> TclClass:
    text = strip_trivia(text)
    if _LIVENESS_RE.search(text):
        return TclClass.C3
    if _BOUNDED_RE.search(text):
        return TclClass.C2
    return TclClass.C1


def classify(src: str) -> TclClass:
    """Classify one assertion; AST route when it parses, regex route otherwise."""
    if not src or not src.strip():
        raise ClassifyError("empty assertion")
    try:
        ast = parse(src)
    except SvaError:
        text = strip_trivia(src)
        if not text or not re.search(r"[A-Za-z0-9_]", text):
            raise ClassifyError(f"nothing to classify in {src!r}") from None
        return classify_regex(text)
    return _classify_ops(operators(ast))


@dataclass
class Histogram:
    counts: dict = field(default_factory=lambda: {c: 0 for c in TclClass})
    errors: list = field(default_factory=list)  # (row index, message)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def as_dict(self) -> dict:
        return {str(c): n for c, n in self.counts.items()}


def class_histogram(rows) -> Histogram:
    hist = Histogram()
    tally = Counter()
    for i, row in enumerate(rows):
        try:
            tally[classify(row)] += 1
        except ClassifyError as exc:
            hist.errors.append((i, str(exc)))
    for c in TclClass:
        hist.counts[c] = tally[c]
    return hist
