"""Exhaustive bounded check by bit-parallel enumeration of all traces.

Traces are numbered by reading the signal-major bit string (signals sorted,
cycle 0 first within each signal) as a binary number, most significant bit
first. The search runs in ascending index order, so the counterexample it
reports is the lexicographically smallest one.
"""

from __future__ import annotations

import time

from ..errors import UnsupportedConstruct
from .semantics import Kernel
from .verdict import BmcOutcome, Outcome, TraceAssignment

CHUNK_BITS = 16


def _pattern(weight: int, width: int) -> int:
    """Bitset over ``2**width`` indices whose bit ``weight`` is set."""
    half = 1 << weight
    period = half << 1
    block = ((1 << half) - 1) << half
    reps = ((1 << (1 << width)) - 1) // ((1 << period) - 1)
    return block * reps


def decode(index: int, names: list, depth: int) -> TraceAssignment:
    total = len(names) * depth
    values = {}
    for i, name in enumerate(names):
        bits = []
        for c in range(depth):
            weight = total - 1 - (i * depth + c)
            bits.append(bool((index >> weight) & 1))
        values[name] = tuple(bits)
    return TraceAssignment(values)


def bmc_enumerate(assumed, asserted, names: list, depth: int, max_bits: int, deadline: float | None = None) -> BmcOutcome:
    """FAIL iff some trace satisfies ``assumed`` and violates ``asserted``."""
    start = time.monotonic()
    total = len(names) * depth
    if total > max_bits:
        raise UnsupportedConstruct(
            "capacity", f"{len(names)} signals x {depth} cycles = {total} bits > {max_bits}"
        )
    width = min(total, CHUNK_BITS)
    full = (1 << (1 << width)) - 1
    low_patterns = [_pattern(w, width) for w in range(width)]
    weights = {
        (name, c): total - 1 - (i * depth + c) for i, name in enumerate(names) for c in range(depth)
    }
    for chunk in range(1 << (total - width)):
        if deadline is not None and time.monotonic() > deadline:
            return BmcOutcome(Outcome.TIMEOUT, None, time.monotonic() - start)

        def var(name, c, chunk=chunk):
            w = weights[name, c]
            if w < width:
                return low_patterns[w]
            return full if (chunk >> (w - width)) & 1 else 0

        kernel = Kernel(var, full, depth)
        bad = kernel.always(assumed)
        if bad:
            bad &= ~kernel.always(asserted) & full
        if bad:
            low = (bad & -bad).bit_length() - 1
            index = (chunk << width) | low
            return BmcOutcome(Outcome.FAIL, decode(index, names, depth), time.monotonic() - start)
    return BmcOutcome(Outcome.PASS, None, time.monotonic() - start)
