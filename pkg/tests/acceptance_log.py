"""Shared buffer of acceptance verdict lines, echoed in the pytest summary."""

from __future__ import annotations

LINES: list = []


def record(number: int, status: str, detail: str) -> None:
    line = f"criterion {number}: {status} - {detail}"
    LINES.append(line)
    print(line)
