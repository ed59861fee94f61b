"""Report figures rendered off-screen with the Agg backend."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def verdict_chart(rep, path) -> Path:
    """Bar chart of verdict labels over every candidate."""
    labels = list(rep.verdict_counts)
    counts = [rep.verdict_counts[k] for k in labels]
    fig, ax = plt.subplots(figsize=(max(5, 1.2 * len(labels)), 3.5))
    ax.bar(range(len(labels)), counts, color="#4c72b0")
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("candidates")
    ax.set_title("Verdict distribution")
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return Path(path)


def per_class_chart(rep, path) -> Path:
    """Strict and relaxed Func@1 side by side for each temporal class."""
    names = list(rep.per_class)
    strict = [rep.per_class[n]["strict"] for n in names]
    relaxed = [rep.per_class[n]["relaxed"] for n in names]
    xs = range(len(names))
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.bar([x - 0.2 for x in xs], strict, width=0.4, label="strict")
    ax.bar([x + 0.2 for x in xs], relaxed, width=0.4, label="relaxed")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(names)
    ax.set_ylim(0, 1)
    ax.set_ylabel(f"Func@1 ({rep.denominator})")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return Path(path)


def render_figures(rep, beside) -> list:
    """Write both figures next to ``beside``, reusing its stem."""
    beside = Path(beside)
    stem = beside.with_suffix("")
    return [
        verdict_chart(rep, f"{stem}_verdicts.png"),
        per_class_chart(rep, f"{stem}_per_class.png"),
    ]
