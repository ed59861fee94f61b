"""pass@k estimation and bootstrap confidence intervals."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

DEFAULT_REPLICATES = 10_000


@dataclass(frozen=True)
class TaskOutcome:
    task_id: str
    n: int
    c: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"{self.task_id}: n must be at least 1")
        if not 0 <= self.c <= self.n:
            raise ValueError(f"{self.task_id}: need 0 <= c <= n, got c={self.c}, n={self.n}")


def pass_at_k_exact(n: int, c: int, k: int) -> Fraction:
    """``1 - C(n-c, k) / C(n, k)`` as an exact fraction."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if not 0 <= c <= n:
        raise ValueError(f"need 0 <= c <= n, got c={c}, n={n}")
    if n - c < k:
        return Fraction(1)
    # C(n-c, k) / C(n, k) = prod_{i=n-c+1}^{n} (1 - k/i)
    miss = Fraction(1)
    for i in range(n - c + 1, n + 1):
        miss *= Fraction(i - k, i)
    return 1 - miss


def pass_at_k(n: int, c: int, k: int) -> float:
    """Unbiased pass@k estimate for one task with ``c`` of ``n`` samples correct."""
    return float(pass_at_k_exact(n, c, k))


def mean_pass_at_k(tasks, k: int) -> float:
    tasks = list(tasks)
    if not tasks:
        raise ValueError("no tasks")
    return float(sum(pass_at_k_exact(t.n, t.c, k) for t in tasks) / len(tasks))


def bootstrap_ci(
    tasks,
    k: int,
    replicates: int = DEFAULT_REPLICATES,
    seed: int = 0,
    level: float = 0.95,
) -> tuple[float, float]:
    """Percentile interval of mean pass@k under task resampling with replacement."""
    tasks = list(tasks)
    if not tasks:
        raise ValueError("bootstrap needs at least one task")
    if not 0 < level < 1:
        raise ValueError("level must lie in (0, 1)")
    scores = np.array([pass_at_k(t.n, t.c, k) for t in tasks])
    if np.all(scores == scores[0]):
        return float(scores[0]), float(scores[0])
    rng = np.random.default_rng(seed)
    m = len(scores)
    means = np.empty(replicates)
    step = max(1, 2_000_000 // m)
    for start in range(0, replicates, step):
        stop = min(replicates, start + step)
        idx = rng.integers(0, m, size=(stop - start, m))
        means[start:stop] = scores[idx].mean(axis=1)
    tail = (1 - level) / 2 * 100
    lo, hi = np.percentile(means, [tail, 100 - tail])
    return float(lo), float(hi)


def pass_at_k_table(tasks, ks=(1, 5, 10), replicates: int = DEFAULT_REPLICATES, seed: int = 0, level: float = 0.95) -> dict:
    """pass@k with intervals for each ``k`` no larger than the smallest ``n``."""
    tasks = list(tasks)
    if not tasks:
        return {}
    n_min = min(t.n for t in tasks)
    table = {}
    for k in ks:
        if k > n_min:
            continue
        lo, hi = bootstrap_ci(tasks, k, replicates, seed, level)
        table[f"pass@{k}"] = {"estimate": mean_pass_at_k(tasks, k), "ci_low": lo, "ci_high": hi}
    return table
