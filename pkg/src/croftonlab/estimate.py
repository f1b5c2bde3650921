"""Monte Carlo bookkeeping: the universal estimate record and a deterministic
batched evaluation driver.

Batches are assigned split streams by index and merged with a pairwise
variance-combining scheme, so a run is reproducible from (seed, batch plan)
no matter how many worker threads execute it.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .sampling import RandomStream


@dataclass(frozen=True)
class McEstimate:
    """A Monte Carlo result: mean, standard error of the mean, sample count,
    and the seed it is reproducible from. ``rejected`` counts resampled
    degenerate draws; ``flag`` carries estimator-specific diagnostics.
    """

    mean: float
    stderr: float
    samples: int
    seed: int
    rejected: int = 0
    flag: str | None = None


@dataclass(frozen=True)
class RunningStats:
    count: int
    mean: float
    m2: float

    @classmethod
    def from_values(cls, values: np.ndarray) -> "RunningStats":
        values = np.asarray(values, dtype=float)
        n = values.size
        if n == 0:
            return cls(0, 0.0, 0.0)
        mean = float(values.mean())
        return cls(n, mean, float(np.sum((values - mean) ** 2)))

    def merge(self, other: "RunningStats") -> "RunningStats":
        if self.count == 0:
            return other
        if other.count == 0:
            return self
        n = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * other.count / n
        m2 = self.m2 + other.m2 + delta * delta * self.count * other.count / n
        return RunningStats(n, mean, m2)

    def to_estimate(self, seed: int, rejected: int = 0, flag: str | None = None) -> McEstimate:
        if self.count < 2:
            stderr = 0.0
        else:
            stderr = float(np.sqrt(self.m2 / (self.count - 1) / self.count))
        return McEstimate(self.mean, stderr, self.count, seed, rejected, flag)


def pairwise_merge(stats: list[RunningStats]) -> RunningStats:
    """Reduce batch statistics over a fixed pairwise tree (index order)."""
    if not stats:
        return RunningStats(0, 0.0, 0.0)
    level = list(stats)
    while len(level) > 1:
        nxt = [level[i].merge(level[i + 1]) for i in range(0, len(level) - 1, 2)]
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    return level[0]


def batch_sizes(total: int, batches: int) -> list[int]:
    base, extra = divmod(total, batches)
    return [base + (1 if i < extra else 0) for i in range(batches)]


BatchWorker = Callable[[RandomStream, int], tuple[np.ndarray, int]]


def run_batches(
    worker: BatchWorker,
    samples: int,
    stream: RandomStream,
    batches: int = 1,
    threads: int = 1,
    flag: str | None = None,
) -> McEstimate:
    """Evaluate ``worker(substream, count) -> (values, rejected)`` over split
    streams and merge. Identical results for any thread count given the same
    (seed, batches).
    """
    batches = max(1, int(batches))
    sizes = batch_sizes(int(samples), batches)
    subs = stream.splits(batches)

    def one(i: int) -> tuple[RunningStats, int]:
        values, rejected = worker(subs[i], sizes[i])
        return RunningStats.from_values(values), rejected

    if threads > 1 and batches > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, range(batches)))
    else:
        results = [one(i) for i in range(batches)]
    stats = pairwise_merge([r[0] for r in results])
    rejected = sum(r[1] for r in results)
    return stats.to_estimate(stream.seed, rejected, flag)
