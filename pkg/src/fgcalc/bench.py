"""Timing of free reduction on adversarial inputs."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass

from .words import reduce

# per-letter cost may grow at most this much from one size decade to the next
SCALING_LIMIT = 3.0


@dataclass
class BenchCase:
    name: str
    letters: int
    seconds: float
    result_length: int

    @property
    def throughput(self) -> float:
        return self.letters / self.seconds if self.seconds > 0 else float("inf")


def palindrome(n: int, rank: int = 2, seed: int = 0) -> list[int]:
    """``w w^-1`` with ``len == n`` (n even); reduces to the empty word."""
    rng = random.Random(seed)
    half = [rng.choice((1, -1)) * rng.randint(1, rank) for _ in range(n // 2)]
    return half + [-x for x in reversed(half)]


def random_raw(n: int, rank: int = 2, seed: int = 0) -> list[int]:
    rng = random.Random(seed)
    return [rng.choice((1, -1)) * rng.randint(1, rank) for _ in range(n)]


def time_reduce(raw: list[int], rank: int) -> tuple[float, int]:
    t0 = time.perf_counter()
    w = reduce(raw, rank)
    return time.perf_counter() - t0, len(w)


def run_bench(sizes=(10**5, 10**6, 10**7), rank: int = 2, seed: int = 0) -> tuple[list[BenchCase], list[str]]:
    """Returns the timed cases and a list of scaling violations (empty when linear)."""
    cases: list[BenchCase] = []
    for n in sizes:
        for name, make in (("palindrome", palindrome), ("random", random_raw)):
            raw = make(n, rank, seed)
            secs, out_len = time_reduce(raw, rank)
            cases.append(BenchCase(name, len(raw), secs, out_len))
            del raw
    problems = []
    for name in ("palindrome", "random"):
        series = [c for c in cases if c.name == name]
        for small, big in zip(series, series[1:]):
            ratio = (big.seconds / big.letters) / (small.seconds / small.letters)
            if ratio > SCALING_LIMIT:
                problems.append(
                    f"{name}: per-letter time grew {ratio:.2f}x from {small.letters} to {big.letters} letters"
                )
    return cases, problems
