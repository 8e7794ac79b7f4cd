"""Benchmark problems on fixed-length bit strings.

Genomes are 1-D ``uint8`` arrays of 0/1 alleles; populations are 2-D arrays
with one genome per row. Every problem exposes a vectorised objective over a
population so that algorithms can evaluate whole generations at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

BitsLike = Union[str, Sequence[int], np.ndarray]


@dataclass(frozen=True)
class Fitness:
    """Raw objective plus the maximisation key used for all comparisons."""

    raw: float
    value: float


def as_bits(bits: BitsLike) -> np.ndarray:
    if isinstance(bits, str):
        bits = [int(c) for c in bits]
    arr = np.asarray(bits, dtype=np.uint8)
    if arr.size and arr.max() > 1:
        raise ValueError("alleles must be 0 or 1")
    return arr


def random_genomes(rng: np.random.Generator, n: int, length: int) -> np.ndarray:
    return rng.integers(0, 2, size=(n, length), dtype=np.uint8)


def decode_variable(bits: BitsLike, lo: float, hi: float) -> float:
    """Map a big-endian unsigned binary string linearly onto ``[lo, hi]``.

    The all-zero string decodes to ``lo`` and the all-one string to ``hi``.
    """
    arr = as_bits(bits)
    if arr.size == 0:
        raise ValueError("cannot decode a zero-width bit string")
    if not lo < hi:
        raise ValueError(f"empty interval [{lo}, {hi}]")
    width = arr.size
    value = 0
    for b in arr.tolist():
        value = (value << 1) | b
    return lo + value * (hi - lo) / (2**width - 1)


def decode_batch(pop: np.ndarray, n_vars: int, bits: int, lo: float, hi: float) -> np.ndarray:
    """Decode every variable of every row; returns shape ``(n, n_vars)``."""
    weights = (1 << np.arange(bits - 1, -1, -1, dtype=np.int64))
    ints = pop.reshape(pop.shape[0], n_vars, bits).astype(np.int64) @ weights
    return lo + ints * ((hi - lo) / (2**bits - 1))


# Real-valued objectives, usable on their own (e.g. at exact optima).

def himmelblau(x1, x2):
    return (x1**2 + x2 - 11.0) ** 2 + (x1 + x2**2 - 7.0) ** 2


def himmelblau_four_peak(x1, x2):
    return himmelblau(x1, x2) + 0.1 * (x1 - 3.0) ** 2 * (x2 - 2.0) ** 2


def rastrigin(x):
    x = np.asarray(x, dtype=float)
    return 10.0 * x.shape[-1] + np.sum(x**2 - 10.0 * np.cos(2.0 * np.pi * x), axis=-1)


def trap4(u):
    """Fully deceptive 4-bit trap on unitation ``u``."""
    u = np.asarray(u)
    return np.where(u == 4, 4, 3 - u)


@dataclass(frozen=True)
class ProblemSpec:
    name: str
    length: int
    maximize: bool
    target: float
    objective: Callable[[np.ndarray], np.ndarray]
    n_vars: int = 0
    bits: int = 0
    bounds: tuple[float, float] | None = None

    @property
    def sign(self) -> float:
        return 1.0 if self.maximize else -1.0

    def decode(self, pop: np.ndarray) -> np.ndarray:
        if not self.n_vars:
            raise TypeError(f"{self.name} has no real-valued decoding")
        lo, hi = self.bounds
        return decode_batch(np.atleast_2d(pop), self.n_vars, self.bits, lo, hi)


def _onemax(pop):
    return pop.sum(axis=1, dtype=np.int64).astype(float)


def _trap4x10(pop):
    u = pop.reshape(pop.shape[0], -1, 4).sum(axis=2)
    return trap4(u).sum(axis=1).astype(float)


def _real_problem(name, f, n_vars, bits, lo, hi, target):
    def objective(pop):
        x = decode_batch(pop, n_vars, bits, lo, hi)
        return f(x)

    return ProblemSpec(name, n_vars * bits, False, target, objective, n_vars, bits, (lo, hi))


PROBLEMS: dict[str, ProblemSpec] = {
    "onemax100": ProblemSpec("onemax100", 100, True, 100.0, _onemax),
    "himmelblau-uni": _real_problem(
        "himmelblau-uni", lambda x: himmelblau(x[:, 0], x[:, 1]), 2, 12, 0.0, 6.0, 0.001
    ),
    "himmelblau-4peak": _real_problem(
        "himmelblau-4peak", lambda x: himmelblau_four_peak(x[:, 0], x[:, 1]), 2, 13, -6.0, 6.0, 0.001
    ),
    # 13 bits per variable; zero is off-grid so the threshold is 0.01 (best reachable ~1.06e-3).
    "rastrigin10": _real_problem("rastrigin10", rastrigin, 10, 13, -6.0, 6.0, 0.01),
    "trap4x10": ProblemSpec("trap4x10", 40, True, 40.0, _trap4x10),
}


def get_problem(name: str) -> ProblemSpec:
    try:
        return PROBLEMS[name]
    except KeyError:
        raise ValueError(f"unknown problem {name!r}; choose from {sorted(PROBLEMS)}") from None


def _check_length(problem: ProblemSpec, pop: np.ndarray) -> None:
    if pop.shape[-1] != problem.length:
        raise ValueError(
            f"{problem.name} expects genomes of length {problem.length}, got {pop.shape[-1]}"
        )


def evaluate_batch(problem: ProblemSpec, pop: np.ndarray) -> np.ndarray:
    """Raw objective of every row; pure, no evaluation accounting."""
    pop = np.atleast_2d(np.asarray(pop, dtype=np.uint8))
    _check_length(problem, pop)
    return np.asarray(problem.objective(pop), dtype=float)


def evaluate(problem: ProblemSpec, genome: BitsLike) -> Fitness:
    g = as_bits(genome)
    _check_length(problem, g)
    raw = float(evaluate_batch(problem, g[None, :])[0])
    return Fitness(raw, problem.sign * raw)


def is_target(problem: ProblemSpec, raw) -> bool | np.ndarray:
    if problem.maximize:
        return raw >= problem.target
    return raw <= problem.target
