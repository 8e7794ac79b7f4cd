"""Generational simple GA baseline: tournament selection, uniform crossover, bitwise mutation.

Offspring that are untouched copies of their selected parent (pair not
crossed, no bit mutated) inherit the parent's fitness instead of being
evaluated again, unless ``reevaluate_copies`` is set.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .ledger import EvaluationLedger, RunOutcome
from .problems import ProblemSpec, random_genomes
from .selection import tournament_select

log = logging.getLogger("plopt.sga")


@dataclass(frozen=True)
class SgaConfig:
    n: int
    pc: float
    pm: float | None  # None means 1/l
    s: int
    reevaluate_copies: bool = False

    def __post_init__(self):
        if self.n < 2 or self.n % 2:
            raise ValueError("population size must be even and at least 2")
        if not 0 <= self.pc <= 1 or (self.pm is not None and not 0 <= self.pm <= 1):
            raise ValueError("probabilities must lie in [0, 1]")
        if self.s < 1:
            raise ValueError("tournament size must be at least 1")

    def mutation_rate(self, length: int) -> float:
        return 1.0 / length if self.pm is None else self.pm


PRESETS: dict[str, SgaConfig] = {
    "sga1": SgaConfig(n=100, pc=0.6, pm=0.001, s=2),
    "sga2-onemax": SgaConfig(n=30, pc=0.9, pm=0.005, s=2),
    "sga2-himmelblau-uni": SgaConfig(n=100, pc=0.9, pm=0.01, s=2),
    "sga2-himmelblau-4peak": SgaConfig(n=200, pc=0.5, pm=None, s=4),
    "sga2-rastrigin": SgaConfig(n=10_000, pc=0.9, pm=None, s=8),
    "sga2-trap": SgaConfig(n=60_000, pc=0.5, pm=0.0, s=4),
}

SGA2_FOR_PROBLEM = {
    "onemax100": "sga2-onemax",
    "himmelblau-uni": "sga2-himmelblau-uni",
    "himmelblau-4peak": "sga2-himmelblau-4peak",
    "rastrigin10": "sga2-rastrigin",
    "trap4x10": "sga2-trap",
}


def uniform_crossover(a: np.ndarray, b: np.ndarray, rng: np.random.Generator):
    """Swap each position between the two parents with probability 1/2.

    Works row-wise on stacked parents as well as on single genomes.
    """
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise ValueError("parents must have equal length")
    swap = rng.random(a.shape) < 0.5
    return np.where(swap, b, a), np.where(swap, a, b)


def mutate(g: np.ndarray, pm: float, rng: np.random.Generator) -> np.ndarray:
    g = np.asarray(g, dtype=np.uint8)
    if pm <= 0:
        return g.copy()
    return g ^ (rng.random(g.shape) < pm).astype(np.uint8)


def next_generation(pop: np.ndarray, fitness: np.ndarray, config: SgaConfig,
                    rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Selection, pairing of consecutive winners, crossover and mutation.

    Returns the offspring, the index of each offspring's selected parent and
    a mask of offspring that differ from a plain copy of that parent.
    """
    parents = tournament_select(fitness, config.s, rng)
    winners = pop[parents]
    mums, dads = winners[0::2], winners[1::2]
    cross = rng.random(len(mums)) < config.pc
    kids_a, kids_b = uniform_crossover(mums[cross], dads[cross], rng)
    mums[cross], dads[cross] = kids_a, kids_b
    kids = np.empty_like(winners)
    kids[0::2], kids[1::2] = mums, dads
    touched = np.repeat(cross, 2)
    mutated = mutate(kids, config.mutation_rate(pop.shape[1]), rng)
    touched |= (mutated != kids).any(axis=1)
    return mutated, parents, touched


def sga_run(problem: ProblemSpec, config: SgaConfig, ledger: EvaluationLedger,
            rng: np.random.Generator, tag: str | None = "sga") -> RunOutcome:
    """Run until the target is hit, the budget is spent, or the population
    has converged with mutation switched off (it can then never change)."""
    pop = random_genomes(rng, config.n, problem.length)
    fitness = ledger.evaluate_batch(pop, tag)
    generation = 0
    while not ledger.done and len(fitness) == config.n:
        if config.mutation_rate(problem.length) == 0 and (pop == pop[0]).all():
            log.debug("converged without mutation at generation %d", generation)
            break
        kids, parents, touched = next_generation(pop, fitness, config, rng)
        todo = np.arange(config.n) if config.reevaluate_copies else np.flatnonzero(touched)
        values = ledger.evaluate_batch(kids[todo], tag)
        if len(values) < len(todo):
            break
        fitness = fitness[parents]
        fitness[todo] = values
        pop = kids
        generation += 1
        if log.isEnabledFor(logging.DEBUG):
            log.debug("gen=%d evals=%d avg=%.6g best=%s", generation, ledger.used,
                      fitness.mean(), ledger.best_objective)
    return ledger.outcome()
