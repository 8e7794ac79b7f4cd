"""Parameter-less ECGA.

Selection pressure and sampling rate are fixed (s=4, half of every new
generation sampled from the model, net building-block growth s*(1-pc) = 2).
Population size is removed as a parameter by running populations of size
4, 8, 16, ... side by side, coordinated by a base-``m`` counter that gives
each population ``m`` generations for every generation of the next larger one.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .ledger import BudgetExhausted, EvaluationLedger
from .mpm import greedy_mpm_search, sample_population
from .problems import random_genomes
from .selection import tournament_select

log = logging.getLogger("plopt.ecga")

SELECTION_PRESSURE = 4
SAMPLING_RATE = 0.5
FIRST_SIZE = 4
GENERATIONS_RATIO = 4


@dataclass
class Population:
    genomes: np.ndarray
    fitness: np.ndarray  # maximisation key of each row, from a genuine evaluation
    generation: int = 0
    alive: bool = True

    @property
    def size(self) -> int:
        return len(self.genomes)

    @property
    def average(self) -> float:
        return float(self.fitness.mean())

    @property
    def converged(self) -> bool:
        return bool((self.genomes == self.genomes[0]).all())


def ecga_generation(pop: Population, ledger: EvaluationLedger, rng: np.random.Generator,
                    s: int = SELECTION_PRESSURE, pc: float = SAMPLING_RATE,
                    tag: str | None = "ecga") -> Population:
    """One ECGA generation on ``pop``; the input population is left untouched.

    Every slot of the next generation independently either receives a fresh
    model sample (evaluated) or keeps the slot's selected winner with its
    stored fitness. Raises :class:`BudgetExhausted`, without evaluating
    anything, if the fresh samples do not fit in the remaining budget.
    """
    winners = tournament_select(pop.fitness, s, rng)
    genomes = pop.genomes[winners]
    fitness = pop.fitness[winners]
    model = greedy_mpm_search(genomes)
    fresh = rng.random(pop.size) < pc
    n_fresh = int(fresh.sum())
    if n_fresh > ledger.remaining:
        raise BudgetExhausted(f"generation needs {n_fresh} evaluations, {ledger.remaining} left")
    samples = sample_population(model, n_fresh, rng)
    values = ledger.evaluate_batch(samples, tag)
    if len(values) < n_fresh:
        # Stopped at the target; the run is over, keep the last full generation.
        return pop
    genomes[fresh] = samples
    fitness[fresh] = values
    return Population(genomes, fitness, pop.generation + 1)


class ParameterlessECGA:
    def __init__(self, ledger: EvaluationLedger, rng: np.random.Generator,
                 ratio: int = GENERATIONS_RATIO, tag: str | None = "ecga"):
        if ratio < 2:
            raise ValueError("generations ratio must be at least 2")
        self.ledger = ledger
        self.rng = rng
        self.ratio = ratio
        self.tag = tag
        self.populations: list[Population] = []
        self.counter = 0
        self.stalled = False
        self.last_unit_cost = 0

    def _scheduled_index(self, c: int) -> int:
        k = 1
        while c % self.ratio == 0:
            c //= self.ratio
            k += 1
        return k

    def advance(self) -> int:
        """Tick the counter to the next live (or not yet created) population.

        Returns its 1-based index, creating and evaluating the population if
        the index is new. Destroyed populations are skipped.
        """
        first = next((k for k, p in enumerate(self.populations, 1) if p.alive),
                     len(self.populations) + 1)
        stride = self.ratio ** (first - 1)
        c = (self.counter // stride + 1) * stride
        while True:
            k = self._scheduled_index(c)
            if k > len(self.populations) or self.populations[k - 1].alive:
                break
            c += stride
        if k > len(self.populations):
            self._spawn(k)
        self.counter = c
        return k

    def _spawn(self, k: int) -> None:
        size = FIRST_SIZE * 2 ** (k - 1)
        if size > self.ledger.remaining:
            raise BudgetExhausted(f"population of {size} does not fit in {self.ledger.remaining}")
        genomes = random_genomes(self.rng, size, self.ledger.problem.length)
        fitness = self.ledger.evaluate_batch(genomes, self.tag)
        if len(fitness) < size:
            # Target found while initialising; nothing more will run.
            fitness = np.concatenate([fitness, np.full(size - len(fitness), -np.inf)])
        self.populations.append(Population(genomes, fitness))
        self._trace(k)

    def eliminate(self) -> None:
        """Destroy converged populations and those beaten on average by a larger one."""
        alive = [p for p in self.populations if p.alive]
        doomed = []
        for i, p in enumerate(alive):
            if p.converged or any(q.average > p.average for q in alive[i + 1:]):
                doomed.append(p)
        for p in doomed:
            p.alive = False

    def step(self) -> int:
        """Run one minimum execution unit: a spawn or a full generation."""
        before = self.ledger.used
        n = len(self.populations)
        k = self.advance()
        if len(self.populations) == n:
            pop = self.populations[k - 1]
            self.populations[k - 1] = ecga_generation(pop, self.ledger, self.rng, tag=self.tag)
            self._trace(k)
        self.eliminate()
        self.last_unit_cost = self.ledger.used - before
        return k

    def run_slice(self, slice_budget: float) -> int:
        """Run whole units until ``slice_budget`` evaluations are used; returns the amount used."""
        if slice_budget < 1:
            raise ValueError("slice budget must be at least 1")
        start = self.ledger.used
        while not (self.ledger.done or self.stalled):
            try:
                self.step()
            except BudgetExhausted:
                self.stalled = True
                break
            if self.ledger.used - start >= slice_budget:
                break
        return self.ledger.used - start

    def _trace(self, k: int) -> None:
        if log.isEnabledFor(logging.DEBUG):
            p = self.populations[k - 1]
            log.debug("pop=%d size=%d gen=%d evals=%d avg=%.6g best=%s", k, p.size, p.generation,
                      self.ledger.used, p.average, self.ledger.best_objective)


def run_ecga(ledger: EvaluationLedger, rng: np.random.Generator, **kwargs) -> ParameterlessECGA:
    ecga = ParameterlessECGA(ledger, rng, **kwargs)
    ecga.run_slice(math.inf)
    return ecga
