"""Iterated local search with adaptive perturbation strength.

Local search is a next-ascent hill climber, the acceptance criterion always
moves to the newest local optimum, and the perturbation flips each allele with
probability ``alpha / l`` where ``alpha`` grows while perturbations keep
falling back into the same optimum.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .ledger import BudgetExhausted, EvaluationLedger
from .problems import random_genomes

log = logging.getLogger("plopt.ils")

_FIRST_CHUNK = 40


class NahcResult(NamedTuple):
    genome: np.ndarray
    value: float  # maximisation fitness
    evaluations: int
    complete: bool


def nahc(start: np.ndarray, value: float, ledger: EvaluationLedger, rng: np.random.Generator,
         tag: str | None = "ils") -> NahcResult:
    """Next-ascent hill climbing from an already evaluated genome.

    Genes are tried one at a time in a freshly drawn random order; the first
    strictly improving flip is kept and the scan restarts with a new order.
    Stops after a full scan without improvement, or when the budget runs out
    (``complete`` is then False).

    Flips are scored in vectorised chunks, but only the flips a sequential
    scan would have reached are charged to the ledger.
    """
    problem = ledger.problem
    objective, sign = problem.objective, problem.sign
    g = np.array(start, dtype=np.uint8)
    f = float(value)
    length = len(g)
    used = 0
    while True:
        order = rng.permutation(length)
        pos, chunk, improved = 0, _FIRST_CHUNK, False
        while pos < length:
            genes = order[pos:pos + chunk]
            n = len(genes)
            trial = np.repeat(g[None, :], n, axis=0)
            trial[np.arange(n), genes] ^= 1
            raw = objective(trial)
            better = sign * raw > f
            i = int(better.argmax())
            if better[i]:
                # Flips before the first improvement are no better than g itself.
                charged = ledger.charge(i, tag)
                if charged == i:
                    charged += ledger.record(trial[i:i + 1], raw[i:i + 1], tag, stop_on_target=False)
                used += charged
                if charged < i + 1:
                    return NahcResult(g, f, used, False)
                g, f = trial[i], float(sign * raw[i])
                improved = True
                break
            charged = ledger.charge(n, tag)
            used += charged
            if charged < n:
                return NahcResult(g, f, used, False)
            pos += n
            chunk *= 2
        if not improved:
            return NahcResult(g, f, used, True)


@dataclass(frozen=True)
class PerturbState:
    length: int
    alpha: float = -1.0

    def __post_init__(self):
        if self.alpha < 0:
            object.__setattr__(self, "alpha", self.base_alpha)

    @property
    def base_alpha(self) -> float:
        return 3.0 if self.length <= 60 else 0.05 * self.length

    @property
    def probability(self) -> float:
        return self.alpha / self.length


def update_alpha(state: PerturbState, unchanged: bool) -> PerturbState:
    """Grow alpha by 0.02*l after a perturbation that fell back into the same optimum, else reset."""
    if unchanged:
        return replace(state, alpha=min(state.alpha + 0.02 * state.length, float(state.length)))
    return replace(state, alpha=state.base_alpha)


def perturb(g: np.ndarray, state: PerturbState, rng: np.random.Generator) -> np.ndarray:
    mask = rng.random(len(g)) < state.probability
    return g ^ mask.astype(np.uint8)


class IlsStep(NamedTuple):
    alpha: float          # strength used for this iteration's perturbation
    flips: int
    nahc_evaluations: int
    objective: float      # raw objective of the accepted optimum
    unchanged: bool


class IteratedLocalSearch:
    def __init__(self, ledger: EvaluationLedger, rng: np.random.Generator,
                 tag: str | None = "ils", keep_history: bool = False):
        self.ledger = ledger
        self.rng = rng
        self.tag = tag
        self.perturbation = PerturbState(ledger.problem.length)
        self.current: np.ndarray | None = None
        self.value = -math.inf
        self.last_unit_cost = 0
        self.history: list[IlsStep] | None = [] if keep_history else None

    @property
    def objective(self) -> float:
        return self.ledger.problem.sign * self.value

    def step(self) -> None:
        """One minimum execution unit: the initial descent, or perturb + NAHC + accept."""
        before = self.ledger.used
        try:
            if self.current is None:
                g = random_genomes(self.rng, 1, self.ledger.problem.length)[0]
                fit = self.ledger.evaluate(g, self.tag)
                res = nahc(g, fit.value, self.ledger, self.rng, self.tag)
                self.current, self.value = res.genome, res.value
                return
            alpha = self.perturbation.alpha
            s = perturb(self.current, self.perturbation, self.rng)
            flips = int((s != self.current).sum())
            fit = self.ledger.evaluate(s, self.tag)
            res = nahc(s, fit.value, self.ledger, self.rng, self.tag)
            unchanged = bool(np.array_equal(res.genome, self.current))
            self.perturbation = update_alpha(self.perturbation, unchanged)
            self.current, self.value = res.genome, res.value
            if self.history is not None:
                self.history.append(IlsStep(alpha, flips, res.evaluations, self.objective, unchanged))
            if log.isEnabledFor(logging.DEBUG):
                log.debug("alpha=%.4g flips=%d nahc_evals=%d objective=%.6g", alpha, flips,
                          res.evaluations, self.objective)
        finally:
            self.last_unit_cost = self.ledger.used - before

    def run_slice(self, slice_budget: float) -> int:
        """Run whole units until ``slice_budget`` evaluations are used; returns the amount used."""
        if slice_budget < 1:
            raise ValueError("slice budget must be at least 1")
        start = self.ledger.used
        while not self.ledger.done:
            try:
                self.step()
            except BudgetExhausted:
                break
            if self.ledger.used - start >= slice_budget:
                break
        return self.ledger.used - start


def run_ils(ledger: EvaluationLedger, rng: np.random.Generator, **kwargs) -> IteratedLocalSearch:
    ils = IteratedLocalSearch(ledger, rng, **kwargs)
    ils.run_slice(math.inf)
    return ils
