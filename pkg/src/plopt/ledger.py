"""Evaluation accounting shared by every optimiser.

All fitness evaluations that count towards a run's budget go through an
:class:`EvaluationLedger`. Batched calls behave exactly like the equivalent
sequence of single calls: rows are consumed in order, and consumption stops at
the budget (and, optionally, right after the first target hit).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .problems import Fitness, ProblemSpec, as_bits, evaluate_batch, is_target

DEFAULT_BUDGET = 2_000_000


class BudgetExhausted(Exception):
    """Raised when an evaluation is requested after the budget is spent."""


@dataclass(frozen=True)
class RunOutcome:
    success: bool
    evaluations_to_target: int | None
    attribution: str | None
    evaluations_used: int
    best_objective: float | None
    per_method: dict[str, int] = field(default_factory=dict)


class EvaluationLedger:
    def __init__(self, problem: ProblemSpec, budget: int = DEFAULT_BUDGET):
        if budget < 1:
            raise ValueError("budget must be at least 1")
        self.problem = problem
        self.budget = int(budget)
        self.used = 0
        self.best_value = -np.inf
        self.best_objective: float | None = None
        self.best_genome: np.ndarray | None = None
        self.target_hit_at: int | None = None
        self.attribution: str | None = None
        self.per_method: Counter[str] = Counter()

    @property
    def remaining(self) -> int:
        return self.budget - self.used

    @property
    def exhausted(self) -> bool:
        return self.used >= self.budget

    @property
    def target_hit(self) -> bool:
        return self.target_hit_at is not None

    @property
    def done(self) -> bool:
        return self.target_hit or self.exhausted

    def record(self, pop: np.ndarray, raw: np.ndarray, tag: str | None = None,
               stop_on_target: bool = True) -> int:
        """Account for objectives already computed with the pure evaluator.

        Returns how many leading rows were charged. Rows past the budget, or
        past the first target hit when ``stop_on_target`` is set, are ignored.
        """
        k = min(len(raw), self.remaining)
        if k <= 0:
            return 0
        raw = np.asarray(raw[:k], dtype=float)
        hits = None
        if self.target_hit_at is None:
            hits = np.flatnonzero(is_target(self.problem, raw))
            if hits.size and stop_on_target:
                k = int(hits[0]) + 1
                raw = raw[:k]
        values = self.problem.sign * raw
        i = int(np.argmax(values))
        if values[i] > self.best_value:
            self.best_value = float(values[i])
            self.best_objective = float(raw[i])
            self.best_genome = np.array(pop[i], dtype=np.uint8)
        if hits is not None and hits.size:
            self.target_hit_at = self.used + int(hits[0]) + 1
            self.attribution = tag
        self.used += k
        self.per_method[tag] += k
        return k

    def charge(self, n: int, tag: str | None = None) -> int:
        """Count ``n`` evaluations known to beat neither the best so far nor the target.

        Only valid for results no better than an already recorded evaluation;
        returns how many fit in the budget.
        """
        k = min(n, self.remaining)
        self.used += k
        self.per_method[tag] += k
        return k

    def evaluate(self, genome, tag: str | None = None) -> Fitness:
        if self.exhausted:
            raise BudgetExhausted(f"budget of {self.budget} evaluations spent")
        g = as_bits(genome)
        raw = evaluate_batch(self.problem, g[None, :])
        self.record(g[None, :], raw, tag)
        return Fitness(float(raw[0]), self.problem.sign * float(raw[0]))

    def evaluate_batch(self, pop: np.ndarray, tag: str | None = None,
                       stop_on_target: bool = True) -> np.ndarray:
        """Evaluate rows in order; returns maximisation fitness of the charged prefix."""
        pop = pop[: self.remaining]
        if len(pop) == 0:
            return np.empty(0)
        raw = evaluate_batch(self.problem, pop)
        k = self.record(pop, raw, tag, stop_on_target)
        return self.problem.sign * raw[:k]

    def outcome(self) -> RunOutcome:
        return RunOutcome(
            success=self.target_hit,
            evaluations_to_target=self.target_hit_at,
            attribution=self.attribution,
            evaluations_used=self.used,
            best_objective=self.best_objective,
            per_method={k: v for k, v in self.per_method.items() if k is not None},
        )
