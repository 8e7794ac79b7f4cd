"""Parameter-less ECGA, iterated local search and their interleaved combination on bitstring benchmarks."""

from .ledger import DEFAULT_BUDGET, BudgetExhausted, EvaluationLedger, RunOutcome
from .problems import PROBLEMS, ProblemSpec, get_problem

__all__ = [
    "DEFAULT_BUDGET", "BudgetExhausted", "EvaluationLedger", "RunOutcome",
    "PROBLEMS", "ProblemSpec", "get_problem",
]

__version__ = "0.1.0"
