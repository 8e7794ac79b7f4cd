"""ILS+ECGA: the two optimisers take turns on one evaluation budget.

Each turn lasts until the active method has used at least ``fe_elapsed``
evaluations and has finished its current execution unit (a whole NAHC descent
or a whole generation). ILS moves first. The methods share nothing but the
ledger; each draws from its own random stream.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .ledger import EvaluationLedger, RunOutcome
from .ils import IteratedLocalSearch
from .paramless import ParameterlessECGA
from .seeding import stream

FE_ELAPSED = 500


@dataclass(frozen=True)
class Turn:
    method: str
    evaluations: int
    last_unit: int


@dataclass
class CombinedRun:
    ils: IteratedLocalSearch
    ecga: ParameterlessECGA
    turns: list[Turn] = field(default_factory=list)


def run_combined(ledger: EvaluationLedger, seed: int, fe_elapsed: int = FE_ELAPSED,
                 keep_state: bool = False) -> RunOutcome | tuple[RunOutcome, CombinedRun]:
    if fe_elapsed < 1:
        raise ValueError("fe_elapsed must be at least 1")
    if ledger.used:
        raise ValueError("run_combined needs a fresh ledger")
    ils = IteratedLocalSearch(ledger, stream(seed, "ils"), tag="ils")
    ecga = ParameterlessECGA(ledger, stream(seed, "ecga"), tag="ecga")
    run = CombinedRun(ils, ecga)
    while not ledger.done:
        used = ils.run_slice(fe_elapsed)
        run.turns.append(Turn("ils", used, ils.last_unit_cost))
        if ledger.done:
            break
        if ecga.stalled:
            # ECGA can no longer afford a unit: ILS gets the rest of the budget.
            continue
        used = ecga.run_slice(fe_elapsed)
        run.turns.append(Turn("ecga", used, ecga.last_unit_cost))
    outcome = ledger.outcome()
    return (outcome, run) if keep_state else outcome
