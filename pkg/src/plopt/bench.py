"""Seeded multi-run campaigns, summary statistics and CSV/JSON reports."""

from __future__ import annotations

import csv
import io
import json
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable

from .interleave import run_combined
from .ils import run_ils
from .ledger import DEFAULT_BUDGET, EvaluationLedger, RunOutcome
from .paramless import run_ecga
from .problems import PROBLEMS, ProblemSpec, get_problem
from .seeding import run_seeds, stream
from .sga import PRESETS, SGA2_FOR_PROBLEM, sga_run

FIELDS = ("problem", "algorithm", "mean_evals", "std_evals", "r_ts", "attribution")
FORMATS = ("csv", "json")
MISSING = "---"


def _ils(problem: ProblemSpec, ledger: EvaluationLedger, seed: int) -> RunOutcome:
    run_ils(ledger, stream(seed, "ils"), tag="ils")
    return ledger.outcome()


def _ecga(problem: ProblemSpec, ledger: EvaluationLedger, seed: int) -> RunOutcome:
    run_ecga(ledger, stream(seed, "ecga"), tag="ecga")
    return ledger.outcome()


def _combined(problem: ProblemSpec, ledger: EvaluationLedger, seed: int) -> RunOutcome:
    return run_combined(ledger, seed)


def _sga(preset: Callable[[str], str]):
    def run(problem: ProblemSpec, ledger: EvaluationLedger, seed: int) -> RunOutcome:
        return sga_run(problem, PRESETS[preset(problem.name)], ledger, stream(seed, "sga"))
    return run


ALGORITHMS = {
    "sga1": _sga(lambda name: "sga1"),
    "sga2": _sga(lambda name: SGA2_FOR_PROBLEM[name]),
    "ecga": _ecga,
    "ils": _ils,
    "ils+ecga": _combined,
}


@dataclass(frozen=True)
class ExperimentConfig:
    problem: str
    algorithm: str
    runs: int = 20
    budget: int = DEFAULT_BUDGET
    base_seed: int = 0
    seeds: tuple[int, ...] | None = None
    out: str | None = None
    format: str = "csv"
    workers: int = 1

    def validate(self) -> None:
        get_problem(self.problem)
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; choose from {', '.join(ALGORITHMS)}")
        if self.algorithm == "sga2" and self.problem not in SGA2_FOR_PROBLEM:
            raise ValueError(f"no sga2 preset for problem {self.problem!r}")
        if isinstance(self.runs, bool) or not isinstance(self.runs, int) or self.runs < 1:
            raise ValueError("runs must be a positive integer")
        if isinstance(self.budget, bool) or not isinstance(self.budget, int) or self.budget < 1:
            raise ValueError("budget must be a positive integer")
        if self.seeds is not None:
            if len(self.seeds) != self.runs:
                raise ValueError(f"{len(self.seeds)} seeds given for {self.runs} runs")
            if len(set(self.seeds)) != len(self.seeds):
                raise ValueError("seeds must be distinct")
            if any(s < 0 for s in self.seeds):
                raise ValueError("seeds must be non-negative")
        elif self.base_seed < 0:
            raise ValueError("seed must be non-negative")
        if self.format not in FORMATS:
            raise ValueError(f"unknown format {self.format!r}")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")

    def seed_list(self) -> list[int]:
        return list(self.seeds) if self.seeds is not None else run_seeds(self.base_seed, self.runs)


@dataclass(frozen=True)
class RunRecord:
    problem: str
    algorithm: str
    seed: int
    success: bool
    evaluations_to_target: int | None
    attribution: str | None
    best_objective: float | None
    evaluations_used: int
    wall_time: float = field(default=0.0, compare=False)


@dataclass(frozen=True)
class SummaryRow:
    problem: str
    algorithm: str
    mean_evals: float | None
    std_evals: float | None
    r_ts: int
    attribution: str | None = None

    def as_text(self) -> dict[str, str]:
        def num(v):
            return MISSING if v is None else repr(float(v))
        return {
            "problem": self.problem, "algorithm": self.algorithm,
            "mean_evals": num(self.mean_evals), "std_evals": num(self.std_evals),
            "r_ts": str(self.r_ts), "attribution": self.attribution or "",
        }


def single_run(problem: str, algorithm: str, seed: int, budget: int = DEFAULT_BUDGET) -> RunRecord:
    spec = get_problem(problem)
    ledger = EvaluationLedger(spec, budget)
    start = time.perf_counter()
    out = ALGORITHMS[algorithm](spec, ledger, seed)
    return RunRecord(problem, algorithm, seed, out.success, out.evaluations_to_target,
                     out.attribution, out.best_objective, out.evaluations_used,
                     time.perf_counter() - start)


def _run_args(args):
    return single_run(*args)


def run_experiment(config: ExperimentConfig) -> list[RunRecord]:
    """Run every seed of ``config``; records come back in run order even when run in parallel."""
    config.validate()
    jobs = [(config.problem, config.algorithm, s, config.budget) for s in config.seed_list()]
    if config.workers == 1 or len(jobs) == 1:
        return [_run_args(j) for j in jobs]
    with ProcessPoolExecutor(config.workers) as pool:
        return list(pool.map(_run_args, jobs))


def summarize(records: list[RunRecord], problem: str | None = None,
              algorithm: str | None = None) -> SummaryRow:
    """Mean and sample standard deviation over the successful runs.

    Statistics that cannot be computed (no successes, or a deviation from a
    single success) are None.
    """
    if records:
        problem = problem or records[0].problem
        algorithm = algorithm or records[0].algorithm
    hits = [r.evaluations_to_target for r in records if r.success]
    mean = statistics.fmean(hits) if hits else None
    std = statistics.stdev(hits) if len(hits) > 1 else None
    split = None
    if algorithm == "ils+ecga":
        by = [r.attribution for r in records if r.success]
        split = f"{by.count('ils')}+{by.count('ecga')}"
    return SummaryRow(problem or "", algorithm or "", mean, std, len(hits), split)


def render_report(rows: list[SummaryRow], fmt: str = "csv") -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=FIELDS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(r.as_text() for r in rows)
        return buf.getvalue()
    if fmt == "json":
        return json.dumps([asdict(r) for r in rows], indent=2) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def emit_report(rows: list[SummaryRow], fmt: str, path: str | Path) -> None:
    text = render_report(rows, fmt)
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc.strerror or exc}") from exc


def read_report(path: str | Path) -> list[SummaryRow]:
    """Load a report written by :func:`emit_report`, in either format."""
    text = Path(path).read_text()
    if text.lstrip().startswith("["):
        return [SummaryRow(**row) for row in json.loads(text)]

    def num(v):
        return None if v == MISSING else float(v)
    return [
        SummaryRow(r["problem"], r["algorithm"], num(r["mean_evals"]), num(r["std_evals"]),
                   int(r["r_ts"]), r["attribution"] or None)
        for r in csv.DictReader(io.StringIO(text))
    ]


RECORD_FIELDS = tuple(RunRecord.__dataclass_fields__)


def write_records(records: list[RunRecord], path: str | Path) -> None:
    """Per-run CSV; absent values are left empty."""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=RECORD_FIELDS, lineterminator="\n")
    writer.writeheader()
    for r in records:
        row = asdict(r)
        writer.writerow({k: "" if v is None else repr(v) if isinstance(v, float) else v
                         for k, v in row.items()})
    try:
        Path(path).write_text(buf.getvalue())
    except OSError as exc:
        raise OSError(f"cannot write records to {path}: {exc.strerror or exc}") from exc


def read_records(path: str | Path) -> list[RunRecord]:
    def opt(v, kind):
        return None if v == "" else kind(v)
    return [
        RunRecord(r["problem"], r["algorithm"], int(r["seed"]), r["success"] == "True",
                  opt(r["evaluations_to_target"], int), opt(r["attribution"], str),
                  opt(r["best_objective"], float), int(r["evaluations_used"]), float(r["wall_time"]))
        for r in csv.DictReader(io.StringIO(Path(path).read_text()))
    ]


@dataclass(frozen=True)
class Campaign:
    problems: tuple[str, ...] = tuple(PROBLEMS)
    algorithms: tuple[str, ...] = tuple(ALGORITHMS)
    runs: int = 20
    budget: int = DEFAULT_BUDGET
    base_seed: int = 0
    seeds: tuple[int, ...] | None = None
    out: str | None = None
    format: str = "csv"
    workers: int = 1

    def experiments(self) -> list[ExperimentConfig]:
        configs = [
            ExperimentConfig(p, a, self.runs, self.budget, self.base_seed, self.seeds,
                             self.out, self.format, self.workers)
            for p in self.problems for a in self.algorithms
        ]
        for c in configs:
            c.validate()
        return configs


_LIST_KEYS = {"problems", "algorithms", "seeds"}
_INT_KEYS = {"runs", "budget", "base_seed", "seed", "workers"}


def load_campaign(path: str | Path) -> Campaign:
    """Read a campaign from JSON or from flat ``key=value`` lines (lists comma-separated)."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        raw = json.loads(text)
    else:
        raw = {}
        for n, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{n}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            raw[key] = [v.strip() for v in value.split(",") if v.strip()] if key in _LIST_KEYS else value
    if "seed" in raw:
        raw["base_seed"] = raw.pop("seed")
    known = set(Campaign.__dataclass_fields__)
    unknown = set(raw) - known
    if unknown:
        raise ValueError(f"unknown campaign keys: {', '.join(sorted(unknown))}")
    kwargs = {}
    for key, value in raw.items():
        if key in _LIST_KEYS:
            value = [value] if isinstance(value, (str, int)) else value
            value = tuple(int(v) for v in value) if key == "seeds" else tuple(str(v) for v in value)
        elif key in _INT_KEYS:
            value = _as_int(key, value)
        kwargs[key] = value
    return Campaign(**kwargs)


def _as_int(key: str, value) -> int:
    if isinstance(value, bool):
        raise ValueError(f"{key} must be an integer")
    if isinstance(value, float):
        if not value.is_integer():
            raise ValueError(f"{key} must be an integer")
        return int(value)
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ValueError(f"{key} must be an integer, got {value!r}") from None


def run_campaign(campaign: Campaign, progress: Callable[[SummaryRow], None] | None = None) -> list[SummaryRow]:
    rows = []
    for config in campaign.experiments():
        row = summarize(run_experiment(config), config.problem, config.algorithm)
        rows.append(row)
        if progress:
            progress(row)
    return rows


def fmt_evals(v: float | None) -> str:
    return MISSING if v is None else f"{v:,.0f}"
