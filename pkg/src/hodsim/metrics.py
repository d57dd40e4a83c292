"""Evaluation criteria and the parameter-sweep harness.

Two criteria summarize a run: the handover rate (mean handovers per mobile
terminal) and the score rate (mean over terminals of the per-step mean
combined score of the associated network).  Sweeps rerun the simulation over
a parameter grid and seed list and aggregate worst cases, means, and a
Student-t confidence interval over per-terminal handover counts.
"""

import math
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from scipy import stats

from .engine import EventLog, run_simulation
from .scenario import ScenarioConfig, with_strategy

SWEEP_SCHEMA = "# hodsim sweep schema v1"
SWEEP_HEADER = "value,runs,mean_ho_rate,worst_ho,ci_low,ci_high,mean_score_rate"


@dataclass(frozen=True)
class RunMetrics:
    """Per-run evaluation criteria with the per-terminal breakdown."""

    ho_rate: float
    score_rate: float
    nb_ho: Dict[str, int]
    mt_score: Dict[str, float]


@dataclass(frozen=True)
class SweepRow:
    value: float
    runs: int
    mean_ho_rate: float
    worst_ho: int
    ci_low: float
    ci_high: float
    mean_score_rate: float


@dataclass(frozen=True)
class SweepReport:
    strategy_kind: str
    rows: Tuple[SweepRow, ...]
    # raw per-(value, seed) metrics in sweep order, for paired comparisons
    runs: Dict[float, Tuple[RunMetrics, ...]]


def nb_steps(sim_time: float, decision_step: float) -> int:
    """Number of decision steps in a run; the division must be exact."""
    if decision_step <= 0:
        raise ValueError("decision_step must be > 0")
    ratio = sim_time / decision_step
    if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
        raise ValueError(f"sim_time {sim_time!r} is not a multiple of decision_step {decision_step!r}")
    return int(round(ratio))


def ho_rate(log: EventLog) -> float:
    """Mean handover count over the run's mobile terminals."""
    if not log.mt_ids:
        raise ValueError("event log covers no mobile terminals")
    return sum(log.nb_ho[m] for m in log.mt_ids) / len(log.mt_ids)


def score_rate(log: EventLog) -> float:
    """Mean over terminals of the per-step mean associated-network score."""
    if not log.mt_ids:
        raise ValueError("event log covers no mobile terminals")
    steps = log.nb_steps
    total = 0.0
    for m in log.mt_ids:
        outcomes = log.outcomes[m]
        if len(outcomes) != steps:
            raise ValueError(f"terminal {m}: {len(outcomes)} outcomes, expected {steps}")
        total += sum(o.c_asso for o in outcomes) / steps
    return total / len(log.mt_ids)


def run_metrics(log: EventLog) -> RunMetrics:
    steps = log.nb_steps
    per_mt_score = {
        m: sum(o.c_asso for o in log.outcomes[m]) / steps for m in log.mt_ids
    }
    return RunMetrics(
        ho_rate=ho_rate(log),
        score_rate=score_rate(log),
        nb_ho=dict(log.nb_ho),
        mt_score=per_mt_score,
    )


def confidence_interval(samples: Sequence[float], level: float = 0.95) -> Tuple[float, float]:
    """Student-t interval for the mean: mean +- t_{(1+level)/2, n-1} * s/sqrt(n)."""
    n = len(samples)
    if n < 2:
        raise ValueError("confidence interval needs at least 2 samples")
    mean = sum(samples) / n
    var = sum((x - mean) ** 2 for x in samples) / (n - 1)
    half = float(stats.t.ppf((1.0 + level) / 2.0, n - 1)) * math.sqrt(var / n)
    return (mean - half, mean + half)


def sweep(config: ScenarioConfig, strategy_kind: str, values: Sequence[float],
          seeds: Sequence[int]) -> SweepReport:
    """Run |values| x |seeds| simulations and aggregate per parameter value.

    Worst case is the maximum per-terminal handover count over all runs of a
    value; the confidence interval is over per-terminal counts pooled across
    the value's runs, matching how per-terminal variability is reported.
    """
    if not values:
        raise ValueError("values must be non-empty")
    if not seeds:
        raise ValueError("seeds must be non-empty")
    rows: List[SweepRow] = []
    raw: Dict[float, Tuple[RunMetrics, ...]] = {}
    for value in values:
        cfg = with_strategy(config, strategy_kind, value)
        per_seed: List[RunMetrics] = []
        for seed in seeds:
            try:
                per_seed.append(run_metrics(run_simulation(cfg, seed)))
            except Exception as exc:
                raise RuntimeError(f"run failed for value={value!r} seed={seed}: {exc}") from exc
        pooled_counts = [float(c) for rm in per_seed for c in rm.nb_ho.values()]
        if len(pooled_counts) >= 2:
            ci_low, ci_high = confidence_interval(pooled_counts)
        else:
            ci_low = ci_high = pooled_counts[0]
        rows.append(SweepRow(
            value=float(value),
            runs=len(per_seed),
            mean_ho_rate=sum(rm.ho_rate for rm in per_seed) / len(per_seed),
            worst_ho=max(c for rm in per_seed for c in rm.nb_ho.values()),
            ci_low=ci_low,
            ci_high=ci_high,
            mean_score_rate=sum(rm.score_rate for rm in per_seed) / len(per_seed),
        ))
        raw[float(value)] = tuple(per_seed)
    return SweepReport(strategy_kind=strategy_kind, rows=tuple(rows), runs=raw)


def sweep_csv(report: SweepReport) -> str:
    lines = [SWEEP_SCHEMA, SWEEP_HEADER]
    for r in report.rows:
        lines.append(",".join([
            repr(r.value), str(r.runs), repr(r.mean_ho_rate), str(r.worst_ho),
            repr(r.ci_low), repr(r.ci_high), repr(r.mean_score_rate),
        ]))
    return "\n".join(lines) + "\n"
