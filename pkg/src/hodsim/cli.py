"""Command-line front door: run, sweep, compare, validate.

Every number printed to the terminal also lands in an emitted CSV, and all
output files are byte-for-byte reproducible for identical invocations.
Config overrides use dot paths (--set strategy.parameter=0.5) so the JSON
document stays the single source of truth.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from .engine import events_csv, run_simulation
from .metrics import RunMetrics, SweepReport, run_metrics, sweep, sweep_csv
from .scenario import (
    ScenarioConfig,
    ScenarioError,
    default_document,
    load_scenario,
    parse_scenario,
    validate,
)

METRICS_SCHEMA = "# hodsim metrics schema v1"
METRICS_HEADER = "mt,nb_ho,mean_score"
SWEEP_HEADER_BODY = "value,runs,mean_ho_rate,worst_ho,ci_low,ci_high,mean_score_rate"

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2

STRATEGY_NAMES = {
    "none": "none",
    "hysteresis": "hysteresis",
    "waiting": "waiting_time",
    "randomized": "randomized_wait",
}
DEFAULT_VALUE_GRIDS = {
    "hysteresis": "0:1:0.05",
    "waiting_time": "0:10:0.5",
    "randomized_wait": "0:10:0.5",
}


def parse_values(grid: str) -> List[float]:
    """Inclusive start:stop:step grid, e.g. 0:1:0.05 gives 21 values."""
    try:
        start, stop, step = (float(p) for p in grid.split(":"))
    except ValueError as exc:
        raise ScenarioError(f"--values: expected start:stop:step, got {grid!r}") from exc
    if step <= 0 or stop < start:
        raise ScenarioError(f"--values: need step > 0 and stop >= start in {grid!r}")
    values = []
    i = 0
    while True:
        v = round(start + i * step, 10)
        if v > stop + 1e-9:
            break
        values.append(v)
        i += 1
    return values


def apply_override(document: dict, assignment: str) -> None:
    """Apply one key=value override onto the raw config document.

    The dot path must reference an existing key (list indices allowed), so a
    typo cannot silently create a new field.  The value is parsed as JSON
    when possible, else kept as a string.
    """
    if "=" not in assignment:
        raise ScenarioError(f"--set: expected key=value, got {assignment!r}")
    path, raw_value = assignment.split("=", 1)
    try:
        value = json.loads(raw_value)
    except json.JSONDecodeError:
        value = raw_value
    node = document
    parts = path.split(".")
    for i, part in enumerate(parts):
        last = i == len(parts) - 1
        if isinstance(node, list):
            try:
                idx = int(part)
                node[idx]
            except (ValueError, IndexError) as exc:
                raise ScenarioError(f"--set {path}: bad list index {part!r}") from exc
            if last:
                node[idx] = value
            else:
                node = node[idx]
        elif isinstance(node, dict):
            if part not in node:
                raise ScenarioError(f"--set {path}: unknown config key {part!r}")
            if last:
                node[part] = value
            else:
                node = node[part]
        else:
            raise ScenarioError(f"--set {path}: {part!r} is not a container")


def _load_document(args: argparse.Namespace) -> dict:
    if args.config is None:
        doc = default_document()
    else:
        path = Path(args.config)
        if not path.exists():
            raise ScenarioError(f"--config: no such file {args.config!r}")
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"parse error in {args.config}: {exc}") from exc
        if not isinstance(doc, dict):
            raise ScenarioError("parse error: top-level value must be an object")
    for assignment in args.set or []:
        apply_override(doc, assignment)
    return doc


def _seeds(args: argparse.Namespace, config: ScenarioConfig) -> List[int]:
    if getattr(args, "seed", None) is not None and getattr(args, "seeds", None):
        raise ScenarioError("use either --seed or --seeds, not both")
    if getattr(args, "seed", None) is not None:
        return [args.seed]
    if getattr(args, "seeds", None):
        try:
            return [int(s) for s in args.seeds.split(",") if s.strip() != ""]
        except ValueError as exc:
            raise ScenarioError(f"--seeds: expected comma-separated integers, got {args.seeds!r}") from exc
    return [config.rng_seed]


def _write(out_dir: Path, name: str, content: str) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    with open(path, "w", newline="") as fh:
        fh.write(content)
    return path


def metrics_csv(rm: RunMetrics) -> str:
    """Per-terminal breakdown plus an ALL summary row holding the run means."""
    lines = [METRICS_SCHEMA, METRICS_HEADER]
    for mt in sorted(rm.nb_ho):
        lines.append(f"{mt},{rm.nb_ho[mt]},{rm.mt_score[mt]!r}")
    lines.append(f"ALL,{rm.ho_rate!r},{rm.score_rate!r}")
    return "\n".join(lines) + "\n"


def recommend(report: SweepReport, retention: float) -> Optional[Tuple[float, int, float]]:
    """Smallest-worst-case value whose score rate keeps at least ``retention``
    of the zero-parameter baseline; ties go to the smaller parameter."""
    baseline = next((r for r in report.rows if r.value == 0.0), None)
    if baseline is None:
        return None
    floor = retention * baseline.mean_score_rate
    eligible = [r for r in report.rows if r.mean_score_rate >= floor]
    if not eligible:
        return None
    chosen = min(eligible, key=lambda r: (r.worst_ho, r.value))
    return (chosen.value, chosen.worst_ho, chosen.mean_score_rate)


def cmd_run(args: argparse.Namespace) -> int:
    document = _load_document(args)
    config = load_scenario(document)
    out_dir = Path(args.out)
    seeds = _seeds(args, config)
    _write(out_dir, "scenario.json", json.dumps(document, indent=2) + "\n")
    for seed in seeds:
        log = run_simulation(config, seed)
        rm = run_metrics(log)
        _write(out_dir, f"events_s{seed}.csv", events_csv(log))
        _write(out_dir, f"metrics_s{seed}.csv", metrics_csv(rm))
        print(f"seed {seed}: HO_rate {rm.ho_rate!r} Score_rate {rm.score_rate!r}")
    return EXIT_OK


def _sweep_choice(args: argparse.Namespace, config: ScenarioConfig,
                strategy_arg: Optional[str], values_arg: Optional[str]) -> Tuple[str, List[float]]:
    if strategy_arg is not None:
        kind = STRATEGY_NAMES[strategy_arg]
    elif config.strategy.kind != "none":
        kind = config.strategy.kind
    else:
        kind = "hysteresis"
    if kind == "none":
        raise ScenarioError("--strategy: cannot sweep the parameterless 'none' strategy")
    values = parse_values(values_arg or DEFAULT_VALUE_GRIDS[kind])
    if 0.0 not in values:
        # the zero row doubles as the no-strategy baseline for retention
        values = [0.0] + values
    return kind, values


def cmd_sweep(args: argparse.Namespace) -> int:
    config = load_scenario(_load_document(args))
    kind, values = _sweep_choice(args, config, args.strategy, args.values)
    seeds = _seeds(args, config)
    report = sweep(config, kind, values, seeds)
    out_dir = Path(args.out)
    path = _write(out_dir, f"sweep_{kind}.csv", sweep_csv(report))
    pick = recommend(report, args.retention)
    print(f"sweep {kind}: {len(report.rows)} values x {len(seeds)} seeds -> {path}")
    if pick is None:
        print(f"no value keeps {args.retention:.0%} of the baseline score rate")
    else:
        value, worst, score = pick
        print(f"recommended {kind} parameter {value!r} "
              f"(worst-case HO count {worst}, mean score rate {score!r}, "
              f"retention floor {args.retention:.0%})")
    return EXIT_OK


def compare_sweeps(config: ScenarioConfig,
                   plan_a: Tuple[str, Sequence[float]],
                   plan_b: Tuple[str, Sequence[float]],
                   seeds_a: Sequence[int], seeds_b: Sequence[int]) -> Tuple[SweepReport, SweepReport]:
    """Run both sweeps on identical seeds; refuses mismatched seed lists
    because the comparison is paired run-for-run."""
    if list(seeds_a) != list(seeds_b):
        raise ScenarioError("compare: seed lists must match for a paired comparison")
    report_a = sweep(config, plan_a[0], plan_a[1], seeds_a)
    report_b = sweep(config, plan_b[0], plan_b[1], seeds_b)
    return report_a, report_b


def compare_csv(report_a: SweepReport, report_b: SweepReport) -> str:
    lines = ["# hodsim compare schema v1", "strategy," + SWEEP_HEADER_BODY]
    for report in (report_a, report_b):
        for r in report.rows:
            lines.append(",".join([
                report.strategy_kind, repr(r.value), str(r.runs), repr(r.mean_ho_rate),
                str(r.worst_ho), repr(r.ci_low), repr(r.ci_high), repr(r.mean_score_rate),
            ]))
    return "\n".join(lines) + "\n"


def _best_at_retention(report: SweepReport, retention: float) -> Optional[Tuple[float, float]]:
    baseline = next((r for r in report.rows if r.value == 0.0), None)
    if baseline is None:
        return None
    floor = retention * baseline.mean_score_rate
    eligible = [r for r in report.rows if r.mean_score_rate >= floor]
    if not eligible:
        return None
    chosen = min(eligible, key=lambda r: (r.mean_ho_rate, r.value))
    return (chosen.value, chosen.mean_ho_rate)


def cmd_compare(args: argparse.Namespace) -> int:
    config = load_scenario(_load_document(args))
    kind_a, values_a = _sweep_choice(args, config, args.strategy_a, args.values_a)
    kind_b, values_b = _sweep_choice(args, config, args.strategy_b, args.values_b)
    if kind_a == kind_b:
        print("note: comparing a strategy against itself", file=sys.stderr)
    seeds = _seeds(args, config)
    report_a, report_b = compare_sweeps(config, (kind_a, values_a), (kind_b, values_b), seeds, seeds)
    out_dir = Path(args.out)
    path = _write(out_dir, f"compare_{kind_a}_vs_{kind_b}.csv", compare_csv(report_a, report_b))
    print(f"compare {kind_a} vs {kind_b} on seeds {','.join(str(s) for s in seeds)} -> {path}")
    best_a = _best_at_retention(report_a, args.retention)
    best_b = _best_at_retention(report_b, args.retention)
    if best_a is None or best_b is None:
        print(f"no value keeps {args.retention:.0%} of the baseline score rate for both strategies")
        return EXIT_OK
    (va, ha), (vb, hb) = best_a, best_b
    print(f"{kind_a}: mean HO_rate {ha!r} at parameter {va!r}")
    print(f"{kind_b}: mean HO_rate {hb!r} at parameter {vb!r}")
    if ha < hb:
        print(f"{kind_a} attains the lower mean HO_rate at matched score retention")
    elif hb < ha:
        print(f"{kind_b} attains the lower mean HO_rate at matched score retention")
    else:
        print("both strategies attain the same mean HO_rate at matched score retention")
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    config = parse_scenario(_load_document(args))
    violations = validate(config)
    if violations:
        for v in violations:
            print(v, file=sys.stderr)
        return EXIT_CONFIG
    print("configuration valid")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hodsim",
                                     description="WLAN handover decision simulator")
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", default=None, help="scenario JSON (default: built-in scenario)")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a config field by dot path (repeatable)")

    def outputs(p: argparse.ArgumentParser) -> None:
        p.add_argument("--out", default="out", help="output directory (default: ./out)")
        p.add_argument("--seed", type=int, default=None, help="single run seed")
        p.add_argument("--seeds", default=None, help="comma-separated seed list")

    p_run = sub.add_parser("run", help="execute single runs and write event/metric CSVs")
    common(p_run)
    outputs(p_run)
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="sweep a strategy parameter grid")
    common(p_sweep)
    outputs(p_sweep)
    p_sweep.add_argument("--strategy", choices=sorted(STRATEGY_NAMES), default=None)
    p_sweep.add_argument("--values", default=None, metavar="START:STOP:STEP")
    p_sweep.add_argument("--retention", type=float, default=0.95,
                         help="score-rate retention floor for the recommendation (default 0.95)")
    p_sweep.set_defaults(func=cmd_sweep)

    p_cmp = sub.add_parser("compare", help="compare two strategies on identical seeds")
    common(p_cmp)
    outputs(p_cmp)
    p_cmp.add_argument("--strategy-a", choices=sorted(STRATEGY_NAMES), required=True)
    p_cmp.add_argument("--strategy-b", choices=sorted(STRATEGY_NAMES), required=True)
    p_cmp.add_argument("--values-a", default=None, metavar="START:STOP:STEP")
    p_cmp.add_argument("--values-b", default=None, metavar="START:STOP:STEP")
    p_cmp.add_argument("--retention", type=float, default=0.95)
    p_cmp.set_defaults(func=cmd_compare)

    p_val = sub.add_parser("validate", help="check a scenario document")
    common(p_val)
    p_val.set_defaults(func=cmd_validate)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
