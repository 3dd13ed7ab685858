"""Command-line interface.

Subcommands:
  run           execute an experiment grid and write JSONL records
  summarize     per-classifier / per-K summary tables from a record stream
  plotdata      per-fold (strategy, classifier, K, fold, auc_pr, r) CSV
  folds         print a fold plan as JSON lines
  metrics       median/sigma/n_valid summary of a scored-fold stream
  stats         compare two record streams / stationarity screening
  synth         write a synthetic dataset CSV
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import classify, folds as folds_mod, metrics as metrics_mod, runner, stats as stats_mod
from .core import (
    ExperimentRecord,
    ScoredFold,
    Strategy,
    read_records_jsonl,
    write_records_jsonl,
)
from .data import (
    DEFAULT_LABEL_COLUMN,
    DEFAULT_TIME_COLUMN,
    SynthConfig,
    load_labeled_csv,
    synthesize,
    write_labeled_csv,
)

logger = logging.getLogger("tscv_bench")

_SYNTH_FIELD_TYPES = {
    "channels": int,
    "length": int,
    "rate_hz": float,
    "ar_coefficient": float,
    "noise_sigma": float,
    "n_fault_zones": int,
    "affected_channel_fraction": float,
    "shift_magnitude": float,
    "seed": int,
}


def _parse_synth_spec(spec: str) -> SynthConfig:
    """Parse 'synth:' dataset specs like synth:seed=3,channels=4,zone=40:200."""
    overrides = {}
    body = spec[len("synth:"):] if spec.startswith("synth:") else spec[len("synth"):]
    for chunk in filter(None, body.split(",")):
        if "=" not in chunk:
            raise SystemExit(f"bad synth parameter {chunk!r}; expected key=value")
        key, value = chunk.split("=", 1)
        key = key.strip()
        if key == "zone_length_range":
            lo, hi = value.split(":")
            overrides[key] = (int(lo), int(hi))
        elif key in _SYNTH_FIELD_TYPES:
            overrides[key] = _SYNTH_FIELD_TYPES[key](value)
        else:
            raise SystemExit(
                f"unknown synth parameter {key!r}; valid: "
                f"{sorted((*_SYNTH_FIELD_TYPES, 'zone_length_range'))}"
            )
    return SynthConfig(**overrides)


def _load_dataset(spec: str, args: argparse.Namespace):
    if spec.startswith("synth"):
        return synthesize(_parse_synth_spec(spec))
    return load_labeled_csv(
        spec,
        time_col=args.time_col,
        label_col=args.label_col,
        rate_hz=args.rate_hz,
    )


def _parse_k_values(text: str) -> tuple[int, ...]:
    if ".." in text:
        lo, hi = text.split("..")
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(part) for part in text.split(","))


def _parse_strategies(text: str) -> tuple[Strategy, ...]:
    return tuple(Strategy.from_token(token) for token in text.split(","))


def _open_out(path: str | None):
    if path is None or path == "-":
        return sys.stdout
    return open(path, "w", encoding="utf-8")


def _add_ingestion_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--time-col", default=DEFAULT_TIME_COLUMN)
    parser.add_argument("--label-col", default=DEFAULT_LABEL_COLUMN)
    parser.add_argument("--rate-hz", type=float, default=100.0)


def _cmd_run(args: argparse.Namespace) -> int:
    datasets = tuple(_load_dataset(spec, args) for spec in args.dataset)
    grid = runner.ExperimentGrid(
        datasets=datasets,
        strategies=_parse_strategies(args.strategies),
        k_values=_parse_k_values(args.k),
        delta=args.delta,
        classifiers=tuple(args.classifiers.split(",")),
        seed=args.seed,
        rocket_kernels=args.rocket_kernels,
        parallelism=args.parallelism,
    )
    records = runner.run_grid(grid)
    write_records_jsonl(records, args.out)
    skipped = sum(1 for r in records if r.skip_reason is not None)
    logger.info(
        "wrote %d records (%d carrying a skip reason) to %s",
        len(records), skipped, args.out,
    )
    return 0


def _cmd_summarize(args: argparse.Namespace) -> int:
    records = read_records_jsonl(args.records)
    tables = runner.summarize(records, per_dataset=args.per_dataset)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for table in tables.values():
        path = out_dir / f"{table.name}.csv"
        path.write_text(table.to_csv(), encoding="utf-8")
        print(path)
    return 0


def _cmd_plotdata(args: argparse.Namespace) -> int:
    records = read_records_jsonl(args.records)
    out = _open_out(args.out)
    out.write(runner.plotdata_csv(records))
    if out is not sys.stdout:
        out.close()
    return 0


def _cmd_folds(args: argparse.Namespace) -> int:
    plan = folds_mod.plan(
        Strategy.from_token(args.strategy),
        args.length,
        args.k,
        args.delta,
        omega=args.omega,
    )
    print(
        json.dumps(
            {
                "strategy": plan.strategy.value,
                "K": plan.k_folds,
                "omega": plan.omega,
                "delta": plan.delta,
            }
        )
    )
    for fold in plan:
        print(json.dumps(fold.to_json()))
    return 0


def _scored_fold_groups(path: str):
    """Yield ((dataset, classifier, strategy, K), ScoredFold) from a JSONL stream.

    Accepts full experiment records or bare scored-fold objects (which fall
    into one anonymous group).
    """
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            if "scored_folds" in obj:
                record = ExperimentRecord.from_json(obj)
                key = (
                    record.dataset_name,
                    record.classifier_id,
                    record.strategy.value,
                    record.k_folds,
                )
                for sf in record.scored_folds:
                    yield key, sf
            else:
                yield ("", "", "", ""), ScoredFold.from_json(obj)


def _cmd_metrics(args: argparse.Namespace) -> int:
    valid_counts: dict[tuple, int] = {}
    pairs = []
    for key, sf in _scored_fold_groups(args.records):
        valid_counts.setdefault(key, 0)
        if sf.valid:
            valid_counts[key] += 1
            pairs.append((key, sf.auc_pr))
    rows = metrics_mod.aggregate(pairs)
    out = _open_out(args.out)
    out.write("dataset_name,classifier_id,strategy,K,median,sigma,n_valid\n")
    for row in rows:
        key_text = ",".join(str(part) for part in row.key)
        out.write(f"{key_text},{row.median},{row.sigma},{valid_counts[row.key]}\n")
    if out is not sys.stdout:
        out.close()
    return 0


def _records_group_values(records, group_by: str):
    groups: dict[object, list[float]] = {}
    for record in records:
        key = {
            "classifier_id": record.classifier_id,
            "K": record.k_folds,
            "strategy": record.strategy.value,
            "dataset_name": record.dataset_name,
        }[group_by]
        values = groups.setdefault(key, [])
        values.extend(sf.auc_pr for sf in record.valid_folds)
    return groups


def _cmd_stats_compare(args: argparse.Namespace) -> int:
    records_a = read_records_jsonl(args.records_a)
    records_b = read_records_jsonl(args.records_b)
    label_a = args.label_a or Path(args.records_a).stem
    label_b = args.label_b or Path(args.records_b).stem
    groups_a = _records_group_values(records_a, args.group_by)
    groups_b = _records_group_values(records_b, args.group_by)
    out = _open_out(args.out)
    out.write("comparison,condition,p_value\n")
    for key in sorted(set(groups_a) | set(groups_b), key=str):
        a, b = groups_a.get(key, []), groups_b.get(key, [])
        if a and b:
            result = stats_mod.mann_whitney_u(a, b, alternative=args.alternative)
            p_text = str(result.p_value)
        else:
            p_text = ""
        out.write(f"{label_a} vs. {label_b},{key},{p_text}\n")
    if out is not sys.stdout:
        out.close()
    return 0


def _cmd_stats_stationarity(args: argparse.Namespace) -> int:
    dataset = _load_dataset(args.dataset, args)
    report = stats_mod.dataset_stationarity(dataset, max_lag=args.max_lag)
    out = _open_out(args.out)
    out.write("channel,adf_stat,adf_reject_5pct,kpss_stat,kpss_reject_5pct\n")

    def cell(value):
        return "" if value is None else str(value)

    for row in report.channels:
        out.write(
            f"{row.channel},{cell(row.adf_stat)},{cell(row.adf_reject_5pct)},"
            f"{cell(row.kpss_stat)},{cell(row.kpss_reject_5pct)}\n"
        )
    if out is not sys.stdout:
        out.close()
    logger.info(
        "dataset %s overall_nonstationary=%s",
        dataset.name, report.overall_nonstationary,
    )
    return 0


def _cmd_synth(args: argparse.Namespace) -> int:
    config = SynthConfig(
        channels=args.channels,
        length=args.length,
        rate_hz=args.rate_hz,
        ar_coefficient=args.ar_coefficient,
        noise_sigma=args.noise_sigma,
        n_fault_zones=args.zones,
        zone_length_range=(args.zone_min, args.zone_max),
        affected_channel_fraction=args.affected_fraction,
        shift_magnitude=args.shift,
        seed=args.seed,
    )
    dataset = synthesize(config)
    write_labeled_csv(dataset, args.out)
    logger.info("wrote %s (%d channels x %d samples)", args.out,
                dataset.series.num_channels, dataset.length)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tscv-bench", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment grid")
    run_p.add_argument("--dataset", action="append", required=True,
                       help="CSV path or synth:key=value,... (repeatable)")
    run_p.add_argument("--strategies", default="wf,sw")
    run_p.add_argument("--k", default="3..9", help="K values: '3..9' or '3,5,7'")
    run_p.add_argument("--delta", type=int, default=runner.DEFAULT_DELTA)
    run_p.add_argument("--classifiers", default=",".join(classify.CLASSIFIER_IDS))
    run_p.add_argument("--seed", type=int, default=0)
    run_p.add_argument("--rocket-kernels", type=int,
                       default=classify.DEFAULT_NUM_KERNELS)
    run_p.add_argument("--parallelism", type=int, default=1)
    run_p.add_argument("--out", required=True)
    _add_ingestion_flags(run_p)
    run_p.set_defaults(func=_cmd_run)

    summarize_p = sub.add_parser("summarize", help="summary tables from records")
    summarize_p.add_argument("records")
    summarize_p.add_argument("--out", required=True, help="output directory")
    summarize_p.add_argument("--per-dataset", action="store_true")
    summarize_p.set_defaults(func=_cmd_summarize)

    plot_p = sub.add_parser("plotdata", help="per-fold CSV for plotting")
    plot_p.add_argument("records")
    plot_p.add_argument("--out", default=None)
    plot_p.set_defaults(func=_cmd_plotdata)

    folds_p = sub.add_parser("folds", help="print a fold plan as JSON lines")
    folds_p.add_argument("--strategy", required=True, choices=("wf", "sw"))
    folds_p.add_argument("--length", type=int, required=True)
    folds_p.add_argument("--k", type=int, required=True)
    folds_p.add_argument("--delta", type=int, required=True)
    folds_p.add_argument("--omega", type=int, default=None)
    folds_p.set_defaults(func=_cmd_folds)

    metrics_p = sub.add_parser("metrics", help="summarize a scored-fold stream")
    metrics_p.add_argument("records")
    metrics_p.add_argument("--out", default=None)
    metrics_p.set_defaults(func=_cmd_metrics)

    stats_p = sub.add_parser("stats", help="statistical comparisons")
    stats_sub = stats_p.add_subparsers(dest="stats_command", required=True)

    compare_p = stats_sub.add_parser("compare", help="Mann-Whitney U between two record streams")
    compare_p.add_argument("records_a")
    compare_p.add_argument("records_b")
    compare_p.add_argument("--group-by", default="classifier_id",
                           choices=("classifier_id", "K", "strategy", "dataset_name"))
    compare_p.add_argument("--alternative", default="two_sided",
                           choices=stats_mod.ALTERNATIVES)
    compare_p.add_argument("--label-a", default=None)
    compare_p.add_argument("--label-b", default=None)
    compare_p.add_argument("--out", default=None)
    compare_p.set_defaults(func=_cmd_stats_compare)

    stationarity_p = stats_sub.add_parser("stationarity", help="per-channel ADF/KPSS screen")
    stationarity_p.add_argument("--dataset", required=True)
    stationarity_p.add_argument("--max-lag", type=int, default=None)
    stationarity_p.add_argument("--out", default=None)
    _add_ingestion_flags(stationarity_p)
    stationarity_p.set_defaults(func=_cmd_stats_stationarity)

    synth_p = sub.add_parser("synth", help="write a synthetic dataset CSV")
    defaults = SynthConfig()
    synth_p.add_argument("--channels", type=int, default=defaults.channels)
    synth_p.add_argument("--length", type=int, default=defaults.length)
    synth_p.add_argument("--rate-hz", type=float, default=defaults.rate_hz)
    synth_p.add_argument("--ar-coefficient", type=float, default=defaults.ar_coefficient)
    synth_p.add_argument("--noise-sigma", type=float, default=defaults.noise_sigma)
    synth_p.add_argument("--zones", type=int, default=defaults.n_fault_zones)
    synth_p.add_argument("--zone-min", type=int, default=defaults.zone_length_range[0])
    synth_p.add_argument("--zone-max", type=int, default=defaults.zone_length_range[1])
    synth_p.add_argument("--affected-fraction", type=float,
                         default=defaults.affected_channel_fraction)
    synth_p.add_argument("--shift", type=float, default=defaults.shift_magnitude)
    synth_p.add_argument("--seed", type=int, default=defaults.seed)
    synth_p.add_argument("--out", required=True)
    synth_p.set_defaults(func=_cmd_synth)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        stream=sys.stderr,
    )
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
