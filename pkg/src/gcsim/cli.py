"""Experiment runner CLI.

Subcommands:
  run        execute a config (TOML preset or a previously written manifest)
  summarize  per-scheme stats and improvement fractions from a records CSV
  plot       render a figure (with a numeric sidecar) from a records CSV
  verify     run the built-in property checks

Exit codes: 0 success, 1 failed checks, 2 parse/schema problems,
3 configuration-invariant violations.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import checks, plots
from .errors import ConfigurationError, GcsimError, SchemaError
from .latency import LatencyParams
from .records import (
    read_records_csv,
    summarize_rows,
    summarize_records,
    write_json,
    write_records_csv,
)
from .simulator import SCHEMES, ExperimentConfig, run_experiment
from .trainer import generate_synthetic, train, write_training_csv

VERSION = "0.1.0"

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_PARSE = 2
EXIT_INVARIANT = 3

_SECTIONS = ("workers", "latency", "simulation", "trainer")
_SECTION_FIELDS = {
    "workers": ("count", "clusters", "load", "memberships"),
    "latency": ("mu_slow", "mu_fast", "alpha", "switch_prob"),
    "simulation": (
        "iterations",
        "seeds",
        "master_seed",
        "initial_slow_count",
        "initial_slow_ids",
        "ssi_mode",
        "schemes",
    ),
    "trainer": ("enabled", "train_size", "test_size", "model_dim", "learning_rate"),
}


def _coerce(text: str):
    lowered = text.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    if "," in text:
        return [item.strip() for item in text.split(",") if item.strip()]
    return text


def apply_overrides(raw: dict, overrides: list[str]) -> dict:
    """Apply ``--set key=value`` items; bare keys match a unique section."""
    for item in overrides:
        if "=" not in item:
            raise SchemaError(f"override {item!r} is not key=value")
        key, _, value = item.partition("=")
        key = key.strip()
        if "." in key:
            section, _, field = key.partition(".")
            raw.setdefault(section, {})[field] = _coerce(value)
            continue
        owners = [s for s in _SECTIONS if key in _SECTION_FIELDS[s]]
        if len(owners) != 1:
            raise SchemaError(
                f"override key {key!r} is {'ambiguous' if owners else 'unknown'}; "
                f"use section.key"
            )
        raw.setdefault(owners[0], {})[key] = _coerce(value)
    return raw


def config_from_mapping(raw: dict, name: str) -> ExperimentConfig:
    workers = raw.get("workers", {})
    lat = raw.get("latency", {})
    sim = raw.get("simulation", {})
    tr = raw.get("trainer", {})
    try:
        latency_params = LatencyParams(
            mu_slow=float(lat["mu_slow"]),
            mu_fast=float(lat["mu_fast"]),
            alpha=float(lat["alpha"]),
            switch_prob=float(lat["switch_prob"]),
        )
        slow_ids = sim.get("initial_slow_ids")
        config = ExperimentConfig(
            num_workers=int(workers["count"]),
            num_clusters=int(workers["clusters"]),
            load=int(workers["load"]),
            memberships=int(workers["memberships"]),
            iterations=int(sim["iterations"]),
            latency=latency_params,
            initial_slow_count=(
                int(sim["initial_slow_count"]) if "initial_slow_count" in sim else None
            ),
            initial_slow_ids=tuple(int(k) for k in slow_ids) if slow_ids else None,
            ssi_mode=str(sim.get("ssi_mode", "previous")),
            schemes=tuple(sim.get("schemes", SCHEMES)),
            master_seed=int(sim.get("master_seed", 0)),
            num_seeds=int(sim.get("seeds", 1)),
            trainer_enabled=bool(tr.get("enabled", False)),
            train_size=int(tr.get("train_size", 2000)),
            test_size=int(tr.get("test_size", 400)),
            model_dim=int(tr.get("model_dim", 1000)),
            learning_rate=float(tr.get("learning_rate", 0.1)),
            name=str(raw.get("name", name)),
        )
    except KeyError as exc:
        raise SchemaError(f"missing config field {exc.args[0]!r}") from exc
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"bad config value: {exc}") from exc
    return config


def config_to_mapping(config: ExperimentConfig) -> dict:
    mapping = {
        "name": config.name,
        "workers": {
            "count": config.num_workers,
            "clusters": config.num_clusters,
            "load": config.load,
            "memberships": config.memberships,
        },
        "latency": {
            "mu_slow": config.latency.mu_slow,
            "mu_fast": config.latency.mu_fast,
            "alpha": config.latency.alpha,
            "switch_prob": config.latency.switch_prob,
        },
        "simulation": {
            "iterations": config.iterations,
            "seeds": config.num_seeds,
            "master_seed": config.master_seed,
            "ssi_mode": config.ssi_mode,
            "schemes": list(config.schemes),
        },
        "trainer": {
            "enabled": config.trainer_enabled,
            "train_size": config.train_size,
            "test_size": config.test_size,
            "model_dim": config.model_dim,
            "learning_rate": config.learning_rate,
        },
    }
    if config.initial_slow_count is not None:
        mapping["simulation"]["initial_slow_count"] = config.initial_slow_count
    if config.initial_slow_ids is not None:
        mapping["simulation"]["initial_slow_ids"] = list(config.initial_slow_ids)
    return mapping


def load_config_file(path) -> dict:
    text = None
    try:
        with open(path, "rb") as fh:
            head = fh.read(1)
            fh.seek(0)
            if head == b"{":
                manifest = json.load(fh)
                if "config" not in manifest:
                    raise SchemaError(f"{path}: JSON input must be a run manifest")
                return manifest["config"]
            return tomllib.load(fh)
    except FileNotFoundError:
        raise SchemaError(f"config file not found: {path}")
    except tomllib.TOMLDecodeError as exc:
        raise SchemaError(f"{path}: {exc}")
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}:{exc.lineno}: {exc.msg}")


def cmd_run(args) -> int:
    from pathlib import Path

    try:
        raw = load_config_file(args.config)
        raw = apply_overrides(raw, args.set or [])
        config = config_from_mapping(raw, Path(args.config).stem)
        if args.seeds is not None:
            config = config.__class__(**{**config.__dict__, "num_seeds": args.seeds})
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        config.validate()
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = config.name
    started = time.time()
    result = run_experiment(config, parallel=args.parallel)

    records_path = out_dir / f"{stem}_records.csv"
    summary_path = out_dir / f"{stem}_summary.json"
    manifest_path = out_dir / f"{stem}_manifest.json"
    write_records_csv(records_path, result.records)
    write_json(summary_path, summarize_records(result.records))
    outputs = [str(records_path), str(summary_path)]

    if config.trainer_enabled:
        dataset = generate_synthetic(
            config.train_size, config.test_size, config.model_dim, config.master_seed
        )
        training = train(config, dataset)
        training_path = out_dir / f"{stem}_training.csv"
        write_training_csv(training_path, training)
        outputs.append(str(training_path))

    if args.debug_placements:
        _dump_placements(config, args.debug_placements)
        outputs.append(args.debug_placements)

    write_json(
        manifest_path,
        {
            "config": config_to_mapping(config),
            "master_seed": config.master_seed,
            "version": VERSION,
            "outputs": outputs,
            "duration_seconds": time.time() - started,
        },
    )
    print(f"wrote {', '.join(outputs + [str(manifest_path)])}")
    return EXIT_OK


def _dump_placements(config: ExperimentConfig, path) -> None:
    """First-seed placements per iteration, for debugging the scheduler."""
    import numpy as np

    from . import latency as lat
    from .assignment import build_cluster_assignment, build_static_clusters
    from .placement import greedy_place

    root = np.random.SeedSequence(entropy=[config.master_seed, 0])
    assign_seq, dynamics_seq = root.spawn(2)
    rng = np.random.default_rng(dynamics_seq)
    static = build_static_clusters(config.num_workers, config.num_clusters)
    assign = build_cluster_assignment(static, config.memberships, assign_seq)
    states = lat.initial_states(
        config.num_workers, config.initial_slow_count, config.initial_slow_ids, rng
    )
    prev = states.copy()
    dumps = []
    for t in range(1, config.iterations + 1):
        states = lat.step_states(states, config.latency.switch_prob, rng)
        lat.sample_completion_times(states, config.load, config.latency, rng)
        observed = prev if config.ssi_mode == "previous" else states
        placed = greedy_place(assign, lat.to_straggler_vector(observed))
        dumps.append({"iteration": t, **placed.as_dict()})
        prev = states
    write_json(path, {"name": config.name, "placements": dumps})


def cmd_summarize(args) -> int:
    try:
        rows = read_records_csv(args.records)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    summary = summarize_rows(rows)
    if args.json:
        write_json(args.json, summary)
        print(f"wrote {args.json}")
    else:
        json.dump(summary, sys.stdout, indent=2, sort_keys=True)
        print()
    return EXIT_OK


def cmd_plot(args) -> int:
    try:
        plots.render(args.records, args.kind, args.out)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    print(f"wrote {args.out} and {args.out}.values.json")
    return EXIT_OK


def cmd_verify(args) -> int:
    results = checks.run_all(full=args.full)
    failed = 0
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"{status} {res.name}: {res.detail}")
        failed += not res.passed
    return EXIT_OK if failed == 0 else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gcsim",
        description="Simulate coded distributed gradient descent under straggling workers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config", help="TOML config or a previously written manifest JSON")
    p_run.add_argument(
        "--set",
        action="append",
        metavar="KEY=VALUE",
        help="override a config field (section.key or a unique bare key)",
    )
    p_run.add_argument("--out", default="results", help="output directory")
    p_run.add_argument("--seeds", type=int, default=None, help="override seed count")
    p_run.add_argument("--parallel", type=int, default=1, help="parallel seed executors")
    p_run.add_argument(
        "--debug-placements",
        metavar="PATH",
        help="dump the first seed's per-iteration placements as JSON",
    )
    p_run.set_defaults(func=cmd_run)

    p_sum = sub.add_parser("summarize", help="summarize a records CSV")
    p_sum.add_argument("records")
    p_sum.add_argument("--json", help="write the summary to this path instead of stdout")
    p_sum.set_defaults(func=cmd_summarize)

    p_plot = sub.add_parser("plot", help="render a figure from a records CSV")
    p_plot.add_argument("records")
    p_plot.add_argument("--kind", choices=plots.FIGURE_KINDS, default="avg-completion-bar")
    p_plot.add_argument("--out", required=True, help="output image path")
    p_plot.set_defaults(func=cmd_plot)

    p_verify = sub.add_parser("verify", help="run the built-in property checks")
    p_verify.add_argument("--full", action="store_true", help="full-size instance counts")
    p_verify.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except GcsimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
