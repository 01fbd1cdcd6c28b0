"""Command-line interface: run experiments, dump topology, classify affects."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .circuit import build_nigrostriatal
from .configfile import default_config_text, load_config
from .cube import MonoamineCoordinate, classify_affect
from .harness import ExperimentConfig, run_experiment, write_outputs


def _load(args) -> ExperimentConfig:
    config = load_config(args.config) if args.config else ExperimentConfig()
    if getattr(args, "seed", None) is not None:
        config.seed = args.seed
    if getattr(args, "duration_ms", None) is not None:
        config.duration = args.duration_ms
    if getattr(args, "out_dir", None) is not None:
        config.out_dir = str(args.out_dir)
    if getattr(args, "no_burst", False):
        config.burst = None
    return config


def _cmd_run(args) -> int:
    if args.dump_config:
        sys.stdout.write(default_config_text())
        return 0
    config = _load(args)
    seeds = [config.seed + i for i in range(args.runs)]
    all_passed = True
    for seed in seeds:
        run_config = replace(config, seed=seed)
        try:
            run_config.validate()
        except ValueError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return 2
        result = run_experiment(run_config)
        out_dir = Path(config.out_dir)
        if len(seeds) > 1:
            out_dir = out_dir / f"seed_{seed}"
        written = write_outputs(result, out_dir)
        report = result.report
        print(
            f"seed {seed}: Thalamus x{report.rate_ratios['Thalamus']:.2f}, "
            f"MotorCortex x{report.rate_ratios['MotorCortex']:.2f}, "
            f"affect {report.affect_baseline.value} -> {report.affect_effect.value}, "
            f"elevation {'PASS' if report.elevation_pass else 'FAIL'}"
        )
        for path in written:
            print(f"  wrote {path}")
        if report.burst_enabled and not report.elevation_pass:
            all_passed = False
    if args.check and config.burst is not None and not all_passed:
        return 1
    return 0


def _cmd_dump_topology(args) -> int:
    config = _load(args)
    net = build_nigrostriatal(config.circuit, seed=config.seed)
    out = sys.stdout if args.out is None else open(args.out, "w")
    try:
        out.write("source,target,receptor,rule,weight,delay\n")
        for conn in net.connections:
            out.write(
                f"{conn.source},{conn.target},{conn.receptor.name},"
                f"{conn.rule.describe()},{conn.weight:g},{conn.delay:g}\n"
            )
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def _cmd_classify(args) -> int:
    config = load_config(args.config) if args.config else ExperimentConfig()
    try:
        coord = MonoamineCoordinate(args.serotonin, args.dopamine, args.noradrenaline)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(classify_affect(coord, config.affect_table).value)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dopacube",
        description="Spiking nigrostriatal dopamine-pathway simulator with "
        "emotion-cube affect mapping",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the dopamine-burst experiment")
    run.add_argument("--config", type=Path, help="experiment config file (INI)")
    run.add_argument("--seed", type=int, help="override the RNG seed")
    run.add_argument("--no-burst", action="store_true", help="disable the dopamine burst")
    run.add_argument("--out-dir", type=Path, help="output directory")
    run.add_argument("--duration-ms", type=float, help="override simulation duration")
    run.add_argument("--runs", type=int, default=1, help="seed sweep: run N consecutive seeds")
    run.add_argument(
        "--check",
        action="store_true",
        help="exit nonzero if the activity-elevation check fails (burst runs only)",
    )
    run.add_argument(
        "--dump-config",
        action="store_true",
        help="print the full default config file and exit",
    )
    run.set_defaults(func=_cmd_run)

    topo = sub.add_parser("dump-topology", help="emit the circuit edge list as CSV")
    topo.add_argument("--config", type=Path, help="experiment config file (INI)")
    topo.add_argument("--seed", type=int, help="seed (affects instantiated synapse counts only)")
    topo.add_argument("--out", type=Path, help="output file (default: stdout)")
    topo.set_defaults(func=_cmd_dump_topology)

    classify = sub.add_parser("classify", help="classify a monoamine coordinate")
    classify.add_argument("serotonin", type=float)
    classify.add_argument("dopamine", type=float)
    classify.add_argument("noradrenaline", type=float)
    classify.add_argument("--config", type=Path, help="config file supplying the affect table")
    classify.set_defaults(func=_cmd_classify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
