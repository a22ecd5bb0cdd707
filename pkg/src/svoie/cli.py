"""Command-line experiment harness.

    svoie run     --society mixed --mode svoie --seed 42 --out runs/mixed-svoie
    svoie compare --stable runs/mixed-stable --svoie runs/mixed-svoie --out cmp/
    svoie sweep   --seed 42 --out sweep/

``run`` writes rounds.csv, summary.json and manifest.json into the output
directory. ``compare`` reads two run directories and writes comparison.csv
plus a plot-ready welfare_long.csv. ``sweep`` runs all four society presets
under both modes and emits one combined comparison table. Exit code 0 on
success; failures print a single ``<class>: message`` line to stderr.
"""

from __future__ import annotations

import argparse
import shutil
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import io as sio
from .emotion import Mode
from .metrics import WelfareAccumulator, summarize
from .society import (
    DESK_POPULATION,
    FULL_POPULATION,
    PRESET_SHARES,
    SimulationConfig,
    SocietyConfig,
    _iter_repeat,
    derive_seed,
    iter_simulation,
    society_preset,
)

DESK_STEPS = 200


def _add_common_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, help="master seed (required unless in --config)")
    parser.add_argument("--steps", type=int, help="time steps per repeat (default 1000)")
    parser.add_argument("--repeats", type=int, help="independent repeats (default 3)")
    parser.add_argument("--threads", type=int, default=1, help="worker processes over repeats")
    parser.add_argument(
        "--desk",
        action="store_true",
        help=f"desk scale: population {DESK_POPULATION}, {DESK_STEPS} steps",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="svoie", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one society simulation")
    p_run.add_argument("--config", type=Path, help="JSON config file")
    p_run.add_argument("--society", choices=sorted(PRESET_SHARES), help="society preset")
    p_run.add_argument("--mode", choices=[m.value for m in Mode], help="agent mode")
    p_run.add_argument("--population", type=int, help="society size (default 300)")
    p_run.add_argument("--out", type=Path, required=True, help="output directory")
    _add_common_run_flags(p_run)

    p_cmp = sub.add_parser("compare", help="compare a stable and a svoie run")
    p_cmp.add_argument("--stable", type=Path, required=True, help="stable-arm run directory")
    p_cmp.add_argument("--svoie", type=Path, required=True, help="svoie-arm run directory")
    p_cmp.add_argument("--out", type=Path, required=True, help="output directory")

    p_sweep = sub.add_parser("sweep", help="all presets x both modes + combined table")
    p_sweep.add_argument("--out", type=Path, required=True, help="output directory")
    _add_common_run_flags(p_sweep)

    return parser


def _resolve_run_config(args) -> SimulationConfig:
    """Config file plus flag overrides; flags win where both are given."""
    if args.config is not None:
        config = sio.load_config(args.config)
        society = config.society
        name, mode = society.name, society.mode
        population = society.population
        steps, repeats, seed = config.steps, config.repeats, config.master_seed
        # explicit trait counts survive unless a flag rebuilds the society
        counts = (society.n_altruistic, society.n_cooperative, society.n_selfish)
        preset_based = args.society is not None or args.population is not None or args.desk
    else:
        if args.society is None or args.mode is None:
            raise sio.ConfigError("run needs --config, or --society and --mode")
        if args.seed is None:
            raise sio.ConfigError("--seed is required for reproducible runs")
        name, population = args.society, FULL_POPULATION
        mode = Mode(args.mode)
        steps, repeats, seed = 1000, 3, args.seed
        counts = None
        preset_based = True
    if args.mode is not None:
        mode = Mode(args.mode)
    if args.society is not None:
        name = args.society
    if args.population is not None:
        population = args.population
    if args.desk:
        population = DESK_POPULATION
        steps = DESK_STEPS
    if args.steps is not None:
        steps = args.steps
    if args.repeats is not None:
        repeats = args.repeats
    if args.seed is not None:
        seed = args.seed
    try:
        if preset_based or counts is None:
            society = society_preset(name, mode, population)
        else:
            society = SocietyConfig(name, counts[0], counts[1], counts[2], mode)
        return SimulationConfig(society=society, master_seed=seed, steps=steps, repeats=repeats)
    except ValueError as exc:
        raise sio.ConfigError(str(exc)) from exc


def _shard_job(config: SimulationConfig, repeat: int, shard_path: str) -> tuple:
    acc = WelfareAccumulator()
    info = sio.write_rounds_csv(
        shard_path, _iter_repeat(config, repeat), observer=acc.observe, header=False
    )
    return info["rows"], acc.rows()


def execute_run(config: SimulationConfig, out_dir: Path, workers: int = 1) -> dict:
    """Run one simulation and write rounds.csv, summary.json, manifest.json."""
    out_dir.mkdir(parents=True, exist_ok=True)
    started = sio.utc_now()
    rounds_path = out_dir / "rounds.csv"
    acc = WelfareAccumulator()
    if workers <= 1 or config.repeats == 1:
        rounds_info = sio.write_rounds_csv(rounds_path, iter_simulation(config), observer=acc.observe)
        rows = acc.rows()
    else:
        # one shard per repeat, concatenated in order: byte-identical to a
        # serial run regardless of worker count
        with tempfile.TemporaryDirectory(dir=out_dir) as tmp:
            shard_paths = [str(Path(tmp) / f"shard-{r}.csv") for r in range(config.repeats)]
            with ProcessPoolExecutor(max_workers=min(workers, config.repeats)) as pool:
                futures = [
                    pool.submit(_shard_job, config, r, shard_paths[r])
                    for r in range(config.repeats)
                ]
                results = [f.result() for f in futures]
            rows = [row for _, chunk in results for row in chunk]
            rows.sort(key=lambda r: (r.repeat, r.agent_id))
            with open(rounds_path, "w", newline="") as fh:
                sink = sio._HashingFile(fh)
                sink.write(",".join(sio.ROUNDS_COLUMNS) + "\n")
                for shard in shard_paths:
                    with open(shard) as sf:
                        shutil.copyfileobj(sf, sink)
            rounds_info = {
                "rows": sum(n for n, _ in results),
                "bytes": sink.bytes_written,
                "sha256": sink.hexdigest(),
            }
    summary = sio.summary_payload(config, rows)
    summary_info = sio.write_summary(out_dir / "summary.json", summary)
    sio.write_manifest(
        out_dir / "manifest.json",
        config,
        outputs={
            "rounds.csv": rounds_info,
            "summary.json": summary_info,
        },
        started=started,
        finished=sio.utc_now(),
    )
    return summary


def cmd_run(args) -> int:
    config = _resolve_run_config(args)
    summary = execute_run(config, args.out, workers=args.threads)
    all_stats = summary["samples"]["all"]
    print(
        f"run {config.society.name}/{config.society.mode.value}: "
        f"{config.repeats}x{config.steps} steps, population {config.society.population} "
        f"-> welfare {all_stats['mean']:.3f}, cov {all_stats['cov']:.3f} ({args.out})"
    )
    return 0


def _load_arm(run_dir: Path) -> tuple:
    summary = sio.load_summary(Path(run_dir) / "summary.json")
    return summary, sio.summary_welfare_rows(summary)


def execute_compare(stable_dir: Path, svoie_dir: Path, out_dir: Path) -> list:
    stable_summary, stable_rows = _load_arm(stable_dir)
    svoie_summary, svoie_rows = _load_arm(svoie_dir)
    if stable_summary["mode"] != "stable" or svoie_summary["mode"] != "svoie":
        raise sio.ConfigError(
            f"expected a stable and a svoie arm, got "
            f"{stable_summary['mode']!r} and {svoie_summary['mode']!r}"
        )
    for key in ("society", "counts", "steps", "repeats"):
        if stable_summary[key] != svoie_summary[key]:
            raise sio.ConfigError(
                f"arms disagree on {key}: {stable_summary[key]!r} vs {svoie_summary[key]!r}"
            )
    results = summarize(stable_rows, svoie_rows, stable_summary["society"])
    out_dir.mkdir(parents=True, exist_ok=True)
    sio.write_comparison_csv(out_dir / "comparison.csv", results)
    sio.write_welfare_long_csv(out_dir / "welfare_long.csv", stable_rows, svoie_rows)
    return results


def cmd_compare(args) -> int:
    results = execute_compare(args.stable, args.svoie, args.out)
    for r in results:
        print(
            f"{r.society:>10} {r.sample:>4}: stable {r.mean_stable:7.3f} (cov {r.cov_stable:.3f})"
            f"  svoie {r.mean_svoie:7.3f} (cov {r.cov_svoie:.3f})  p={r.p_value:.4f} d={r.cohens_d:.3f}"
        )
    return 0


def execute_sweep(out_dir: Path, seed: int, steps: int, repeats: int, population: int, workers: int = 1) -> list:
    """All four presets under both modes, plus one combined comparison table."""
    out_dir.mkdir(parents=True, exist_ok=True)
    combined = []
    for preset_index, preset in enumerate(sorted(PRESET_SHARES)):
        arm_dirs = {}
        for mode in (Mode.STABLE_SVO, Mode.SVOIE):
            run_seed = derive_seed(seed, preset_index, 0 if mode is Mode.STABLE_SVO else 1)
            config = SimulationConfig(
                society=society_preset(preset, mode, population),
                master_seed=run_seed,
                steps=steps,
                repeats=repeats,
            )
            run_dir = out_dir / f"{preset}-{mode.value}"
            execute_run(config, run_dir, workers=workers)
            arm_dirs[mode] = run_dir
        combined.extend(
            execute_compare(arm_dirs[Mode.STABLE_SVO], arm_dirs[Mode.SVOIE], out_dir / f"compare-{preset}")
        )
    sio.write_comparison_csv(out_dir / "comparison.csv", combined)
    return combined


def cmd_sweep(args) -> int:
    if args.seed is None:
        raise sio.ConfigError("--seed is required for reproducible runs")
    steps = args.steps if args.steps is not None else (DESK_STEPS if args.desk else 1000)
    population = DESK_POPULATION if args.desk else FULL_POPULATION
    repeats = args.repeats if args.repeats is not None else 3
    combined = execute_sweep(args.out, args.seed, steps, repeats, population, workers=args.threads)
    print(f"sweep complete: {len(combined)} comparison rows -> {args.out / 'comparison.csv'}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "compare":
            return cmd_compare(args)
        if args.command == "sweep":
            return cmd_sweep(args)
        raise AssertionError(f"unhandled command {args.command}")
    except sio.ConfigError as exc:
        print(f"config-error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io-error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
