"""Experiment harness and command-line interface.

Runs the two headline experiments (recall vs. connectivity on noiseless
deployments, offset vs. noise magnitude at each mode's working
connectivity), the chained-wheel demonstration, and one-shot
generate/localize commands. Every trial seed is derived from the base
seed, so identical invocations produce byte-identical output files.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import statistics
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .localizer import (
    AlgorithmConfig,
    formation_doc,
    localize_graph,
    save_formation,
    write_audit_log,
)
from .metrics import TrialResult, mean_offset, recall
from .network import (
    GenerationError,
    NoiseModel,
    WsnGraph,
    apply_noise,
    default_rim_radius,
    generate_random_udg,
    generate_wheel,
    generate_wheel_network,
    graph_doc,
    load_graph,
    save_graph,
)

log = logging.getLogger("udgloc")

#: XOR salt separating the noise stream from the deployment stream, so the
#: two never consume the same raw generator sequence.
_NOISE_SALT = 0x9E3779B97F4A7C15

#: Working connectivity for the noise sweep: the average degree at which
#: each mode first clears 99% recall on noiseless deployments.
NOISE_SWEEP_DEGREES = {"violations": 8.0, "pure": 15.0}

CSV_HEADER = ["mode", "avg_degree", "p", "trial", "recall_pct", "mean_offset", "seed"]


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters for one harness run.

    ``triple_cap`` bounds the seed triangles each localization attempt may
    try; sweeps keep it finite so sub-threshold deployments (where no seed
    can succeed) do not burn time exhausting every triangle.
    """

    experiment: str = "single"  # sweep-degree | sweep-noise | wheel-demo | single
    n: int = 100
    area_side: float = 100.0
    degrees: tuple[float, ...] = tuple(float(d) for d in range(4, 19))
    p_list: tuple[float, ...] = (0.0,)
    trials: int = 20
    base_seed: int = 1
    modes: tuple[str, ...] = ("violations", "pure")
    seed_placement: str = "anchored"
    align: str = "none"
    triple_cap: Optional[int] = 40
    output_path: Optional[Path] = None
    # wheel-demo geometry
    wheel_count: int = 4
    k_rim: int = 6
    theta: float = 1.0
    rim_radius: Optional[float] = None

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")

    def trial_seed(self, trial: int) -> int:
        return self.base_seed ^ trial

    def algorithm_config(self, mode: str, p: float) -> AlgorithmConfig:
        return AlgorithmConfig(
            mode=mode,
            p_tolerance=p,
            seed_placement=self.seed_placement,
            seed_triple_cap=self.triple_cap,
        )


def _offset_or_none(formation, graph: WsnGraph, align: str) -> Optional[float]:
    if len(formation) == 0 or (align == "rigid" and len(formation) < 2):
        return None
    return mean_offset(formation, graph, align)


def run_sweep_degree(config: ExperimentConfig) -> list[TrialResult]:
    """Recall vs. average degree, both modes, noiseless measurements."""
    if any(p != 0 for p in config.p_list):
        raise ValueError("the degree sweep uses noiseless measurements (p_list=[0])")
    rows: list[TrialResult] = []
    for degree in config.degrees:
        for trial in range(config.trials):
            seed = config.trial_seed(trial)
            try:
                graph = generate_random_udg(config.n, config.area_side, degree, seed)
            except GenerationError as exc:
                log.warning("skipping degree=%s trial=%d: %s", degree, trial, exc)
                continue
            for mode in config.modes:
                formation = localize_graph(graph, config.algorithm_config(mode, 0.0))
                rows.append(TrialResult(
                    n=config.n,
                    avg_degree=degree,
                    p_magnitude=0.0,
                    mode=mode,
                    recall_pct=recall(formation, graph),
                    mean_offset=_offset_or_none(formation, graph, config.align),
                    trial=trial,
                    rng_seed=seed,
                ))
        log.info("degree %s done (%d trials)", degree, config.trials)
    _sort_rows(rows)
    if config.output_path is not None:
        write_results_csv(rows, config.output_path)
        write_summary_dat(rows, _dat_path(config.output_path), "avg_degree")
    return rows


def run_sweep_noise(config: ExperimentConfig) -> list[TrialResult]:
    """Offset vs. noise magnitude at each mode's working connectivity."""
    rows: list[TrialResult] = []
    for mode in config.modes:
        degree = NOISE_SWEEP_DEGREES[mode]
        for p in config.p_list:
            for trial in range(config.trials):
                seed = config.trial_seed(trial)
                try:
                    graph = generate_random_udg(config.n, config.area_side, degree, seed)
                except GenerationError as exc:
                    log.warning("skipping p=%s trial=%d: %s", p, trial, exc)
                    continue
                noisy = apply_noise(
                    graph, NoiseModel(p, graph.theta, seed ^ _NOISE_SALT)
                )
                formation = localize_graph(noisy, config.algorithm_config(mode, p))
                rows.append(TrialResult(
                    n=config.n,
                    avg_degree=degree,
                    p_magnitude=p,
                    mode=mode,
                    recall_pct=recall(formation, noisy),
                    mean_offset=_offset_or_none(formation, noisy, config.align),
                    trial=trial,
                    rng_seed=seed,
                ))
            log.info("mode %s p=%s done (%d trials)", mode, p, config.trials)
    _sort_rows(rows)
    if config.output_path is not None:
        write_results_csv(rows, config.output_path)
        write_summary_dat(rows, _dat_path(config.output_path), "p_magnitude")
    return rows


def run_wheel_demo(config: ExperimentConfig) -> list[TrialResult]:
    """Localize a chained-wheel network across noise magnitudes.

    Runs violation pruning at each P in ``config.p_list`` (writing one
    formation file per P when an output directory is given), plus the
    pure-trilateration baseline on pristine measurements, which can only
    ever place one seed triangle on wheels. P=0 rows also use pristine
    measurements.
    """
    p_list = config.p_list
    graph = generate_wheel_network(
        config.wheel_count, config.k_rim, config.theta,
        config.base_seed, config.rim_radius,
    )
    outdir: Optional[Path] = None
    if config.output_path is not None:
        outdir = Path(config.output_path)
        outdir.mkdir(parents=True, exist_ok=True)

    rows: list[TrialResult] = []

    def run_one(mode: str, p: float, trial: int, stem: str) -> None:
        if p > 0:
            seed = config.trial_seed(trial) ^ _NOISE_SALT
            g = apply_noise(graph, NoiseModel(p, graph.theta, seed))
        else:
            g = graph
        formation = localize_graph(g, config.algorithm_config(mode, p))
        rows.append(TrialResult(
            n=graph.n,
            avg_degree=graph.avg_degree,
            p_magnitude=p,
            mode=mode,
            recall_pct=recall(formation, g),
            mean_offset=_offset_or_none(formation, g, config.align),
            trial=trial,
            rng_seed=config.trial_seed(trial),
        ))
        if outdir is not None:
            save_formation(formation, g, outdir / f"{stem}.json")
            write_audit_log(formation, outdir / f"{stem}.audit.jsonl")

    for idx, p in enumerate(p_list):
        run_one("violations", p, idx, f"wheel_p{p:g}")
    run_one("pure", 0.0, 0, "wheel_pure_p0")

    _sort_rows(rows)
    if outdir is not None:
        write_results_csv(rows, outdir / "summary.csv")
    return rows


def run_experiment(config: ExperimentConfig) -> list[TrialResult]:
    if config.experiment == "sweep-degree":
        return run_sweep_degree(config)
    if config.experiment == "sweep-noise":
        return run_sweep_noise(config)
    if config.experiment == "wheel-demo":
        return run_wheel_demo(config)
    if config.experiment == "single":
        single = ExperimentConfig(
            experiment="sweep-degree",
            n=config.n,
            area_side=config.area_side,
            degrees=config.degrees[:1],
            trials=1,
            base_seed=config.base_seed,
            modes=config.modes,
            seed_placement=config.seed_placement,
            align=config.align,
            triple_cap=config.triple_cap,
            output_path=config.output_path,
        )
        return run_sweep_degree(single)
    raise ValueError(f"unknown experiment {config.experiment!r}")


# ---------------------------------------------------------------------------
# Output files


def _sort_rows(rows: list[TrialResult]) -> None:
    rows.sort(key=lambda r: (r.mode, r.avg_degree, r.p_magnitude, r.trial))


def _dat_path(csv_path: Path | str) -> Path:
    return Path(csv_path).with_suffix(".dat")


def _csv_row(r: TrialResult) -> list:
    return [
        r.mode, r.avg_degree, r.p_magnitude, r.trial, r.recall_pct,
        "" if r.mean_offset is None else r.mean_offset, r.rng_seed,
    ]


def write_results_csv(rows: Sequence[TrialResult], path: Path | str) -> None:
    """One row per trial; empty offset cell when nothing was localized."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        writer.writerows(_csv_row(r) for r in rows)


def write_summary_dat(
    rows: Sequence[TrialResult], path: Path | str, param: str
) -> None:
    """Per-(mode, parameter) means as a gnuplot-style .dat file.

    Modes are separated by double blank lines so each is addressable as a
    gnuplot index block.
    """
    lines = [f"# mode {param} mean_recall sd_recall mean_offset sd_offset trials"]
    modes = sorted({r.mode for r in rows})
    for mi, mode in enumerate(modes):
        if mi:
            lines.append("")
            lines.append("")
        values = sorted({getattr(r, param) for r in rows if r.mode == mode})
        for v in values:
            group = [r for r in rows if r.mode == mode and getattr(r, param) == v]
            recalls = [r.recall_pct for r in group]
            offsets = [r.mean_offset for r in group if r.mean_offset is not None]
            lines.append(" ".join([
                mode,
                f"{v:g}",
                f"{statistics.fmean(recalls):.6g}",
                f"{statistics.stdev(recalls):.6g}" if len(recalls) > 1 else "nan",
                f"{statistics.fmean(offsets):.6g}" if offsets else "nan",
                f"{statistics.stdev(offsets):.6g}" if len(offsets) > 1 else "nan",
                str(len(group)),
            ]))
    Path(path).write_text("\n".join(lines) + "\n")


def summarize(rows: Sequence[TrialResult], param: str) -> dict[tuple[str, float], dict]:
    """Mean recall/offset grouped by (mode, parameter value)."""
    grouped: dict[tuple[str, float], list[TrialResult]] = {}
    for r in rows:
        grouped.setdefault((r.mode, getattr(r, param)), []).append(r)
    summary = {}
    for key, group in grouped.items():
        offsets = [g.mean_offset for g in group if g.mean_offset is not None]
        summary[key] = {
            "mean_recall": statistics.fmean(g.recall_pct for g in group),
            "mean_offset": statistics.fmean(offsets) if offsets else None,
            "sd_offset": statistics.stdev(offsets) if len(offsets) > 1 else 0.0,
            "trials": len(group),
        }
    return summary


# ---------------------------------------------------------------------------
# CLI


def _parse_degrees(spec: str) -> tuple[float, ...]:
    """Parse "8", "4:18", or "4:18:2" into an inclusive list of degrees."""
    parts = spec.split(":")
    if len(parts) == 1:
        return (float(parts[0]),)
    if len(parts) not in (2, 3):
        raise ValueError(f"bad degree range {spec!r}; expected A:B or A:B:STEP")
    lo, hi = float(parts[0]), float(parts[1])
    step = float(parts[2]) if len(parts) == 3 else 1.0
    if step <= 0 or hi < lo:
        raise ValueError(f"bad degree range {spec!r}")
    values = []
    i = 0
    while True:
        v = lo + i * step
        if v > hi + 1e-9:
            break
        values.append(v)
        i += 1
    return tuple(values)


def _parse_plist(spec: str) -> tuple[float, ...]:
    try:
        values = tuple(float(tok) for tok in spec.split(",") if tok.strip())
    except ValueError as exc:
        raise ValueError(f"bad --plist {spec!r}: {exc}") from exc
    if not values:
        raise ValueError("--plist must name at least one value")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="udgloc",
        description="Range-based sensor network localization with unit-disk pruning",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--seed", type=int, default=1, help="base RNG seed")
        p.add_argument("--out", type=Path, default=None, help="output path")

    g = sub.add_parser("generate", help="generate a deployment and write it as JSON")
    g.add_argument("--n", type=int, default=None, help="node count for a random deployment")
    g.add_argument("--degrees", type=str, default=None,
                   help="target average degree (single value) for a random deployment")
    g.add_argument("--area", type=float, default=100.0, help="square side in meters")
    g.add_argument("--wheel", type=int, default=None, metavar="K",
                   help="build a wheel with K rim nodes instead")
    g.add_argument("--wheels", type=int, default=1, help="number of chained wheels")
    g.add_argument("--theta", type=float, default=1.0, help="sensing range for wheels")
    g.add_argument("--rim", type=float, default=None, help="wheel rim radius")
    g.add_argument("--p", type=float, default=0.0, help="noise magnitude P to apply")
    common(g)

    l = sub.add_parser("localize", help="localize a graph file")
    l.add_argument("--graph", type=Path, required=True)
    l.add_argument("--mode", choices=["violations", "pure"], default="violations")
    l.add_argument("--p", type=float, default=0.0, help="range-band magnitude P")
    l.add_argument("--align", choices=["none", "rigid"], default="none")
    l.add_argument("--seed-placement", choices=["anchored", "relative"], default="anchored")
    l.add_argument("--triple-cap", type=int, default=None)
    common(l)

    sd = sub.add_parser("sweep-degree", help="recall vs. connectivity sweep")
    sd.add_argument("--n", type=int, default=100)
    sd.add_argument("--degrees", type=str, default="4:18")
    sd.add_argument("--area", type=float, default=100.0)
    sd.add_argument("--trials", type=int, default=20)
    sd.add_argument("--triple-cap", type=int, default=40)
    sd.add_argument("--align", choices=["none", "rigid"], default="none")
    sd.add_argument("--seed-placement", choices=["anchored", "relative"], default="anchored")
    common(sd)

    sn = sub.add_parser("sweep-noise", help="offset vs. noise magnitude sweep")
    sn.add_argument("--n", type=int, default=100)
    sn.add_argument("--plist", type=str, default="1,5,10,20")
    sn.add_argument("--area", type=float, default=100.0)
    sn.add_argument("--trials", type=int, default=20)
    sn.add_argument("--triple-cap", type=int, default=40)
    sn.add_argument("--align", choices=["none", "rigid"], default="none")
    sn.add_argument("--seed-placement", choices=["anchored", "relative"], default="anchored")
    common(sn)

    wd = sub.add_parser("wheel-demo", help="chained-wheel localization demo")
    wd.add_argument("--wheels", type=int, default=4)
    wd.add_argument("--wheel", type=int, default=6, metavar="K", help="rim nodes per wheel")
    wd.add_argument("--theta", type=float, default=1.0)
    wd.add_argument("--rim", type=float, default=None)
    wd.add_argument("--plist", type=str, default="1,5,10,20")
    wd.add_argument("--triple-cap", type=int, default=None)
    common(wd)

    return parser


def _cmd_generate(args: argparse.Namespace) -> int:
    if args.wheel is not None:
        if args.wheels == 1:
            rim = args.rim if args.rim is not None else default_rim_radius(args.wheel, args.theta)
            graph = generate_wheel(args.wheel, args.theta, rim)
        else:
            graph = generate_wheel_network(
                args.wheels, args.wheel, args.theta, args.seed, args.rim
            )
    elif args.n is not None:
        if args.degrees is None:
            raise ValueError("generate --n needs --degrees with a single target degree")
        degrees = _parse_degrees(args.degrees)
        if len(degrees) != 1:
            raise ValueError("generate takes a single target degree, not a range")
        graph = generate_random_udg(args.n, args.area, degrees[0], args.seed)
    else:
        raise ValueError("generate needs either --n (random deployment) or --wheel K")

    if args.p > 0:
        graph = apply_noise(graph, NoiseModel(args.p, graph.theta, args.seed ^ _NOISE_SALT))

    if args.out is not None:
        save_graph(graph, args.out)
        log.info("wrote %s (%d nodes, %d edges)", args.out, graph.n, graph.edge_count)
    else:
        print(json.dumps(graph_doc(graph), indent=1))
    return 0


def _cmd_localize(args: argparse.Namespace) -> int:
    graph = load_graph(args.graph)
    config = AlgorithmConfig(
        mode=args.mode,
        p_tolerance=args.p,
        seed_placement=args.seed_placement,
        seed_triple_cap=args.triple_cap,
    )
    formation = localize_graph(graph, config)
    r = recall(formation, graph)
    off = _offset_or_none(formation, graph, args.align)
    log.info("localized %d/%d nodes (recall %.1f%%, offset %s)",
             len(formation), graph.n, r, "n/a" if off is None else f"{off:.4g} m")
    if args.out is not None:
        save_formation(formation, graph, args.out)
        write_audit_log(formation, Path(str(args.out) + ".audit.jsonl"))
    else:
        print(json.dumps(formation_doc(formation, graph), indent=1))
    return 0


def _experiment_config(args: argparse.Namespace, experiment: str) -> ExperimentConfig:
    kwargs: dict = {
        "experiment": experiment,
        "base_seed": args.seed,
        "output_path": args.out,
    }
    if experiment == "sweep-degree":
        kwargs.update(
            n=args.n, area_side=args.area, degrees=_parse_degrees(args.degrees),
            trials=args.trials, triple_cap=args.triple_cap, align=args.align,
            seed_placement=args.seed_placement,
        )
    elif experiment == "sweep-noise":
        kwargs.update(
            n=args.n, area_side=args.area, p_list=_parse_plist(args.plist),
            trials=args.trials, triple_cap=args.triple_cap, align=args.align,
            seed_placement=args.seed_placement,
        )
    elif experiment == "wheel-demo":
        kwargs.update(
            wheel_count=args.wheels, k_rim=args.wheel, theta=args.theta,
            rim_radius=args.rim, p_list=_parse_plist(args.plist),
            triple_cap=args.triple_cap,
        )
    return ExperimentConfig(**kwargs)


def _print_rows(rows: Sequence[TrialResult]) -> None:
    writer = csv.writer(sys.stdout)
    writer.writerow(CSV_HEADER)
    writer.writerows(_csv_row(r) for r in rows)


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    level = os.environ.get("UDGLOC_LOG", "error").lower()
    logging.basicConfig(
        level={"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
        .get(level, logging.ERROR),
        format="%(levelname)s %(message)s",
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "generate":
            return _cmd_generate(args)
        if args.command == "localize":
            return _cmd_localize(args)
        config = _experiment_config(args, args.command)
        rows = run_experiment(config)
        if config.output_path is None:
            _print_rows(rows)
        else:
            log.info("wrote %s (%d rows)", config.output_path, len(rows))
        return 0
    except (ValueError, GenerationError, OSError) as exc:
        print(f"udgloc: error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
