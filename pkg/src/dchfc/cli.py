"""Command-line front end: ``dchfc run | compare | sweep``.

Exit codes: 0 ok, 2 configuration error, 3 runtime error. The default
config path can come from ``$DCHFC_CONFIG``.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .config import SimConfig, load_config
from .election import write_election_csv
from .simulation import Mode, compare, lifetime_json, rounds_csv, run_simulation
from .topology import ConfigError

log = logging.getLogger("dchfc")

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3
ENV_CONFIG = "DCHFC_CONFIG"


def _config(args) -> SimConfig:
    path = args.config or os.environ.get(ENV_CONFIG)
    return load_config(path, args.set)


def _seeds(args, cfg: SimConfig) -> list[int]:
    return list(args.seeds) if args.seeds else list(cfg.seeds)


def cmd_run(args) -> int:
    cfg = _config(args)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    seed = cfg.seed if args.seed is None else args.seed
    res = run_simulation(cfg, seed, args.mode)
    (out / "resolved_config.json").write_text(cfg.to_json())
    (out / "rounds.csv").write_text(rounds_csv(res.rounds))
    (out / "lifetime.json").write_text(lifetime_json(res.lifetime))
    if res.election is not None:
        snap = res.election
        write_election_csv(snap.topology, snap.result, snap.potentials, out / "election.csv")
        if not args.no_plot:
            from .plots import plot_clusters

            plot_clusters(
                snap.topology, snap.result, out / "topology.svg", f"{args.mode.upper()} clusters, round {snap.round}"
            )
    log.info("%s seed %d: %d rounds, lifetime %s", args.mode, seed, len(res.rounds), res.lifetime)
    return EXIT_OK


def _write_comparison(report, runs, out: Path, plot: bool) -> None:
    (out / "summary.json").write_text(json.dumps(report.summary(), indent=2))
    a, b = report.mode_a, report.mode_b
    for seed, (ra, rb) in runs.items():
        horizon = max(len(ra.rounds), len(rb.rounds))
        lines = ["round,mode,packets_lost,throughput,total_residual_energy,alive_count"]
        for label, res in ((a, ra), (b, rb)):
            for r in range(horizon):
                if r < len(res.rounds):
                    m = res.rounds[r]
                    lines.append(f"{r + 1},{label},{m.packets_lost},{m.throughput},{m.total_residual_energy!r},{m.alive_count}")
                else:
                    lines.append(f"{r + 1},{label},0,0,{res.residual_energy_at(r + 1)!r},0")
        (out / f"series_seed{seed}.csv").write_text("\n".join(lines) + "\n")
    if not plot:
        return
    from .plots import plot_lifetime, plot_series

    width = max(max(len(ra.rounds), len(rb.rounds)) for ra, rb in runs.values())

    def mean_curve(side: str, attr: str) -> np.ndarray:
        curves = []
        for ra, rb in runs.values():
            vals = [getattr(m, attr) for m in (ra if side == "a" else rb).rounds]
            pad = vals[-1] if attr == "total_residual_energy" and vals else 0
            curves.append(vals + [pad] * (width - len(vals)))
        return np.array(curves, dtype=float).mean(axis=0)

    for attr, fname, ylabel in (
        ("packets_lost", "packet_loss.svg", "packets lost per round"),
        ("throughput", "throughput.svg", "packets delivered per round"),
        ("total_residual_energy", "residual_energy.svg", "total residual energy (J)"),
    ):
        plot_series({a: mean_curve("a", attr), b: mean_curve("b", attr)}, out / fname, ylabel)
    s = report.summary()["metrics"]
    plot_lifetime(
        {a: {k: s[k]["mean_a"] for k in ("fnd", "hna", "lnd")}, b: {k: s[k]["mean_b"] for k in ("fnd", "hna", "lnd")}},
        out / "lifetime.svg",
        "network lifetime (mean over seeds)",
    )


def cmd_compare(args) -> int:
    cfg = _config(args)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "resolved_config.json").write_text(cfg.to_json())
    seeds = _seeds(args, cfg)
    report, runs = compare(cfg, args.mode_a, args.mode_b, seeds, workers=args.workers, keep_runs=True)
    _write_comparison(report, runs, out, not args.no_plot)
    log.info("compared %s vs %s over %d seeds", args.mode_a, args.mode_b, len(seeds))
    return EXIT_OK


def cmd_sweep(args) -> int:
    """Vary one ``section.key`` across values; one comparison per value."""
    base = _config(args)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for value in args.values:
        cfg = load_config(args.config or os.environ.get(ENV_CONFIG), [*(args.set or []), f"{args.key}={value}"])
        sub = out / f"{args.key}={value}"
        sub.mkdir(exist_ok=True)
        (sub / "resolved_config.json").write_text(cfg.to_json())
        report = compare(cfg, args.mode_a, args.mode_b, _seeds(args, base), workers=args.workers)
        summary = report.summary()
        (sub / "summary.json").write_text(json.dumps(summary, indent=2))
        rows.append({"value": value, **{m: v["mean_delta"] for m, v in summary["metrics"].items()}})
    (out / "sweep.json").write_text(json.dumps({"key": args.key, "rows": rows}, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dchfc", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("-c", "--config", help=f"INI config file (default ${ENV_CONFIG})")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override, e.g. trust.x=0.8")
        sp.add_argument("-o", "--out-dir", default="out")
        sp.add_argument("--no-plot", action="store_true")

    def pair(sp):
        sp.add_argument("--mode-a", default=Mode.DCHFC.value, choices=[m.value for m in Mode])
        sp.add_argument("--mode-b", default=Mode.CHUFL.value, choices=[m.value for m in Mode])
        sp.add_argument("--seeds", type=int, nargs="+")
        sp.add_argument("-j", "--workers", type=int, default=1)

    run = sub.add_parser("run", help="simulate one seed")
    common(run)
    run.add_argument("--mode", default=Mode.DCHFC.value, choices=[m.value for m in Mode])
    run.add_argument("--seed", type=int)
    run.set_defaults(func=cmd_run)

    cmp_ = sub.add_parser("compare", help="compare two modes over seeds")
    common(cmp_)
    pair(cmp_)
    cmp_.set_defaults(func=cmd_compare)

    sweep = sub.add_parser("sweep", help="vary one config key")
    common(sweep)
    pair(sweep)
    sweep.add_argument("key", help="section.key to vary")
    sweep.add_argument("values", nargs="+")
    sweep.set_defaults(func=cmd_sweep)
    return p


def _split_inline_overrides(argv: list[str]) -> list[str]:
    # "--trust.x=0.8" is shorthand for "--set trust.x=0.8"
    out = []
    for a in argv:
        if a.startswith("--") and "=" in a and "." in a.split("=", 1)[0]:
            out += ["--set", a[2:]]
        else:
            out.append(a)
    return out


def main(argv: list[str] | None = None) -> int:
    argv = _split_inline_overrides(list(sys.argv[1:] if argv is None else argv))
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
