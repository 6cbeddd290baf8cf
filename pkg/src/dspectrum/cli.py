"""Command-line front end: ingest -> spectrum -> SIR -> analysis.

Stages communicate through files so the expensive simulation step can be
run once and analyzed many times. All randomness flows from the single
``--seed``; repeated runs with identical configuration write byte-identical
outputs regardless of worker count.

Exit codes: 0 success; 1 verification failure; 2 unreadable or malformed
input; 3 spectrum algorithm mismatch; 4 undefined epidemic threshold;
5 node-set mismatch between pipeline files.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import blocks, dynamics, formats, peeling
from .estimators import SPECTRUM_METHODS, spectrum_by_method
from .formats import NodeSetMismatchError
from .graph import (
    EdgeListParseError,
    ThresholdUndefinedError,
    load_edge_list,
)
from .sir import DEFAULT_H_LIST, SirParams, profile_all_nodes
from .validation import check_h_list

log = logging.getLogger("dspectrum")

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_PARSE = 2
EXIT_MISMATCH = 3
EXIT_THRESHOLD = 4
EXIT_NODESET = 5

DEFAULT_H_TEXT = ",".join(f"{h:g}" for h in DEFAULT_H_LIST)


@dataclass
class RunConfig:
    """Everything one subcommand invocation needs, validated up front."""

    command: str
    input: Path | None = None
    out_dir: Path = Path(".")
    seed: int = 42
    runs_per_source: int = 1000
    h_list: tuple[float, ...] = DEFAULT_H_LIST
    clusters_d: int | None = None
    clusters_sp: int | None = None
    method: str = "both"
    workers: int = field(default_factory=lambda: os.cpu_count() or 1)
    standardize: bool = False
    rate_column: str = "h1.5"
    spectrum_path: Path | None = None
    profiles_path: Path | None = None
    trace_path: Path | None = None

    def __post_init__(self):
        self.h_list = check_h_list(self.h_list)
        if self.runs_per_source < 1:
            raise ValueError("--runs must be at least 1")
        if self.workers < 1:
            raise ValueError("--workers must be at least 1")
        if self.method not in SPECTRUM_METHODS:
            raise ValueError(f"--method must be one of {SPECTRUM_METHODS}")
        for k in ("clusters_d", "clusters_sp"):
            v = getattr(self, k)
            if v is not None and v < 1:
                raise ValueError(f"--{k.replace('_', '-')} must be positive")


def _load_graph(path: Path):
    try:
        return load_edge_list(path)
    except OSError as exc:
        raise EdgeListParseError(0, str(path), f"cannot read input: {exc.strerror}")


def cmd_spectrum(cfg: RunConfig) -> int:
    g, report = _load_graph(cfg.input)
    log.info(
        "ingested %d nodes, %d edges (%d self-loops, %d duplicates dropped, %d isolated)",
        g.node_count,
        report.edges_kept,
        report.self_loops_dropped,
        report.duplicate_edges_dropped,
        report.isolated_nodes,
    )
    if cfg.trace_path is not None and cfg.method in ("fixedpoint", "both"):
        with open(cfg.trace_path, "w", encoding="utf-8") as sink:
            spectrum = dynamics.compute_spectrum_chained(g, trace=sink)
        if cfg.method == "both":
            where = peeling.first_spectrum_mismatch(peeling.full_spectrum(g), spectrum)
            if where is not None:
                raise peeling.SpectrumMismatchError(*where)
    else:
        spectrum = spectrum_by_method(g, cfg.method)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    formats.write_spectrum_csv(cfg.out_dir / "spectrum.csv", g, spectrum)
    formats.write_analysis_json(
        cfg.out_dir / "ingest_report.json",
        {
            "edges_kept": report.edges_kept,
            "self_loops_dropped": report.self_loops_dropped,
            "duplicate_edges_dropped": report.duplicate_edges_dropped,
            "isolated_nodes": report.isolated_nodes,
        },
    )
    log.info("wrote %s", cfg.out_dir / "spectrum.csv")
    return EXIT_OK


def cmd_sir(cfg: RunConfig) -> int:
    g, _ = _load_graph(cfg.input)
    params = SirParams(runs_per_source=cfg.runs_per_source, seed=cfg.seed)
    profiles = profile_all_nodes(g, cfg.h_list, params, workers=cfg.workers)
    beta = profiles[0].beta if profiles else 0.0
    log.info("epidemic threshold beta = %g", beta)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    formats.write_profiles_csv(cfg.out_dir / "profiles.csv", g, profiles, cfg.h_list)
    log.info("wrote %s", cfg.out_dir / "profiles.csv")
    return EXIT_OK


def cmd_analyze(cfg: RunConfig) -> int:
    labels, spectrum = formats.read_spectrum_csv(cfg.spectrum_path)
    plabels, beta, hs, rates = formats.read_profiles_csv(cfg.profiles_path)
    if sorted(labels) != sorted(plabels):
        raise NodeSetMismatchError(
            "spectrum and profile files cover different node sets"
        )
    order = [plabels.index(lab) for lab in labels]
    rates = rates[order]

    column_labels = [formats.h_label(h) for h in hs]
    if cfg.rate_column not in column_labels:
        raise ValueError(
            f"--rate-column {cfg.rate_column!r} not found; available: {column_labels}"
        )
    designated = rates[:, column_labels.index(cfg.rate_column)]

    cb = blocks.cblocks(spectrum)
    core_values = np.unique(spectrum.column(0))
    db = blocks.cluster_spectra(
        spectrum, cfg.clusters_d, cfg.seed, standardize=cfg.standardize
    )
    profiles = [
        # reconstructed value objects so the clustering contract stays uniform
        _profile_stub(v, rates[v], beta)
        for v in range(len(labels))
    ]
    sp = blocks.cluster_spreading_power(profiles, cfg.clusters_sp, cfg.seed)

    grid = blocks.icell_grid(cb, db, designated, cfg.rate_column)
    report = blocks.dispersion_report(cb, grid, designated)
    counts = blocks.contingency(sp, db)

    payload = formats.analysis_payload(
        labels, beta, cb, core_values, db, sp, grid, report, counts
    )
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    formats.write_analysis_json(cfg.out_dir / "analysis.json", payload)
    formats.write_grid_csv(cfg.out_dir / "grid.csv", grid, core_values)
    summary = payload["summary"]
    print(
        "mean C-block dispersion {} vs mean I-cell dispersion {} "
        "({}/{} multi-cell C-blocks refined)".format(
            _fmt(summary["mean_cblock_dispersion"]),
            _fmt(summary["mean_icell_dispersion"]),
            summary["refined_blocks"],
            summary["comparable_blocks"],
        )
    )
    return EXIT_OK


def _fmt(x) -> str:
    return "n/a" if x is None else f"{x:.6g}"


def _profile_stub(node: int, rates: np.ndarray, beta: float):
    from .sir import InfectionProfile

    return InfectionProfile(node, np.array(rates, dtype=np.float64), beta)


def cmd_verify(cfg: RunConfig) -> int:
    g, _ = _load_graph(cfg.input)
    labels, spectrum = formats.read_spectrum_csv(cfg.spectrum_path)
    if sorted(labels) != sorted(g.labels):
        raise NodeSetMismatchError("spectrum file covers a different node set than the graph")
    if spectrum.delta != g.max_degree():
        print(
            f"invalid: spectrum has {spectrum.delta + 1} columns but the graph "
            f"has max degree {g.max_degree()}"
        )
        return EXIT_INVALID
    to_graph = {lab: v for v, lab in enumerate(g.labels)}
    perm = np.array([to_graph[lab] for lab in labels])
    for t in spectrum.orders:
        ranks = np.zeros(g.node_count, dtype=np.int64)
        ranks[perm] = spectrum.column(t)
        chain = peeling.chain_from_ranks(ranks, t)
        check = peeling.verify_chain(g, chain)
        if not check:
            print(f"invalid chain for order {t}: {check.kind} at level {check.level}: {check.message}")
            return EXIT_INVALID
    print(f"all {spectrum.delta + 1} chains valid")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dspectrum",
        description="Node rank spectra of undirected networks, with SIR-based block analysis.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="chattier logging")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, *, needs_input=True, needs_out=True):
        if needs_input:
            p.add_argument("--input", type=Path, required=True, help="edge-list file")
        if needs_out:
            p.add_argument("--out-dir", type=Path, default=Path("."), help="output directory")
        p.add_argument("--seed", type=int, default=42, help="master seed (default 42)")

    p = sub.add_parser("spectrum", help="compute the rank spectrum of every node")
    add_common(p)
    p.add_argument(
        "--method",
        choices=SPECTRUM_METHODS,
        default="both",
        help="solver; 'both' cross-checks the two algorithms (default)",
    )
    p.add_argument("--trace", type=Path, default=None, dest="trace_path",
                   help="write a JSONL update trace of the fixed-point runs")

    p = sub.add_parser("sir", help="profile per-node infection rates by Monte Carlo")
    add_common(p)
    p.add_argument("--runs", type=int, default=1000, dest="runs_per_source",
                   help="simulations per source node (default 1000)")
    p.add_argument("--h-list", default=DEFAULT_H_TEXT,
                   help=f"comma-separated threshold multipliers (default {DEFAULT_H_TEXT})")
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                   help="worker processes (default: available parallelism)")

    p = sub.add_parser("analyze", help="block partitions, I-cell grid, dispersions")
    add_common(p, needs_input=False)
    p.add_argument("--spectrum", type=Path, required=True, dest="spectrum_path",
                   help="spectrum CSV from the spectrum command")
    p.add_argument("--profiles", type=Path, required=True, dest="profiles_path",
                   help="profile CSV from the sir command")
    p.add_argument("--clusters-d", type=int, required=True,
                   help="number of D-blocks (spectrum clusters)")
    p.add_argument("--clusters-sp", type=int, required=True,
                   help="number of spreading-power clusters")
    p.add_argument("--standardize", action="store_true",
                   help="z-score spectrum columns before clustering")
    p.add_argument("--rate-column", default="h1.5",
                   help="profile column used for the I-cell grid (default h1.5)")

    p = sub.add_parser("verify", help="check a spectrum CSV against the chain definition")
    add_common(p, needs_out=False)
    p.add_argument("--spectrum", type=Path, required=True, dest="spectrum_path",
                   help="spectrum CSV to verify")

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    fields = {
        "command": args.command,
        "seed": args.seed,
    }
    for name in (
        "input",
        "out_dir",
        "runs_per_source",
        "method",
        "workers",
        "standardize",
        "rate_column",
        "spectrum_path",
        "profiles_path",
        "trace_path",
        "clusters_d",
        "clusters_sp",
    ):
        if hasattr(args, name):
            fields[name] = getattr(args, name)
    if hasattr(args, "h_list"):
        fields["h_list"] = tuple(float(tok) for tok in str(args.h_list).split(","))
    return RunConfig(**fields)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = _config_from_args(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    handlers = {
        "spectrum": cmd_spectrum,
        "sir": cmd_sir,
        "analyze": cmd_analyze,
        "verify": cmd_verify,
    }
    try:
        return handlers[cfg.command](cfg)
    except EdgeListParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except peeling.SpectrumMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except ThresholdUndefinedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_THRESHOLD
    except NodeSetMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NODESET
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
