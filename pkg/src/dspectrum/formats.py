"""CSV and JSON interchange between pipeline stages.

All writers emit LF newlines and fixed float formatting so repeated runs
with the same configuration produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
from typing import Sequence

import numpy as np

from .blocks import BlockPartition, DispersionReport, ICellGrid
from .graph import Graph
from .peeling import DSpectrum
from .sir import InfectionProfile


class NodeSetMismatchError(ValueError):
    """Two pipeline files (or a file and a graph) disagree on the node set."""


def h_label(h: float) -> str:
    return f"h{h:g}"


def rate_column(h: float) -> str:
    return f"rate_{h_label(h)}"


# -- spectrum CSV -----------------------------------------------------------


def write_spectrum_csv(path, g: Graph, spectrum: DSpectrum) -> None:
    header = ["node"] + [f"C_{-c}" for c in range(spectrum.delta + 1)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for v in range(g.node_count):
            writer.writerow([g.labels[v]] + [int(x) for x in spectrum.matrix[v]])


def read_spectrum_csv(path) -> tuple[list[str], DSpectrum]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty spectrum file, expected a header")
        if not header or header[0] != "node":
            raise ValueError(f"{path}: malformed spectrum header")
        orders = []
        for name in header[1:]:
            if not name.startswith("C_"):
                raise ValueError(f"{path}: unexpected column {name!r}")
            orders.append(int(name[2:]))
        if orders != [-c for c in range(len(orders))]:
            raise ValueError(f"{path}: spectrum columns must be C_0, C_-1, ...")
        labels: list[str] = []
        rows: list[list[int]] = []
        for row in reader:
            if not row:
                continue
            if len(row) != len(header):
                raise ValueError(f"{path}: row with {len(row)} fields, expected {len(header)}")
            labels.append(row[0])
            rows.append([int(x) for x in row[1:]])
    matrix = np.asarray(rows, dtype=np.int64).reshape(len(labels), len(orders))
    return labels, DSpectrum(matrix, len(orders) - 1)


# -- profile CSV --------------------------------------------------------------


def write_profiles_csv(
    path, g: Graph, profiles: Sequence[InfectionProfile], h_list: Sequence[float]
) -> None:
    header = ["node", "beta"] + [rate_column(h) for h in h_list]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for prof in profiles:
            writer.writerow(
                [g.labels[prof.node], f"{prof.beta:.12g}"]
                + [f"{r:.6f}" for r in prof.rates]
            )


def read_profiles_csv(path) -> tuple[list[str], float, list[float], np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty profile file, expected a header")
        if header[:2] != ["node", "beta"]:
            raise ValueError(f"{path}: malformed profile header")
        hs = []
        for name in header[2:]:
            if not name.startswith("rate_h"):
                raise ValueError(f"{path}: unexpected column {name!r}")
            hs.append(float(name[6:]))
        labels: list[str] = []
        beta = None
        rows: list[list[float]] = []
        for row in reader:
            if not row:
                continue
            if len(row) != len(header):
                raise ValueError(f"{path}: row with {len(row)} fields, expected {len(header)}")
            labels.append(row[0])
            if beta is None:
                beta = float(row[1])
            rows.append([float(x) for x in row[2:]])
    rates = np.asarray(rows, dtype=np.float64).reshape(len(labels), len(hs))
    return labels, float(beta if beta is not None else 0.0), hs, rates


# -- analysis outputs -----------------------------------------------------------


def _round(x: float | None) -> float | None:
    return None if x is None else float(x)


def analysis_payload(
    labels: Sequence[str],
    beta: float,
    cb: BlockPartition,
    core_values: Sequence[int],
    db: BlockPartition,
    sp: BlockPartition,
    grid: ICellGrid,
    report: DispersionReport,
    counts: np.ndarray,
) -> dict:
    """Assemble the analysis result tree written to JSON."""
    comparable = [
        r
        for r in report.rows
        if r.cell_count >= 2
        and r.global_dispersion is not None
        and r.mean_icell_dispersion is not None
    ]
    refined = [r for r in comparable if r.mean_icell_dispersion <= r.global_dispersion]
    global_disps = [r.global_dispersion for r in report.rows if r.global_dispersion is not None]
    cell_disps = [
        d for r in report.rows for d in r.icell_dispersions if d is not None
    ]
    return {
        "nodes": list(labels),
        "beta": beta,
        "rate_column": grid.rate_label,
        "cblocks": {
            "kind": cb.kind,
            "block_count": cb.block_count,
            "core_values": [int(c) for c in core_values],
            "assignment": cb.assignment.tolist(),
        },
        "dblocks": {
            "kind": db.kind,
            "block_count": db.block_count,
            "assignment": db.assignment.tolist(),
        },
        "spblocks": {
            "kind": sp.kind,
            "block_count": sp.block_count,
            "assignment": sp.assignment.tolist(),
        },
        "icell_grid": {
            "rows": list(grid.row_ids),
            "cols": list(grid.col_ids),
            "cells": [
                [
                    {
                        "size": cell.size,
                        "mean_rate": _round(cell.mean_rate),
                        "dispersion": _round(cell.dispersion),
                    }
                    for cell in row
                ]
                for row in grid.cells
            ],
        },
        "dispersion_report": [
            {
                "block": r.block,
                "size": r.size,
                "cell_count": r.cell_count,
                "global_dispersion": _round(r.global_dispersion),
                "icell_dispersions": [_round(d) for d in r.icell_dispersions],
                "mean_icell_dispersion": _round(r.mean_icell_dispersion),
            }
            for r in report.rows
        ],
        "contingency": {
            "row_kind": sp.kind,
            "col_kind": db.kind,
            "counts": counts.tolist(),
        },
        "summary": {
            "mean_cblock_dispersion": float(np.mean(global_disps)) if global_disps else None,
            "mean_icell_dispersion": float(np.mean(cell_disps)) if cell_disps else None,
            "comparable_blocks": len(comparable),
            "refined_blocks": len(refined),
        },
    }


def write_analysis_json(path, payload: dict) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def write_grid_csv(path, grid: ICellGrid, core_values: Sequence[int]) -> None:
    """Heatmap export: one row per C-block (ascending core), one column per D-block."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["core"] + [f"d{c}" for c in grid.col_ids])
        for r, core in zip(grid.row_ids, core_values):
            writer.writerow(
                [int(core)]
                + [
                    "" if cell.mean_rate is None else f"{cell.mean_rate:.6f}"
                    for cell in grid.cells[r]
                ]
            )
