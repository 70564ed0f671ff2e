"""
Run Storage

Writes the artifacts of a run into its output directory: snapshot CSV, report
JSON files and the plain-text execution log. All files are written after the
computation has finished, by a single writer.
"""

import csv
import json
from pathlib import Path
from typing import Any, Iterator, List, Union

import numpy as np
from pydantic import BaseModel

from ..core.assembler import GlobalSolution
from ..core.grid import d_t, d_x

SNAPSHOT_HEADER = ["k", "j", "t", "x", "u", "ut", "ux"]


def _num(v: float) -> str:
    return format(float(v), ".17g")


def snapshot_rows(solution: GlobalSolution) -> Iterator[List[str]]:
    """Rows ordered by slab, cell, then t-major / x-minor over the tile nodes."""
    for slab in solution.slabs:
        for j in slab.cell_range:
            u = slab.tiles[j].u
            ut = d_t(u.values, u.tile.ht)
            ux = d_x(u.values, u.tile.hx)
            t_nodes, x_nodes = u.tile.t_nodes, u.tile.x_nodes
            for it in range(u.tile.nt):
                for ix in range(u.tile.nx):
                    yield [
                        str(slab.slab_k),
                        str(j),
                        _num(t_nodes[it]),
                        _num(x_nodes[ix]),
                        _num(u.values[it, ix]),
                        _num(ut[it, ix]),
                        _num(ux[it, ix]),
                    ]


class RunStorage:
    """One output directory per run."""

    def __init__(self, out_dir: Union[str, Path] = "out"):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)

    def path(self, name: str) -> Path:
        return self.out_dir / name

    def write_json(self, name: str, payload: Any) -> Path:
        if isinstance(payload, BaseModel):
            payload = payload.model_dump(mode="json")
        target = self.path(name)
        target.write_text(json.dumps(payload, indent=2, allow_nan=False) + "\n", encoding="utf-8")
        return target

    def write_snapshots(self, solution: GlobalSolution, name: str = "snapshots.csv") -> Path:
        target = self.path(name)
        with open(target, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(SNAPSHOT_HEADER)
            writer.writerows(snapshot_rows(solution))
        return target

    def write_log(self, lines: List[str], name: str = "execution.log") -> Path:
        target = self.path(name)
        target.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return target


def read_snapshots(path: Union[str, Path]) -> np.ndarray:
    """Snapshot CSV back into a float array with the header's column order."""
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
