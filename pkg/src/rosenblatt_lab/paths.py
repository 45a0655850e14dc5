"""Container for sampled paths on a time grid, with CSV round-tripping."""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError


@dataclass
class PathEnsemble:
    grid: np.ndarray
    paths: np.ndarray  # shape (n_paths, len(grid))
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.paths = np.atleast_2d(np.asarray(self.paths, dtype=float))
        if self.grid.ndim != 1 or np.any(np.diff(self.grid) <= 0):
            raise DomainError("grid must be strictly increasing")
        if self.paths.shape[1] != self.grid.size:
            raise DomainError("paths and grid have mismatched lengths")

    @property
    def n_paths(self) -> int:
        return self.paths.shape[0]

    def at(self, t: float) -> np.ndarray:
        """Values of every path at grid time ``t``."""
        idx = np.flatnonzero(np.isclose(self.grid, t, rtol=0, atol=1e-12))
        if idx.size == 0:
            raise DomainError(f"time {t} is not on the grid")
        return self.paths[:, idx[0]]

    def to_csv(self, max_paths: int | None = None) -> str:
        """'#'-prefixed JSON meta line, then a header ``t,path_0,...`` and one row per time."""
        k = self.n_paths if max_paths is None else min(max_paths, self.n_paths)
        buf = io.StringIO()
        buf.write("# " + json.dumps(self.meta, sort_keys=True, default=_json_default) + "\n")
        buf.write(",".join(["t"] + [f"path_{i}" for i in range(k)]) + "\n")
        for j, t in enumerate(self.grid):
            row = [repr(float(t))] + [repr(float(v)) for v in self.paths[:k, j]]
            buf.write(",".join(row) + "\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "PathEnsemble":
        lines = text.splitlines()
        meta = {}
        if lines and lines[0].startswith("#"):
            meta = json.loads(lines[0][1:])
            lines = lines[1:]
        data = np.loadtxt(io.StringIO("\n".join(lines[1:])), delimiter=",", ndmin=2)
        return cls(data[:, 0], data[:, 1:].T, meta)


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return str(obj)
