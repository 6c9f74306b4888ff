"""Scoring backends: built-in distance-weighted kNN and the external-process
file protocol.

The external protocol is bit-exact: the command template gets {train_x},
{train_y}, {test_x} and {out} paths substituted; train/test tables use the
CSV table format, labels are one 0/1 per line, and the backend must write
exactly one probability in [0, 1] per query row and exit 0.
"""

from __future__ import annotations

import shlex
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .table import AugmentedTable, ColumnGroup, export_table

EPS = 1e-12
DEFAULT_TIMEOUT = 600.0
DEFAULT_CHUNK = 10_000


class BackendProtocolError(RuntimeError):
    """External backend violated the file protocol."""


@dataclass(frozen=True)
class InContextTask:
    train_x: np.ndarray  # m x d
    train_y: np.ndarray  # m, values in {0, 1}
    test_x: np.ndarray  # u x d

    def __post_init__(self):
        tx = np.asarray(self.train_x, dtype=np.float64)
        ty = np.asarray(self.train_y, dtype=np.int64)
        qx = np.asarray(self.test_x, dtype=np.float64)
        if tx.ndim != 2 or qx.ndim != 2 or tx.shape[1] != qx.shape[1]:
            raise ValueError("train_x and test_x must be 2-d with equal widths")
        if ty.shape != (tx.shape[0],):
            raise ValueError("train_y length must match train_x rows")
        if tx.shape[0] < 2 or len(np.unique(ty)) < 2:
            raise ValueError("context needs >= 2 rows with both classes present")
        if not (np.isfinite(tx).all() and np.isfinite(qx).all()):
            raise ValueError("task contains non-finite values")
        object.__setattr__(self, "train_x", tx)
        object.__setattr__(self, "train_y", ty)
        object.__setattr__(self, "test_x", qx)

    @property
    def m(self):
        return self.train_x.shape[0]

    @property
    def u(self):
        return self.test_x.shape[0]


def predict_knn(task: InContextTask, k_neighbors: int = 5) -> np.ndarray:
    """Inverse-distance weighted kNN vote on z-scored columns.

    Column statistics come from the context rows only. An exact zero
    distance to any context row short-circuits to the mean label of the
    tied rows.
    """
    if not 1 <= k_neighbors <= task.m:
        raise ValueError(f"k_neighbors must be in [1, {task.m}]")
    mean = task.train_x.mean(axis=0)
    std = task.train_x.std(axis=0)
    std[std < 1e-12] = 1.0
    train = (task.train_x - mean) / std
    test = (task.test_x - mean) / std
    y = task.train_y.astype(np.float64)

    scores = np.empty(task.u)
    for i in range(task.u):
        dist = np.linalg.norm(train - test[i], axis=1)
        exact = dist == 0.0
        if exact.any():
            scores[i] = y[exact].mean()
            continue
        nn = np.argpartition(dist, k_neighbors - 1)[:k_neighbors]
        w = 1.0 / (EPS + dist[nn])
        scores[i] = float(np.dot(w, y[nn]) / w.sum())
    return scores


def _write_matrix(values: np.ndarray, path) -> None:
    groups = (ColumnGroup("raw", 0, values.shape[1]),)
    export_table(AugmentedTable(values=values, groups=groups), path)


def _read_scores(path, expected: int) -> np.ndarray:
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise BackendProtocolError(f"backend wrote no output file: {exc}") from exc
    lines = [ln for ln in lines if ln.strip()]
    if len(lines) != expected:
        raise BackendProtocolError(
            f"backend wrote {len(lines)} scores, expected {expected}"
        )
    scores = np.empty(expected)
    for i, ln in enumerate(lines):
        try:
            v = float(ln)
        except ValueError:
            raise BackendProtocolError(
                f"line {i + 1}: not a number: {ln.strip()!r}"
            ) from None
        if not 0.0 <= v <= 1.0:
            raise BackendProtocolError(f"line {i + 1}: score {v} outside [0, 1]")
        scores[i] = v
    return scores


def predict_external(
    task: InContextTask,
    command_template: str,
    working_dir=None,
    timeout: float = DEFAULT_TIMEOUT,
    chunk_rows: int = DEFAULT_CHUNK,
) -> np.ndarray:
    """Run an external backend process over the file protocol.

    Query sets larger than ``chunk_rows`` are split into chunks sharing the
    same context; chunk order is preserved on concatenation.
    """
    if task.u > chunk_rows:
        parts = []
        for lo in range(0, task.u, chunk_rows):
            sub = InContextTask(task.train_x, task.train_y, task.test_x[lo : lo + chunk_rows])
            parts.append(
                predict_external(sub, command_template, working_dir, timeout, chunk_rows)
            )
        return np.concatenate(parts)

    with tempfile.TemporaryDirectory(dir=working_dir) as tmp:
        tmp = Path(tmp)
        paths = {
            "train_x": tmp / "train_x.csv",
            "train_y": tmp / "train_y.txt",
            "test_x": tmp / "test_x.csv",
            "out": tmp / "scores.txt",
        }
        _write_matrix(task.train_x, paths["train_x"])
        paths["train_y"].write_text("".join(f"{v}\n" for v in task.train_y))
        _write_matrix(task.test_x, paths["test_x"])

        cmd = shlex.split(
            command_template.format(**{k: str(v) for k, v in paths.items()})
        )
        try:
            proc = subprocess.run(
                cmd, cwd=working_dir, capture_output=True, text=True, timeout=timeout
            )
        except subprocess.TimeoutExpired as exc:
            raise BackendProtocolError(
                f"backend timed out after {timeout}s: {command_template}"
            ) from exc
        if proc.returncode != 0:
            raise BackendProtocolError(
                f"backend exited {proc.returncode}; stderr:\n{proc.stderr.strip()}"
            )
        return _read_scores(paths["out"], task.u)
