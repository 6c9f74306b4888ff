"""Augmented feature table: assembly, standardization, and CSV round-trip.

Column layout is always raw | lap | deg | pagerank | nbr(p,q) blocks for the
selected groups; per-column group tags in the header make the metadata
recoverable on import.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

ALL_GROUPS = ("raw", "lap", "char", "nbr")


@dataclass(frozen=True)
class ColumnGroup:
    tag: str  # raw | lap | deg | pagerank | nbr(p,q)
    start: int
    stop: int

    @property
    def width(self):
        return self.stop - self.start


@dataclass(frozen=True)
class AugmentedTable:
    values: np.ndarray  # n x width, finite
    groups: tuple

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def width(self):
        return self.values.shape[1]

    def column_names(self):
        names = []
        for grp in self.groups:
            if grp.tag in ("deg", "pagerank"):
                names.append(grp.tag)
                continue
            m = re.fullmatch(r"nbr\((\d+),(\d+)\)", grp.tag)
            for j in range(grp.width):
                if m:
                    names.append(f"nbr_{m.group(1)}_{m.group(2)}_{j}")
                else:
                    names.append(f"{grp.tag}_{j}")
        return names


def _validate(values, groups):
    if not np.all(np.isfinite(values)):
        raise ValueError("table contains non-finite values")
    pos = 0
    for grp in groups:
        if grp.start != pos or grp.stop < grp.start:
            raise ValueError("group spans must be contiguous and ordered")
        pos = grp.stop
    if pos != values.shape[1]:
        raise ValueError("group spans do not cover all columns")


def assemble(
    X,
    embedding=None,
    chars=None,
    bank=None,
    mask=ALL_GROUPS,
) -> AugmentedTable:
    """Concatenate the selected feature blocks in canonical order.

    ``mask`` names any nonempty subset of {raw, lap, char, nbr}; the blocks
    required by the mask must be provided.
    """
    mask = set(mask)
    unknown = mask - set(ALL_GROUPS)
    if unknown:
        raise ValueError(f"unknown groups in mask: {sorted(unknown)}")
    if not mask:
        raise ValueError("mask must select at least one group")

    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    pieces, groups, pos = [], [], 0

    def add(tag, block):
        nonlocal pos
        block = np.asarray(block, dtype=np.float64)
        if block.ndim == 1:
            block = block[:, None]
        if block.shape[0] != n:
            raise ValueError(f"block {tag!r} has {block.shape[0]} rows, expected {n}")
        pieces.append(block)
        groups.append(ColumnGroup(tag, pos, pos + block.shape[1]))
        pos += block.shape[1]

    if "raw" in mask:
        add("raw", X)
    if "lap" in mask:
        if embedding is None:
            raise ValueError("mask selects 'lap' but no embedding given")
        add("lap", embedding.vectors)
    if "char" in mask:
        if chars is None:
            raise ValueError("mask selects 'char' but no characteristics given")
        add("deg", chars.degree_col)
        add("pagerank", chars.pagerank_col)
    if "nbr" in mask:
        if bank is None:
            raise ValueError("mask selects 'nbr' but no wavelet bank given")
        for (p, q), block in zip(bank.orders, bank.blocks):
            add(f"nbr({p},{q})", block)

    values = np.concatenate(pieces, axis=1)
    groups = tuple(groups)
    _validate(values, groups)
    return AugmentedTable(values=values, groups=groups)


def standardize(table: AugmentedTable, enabled: bool = False) -> AugmentedTable:
    """Optional per-column z-scoring (population std); near-constant columns
    pass through unchanged. Disabled returns the table as-is."""
    if not enabled:
        return table
    values = table.values.copy()
    mean = values.mean(axis=0)
    std = values.std(axis=0)
    live = std >= 1e-12
    values[:, live] = (values[:, live] - mean[live]) / std[live]
    return AugmentedTable(values=values, groups=table.groups)


def export_table(table: AugmentedTable, destination) -> None:
    """Write CSV with a group-tagged header; values rendered as shortest
    round-trip decimals."""
    names = table.column_names()
    with open(destination, "w") as fh:
        fh.write(",".join(names) + "\n")
        for row in table.values:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def _groups_from_names(names):
    def tag_of(name):
        if name in ("deg", "pagerank"):
            return name
        m = re.fullmatch(r"nbr_(\d+)_(\d+)_(\d+)", name)
        if m:
            return f"nbr({m.group(1)},{m.group(2)})"
        m = re.fullmatch(r"(\w+)_(\d+)", name)
        if m:
            return m.group(1)
        raise ValueError(f"unrecognized column name {name!r}")

    groups, start = [], 0
    tags = [tag_of(n) for n in names]
    for j in range(1, len(tags) + 1):
        if j == len(tags) or tags[j] != tags[start]:
            groups.append(ColumnGroup(tags[start], start, j))
            start = j
    return tuple(groups)


def import_table(source) -> AugmentedTable:
    with open(source) as fh:
        header = fh.readline().strip()
        if not header:
            raise ValueError(f"{source}: missing header row")
        names = header.split(",")
        try:
            [float(names[0])]
        except ValueError:
            pass
        else:
            raise ValueError(f"{source}: first row is numeric, expected a header")
        rows = []
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            fields = line.strip().split(",")
            if len(fields) != len(names):
                raise ValueError(
                    f"{source}:{lineno}: {len(fields)} fields, header has {len(names)}"
                )
            rows.append([float(f) for f in fields])
    values = np.asarray(rows, dtype=np.float64).reshape(len(rows), len(names))
    groups = _groups_from_names(names)
    _validate(values, groups)
    return AugmentedTable(values=values, groups=groups)
