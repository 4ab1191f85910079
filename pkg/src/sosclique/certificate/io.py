"""Exact CSV dumps of rational matrices indexed by vertex subsets."""
from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, TextIO

import numpy as np

from ..combinat import format_subset, parse_subset
from ..ratmat import RatMatrix

__all__ = ["MatrixDump", "format_rational", "dump_matrix", "load_matrix"]


@dataclass
class MatrixDump:
    matrix: RatMatrix
    labels: list[tuple[int, ...]]
    metadata: dict = field(default_factory=dict)


def format_rational(value: Fraction | int) -> str:
    """``"p/q"`` in lowest terms, or ``"p"`` when the denominator is 1."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _entry_strings(matrix: RatMatrix) -> list[list[str]]:
    num, den = matrix.num, matrix.den
    if num.dtype == object:
        return [[format_rational(Fraction(int(x), den)) for x in row] for row in num]
    g = np.gcd(num, den)
    g[g == 0] = 1
    p, q = num // g, den // g
    out = []
    for prow, qrow in zip(p.tolist(), q.tolist()):
        out.append([str(a) if b == 1 else f"{a}/{b}" for a, b in zip(prow, qrow)])
    return out


def dump_matrix(matrix: RatMatrix, labels: Sequence[Sequence[int]],
                target: str | os.PathLike | TextIO, metadata: dict | None = None) -> None:
    """Write ``# key: json`` metadata lines, a header of labels, then one CSV row per matrix row."""
    if matrix.shape != (len(labels), len(labels)):
        raise ValueError(f"{len(labels)} labels for a {matrix.shape} matrix")
    if hasattr(target, "write"):
        _write(matrix, labels, target, metadata or {})
        return
    with open(target, "w", newline="") as fh:
        _write(matrix, labels, fh, metadata or {})


def _write(matrix: RatMatrix, labels, fh: TextIO, metadata: dict) -> None:
    for key, value in metadata.items():
        fh.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow([format_subset(s) for s in labels])
    writer.writerows(_entry_strings(matrix))


def load_matrix(source: str | os.PathLike | TextIO) -> MatrixDump:
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, newline="") as fh:
            text = fh.read()
    metadata = {}
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition(":")
            metadata[key.strip()] = json.loads(value) if value.strip() else None
        elif line.strip():
            body.append(line)
    if not body:
        raise ValueError("matrix dump has no header row")
    rows = list(csv.reader(io.StringIO("\n".join(body))))
    labels = [parse_subset(lbl) for lbl in rows[0]]
    entries = rows[1:]
    if len(entries) != len(labels) or any(len(row) != len(labels) for row in entries):
        raise ValueError(f"expected a {len(labels)}x{len(labels)} body")
    matrix = RatMatrix.from_fractions([[Fraction(x) for x in row] for row in entries])
    return MatrixDump(matrix=matrix, labels=labels, metadata=metadata)
