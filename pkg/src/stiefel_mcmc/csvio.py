"""CSV ingestion and emission for the command-line harness.

Conventions: comma separation, `NA` (or an empty field) for missing
values, an optional header row that is auto-detected (a first row with
any field that is neither numeric nor a missing marker). All numeric
output is written with shortest round-trip precision: the printed string
parses back to the exact same double.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .eigenmodel import NodeCovariates, SymmetricBinaryNetwork
from .errors import ParseError

MISSING_TOKENS = {"", "NA", "NaN", "nan"}


def format_value(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if np.isnan(x):
        return "NA"
    return repr(x)


def _is_missing(tok: str) -> bool:
    return tok.strip() in MISSING_TOKENS


def _to_float(tok: str):
    tok = tok.strip()
    if _is_missing(tok):
        return np.nan
    try:
        return float(tok)
    except ValueError:
        return None


def _read_rows(path) -> list[tuple[int, list[str]]]:
    """All non-blank CSV rows with their 1-based line numbers."""
    path = Path(path)
    rows = []
    try:
        with open(path, newline="") as fh:
            for lineno, row in enumerate(csv.reader(fh), start=1):
                if row and any(f.strip() for f in row):
                    rows.append((lineno, row))
    except OSError as exc:
        raise exc
    if not rows:
        raise ParseError(f"{path}: file contains no data")
    return rows


def _split_header(rows):
    """Detect and strip a header row: a first row with a field that is
    neither numeric nor a missing marker."""
    first = rows[0][1]
    if any(_to_float(tok) is None for tok in first):
        return [tok.strip() for tok in first], rows[1:]
    return None, rows


def read_matrix(path) -> np.ndarray:
    """Float matrix; NA/empty becomes NaN. Raises ParseError with the file
    line number for ragged or non-numeric rows."""
    path = Path(path)
    header, rows = _split_header(_read_rows(path))
    if not rows:
        raise ParseError(f"{path}: no data rows after header")
    width = len(rows[0][1])
    out = np.empty((len(rows), width))
    for r, (lineno, row) in enumerate(rows):
        if len(row) != width:
            raise ParseError(
                f"{path}:{lineno}: expected {width} fields, found {len(row)}")
        for c, tok in enumerate(row):
            val = _to_float(tok)
            if val is None:
                raise ParseError(
                    f"{path}:{lineno}: field {c + 1} is not numeric: {tok.strip()!r}")
            out[r, c] = val
    return out


def _read_binary_table(path, what: str, skip_diagonal: bool = False):
    """Shared 0/1/NA table reader for adjacency and covariate files.

    With skip_diagonal, cell (r, r) is forced missing without validation
    (the adjacency diagonal is undefined and ignored whatever it holds).
    """
    path = Path(path)
    header, rows = _split_header(_read_rows(path))
    if not rows:
        raise ParseError(f"{path}: no data rows after header")
    width = len(rows[0][1])
    table = np.empty((len(rows), width))
    for r, (lineno, row) in enumerate(rows):
        if len(row) != width:
            raise ParseError(
                f"{path}:{lineno}: expected {width} fields, found {len(row)}")
        for c, tok in enumerate(row):
            if skip_diagonal and c == r:
                table[r, c] = np.nan
                continue
            val = _to_float(tok)
            if val is None or (not np.isnan(val) and val not in (0.0, 1.0)):
                raise ParseError(
                    f"{path}:{lineno}: {what} entry at field {c + 1} must be "
                    f"0, 1 or NA, got {tok.strip()!r}")
            table[r, c] = val
    return header, table


def parse_adjacency(path) -> SymmetricBinaryNetwork:
    """Validated n x n symmetric binary network; the diagonal is ignored."""
    path = Path(path)
    _, table = _read_binary_table(path, "adjacency", skip_diagonal=True)
    if table.shape[0] != table.shape[1]:
        raise ParseError(
            f"{path}: adjacency must be square, got {table.shape[0]}x{table.shape[1]}")
    return SymmetricBinaryNetwork.from_dense(table)


def parse_covariates(path, n: int | None = None) -> NodeCovariates:
    """Node covariate table (0/1/NA), optionally checked against n rows."""
    path = Path(path)
    header, table = _read_binary_table(path, "covariate")
    if n is not None and table.shape[0] != n:
        raise ParseError(
            f"{path}: covariate table has {table.shape[0]} rows, network has {n} nodes")
    names = tuple(header) if header else ()
    return NodeCovariates(table=table, names=names)


def write_matrix(path, mat, header: list[str] | None = None) -> None:
    mat = np.atleast_2d(np.asarray(mat))
    with open(path, "w", newline="") as fh:
        if header:
            fh.write(",".join(header) + "\n")
        for row in mat:
            fh.write(",".join(format_value(v) for v in row) + "\n")


def write_trace(path, colnames: list[str], iterations, columns) -> None:
    """Trace file: header `iter,<colnames...>`, one row per saved state."""
    columns = np.atleast_2d(np.asarray(columns))
    with open(path, "w", newline="") as fh:
        fh.write(",".join(["iter"] + list(colnames)) + "\n")
        for it, row in zip(iterations, columns):
            fh.write(",".join([str(int(it))] + [format_value(v) for v in row]) + "\n")


def write_manifest(path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
