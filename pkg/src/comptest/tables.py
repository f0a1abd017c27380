"""
Reading and writing count tables as CSV.

Layout: UTF-8, comma separated, '.' decimal point, first row holds headers,
samples in rows and taxa in columns (``transpose=True`` accepts the
taxa-by-samples layout). The first column is taken as sample identifiers
when its header is blank or a usual id name, or when any of its cells is
not numeric.
"""

import csv
import hashlib
from dataclasses import dataclass

import numpy as np

_ID_HEADERS = {"", "id", "sample", "sample_id", "sampleid", "#sampleid", "#otu id", "otu_id"}


class DataError(ValueError):
    """Malformed or inconsistent input data."""


@dataclass
class CountTable:
    values: np.ndarray
    row_ids: list
    col_ids: list

    @property
    def shape(self):
        return self.values.shape

    def select_rows(self, mask):
        mask = np.asarray(mask)
        return CountTable(self.values[mask],
                          [r for r, keep in zip(self.row_ids, mask) if keep],
                          list(self.col_ids))

    def select_columns(self, idx):
        idx = np.asarray(idx, dtype=int)
        return CountTable(self.values[:, idx], list(self.row_ids),
                          [self.col_ids[i] for i in idx])


def _is_number(text):
    try:
        float(text)
    except ValueError:
        return False
    return True


def file_digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def read_count_csv(path, transpose=False, label_column=None):
    """Load a count table.

    Parameters
    ----------
    path : str or path-like
    transpose : bool
        The file has taxa in rows and samples in columns.
    label_column : str, optional
        Header of a column holding group labels (sample-major layout only).
        It is removed from the counts.

    Returns
    -------
    table : CountTable
    labels : list of str or None

    Raises
    ------
    DataError
        On ragged rows, non-numeric cells, duplicate headers or an empty file.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if len(rows) < 2:
        raise DataError(f"{path}: need a header row and at least one data row")
    header = [h.strip() for h in rows[0]]
    body = rows[1:]
    for lineno, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise DataError(f"{path}: ragged row at line {lineno}: "
                            f"{len(row)} fields, header has {len(header)}")

    labels = None
    if label_column is not None:
        if transpose:
            raise DataError("a label column is only supported in the samples-by-taxa layout")
        if label_column not in header:
            raise DataError(f"{path}: label column {label_column!r} not found")
        k = header.index(label_column)
        labels = [row[k].strip() for row in body]
        header = header[:k] + header[k + 1:]
        body = [row[:k] + row[k + 1:] for row in body]

    first = [row[0].strip() for row in body]
    has_ids = header[0].lower() in _ID_HEADERS or not all(_is_number(c) for c in first)
    if has_ids:
        row_ids, header, body = first, header[1:], [row[1:] for row in body]
    else:
        row_ids = [str(i) for i in range(len(body))]

    values = np.empty((len(body), len(header)))
    for i, row in enumerate(body):
        for j, cell in enumerate(row):
            try:
                values[i, j] = float(cell)
            except ValueError:
                raise DataError(f"{path}: non-numeric cell {cell!r} at data row {i + 1}, "
                                f"column {header[j]!r}") from None
    if not np.all(np.isfinite(values)):
        raise DataError(f"{path}: non-finite values")

    if transpose:
        row_ids, header, values = header, row_ids, values.T.copy()
    if len(set(header)) != len(header):
        raise DataError(f"{path}: duplicate taxon names in header")
    return CountTable(values, list(row_ids), list(header)), labels


def align_columns(first, second):
    """Reorder `second` to the column order of `first`.

    Raises
    ------
    DataError
        If the two tables do not have the same set of taxa.
    """
    if set(first.col_ids) != set(second.col_ids):
        only1 = sorted(set(first.col_ids) - set(second.col_ids))[:5]
        only2 = sorted(set(second.col_ids) - set(first.col_ids))[:5]
        raise DataError(f"column mismatch between groups: only in first {only1}, "
                        f"only in second {only2}")
    pos = {c: i for i, c in enumerate(second.col_ids)}
    return second.select_columns([pos[c] for c in first.col_ids])


def write_count_csv(table, path_or_file):
    """Write a table in the samples-by-taxa layout with full float precision."""
    def _write(fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["sample_id", *table.col_ids])
        for rid, row in zip(table.row_ids, table.values):
            writer.writerow([rid, *(_fmt(v) for v in row)])

    if hasattr(path_or_file, "write"):
        _write(path_or_file)
    else:
        with open(path_or_file, "w", newline="", encoding="utf-8") as fh:
            _write(fh)


def _fmt(v):
    v = float(v)
    return str(int(v)) if v.is_integer() and abs(v) < 1e15 else repr(v)
