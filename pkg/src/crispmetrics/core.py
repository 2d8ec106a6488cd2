"""Confusion matrices, scored datasets and thresholding.

Cell naming follows the usual 2x2 layout with true class on the columns and
predicted class on the rows::

                 true 0   true 1
    predicted 0    a        b
    predicted 1    c        d

so ``a`` = TN, ``b`` = FN, ``c`` = FP and ``d`` = TP.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence, Tuple, Union


class InputError(ValueError):
    """Raised for malformed counts, records or input files."""


@dataclass(frozen=True)
class ConfusionMatrix:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        for name in "abcd":
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int):
                raise InputError(f"cell {name} must be an integer, got {v!r}")
            if v < 0:
                raise InputError(f"cell {name} must be nonnegative, got {v}")
        if self.n == 0:
            raise InputError("confusion matrix must contain at least one object")

    @classmethod
    def from_string(cls, text: str) -> "ConfusionMatrix":
        """Parse ``"a,b,c,d"``."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 4:
            raise InputError(f"expected four comma-separated counts, got {text!r}")
        try:
            cells = [int(p) for p in parts]
        except ValueError:
            raise InputError(f"counts must be integers, got {text!r}") from None
        return cls(*cells)

    @property
    def n(self) -> int:
        return self.a + self.b + self.c + self.d

    @property
    def pi0(self) -> float:
        return (self.a + self.c) / self.n

    @property
    def pi1(self) -> float:
        return (self.b + self.d) / self.n

    @property
    def p0(self) -> float:
        return (self.a + self.b) / self.n

    @property
    def p1(self) -> float:
        return (self.c + self.d) / self.n

    # positive-class vocabulary
    tn = property(lambda self: self.a)
    fn = property(lambda self: self.b)
    fp = property(lambda self: self.c)
    tp = property(lambda self: self.d)

    def as_tuple(self) -> Tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def swapped(self) -> "ConfusionMatrix":
        """The matrix obtained by exchanging the labels 0 and 1."""
        return ConfusionMatrix(self.d, self.c, self.b, self.a)

    def __str__(self):
        return f"(a={self.a}, b={self.b}, c={self.c}, d={self.d})"


@dataclass(frozen=True)
class Record:
    label: int
    score: float
    id: Optional[str] = None


@dataclass(frozen=True)
class ScoredDataset:
    records: Tuple[Record, ...]

    def __post_init__(self):
        if len(self.records) == 0:
            raise InputError("scored dataset must contain at least one record")
        for r in self.records:
            if r.label not in (0, 1):
                raise InputError(f"true label must be 0 or 1, got {r.label!r}")
            if not math.isfinite(r.score):
                raise InputError(f"score must be finite, got {r.score!r}")

    @classmethod
    def from_arrays(
        cls,
        labels: Iterable[int],
        scores: Iterable[float],
        ids: Optional[Iterable[str]] = None,
    ) -> "ScoredDataset":
        labels = [int(x) for x in labels]
        scores = [float(x) for x in scores]
        if len(labels) != len(scores):
            raise InputError("labels and scores differ in length")
        ids = [None] * len(labels) if ids is None else [str(i) for i in ids]
        if len(ids) != len(labels):
            raise InputError("ids and labels differ in length")
        return cls(tuple(Record(lab, s, i) for lab, s, i in zip(labels, scores, ids)))

    def __len__(self):
        return len(self.records)

    @property
    def labels(self) -> list:
        return [r.label for r in self.records]

    @property
    def scores(self) -> list:
        return [r.score for r in self.records]

    @property
    def ids(self) -> Optional[list]:
        if any(r.id is None for r in self.records):
            return None
        return [r.id for r in self.records]

    @property
    def class_sizes(self) -> Tuple[int, int]:
        n1 = sum(r.label for r in self.records)
        return len(self.records) - n1, n1


def _check_threshold(t: float) -> float:
    t = float(t)
    if math.isnan(t):
        raise InputError("threshold must not be NaN")
    return t


def build_confusion(data: ScoredDataset, t: float) -> ConfusionMatrix:
    """Classify each record as 1 iff its score is strictly larger than ``t``.

    A score equal to ``t`` goes to class 0. ``t`` may be ``-inf`` or ``inf``
    to obtain the all-class-1 or all-class-0 split.
    """
    t = _check_threshold(t)
    a = b = c = d = 0
    for r in data.records:
        if r.score > t:
            if r.label == 1:
                d += 1
            else:
                c += 1
        elif r.label == 1:
            b += 1
        else:
            a += 1
    return ConfusionMatrix(a, b, c, d)


def expand_labels(m: ConfusionMatrix) -> Tuple[list, list]:
    """Expand counts into (true, predicted) label vectors of length n.

    Pairs are laid out in cell order a, b, c, d: a copies of (0, 0), then b of
    (1, 0), c of (0, 1) and d of (1, 1).
    """
    true = [0] * m.a + [1] * m.b + [0] * m.c + [1] * m.d
    pred = [0] * (m.a + m.b) + [1] * (m.c + m.d)
    return true, pred


# --------------------------------------------------------------------------
# CSV ingestion
# --------------------------------------------------------------------------

DATASET_HEADER = ("id", "true_label", "score")


def _parse_label(raw: str, lineno: int) -> int:
    raw = raw.strip()
    if raw not in ("0", "1"):
        raise InputError(f"line {lineno}: true_label must be 0 or 1, got {raw!r}")
    return int(raw)


def _parse_float(raw: str, lineno: int, field: str) -> float:
    try:
        v = float(raw.strip())
    except ValueError:
        raise InputError(f"line {lineno}: {field} is not a number: {raw!r}") from None
    if not math.isfinite(v):
        raise InputError(f"line {lineno}: {field} must be finite, got {raw!r}")
    return v


def _read_rows(source: Union[str, Path, io.TextIOBase], header: Sequence[str]):
    if isinstance(source, (str, Path)):
        try:
            with open(source, newline="", encoding="utf-8") as fh:
                text = fh.read()
        except (OSError, UnicodeDecodeError) as exc:
            raise InputError(f"cannot read {source}: {exc}") from None
    else:
        text = source.read()
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        first = next(reader)
    except StopIteration:
        raise InputError("line 1: empty file, expected header") from None
    got = tuple(h.strip().lstrip("﻿") for h in first)
    if got != tuple(header):
        raise InputError(f"line 1: expected header {','.join(header)!r}, got {','.join(got)!r}")
    for row in reader:
        lineno = reader.line_num
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise InputError(f"line {lineno}: expected {len(header)} fields, got {len(row)}")
        yield lineno, row


def read_dataset_csv(source) -> ScoredDataset:
    """Read an ``id,true_label,score`` CSV (UTF-8, LF or CRLF)."""
    records = []
    for lineno, (rid, label, score) in _read_rows(source, DATASET_HEADER):
        records.append(Record(_parse_label(label, lineno), _parse_float(score, lineno, "score"), rid.strip()))
    if not records:
        raise InputError("dataset has no records")
    return ScoredDataset(tuple(records))


def write_dataset_csv(data: ScoredDataset, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(DATASET_HEADER)
        for i, r in enumerate(data.records):
            w.writerow([r.id if r.id is not None else str(i), r.label, repr(r.score)])
