"""Reading, validating and writing day-level step data (wide CSV)."""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError, ParseError, ValidationError

ID_COLUMNS = ("day_id", "subject_id")


@dataclass(frozen=True)
class StepDay:
    day_id: str
    counts: np.ndarray
    subject_id: Optional[str] = None
    epoch_minutes: int = 1

    @property
    def T(self) -> int:
        return int(self.counts.shape[0])


class DayMatrix:
    """An ordered set of days sharing one epoch grid.

    ``counts`` is an ``(N, T)`` array. Step data are stored as integers;
    the continuous simulation families are stored as floats.
    """

    def __init__(self, day_ids, counts, subject_ids=None, epoch_minutes=1):
        counts = np.asarray(counts)
        if counts.ndim != 2:
            raise ValidationError("counts must be a 2-D array (days x epochs)")
        n, T = counts.shape
        if n < 1 or T < 1:
            raise ValidationError("a day matrix needs at least one day and one epoch")
        day_ids = [str(d) for d in day_ids]
        if len(day_ids) != n:
            raise ValidationError(f"{len(day_ids)} day ids for {n} rows")
        seen = set()
        for d in day_ids:
            if d in seen:
                raise ValidationError(f"duplicate day_id {d!r}")
            seen.add(d)
        if subject_ids is None:
            subject_ids = [None] * n
        subject_ids = [s if s not in ("",) else None for s in subject_ids]
        if len(subject_ids) != n:
            raise ValidationError(f"{len(subject_ids)} subject ids for {n} rows")
        if counts.dtype.kind in "iu":
            counts = counts.astype(np.int64)
        elif counts.dtype.kind == "f":
            if not np.all(np.isfinite(counts)):
                raise ValidationError("counts must be finite")
            counts = counts.astype(np.float64)
        else:
            raise ValidationError(f"unsupported count dtype {counts.dtype}")
        if np.any(counts < 0):
            i, t = np.argwhere(counts < 0)[0]
            raise ValidationError(f"negative count at day {day_ids[i]!r}, epoch {t + 1}")
        if int(epoch_minutes) < 1:
            raise ValidationError("epoch_minutes must be a positive integer")
        counts.setflags(write=False)
        self.counts = counts
        self.day_ids = day_ids
        self.subject_ids = list(subject_ids)
        self.epoch_minutes = int(epoch_minutes)

    @property
    def N(self) -> int:
        return self.counts.shape[0]

    @property
    def T(self) -> int:
        return self.counts.shape[1]

    @property
    def is_integer(self) -> bool:
        return self.counts.dtype.kind in "iu"

    @property
    def has_subjects(self) -> bool:
        return any(s is not None for s in self.subject_ids)

    @property
    def days(self) -> list[StepDay]:
        return [self[i] for i in range(self.N)]

    def __len__(self):
        return self.N

    def __getitem__(self, i) -> StepDay:
        return StepDay(self.day_ids[i], self.counts[i], self.subject_ids[i], self.epoch_minutes)

    def subset(self, idx: Sequence[int]) -> "DayMatrix":
        idx = list(idx)
        return DayMatrix(
            [self.day_ids[i] for i in idx],
            self.counts[idx],
            [self.subject_ids[i] for i in idx],
            self.epoch_minutes,
        )

    @classmethod
    def from_days(cls, days: Sequence[StepDay]) -> "DayMatrix":
        if not days:
            raise ValidationError("no days supplied")
        lengths = {d.T for d in days}
        if len(lengths) != 1:
            raise ValidationError(f"days have differing lengths {sorted(lengths)}")
        return cls(
            [d.day_id for d in days],
            np.stack([np.asarray(d.counts) for d in days]),
            [d.subject_id for d in days],
            days[0].epoch_minutes,
        )

    def __repr__(self):
        return f"DayMatrix(N={self.N}, T={self.T}, dtype={self.counts.dtype})"


def epoch_columns(T: int) -> list[str]:
    width = max(4, len(str(T)))
    return [f"t{j:0{width}d}" for j in range(1, T + 1)]


def _parse_cell(text, line, col, integer):
    if text.strip() == "":
        raise ValidationError(f"line {line}: blank cell in column {col}")
    try:
        value = int(text) if integer else float(text)
    except ValueError:
        kind = "integer" if integer else "numeric"
        raise ValidationError(f"line {line}: non-{kind} count {text!r} in column {col}") from None
    if integer and value < 0 or not integer and not value >= 0:
        raise ValidationError(f"line {line}: invalid count {text!r} in column {col}")
    return value


def read_day_matrix(path, format: str = "wide-csv", integer: bool = True) -> DayMatrix:
    """Read a wide CSV (one row per day) into a validated :class:`DayMatrix`.

    Set ``integer=False`` to accept real-valued curves (the continuous
    simulation families); counts must still be finite and non-negative.
    """
    if format != "wide-csv":
        raise ConfigError(f"unsupported format {format!r}")
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty file", line=1) from None
        if tuple(header[:2]) != ID_COLUMNS or len(header) < 3:
            raise ParseError("header must start with day_id,subject_id followed by epoch columns", line=1)
        T = len(header) - 2
        if header[2:] != epoch_columns(T):
            raise ParseError("epoch columns must be t0001..tNNNN in order", line=1)
        ids, subjects, rows = [], [], []
        for row in reader:
            line = reader.line_num
            if not row:
                continue
            if len(row) != T + 2:
                raise ParseError(f"expected {T + 2} columns, found {len(row)}", line=line)
            if row[0] == "":
                raise ValidationError(f"line {line}: empty day_id")
            ids.append(row[0])
            subjects.append(row[1] or None)
            rows.append([_parse_cell(c, line, header[j + 2], integer) for j, c in enumerate(row[2:])])
    if not rows:
        raise ValidationError("file contains no days")
    dtype = np.int64 if integer else np.float64
    return DayMatrix(ids, np.array(rows, dtype=dtype), subjects)


def format_day_matrix(dm: DayMatrix) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(ID_COLUMNS) + epoch_columns(dm.T))
    fmt = str if dm.is_integer else repr
    for i in range(dm.N):
        values = dm.counts[i].tolist()
        writer.writerow([dm.day_ids[i], dm.subject_ids[i] or ""] + [fmt(v) for v in values])
    return buf.getvalue()


def write_day_matrix(dm: DayMatrix, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(format_day_matrix(dm))


def validate_grid(dm: DayMatrix, q2: int) -> None:
    """Check that the mean-score blocks tile the day exactly."""
    if int(q2) < 1:
        raise ConfigError(f"q2 must be positive, got {q2}")
    if dm.T % int(q2):
        raise ConfigError(f"T={dm.T} is not divisible by q2={q2}")
