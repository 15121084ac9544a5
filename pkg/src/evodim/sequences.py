"""Expectation-value sequences and their delay embeddings.

A sequence ``a(0), a(1), ...`` is embedded into Hankel matrices whose
rows are truncated delayed copies of the data.  All indices are 0-based:
``v[k, l] = a(k + l)`` and ``v_shift[k, l] = a(k + l + 1)``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import SequenceTooShort, ValidationError


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class RealSequence:
    """Finite real time series indexed by ``t = 0 .. len - 1``."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values)
        if np.iscomplexobj(values):
            raise ValidationError("sequence values must be real", invariant="real-valued")
        values = _frozen(values)
        if values.ndim != 1 or values.size == 0:
            raise ValidationError(
                f"sequence must be a nonempty 1-d array, got shape {values.shape}",
                invariant="nonempty 1-d",
            )
        bad = np.count_nonzero(~np.isfinite(values))
        if bad:
            raise ValidationError(
                f"sequence contains {bad} non-finite values", invariant="finite values", residual=bad
            )
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size

    def __getitem__(self, t):
        return self.values[t]

    @property
    def t_max(self) -> int:
        return self.values.size - 1

    @property
    def scale(self) -> float:
        """Largest absolute value in the sequence."""
        return float(np.max(np.abs(self.values)))


@dataclass(frozen=True, eq=False)
class MultiSequence:
    """Several observables sampled on the same time grid.

    ``values[alpha, t]`` holds observable ``alpha`` at time ``t``.
    """

    values: np.ndarray

    def __post_init__(self):
        try:
            values = _frozen(self.values)
        except ValueError as exc:
            raise ValidationError(
                "observables must all have the same length", invariant="rectangular"
            ) from exc
        if values.ndim == 1:
            values = _frozen(values[None, :])
        if values.ndim != 2 or values.size == 0:
            raise ValidationError("expected an (m, T) array", invariant="rectangular")
        if not np.all(np.isfinite(values)):
            raise ValidationError("sequence contains non-finite values", invariant="finite values")
        object.__setattr__(self, "values", values)

    @property
    def observable_count(self) -> int:
        return self.values.shape[0]

    def __len__(self) -> int:
        return self.values.shape[1]

    def observable(self, alpha: int) -> RealSequence:
        return RealSequence(self.values[alpha])


@dataclass(frozen=True, eq=False)
class HankelPair:
    """The ``n x n`` Hankel matrix ``v`` and its one-step shift ``v_shift``."""

    n: int
    v: np.ndarray
    v_shift: np.ndarray


def default_hankel_size(length: int) -> int:
    """Largest admissible Hankel size for ``length`` samples."""
    return length // 2


def _hankel_from(values: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    idx = np.add.outer(np.arange(n), np.arange(n))
    return values[..., idx], values[..., idx + 1]


def _check_size(length: int, n: int) -> None:
    if n < 1:
        raise ValidationError(f"Hankel size must be positive, got {n}", invariant="n >= 1")
    if length < 2 * n:
        raise SequenceTooShort(
            f"need at least {2 * n} samples for a {n}x{n} Hankel pair, got {length}",
            invariant="length >= 2n",
            residual=2 * n - length,
        )


def build_hankel(seq: RealSequence, n: int | None = None) -> HankelPair:
    """Build the Hankel pair of size ``n`` from ``seq``.

    Raises
    ------
    SequenceTooShort
        If ``len(seq) < 2 * n``.
    """
    if n is None:
        n = default_hankel_size(len(seq))
    n = int(n)
    _check_size(len(seq), n)
    v, v_shift = _hankel_from(seq.values, n)
    v.setflags(write=False)
    v_shift.setflags(write=False)
    return HankelPair(n=n, v=v, v_shift=v_shift)


def build_block_hankel(mseq: MultiSequence, n: int | None = None) -> np.ndarray:
    """Stack the Hankel matrices of every observable row-block-wise.

    Row ``alpha * n + k`` and column ``l`` hold ``a_alpha(k + l)``, so the
    columns are the truncated delayed matrices and the rank of the result
    counts how many of them are linearly independent.
    """
    if n is None:
        n = default_hankel_size(len(mseq))
    n = int(n)
    _check_size(len(mseq), n)
    v, _ = _hankel_from(mseq.values, n)
    return v.reshape(mseq.observable_count * n, n)


# -- CSV I/O -----------------------------------------------------------------


def _format_float(x: float) -> str:
    # repr gives the shortest string that parses back to the same double
    return repr(float(x))


def _parse_rows(text: str, source: str) -> tuple[list[str], np.ndarray]:
    reader = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise ValidationError(f"{source}: empty file", invariant="header present") from None
    if not header or header[0] != "t":
        raise ValidationError(f"{source}: first column must be 't'", invariant="header")
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise ValidationError(
                f"{source}:{lineno}: expected {len(header)} fields, got {len(row)}",
                invariant="rectangular",
            )
        try:
            t = int(row[0])
        except ValueError:
            raise ValidationError(
                f"{source}:{lineno}: time index {row[0]!r} is not an integer", invariant="integer t"
            ) from None
        if t != len(rows):
            raise ValidationError(
                f"{source}:{lineno}: expected t={len(rows)}, got t={t}",
                invariant="monotone t from 0 without gaps",
                residual=t - len(rows),
            )
        try:
            rows.append([float(c) for c in row[1:]])
        except ValueError as exc:
            raise ValidationError(f"{source}:{lineno}: {exc}", invariant="decimal values") from None
    if not rows:
        raise ValidationError(f"{source}: no data rows", invariant="nonempty")
    return header, np.array(rows, dtype=float)


def parse_sequence_csv(text: str, source: str = "<string>") -> RealSequence | MultiSequence:
    """Parse ``t,value`` (single) or ``t,a1,...,am`` (multi-observable) CSV."""
    header, data = _parse_rows(text, source)
    if header == ["t", "value"]:
        return RealSequence(data[:, 0])
    if len(header) >= 2 and all(h == f"a{i}" for i, h in enumerate(header[1:], start=1)):
        return MultiSequence(data.T)
    raise ValidationError(f"{source}: unrecognized header {','.join(header)}", invariant="header")


def format_sequence_csv(seq: RealSequence | MultiSequence) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    if isinstance(seq, MultiSequence):
        writer.writerow(["t"] + [f"a{i}" for i in range(1, seq.observable_count + 1)])
        for t in range(len(seq)):
            writer.writerow([t] + [_format_float(x) for x in seq.values[:, t]])
    else:
        writer.writerow(["t", "value"])
        for t, x in enumerate(seq.values):
            writer.writerow([t, _format_float(x)])
    return out.getvalue()


def read_sequence_csv(path) -> RealSequence | MultiSequence:
    path = Path(path)
    return parse_sequence_csv(path.read_text(), source=str(path))


def write_sequence_csv(seq: RealSequence | MultiSequence, path) -> None:
    Path(path).write_text(format_sequence_csv(seq))
