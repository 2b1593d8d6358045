"""Observed offspring class frequencies and their file formats.

Two on-disk formats are supported:

* raw observations: whitespace-separated nonnegative integers, normally one per line;
* frequency CSV: a ``class,count`` header followed by one row per class.
"""
from __future__ import annotations

import csv
import io
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParameterDomainError


@dataclass(frozen=True)
class FrequencyTable:
    """Class frequencies f_0, f_1, ..., f_M of a sample of offspring counts."""

    freqs: tuple[int, ...]

    def __post_init__(self):
        freqs = tuple(int(f) for f in self.freqs)
        if not freqs:
            raise ParameterDomainError("frequency table is empty")
        if any(f < 0 for f in freqs):
            raise ParameterDomainError("frequencies must be nonnegative")
        if sum(freqs) < 1:
            raise ParameterDomainError("frequency table must contain at least one observation")
        # trailing empty classes carry no information
        while len(freqs) > 1 and freqs[-1] == 0:
            freqs = freqs[:-1]
        object.__setattr__(self, "freqs", freqs)

    @classmethod
    def from_observations(cls, observations: Iterable[int]) -> FrequencyTable:
        obs = np.asarray(list(observations) if not isinstance(observations, np.ndarray) else observations)
        if obs.size == 0:
            raise ParameterDomainError("no observations")
        if not np.issubdtype(obs.dtype, np.integer):
            if not np.all(np.equal(np.mod(obs, 1), 0)):
                raise ParameterDomainError("observations must be integers")
            obs = obs.astype(np.int64)
        if obs.min() < 0:
            raise ParameterDomainError("observations must be nonnegative")
        return cls(tuple(np.bincount(obs).tolist()))

    @classmethod
    def from_counts(cls, counts: Mapping[int, int]) -> FrequencyTable:
        if not counts:
            raise ParameterDomainError("no classes given")
        if min(counts) < 0:
            raise ParameterDomainError("classes must be nonnegative")
        freqs = [0] * (max(counts) + 1)
        for m, f in counts.items():
            freqs[m] += f
        return cls(tuple(freqs))

    @property
    def n(self) -> int:
        return sum(self.freqs)

    @property
    def max_class(self) -> int:
        return len(self.freqs) - 1

    @property
    def zero_count(self) -> int:
        return self.freqs[0]

    @property
    def zero_fraction(self) -> float:
        """Mean of the zero-offspring indicator, f_0 / n."""
        return self.freqs[0] / self.n

    @property
    def mean(self) -> float:
        return sum(m * f for m, f in enumerate(self.freqs)) / self.n

    def __getitem__(self, m: int) -> int:
        return self.freqs[m] if 0 <= m < len(self.freqs) else 0

    def items(self):
        """(class, count) pairs for classes with a positive count."""
        return [(m, f) for m, f in enumerate(self.freqs) if f > 0]

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["class", "count"])
        for m, f in enumerate(self.freqs):
            w.writerow([m, f])
        return out.getvalue()


def parse_observations(text: str) -> FrequencyTable:
    values = []
    for tok in text.split():
        try:
            values.append(int(tok))
        except ValueError:
            raise ParameterDomainError(f"not an integer observation: {tok!r}") from None
    return FrequencyTable.from_observations(values)


def parse_frequency_csv(text: str) -> FrequencyTable:
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if any(c.strip() for c in r)]
    if not rows:
        raise ParameterDomainError("frequency CSV is empty")
    header = [c.strip().lower() for c in rows[0]]
    if header != ["class", "count"]:
        raise ParameterDomainError("frequency CSV needs the header 'class,count'")
    counts: dict[int, int] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise ParameterDomainError(f"line {lineno}: expected two columns")
        try:
            m, f = int(row[0]), int(row[1])
        except ValueError:
            raise ParameterDomainError(f"line {lineno}: non-integer entry") from None
        if f < 0:
            raise ParameterDomainError(f"line {lineno}: negative count")
        counts[m] = counts.get(m, 0) + f
    return FrequencyTable.from_counts(counts)


def read_observations(path: str | Path) -> FrequencyTable:
    return parse_observations(Path(path).read_text(encoding="utf-8"))


def read_frequency_csv(path: str | Path) -> FrequencyTable:
    return parse_frequency_csv(Path(path).read_text(encoding="utf-8"))
