"""Samples over discrete or real alphabets, window frequencies, dyadic quantization.

A :class:`Sample` is a finite sequence, either of symbol indices over a finite
alphabet or of finite reals.  Frequencies of words and of dyadic cells are the
single primitive everything else in the package is built from: for a pattern B
of length k and a sample of length n the frequency is the fraction of the
n-k+1 sliding windows that fall in B (and exactly 0 when n < k).

All types here are immutable after construction and all operations are pure,
so values can be shared freely across threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import AlphabetMismatchError


@dataclass(frozen=True)
class Alphabet:
    """Either a finite alphabet of ``size`` symbols (indices 0..size-1) or the reals."""

    kind: str
    size: int | None = None

    def __post_init__(self):
        if self.kind not in ("discrete", "real"):
            raise ValueError(f"alphabet kind must be 'discrete' or 'real', got {self.kind!r}")
        if self.kind == "discrete":
            if self.size is None or int(self.size) < 2:
                raise ValueError("discrete alphabet size must be an integer >= 2")
            object.__setattr__(self, "size", int(self.size))
        elif self.size is not None:
            raise ValueError("real alphabet takes no size")

    @classmethod
    def discrete(cls, size: int) -> "Alphabet":
        return cls("discrete", size)

    @classmethod
    def real(cls) -> "Alphabet":
        return cls("real")

    @property
    def is_discrete(self) -> bool:
        return self.kind == "discrete"


@dataclass(frozen=True, eq=False)
class Sample:
    """A finite sequence over an alphabet. ``values`` is a read-only numpy array."""

    alphabet: Alphabet
    values: np.ndarray

    def __post_init__(self):
        if self.alphabet.is_discrete:
            vals = np.asarray(self.values)
            if vals.dtype.kind not in "iu":
                if not np.all(np.equal(np.mod(vals, 1), 0)):
                    raise ValueError("discrete sample values must be integers")
            vals = vals.astype(np.int64)
            if vals.ndim != 1 or vals.size < 1:
                raise ValueError("sample must be a non-empty 1-d sequence")
            if vals.min() < 0 or vals.max() >= self.alphabet.size:
                raise ValueError(
                    f"discrete values must lie in [0, {self.alphabet.size}); "
                    f"got range [{vals.min()}, {vals.max()}]"
                )
        else:
            vals = np.asarray(self.values, dtype=np.float64)
            if vals.ndim != 1 or vals.size < 1:
                raise ValueError("sample must be a non-empty 1-d sequence")
            if not np.all(np.isfinite(vals)):
                raise ValueError("real sample values must be finite (no NaN/inf)")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def discrete(cls, values: Sequence[int] | str, size: int | None = None) -> "Sample":
        """Build a discrete sample; ``values`` may be a digit string like "0101"."""
        if isinstance(values, str):
            values = [int(c) for c in values]
        arr = np.asarray(list(values), dtype=np.int64)
        if size is None:
            size = max(2, int(arr.max()) + 1) if arr.size else 2
        return cls(Alphabet.discrete(size), arr)

    @classmethod
    def real(cls, values: Iterable[float]) -> "Sample":
        return cls(Alphabet.real(), np.asarray(list(values), dtype=np.float64))

    @property
    def n(self) -> int:
        return int(self.values.size)

    def __len__(self) -> int:
        return self.n

    def segment(self, start: int, stop: int) -> "Sample":
        """Sub-sample of positions [start, stop) (0-based, half-open)."""
        if not (0 <= start < stop <= self.n):
            raise ValueError(f"invalid segment [{start}, {stop}) of a length-{self.n} sample")
        return Sample(self.alphabet, self.values[start:stop])


@dataclass(frozen=True)
class Cell:
    """Half-open dyadic cube prod_j [coords_j * 2^-l, (coords_j + 1) * 2^-l) in R^m.

    Level l = 0 is the unit grid; signed coordinates cover all of R^m, so no
    enumeration convention is needed.
    """

    m: int
    l: int
    coords: tuple[int, ...]

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("cell pattern length m must be >= 1")
        if self.l < 0:
            raise ValueError("cell refinement level l must be >= 0")
        coords = tuple(int(c) for c in self.coords)
        if len(coords) != self.m:
            raise ValueError(f"cell needs {self.m} coordinates, got {len(coords)}")
        object.__setattr__(self, "coords", coords)


def as_word(pattern, alphabet: Alphabet | None = None) -> np.ndarray:
    """Normalize a word given as digit string / sequence of ints to an int64 array."""
    if isinstance(pattern, str):
        word = np.asarray([int(c) for c in pattern], dtype=np.int64)
    else:
        word = np.asarray(list(pattern), dtype=np.int64)
    if word.ndim != 1 or word.size < 1:
        raise ValueError("pattern must be a non-empty 1-d word")
    if alphabet is not None:
        if not alphabet.is_discrete:
            raise AlphabetMismatchError("word pattern used with a real alphabet")
        if word.min() < 0 or word.max() >= alphabet.size:
            raise AlphabetMismatchError(
                f"word symbols must lie in [0, {alphabet.size})"
            )
    return word


def frequency(x: Sample, pattern) -> float:
    """Frequency of ``pattern`` (a word or a :class:`Cell`) among sliding windows of x.

    Returns (1/(n-k+1)) * #{i : window_i in pattern} for n >= k, and 0.0 for n < k.
    Counts are integers; the division is the only float step.
    """
    if isinstance(pattern, Cell):
        if x.alphabet.is_discrete:
            raise AlphabetMismatchError("cell pattern requires a real-valued sample")
        k = pattern.m
        n = x.n
        if n < k:
            return 0.0
        scale = 2.0 ** pattern.l
        cells = np.floor(x.values * scale) + 0.0
        target = np.asarray(pattern.coords, dtype=np.float64)
        hit = np.ones(n - k + 1, dtype=bool)
        for j in range(k):
            hit &= cells[j : n - k + 1 + j] == target[j]
        return int(hit.sum()) / (n - k + 1)
    word = as_word(pattern, x.alphabet if x.alphabet.is_discrete else None)
    if not x.alphabet.is_discrete:
        raise AlphabetMismatchError("word pattern requires a discrete sample")
    k = word.size
    n = x.n
    if n < k:
        return 0.0
    hit = np.ones(n - k + 1, dtype=bool)
    for j in range(k):
        hit &= x.values[j : n - k + 1 + j] == word[j]
    return int(hit.sum()) / (n - k + 1)


def quantize(x: Sample, m: int, l: int) -> list[Cell]:
    """Map each length-m window of a real sample to its level-l dyadic cell.

    Window (X_i..X_{i+m-1}) maps to coordinates floor(X_j * 2^l).  Returns the
    n-m+1 cells in window order.
    """
    if x.alphabet.is_discrete:
        raise AlphabetMismatchError("quantize requires a real-valued sample")
    if m < 1 or m > x.n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={x.n}")
    if l < 0:
        raise ValueError("refinement level l must be >= 0")
    scale = 2.0 ** l
    coords = [int(math.floor(v * scale)) for v in x.values.tolist()]
    return [Cell(m, l, tuple(coords[i : i + m])) for i in range(x.n - m + 1)]


def min_gap(x: Sample, y: Sample) -> float | None:
    """Smallest |X_i - Y_j| over pairs with X_i != Y_j; None if no pair differs.

    This is the separation s below which dyadic refinement no longer changes
    per-level distance terms (cells finer than s never mix differing values).
    """
    if x.alphabet.is_discrete or y.alphabet.is_discrete:
        raise AlphabetMismatchError("min_gap is defined for real-valued samples")
    ux = np.unique(x.values)
    uy = np.unique(y.values)
    best = np.inf
    # for each x value, nearest differing y values are the sorted neighbours
    idx = np.searchsorted(uy, ux)
    for a, j in zip(ux.tolist(), idx.tolist()):
        if j > 0:
            best = min(best, a - uy[j - 1])
        jj = j
        if jj < uy.size and uy[jj] == a:
            jj += 1
        if jj < uy.size:
            best = min(best, uy[jj] - a)
    if not np.isfinite(best):
        return None
    return float(best)


def load_sample(path: str | Path, alphabet: str | Alphabet | None = None) -> Sample:
    """Read a sample from CSV (one value per line, '#' comments) or a JSON array.

    ``alphabet`` may be 'discrete', 'real', an :class:`Alphabet`, or None to
    infer: all-integer values load as discrete, otherwise real.
    """
    path = Path(path)
    text = path.read_text()
    stripped = text.lstrip()
    if stripped.startswith("["):
        raw = json.loads(text)
        if not isinstance(raw, list):
            raise ValueError(f"{path}: JSON sample must be an array")
        values = raw
    else:
        values = []
        for ln, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                values.append(float(line) if ("." in line or "e" in line.lower()) else int(line))
            except ValueError as exc:
                raise ValueError(f"{path}:{ln}: not a number: {line!r}") from exc
    if not values:
        raise ValueError(f"{path}: empty sample")
    if isinstance(alphabet, Alphabet):
        want = alphabet.kind
    else:
        want = alphabet
    if want is None:
        want = "discrete" if all(isinstance(v, int) or float(v).is_integer() for v in values) else "real"
    if want == "real":
        return Sample.real([float(v) for v in values])
    if want == "discrete":
        ints = []
        for v in values:
            if not (isinstance(v, int) or float(v).is_integer()):
                raise ValueError(f"{path}: non-integer value {v!r} in a discrete sample")
            ints.append(int(v))
        if min(ints) < 0:
            raise ValueError(f"{path}: discrete symbols must be >= 0")
        size = alphabet.size if isinstance(alphabet, Alphabet) and alphabet.is_discrete else None
        return Sample.discrete(ints, size=size)
    raise ValueError(f"unknown alphabet {alphabet!r}")
