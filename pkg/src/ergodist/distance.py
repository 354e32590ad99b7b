"""Empirical and model-level distributional distance, plus the sum-information estimator.

The distance between two discrete samples is

    sum_{k=1..k_max} w_k * sum_{B in A^k} |nu(x, B) - nu(y, B)|,    w_k = 1/(k(k+1)),

and for real-valued samples the inner sum runs over dyadic cells at pattern
length m and refinement level l, weighted w_m * w_l.  Only words/cells that
occur in at least one sample are enumerated (every other term is zero), which
keeps each level linear in the sample length.

Truncation is explicit and recorded in every estimate.  In ``exact_tail`` mode
the real-valued distance equals the untruncated (l -> infinity) value: beyond
the level at which cells can no longer mix differing values (set by the
minimum gap between unequal sample values), per-level sums are constant, so
the last computed level simply absorbs the whole remaining weight.

Levels are enumerated in a canonical (sorted) word order, so dd(x, y) and
dd(y, x) perform identical float operations and agree exactly.  Everything
here is pure; per-level terms are independent and could be evaluated in
parallel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import AlphabetMismatchError, UnsupportedModelError
from .samples import Alphabet, Sample, min_gap
from . import processes

SUM_INFO_LEVEL_WEIGHT = math.pi**2 / 6 - 1  # sum over l>=1 of w_l / l


def weight(k: int) -> float:
    """Level weight w_k = 1/(k(k+1)); positive, decreasing, sums to 1."""
    return 1.0 / (k * (k + 1))


def tail_weight(k: int) -> float:
    """Total weight of all levels beyond k: sum_{j>k} w_j = 1/(k+1)."""
    return 1.0 / (k + 1)


@dataclass(frozen=True)
class Truncation:
    """Where the infinite sums are cut off.

    Discrete distances use ``k_max``; real-valued ones use ``m_max``/``l_max``.
    ``exact_tail`` (real only) replaces ``l_max`` with the min-gap rule and
    yields the untruncated value.
    """

    mode: str = "truncated"
    k_max: int | None = None
    m_max: int | None = None
    l_max: int | None = None

    def __post_init__(self):
        if self.mode not in ("truncated", "exact_tail"):
            raise ValueError(f"unknown truncation mode {self.mode!r}")
        for name in ("k_max", "m_max", "l_max"):
            v = getattr(self, name)
            if v is not None and int(v) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.mode == "exact_tail" and self.k_max is not None:
            raise ValueError("exact_tail mode applies to real-valued distances only")

    def to_dict(self) -> dict:
        d = {"mode": self.mode}
        for name in ("k_max", "m_max", "l_max"):
            v = getattr(self, name)
            if v is not None:
                d[name] = int(v)
        return d


@dataclass(frozen=True)
class DistanceEstimate:
    """A distance value together with the truncation that produced it.

    ``per_level`` holds (level, raw_sum, weighted) triples, where level is k
    for discrete input and (m, l) for real input; weighted includes any tail
    weight absorbed by the last level in exact_tail mode.
    """

    value: float
    truncation: Truncation
    per_level: tuple = ()

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            **self.truncation.to_dict(),
            "per_level": [
                {"level": lvl if isinstance(lvl, int) else list(lvl), "sum": s, "weighted": w}
                for (lvl, s, w) in self.per_level
            ],
        }


def _ceil_log2(n: int) -> int:
    return max(1, int(n - 1).bit_length())


def default_truncation(
    n1: int,
    n2: int,
    alphabet: Alphabet,
    samples: Sequence[Sample] = (),
) -> Truncation:
    """Truncation schedule for sample lengths n1, n2.

    Discrete: k_max = ceil(log2 n) with n the longer length.  Real: m_max the
    same, and l_max the smallest level at which no occupied 1-d cell of any
    given sample holds more than ceil(log2 n) points, capped at 52 (beyond the
    double-precision mantissa refinement is vacuous).  The real case needs the
    samples themselves to count cell occupancy.
    """
    n = max(int(n1), int(n2))
    if n < 2:
        raise ValueError("need max(n1, n2) >= 2")
    depth = _ceil_log2(n)
    if alphabet.is_discrete:
        return Truncation(mode="truncated", k_max=depth)
    if not samples:
        raise ValueError("real-valued default truncation needs the samples to count cell occupancy")
    cap = depth
    l_max = 52
    for l in range(1, 53):
        scale = 2.0 ** l
        ok = True
        for s in samples:
            _, counts = np.unique(np.floor(s.values * scale), return_counts=True)
            if counts.max() > cap:
                ok = False
                break
        if ok:
            l_max = l
            break
    return Truncation(mode="truncated", m_max=depth, l_max=l_max)


# ---------------------------------------------------------------------------
# sparse per-level terms

def _windows(vals: np.ndarray, k: int) -> np.ndarray:
    return np.lib.stride_tricks.sliding_window_view(vals, k)


def _counts_for_k(vals: np.ndarray, k: int, base: int) -> tuple[np.ndarray, np.ndarray, str]:
    """Distinct length-k words of ``vals`` as (keys, counts, kind).

    kind is "codes" (keys are sorted int64 codes) or "rows" (keys are word rows).
    """
    n = vals.size
    if k * math.log2(base) <= 62:
        codes = np.zeros(n - k + 1, dtype=np.int64)
        for j in range(k):
            codes = codes * base + vals[j : n - k + 1 + j]
        keys, counts = np.unique(codes, return_counts=True)
        return keys, counts, "codes"
    rows = np.ascontiguousarray(_windows(vals, k))
    keys, counts = np.unique(rows, axis=0, return_counts=True)
    return keys, counts, "rows"


def _decode(codes: np.ndarray, k: int, base: int) -> np.ndarray:
    """Inverse of base-|A| window coding: (W,) codes -> (W, k) words."""
    out = np.empty((codes.size, k), dtype=np.int64)
    rest = codes.copy()
    for j in range(k - 1, -1, -1):
        out[:, j] = rest % base
        rest //= base
    return out


_DENSE_CAP = 1 << 22  # bincount over the full code space up to ~4M words


def _runlength(sorted_codes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    edges = np.empty(sorted_codes.size, dtype=bool)
    edges[0] = True
    np.not_equal(sorted_codes[1:], sorted_codes[:-1], out=edges[1:])
    starts = np.flatnonzero(edges)
    return sorted_codes[starts], np.diff(np.append(starts, sorted_codes.size))


def _merged_term_codes(codes_x: np.ndarray, codes_y: np.ndarray, space: int) -> float:
    """sum_B |nu_x(B) - nu_y(B)| from per-window codes.

    Small code spaces are counted densely with bincount (no sorting at all);
    larger ones fall back to sorting each side and merging.  Either way words
    are visited in ascending code order, so the computation is exactly
    symmetric in x and y.
    """
    nx, ny = codes_x.size, codes_y.size
    if space <= _DENSE_CAP:
        fx = np.bincount(codes_x, minlength=space) / nx
        fy = np.bincount(codes_y, minlength=space) / ny
        return float(np.abs(fx - fy).sum())
    ux, cx = _runlength(np.sort(codes_x))
    uy, cy = _runlength(np.sort(codes_y))
    union = np.unique(np.concatenate([ux, uy]))
    fx = np.zeros(union.size)
    fy = np.zeros(union.size)
    fx[np.searchsorted(union, ux)] = cx / nx
    fy[np.searchsorted(union, uy)] = cy / ny
    return float(np.abs(fx - fy).sum())


def _union_term_rows(wx: np.ndarray, wy: np.ndarray) -> float:
    """sum_B |nu_x(B) - nu_y(B)| from raw window rows of both samples."""
    nx, ny = wx.shape[0], wy.shape[0]
    allr = np.vstack([wx, wy])
    _, inv = np.unique(allr, axis=0, return_inverse=True)
    m = int(inv.max()) + 1
    fx = np.bincount(inv[:nx], minlength=m) / nx
    fy = np.bincount(inv[nx:], minlength=m) / ny
    return float(np.abs(fx - fy).sum())


def _discrete_term(xvals: np.ndarray, yvals: np.ndarray, k: int, base: int) -> float:
    nx = xvals.size - k + 1
    ny = yvals.size - k + 1
    if nx < 1 and ny < 1:
        return 0.0
    if nx < 1 or ny < 1:
        return 1.0  # one side has no windows; the other's frequencies sum to 1
    if k * math.log2(base) <= 62:
        cx = np.zeros(nx, dtype=np.int64)
        cy = np.zeros(ny, dtype=np.int64)
        for j in range(k):
            cx = cx * base + xvals[j : nx + j]
            cy = cy * base + yvals[j : ny + j]
        return _merged_term_codes(cx, cy, base**k)
    return _union_term_rows(
        np.ascontiguousarray(_windows(xvals, k)), np.ascontiguousarray(_windows(yvals, k))
    )


def _check_same_discrete(x: Sample, y: Sample):
    if not (x.alphabet.is_discrete and y.alphabet.is_discrete):
        raise AlphabetMismatchError("both samples must be discrete")
    if x.alphabet.size != y.alphabet.size:
        raise AlphabetMismatchError(
            f"alphabet sizes differ: {x.alphabet.size} vs {y.alphabet.size}"
        )


def dd_discrete(x: Sample, y: Sample, t: Truncation | None = None) -> DistanceEstimate:
    """Empirical distributional distance between two discrete samples."""
    _check_same_discrete(x, y)
    if t is None:
        t = default_truncation(x.n, y.n, x.alphabet)
    if t.k_max is None:
        raise ValueError("discrete distance needs a truncation with k_max")
    base = x.alphabet.size
    per_level = []
    value = 0.0
    codes_x = codes_y = None
    for k in range(1, t.k_max + 1):
        nx = x.n - k + 1
        ny = y.n - k + 1
        if nx < 1 and ny < 1:
            term = 0.0
        elif nx < 1 or ny < 1:
            term = 1.0
            codes_x = codes_y = None
        elif k * math.log2(base) <= 62:
            # rolling codes carried across k: one multiply-add per level
            if codes_x is None:
                codes_x = x.values.astype(np.int64)
                codes_y = y.values.astype(np.int64)
                for j in range(1, k):
                    codes_x = codes_x[: x.n - j] * base + x.values[j:]
                    codes_y = codes_y[: y.n - j] * base + y.values[j:]
            else:
                codes_x = codes_x[:nx] * base + x.values[k - 1 :]
                codes_y = codes_y[:ny] * base + y.values[k - 1 :]
            term = _merged_term_codes(codes_x, codes_y, base**k)
        else:
            term = _discrete_term(x.values, y.values, k, base)
        w = weight(k) * term
        per_level.append((k, term, w))
        value += w
    return DistanceEstimate(value=value, truncation=t, per_level=tuple(per_level))


def _scaled(vals: np.ndarray, l: int) -> np.ndarray:
    # +0.0 normalizes -0.0 so cell grouping is purely by value
    return np.floor(vals * (2.0 ** l)) + 0.0


def _real_term(xs: np.ndarray, ys: np.ndarray, m: int) -> float:
    nx = xs.size - m + 1
    ny = ys.size - m + 1
    if nx < 1 and ny < 1:
        return 0.0
    if nx < 1 or ny < 1:
        return 1.0
    return _union_term_rows(
        np.ascontiguousarray(_windows(xs, m)), np.ascontiguousarray(_windows(ys, m))
    )


def _exact_tail_depth(s: float | None) -> int:
    """Levels to compute so that deeper ones are provably constant.

    Smallest l with 2^-l <= s, plus one level of headroom against the rounding
    of s itself (the tail formula is valid from any level at or beyond the
    true constancy level).
    """
    if s is None:
        return 1
    _, exp = math.frexp(s)
    return max(1, 1 - exp) + 1


def dd_real(x: Sample, y: Sample, t: Truncation | None = None) -> DistanceEstimate:
    """Empirical distributional distance between two real-valued samples.

    ``truncated`` mode sums levels l = 1..l_max.  ``exact_tail`` mode computes
    levels up to the min-gap depth and assigns the last level the entire
    remaining weight, which equals the l -> infinity limit exactly.  When the
    two samples share a single constant value there is no min gap and every
    term is zero; the distance is 0 (not an error).
    """
    if x.alphabet.is_discrete or y.alphabet.is_discrete:
        raise AlphabetMismatchError("both samples must be real-valued")
    if t is None:
        t = default_truncation(x.n, y.n, x.alphabet, samples=(x, y))
    if t.m_max is None:
        raise ValueError("real distance needs a truncation with m_max")
    exact = t.mode == "exact_tail"
    if not exact and t.l_max is None:
        raise ValueError("truncated real distance needs l_max")
    if exact:
        depth = _exact_tail_depth(min_gap(x, y))
    else:
        depth = t.l_max
    per_level = []
    value = 0.0
    for l in range(1, depth + 1):
        xs = _scaled(x.values, l)
        ys = _scaled(y.values, l)
        w_l = weight(l) + (tail_weight(depth) if (exact and l == depth) else 0.0)
        for m in range(1, t.m_max + 1):
            term = _real_term(xs, ys, m)
            w = weight(m) * w_l * term
            per_level.append(((m, l), term, w))
            value += w
    per_level.sort(key=lambda rec: rec[0])
    return DistanceEstimate(value=value, truncation=t, per_level=tuple(per_level))


def dd(x: Sample, y: Sample, t: Truncation | None = None) -> DistanceEstimate:
    """Distance between two samples, dispatching on the alphabet kind."""
    if x.alphabet.is_discrete != y.alphabet.is_discrete:
        raise AlphabetMismatchError("cannot mix discrete and real samples")
    return dd_discrete(x, y, t) if x.alphabet.is_discrete else dd_real(x, y, t)


def dd_sample_model(x: Sample, model, t: Truncation | None = None) -> DistanceEstimate:
    """Distance between a discrete sample and a model with exact marginals.

    Words absent from the sample contribute their model probability; that
    residual mass is added in closed form, so the sum over all of A^k is exact
    without enumerating A^k.
    """
    if not x.alphabet.is_discrete:
        raise AlphabetMismatchError("dd_sample_model requires a discrete sample")
    if not processes.is_marginal_computable(model):
        raise UnsupportedModelError(
            f"{type(model).__name__} does not support exact marginal probabilities"
        )
    if model.alphabet.size != x.alphabet.size:
        raise AlphabetMismatchError(
            f"alphabet sizes differ: sample {x.alphabet.size} vs model {model.alphabet.size}"
        )
    if t is None:
        t = default_truncation(x.n, x.n, x.alphabet)
    if t.k_max is None:
        raise ValueError("discrete distance needs a truncation with k_max")
    base = x.alphabet.size
    per_level = []
    value = 0.0
    for k in range(1, t.k_max + 1):
        nw = x.n - k + 1
        if nw < 1:
            term = 1.0  # no windows: sum_B |0 - rho(B)| = 1
        else:
            keys, counts, kind = _counts_for_k(x.values, k, base)
            words = _decode(keys, k, base) if kind == "codes" else keys
            probs = processes.marginal_probs(model, words)
            term = float(np.abs(counts / nw - probs).sum()) + max(0.0, 1.0 - float(probs.sum()))
        w = weight(k) * term
        per_level.append((k, term, w))
        value += w
    return DistanceEstimate(value=value, truncation=t, per_level=tuple(per_level))


def _enumerate_words(base: int, k: int) -> np.ndarray:
    count = base**k
    if count > 1 << 22:
        raise ValueError(
            f"exhaustive enumeration of {base}^{k} words is infeasible; lower k_max"
        )
    codes = np.arange(count, dtype=np.int64)
    return _decode(codes, k, base)


def dd_model_model(model1, model2, t: Truncation) -> DistanceEstimate:
    """Truncated theoretical distance between two marginal-computable models.

    Enumerates all of A^k per level; this is the ground truth the empirical
    estimators are checked against, so it is deliberately exhaustive.
    """
    for m in (model1, model2):
        if not processes.is_marginal_computable(m):
            raise UnsupportedModelError(
                f"{type(m).__name__} does not support exact marginal probabilities"
            )
    if model1.alphabet.size != model2.alphabet.size:
        raise AlphabetMismatchError("models must share one finite alphabet")
    if t is None or t.k_max is None:
        raise ValueError("model-model distance needs a truncation with k_max")
    base = model1.alphabet.size
    per_level = []
    value = 0.0
    for k in range(1, t.k_max + 1):
        words = _enumerate_words(base, k)
        term = float(
            np.abs(processes.marginal_probs(model1, words) - processes.marginal_probs(model2, words)).sum()
        )
        w = weight(k) * term
        per_level.append((k, term, w))
        value += w
    return DistanceEstimate(value=value, truncation=t, per_level=tuple(per_level))


# ---------------------------------------------------------------------------
# sum-information

def _entropy_bits(counts: np.ndarray) -> float:
    """Plug-in Shannon entropy in bits; 0 log 0 = 0."""
    total = counts.sum()
    p = counts[counts > 0] / total
    return float(-(p * np.log2(p)).sum())


def _gram_entropy(vals: np.ndarray, m: int, base: int | None) -> float:
    if base is not None and m * math.log2(base) <= 62:
        keys, counts, _ = _counts_for_k(vals, m, base)
        return _entropy_bits(counts)
    rows = np.ascontiguousarray(_windows(vals, m))
    _, counts = np.unique(rows, axis=0, return_counts=True)
    return _entropy_bits(counts)


def _joint_entropy(value_arrays: list[np.ndarray], m: int) -> float:
    # joint outcome at position j is the tuple of all samples' m-windows
    rows = np.hstack([np.ascontiguousarray(_windows(v, m)) for v in value_arrays])
    _, counts = np.unique(rows, axis=0, return_counts=True)
    return _entropy_bits(counts)


def sum_information(samples: Sequence[Sample], t: Truncation | None = None) -> float:
    """Plug-in estimate of the entropy-based mutual-dependence functional.

    For aligned samples x_1..x_N this is the weighted sum over pattern lengths
    m (and, for real samples, quantization levels l) of

        sum_i h(m-gram frequencies of x_i)  -  h(joint m-gram frequencies),

    with weights (w_m / m) * (w_l / l); entropies are in bits.  Discrete
    samples are unaffected by quantization, so the level sum collapses to its
    total weight, pi^2/6 - 1.  Subadditivity of the plug-in entropy makes
    every bracket, and hence the estimate, nonnegative.
    """
    samples = list(samples)
    if len(samples) < 2:
        raise ValueError("sum_information needs at least 2 samples")
    n = samples[0].n
    if any(s.n != n for s in samples):
        raise ValueError("samples must have equal lengths")
    kinds = {s.alphabet.is_discrete for s in samples}
    if len(kinds) != 1:
        raise AlphabetMismatchError("samples must be all discrete or all real")
    discrete = kinds.pop()
    if t is None:
        if discrete:
            t = default_truncation(n, n, samples[0].alphabet)
        else:
            t = default_truncation(n, n, samples[0].alphabet, samples=samples)
    m_max = t.m_max if t.m_max is not None else t.k_max
    if m_max is None:
        raise ValueError("sum_information needs a truncation with k_max or m_max")
    total = 0.0
    if discrete:
        bases = [s.alphabet.size for s in samples]
        arrays = [s.values for s in samples]
        for m in range(1, min(m_max, n) + 1):
            bracket = sum(_gram_entropy(v, m, b) for v, b in zip(arrays, bases))
            bracket -= _joint_entropy(arrays, m)
            total += (weight(m) / m) * SUM_INFO_LEVEL_WEIGHT * bracket
        return total
    if t.l_max is None:
        raise ValueError("real-valued sum_information needs l_max")
    for l in range(1, t.l_max + 1):
        arrays = [_scaled(s.values, l) for s in samples]
        for m in range(1, min(m_max, n) + 1):
            bracket = sum(_gram_entropy(v, m, None) for v in arrays)
            bracket -= _joint_entropy(arrays, m)
            total += (weight(m) / m) * (weight(l) / l) * bracket
    return total
