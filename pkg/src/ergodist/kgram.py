"""Suffix-array-backed k-gram counting for discrete samples.

The index is built once in O(n log^2 n) (prefix doubling over numpy sorts)
plus an O(n) LCP pass, and then answers:

* ``count(word)`` — occurrences of an arbitrary word, O(|word| log n);
* ``kgrams(k)`` — every distinct word of length k with its count, O(n);
* ``kgram_frequencies(k)`` — the same as a word -> frequency mapping.

Only words that actually occur are ever materialized, which is what keeps
distance computations over all of A^k sparse.
"""

from __future__ import annotations

import numpy as np

from .samples import Sample, as_word


def suffix_array(values: np.ndarray) -> np.ndarray:
    """Starting positions of the suffixes of ``values`` in lexicographic order."""
    vals = np.asarray(values)
    n = vals.size
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    if n == 1:
        return np.zeros(1, dtype=np.int64)
    _, rank = np.unique(vals, return_inverse=True)
    rank = rank.astype(np.int64)
    h = 1
    order = np.argsort(rank, kind="stable")
    while True:
        key2 = np.full(n, -1, dtype=np.int64)
        key2[: n - h] = rank[h:]
        order = np.lexsort((key2, rank))
        r1 = rank[order]
        r2 = key2[order]
        bump = np.empty(n, dtype=np.int64)
        bump[0] = 0
        bump[1:] = (r1[1:] != r1[:-1]) | (r2[1:] != r2[:-1])
        new = np.cumsum(bump)
        rank = np.empty(n, dtype=np.int64)
        rank[order] = new
        if new[-1] == n - 1 or h >= n:
            return order.astype(np.int64)
        h *= 2


def lcp_array(values: np.ndarray, sa: np.ndarray) -> np.ndarray:
    """Kasai longest-common-prefix array: lcp[i] = lcp(suffix sa[i], suffix sa[i+1])."""
    n = int(sa.size)
    lcp = np.zeros(max(n - 1, 0), dtype=np.int64)
    if n < 2:
        return lcp
    rank = np.empty(n, dtype=np.int64)
    rank[sa] = np.arange(n)
    s = np.asarray(values).tolist()
    sa_l = sa.tolist()
    rank_l = rank.tolist()
    out = lcp.tolist()
    h = 0
    for i in range(n):
        r = rank_l[i]
        if r > 0:
            j = sa_l[r - 1]
            while i + h < n and j + h < n and s[i + h] == s[j + h]:
                h += 1
            out[r - 1] = h
            if h:
                h -= 1
        else:
            h = 0
    return np.asarray(out, dtype=np.int64)


class KGramIndex:
    """Occurrence counts of every substring of a discrete sample."""

    def __init__(self, source: Sample):
        if not source.alphabet.is_discrete:
            raise ValueError("KGramIndex requires a discrete sample")
        self.source = source
        self._vals = source.values
        self.sa = suffix_array(self._vals)
        self.lcp = lcp_array(self._vals, self.sa)

    @property
    def n(self) -> int:
        return self.source.n

    def _suffix_cmp(self, pos: int, word: np.ndarray) -> int:
        """-1/0/+1 comparison of suffix at pos against word, prefix-wise."""
        n = self.n
        k = word.size
        avail = min(k, n - pos)
        seg = self._vals[pos : pos + avail]
        for a, b in zip(seg.tolist(), word.tolist()):
            if a < b:
                return -1
            if a > b:
                return 1
        if avail < k:
            return -1  # strict prefix sorts first and cannot contain the word
        return 0

    def count(self, pattern) -> int:
        """Number of occurrences of the word in the source."""
        word = as_word(pattern, self.source.alphabet)
        if word.size > self.n:
            return 0
        lo, hi = 0, self.n
        while lo < hi:  # first suffix >= word
            mid = (lo + hi) // 2
            if self._suffix_cmp(int(self.sa[mid]), word) < 0:
                lo = mid + 1
            else:
                hi = mid
        first = lo
        hi = self.n
        while lo < hi:  # first suffix > word (as prefix)
            mid = (lo + hi) // 2
            if self._suffix_cmp(int(self.sa[mid]), word) <= 0:
                lo = mid + 1
            else:
                hi = mid
        return lo - first

    def kgrams(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        """(words, counts) for all distinct words of length k, words shape (W, k).

        Words come out in suffix-array (lexicographic) order; counts sum to n-k+1.
        """
        n = self.n
        if not 1 <= k <= n:
            raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
        new_group = np.empty(n, dtype=bool)
        new_group[0] = True
        new_group[1:] = self.lcp < k
        gid = np.cumsum(new_group) - 1
        valid = self.sa <= n - k
        gid_v = gid[valid]
        pos_v = self.sa[valid]
        # gid_v is nondecreasing in SA order; compact to occurring groups
        keep = np.empty(gid_v.size, dtype=bool)
        keep[0] = True
        keep[1:] = gid_v[1:] != gid_v[:-1]
        reps = pos_v[keep]
        counts = np.diff(np.append(np.flatnonzero(keep), gid_v.size))
        words = self._vals[reps[:, None] + np.arange(k)[None, :]]
        return words, counts.astype(np.int64)

    def kgram_frequencies(self, k: int) -> dict[tuple[int, ...], float]:
        """Frequencies of every occurring word of length k; values sum to 1."""
        words, counts = self.kgrams(k)
        denom = self.n - k + 1
        return {
            tuple(int(v) for v in row): int(c) / denom
            for row, c in zip(words, counts)
        }


def build_index(x: Sample) -> KGramIndex:
    return KGramIndex(x)
