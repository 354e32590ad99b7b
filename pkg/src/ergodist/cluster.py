"""Offline clustering of samples by generating distribution.

Farthest-point initialisation followed by nearest-centre assignment.  The
first sample seeds the centres; each further centre is the sample maximising
the minimum distance to the centres chosen so far; every sample then joins its
nearest centre.  Distances are cached so no more than kappa*N evaluations are
ever made — the algorithm's computational selling point — and all argmax /
argmin ties break to the lowest index so the output is deterministic.

The number of clusters kappa is a required argument.  With kappa unknown the
problem provably has no consistent solution for stationary ergodic data (it
contains the impossible "same or different?" question), so there is no
heuristic fallback here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .distance import Truncation, dd, default_truncation
from .errors import AlphabetMismatchError
from .samples import Sample


@dataclass(frozen=True, eq=False)
class Clustering:
    """Assignment of each sample index to a cluster 0..kappa-1.

    ``centers[c]`` is the sample index seeding cluster c (and belongs to it).
    ``center_distances[i, c]`` is dd(sample_i, center_c); ``n_distance_evals``
    counts actual distance computations.
    """

    assignment: np.ndarray
    centers: tuple[int, ...]
    center_distances: np.ndarray
    n_distance_evals: int
    truncation: Truncation | None = None

    @property
    def kappa(self) -> int:
        return len(self.centers)


def _shared_truncation(samples: list[Sample], t: Truncation | None) -> Truncation:
    if t is not None:
        return t
    n = max(s.n for s in samples)
    alphabet = samples[0].alphabet
    if alphabet.is_discrete:
        return default_truncation(n, n, alphabet)
    return default_truncation(n, n, alphabet, samples=samples)


def cluster_offline(samples: list[Sample], kappa: int, t: Truncation | None = None) -> Clustering:
    """Group N samples into kappa clusters by distributional distance."""
    n_samples = len(samples)
    if kappa < 1:
        raise ValueError("kappa must be >= 1")
    if kappa > n_samples:
        raise ValueError(f"kappa={kappa} exceeds the number of samples {n_samples}")
    kinds = {s.alphabet.is_discrete for s in samples}
    if len(kinds) != 1:
        raise AlphabetMismatchError("samples must share an alphabet kind")
    if samples[0].alphabet.is_discrete and len({s.alphabet.size for s in samples}) != 1:
        raise AlphabetMismatchError("samples must share one alphabet")
    t = _shared_truncation(samples, t)

    evals = 0
    cache: dict[tuple[int, int], float] = {}

    def dist(i: int, j: int) -> float:
        nonlocal evals
        if i == j:
            return 0.0
        key = (i, j) if i < j else (j, i)
        if key not in cache:
            cache[key] = dd(samples[i], samples[j], t).value
            evals += 1
        return cache[key]

    centers = [0]
    min_dist = np.array([dist(i, 0) for i in range(n_samples)])
    for _ in range(1, kappa):
        ranked = np.argsort(-min_dist, kind="stable")  # ties: lowest index
        c = next(int(i) for i in ranked if int(i) not in centers)
        centers.append(c)
        min_dist = np.minimum(min_dist, [dist(i, c) for i in range(n_samples)])

    center_distances = np.empty((n_samples, kappa))
    for col, c in enumerate(centers):
        center_distances[:, col] = [dist(i, c) for i in range(n_samples)]
    assignment = np.argmin(center_distances, axis=1).astype(np.int64)
    for col, c in enumerate(centers):  # a center stays in its own cluster on exact ties
        assignment[c] = col
    return Clustering(
        assignment=assignment,
        centers=tuple(centers),
        center_distances=center_distances,
        n_distance_evals=evals,
        truncation=t,
    )


def clustering_error(result, truth) -> float:
    """Fraction of misassigned indices, minimised over cluster relabelings.

    ``result`` may be a Clustering or a label array; ``truth`` is a label
    sequence over the same indices.  The optimum over label permutations is
    found exactly (assignment problem on the agreement matrix).
    """
    labels = result.assignment if isinstance(result, Clustering) else np.asarray(result)
    truth = np.asarray(list(truth))
    if labels.shape != truth.shape:
        raise ValueError(f"size mismatch: {labels.shape} vs {truth.shape}")
    _, a = np.unique(labels, return_inverse=True)
    _, b = np.unique(truth, return_inverse=True)
    k = max(int(a.max()), int(b.max())) + 1
    agree = np.zeros((k, k), dtype=np.int64)
    np.add.at(agree, (a, b), 1)
    rows, cols = linear_sum_assignment(agree, maximize=True)
    matched = int(agree[rows, cols].sum())
    return 1.0 - matched / labels.size
