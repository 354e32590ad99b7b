import itertools

import numpy as np
import pytest

from ergodist import IID, Markov, Sample, cluster_offline, clustering_error, sample


def brute_force_error(labels, truth):
    labels = np.asarray(labels)
    truth = np.asarray(truth)
    ids = sorted(set(labels.tolist()) | set(truth.tolist()))
    best = len(labels)
    for perm in itertools.permutations(ids):
        relabel = {a: b for a, b in zip(ids, perm)}
        best = min(best, sum(1 for a, b in zip(labels, truth) if relabel[a] != b))
    return best / len(labels)


def test_kappa_equals_n():
    samples = [sample(IID.bernoulli(p), 500, i) for i, p in enumerate([0.1, 0.5, 0.9])]
    res = cluster_offline(samples, 3)
    assert sorted(res.assignment.tolist()) == [0, 1, 2]
    assert len(set(res.centers)) == 3


def test_kappa_one():
    samples = [sample(IID.bernoulli(0.4), 300, i) for i in range(4)]
    res = cluster_offline(samples, 1)
    assert res.assignment.tolist() == [0, 0, 0, 0]
    assert res.centers == (0,)


def test_kappa_bounds():
    samples = [sample(IID.bernoulli(0.4), 100, i) for i in range(3)]
    with pytest.raises(ValueError):
        cluster_offline(samples, 0)
    with pytest.raises(ValueError):
        cluster_offline(samples, 4)


def test_bernoulli_recovery():
    samples = [sample(IID.bernoulli(0.1), 2000, s) for s in range(3)]
    samples += [sample(IID.bernoulli(0.9), 2000, 10 + s) for s in range(3)]
    res = cluster_offline(samples, 2)
    assert clustering_error(res, [0, 0, 0, 1, 1, 1]) == 0.0


def test_centers_in_own_cluster():
    samples = [sample(IID.bernoulli(p), 1500, 40 + i) for i, p in enumerate([0.1, 0.15, 0.85, 0.9])]
    res = cluster_offline(samples, 2)
    for cid, center in enumerate(res.centers):
        assert res.assignment[center] == cid


def test_determinism():
    samples = [sample(Markov.two_state(0.3, 0.5), 800, 50 + i) for i in range(6)]
    a = cluster_offline(samples, 3)
    b = cluster_offline(samples, 3)
    assert a.assignment.tolist() == b.assignment.tolist()
    assert a.centers == b.centers


def test_distance_evaluation_budget():
    n_samples, kappa = 8, 3
    samples = [sample(IID.bernoulli(0.2 + 0.1 * (i % 3)), 600, 60 + i) for i in range(n_samples)]
    res = cluster_offline(samples, kappa)
    assert res.n_distance_evals <= kappa * n_samples


# clustering_error -------------------------------------------------------

def test_clustering_error_exact_match():
    assert clustering_error(np.array([1, 1, 0, 0]), [0, 0, 1, 1]) == 0.0


def test_clustering_error_one_swap():
    labels = [0] * 5 + [1] * 5
    truth = list(labels)
    truth[0] = 1
    assert clustering_error(np.array(labels), truth) == pytest.approx(0.1)


def test_clustering_error_matches_brute_force():
    rng = np.random.default_rng(70)
    for _ in range(25):
        n = int(rng.integers(4, 12))
        k = int(rng.integers(2, 4))
        labels = rng.integers(0, k, n)
        truth = rng.integers(0, k, n)
        assert clustering_error(labels, truth) == pytest.approx(brute_force_error(labels, truth))


def test_clustering_error_size_mismatch():
    with pytest.raises(ValueError):
        clustering_error(np.array([0, 1]), [0, 1, 1])


def test_centers_hit_distinct_groups():
    # three well-separated chains (pairwise model distance > 0.2 at k_max=5):
    # farthest-point initialisation should seed one center per true group
    from ergodist import Truncation, dd_model_model

    chains = [
        Markov.two_state(0.1, 0.7),
        Markov.two_state(0.7, 0.1),
        Markov.two_state(0.45, 0.45),
    ]
    t = Truncation(k_max=5)
    for a in range(3):
        for b in range(a + 1, 3):
            assert dd_model_model(chains[a], chains[b], t).value > 0.2
    hits = 0
    trials = 20
    for s in range(trials):
        samples = [sample(chains[i // 3], 5000, 700 + 10 * s + i) for i in range(9)]
        res = cluster_offline(samples, 3, t)
        groups = {c // 3 for c in res.centers}
        hits += len(groups) == 3
    assert hits >= 0.9 * trials


def test_degenerate_identical_samples():
    # all-identical inputs: centers are still distinct indices, clusters nonempty
    s = Sample.discrete("0101")
    res = cluster_offline([s, s, s], 2)
    assert len(set(res.centers)) == 2
    for cid, center in enumerate(res.centers):
        assert res.assignment[center] == cid


def test_clustering_error_random_assignment_near_half():
    # against a balanced 2-class truth, random labels are ~50% wrong even
    # after the best relabeling
    rng = np.random.default_rng(71)
    truth = [0] * 500 + [1] * 500
    errs = [clustering_error(rng.integers(0, 2, 1000), truth) for _ in range(10)]
    assert 0.4 <= float(np.mean(errs)) <= 0.5
