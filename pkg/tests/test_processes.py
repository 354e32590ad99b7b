from fractions import Fraction

import numpy as np
import pytest

from ergodist import (
    HMM,
    IID,
    DiagonalAdversary,
    Markov,
    StationaryInitError,
    Translation,
    UnsupportedModelError,
    diagonal_adversary_sample,
    diagonal_adversary_states,
    marginal_prob,
    marginal_probs,
    model_from_dict,
    model_to_dict,
    sample,
    stationary_init,
    translation_hidden,
)
from ergodist.errors import ModelSpecError


def power_iteration(P, iters=20_000):
    pi = np.full(P.shape[0], 1.0 / P.shape[0])
    for _ in range(iters):
        pi = pi @ P
        pi /= pi.sum()
    return pi


# sampling basics --------------------------------------------------------

def test_iid_degenerate():
    s = sample(IID(np.array([0.0, 1.0])), 5, 123)
    assert s.values.tolist() == [1, 1, 1, 1, 1]


def test_sampling_reproducible():
    models = [
        IID.bernoulli(0.3),
        Markov.two_state(0.2, 0.6),
        HMM(np.array([[0.9, 0.1], [0.2, 0.8]]), np.array([[0.8, 0.2], [0.1, 0.9]])),
        Translation(0.31),
        DiagonalAdversary(0.25, (3, 7)),
    ]
    for m in models:
        a = sample(m, 400, 77)
        b = sample(m, 400, 77)
        c = sample(m, 400, 78)
        assert a.values.tolist() == b.values.tolist()
        assert a.values.tolist() != c.values.tolist()


def test_model_validation():
    with pytest.raises(ValueError):
        IID(np.array([0.5, 0.6]))
    with pytest.raises(ValueError):
        Markov(1, np.array([[0.5, 0.5]]))
    with pytest.raises(ValueError):
        Translation(1.5)
    with pytest.raises(ValueError):
        DiagonalAdversary(0.5, (3,))  # unpaired level has no branch end
    with pytest.raises(ValueError):
        DiagonalAdversary(0.5, (5, 3))


# translation -------------------------------------------------------------

def test_translation_fixture_alpha_half():
    tr = Translation(0.5, r0=0.3)
    s = sample(tr, 8, 0)
    assert s.values.tolist() == [1, 0, 1, 0, 1, 0, 1, 0]
    hidden = translation_hidden(tr, 4)
    assert [float(h) for h in hidden] == pytest.approx([0.8, 0.3, 0.8, 0.3])


def test_translation_hidden_increment_exact():
    tr = Translation(0.2973, r0=0.11)
    hidden = translation_hidden(tr, 500)
    alpha = Fraction(tr.alpha)
    for a, b in zip(hidden, hidden[1:]):
        assert (b - a) % 1 == alpha % 1


def test_translation_random_start_reproducible():
    tr = Translation(0.137)
    assert sample(tr, 50, 5).values.tolist() == sample(tr, 50, 5).values.tolist()


# stationary distributions ------------------------------------------------

def test_stationary_two_state_closed_form():
    p, q = 0.3, 0.6
    pi = stationary_init(Markov.two_state(p, q))
    assert pi == pytest.approx([q / (p + q), p / (p + q)])


def test_stationary_doubly_stochastic_uniform():
    P = np.array([[0.5, 0.3, 0.2], [0.2, 0.5, 0.3], [0.3, 0.2, 0.5]])
    pi = stationary_init(Markov(1, P))
    assert pi == pytest.approx([1 / 3, 1 / 3, 1 / 3])


def test_stationary_matches_power_iteration():
    rng = np.random.default_rng(21)
    for _ in range(10):
        P = rng.dirichlet(np.ones(4), size=4)
        P = 0.5 * P + 0.5 * np.eye(4)  # aperiodic, same stationary law
        m = Markov(1, P / P.sum(axis=1, keepdims=True))
        pi = stationary_init(m)
        assert np.abs(pi @ m.transitions - pi).max() <= 1e-10
        assert pi == pytest.approx(power_iteration(m.transitions), abs=1e-8)


def test_stationary_rejects_reducible_and_periodic():
    with pytest.raises(StationaryInitError):
        stationary_init(Markov(1, np.eye(2)))  # reducible
    with pytest.raises(StationaryInitError):
        stationary_init(Markov(1, np.array([[0.0, 1.0], [1.0, 0.0]])))  # periodic


# marginals ----------------------------------------------------------------

def test_marginal_prob_fair_coin():
    assert marginal_prob(IID.bernoulli(0.5), "01") == pytest.approx(0.25)


def test_marginal_prob_flip_chain():
    eps = 0.2
    m = Markov.two_state(eps, eps)
    assert marginal_prob(m, "00") == pytest.approx(0.5 * (1 - eps))


def test_marginal_probs_normalize():
    from ergodist.distance import _enumerate_words

    models = [
        IID(np.array([0.2, 0.3, 0.5])),
        Markov.two_state(0.3, 0.4),
        Markov(2, np.random.default_rng(22).dirichlet(np.ones(2), size=4)),
        HMM(np.array([[0.7, 0.3], [0.4, 0.6]]), np.array([[0.9, 0.1], [0.2, 0.8]])),
    ]
    for model in models:
        a = model.alphabet.size
        for k in range(1, 6):
            words = _enumerate_words(a, k)
            total = marginal_probs(model, words).sum()
            assert total == pytest.approx(1.0, abs=1e-10)


def test_marginal_prob_unsupported_models():
    with pytest.raises(UnsupportedModelError):
        marginal_prob(Translation(0.4), "01")
    with pytest.raises(UnsupportedModelError):
        marginal_prob(DiagonalAdversary(0.3, (2, 4)), "01")
    with pytest.raises(UnsupportedModelError):
        marginal_prob(Markov.two_state(0.2, 0.4, init=np.array([1.0, 0.0])), "0")


def test_markov_order2_marginals_consistent():
    # P(B) for |B| < order marginalizes the stationary law of pairs
    rng = np.random.default_rng(23)
    m = Markov(2, rng.dirichlet(np.ones(2), size=4))
    p0 = marginal_prob(m, [0])
    p00 = marginal_prob(m, [0, 0])
    p01 = marginal_prob(m, [0, 1])
    assert p0 == pytest.approx(p00 + p01, abs=1e-12)


def test_empirical_bigrams_match_marginals():
    # ergodic theorem at work: 1e5-sample k-gram frequencies within 3 binomial sigma
    m = Markov.two_state(0.5, 0.5)
    s = sample(m, 100_000, 24)
    for word in ("00", "01", "10", "11"):
        p = marginal_prob(m, word)
        nw = s.n - 1
        freq = sum(
            1 for i in range(nw) if (s.values[i], s.values[i + 1]) == (int(word[0]), int(word[1]))
        ) / nw
        sigma = (p * (1 - p) / nw) ** 0.5
        assert abs(freq - p) <= 3 * sigma


# diagonal adversary -------------------------------------------------------

def test_diagonal_emits_ones_before_first_branch():
    # forced start at 0: output is all 1s until the walk first crosses level k0
    out, trace = diagonal_adversary_states(0.3, (4, 9), 300, 31, start_state=0)
    first_branch = next((i for i, st in enumerate(trace) if isinstance(st, tuple)), None)
    assert first_branch is not None
    assert all(v == 1 for v in out.values[:first_branch])
    kind, branch, pos = trace[first_branch]
    assert kind in ("u", "d") and branch == 0 and pos == 5


def test_diagonal_switch_balance():
    ups = 0
    runs = 400
    for seed in range(runs):
        _, trace = diagonal_adversary_states(0.3, (2, 5), 120, seed, start_state=0)
        first = next((st for st in trace if isinstance(st, tuple)), None)
        assert first is not None
        ups += first[0] == "u"
    sigma = (runs * 0.25) ** 0.5
    assert abs(ups - runs / 2) <= 3 * sigma


def test_diagonal_return_rate_near_delta():
    delta = 0.3
    _, trace = diagonal_adversary_states(delta, (3, 6), 30_000, 32)
    zeros = sum(1 for st in trace if st == 0)
    # occupancy of state 0 is delta under the stationary-style law
    assert zeros / len(trace) == pytest.approx(delta, abs=0.02)


def test_diagonal_output_zero_only_on_u_branch():
    out, trace = diagonal_adversary_states(0.4, (2, 4), 2000, 33)
    for v, st in zip(out.values, trace):
        if isinstance(st, tuple) and st[0] == "u":
            assert v == 0
        else:
            assert v == 1


def test_diagonal_sample_matches_states():
    s = diagonal_adversary_sample(0.25, (3, 7), 100, 34)
    s2, _ = diagonal_adversary_states(0.25, (3, 7), 100, 34)
    assert s.values.tolist() == s2.values.tolist()


# model specs ----------------------------------------------------------------

def test_model_dict_roundtrip():
    models = [
        IID.bernoulli(0.25),
        Markov.two_state(0.3, 0.4),
        HMM(np.array([[0.9, 0.1], [0.3, 0.7]]), np.array([[1.0, 0.0], [0.0, 1.0]])),
        Translation(Fraction(1, 3), r0=Fraction(1, 7)),
        DiagonalAdversary(0.2, (2, 5, 9, 14)),
    ]
    for m in models:
        again = model_from_dict(model_to_dict(m))
        assert model_to_dict(again) == model_to_dict(m)


def test_model_from_dict_field_errors():
    with pytest.raises(ModelSpecError, match="type"):
        model_from_dict({"type": "mystery"})
    with pytest.raises(ModelSpecError, match="probs"):
        model_from_dict({"type": "iid"})
    with pytest.raises(ModelSpecError, match="levels"):
        model_from_dict({"type": "diagonal", "delta": 0.5, "levels": "no"})
    with pytest.raises(ModelSpecError, match="order"):
        model_from_dict({"type": "markov", "order": 0, "transitions": [[0.5, 0.5], [0.5, 0.5]]})
