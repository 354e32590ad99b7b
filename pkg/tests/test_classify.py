import pytest

from ergodist import (
    AlphabetMismatchError,
    Markov,
    Sample,
    Truncation,
    sample,
    three_sample,
)


def test_identical_reference_wins():
    x = Sample.discrete("011010")
    y = Sample.discrete("111111", size=2)
    res = three_sample(x, y, x)
    assert res.label == "x"
    assert res.d_xz.value == 0.0
    assert res.d_yz.value > 0.0


def test_hand_fixture():
    x = Sample.discrete("0000", size=2)
    y = Sample.discrete("1111")
    z = Sample.discrete("0001")
    res = three_sample(x, y, z, Truncation(k_max=1))
    assert res.label == "x"
    assert res.d_xz.value == pytest.approx(0.25)
    assert res.d_yz.value == pytest.approx(0.75)


def test_tie_goes_to_x():
    # z equidistant from x and y by symmetry: flipping 0<->1 maps one pair to the other
    x = Sample.discrete("0000", size=2)
    y = Sample.discrete("1111")
    z = Sample.discrete("0101")
    res = three_sample(x, y, z, Truncation(k_max=1))
    assert res.d_xz.value == res.d_yz.value
    assert res.label == "x"


def test_swapping_flips_label_except_ties():
    x = Sample.discrete("0001")
    y = Sample.discrete("0111")
    z = Sample.discrete("0011")
    t = Truncation(k_max=3)
    a = three_sample(x, y, z, t)
    b = three_sample(y, x, z, t)
    if a.d_xz.value != a.d_yz.value:
        assert {a.label, b.label} == {"x", "y"}


def test_alphabet_mismatch():
    with pytest.raises(AlphabetMismatchError):
        three_sample(Sample.discrete("01"), Sample.real([0.1, 0.2]), Sample.discrete("01"))


def test_markov_classification_mini_monte_carlo():
    rho_a = Markov.two_state(0.2, 0.6)
    rho_b = Markov.two_state(0.6, 0.2)
    correct = 0
    trials = 20
    for s in range(trials):
        x = sample(rho_a, 3000, 3 * s)
        y = sample(rho_b, 3000, 3 * s + 1)
        z = sample(rho_a, 3000, 3 * s + 2)
        correct += three_sample(x, y, z).label == "x"
    assert correct >= trials - 1


def test_error_rate_shrinks_with_length():
    rho_a = Markov.two_state(0.35, 0.45)
    rho_b = Markov.two_state(0.45, 0.35)
    errs = {}
    for n in (200, 2000):
        errors = 0
        for s in range(30):
            x = sample(rho_a, n, 900 + 3 * s)
            y = sample(rho_b, n, 901 + 3 * s)
            z = sample(rho_a, n, 902 + 3 * s)
            errors += three_sample(x, y, z).label != "x"
        errs[n] = errors
    assert errs[2000] <= errs[200]
