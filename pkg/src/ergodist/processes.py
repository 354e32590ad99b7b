"""Samplable stationary process models used as ground truth in experiments.

Five model families:

* ``IID`` — independent draws from a distribution over a finite alphabet;
* ``Markov`` — order-k chain over a finite alphabet (encoded internally as an
  order-1 chain on k-tuples, so one stationary solver serves all);
* ``HMM`` — a finite hidden chain with a per-state emission kernel over the
  alphabet ("functions of Markov chains", with deterministic output functions
  as one-hot kernels);
* ``Translation`` — rotation of the unit circle by alpha with the output
  thresholded at 1/2.  The hidden state is tracked in exact integer modular
  arithmetic, so successive hidden states differ by alpha (mod 1) exactly.
  Ergodicity requires irrational alpha; rational alpha is accepted because it
  yields deterministic unit-test fixtures (note that a Python float literal is
  itself a rational, dyadic value);
* ``DiagonalAdversary`` — the countable-state return-to-zero chain with
  switch/reset gadgets between paired levels; the schedule is truncated at the
  provided level list and states beyond it behave as plain return-to-zero
  states.

Sampling is reproducible: ``sample(model, n, seed)`` is a pure function of its
arguments, built on numpy's PCG64 generator.  IID, Markov and HMM additionally
expose exact marginal word probabilities (``marginal_prob``), which is what
the sample-vs-model distance needs.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ModelSpecError, StationaryInitError, UnsupportedModelError
from .samples import Alphabet, Sample, as_word

_ROW_SUM_TOL = 1e-12
_STATIONARY_TOL = 1e-10


def _check_rows(mat: np.ndarray, what: str):
    if np.any(mat < -1e-15):
        raise ValueError(f"{what} rows must be nonnegative")
    err = np.abs(mat.sum(axis=1) - 1.0).max()
    if err > _ROW_SUM_TOL:
        raise ValueError(f"{what} rows must sum to 1 (max deviation {err:.2e})")


def _check_dist(vec: np.ndarray, what: str):
    if np.any(vec < -1e-15):
        raise ValueError(f"{what} must be nonnegative")
    err = abs(vec.sum() - 1.0)
    if err > _ROW_SUM_TOL:
        raise ValueError(f"{what} must sum to 1 (deviation {err:.2e})")


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.asarray(arr, dtype=np.float64).copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class IID:
    """Independent identically distributed symbols with the given distribution."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=np.float64)
        if p.ndim != 1 or p.size < 2:
            raise ValueError("IID needs a distribution over >= 2 symbols")
        _check_dist(p, "IID probabilities")
        object.__setattr__(self, "probs", _freeze(p))

    @classmethod
    def bernoulli(cls, p1: float) -> "IID":
        return cls(np.array([1.0 - p1, p1]))

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet.discrete(self.probs.size)


@dataclass(frozen=True, eq=False)
class Markov:
    """Order-k Markov chain; transitions has a row per k-tuple (base-|A| coded)."""

    order: int
    transitions: np.ndarray
    init: str | np.ndarray = "stationary"

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("Markov order must be >= 1")
        mat = np.asarray(self.transitions, dtype=np.float64)
        if mat.ndim != 2:
            raise ValueError("transition kernel must be 2-d")
        a = mat.shape[1]
        if a < 2:
            raise ValueError("alphabet must have >= 2 symbols")
        if mat.shape[0] != a**self.order:
            raise ValueError(
                f"order-{self.order} chain over {a} symbols needs {a**self.order} rows, "
                f"got {mat.shape[0]}"
            )
        _check_rows(mat, "transition kernel")
        object.__setattr__(self, "transitions", _freeze(mat))
        if not isinstance(self.init, str):
            vec = np.asarray(self.init, dtype=np.float64)
            if vec.shape != (mat.shape[0],):
                raise ValueError(f"explicit init must have length {mat.shape[0]}")
            _check_dist(vec, "initial distribution")
            object.__setattr__(self, "init", _freeze(vec))
        elif self.init != "stationary":
            raise ValueError("init must be 'stationary' or an explicit distribution")

    @classmethod
    def two_state(cls, p: float, q: float, init="stationary") -> "Markov":
        """Binary chain that flips 0 -> 1 with probability p and 1 -> 0 with q."""
        return cls(1, np.array([[1.0 - p, p], [q, 1.0 - q]]), init)

    @property
    def n_symbols(self) -> int:
        return int(self.transitions.shape[1])

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet.discrete(self.n_symbols)


@dataclass(frozen=True, eq=False)
class HMM:
    """Hidden finite chain plus an emission kernel rows: states, cols: symbols."""

    transitions: np.ndarray
    emissions: np.ndarray
    init: str | np.ndarray = "stationary"

    def __post_init__(self):
        trans = np.asarray(self.transitions, dtype=np.float64)
        emis = np.asarray(self.emissions, dtype=np.float64)
        if trans.ndim != 2 or trans.shape[0] != trans.shape[1]:
            raise ValueError("hidden transition kernel must be square")
        if emis.ndim != 2 or emis.shape[0] != trans.shape[0]:
            raise ValueError("emission kernel needs one row per hidden state")
        if emis.shape[1] < 2:
            raise ValueError("alphabet must have >= 2 symbols")
        _check_rows(trans, "hidden transition kernel")
        _check_rows(emis, "emission kernel")
        object.__setattr__(self, "transitions", _freeze(trans))
        object.__setattr__(self, "emissions", _freeze(emis))
        if not isinstance(self.init, str):
            vec = np.asarray(self.init, dtype=np.float64)
            if vec.shape != (trans.shape[0],):
                raise ValueError(f"explicit init must have length {trans.shape[0]}")
            _check_dist(vec, "hidden initial distribution")
            object.__setattr__(self, "init", _freeze(vec))
        elif self.init != "stationary":
            raise ValueError("init must be 'stationary' or an explicit distribution")

    @property
    def n_states(self) -> int:
        return int(self.transitions.shape[0])

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet.discrete(int(self.emissions.shape[1]))


@dataclass(frozen=True)
class Translation:
    """Thresholded circle rotation; binary output, zero entropy rate.

    ``r0`` fixes the hidden starting point for unit fixtures; None draws it
    uniformly at sampling time.
    """

    alpha: float | Fraction
    r0: float | Fraction | None = None

    def __post_init__(self):
        a = Fraction(self.alpha)
        if not (0 < a < 1):
            raise ValueError("alpha must lie strictly inside (0, 1)")
        object.__setattr__(self, "alpha", a)
        if self.r0 is not None:
            r = Fraction(self.r0)
            if not (0 <= r < 1):
                raise ValueError("r0 must lie in [0, 1)")
            object.__setattr__(self, "r0", r)

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet.discrete(2)


@dataclass(frozen=True)
class DiagonalAdversary:
    """Return-to-zero chain with paired switch/reset levels; binary output.

    ``levels`` k_0 < k_1 < ... must come in pairs: each (k_{2j}, k_{2j+1})
    delimits one u/d branch entered through a switch after state k_{2j} and
    left through a reset after branch position k_{2j+1}.  Output is 0 on
    u-branch states and 1 everywhere else; switches and resets emit nothing
    and do not advance time.
    """

    delta: float
    levels: tuple[int, ...]

    def __post_init__(self):
        if not (0 < self.delta < 1):
            raise ValueError("delta must lie strictly inside (0, 1)")
        lv = tuple(int(v) for v in self.levels)
        if len(lv) < 2 or len(lv) % 2 != 0:
            raise ValueError("levels must be a non-empty even-length list (branch start/end pairs)")
        if lv[0] < 1 or any(b <= a for a, b in zip(lv, lv[1:])):
            raise ValueError("levels must be strictly increasing positive integers")
        object.__setattr__(self, "levels", lv)

    @property
    def branches(self) -> tuple[tuple[int, int], ...]:
        return tuple(zip(self.levels[::2], self.levels[1::2]))

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet.discrete(2)


ProcessModel = IID | Markov | HMM | Translation | DiagonalAdversary


def is_marginal_computable(model) -> bool:
    """True for models with exact finite-dimensional marginals under stationarity."""
    return isinstance(model, (IID, Markov, HMM))


# ---------------------------------------------------------------------------
# stationary distributions

def _stationary_distribution(P: np.ndarray) -> np.ndarray:
    """Unique stationary row vector of P, or raise StationaryInitError.

    Uniqueness and aperiodicity are read off the spectrum: exactly one
    eigenvalue may sit on the unit circle.  Near-reducible or near-periodic
    chains (within 1e-8) are rejected too; they are indistinguishable from the
    real thing at any usable sample size.
    """
    P = np.asarray(P, dtype=np.float64)
    evals, evecs = np.linalg.eig(P.T)
    unit = np.abs(np.abs(evals) - 1.0) < 1e-8
    at_one = np.abs(evals - 1.0) < 1e-8
    if int(at_one.sum()) != 1 or int(unit.sum()) != 1:
        raise StationaryInitError(
            "chain has no unique stationary distribution (reducible or periodic)"
        )
    v = np.real(evecs[:, int(np.argmax(at_one))])
    total = v.sum()
    if abs(total) < 1e-12:
        raise StationaryInitError("degenerate stationary eigenvector")
    pi = v / total
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    for _ in range(200):
        if np.abs(pi @ P - pi).max() <= _STATIONARY_TOL:
            return pi
        pi = pi @ P
        pi /= pi.sum()
    raise StationaryInitError("stationary solve did not reach the required residual")


def _tuple_chain_matrix(m: Markov) -> np.ndarray:
    """Square transition matrix of the order-1 chain on k-tuples."""
    a = m.n_symbols
    states = m.transitions.shape[0]
    if m.order == 1:
        return m.transitions
    mod = a ** (m.order - 1)
    P = np.zeros((states, states))
    for s in range(states):
        base = (s % mod) * a
        P[s, base : base + a] = m.transitions[s]
    return P


def stationary_init(m: Markov) -> np.ndarray:
    """Stationary distribution over order-k tuples; residual ||pi P - pi||_inf <= 1e-10."""
    if not isinstance(m, Markov):
        raise TypeError("stationary_init expects a Markov model")
    return _stationary_distribution(_tuple_chain_matrix(m))


def _markov_init_dist(m: Markov) -> np.ndarray:
    return stationary_init(m) if isinstance(m.init, str) else np.asarray(m.init)


def _hmm_init_dist(h: HMM) -> np.ndarray:
    return _stationary_distribution(h.transitions) if isinstance(h.init, str) else np.asarray(h.init)


# ---------------------------------------------------------------------------
# exact marginals

def marginal_probs(model, words: np.ndarray) -> np.ndarray:
    """Stationary-law probabilities of each word row; shape (W,)."""
    words = np.asarray(words, dtype=np.int64)
    if words.ndim == 1:
        words = words[None, :]
    w_count, k = words.shape
    if isinstance(model, IID):
        return np.prod(model.probs[words], axis=1)
    if isinstance(model, Markov):
        if not isinstance(model.init, str):
            raise UnsupportedModelError("exact marginals require a stationary-init Markov chain")
        a = model.n_symbols
        o = model.order
        pi = stationary_init(model)
        if k <= o:
            tensor = pi.reshape((a,) * o)
            for _ in range(o - k):
                tensor = tensor.sum(axis=-1)
            flat = tensor.reshape(-1)
            codes = np.zeros(w_count, dtype=np.int64)
            for j in range(k):
                codes = codes * a + words[:, j]
            return flat[codes]
        state = np.zeros(w_count, dtype=np.int64)
        for j in range(o):
            state = state * a + words[:, j]
        probs = pi[state]
        mod = a ** (o - 1)
        for j in range(o, k):
            probs = probs * model.transitions[state, words[:, j]]
            state = (state % mod) * a + words[:, j]
        return probs
    if isinstance(model, HMM):
        if not isinstance(model.init, str):
            raise UnsupportedModelError("exact marginals require a stationary hidden init")
        pi = _hmm_init_dist(model)
        alpha = pi[None, :] * model.emissions[:, words[:, 0]].T
        for j in range(1, k):
            alpha = (alpha @ model.transitions) * model.emissions[:, words[:, j]].T
        return alpha.sum(axis=1)
    raise UnsupportedModelError(
        f"{type(model).__name__} does not support exact marginal probabilities"
    )


def marginal_prob(model, pattern) -> float:
    """Probability that the stationary process emits the given word."""
    alphabet = model.alphabet if is_marginal_computable(model) else None
    word = as_word(pattern, alphabet)
    return float(marginal_probs(model, word[None, :])[0])


# ---------------------------------------------------------------------------
# sampling

def _sample_chain(trans: np.ndarray, start: int, steps: int, rng) -> np.ndarray:
    """Path of an order-1 chain: ``steps`` transitions after ``start``."""
    if steps <= 0:
        return np.zeros(0, dtype=np.int64)
    cum = np.cumsum(trans, axis=1)
    cum[:, -1] = 1.0
    u = rng.random(steps).tolist()
    rows = [row.tolist() for row in cum]
    out = [0] * steps
    s = start
    if trans.shape[1] == 2:
        for i, ui in enumerate(u):
            s = 0 if ui < rows[s][0] else 1
            out[i] = s
    else:
        for i, ui in enumerate(u):
            s = bisect_right(rows[s], ui)
            out[i] = s
    return np.asarray(out, dtype=np.int64)


def _decode_tuple(code: int, a: int, o: int) -> list[int]:
    digits = []
    for _ in range(o):
        digits.append(code % a)
        code //= a
    return digits[::-1]


def _sample_markov(m: Markov, n: int, rng) -> np.ndarray:
    a = m.n_symbols
    o = m.order
    init = _markov_init_dist(m)
    start_code = int(rng.choice(init.size, p=init))
    head = _decode_tuple(start_code, a, o)
    if n <= o:
        return np.asarray(head[:n], dtype=np.int64)
    if o == 1:
        tail = _sample_chain(m.transitions, start_code, n - 1, rng)
        return np.concatenate([np.asarray(head, dtype=np.int64), tail])
    # order-k: walk the tuple-coded chain, emitting the newest symbol
    cum = np.cumsum(m.transitions, axis=1)
    cum[:, -1] = 1.0
    rows = [row.tolist() for row in cum]
    u = rng.random(n - o).tolist()
    out = head + [0] * (n - o)
    state = start_code
    mod = a ** (o - 1)
    for i, ui in enumerate(u):
        sym = bisect_right(rows[state], ui)
        out[o + i] = sym
        state = (state % mod) * a + sym
    return np.asarray(out, dtype=np.int64)


def _sample_hmm(h: HMM, n: int, rng) -> np.ndarray:
    init = _hmm_init_dist(h)
    start = int(rng.choice(init.size, p=init))
    hidden = np.empty(n, dtype=np.int64)
    hidden[0] = start
    if n > 1:
        hidden[1:] = _sample_chain(h.transitions, start, n - 1, rng)
    cum_e = np.cumsum(h.emissions, axis=1)
    cum_e[:, -1] = 1.0
    u = rng.random(n)
    out = np.empty(n, dtype=np.int64)
    for s in range(h.n_states):
        mask = hidden == s
        if mask.any():
            out[mask] = np.searchsorted(cum_e[s], u[mask], side="right")
    return out


def _translation_modular(model: Translation, rng) -> tuple[int, int, int]:
    """(state numerator, step numerator, common denominator) for exact rotation."""
    alpha = Fraction(model.alpha)
    r0 = Fraction(model.r0) if model.r0 is not None else Fraction(float(rng.random()))
    q = math.lcm(alpha.denominator, r0.denominator)
    return r0.numerator * (q // r0.denominator), alpha.numerator * (q // alpha.denominator), q


def _sample_translation(model: Translation, n: int, rng) -> np.ndarray:
    state, step, q = _translation_modular(model, rng)
    out = [0] * n
    for i in range(n):
        state = (state + step) % q
        out[i] = 1 if 2 * state > q else 0
    return np.asarray(out, dtype=np.int64)


def translation_hidden(model: Translation, n: int, seed: int | None = None) -> list[Fraction]:
    """Exact hidden states r_1..r_n as fractions (r_0 drawn if the model leaves it free)."""
    rng = _rng(seed if seed is not None else 0)
    state, step, q = _translation_modular(model, rng)
    out = []
    for _ in range(n):
        state = (state + step) % q
        out.append(Fraction(state, q))
    return out


def _diag_initial(model: DiagonalAdversary, rng):
    """Initial (state, switches) from the geometric stationary-style law."""
    i = int(rng.geometric(model.delta)) - 1
    switches = [bool(rng.integers(0, 2)) for _ in model.branches]
    for b, (lo, hi) in enumerate(model.branches):
        if lo < i <= hi:
            up = bool(rng.integers(0, 2))
            switches[b] = up
            return ("u" if up else "d", b, i), switches
    return i, switches


def _diag_step(model: DiagonalAdversary, state, switches, rng):
    delta = model.delta
    if rng.random() < delta:
        return 0
    if isinstance(state, tuple):
        kind, b, pos = state
        if pos == model.branches[b][1]:  # through the reset: re-randomize the switch
            switches[b] = bool(rng.integers(0, 2))
            return model.branches[b][1] + 1
        return (kind, b, pos + 1)
    nxt = state + 1
    for b, (lo, hi) in enumerate(model.branches):
        if nxt == lo + 1:  # through the switch: branch per its current value
            return ("u" if switches[b] else "d", b, nxt)
    return nxt


def diagonal_adversary_states(
    delta: float,
    levels,
    n: int,
    seed: int,
    start_state: int | None = None,
) -> tuple[Sample, list]:
    """Sample plus the visited state trace (ints, or ('u'|'d', branch, pos) tuples).

    ``start_state`` forces an ordinary starting state (switches still drawn
    fairly); None draws the start from the geometric law delta (1-delta)^i with
    branch states splitting their level's mass equally between u and d.
    """
    model = DiagonalAdversary(delta, tuple(levels))
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = _rng(seed)
    if start_state is None:
        state, switches = _diag_initial(model, rng)
    else:
        if start_state < 0 or any(lo < start_state <= hi for lo, hi in model.branches):
            raise ValueError("start_state must be a nonnegative ordinary (non-branch) state")
        state = int(start_state)
        switches = [bool(rng.integers(0, 2)) for _ in model.branches]
    out = np.empty(n, dtype=np.int64)
    trace = []
    for i in range(n):
        trace.append(state)
        out[i] = 0 if (isinstance(state, tuple) and state[0] == "u") else 1
        state = _diag_step(model, state, switches, rng)
    return Sample(Alphabet.discrete(2), out), trace


def diagonal_adversary_sample(delta: float, levels, n: int, seed: int) -> Sample:
    """Simulate the switch/reset chain and return the binary output sample."""
    sample_, _ = diagonal_adversary_states(delta, levels, n, seed)
    return sample_


def sample(model, n: int, seed: int) -> Sample:
    """Length-n sample of the model; deterministic given (model, n, seed)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = _rng(seed)
    if isinstance(model, IID):
        vals = rng.choice(model.probs.size, size=n, p=model.probs)
        return Sample(model.alphabet, vals.astype(np.int64))
    if isinstance(model, Markov):
        return Sample(model.alphabet, _sample_markov(model, n, rng))
    if isinstance(model, HMM):
        return Sample(model.alphabet, _sample_hmm(model, n, rng))
    if isinstance(model, Translation):
        return Sample(model.alphabet, _sample_translation(model, n, rng))
    if isinstance(model, DiagonalAdversary):
        sample_, _ = diagonal_adversary_states(model.delta, model.levels, n, seed)
        return sample_
    raise TypeError(f"not a process model: {type(model).__name__}")


# ---------------------------------------------------------------------------
# model descriptions (CLI files, calibration keys)

def model_to_dict(model) -> dict:
    if isinstance(model, IID):
        return {"type": "iid", "probs": model.probs.tolist()}
    if isinstance(model, Markov):
        init = model.init if isinstance(model.init, str) else np.asarray(model.init).tolist()
        return {
            "type": "markov",
            "order": model.order,
            "transitions": model.transitions.tolist(),
            "init": init,
        }
    if isinstance(model, HMM):
        init = model.init if isinstance(model.init, str) else np.asarray(model.init).tolist()
        return {
            "type": "hmm",
            "transitions": model.transitions.tolist(),
            "emissions": model.emissions.tolist(),
            "init": init,
        }
    if isinstance(model, Translation):
        a = Fraction(model.alpha)
        d = {"type": "translation", "alpha": [a.numerator, a.denominator]}
        if model.r0 is not None:
            r = Fraction(model.r0)
            d["r0"] = [r.numerator, r.denominator]
        return d
    if isinstance(model, DiagonalAdversary):
        return {"type": "diagonal", "delta": model.delta, "levels": list(model.levels)}
    raise TypeError(f"not a process model: {type(model).__name__}")


def _spec_number(d: dict, field: str, ctx: str):
    if field not in d:
        raise ModelSpecError(f"{ctx}{field}", "missing")
    v = d[field]
    if isinstance(v, list) and len(v) == 2 and all(isinstance(x, int) for x in v):
        return Fraction(v[0], v[1])
    if not isinstance(v, (int, float)):
        raise ModelSpecError(f"{ctx}{field}", f"expected a number, got {type(v).__name__}")
    return v


def model_from_dict(d: dict, ctx: str = "") -> ProcessModel:
    """Parse a ModelSpec mapping; raises ModelSpecError naming the bad field."""
    if not isinstance(d, dict):
        raise ModelSpecError(ctx or "<root>", "model spec must be a JSON object")
    kind = d.get("type")
    if kind not in ("iid", "markov", "hmm", "translation", "diagonal"):
        raise ModelSpecError(f"{ctx}type", f"unknown model type {kind!r}")
    try:
        if kind == "iid":
            if "probs" not in d:
                raise ModelSpecError(f"{ctx}probs", "missing")
            return IID(np.asarray(d["probs"], dtype=np.float64))
        if kind == "markov":
            if "transitions" not in d:
                raise ModelSpecError(f"{ctx}transitions", "missing")
            order = d.get("order", 1)
            if not isinstance(order, int) or order < 1:
                raise ModelSpecError(f"{ctx}order", "must be a positive integer")
            init = d.get("init", "stationary")
            if not isinstance(init, str):
                init = np.asarray(init, dtype=np.float64)
            return Markov(order, np.asarray(d["transitions"], dtype=np.float64), init)
        if kind == "hmm":
            for f in ("transitions", "emissions"):
                if f not in d:
                    raise ModelSpecError(f"{ctx}{f}", "missing")
            init = d.get("init", "stationary")
            if not isinstance(init, str):
                init = np.asarray(init, dtype=np.float64)
            return HMM(
                np.asarray(d["transitions"], dtype=np.float64),
                np.asarray(d["emissions"], dtype=np.float64),
                init,
            )
        if kind == "translation":
            alpha = _spec_number(d, "alpha", ctx)
            r0 = _spec_number(d, "r0", ctx) if "r0" in d else None
            return Translation(alpha, r0)
        delta = _spec_number(d, "delta", ctx)
        levels = d.get("levels")
        if not isinstance(levels, list) or not all(isinstance(v, int) for v in levels):
            raise ModelSpecError(f"{ctx}levels", "must be a list of integers")
        return DiagonalAdversary(float(delta), tuple(levels))
    except ModelSpecError:
        raise
    except (ValueError, TypeError) as exc:
        raise ModelSpecError(f"{ctx}{kind}", str(exc)) from exc
