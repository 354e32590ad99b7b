"""Hypothesis tests built on sample-to-hypothesis distance, with Monte-Carlo calibration.

A hypothesis here is a finite explicit set of models, so the distance from a
sample to a hypothesis is an exact minimum over the member models.  Two tests
are provided:

* the uniform test: accept H0 iff the sample is strictly closer to H0 than to
  H1 (ties reject, matching the definition's "otherwise" branch);
* the asymmetric (alpha-level) test: accept H0 iff the sample lies within a
  radius gamma of H0, where gamma is the smallest radius whose coverage under
  every H0 model is at least 1 - alpha.  No closed form for gamma exists, so
  it is calibrated by Monte-Carlo (per-model empirical quantile, maximised
  over models) with the run count and seed recorded in the table.

Closure/ergodic-decomposition conditions that govern when such tests are
consistent are theory-side: for the finite model sets supported here the
closure of H equals H, so they impose nothing computable.  Parametric
families (e.g. "Markov of order at most k") are handled as user-supplied
finite grids of models; see the README recipe.

Calibration runs are embarrassingly parallel (per-run derived seeds) and the
resulting table is immutable; tests are pure given a table.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import ceil

import numpy as np

from .distance import Truncation, dd_sample_model, default_truncation
from .errors import AlphabetMismatchError, CalibrationMismatchError, UnsupportedModelError
from .processes import is_marginal_computable, model_to_dict, sample
from .samples import Sample


@dataclass(frozen=True, eq=False)
class Hypothesis:
    """A finite explicit set of process models standing in for H0 or H1."""

    models: tuple
    label: str = ""

    def __post_init__(self):
        models = tuple(self.models)
        if not models:
            raise ValueError("hypothesis needs at least one model")
        sizes = {m.alphabet.size for m in models}
        if len(sizes) != 1:
            raise AlphabetMismatchError("hypothesis models must share one finite alphabet")
        object.__setattr__(self, "models", models)

    @property
    def alphabet_size(self) -> int:
        return self.models[0].alphabet.size

    def model_keys(self) -> set[str]:
        return {json.dumps(model_to_dict(m), sort_keys=True) for m in self.models}

    def hash_hex(self) -> str:
        canon = json.dumps(sorted(self.model_keys())).encode()
        return hashlib.sha256(canon).hexdigest()


def dd_sample_hypothesis(x: Sample, h: Hypothesis, t: Truncation | None = None) -> float:
    """min over models in h of the sample-to-model distance (an exact infimum)."""
    for m in h.models:
        if not is_marginal_computable(m):
            raise UnsupportedModelError(
                f"hypothesis contains a {type(m).__name__}, which has no exact marginals"
            )
    if t is None:
        t = default_truncation(x.n, x.n, x.alphabet)
    return min(dd_sample_model(x, m, t).value for m in h.models)


@dataclass(frozen=True)
class CalibrationTable:
    """Monte-Carlo acceptance radius for one (hypothesis, n, theta) triple."""

    hypothesis_hash: str
    label: str
    n: int
    theta: float
    gamma: float
    mc_runs: int
    seed: int
    truncation: Truncation

    def to_dict(self) -> dict:
        return {
            "hypothesis_hash": self.hypothesis_hash,
            "label": self.label,
            "n": self.n,
            "theta": self.theta,
            "gamma": self.gamma,
            "mc_runs": self.mc_runs,
            "seed": self.seed,
            "truncation": self.truncation.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CalibrationTable":
        tr = d["truncation"]
        return cls(
            hypothesis_hash=d["hypothesis_hash"],
            label=d.get("label", ""),
            n=int(d["n"]),
            theta=float(d["theta"]),
            gamma=float(d["gamma"]),
            mc_runs=int(d["mc_runs"]),
            seed=int(d["seed"]),
            truncation=Truncation(
                mode=tr.get("mode", "truncated"),
                k_max=tr.get("k_max"),
                m_max=tr.get("m_max"),
                l_max=tr.get("l_max"),
            ),
        )


def _derived_seed(seed: int, model_idx: int, run_idx: int) -> int:
    ss = np.random.SeedSequence([int(seed), int(model_idx), int(run_idx)])
    return int(ss.generate_state(1, np.uint64)[0])


def calibration_values(
    h: Hypothesis,
    n: int,
    mc_runs: int,
    seed: int,
    t: Truncation,
    threads: int = 1,
) -> list[np.ndarray]:
    """Per-model arrays of dd(X, H) over mc_runs simulated samples of length n."""

    def one(args) -> float:
        mi, ri = args
        x = sample(h.models[mi], n, _derived_seed(seed, mi, ri))
        return dd_sample_hypothesis(x, h, t)

    out = []
    for mi in range(len(h.models)):
        jobs = [(mi, ri) for ri in range(mc_runs)]
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                vals = list(pool.map(one, jobs))
        else:
            vals = [one(j) for j in jobs]
        out.append(np.asarray(vals))
    return out


def calibrate_gamma(
    h: Hypothesis,
    n: int,
    theta: float,
    mc_runs: int = 2000,
    seed: int = 0,
    t: Truncation | None = None,
    threads: int = 1,
) -> CalibrationTable:
    """Smallest radius with empirical coverage >= theta under every H0 model.

    For each model, gamma_model is the theta-quantile of dd(X, H) over mc_runs
    seeded samples (smallest observed value with at least ceil(theta*mc_runs)
    values at or below it); gamma is the maximum over models, realizing the
    inf-over-models coverage requirement.  theta = 0 imposes nothing, so
    gamma = 0.
    """
    if not (0 <= theta < 1):
        raise ValueError("theta must lie in [0, 1)")
    if mc_runs < 100:
        raise ValueError("mc_runs must be >= 100")
    if t is None:
        t = default_truncation(n, n, h.models[0].alphabet)
    rank = ceil(theta * mc_runs - 1e-9)
    gamma = 0.0
    if rank > 0:
        for vals in calibration_values(h, n, mc_runs, seed, t, threads=threads):
            vals = np.sort(vals)
            gamma = max(gamma, float(vals[rank - 1]))
    return CalibrationTable(
        hypothesis_hash=h.hash_hex(),
        label=h.label,
        n=n,
        theta=theta,
        gamma=gamma,
        mc_runs=mc_runs,
        seed=seed,
        truncation=t,
    )


@dataclass(frozen=True)
class TestVerdict:
    """0 = accept H0, 1 = reject; carries the statistics and thresholds used."""

    decision: int
    statistic: dict
    threshold: dict

    def to_dict(self) -> dict:
        return {"decision": self.decision, "statistic": self.statistic, "threshold": self.threshold}


def asymmetric_test(x: Sample, h0: Hypothesis, alpha: float, cal: CalibrationTable) -> TestVerdict:
    """Accept (0) iff dd(x, H0) <= gamma calibrated at confidence 1 - alpha."""
    if not (0 < alpha < 1):
        raise ValueError("alpha must lie strictly inside (0, 1)")
    if cal.hypothesis_hash != h0.hash_hex():
        raise CalibrationMismatchError("calibration table was built for a different hypothesis")
    if cal.n != x.n:
        raise CalibrationMismatchError(f"calibration is for n={cal.n}, sample has n={x.n}")
    if abs(cal.theta - (1.0 - alpha)) > 1e-12:
        raise CalibrationMismatchError(
            f"calibration is for theta={cal.theta}, test needs theta={1.0 - alpha}"
        )
    stat = dd_sample_hypothesis(x, h0, cal.truncation)
    return TestVerdict(
        decision=0 if stat <= cal.gamma else 1,
        statistic={"d_h0": stat},
        threshold={"gamma": cal.gamma, "alpha": alpha},
    )


def uniform_test(x: Sample, h0: Hypothesis, h1: Hypothesis, t: Truncation | None = None) -> TestVerdict:
    """Accept H0 (0) iff the sample is strictly closer to H0 than to H1."""
    if h0.model_keys() & h1.model_keys():
        raise ValueError("hypotheses overlap: a model appears in both H0 and H1")
    if h0.alphabet_size != h1.alphabet_size:
        raise AlphabetMismatchError("H0 and H1 must share one alphabet")
    if t is None:
        t = default_truncation(x.n, x.n, x.alphabet)
    d0 = dd_sample_hypothesis(x, h0, t)
    d1 = dd_sample_hypothesis(x, h1, t)
    return TestVerdict(
        decision=0 if d0 < d1 else 1,
        statistic={"d_h0": d0, "d_h1": d1},
        threshold={},
    )


def goodness_of_fit(x: Sample, model, alpha: float, cal: CalibrationTable) -> TestVerdict:
    """Identity test: does the sample follow this one law? H0 = {model}."""
    return asymmetric_test(x, Hypothesis((model,), label="gof"), alpha, cal)


def save_calibration(cal: CalibrationTable, path) -> None:
    with open(path, "w") as fh:
        json.dump(cal.to_dict(), fh, indent=2)


def load_calibration(path) -> CalibrationTable:
    with open(path) as fh:
        return CalibrationTable.from_dict(json.load(fh))
