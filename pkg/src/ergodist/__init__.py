"""Distributional-distance inference for stationary time series.

Estimate the distance between the laws of discrete-time processes straight
from samples, and run the inference built on it: three-sample classification,
clustering by generating distribution, change-point estimation, and
hypothesis testing — plus seeded simulators for the process families used to
validate all of it.
"""

__version__ = "0.1.0"

from .samples import Alphabet, Cell, Sample, frequency, load_sample, min_gap, quantize
from .kgram import KGramIndex, build_index
from .distance import (
    DistanceEstimate,
    Truncation,
    dd,
    dd_discrete,
    dd_model_model,
    dd_real,
    dd_sample_model,
    default_truncation,
    sum_information,
    tail_weight,
    weight,
)
from .processes import (
    HMM,
    IID,
    DiagonalAdversary,
    Markov,
    Translation,
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
from .classify import ClassifyResult, three_sample
from .cluster import Clustering, cluster_offline, clustering_error
from .changepoint import (
    Candidate,
    ChangePointEstimate,
    list_changepoints,
    multi_changepoint_known_k,
    multi_changepoint_known_r,
    pipeline_truncation,
    score_delta,
    single_changepoint,
    split_score_profile,
)
from .hyptest import (
    CalibrationTable,
    Hypothesis,
    TestVerdict,
    asymmetric_test,
    calibrate_gamma,
    dd_sample_hypothesis,
    goodness_of_fit,
    load_calibration,
    save_calibration,
    uniform_test,
)
from .errors import (
    AlphabetMismatchError,
    CalibrationMismatchError,
    ErgodistError,
    InfeasibleError,
    ModelSpecError,
    StationaryInitError,
    UnsupportedModelError,
)
