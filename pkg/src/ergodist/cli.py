"""Command-line front end.

One JSON document per invocation on stdout (machine output); human-readable
notes go to stderr.  Every document carries the tool version and the resolved
parameters — truncation, seeds — so re-running the printed command reproduces
the output exactly.  Exit codes: 0 success, 1 usage or data error, 2
infeasibility (e.g. not enough change-point candidates).

Sample files are CSV (one value per line, '#' comments) or JSON arrays; model
files are JSON objects with a "type" field (iid, markov, hmm, translation,
diagonal).  SI_SEED in the environment supplies the default seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, report
from .changepoint import (
    list_changepoints,
    multi_changepoint_known_k,
    multi_changepoint_known_r,
    pipeline_truncation,
    single_changepoint,
    split_score_profile,
)
from .classify import three_sample
from .cluster import cluster_offline
from .distance import Truncation, dd, default_truncation
from .errors import ErgodistError, InfeasibleError
from .hyptest import (
    Hypothesis,
    asymmetric_test,
    calibrate_gamma,
    calibration_values,
    dd_sample_hypothesis,
    load_calibration,
    save_calibration,
    uniform_test,
)
from .processes import model_from_dict, model_to_dict, sample
from .samples import Alphabet, Sample, load_sample

IMPOSSIBILITY_NOTE = (
    "No 'same or different?' mode exists: for stationary ergodic processes no "
    "procedure can consistently decide whether two samples share one distribution, "
    "no matter how long they are. Use 'classify' when a reference sample is "
    "available, or 'test' against explicit model hypotheses. See README section "
    "'Why there is no homogeneity subcommand'."
)


def _default_seed(value: int | None) -> int:
    if value is not None:
        return value
    return int(os.environ.get("SI_SEED", "0"))


def _load_model(path: str):
    try:
        with open(path) as fh:
            spec = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON ({exc})") from exc
    return model_from_dict(spec)


def _truncation_from_args(args, samples, alphabet) -> Truncation | None:
    exact = getattr(args, "exact_tail", False)
    kmax = getattr(args, "kmax", None)
    mmax = getattr(args, "mmax", None)
    lmax = getattr(args, "lmax", None)
    if exact:
        n = max(s.n for s in samples)
        mm = mmax if mmax is not None else default_truncation(n, n, alphabet, samples=samples).m_max
        return Truncation(mode="exact_tail", m_max=mm)
    if kmax is not None:
        return Truncation(mode="truncated", k_max=kmax)
    if mmax is not None or lmax is not None:
        if mmax is None or lmax is None:
            raise ValueError("--mmax and --lmax go together")
        return Truncation(mode="truncated", m_max=mmax, l_max=lmax)
    return None


def _emit(doc: dict) -> None:
    doc = {"tool": "ergodist", "version": __version__, **doc}
    json.dump(doc, sys.stdout, indent=2, default=float)
    sys.stdout.write("\n")


def _add_trunc_flags(p: argparse.ArgumentParser):
    p.add_argument("--kmax", type=int, help="discrete truncation depth")
    p.add_argument("--mmax", type=int, help="real-valued pattern-length bound")
    p.add_argument("--lmax", type=int, help="real-valued refinement-level bound")
    p.add_argument("--exact-tail", action="store_true", help="untruncated real-valued value (min-gap tail rule)")


def _load_samples(paths, alphabet_flag):
    alph = None
    if alphabet_flag:
        alph = alphabet_flag
    loaded = [load_sample(p, alph) for p in paths]
    if len({s.alphabet.is_discrete for s in loaded}) != 1:
        raise ValueError("samples mix discrete and real alphabets; pass --alphabet")
    if loaded[0].alphabet.is_discrete:
        size = max(s.alphabet.size for s in loaded)
        loaded = [Sample(Alphabet.discrete(size), s.values) for s in loaded]
    return loaded


def cmd_simulate(args) -> int:
    model = _load_model(args.model)
    seed = _default_seed(args.seed)
    x = sample(model, args.length, seed)
    doc = {
        "command": "simulate",
        "model": model_to_dict(model),
        "length": args.length,
        "seed": seed,
    }
    if args.out:
        Path(args.out).write_text("\n".join(str(int(v)) for v in x.values) + "\n")
        doc["out"] = args.out
    else:
        doc["values"] = [int(v) for v in x.values]
    _emit(doc)
    return 0


def cmd_distance(args) -> int:
    x, y = _load_samples([args.x, args.y], args.alphabet)
    t = _truncation_from_args(args, [x, y], x.alphabet)
    est = dd(x, y, t)
    doc = {"command": "distance", "x": args.x, "y": args.y, **est.to_dict()}
    if args.curve:
        lengths = sorted({int(v) for v in args.curve.split(",")})
        if any(v < 2 for v in lengths):
            raise ValueError("--curve lengths must be >= 2")
        series = []
        for n in lengths:
            if n > min(x.n, y.n):
                break
            series.append((n, dd(x.segment(0, n), y.segment(0, n), t).value))
        doc["curve"] = [{"n": n, "value": v} for n, v in series]
        if args.curve_out:
            doc["curve_out"] = report.write_series_csv(args.curve_out, ["n", "value"], series)
        if args.plot:
            doc["plot"] = report.plot_distance_curve(
                [n for n, _ in series], [v for _, v in series], args.plot
            )
    elif args.plot or args.curve_out:
        raise ValueError("--plot/--curve-out for distance need --curve")
    _emit(doc)
    return 0


def cmd_classify(args) -> int:
    x, y, z = _load_samples([args.x, args.y, args.z], args.alphabet)
    t = _truncation_from_args(args, [x, y, z], x.alphabet)
    res = three_sample(x, y, z, t)
    _emit(
        {
            "command": "classify",
            "label": res.label,
            "d_xz": res.d_xz.to_dict(),
            "d_yz": res.d_yz.to_dict(),
        }
    )
    return 0


def cmd_cluster(args) -> int:
    samples = _load_samples(args.files, args.alphabet)
    t = _truncation_from_args(args, samples, samples[0].alphabet)
    res = cluster_offline(samples, args.k, t)
    doc = {
        "command": "cluster",
        "k": args.k,
        "files": list(args.files),
        "assignment": [int(c) for c in res.assignment],
        "centers": [int(c) for c in res.centers],
        "distance_evaluations": res.n_distance_evals,
        "truncation": res.truncation.to_dict(),
    }
    if args.plot:
        doc["plot"] = report.plot_center_distances(res.center_distances, res.centers, args.plot)
    _emit(doc)
    return 0


def cmd_changepoint(args) -> int:
    (z,) = _load_samples([args.z], args.alphabet)
    t = _truncation_from_args(args, [z], z.alphabet)
    doc: dict = {"command": "changepoint", "z": args.z, "n": z.n}
    modes = [bool(args.single), args.k is not None, bool(args.list), args.r is not None]
    if sum(modes) != 1:
        raise ValueError("pick exactly one of --single, --k, --list, --r")
    if args.single:
        if args.alpha is None or args.beta is None:
            raise ValueError("--single needs --alpha and --beta")
        est = single_changepoint(z, args.alpha, args.beta, t)
        doc.update({"mode": "single", "alpha": args.alpha, "beta": args.beta})
        doc.update(thetas=list(est.thetas), indices=list(est.indices), scores=list(est.scores), scan=est.scan)
        if args.plot:
            lo, hi = est.scan["range"]
            step = max(1, (hi - lo) // 4000)
            ts, scores = split_score_profile(z, np.arange(lo, hi + 1, step), t)
            doc["plot"] = report.plot_split_profile(ts, scores, z.n, est.indices, args.plot)
    else:
        if args.lam is None:
            raise ValueError("--lambda is required for multi-point modes")
        if args.k is not None:
            est = multi_changepoint_known_k(z, args.k, args.lam, t)
            doc.update({"mode": "known-k", "k": args.k, "lambda": args.lam})
            doc.update(thetas=list(est.thetas), indices=list(est.indices), scores=list(est.scores), scan=est.scan)
            indices = est.indices
        elif args.list:
            cands = list_changepoints(z, args.lam, t)
            doc.update(
                {
                    "mode": "list",
                    "lambda": args.lam,
                    "truncation": pipeline_truncation(z, args.lam, t).to_dict(),
                    "candidates": [
                        {"index": c.index, "theta": c.theta, "score": c.score} for c in cands
                    ],
                }
            )
            indices = tuple(c.index for c in cands)
        else:
            k_hat, est = multi_changepoint_known_r(z, args.r, args.lam, t)
            doc.update({"mode": "known-r", "r": args.r, "lambda": args.lam, "kappa_hat": k_hat})
            doc.update(thetas=list(est.thetas), indices=list(est.indices), scores=list(est.scores), scan=est.scan)
            indices = est.indices
        if args.plot:
            step = max(1, (z.n - 2) // 4000)
            ts, scores = split_score_profile(z, np.arange(1, z.n, step), t)
            doc["plot"] = report.plot_split_profile(ts, scores, z.n, indices, args.plot)
    _emit(doc)
    return 0


def cmd_test(args) -> int:
    (x,) = _load_samples([args.x, ], args.alphabet)
    seed = _default_seed(args.seed)
    if args.gof and (args.h0 or args.h1):
        raise ValueError("--gof excludes --h0/--h1")
    if args.gof:
        h0 = Hypothesis((_load_model(args.gof),), label="gof")
    elif args.h0:
        h0 = Hypothesis(tuple(_load_model(p) for p in args.h0), label="h0")
    else:
        raise ValueError("pick --gof MODEL or --h0 MODELS [--h1 MODELS]")
    doc: dict = {"command": "test", "x": args.x, "seed": seed}
    if args.h1:
        h1 = Hypothesis(tuple(_load_model(p) for p in args.h1), label="h1")
        t = default_truncation(x.n, x.n, x.alphabet)
        verdict = uniform_test(x, h0, h1, t)
        doc.update({"mode": "uniform", "truncation": t.to_dict(), **verdict.to_dict()})
        _emit(doc)
        return 0
    if args.alpha is None:
        raise ValueError("asymmetric testing needs --alpha")
    if args.cal_table:
        cal = load_calibration(args.cal_table)
    else:
        runs = args.calibrate or 2000
        cal = calibrate_gamma(h0, x.n, 1.0 - args.alpha, mc_runs=runs, seed=seed, threads=args.threads)
        if args.save_cal:
            save_calibration(cal, args.save_cal)
            doc["cal_table"] = args.save_cal
    verdict = asymmetric_test(x, h0, args.alpha, cal)
    doc.update(
        {
            "mode": "asymmetric",
            "alpha": args.alpha,
            "calibration": cal.to_dict(),
            **verdict.to_dict(),
        }
    )
    if args.plot:
        vals = calibration_values(h0, cal.n, min(cal.mc_runs, 500), cal.seed, cal.truncation)
        doc["plot"] = report.plot_calibration(vals, cal.gamma, verdict.statistic["d_h0"], args.plot)
    _emit(doc)
    return 0


def cmd_refused(_args) -> int:
    print(IMPOSSIBILITY_NOTE, file=sys.stderr)
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ergodist",
        description=(
            "Distributional-distance inference for stationary time series: "
            "simulation, distance estimation, classification, clustering, "
            "change-point analysis and hypothesis testing."
        ),
    )
    parser.add_argument("--version", action="version", version=f"ergodist {__version__}")
    parser.add_argument("--threads", type=int, default=1, help="cap on worker parallelism")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("simulate", help="draw a seeded sample from a model file")
    p.add_argument("--model", required=True, help="model JSON file")
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--seed", type=int, default=None, help="default: SI_SEED or 0")
    p.add_argument("--out", help="write CSV here instead of inlining values")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser(
        "distance",
        help="estimated distance between the laws behind two samples",
        description=(
            "Weighted sum over pattern lengths (and, for real data, dyadic "
            "refinement levels) of total-variation-style frequency differences. "
            "--curve re-estimates on growing prefixes for convergence plots."
        ),
    )
    p.add_argument("x")
    p.add_argument("y")
    p.add_argument("--alphabet", choices=["discrete", "real"])
    _add_trunc_flags(p)
    p.add_argument("--curve", help="comma-separated prefix lengths")
    p.add_argument("--curve-out", help="write the curve as CSV")
    p.add_argument("--plot", help="render the curve to this image file")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser(
        "classify",
        help="three-sample test: is z from x's process or y's?",
        description="Nearest-in-distance classification; exact ties go to x.",
    )
    p.add_argument("x")
    p.add_argument("y")
    p.add_argument("z")
    p.add_argument("--alphabet", choices=["discrete", "real"])
    _add_trunc_flags(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser(
        "cluster",
        help="group samples generated by the same distribution",
        description=(
            "Farthest-point initialisation plus nearest-centre assignment; "
            "needs the true number of clusters k — with k unknown the problem "
            "has no consistent solution for stationary ergodic data."
        ),
    )
    p.add_argument("files", nargs="+")
    p.add_argument("--k", type=int, required=True, help="number of clusters (must be known)")
    p.add_argument("--alphabet", choices=["discrete", "real"])
    _add_trunc_flags(p)
    p.add_argument("--plot", help="render distance-to-centre heatmap")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser(
        "changepoint",
        help="estimate where the generating distribution switches",
        description=(
            "Maximise the split distance (--single), pick the top-k windowed "
            "candidates (--k), rank all candidates (--list), or recover an "
            "unknown number of changes from a known number of distributions (--r)."
        ),
    )
    p.add_argument("z")
    p.add_argument("--alphabet", choices=["discrete", "real"])
    p.add_argument("--single", action="store_true")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--k", type=int)
    p.add_argument("--list", action="store_true")
    p.add_argument("--r", type=int)
    p.add_argument("--lambda", dest="lam", type=float, help="lower bound on change spacing / n")
    _add_trunc_flags(p)
    p.add_argument("--plot", help="render the split-score profile")
    p.set_defaults(func=cmd_changepoint)

    p = sub.add_parser(
        "test",
        help="hypothesis tests against explicit model sets",
        description=(
            "--gof tests identity against one model at level alpha (acceptance "
            "radius calibrated by Monte-Carlo); --h0/--h1 runs the uniform "
            "nearest-hypothesis test."
        ),
    )
    p.add_argument("x")
    p.add_argument("--gof", help="model file for identity / goodness-of-fit testing")
    p.add_argument("--h0", nargs="+", help="model files for H0")
    p.add_argument("--h1", nargs="+", help="model files for H1 (uniform test)")
    p.add_argument("--alpha", type=float)
    p.add_argument("--calibrate", type=int, help="Monte-Carlo calibration runs")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--cal-table", help="reuse a stored calibration table")
    p.add_argument("--save-cal", help="store the calibration table here")
    p.add_argument("--alphabet", choices=["discrete", "real"])
    p.add_argument("--plot", help="render calibration histogram")
    p.set_defaults(func=cmd_test)

    for name in ("same-different", "homogeneity"):
        p = sub.add_parser(name, help="refused: provably impossible in this setting")
        p.set_defaults(func=cmd_refused)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse reserves 2 for usage errors; here 2 means infeasibility
        return 0 if exc.code == 0 else 1
    try:
        return args.func(args)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 2
    except (ErgodistError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
