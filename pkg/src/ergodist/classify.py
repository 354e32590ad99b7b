"""The three-sample test: which of x, y was generated by the process behind z?

The answer is whichever sample is nearer to z in empirical distributional
distance; exact ties go to "x" (the comparison is <=).  Note the deliberately
absent sibling operation: deciding whether *two* samples share one
distribution (discrimination / homogeneity testing) has no consistent
procedure for stationary ergodic processes, so this package does not offer
one — see the README.
"""

from __future__ import annotations

from dataclasses import dataclass

from .distance import DistanceEstimate, Truncation, dd, default_truncation
from .errors import AlphabetMismatchError
from .samples import Sample


@dataclass(frozen=True)
class ClassifyResult:
    label: str  # "x" iff d(x,z) <= d(y,z)
    d_xz: DistanceEstimate
    d_yz: DistanceEstimate


def three_sample(x: Sample, y: Sample, z: Sample, t: Truncation | None = None) -> ClassifyResult:
    """Label "x" if dd(x, z) <= dd(y, z), else "y".

    Both distances are computed at one shared truncation (default: derived
    from the longest of the three samples), otherwise the comparison would not
    be meaningful.
    """
    kinds = {s.alphabet.is_discrete for s in (x, y, z)}
    if len(kinds) != 1:
        raise AlphabetMismatchError("all three samples must share an alphabet kind")
    if x.alphabet.is_discrete:
        sizes = {s.alphabet.size for s in (x, y, z)}
        if len(sizes) != 1:
            raise AlphabetMismatchError("all three samples must share one alphabet")
    if t is None:
        n = max(x.n, y.n, z.n)
        if x.alphabet.is_discrete:
            t = default_truncation(n, n, x.alphabet)
        else:
            t = default_truncation(n, n, x.alphabet, samples=(x, y, z))
    d_xz = dd(x, z, t)
    d_yz = dd(y, z, t)
    label = "x" if d_xz.value <= d_yz.value else "y"
    return ClassifyResult(label=label, d_xz=d_xz, d_yz=d_yz)
