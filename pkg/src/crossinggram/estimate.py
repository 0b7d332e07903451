"""Rank-based estimation of extremal and crossing coefficients.

The chain follows the sample-mean route: empirical uniform scores from
ranks, a max-score mean per neighborhood, and from it the extremal
coefficient

    theta_hat(I) = 1 / (1 - mean_j max_{y in I} U_hat_j(y)) - 1,

which plugs into the crossing-coefficient ratio.  Scores are kept as
integer rank counts internally; every mean is an exact integer sum
divided once at the end, so estimates are invariant (bit for bit) under
strictly increasing per-site transforms and replicate reordering, and a
totally dependent sample yields theta_hat exactly 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Optional

import numpy as np

from .lattice import NormKind, Point, Region, dilate, neighborhood, require_crossing_geometry
from .reports import CoefficientReport
from .simulate import FieldSample


class MissingSupport(Exception):
    """The sample does not cover the dilated region the estimator needs."""

    def __init__(self, missing: tuple[Point, ...]):
        self.missing = missing
        shown = ", ".join(map(str, missing[:10]))
        more = "" if len(missing) <= 10 else f" and {len(missing) - 10} more"
        super().__init__(
            f"{len(missing)} required site(s) not sampled: {shown}{more}; "
            "sample the dilated region or enable clip mode"
        )


@dataclass(frozen=True)
class RankScores:
    """Per-site rank counts of a sample.

    ``counts[j, i]`` is the number of replicates l with value at site i
    not larger than replicate j's (ties counted by the <= rule, sharing
    the maximal rank).  The uniform scores are counts / (n + 1), all in
    (0, 1).
    """

    domain: Region
    n: int
    counts: np.ndarray
    tie_pairs: int

    @cached_property
    def scores(self) -> np.ndarray:
        return self.counts / np.float64(self.n + 1)

    def columns(self, sites: Region) -> np.ndarray:
        missing = sites.difference(self.domain)
        if missing:
            raise MissingSupport(missing)
        return np.array([self.domain.index_of(p) for p in sites], dtype=np.intp)


def rank_transform(sample: FieldSample) -> RankScores:
    """Empirical uniform scores U_hat_j(y) = #{l : X_l(y) <= X_j(y)} / (n+1)."""
    if sample.n < 2:
        raise ValueError(f"rank scores need at least 2 replicates, got {sample.n}")
    vals = sample.values
    n, sites = vals.shape
    counts = np.empty((n, sites), dtype=np.int64)
    ordered = np.sort(vals, axis=0)
    for i in range(sites):
        counts[:, i] = np.searchsorted(ordered[:, i], vals[:, i], side="right")
    tie_pairs = int(np.sum(ordered[1:] == ordered[:-1]))
    return RankScores(domain=sample.domain, n=n, counts=counts, tie_pairs=tie_pairs)


def _theta_from_maxcounts(max_counts_sum: int, n: int) -> float:
    mean_max = max_counts_sum / (n * (n + 1))
    if mean_max >= 1.0:
        raise ArithmeticError("degenerate rank scores: mean max score reached 1")
    return 1.0 / (1.0 - mean_max) - 1.0


def theta_hat(scores: RankScores, region: Region) -> float:
    """Extremal-coefficient estimate for the sites of ``region``.

    Exactly 1 for singletons on tie-free data and for totally dependent
    samples (the max over equal scores is the per-site score, whose rank
    sum is n(n+1)/2).
    """
    cols = scores.columns(region)
    max_counts = scores.counts[:, cols].max(axis=1)
    return _theta_from_maxcounts(int(max_counts.sum()), scores.n)


def _theta_pair(scores: RankScores, i: int, j: int) -> float:
    max_counts = np.maximum(scores.counts[:, i], scores.counts[:, j])
    return _theta_from_maxcounts(int(max_counts.sum()), scores.n)


def _neighbor_columns(
    scores: RankScores,
    region: Region,
    d: float,
    norm: NormKind,
    clip: bool,
) -> tuple[list[np.ndarray], int]:
    """Per-site column arrays for V(x), plus the (possibly clipped) size sum."""
    require_crossing_geometry(d, norm)
    missing_region = region.difference(scores.domain)
    if missing_region:
        raise MissingSupport(missing_region)
    if not clip:
        missing = dilate(region, d, norm).difference(scores.domain)
        if missing:
            raise MissingSupport(missing)
    per_site: list[np.ndarray] = []
    vsum = 0
    for x in region:
        v = neighborhood(x, d, norm)
        if clip:
            v = Region(tuple(p for p in v if p in scores.domain))
        per_site.append(np.array([scores.domain.index_of(p) for p in v], dtype=np.intp))
        vsum += len(v)
    if vsum <= len(region):
        # every clipped neighborhood collapsed to its own site
        raise MissingSupport(
            tuple(
                p
                for x in region
                for p in neighborhood(x, d, norm)
                if p not in scores.domain
            )
        )
    return per_site, vsum


def zeta_hat(
    sample: FieldSample,
    region: Region,
    d: float = 1.0,
    norm: NormKind = NormKind.EUCLIDEAN,
    clip: bool = False,
    scores: Optional[RankScores] = None,
) -> CoefficientReport:
    """Crossing-coefficient estimate (VS - sum theta_hat(V(x))) / (VS - |A|).

    The reported ``value`` is the raw ratio, which may fall slightly
    outside [0, 1] in finite samples; diagnostics carry the clamped
    version.  Without ``clip`` the sample must cover the dilated region;
    with it, neighborhoods are intersected with the sampled domain and
    the size sum adjusted, which deviates from the full-neighborhood
    definition and is flagged in the diagnostics.
    """
    if scores is None:
        scores = rank_transform(sample)
    per_site, vsum = _neighbor_columns(scores, region, d, norm, clip)
    theta_site = [
        _theta_from_maxcounts(int(scores.counts[:, cols].max(axis=1).sum()), scores.n)
        for cols in per_site
    ]
    raw = (vsum - math.fsum(theta_site)) / (vsum - len(region))
    return CoefficientReport(
        region=region,
        d=d,
        norm=norm,
        kind="zeta",
        method="rank_estimate",
        value=raw,
        diagnostics=_diagnostics(raw, scores, clip, vsum, theta_site=theta_site),
    )


def zeta_star_hat(
    sample: FieldSample,
    region: Region,
    d: float = 1.0,
    norm: NormKind = NormKind.EUCLIDEAN,
    clip: bool = False,
    scores: Optional[RankScores] = None,
) -> CoefficientReport:
    """Pairwise crossing estimate: mean of 2 - theta_hat over ordered
    neighbor pairs; exactly 1 on totally dependent samples."""
    if scores is None:
        scores = rank_transform(sample)
    per_site, _ = _neighbor_columns(scores, region, d, norm, clip)
    pair_cache: dict[tuple[int, int], float] = {}
    lams = []
    for x, cols in zip(region, per_site):
        ix = scores.domain.index_of(x)
        for iy in cols:
            if iy == ix:
                continue
            key = (min(ix, int(iy)), max(ix, int(iy)))
            lam = pair_cache.get(key)
            if lam is None:
                lam = 2.0 - _theta_pair(scores, ix, int(iy))
                pair_cache[key] = lam
            lams.append(lam)
    raw = math.fsum(lams) / len(lams)
    return CoefficientReport(
        region=region,
        d=d,
        norm=norm,
        kind="zeta_star",
        method="rank_estimate",
        value=raw,
        diagnostics=_diagnostics(raw, scores, clip, None, ordered_pairs=len(lams)),
    )


def beta_hat(
    sample: FieldSample,
    x1: Point,
    x2: Point,
    scores: Optional[RankScores] = None,
) -> float:
    """Cell-coefficient recovery theta_hat({x1, x2}) - 1 for a same-cell pair.

    Whether the two sites actually share a cell is the caller's knowledge;
    it cannot be checked from data alone.
    """
    if tuple(x1) == tuple(x2):
        raise ValueError(f"pair sites must be distinct, got {x1} twice")
    if scores is None:
        scores = rank_transform(sample)
    cols = scores.columns(Region((x1, x2)))
    return _theta_pair(scores, int(cols[0]), int(cols[1])) - 1.0


def _diagnostics(
    raw: float,
    scores: RankScores,
    clip: bool,
    vsum: Optional[int],
    **extra: Any,
) -> dict[str, Any]:
    diag: dict[str, Any] = {
        "raw": raw,
        "clamped": min(max(raw, 0.0), 1.0),
        "n": scores.n,
        "tie_pairs": scores.tie_pairs,
    }
    if clip:
        diag["clipped"] = True
    if vsum is not None:
        diag["v_sum"] = vsum
    diag.update(extra)
    return diag
