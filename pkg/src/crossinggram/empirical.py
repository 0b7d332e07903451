"""Finite-level evaluation of the crossing ratios on uniform scores.

The limit definitions behind the exact coefficients are tabulated here
at concrete levels u < 1 by counting, per replicate,

    exceedances   score(x) > u for x in A,
    oscillations  score(x) <= u < max over V(x) of the scores,
    neighbor hits score(y) > u over ordered pairs x in A, y in V(x)-{x},
    pair crossings score(x) <= u < score(y) over the same pairs.

A replicate enters the conditional means iff it has at least one
exceedance in A.  These counts give the finite-level crossing values,
the pairwise variant, and the estimator-free identity check that the
per-site oscillation total equals the neighborhood-max exceedance total
minus the site exceedance total on every replicate.  This module is the
independent oracle for the closed forms and the only estimation route
that needs no max-stability.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Literal, Sequence

import numpy as np

from .estimate import rank_transform
from .lattice import NormKind, Region, dilate, neighborhood, require_crossing_geometry
from .reports import LevelEntry, LevelSweep
from .simulate import FieldSample

_CHUNK_CELLS = 4_000_000  # bound on replicate-chunk * |A| * |V| working set


class NoExceedances(Exception):
    """No replicate had an exceedance in the region at this level."""

    def __init__(self, u: float):
        self.u = u
        super().__init__(
            f"no replicate exceeds level u={u} inside the region; "
            "lower u or increase the replicate count"
        )


@dataclass(frozen=True)
class ScoreField:
    """Uniform scores over a sampled region (one row per replicate)."""

    domain: Region
    scores: np.ndarray
    source: Literal["parametric", "rank"]

    def __post_init__(self) -> None:
        s = np.asarray(self.scores, dtype=np.float64)
        if s.ndim != 2 or s.shape[1] != len(self.domain):
            raise ValueError(f"scores shape {s.shape} does not match |domain|={len(self.domain)}")
        if not np.all((s > 0.0) & (s < 1.0)):
            raise ValueError("scores must lie strictly in (0, 1)")
        object.__setattr__(self, "scores", s)

    @property
    def n(self) -> int:
        return int(self.scores.shape[0])


def uniformize(sample: FieldSample, mode: Literal["parametric", "rank"] = "parametric") -> ScoreField:
    """Map sample values to uniform scores.

    parametric: score = exp(-1/value), valid only when the sample is
    known to carry unit-Fréchet margins (simulated provenance).
    rank: the distribution-free rank scores, usable on any sample.
    """
    if mode == "rank":
        ranks = rank_transform(sample)
        return ScoreField(domain=sample.domain, scores=ranks.scores, source="rank")
    if mode != "parametric":
        raise ValueError(f"unknown uniformization mode {mode!r}")
    if not sample.is_unit_frechet():
        raise ValueError(
            "parametric uniformization needs unit-Fréchet provenance; "
            "external samples of unknown margin must use rank mode"
        )
    scores = np.exp(-1.0 / sample.values)
    # values near the float ceiling can round exp(-1/v) up to 1.0
    np.minimum(scores, np.nextafter(1.0, 0.0), out=scores)
    return ScoreField(domain=sample.domain, scores=scores, source="parametric")


@dataclass(frozen=True)
class LevelCounts:
    """Per-replicate integer counts at one level."""

    exceedances: np.ndarray        # sites of A above u
    oscillations: np.ndarray       # sites of A at/below u with a neighborhood max above
    neighbor_hits: np.ndarray      # ordered pairs with the neighbor above u
    pair_crossings: np.ndarray     # ordered pairs with site at/below u < neighbor
    full_max_hits: np.ndarray      # sites of A whose whole V(x) max is above u

    @property
    def conditioning(self) -> np.ndarray:
        return self.exceedances > 0


def _level_counts(field: ScoreField, region: Region, d: float, norm: NormKind, u: float) -> LevelCounts:
    require_crossing_geometry(d, norm)
    if not (0.0 < u < 1.0):
        raise ValueError(f"level u must lie strictly in (0, 1), got {u}")
    missing = dilate(region, d, norm).difference(field.domain)
    if missing:
        raise KeyError(f"scores do not cover the dilated region; missing {missing[:8]}")

    a_cols = np.array([field.domain.index_of(p) for p in region], dtype=np.intp)
    nb_cols = np.array(
        [
            [field.domain.index_of(p) for p in neighborhood(x, d, norm) if p != x]
            for x in region
        ],
        dtype=np.intp,
    )
    n = field.n
    k = nb_cols.shape[1]
    exceed = np.empty(n, dtype=np.int64)
    osc = np.empty(n, dtype=np.int64)
    neigh = np.empty(n, dtype=np.int64)
    cross = np.empty(n, dtype=np.int64)
    full = np.empty(n, dtype=np.int64)

    chunk = max(1, _CHUNK_CELLS // max(1, len(region) * k))
    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        block = field.scores[lo:hi]
        site_ex = block[:, a_cols] > u                      # (c, |A|)
        nb_ex = block[:, nb_cols] > u                       # (c, |A|, k)
        nb_any = nb_ex.any(axis=2)
        osc_site = ~site_ex & nb_any
        exceed[lo:hi] = site_ex.sum(axis=1)
        osc[lo:hi] = osc_site.sum(axis=1)
        neigh[lo:hi] = nb_ex.sum(axis=(1, 2))
        cross[lo:hi] = (~site_ex[:, :, None] & nb_ex).sum(axis=(1, 2))
        full[lo:hi] = (site_ex | nb_any).sum(axis=1)

    # the normalization bound: each oscillating site has an exceeding neighbor
    if np.any(osc > neigh):
        raise RuntimeError("internal: oscillation count exceeded its neighbor-exceedance bound")
    return LevelCounts(
        exceedances=exceed,
        oscillations=osc,
        neighbor_hits=neigh,
        pair_crossings=cross,
        full_max_hits=full,
    )


@dataclass(frozen=True)
class LevelValue:
    """A finite-level crossing value plus the counts it came from."""

    value: float
    conditioning_count: int
    oscillation_total: int
    neighbor_hit_total: int
    exceedance_total: int
    diagnostics: dict[str, Any]


def _ratio_value(numer_total: int, neigh_total: int) -> float:
    # no neighbor exceedance at all means no crossing opportunity was
    # observed; the crossing ratio is then 0 and the coefficient 1
    if neigh_total == 0:
        return 1.0
    return 1.0 - numer_total / neigh_total


def crossinggram_at_level(
    field: ScoreField,
    region: Region,
    d: float = 1.0,
    norm: NormKind = NormKind.EUCLIDEAN,
    u: float = 0.99,
) -> LevelValue:
    """Finite-level crossing coefficient: 1 minus the ratio of the mean
    oscillation count to the mean neighbor-exceedance count, both means
    over replicates with at least one exceedance in the region."""
    c = _level_counts(field, region, d, norm, u)
    cond = c.conditioning
    m = int(cond.sum())
    if m == 0:
        raise NoExceedances(u)
    osc_t = int(c.oscillations[cond].sum())
    neigh_t = int(c.neighbor_hits[cond].sum())
    return LevelValue(
        value=_ratio_value(osc_t, neigh_t),
        conditioning_count=m,
        oscillation_total=osc_t,
        neighbor_hit_total=neigh_t,
        exceedance_total=int(c.exceedances[cond].sum()),
        diagnostics={"u": u, "n": field.n, "source": field.source},
    )


def zeta_star_at_level(
    field: ScoreField,
    region: Region,
    d: float = 1.0,
    norm: NormKind = NormKind.EUCLIDEAN,
    u: float = 0.99,
) -> LevelValue:
    """Pairwise finite-level variant: the numerator counts ordered pairs
    with the site at/below u and the neighbor above it."""
    c = _level_counts(field, region, d, norm, u)
    cond = c.conditioning
    m = int(cond.sum())
    if m == 0:
        raise NoExceedances(u)
    cross_t = int(c.pair_crossings[cond].sum())
    neigh_t = int(c.neighbor_hits[cond].sum())
    return LevelValue(
        value=_ratio_value(cross_t, neigh_t),
        conditioning_count=m,
        oscillation_total=cross_t,
        neighbor_hit_total=neigh_t,
        exceedance_total=int(c.exceedances[cond].sum()),
        diagnostics={"u": u, "n": field.n, "source": field.source},
    )


def oscillation_identity_check(
    field: ScoreField,
    region: Region,
    d: float = 1.0,
    norm: NormKind = NormKind.EUCLIDEAN,
    u: float = 0.99,
) -> tuple[float, float]:
    """Both sides of the oscillation-count identity at level u.

    lhs: sum over sites of [P_hat(neighborhood max above u) -
         P_hat(site above u)], each probability estimated as its count
         over all replicates divided by the conditioning count (the
         ratio form of the conditional probabilities).
    rhs: the oscillation total over all replicates divided by the same
         conditioning count.

    The two integer totals are equal replicate by replicate, so the
    returned floats are bit-identical; both tend to
    sum_x (theta(V(x)) - 1) / theta(A) as u rises.
    """
    c = _level_counts(field, region, d, norm, u)
    m = int(c.conditioning.sum())
    if m == 0:
        raise NoExceedances(u)
    full_t = int(c.full_max_hits.sum())
    site_t = int(c.exceedances.sum())
    osc_t = int(c.oscillations.sum())
    if full_t - site_t != osc_t:
        raise RuntimeError("internal: indicator identity failed on integer counts")
    lhs = (full_t - site_t) / m
    rhs = osc_t / m
    return lhs, rhs


def sweep(
    field: ScoreField,
    region: Region,
    d: float = 1.0,
    norm: NormKind = NormKind.EUCLIDEAN,
    levels: Sequence[float] = (0.90, 0.95, 0.99, 0.995),
) -> LevelSweep:
    """Both crossing values over an ascending level grid.

    Levels where no replicate has an exceedance in the region are kept
    in the table with empty values and conditioning_count 0 rather than
    dropped or made NaN.
    """
    lv = [float(u) for u in levels]
    if not lv:
        raise ValueError("need at least one level")
    if any(not (0.0 < u < 1.0) for u in lv):
        raise ValueError(f"levels must lie strictly in (0, 1), got {lv}")
    if any(b <= a for a, b in zip(lv, lv[1:])):
        raise ValueError(f"levels must be strictly ascending, got {lv}")

    entries = []
    for u in lv:
        c = _level_counts(field, region, d, norm, u)
        cond = c.conditioning
        m = int(cond.sum())
        if m == 0:
            entries.append(
                LevelEntry(
                    u=u,
                    zeta_u=None,
                    zeta_star_u=None,
                    conditioning_count=0,
                    oscillation_total=0,
                    exceedance_total=0,
                )
            )
            continue
        osc_t = int(c.oscillations[cond].sum())
        cross_t = int(c.pair_crossings[cond].sum())
        neigh_t = int(c.neighbor_hits[cond].sum())
        entries.append(
            LevelEntry(
                u=u,
                zeta_u=_ratio_value(osc_t, neigh_t),
                zeta_star_u=_ratio_value(cross_t, neigh_t),
                conditioning_count=m,
                oscillation_total=osc_t,
                exceedance_total=int(c.exceedances[cond].sum()),
            )
        )
    return LevelSweep(entries=tuple(entries))
