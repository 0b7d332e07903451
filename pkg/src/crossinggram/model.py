"""The radial-partition max-stable field and its exact dependence coefficients.

The field is built from an i.i.d. unit-Fréchet field Y and one shared
unit-Fréchet factor R:

    X(x) = max(Y(x) * beta(x), R * (1 - beta(x)))

where beta is piecewise constant on a partition of Z^2 into concentric
annuli (the outermost cell is unbounded and handled by predicate, never
enumerated).  Every dependence summary of interest has a closed form
here, which makes the model the reference point for all estimators and
Monte-Carlo checks in this package:

    joint CDF            exp(-sum_j beta(x_j)/z_j - max_j (1-beta(x_j))/z_j)
    exponent function    the negated log of the above
    extremal coefficient theta(I) = 1 + sum_{y in I} beta(y) - min_{y in I} beta(y)
    pair tail dependence lambda(x1,x2) = 2 - theta(x1,x2)
    crossing coefficient zeta(A)  = (VS(A) - sum_x theta(V(x))) / (VS(A) - |A|)
    pairwise variant     zeta*(A) = mean over ordered neighbor pairs of lambda

with VS(A) the total neighborhood size sum over A.  Sums over sites use
compensated summation (math.fsum) so values are reproducible to 1e-12
regardless of iteration order.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import Sequence

from .lattice import (
    NormKind,
    Point,
    Region,
    neighborhood,
    neighborhood_size,
    require_crossing_geometry,
    v_sum,
)
from .reports import CoefficientReport


@dataclass(frozen=True)
class PartitionModel:
    """Concentric-annulus partition of Z^2 with one beta per cell.

    ``annuli`` are the strictly increasing finite boundary radii
    d_1 < ... < d_{k-1}; cell i is {x : d_{i-1}^2 <= |x|^2 < d_i^2} with
    d_0 = 0 and d_k = infinity.  ``betas`` has one entry per cell, each in
    (0, 1].  beta == 1 in every cell gives the independent field; total
    dependence (beta == 0) is outside the family.
    """

    annuli: tuple[float, ...]
    betas: tuple[float, ...]

    def __post_init__(self) -> None:
        annuli = tuple(float(r) for r in self.annuli)
        betas = tuple(float(b) for b in self.betas)
        if len(betas) != len(annuli) + 1:
            raise ValueError(
                f"need len(betas) == len(annuli) + 1, got {len(betas)} betas "
                f"for {len(annuli)} radii"
            )
        for r in annuli:
            if not math.isfinite(r) or r <= 0:
                raise ValueError(f"annulus radii must be positive and finite, got {r}")
        if any(b <= a for a, b in zip(annuli, annuli[1:])):
            raise ValueError(f"annulus radii must be strictly increasing, got {annuli}")
        for b in betas:
            if not (0.0 < b <= 1.0):
                raise ValueError(f"every beta must lie in (0, 1], got {b}")
        object.__setattr__(self, "annuli", annuli)
        object.__setattr__(self, "betas", betas)

    @classmethod
    def uniform(cls, beta: float) -> "PartitionModel":
        """Single-cell model: beta constant over the whole lattice."""
        return cls(annuli=(), betas=(beta,))

    def cell_of(self, x: Point) -> int:
        """0-based index of the cell containing x."""
        r2 = x[0] * x[0] + x[1] * x[1]
        for i, r in enumerate(self.annuli):
            if r2 < r * r:
                return i
        return len(self.annuli)

    def beta_at(self, x: Point) -> float:
        return self.betas[self.cell_of(x)]

    def with_beta(self, cell: int, beta: float) -> "PartitionModel":
        """Copy of the model with one cell's beta replaced."""
        betas = list(self.betas)
        betas[cell] = beta
        return PartitionModel(self.annuli, tuple(betas))


def theta_exact(model: PartitionModel, region: Region) -> float:
    """Extremal coefficient of the sites in ``region``.

    Computed as 1 + (sum of betas with one minimal beta removed), which
    is the same quantity as sum(beta) + max(1 - beta) but keeps the
    singleton case exactly 1.0 and pair values exactly 1 + max(beta).
    """
    betas = sorted(model.beta_at(y) for y in region)
    return 1.0 + math.fsum(betas[1:])


def theta_pair_exact(model: PartitionModel, x1: Point, x2: Point) -> float:
    """theta of a site pair: 1 + beta_s within a cell, 1 + max across cells."""
    if tuple(x1) == tuple(x2):
        raise ValueError(f"pair sites must be distinct, got {x1} twice")
    return 1.0 + max(model.beta_at(x1), model.beta_at(x2))


def lambda_pair_exact(model: PartitionModel, x1: Point, x2: Point) -> float:
    """Upper tail-dependence of a pair via the bivariate max-stable identity
    lambda = 2 - theta; validated against the finite-level oracle in tests."""
    return 2.0 - theta_pair_exact(model, x1, x2)


def lambda_conditional_exact(model: PartitionModel, inner: Region, region: Region) -> float:
    """Tail dependence of the maximum over ``inner`` given an exceedance
    somewhere in ``region``: theta(inner) / theta(region)."""
    return theta_exact(model, inner) / theta_exact(model, region)


def gamma_exact(model: PartitionModel, region: Region) -> float:
    """Overall-dependence summary (theta(A) - 1) / (|A| - 1), in [0, 1]."""
    if len(region) < 2:
        raise ValueError(f"gamma needs at least two sites, got {len(region)}")
    return (theta_exact(model, region) - 1.0) / (len(region) - 1)


def zeta_exact(
    model: PartitionModel,
    region: Region,
    d: float = 1.0,
    norm: NormKind = NormKind.EUCLIDEAN,
) -> float:
    """Exact crossing coefficient of ``region``.

    (VS(A) - sum_x theta(V(x))) / (VS(A) - |A|) with full, unclipped
    neighborhoods.  Equals 1 - beta_i whenever every V(x) sits inside the
    single cell i; 0 for the independent (beta == 1) field.
    """
    require_crossing_geometry(d, norm)
    vs = v_sum(region, d, norm)
    theta_sum = math.fsum(theta_exact(model, neighborhood(x, d, norm)) for x in region)
    return (vs - theta_sum) / (vs - len(region))


def zeta_star_exact(
    model: PartitionModel,
    region: Region,
    d: float = 1.0,
    norm: NormKind = NormKind.EUCLIDEAN,
) -> float:
    """Pairwise crossing coefficient: the mean of lambda(x, y) over ordered
    pairs x in A, y in V(x) - {x}.

    This closed form is the large-level limit of the pairwise crossing
    ratio; it is gated by the finite-level Monte-Carlo oracle in the test
    suite rather than assumed.  Never larger than zeta_exact.
    """
    require_crossing_geometry(d, norm)
    lams = [
        lambda_pair_exact(model, x, y)
        for x in region
        for y in neighborhood(x, d, norm)
        if y != x
    ]
    return math.fsum(lams) / len(lams)


def exponent_function_exact(
    model: PartitionModel, points: Sequence[Point], z: Sequence[float]
) -> float:
    """Exponent function at (z_1, ..., z_d):

        sum_j beta(x_j)/z_j + max_j (1 - beta(x_j))/z_j

    At z = (1, ..., 1) this is the extremal coefficient of the points.
    """
    if len(points) != len(z):
        raise ValueError(f"need one level per point, got {len(points)} points and {len(z)} levels")
    if len(points) == 0:
        raise ValueError("need at least one point")
    if len({tuple(p) for p in points}) != len(points):
        raise ValueError("points must be distinct")
    zs = [float(v) for v in z]
    for v in zs:
        if not (v > 0) or not math.isfinite(v):
            raise ValueError(f"levels must be positive and finite, got {v}")
    betas = [model.beta_at(p) for p in points]
    return math.fsum(b / v for b, v in zip(betas, zs)) + max(
        (1.0 - b) / v for b, v in zip(betas, zs)
    )


def joint_cdf_exact(
    model: PartitionModel, points: Sequence[Point], z: Sequence[float]
) -> float:
    """P(X(x_1) <= z_1, ..., X(x_d) <= z_d); exp(-1/z) for a single site."""
    return math.exp(-exponent_function_exact(model, points, z))


def zeta_exact_report(
    model: PartitionModel,
    region: Region,
    d: float = 1.0,
    norm: NormKind = NormKind.EUCLIDEAN,
) -> CoefficientReport:
    """zeta_exact packaged with per-site theta diagnostics."""
    theta_site = [theta_exact(model, neighborhood(x, d, norm)) for x in region]
    vs = v_sum(region, d, norm)
    value = (vs - math.fsum(theta_site)) / (vs - len(region))
    return CoefficientReport(
        region=region,
        d=d,
        norm=norm,
        kind="zeta",
        method="exact",
        value=value,
        diagnostics={
            "theta_site": theta_site,
            "v_sum": vs,
            "neighborhood_size": neighborhood_size(d, norm),
        },
    )


def zeta_star_exact_report(
    model: PartitionModel,
    region: Region,
    d: float = 1.0,
    norm: NormKind = NormKind.EUCLIDEAN,
) -> CoefficientReport:
    value = zeta_star_exact(model, region, d, norm)
    return CoefficientReport(
        region=region, d=d, norm=norm, kind="zeta_star", method="exact", value=value,
    )


@dataclass(frozen=True)
class ModelConfig:
    """A model plus the neighborhood geometry it is analyzed with.

    Mirrors the on-disk JSON config:
    {"annuli": [12, 34], "betas": [0.8, 0.6, 0.1], "d": 1, "norm": "euclidean"}
    """

    model: PartitionModel
    d: float = 1.0
    norm: NormKind = NormKind.EUCLIDEAN

    def __post_init__(self) -> None:
        if self.d <= 0:
            raise ValueError(f"d must be positive, got {self.d}")

    def to_dict(self) -> dict:
        return {
            "annuli": list(self.model.annuli),
            "betas": list(self.model.betas),
            "d": self.d,
            "norm": self.norm.value,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "ModelConfig":
        if not isinstance(raw, dict):
            raise ValueError("model config must be a JSON object")
        unknown = set(raw) - {"annuli", "betas", "d", "norm"}
        if unknown:
            raise ValueError(f"unknown model config fields: {sorted(unknown)}")
        if "betas" not in raw:
            raise ValueError("model config is missing 'betas'")
        model = PartitionModel(tuple(raw.get("annuli", ())), tuple(raw["betas"]))
        return cls(
            model=model,
            d=float(raw.get("d", 1.0)),
            norm=NormKind.from_name(raw.get("norm", "euclidean")),
        )

    @classmethod
    def from_file(cls, path: str) -> "ModelConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def digest(self) -> str:
        """Stable short hash of the config, recorded in sample provenance."""
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:16]


DEMO_CONFIG = ModelConfig(
    model=PartitionModel(annuli=(12.0, 34.0), betas=(0.8, 0.6, 0.1)),
    d=1.0,
    norm=NormKind.EUCLIDEAN,
)
"""The demo configuration: annulus boundaries at 12 and 34, betas 0.8 / 0.6 / 0.1."""
