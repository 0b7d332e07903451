"""Command implementations shared by the HTTP endpoints and the CLI.

Each handler maps a request model to a response model and raises
ConfigError, MissingSupport or NoExceedances; the HTTP layer and the
CLI translate those into status codes and exit codes respectively.
"""

from __future__ import annotations

import math

from .._version import __version__
from ..empirical import NoExceedances
from ..empirical import sweep as level_sweep
from ..empirical import uniformize
from ..estimate import MissingSupport, beta_hat, rank_transform, zeta_hat, zeta_star_hat
from ..lattice import NormKind, Region, dilate, make_square, v_sum
from ..model import gamma_exact, theta_exact, zeta_exact, zeta_exact_report, zeta_star_exact_report
from ..reports import CoefficientReport
from ..runspec import ConfigError, parse_domain_spec, parse_region_spec
from ..simulate import (
    FieldSample,
    sample_from_csv,
    sample_sidecar,
    sample_to_csv,
    simulate_field,
    simulate_independent,
    simulate_totally_dependent,
)
from .schemas import (
    BetaEstimate,
    CoefficientPayload,
    EstimateRequest,
    EstimateResponse,
    ExactRequest,
    ExactResponse,
    HealthResponse,
    MapRequest,
    MapResponse,
    MapRow,
    SimulateRequest,
    SimulateResponse,
    SimulateSpec,
    SweepRequest,
    SweepResponse,
    SweepRow,
)


def _norm(name: str | None, default: NormKind = NormKind.EUCLIDEAN) -> NormKind:
    if name is None:
        return default
    try:
        return NormKind.from_name(name)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _payload(report: CoefficientReport) -> CoefficientPayload:
    return CoefficientPayload(**report.to_dict())


def _simulate(spec: SimulateSpec) -> FieldSample:
    domain = parse_domain_spec(spec.domain)
    if spec.field == "independent":
        return simulate_independent(domain, spec.n, spec.seed, spec.threads)
    if spec.field == "totally_dependent":
        return simulate_totally_dependent(domain, spec.n, spec.seed, spec.threads)
    cfg = spec.model.to_config()
    return simulate_field(cfg.model, domain, spec.n, spec.seed, spec.threads)


def _resolve_sample(req) -> FieldSample:
    if req.simulate is not None:
        return _simulate(req.simulate)
    provenance = None
    if req.sample_sidecar is not None:
        provenance = req.sample_sidecar.get("provenance")
    try:
        return sample_from_csv(req.sample_csv, provenance)
    except ValueError as exc:
        raise ConfigError(f"bad sample CSV: {exc}") from None


def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


def run_simulate(req: SimulateRequest) -> SimulateResponse:
    sample = _simulate(req)
    return SimulateResponse(
        n=sample.n,
        domain_size=len(sample.domain),
        provenance=sample.provenance,
        csv=sample_to_csv(sample),
        sidecar=sample_sidecar(sample),
    )


def run_exact(req: ExactRequest) -> ExactResponse:
    cfg = req.model.to_config()
    region = parse_region_spec(req.region)
    d = cfg.d if req.d is None else req.d
    if d <= 0:
        raise ConfigError(f"d must be positive, got {d}")
    norm = _norm(req.norm, cfg.norm)
    try:
        zeta_rep = zeta_exact_report(cfg.model, region, d, norm)
        zeta_star_rep = zeta_star_exact_report(cfg.model, region, d, norm)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    gamma_payload = None
    if len(region) >= 2:
        gamma_payload = _payload(
            CoefficientReport(
                region=region,
                d=d,
                norm=norm,
                kind="gamma",
                method="exact",
                value=gamma_exact(cfg.model, region),
            )
        )
    theta_site = zeta_rep.diagnostics["theta_site"]
    return ExactResponse(
        zeta=_payload(zeta_rep),
        zeta_star=_payload(zeta_star_rep),
        gamma=gamma_payload,
        theta_region=theta_exact(cfg.model, region),
        theta_site_min=min(theta_site),
        theta_site_max=max(theta_site),
        theta_site_mean=math.fsum(theta_site) / len(theta_site),
        region_size=len(region),
        v_sum=v_sum(region, d, norm),
    )


def run_estimate(req: EstimateRequest) -> EstimateResponse:
    sample = _resolve_sample(req)
    region = parse_region_spec(req.region)
    norm = _norm(req.norm)
    if req.d <= 0:
        raise ConfigError(f"d must be positive, got {req.d}")
    scores = rank_transform(sample)
    zeta_rep = zeta_hat(sample, region, req.d, norm, clip=req.clip, scores=scores)
    zeta_star_rep = zeta_star_hat(sample, region, req.d, norm, clip=req.clip, scores=scores)
    betas = []
    for pair in req.pairs:
        p1 = (pair.x1[0], pair.x1[1])
        p2 = (pair.x2[0], pair.x2[1])
        try:
            value = beta_hat(sample, p1, p2, scores=scores)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        betas.append(BetaEstimate(x1=list(p1), x2=list(p2), value=value))
    return EstimateResponse(
        zeta=_payload(zeta_rep),
        zeta_star=_payload(zeta_star_rep),
        betas=betas,
        n=sample.n,
        tie_pairs=scores.tie_pairs,
        provenance=sample.provenance,
    )


def run_sweep(req: SweepRequest) -> SweepResponse:
    sample = _resolve_sample(req)
    region = parse_region_spec(req.region)
    norm = _norm(req.norm)
    if req.d <= 0:
        raise ConfigError(f"d must be positive, got {req.d}")
    missing = dilate(region, req.d, norm).difference(sample.domain)
    if missing:
        raise MissingSupport(missing)
    mode = req.mode
    if mode == "auto":
        mode = "parametric" if sample.is_unit_frechet() else "rank"
    try:
        field = uniformize(sample, mode)
        result = level_sweep(field, region, req.d, norm, req.levels)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if all(e.conditioning_count == 0 for e in result.entries):
        # the whole grid sits above every observed score
        raise NoExceedances(result.entries[0].u)
    rows = [
        SweepRow(
            u=e.u,
            zeta_u=e.zeta_u,
            zeta_star_u=e.zeta_star_u,
            conditioning_count=e.conditioning_count,
            oscillations=e.oscillation_total,
            exceedances=e.exceedance_total,
        )
        for e in result.entries
    ]
    return SweepResponse(rows=rows, csv=result.to_csv(), mode=mode)


def run_map(req: MapRequest) -> MapResponse:
    norm = _norm(req.norm)
    if req.d <= 0:
        raise ConfigError(f"d must be positive, got {req.d}")
    rows: list[MapRow] = []
    skipped = 0
    if req.mode == "exact":
        cfg = req.model.to_config()
        centers = parse_domain_spec(req.domain)
        for c in _strided(centers, req.stride):
            window = make_square(req.window, c)
            try:
                value = zeta_exact(cfg.model, window, req.d, norm)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
            rows.append(MapRow(x1=c[0], x2=c[1], zeta=value))
    else:
        sample = _resolve_sample(req)
        scores = rank_transform(sample)
        centers = parse_domain_spec(req.domain) if req.domain else sample.domain
        for c in _strided(centers, req.stride):
            window = make_square(req.window, c)
            try:
                rep = zeta_hat(sample, window, req.d, norm, clip=req.clip, scores=scores)
            except MissingSupport:
                skipped += 1
                continue
            rows.append(MapRow(x1=c[0], x2=c[1], zeta=rep.value))
    csv_text = "x1,x2,zeta\n" + "".join(f"{r.x1},{r.x2},{r.zeta!r}\n" for r in rows)
    return MapResponse(rows=rows, skipped=skipped, csv=csv_text)


def _strided(centers: Region, stride: int):
    for x, y in centers:
        if x % stride == 0 and y % stride == 0:
            yield (x, y)
