"""Command-line client for the coefficient service.

Commands run the service handlers in process by default; pass
``--server http://host:port`` to send the same request to a running
instance instead.  Every file output is written atomically and gets a
``<out>.json`` provenance sidecar; outputs are byte-identical across
reruns with the same inputs and seed.

Exit codes: 0 success, 2 configuration error, 3 data/support error,
4 numerical error (no exceedances at the requested level).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Any, NoReturn, Optional

from ._version import __version__
from .empirical import NoExceedances
from .estimate import MissingSupport
from .model import DEMO_CONFIG, ModelConfig
from .runspec import ConfigError, parse_levels
from .simulate import _atomic_write, sidecar_path
from .service import handlers
from .service.schemas import (
    EstimateRequest,
    ExactRequest,
    MapRequest,
    ModelSpec,
    PairSpec,
    SimulateRequest,
    SimulateSpec,
    SweepRequest,
)

PRESETS: dict[str, dict[str, Any]] = {
    # the demo surface: three annular cells over the closed disk of radius 50
    "paper-fig1": {
        "model": DEMO_CONFIG,
        "domain": "disk:50",
        "n": 1,
        "seed": 42,
    },
}


def _load_model_spec(path: Optional[str], preset: Optional[str]) -> ModelSpec:
    if path is not None:
        try:
            cfg = ModelConfig.from_file(path)
        except OSError as exc:
            raise ConfigError(f"cannot read model config {path}: {exc}") from None
        except (ValueError, json.JSONDecodeError) as exc:
            raise ConfigError(f"bad model config {path}: {exc}") from None
    elif preset is not None:
        cfg = PRESETS[preset]["model"]
    else:
        raise ConfigError("a model is required: pass --model <path> or --preset")
    return ModelSpec(**cfg.to_dict())


def _read_sample_parts(path: str) -> tuple[str, Optional[dict]]:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read sample {path}: {exc}") from None
    sidecar = None
    side = sidecar_path(path)
    if os.path.exists(side):
        with open(side, encoding="utf-8") as fh:
            sidecar = json.load(fh)
    return text, sidecar


def _parse_pairs(raw: Optional[list[str]]) -> list[PairSpec]:
    pairs = []
    for text in raw or []:
        halves = text.split(":")
        try:
            (a1, a2), (b1, b2) = (h.split(",") for h in halves)
            pairs.append(PairSpec(x1=[int(a1), int(a2)], x2=[int(b1), int(b2)]))
        except ValueError:
            raise ConfigError(
                f"bad --pair {text!r}; expected x1,y1:x2,y2"
            ) from None
    return pairs


def _dispatch(args: argparse.Namespace, path: str, request, response_cls):
    if getattr(args, "server", None):
        return _remote(args.server, path, request, response_cls)
    local = {
        "/simulate": handlers.run_simulate,
        "/exact": handlers.run_exact,
        "/estimate": handlers.run_estimate,
        "/sweep": handlers.run_sweep,
        "/map": handlers.run_map,
    }[path]
    return local(request)


def _remote(server: str, path: str, request, response_cls):
    import httpx

    url = server.rstrip("/") + path
    try:
        resp = httpx.post(url, json=request.model_dump(), timeout=600.0)
    except httpx.HTTPError as exc:
        raise ConfigError(f"cannot reach server {server}: {exc}") from None
    if resp.status_code == 200:
        return response_cls.model_validate(resp.json())
    _raise_remote_error(resp)


def _raise_remote_error(resp) -> NoReturn:
    try:
        detail = resp.json().get("detail")
    except ValueError:
        detail = None
    if isinstance(detail, dict):
        kind = detail.get("kind")
        if kind == "missing_support":
            raise MissingSupport(tuple(tuple(p) for p in detail.get("missing", [])))
        if kind == "no_exceedances":
            raise NoExceedances(detail.get("u", float("nan")))
        raise ConfigError(detail.get("message", f"server error {resp.status_code}"))
    # pydantic validation errors arrive as a list
    raise ConfigError(f"server rejected the request ({resp.status_code}): {detail}")


def _write_output(
    out: Optional[str], text: str, command: str, params: dict[str, Any]
) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    _atomic_write(out, text)
    sidecar = {
        "command": command,
        "config": params,
        "package_version": __version__,
    }
    _atomic_write(sidecar_path(out), json.dumps(sidecar, indent=2) + "\n")


def _norm_d_params(args) -> dict[str, Any]:
    params: dict[str, Any] = {}
    if args.d is not None:
        params["d"] = args.d
    if args.norm is not None:
        params["norm"] = args.norm
    return params


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_simulate(args: argparse.Namespace) -> int:
    preset = PRESETS.get(args.preset) if args.preset else None
    if args.preset and preset is None:
        raise ConfigError(f"unknown preset {args.preset!r}; available: {sorted(PRESETS)}")
    model = _load_model_spec(args.model, args.preset)
    domain = args.domain or (preset["domain"] if preset else None)
    if domain is None:
        raise ConfigError("a domain is required: pass --domain disk:<r> or file:<path>")
    n = args.n if args.n is not None else (preset["n"] if preset else 1000)
    seed = args.seed if args.seed is not None else (preset["seed"] if preset else 0)
    if args.out is None:
        raise ConfigError("simulate requires --out <path> for the sample CSV")
    from .service.schemas import SimulateResponse

    request = SimulateRequest(model=model, domain=domain, n=n, seed=seed, field=args.field)
    resp = _dispatch(args, "/simulate", request, SimulateResponse)
    _atomic_write(args.out, resp.csv)
    sidecar = dict(resp.sidecar)
    sidecar["command"] = {
        "name": "simulate",
        "domain": domain,
        "n": n,
        "seed": seed,
        "field": args.field,
        "package_version": __version__,
    }
    _atomic_write(sidecar_path(args.out), json.dumps(sidecar, indent=2) + "\n")
    print(f"wrote {resp.n} replicate(s) over {resp.domain_size} sites to {args.out}")
    return 0


def cmd_exact(args: argparse.Namespace) -> int:
    model = _load_model_spec(args.model, None)
    if args.region is None:
        raise ConfigError("a region is required: pass --region")
    request = ExactRequest(model=model, region=args.region, d=args.d, norm=args.norm)
    from .service.schemas import ExactResponse

    resp = _dispatch(args, "/exact", request, ExactResponse)
    text = json.dumps(resp.model_dump(), indent=2) + "\n"
    _write_output(args.out, text, "exact", {"model": model.model_dump(), "region": args.region})
    return 0


def cmd_estimate(args: argparse.Namespace) -> int:
    if args.sample is None:
        raise ConfigError("estimate requires --sample <path>")
    if args.region is None:
        raise ConfigError("a region is required: pass --region")
    csv_text, sidecar = _read_sample_parts(args.sample)
    request = EstimateRequest(
        sample_csv=csv_text,
        sample_sidecar=sidecar,
        region=args.region,
        clip=args.clip,
        pairs=_parse_pairs(args.pair),
        **_norm_d_params(args),
    )
    from .service.schemas import EstimateResponse

    resp = _dispatch(args, "/estimate", request, EstimateResponse)
    text = json.dumps(resp.model_dump(), indent=2) + "\n"
    _write_output(
        args.out,
        text,
        "estimate",
        {"sample": args.sample, "region": args.region, "clip": args.clip},
    )
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    if args.region is None:
        raise ConfigError("a region is required: pass --region")
    levels = list(parse_levels(args.levels)) if args.levels else [0.90, 0.95, 0.99, 0.995]
    common: dict[str, Any] = {"region": args.region, "levels": levels, **_norm_d_params(args)}
    if args.sample is not None:
        csv_text, sidecar = _read_sample_parts(args.sample)
        request = SweepRequest(sample_csv=csv_text, sample_sidecar=sidecar, **common)
    elif args.model is not None:
        if args.domain is None:
            raise ConfigError("on-the-fly sweep needs --domain for the simulated support")
        request = SweepRequest(
            simulate=SimulateSpec(
                model=_load_model_spec(args.model, None),
                domain=args.domain,
                n=args.n if args.n is not None else 1000,
                seed=args.seed if args.seed is not None else 0,
            ),
            **common,
        )
    else:
        raise ConfigError("sweep needs --sample <path> or --model (with --domain, --n, --seed)")
    from .service.schemas import SweepResponse

    resp = _dispatch(args, "/sweep", request, SweepResponse)
    _write_output(
        args.out,
        resp.csv,
        "sweep",
        {"region": args.region, "levels": levels, "mode": resp.mode},
    )
    return 0


def cmd_map(args: argparse.Namespace) -> int:
    if args.window is None:
        raise ConfigError("map requires --window <int>")
    common: dict[str, Any] = {
        "mode": args.mode,
        "window": args.window,
        "stride": args.stride,
        "clip": args.clip,
        **_norm_d_params(args),
    }
    if args.mode == "exact":
        request = MapRequest(
            model=_load_model_spec(args.model, None), domain=args.domain, **common
        )
    elif args.sample is not None:
        csv_text, sidecar = _read_sample_parts(args.sample)
        request = MapRequest(
            sample_csv=csv_text, sample_sidecar=sidecar, domain=args.domain, **common
        )
    elif args.model is not None:
        if args.domain is None:
            raise ConfigError("on-the-fly map estimation needs --domain")
        request = MapRequest(
            simulate=SimulateSpec(
                model=_load_model_spec(args.model, None),
                domain=args.domain,
                n=args.n if args.n is not None else 1000,
                seed=args.seed if args.seed is not None else 0,
            ),
            domain=args.domain,
            **common,
        )
    else:
        raise ConfigError("estimate-mode map needs --sample or --model")
    from .service.schemas import MapResponse

    resp = _dispatch(args, "/map", request, MapResponse)
    params = {"mode": args.mode, "window": args.window, "stride": args.stride,
              "skipped_windows": resp.skipped}
    _write_output(args.out, resp.csv, "map", params)
    if resp.skipped:
        print(f"skipped {resp.skipped} window(s) without sampled support", file=sys.stderr)
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crossinggram",
        description="Crossing coefficients for lattice random fields.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, *, server: bool = True) -> None:
        p.add_argument("--model", help="path to a model config JSON file")
        p.add_argument("--domain", help="domain spec: disk:<r> or file:<path>")
        p.add_argument(
            "--region",
            help="region spec: disk:<r>@<x>,<y>, annulus:<r1>,<r2> or file:<path>",
        )
        p.add_argument("--n", type=int, help="replicate count")
        p.add_argument("--seed", type=int, help="64-bit unsigned seed")
        p.add_argument("--d", type=float, help="neighborhood radius (default from model or 1)")
        p.add_argument("--norm", choices=["euclidean", "chebyshev", "manhattan"])
        p.add_argument("--out", help="output path; stdout when omitted")
        if server:
            p.add_argument("--server", help="run against a remote service, e.g. http://host:8000")

    p = sub.add_parser("simulate", help="draw replicates and write a sample CSV")
    add_common(p)
    p.add_argument("--preset", help="named demo setup, e.g. paper-fig1")
    p.add_argument(
        "--field",
        choices=["model", "independent", "totally_dependent"],
        default="model",
        help="field kind; reference fields ignore the model betas",
    )
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("exact", help="closed-form coefficients for a region")
    add_common(p)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("estimate", help="rank-based estimates from a sample CSV")
    add_common(p)
    p.add_argument("--sample", help="sample CSV path (sidecar picked up automatically)")
    p.add_argument("--clip", action="store_true",
                   help="clip neighborhoods to the sampled domain instead of failing")
    p.add_argument("--pair", action="append", metavar="x1,y1:x2,y2",
                   help="site pair for cell-coefficient recovery; repeatable")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("sweep", help="crossing values over a level grid")
    add_common(p)
    p.add_argument("--sample", help="sample CSV path")
    p.add_argument("--levels", help="comma-separated levels, e.g. 0.9,0.95,0.99")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("map", help="per-window crossing values over a domain")
    add_common(p)
    p.add_argument("--sample", help="sample CSV path (estimate mode)")
    p.add_argument("--mode", choices=["exact", "estimate"], default="exact")
    p.add_argument("--window", type=int, help="window half-side in sites")
    p.add_argument("--stride", type=int, default=1, help="keep centers divisible by this")
    p.add_argument("--clip", action="store_true")
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    from pydantic import ValidationError

    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MissingSupport as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NoExceedances as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
