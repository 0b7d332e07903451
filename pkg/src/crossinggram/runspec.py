"""Parsing of the small textual specs used by the CLI and the service.

Domain specs name the sampled support:     disk:<r> | file:<path>
Region specs name an analysis region:      disk:<r>@<x>,<y> | annulus:<r1>,<r2> | file:<path>
Level grids are comma-separated floats strictly inside (0, 1).

Region files hold the JSON array-of-pairs form produced by Region.to_json.
"""

from __future__ import annotations

from .lattice import Region, make_annulus, make_disk


class ConfigError(ValueError):
    """A run configuration that cannot be executed (CLI exit code 2)."""


def _positive(value: str, what: str) -> float:
    try:
        r = float(value)
    except ValueError:
        raise ConfigError(f"{what} must be a number, got {value!r}") from None
    if r <= 0:
        raise ConfigError(f"{what} must be positive, got {r}")
    return r


def _region_file(path: str) -> Region:
    try:
        with open(path, encoding="utf-8") as fh:
            return Region.from_json(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read region file {path}: {exc}") from None
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad region file {path}: {exc}") from None


def parse_domain_spec(text: str) -> Region:
    """disk:<r> (origin-centered) or file:<path>."""
    spec = text.strip()
    if spec.startswith("disk:"):
        return make_disk(_positive(spec[5:], "domain disk radius"))
    if spec.startswith("file:"):
        return _region_file(spec[5:])
    raise ConfigError(f"bad domain spec {text!r}; expected disk:<r> or file:<path>")


def parse_region_spec(text: str) -> Region:
    """disk:<r>@<x>,<y> (center optional, default origin), annulus:<r1>,<r2>,
    or file:<path>."""
    spec = text.strip()
    if spec.startswith("disk:"):
        body = spec[5:]
        center = (0, 0)
        if "@" in body:
            radius_part, _, center_part = body.partition("@")
            parts = center_part.split(",")
            if len(parts) != 2:
                raise ConfigError(f"bad disk center in region spec {text!r}")
            try:
                center = (int(parts[0]), int(parts[1]))
            except ValueError:
                raise ConfigError(f"disk center must be integers in {text!r}") from None
            body = radius_part
        return make_disk(_positive(body, "region disk radius"), center)
    if spec.startswith("annulus:"):
        parts = spec[8:].split(",")
        if len(parts) != 2:
            raise ConfigError(f"bad annulus region spec {text!r}; expected annulus:<r1>,<r2>")
        try:
            r_lo, r_hi = float(parts[0]), float(parts[1])
        except ValueError:
            raise ConfigError(f"annulus radii must be numbers in {text!r}") from None
        try:
            return make_annulus(r_lo, r_hi)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    if spec.startswith("file:"):
        return _region_file(spec[5:])
    raise ConfigError(
        f"bad region spec {text!r}; expected disk:<r>@<x>,<y>, annulus:<r1>,<r2> "
        "or file:<path>"
    )


def parse_levels(text: str) -> tuple[float, ...]:
    """Comma-separated ascending levels strictly inside (0, 1)."""
    try:
        levels = tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise ConfigError(f"bad level grid {text!r}; expected u1,u2,...") from None
    if not levels:
        raise ConfigError("level grid is empty")
    if any(not (0.0 < u < 1.0) for u in levels):
        raise ConfigError(f"levels must lie strictly in (0, 1), got {levels}")
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise ConfigError(f"levels must be strictly ascending, got {levels}")
    return levels
