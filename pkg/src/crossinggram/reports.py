"""Result containers shared by the exact, estimated and finite-level paths."""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field
from typing import Any, Literal, Optional

from .lattice import NormKind, Region

CoefficientKind = Literal["theta", "lambda_pair", "lambda_cond", "gamma", "zeta", "zeta_star"]
Method = Literal["exact", "rank_estimate", "finite_u"]


@dataclass(frozen=True)
class CoefficientReport:
    """One computed coefficient plus everything needed to reproduce it."""

    region: Region
    d: float
    norm: NormKind
    kind: CoefficientKind
    method: Method
    value: float
    diagnostics: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "region": [[x, y] for x, y in self.region],
            "d": self.d,
            "norm": self.norm.value,
            "kind": self.kind,
            "method": self.method,
            "value": self.value,
            "diagnostics": self.diagnostics,
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


@dataclass(frozen=True)
class LevelEntry:
    """Crossing statistics at one level u.

    ``zeta_u``/``zeta_star_u`` are None exactly when no replicate had an
    exceedance in the region at this level (conditioning_count == 0);
    NaN is never stored.
    """

    u: float
    zeta_u: Optional[float]
    zeta_star_u: Optional[float]
    conditioning_count: int
    oscillation_total: int
    exceedance_total: int


@dataclass(frozen=True)
class LevelSweep:
    """Per-level crossing values over an ascending grid of levels."""

    entries: tuple[LevelEntry, ...]

    CSV_HEADER = "u,zeta_u,zeta_star_u,conditioning_count,oscillations,exceedances"

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(self.CSV_HEADER + "\n")
        for e in self.entries:
            z = "" if e.zeta_u is None else repr(e.zeta_u)
            zs = "" if e.zeta_star_u is None else repr(e.zeta_star_u)
            out.write(
                f"{e.u!r},{z},{zs},{e.conditioning_count},"
                f"{e.oscillation_total},{e.exceedance_total}\n"
            )
        return out.getvalue()
