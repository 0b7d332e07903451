"""Seeded, thread-count-invariant simulation of lattice fields.

Replicates are generated in fixed blocks of 256, each block from its own
Philox stream obtained by jumping a root stream keyed on the seed.  The
draw layout inside a block is fixed (one shared-factor column, then one
column per site in canonical region order), so the output is bit
identical no matter how many worker threads fill the blocks or in what
order they finish.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from ._version import __version__
from .lattice import Point, Region
from .model import PartitionModel

REPLICATE_BLOCK = 256
GENERATOR_ID = "philox-block256-v1"
THREADS_ENV = "CROSSINGGRAM_THREADS"

# smallest positive draw substituted for an exact 0.0 from the uniform
# generator, protecting -1/log(u)
_U_FLOOR = 2.0 ** -54


def resolve_threads(threads: int | None = None) -> int:
    """Worker count: explicit argument, else CROSSINGGRAM_THREADS, else 1."""
    if threads is None:
        raw = os.environ.get(THREADS_ENV, "").strip()
        threads = int(raw) if raw else 1
    if threads < 1:
        raise ValueError(f"thread count must be >= 1, got {threads}")
    return threads


def check_seed(seed: int) -> int:
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ValueError(f"seed must be an integer, got {seed!r}")
    if not (0 <= seed < 2 ** 64):
        raise ValueError(f"seed must fit in an unsigned 64-bit integer, got {seed}")
    return seed


def sample_unit_frechet(u: float) -> float:
    """Inverse-CDF transform of a uniform draw: z with P(Z <= z) = exp(-1/z)."""
    if not (0.0 < u < 1.0):
        raise ValueError(f"uniform variate must lie strictly in (0, 1), got {u}")
    return -1.0 / math.log(u)


@dataclass(frozen=True)
class FieldSample:
    """n replicates of field values over a sampled region.

    ``values[j, i]`` is replicate j at the i-th site of ``domain`` in
    canonical (lexicographic) order.  All values are positive; margins
    are unit Fréchet for simulated samples (``provenance["margin"]``).
    """

    domain: Region
    n: int
    values: np.ndarray
    provenance: dict[str, Any]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"replicate count must be >= 1, got {self.n}")
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != (self.n, len(self.domain)):
            raise ValueError(
                f"values shape {vals.shape} does not match "
                f"(n={self.n}, |domain|={len(self.domain)})"
            )
        if not np.all(np.isfinite(vals)) or not np.all(vals > 0.0):
            raise ValueError("field values must be positive and finite")
        object.__setattr__(self, "values", vals)

    def columns(self, sites: Region) -> np.ndarray:
        """Column indices of ``sites`` inside this sample's domain."""
        missing = sites.difference(self.domain)
        if missing:
            raise KeyError(f"sites not in sampled domain: {missing[:8]}")
        return np.array([self.domain.index_of(p) for p in sites], dtype=np.intp)

    def is_unit_frechet(self) -> bool:
        return self.provenance.get("margin") == "unit_frechet"


def _model_digest(model: PartitionModel) -> str:
    canon = json.dumps(
        {"annuli": list(model.annuli), "betas": list(model.betas)},
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed).jumped(block))


def _fill_blocks(
    n: int,
    seed: int,
    threads: int,
    fill_one: Callable[[np.random.Generator, int, int], None],
) -> None:
    """Run fill_one(rng, row_lo, row_hi) for every replicate block."""
    blocks = range(0, n, REPLICATE_BLOCK)

    def work(start: int) -> None:
        stop = min(start + REPLICATE_BLOCK, n)
        fill_one(_block_rng(seed, start // REPLICATE_BLOCK), start, stop)

    if threads == 1 or len(blocks) == 1:
        for start in blocks:
            work(start)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, blocks))


def simulate_field(
    model: PartitionModel,
    domain: Region,
    n: int,
    seed: int,
    threads: int | None = None,
) -> FieldSample:
    """Draw n replicates of X(x) = max(Y(x) beta(x), R (1 - beta(x))).

    Per replicate, R is drawn once and Y independently per site; all
    margins are unit Fréchet.  beta == 1 everywhere reduces to the
    i.i.d. field (the shared factor is drawn but multiplied by zero, so
    the stream discipline is identical).
    """
    if n < 1:
        raise ValueError(f"replicate count must be >= 1, got {n}")
    check_seed(seed)
    threads = resolve_threads(threads)
    sites = len(domain)
    beta = np.array([model.beta_at(p) for p in domain], dtype=np.float64)
    values = np.empty((n, sites), dtype=np.float64)

    def fill(rng: np.random.Generator, lo: int, hi: int) -> None:
        u = np.maximum(rng.random((hi - lo, sites + 1)), _U_FLOOR)
        z = -1.0 / np.log(u)
        r = z[:, :1]
        y = z[:, 1:]
        np.maximum(y * beta, r * (1.0 - beta), out=values[lo:hi])

    _fill_blocks(n, seed, threads, fill)
    provenance = {
        "field": "model",
        "model": {"annuli": list(model.annuli), "betas": list(model.betas)},
        "model_digest": _model_digest(model),
        "seed": seed,
        "generator": GENERATOR_ID,
        "margin": "unit_frechet",
        "package_version": __version__,
    }
    return FieldSample(domain=domain, n=n, values=values, provenance=provenance)


def simulate_independent(
    domain: Region, n: int, seed: int, threads: int | None = None
) -> FieldSample:
    """i.i.d. unit-Fréchet field; the zero endpoint of the crossing scale."""
    sample = simulate_field(PartitionModel.uniform(1.0), domain, n, seed, threads)
    sample.provenance["field"] = "independent"
    return sample


def simulate_totally_dependent(
    domain: Region, n: int, seed: int, threads: int | None = None
) -> FieldSample:
    """X(x) = R for every site: one Fréchet draw per replicate."""
    if n < 1:
        raise ValueError(f"replicate count must be >= 1, got {n}")
    check_seed(seed)
    threads = resolve_threads(threads)
    sites = len(domain)
    values = np.empty((n, sites), dtype=np.float64)

    def fill(rng: np.random.Generator, lo: int, hi: int) -> None:
        u = np.maximum(rng.random((hi - lo, 1)), _U_FLOOR)
        values[lo:hi] = -1.0 / np.log(u)

    _fill_blocks(n, seed, threads, fill)
    provenance = {
        "field": "totally_dependent",
        "seed": seed,
        "generator": GENERATOR_ID,
        "margin": "unit_frechet",
        "package_version": __version__,
    }
    return FieldSample(domain=domain, n=n, values=values, provenance=provenance)


# ---------------------------------------------------------------------------
# on-disk format: long CSV `rep,x1,x2,value` plus a JSON sidecar
# ---------------------------------------------------------------------------

def sidecar_path(csv_path: str) -> str:
    return csv_path + ".json"


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sample_to_csv(sample: FieldSample) -> str:
    """Long-format CSV text; values carry 17 significant digits so a
    round trip through disk is exact for 64-bit floats."""
    rows = ["rep,x1,x2,value"]
    vals = sample.values
    pts = sample.domain.points
    for j in range(sample.n):
        row = vals[j]
        rows.extend(
            f"{j},{p[0]},{p[1]},{row[i]:.17g}" for i, p in enumerate(pts)
        )
    return "\n".join(rows) + "\n"


def sample_sidecar(sample: FieldSample) -> dict[str, Any]:
    return {
        "domain": [[x, y] for x, y in sample.domain],
        "n": sample.n,
        "provenance": sample.provenance,
    }


def write_sample(sample: FieldSample, csv_path: str) -> None:
    """Write the CSV and its sidecar atomically (temp file + rename)."""
    _atomic_write(csv_path, sample_to_csv(sample))
    _atomic_write(sidecar_path(csv_path), json.dumps(sample_sidecar(sample), indent=2) + "\n")


def sample_from_csv(text: str, provenance: dict[str, Any] | None = None) -> FieldSample:
    """Parse long-format CSV produced here or by any external source.

    Every replicate must cover the same site set; sites may appear in any
    order within a replicate.
    """
    reader = csv.reader(text.splitlines())
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["rep", "x1", "x2", "value"]:
        raise ValueError("sample CSV must start with header rep,x1,x2,value")
    cells: dict[int, dict[Point, float]] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        try:
            rep, x1, x2, value = int(row[0]), int(row[1]), int(row[2]), float(row[3])
        except (ValueError, IndexError):
            raise ValueError(f"bad sample CSV row at line {lineno}: {row!r}") from None
        site = (x1, x2)
        per_rep = cells.setdefault(rep, {})
        if site in per_rep:
            raise ValueError(f"duplicate site {site} for replicate {rep} at line {lineno}")
        per_rep[site] = value
    if not cells:
        raise ValueError("sample CSV contains no data rows")
    reps = sorted(cells)
    if reps != list(range(len(reps))):
        raise ValueError(f"replicate ids must be 0..n-1, got {reps[:5]}...")
    domain = Region(tuple(cells[reps[0]].keys()))
    values = np.empty((len(reps), len(domain)), dtype=np.float64)
    for j in reps:
        per_rep = cells[j]
        if len(per_rep) != len(domain) or any(p not in per_rep for p in domain):
            raise ValueError(f"replicate {j} does not cover the same sites as replicate 0")
        values[j] = [per_rep[p] for p in domain]
    if provenance is None:
        provenance = {"field": "external"}
    return FieldSample(domain=domain, n=len(reps), values=values, provenance=provenance)


def read_sample(csv_path: str) -> FieldSample:
    """Load a sample CSV, using its sidecar for provenance when present."""
    provenance: dict[str, Any] | None = None
    side = sidecar_path(csv_path)
    if os.path.exists(side):
        with open(side, encoding="utf-8") as fh:
            provenance = json.load(fh).get("provenance")
    with open(csv_path, encoding="utf-8") as fh:
        text = fh.read()
    sample = sample_from_csv(text, provenance)
    if provenance is None:
        sample.provenance["source"] = os.path.abspath(csv_path)
    return sample
