"""Seeded Monte Carlo checks for the random-transmitter square model.

Random numbers come from numpy's ``Philox`` counter-based generator
(Philox4x64-10). Every chunk of ``CHUNK`` draws gets its own key
``(seed, chunk_index)``, and chunk results are reduced in chunk order, so
a result depends only on the :class:`SimConfig` and never on how many
worker threads evaluated it.
"""

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .capacity import distance_cdf

__all__ = [
    "GENERATOR",
    "CHUNK",
    "MODES",
    "SimConfig",
    "SimResult",
    "chunk_generator",
    "sample_points",
    "sample_pair_distances",
    "empirical_distance_cdf",
    "ks_distance",
    "mean_pair_distance",
    "simulate_admission",
    "admission_flags",
    "default_stream_length",
]

GENERATOR = "Philox4x64-10"
CHUNK = 1 << 16
MODES = ("paper-literal", "accepted-only")
DEFAULT_PAIRS = 1_000_000
_BLOCK = 1024
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SimConfig:
    """Square side ``side`` km, exclusion ``exclusion`` km, ``n`` draws.

    ``n`` is the number of point pairs for the distance statistics and the
    stream length for admission; ``None`` picks a default for each.
    ``workers`` only affects speed.
    """

    side: float
    exclusion: float
    n: int | None = None
    seed: int = 0
    mode: str = "paper-literal"
    workers: int = 1

    def __post_init__(self):
        if not self.side > 0:
            raise ValueError(f"side must be > 0, got {self.side}")
        if not self.exclusion > 0:
            raise ValueError(f"exclusion distance must be > 0, got {self.exclusion}")
        if self.n is not None and self.n < 1:
            raise ValueError(f"need at least one sample, got n={self.n}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not 0 <= self.seed <= _MASK64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass(frozen=True)
class SimResult:
    estimate: float
    standard_error: float
    n: int
    seed: int
    mode: str
    se_defined: bool = True
    density: float | None = None
    saturated: bool | None = None

    def to_dict(self):
        out = {
            "estimate": self.estimate,
            "se": self.standard_error,
            "n": self.n,
            "seed": self.seed,
            "mode": self.mode,
        }
        if not self.se_defined:
            out["se_defined"] = False
        if self.density is not None:
            out["density"] = self.density
        if self.saturated is not None:
            out["saturated"] = self.saturated
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, doc):
        return cls(
            estimate=doc["estimate"],
            standard_error=doc["se"],
            n=doc["n"],
            seed=doc["seed"],
            mode=doc["mode"],
            se_defined=doc.get("se_defined", True),
            density=doc.get("density"),
            saturated=doc.get("saturated"),
        )


def chunk_generator(seed, index):
    return np.random.Generator(
        np.random.Philox(key=np.array([seed, index], dtype=np.uint64))
    )


def _chunks(n):
    return [(i, min(CHUNK, n - i * CHUNK)) for i in range((n + CHUNK - 1) // CHUNK)]


def _map_chunks(fn, n, workers):
    chunks = _chunks(n)
    if workers == 1 or len(chunks) == 1:
        return [fn(i, size) for i, size in chunks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda c: fn(*c), chunks))


def sample_points(config, n=None):
    """First ``n`` points of the config's uniform point stream, shape (n, 2)."""
    n = config.n if n is None else n
    parts = _map_chunks(
        lambda i, size: chunk_generator(config.seed, i).random((size, 2)),
        n,
        config.workers,
    )
    return np.concatenate(parts) * config.side


def _pair_chunk(config, i, size):
    u = chunk_generator(config.seed, i).random((size, 4))
    return config.side * np.hypot(u[:, 0] - u[:, 2], u[:, 1] - u[:, 3])


def sample_pair_distances(config):
    """Distances of ``n`` independent uniform point pairs."""
    n = config.n or DEFAULT_PAIRS
    parts = _map_chunks(lambda i, size: _pair_chunk(config, i, size), n, config.workers)
    return np.concatenate(parts)


def empirical_distance_cdf(config, d):
    """Fraction of sampled pairs no further apart than ``d``."""
    if not 0 <= d <= config.side * math.sqrt(2):
        raise ValueError(f"query distance must be in [0, side*sqrt(2)], got {d}")
    n = config.n or DEFAULT_PAIRS
    counts = _map_chunks(
        lambda i, size: int(np.count_nonzero(_pair_chunk(config, i, size) <= d)),
        n,
        config.workers,
    )
    p = sum(counts) / n
    return SimResult(p, math.sqrt(p * (1 - p) / n), n, config.seed, "cdf")


def ks_distance(config, grid=None):
    """Max |empirical - closed-form CDF| over ``grid`` (100 points on [0, h])."""
    h = config.side
    if grid is None:
        grid = np.linspace(0, h, 100)
    dist = np.sort(sample_pair_distances(config))
    emp = np.searchsorted(dist, grid, side="right") / dist.size
    exact = np.array([distance_cdf(g, h) for g in grid])
    return float(np.max(np.abs(emp - exact)))


def mean_pair_distance(config):
    n = config.n or DEFAULT_PAIRS

    def stats(i, size):
        x = _pair_chunk(config, i, size)
        return math.fsum(x), math.fsum(x * x)

    sums = _map_chunks(stats, n, config.workers)
    s1 = math.fsum(s for s, _ in sums)
    s2 = math.fsum(q for _, q in sums)
    mean = s1 / n
    if n == 1:
        return SimResult(mean, 0.0, 1, config.seed, "mean", se_defined=False)
    var = max(s2 - n * mean * mean, 0.0) / (n - 1)
    return SimResult(mean, math.sqrt(var / n), n, config.seed, "mean")


def default_stream_length(exclusion, side):
    """``ceil(20 / F(d))``; ``F`` is taken at ``min(d, h)`` beyond the side."""
    return math.ceil(20.0 / distance_cdf(min(exclusion, side), side))


def _paper_literal(points, d):
    n = len(points)
    admitted = np.zeros(n, dtype=bool)
    for start in range(0, n, _BLOCK):
        block = points[start:start + _BLOCK]
        ok = np.ones(len(block), dtype=bool)
        if start:
            near, _ = cKDTree(points[:start]).query(block, k=1, distance_upper_bound=d)
            ok &= near > d
        pairs = cKDTree(block).query_pairs(d, output_type="ndarray")
        ok[pairs.max(axis=1)] = False
        admitted[start:start + len(block)] = ok
    return admitted


def _accepted_only(points, d):
    n = len(points)
    admitted = np.zeros(n, dtype=bool)
    kept = np.empty((0, 2))
    for start in range(0, n, _BLOCK):
        block = points[start:start + _BLOCK]
        cand = np.arange(len(block))
        if len(kept):
            near, _ = cKDTree(kept).query(block, k=1, distance_upper_bound=d)
            cand = cand[near > d]
        sub = block[cand]
        # earlier in-block neighbours of each candidate
        earlier = [[] for _ in cand]
        for i, j in cKDTree(sub).query_pairs(d, output_type="ndarray"):
            lo, hi = (i, j) if i < j else (j, i)
            earlier[hi].append(lo)
        ok = np.zeros(len(cand), dtype=bool)
        for k, prev in enumerate(earlier):
            ok[k] = not ok[prev].any()
        admitted[start + cand[ok]] = True
        kept = np.concatenate([kept, sub[ok]])
    return admitted


def admission_flags(config):
    """Boolean admission mask over the config's point stream."""
    n = config.n or default_stream_length(config.exclusion, config.side)
    points = sample_points(config, n)
    if config.mode == "paper-literal":
        return _paper_literal(points, config.exclusion)
    return _accepted_only(points, config.exclusion)


def simulate_admission(config):
    """Stream uniform points and count the ones admitted.

    ``paper-literal`` admits point ``i`` when it is further than ``d`` from
    every earlier point, admitted or not; ``accepted-only`` compares only
    against earlier admitted points. ``saturated`` is False when the last
    10 % of the stream still admitted a point.
    """
    flags = admission_flags(config)
    n = len(flags)
    count = int(np.count_nonzero(flags))
    tail = flags[n - max(1, n // 10):]
    return SimResult(
        estimate=float(count),
        standard_error=0.0,
        n=n,
        seed=config.seed,
        mode=config.mode,
        se_defined=False,
        density=count / config.side**2,
        saturated=not bool(tail.any()),
    )
