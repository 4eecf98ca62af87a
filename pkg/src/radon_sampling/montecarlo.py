"""
Shared Monte Carlo plumbing: seeded chunk streams and experiment reports.

Samples are split into fixed-size chunks, chunk ``i`` drawing from its own
generator seeded by ``SeedSequence(seed, spawn_key=(i,))``.  The chunking does
not depend on the number of workers and results are reassembled in chunk
order, so a report is a pure function of ``(config, seed)``.
"""

import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import ConfigError

__all__ = [
    "CHUNK_SIZE",
    "TAIL_LEVEL",
    "chunk_rng",
    "run_chunked",
    "ExperimentReport",
    "summarize",
    "check_seed",
]

CHUNK_SIZE = 1024
TAIL_LEVEL = 2.0 ** (-1.0 / 3.0)
SEED_MAX = 2 ** 64 - 1


def check_seed(seed):
    if not isinstance(seed, (int, np.integer)) or not 0 <= seed <= SEED_MAX:
        raise ConfigError(f"seed must be an integer in [0, 2^64), got {seed!r}")
    return int(seed)


def chunk_rng(seed, chunk_id, stream=0):
    """Independent generator for one chunk of a seeded run.

    ``stream`` separates auxiliary draws (e.g. a Monte Carlo threshold) from
    the main sample stream of the same seed.
    """
    key = (int(chunk_id),) if stream == 0 else (int(stream), int(chunk_id))
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=key)
    return np.random.Generator(np.random.PCG64(ss))


def run_chunked(draw, samples, seed, workers=1, chunk_size=CHUNK_SIZE, stream=0):
    """Call ``draw(rng, count)`` on every chunk and concatenate in chunk order.

    ``draw`` returns an array or a tuple of arrays (concatenated per position).
    """
    if samples < 1:
        raise ConfigError(f"samples must be >= 1, got {samples}")
    if workers < 1:
        raise ConfigError(f"workers must be >= 1, got {workers}")
    check_seed(seed)
    n_chunks = -(-samples // chunk_size)
    jobs = [(i, min(chunk_size, samples - i * chunk_size)) for i in range(n_chunks)]

    def one(job):
        i, count = job
        return draw(chunk_rng(seed, i, stream), count)

    if workers == 1:
        parts = [one(job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, jobs))
    if isinstance(parts[0], tuple):
        return tuple(np.concatenate(col) for col in zip(*parts))
    return np.concatenate(parts)


@dataclass
class ExperimentReport:
    """Summary of one simulated random variable plus its run configuration."""

    samples: int
    mean: float
    variance: float
    mean_se: float
    variance_se: float
    tail_probs: list
    histogram: dict
    seed: int
    config: dict
    extras: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data):
        return cls(**data)

    def histogram_csv(self):
        buf = io.StringIO()
        buf.write("bin_left,bin_right,count\n")
        edges = self.histogram.get("edges", [])
        for left, right, count in zip(edges[:-1], edges[1:], self.histogram.get("counts", [])):
            buf.write(f"{left!r},{right!r},{count}\n")
        return buf.getvalue()


def _moments(values):
    x = np.asarray(values, dtype=float)
    n = x.size
    mean = math.fsum(x) / n
    d = x - mean
    m2 = math.fsum(d * d) / n
    m4 = math.fsum(d ** 4) / n
    mean_se = math.sqrt(m2 / n)
    var_se = math.sqrt(max(m4 - m2 * m2, 0.0) / n)
    return mean, m2, mean_se, var_se


def summarize(values, seed, config, center=1.0, tail_thresholds=(), bins=60,
              hist_range=None, extras=None):
    """Build an :class:`ExperimentReport` from a sample array.

    Tail probabilities are ``P(|X - center| >= t)``.  The default histogram
    spans ``[0, max(2, max X)]``.
    """
    x = np.asarray(values, dtype=float)
    mean, var, mean_se, var_se = _moments(x)
    dev = np.abs(x - center)
    tails = [[float(t), float(np.count_nonzero(dev >= t)) / x.size] for t in tail_thresholds]
    if hist_range is None:
        hist_range = (0.0, max(2.0, float(x.max())))
    counts, edges = np.histogram(x, bins=bins, range=hist_range)
    return ExperimentReport(
        samples=int(x.size),
        mean=mean,
        variance=var,
        mean_se=mean_se,
        variance_se=var_se,
        tail_probs=tails,
        histogram={"edges": [float(e) for e in edges], "counts": [int(c) for c in counts]},
        seed=int(seed),
        config=dict(config),
        extras=dict(extras or {}),
    )
