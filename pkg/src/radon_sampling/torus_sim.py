"""
Arithmetic progressions on the discrete torus ``(Z/pZ)^n``.

Points are stored at lexicographic indices ``sum_i x_i p^(n-1-i)``.  The line
space is the set of raw pairs ``(a; b)`` with ``b != 0``; every pair defines
the length-``p`` progression ``a, a+b, ..., a+(p-1)b``.

Characters ``x -> exp(2 pi i <x, y> / p)`` are handled without complex
arithmetic: in float mode as paired cosine/sine tables, in exact mode by the
exponent ``<x, y> mod p`` (an element of the cyclotomic ring written in the
basis ``1, w, ..., w^(p-1)`` whose only relation is ``sum w^i = 0``).
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ConfigError, DomainError, NumericalError
from .montecarlo import check_seed, chunk_rng, run_chunked

__all__ = [
    "TorusConfig",
    "Progression",
    "TorusFunction",
    "torus_eigenvalue",
    "radon_ap",
    "radon_table",
    "radon_adjoint",
    "apply_S",
    "eigen_check",
    "random_half_set",
    "progression_counts",
    "run_torus_experiment",
]

WORD_LIMIT = 2 ** 31
DEFAULT_BUDGET = 10 ** 9
# p^n characters, each a brute-force pass over p * p^n (p^n - 1) points
CHARACTER_BUDGET = 10 ** 8


def _is_prime(p):
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    return all(p % d for d in range(3, math.isqrt(p) + 1, 2))


@dataclass(frozen=True)
class TorusConfig:
    """``(Z/pZ)^n`` for an odd prime ``p``.

    ``budget`` caps ``p^n (p^n - 1)``, the number of raw progressions touched
    by brute-force operators and exhaustive sweeps.
    """

    p: int
    n: int
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or not _is_prime(self.p) or self.p == 2:
            raise ConfigError(f"p must be an odd prime, got {self.p!r}")
        if self.n < 1:
            raise ConfigError(f"dimension must be >= 1, got {self.n}")
        if self.p ** self.n >= WORD_LIMIT:
            raise ConfigError(f"p^n = {self.p}^{self.n} exceeds the index word budget")

    @property
    def size(self):
        return self.p ** self.n

    @property
    def shape(self):
        return (self.p,) * self.n

    @property
    def line_count(self):
        return self.size * (self.size - 1)

    def check_budget(self, what="operation"):
        if self.line_count > self.budget:
            raise ConfigError(
                f"{what} on p={self.p}, n={self.n} touches {self.line_count} progressions, "
                f"over the budget of {self.budget}")

    def check_character_budget(self):
        work = self.size * self.p * self.line_count
        if work > CHARACTER_BUDGET:
            raise ConfigError(
                f"character sweep on p={self.p}, n={self.n} needs {work} operations, "
                f"over the budget of {CHARACTER_BUDGET}")

    def points(self):
        """All points as an ``(p^n, n)`` integer array in index order."""
        return np.indices(self.shape).reshape(self.n, -1).T.copy()

    def encode(self, x):
        x = np.asarray(x, dtype=np.int64) % self.p
        weights = self.p ** np.arange(self.n - 1, -1, -1, dtype=np.int64)
        return x @ weights

    def decode(self, index):
        return np.stack(np.unravel_index(np.asarray(index), self.shape), axis=-1)


@dataclass(frozen=True)
class Progression:
    a: tuple
    b: tuple
    p: int

    def __post_init__(self):
        if len(self.a) != len(self.b):
            raise DomainError("a and b must have the same dimension")
        if all(int(v) % self.p == 0 for v in self.b):
            raise DomainError("progression step b must be nonzero")

    def orbit(self):
        """The ``p`` points ``a + j b``, shape ``(p, n)``."""
        a = np.asarray(self.a, dtype=np.int64)
        b = np.asarray(self.b, dtype=np.int64)
        j = np.arange(self.p, dtype=np.int64)[:, None]
        return (a + j * b) % self.p


@dataclass(frozen=True)
class TorusFunction:
    """Dense value table over ``(Z/pZ)^n`` (floats, ints or Fractions)."""

    cfg: TorusConfig
    values: np.ndarray

    def __post_init__(self):
        if len(self.values) != self.cfg.size:
            raise DomainError(f"table needs {self.cfg.size} values, got {len(self.values)}")

    @classmethod
    def constant(cls, cfg, c):
        return cls(cfg, np.full(cfg.size, c, dtype=object if isinstance(c, Fraction) else float))


def torus_eigenvalue(cfg, exact=False):
    """``(p^(n-1) - 1) / (p^n - 1)``, the eigenvalue of S on mean-zero functions."""
    value = Fraction(cfg.size // cfg.p - 1, cfg.size - 1)
    return value if exact else float(value)


# --------------------------------------------------------------------------
# Transform and its conjugate
# --------------------------------------------------------------------------

def radon_ap(f, prog):
    """Average of ``f`` over the ``p`` points of a progression."""
    if prog.p != f.cfg.p or len(prog.a) != f.cfg.n:
        raise DomainError("progression does not live on the function's torus")
    vals = f.values[f.cfg.encode(prog.orbit())]
    if vals.dtype == object:
        return sum(vals, Fraction(0)) / prog.p
    return math.fsum(vals) / prog.p


def _steps(cfg):
    return cfg.points()[1:]


def radon_table(f):
    """``(Rf)(a; b)`` for all pairs, shape ``(p^n, p^n - 1)`` (b in index order)."""
    cfg = f.cfg
    cfg.check_budget("radon_table")
    pts = cfg.points()
    out = np.empty((cfg.size, cfg.size - 1))
    for col, b in enumerate(_steps(cfg)):
        acc = np.zeros(cfg.size)
        for j in range(cfg.p):
            acc += f.values[cfg.encode(pts + j * b)]
        out[:, col] = acc / cfg.p
    return out


def radon_adjoint(cfg, g):
    """``(R* g)(a) = mean over b != 0 of g(a; b)``."""
    g = np.asarray(g, dtype=float)
    if g.shape != (cfg.size, cfg.size - 1):
        raise DomainError(f"line table must have shape {(cfg.size, cfg.size - 1)}")
    return TorusFunction(cfg, g.mean(axis=1))


def _progression_sum(table, cfg):
    """``sum_{b != 0} sum_j table(a + j b)`` on the leading ``n`` axes."""
    axes = tuple(range(cfg.n))
    acc = np.zeros_like(table)
    for b in _steps(cfg):
        for j in range(cfg.p):
            shift = tuple(int(-j * s) for s in b)
            acc = acc + np.roll(table, shift, axis=axes)
    return acc


def apply_S(f, exact=False):
    """``(Sf)(a) = (1 / (p (p^n - 1))) sum_{b != 0} sum_j f(a + j b)``.

    Brute force over every raw progression.  With ``exact=True`` the values
    are converted to fractions, summed as integers over a common denominator
    and returned as a ``Fraction`` table.
    """
    cfg = f.cfg
    cfg.check_budget("apply_S")
    denom = cfg.p * (cfg.size - 1)
    if not exact:
        table = np.asarray(f.values, dtype=float).reshape(cfg.shape)
        return TorusFunction(cfg, _progression_sum(table, cfg).ravel() / denom)
    fracs = [Fraction(v) for v in f.values]
    lcd = math.lcm(*(q.denominator for q in fracs))
    ints = np.empty(cfg.size, dtype=object)
    ints[:] = [q.numerator * (lcd // q.denominator) for q in fracs]
    total = _progression_sum(ints.reshape(cfg.shape), cfg).ravel()
    out = np.empty(cfg.size, dtype=object)
    out[:] = [Fraction(int(v), lcd * denom) for v in total]
    return TorusFunction(cfg, out)


def _character_exponents(cfg, y):
    return (cfg.points() @ np.asarray(y, dtype=np.int64)) % cfg.p


def _exact_character_ratio(cfg, y):
    # channel i is the indicator of {<x, y> = i}; S acts channelwise over Z
    e = _character_exponents(cfg, y)
    channels = (e[None, :] == np.arange(cfg.p)[:, None]).astype(np.int64)
    table = np.moveaxis(channels.reshape((cfg.p,) + cfg.shape), 0, -1)
    sums = _progression_sum(table, cfg).reshape(cfg.size, cfg.p)
    # sum_i c_i w^i = N w^e  iff  c_i - N [i == e] is constant in i
    at_e = sums[np.arange(cfg.size), e]
    other = sums[np.arange(cfg.size), (e + 1) % cfg.p]
    scaled = at_e - other
    masked = sums.copy()
    masked[np.arange(cfg.size), e] = other
    if np.any(masked != other[:, None]) or np.any(scaled != scaled[0]):
        return None
    return Fraction(int(scaled[0]), cfg.p * (cfg.size - 1))


def _float_character_ratio(cfg, y, tol):
    phase = 2.0 * np.pi * _character_exponents(cfg, y) / cfg.p
    re, im = np.cos(phase), np.sin(phase)
    s_re = apply_S(TorusFunction(cfg, re)).values
    s_im = apply_S(TorusFunction(cfg, im)).values
    ratio = (s_re @ re + s_im @ im) / (re @ re + im @ im)
    resid = max(np.abs(s_re - ratio * re).max(), np.abs(s_im - ratio * im).max())
    return float(ratio) if resid <= tol else None


def eigen_check(cfg, exact=False, tol=1e-12):
    """Apply S to every character and compare with the predicted eigenvalue.

    Returns rows ``{"y", "ratio", "expected"}``; ``ratio`` is a ``Fraction`` in
    exact mode.  Raises :class:`NumericalError` if a character is not an
    eigenfunction or its ratio disagrees (exactly, or beyond ``tol``).
    """
    cfg.check_character_budget()
    lam = torus_eigenvalue(cfg, exact=True)
    rows = []
    for y in cfg.points():
        expected = Fraction(1) if not y.any() else lam
        if exact:
            ratio = _exact_character_ratio(cfg, y)
            ok = ratio == expected
        else:
            ratio = _float_character_ratio(cfg, y, tol)
            ok = ratio is not None and abs(ratio - float(expected)) <= tol
        if not ok:
            raise NumericalError(f"character y={tuple(int(v) for v in y)} failed: ratio {ratio}")
        rows.append({"y": tuple(int(v) for v in y), "ratio": ratio,
                     "expected": expected if exact else float(expected)})
    return rows


# --------------------------------------------------------------------------
# Progression sampling
# --------------------------------------------------------------------------

def random_half_set(cfg, seed, draw=0):
    """Boolean table with exactly ``floor(p^n / 2)`` points set."""
    rng = chunk_rng(seed, draw, stream=2)
    mask = np.zeros(cfg.size, dtype=bool)
    mask[rng.permutation(cfg.size)[: cfg.size // 2]] = True
    return mask


def _line_ids(cfg, pts, b):
    # the line through x in direction b is labelled by x - x_i b', where
    # b' = b / b_i for the first nonzero coordinate i (so label_i = 0)
    i = int(np.flatnonzero(b)[0])
    b_unit = (b * pow(int(b[i]), -1, cfg.p)) % cfg.p
    return cfg.encode(pts - pts[:, i:i + 1] * b_unit)


def progression_counts(cfg, mask, b):
    """``#(A cap {a + j b})`` for every start point ``a`` (index order)."""
    pts = cfg.points()
    ids = _line_ids(cfg, pts, np.asarray(b, dtype=np.int64))
    per_line = np.bincount(ids, weights=mask, minlength=cfg.size).astype(np.int64)
    return per_line[ids]


def _is_far(counts, p):
    # |c - p/2| >= sqrt(p/2)  <=>  (2c - p)^2 >= 2p, in integers
    d = 2 * counts - p
    return d * d >= 2 * p


def _exhaustive(cfg, mask, workers):
    steps = _steps(cfg)
    parts = np.array_split(np.arange(len(steps)), max(1, min(workers, len(steps))))
    pts = cfg.points()
    weights = mask.astype(np.int64)

    def sweep(block):
        hits = total = total_sq = 0
        for col in block:
            ids = _line_ids(cfg, pts, steps[col])
            counts = np.bincount(ids, weights=weights, minlength=cfg.size).astype(np.int64)[ids]
            hits += int(np.count_nonzero(_is_far(counts, cfg.p)))
            total += int(counts.sum())
            total_sq += int((counts * counts).sum())
        return hits, total, total_sq

    if workers == 1:
        results = [sweep(block) for block in parts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(sweep, parts))
    return tuple(sum(col) for col in zip(*results))


def run_torus_experiment(cfg, mask, mode="exhaustive", count=None, seed=0, workers=1):
    """Probability that ``|#(A cap L) - p/2| >= sqrt(p/2)`` over raw progressions.

    ``mask`` is a boolean table with exactly ``floor(p^n / 2)`` entries set.
    ``mode="exhaustive"`` visits every pair ``(a; b)`` with integer
    accumulators; ``mode="sampled"`` draws ``count`` uniform pairs.

    The report carries the literal bound ``1/2`` and the Chebyshev bound
    ``E(#(A cap L) - p/2)^2 / (p/2)`` with the exact variance
    ``p^2 lambda^2 m (1 - m)``, ``m = |A| / p^n``.
    """
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != (cfg.size,):
        raise DomainError(f"set table must have length {cfg.size}")
    if int(mask.sum()) != cfg.size // 2:
        raise DomainError(f"set must have exactly {cfg.size // 2} points, got {int(mask.sum())}")
    if workers < 1:
        raise ConfigError(f"workers must be >= 1, got {workers}")
    check_seed(seed)
    p = cfg.p
    m = Fraction(cfg.size // 2, cfg.size)
    lam = torus_eigenvalue(cfg, exact=True)
    variance = p * p * lam * m * (1 - m)
    chebyshev = (variance + (p * m - Fraction(p, 2)) ** 2) / Fraction(p, 2)
    report = {
        "p": p, "n": cfg.n, "mode": mode, "seed": int(seed),
        "threshold": math.sqrt(p / 2.0),
        "set_size": cfg.size // 2,
        "lambda_sq": float(lam),
        "literal_bound": 0.5,
        "chebyshev_bound": float(chebyshev),
        "exact_variance": float(variance),
    }
    if mode == "exhaustive":
        cfg.check_budget("exhaustive sweep")
        hits, total, total_sq = _exhaustive(cfg, mask, workers)
        lines = cfg.line_count
        mean = Fraction(total, lines)
        report.update(
            samples=lines,
            probability=hits / lines,
            probability_se=0.0,
            count_mean=float(mean),
            count_variance=float(Fraction(total_sq, lines) - mean * mean),
        )
    elif mode == "sampled":
        if count is None or count < 1:
            raise ConfigError("sampled mode needs a positive progression count")
        weights = p ** np.arange(cfg.n - 1, -1, -1, dtype=np.int64)
        j = np.arange(p, dtype=np.int64)[None, :, None]

        def draw(rng, size):
            a = rng.integers(0, p, (size, cfg.n))
            b = cfg.decode(rng.integers(1, cfg.size, size))
            orbit = (a[:, None, :] + j * b[:, None, :]) % p
            return mask[orbit @ weights].sum(axis=1)

        counts = run_chunked(draw, count, seed, workers=workers)
        q = float(np.count_nonzero(_is_far(counts, p))) / count
        report.update(
            samples=int(count),
            probability=q,
            probability_se=math.sqrt(q * (1.0 - q) / count),
            count_mean=math.fsum(counts) / count,
            count_variance=float(np.var(counts)),
        )
    else:
        raise ConfigError(f"mode must be 'exhaustive' or 'sampled', got {mode!r}")
    return report
