"""
Hit-and-run lines in isotropic convex bodies and the half-volume slab sets.

Bodies are normalized to isotropic position (mean zero, identity covariance):

* ball of radius ``sqrt(n + 2)``,
* cube ``[-sqrt 3, sqrt 3]^n`` (side ``sqrt 12``),
* the simplex ``{y >= 0, sum y <= 1}`` centered at its barycenter and whitened
  by the closed-form inverse square root of the Dirichlet(1, ..., 1)
  covariance ``(I - J/(n+1)) / ((n+1)(n+2))``.

Chords are computed exactly (quadratic for the ball, facet clipping for the
polytopes) and the slab intersection ratio uses interval arithmetic on the
affine function ``t -> <x + t theta, xi>``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError, NumericalError
from .montecarlo import TAIL_LEVEL, run_chunked, summarize
from .specfun import band_threshold
from .sphere_sim import sample_frames, sample_unit_vectors

__all__ = [
    "Ball",
    "Cube",
    "IsotropicSimplex",
    "LineSample",
    "Chord",
    "SlabSet",
    "make_isotropic_body",
    "sample_point",
    "chord",
    "chords",
    "slab_threshold",
    "slab_chord_ratio",
    "slab_chord_ratios",
    "run_zero_one_experiment",
    "run_tail_checks",
    "simplex_pushforward",
    "run_ellipse_experiment",
]

E_SQRT2 = math.e * math.sqrt(2.0)


# --------------------------------------------------------------------------
# Bodies
# --------------------------------------------------------------------------

def _clip_polytope(slack, dslack):
    """Parameter interval where ``slack + t * dslack >= 0`` for every facet."""
    with np.errstate(divide="ignore", invalid="ignore"):
        t = -slack / dslack
    lo = np.where(dslack > 0, t, -np.inf).max(axis=-1)
    hi = np.where(dslack < 0, t, np.inf).min(axis=-1)
    return lo, hi


@dataclass(frozen=True)
class Ball:
    n: int

    kind = "ball"

    @property
    def radius(self):
        return math.sqrt(self.n + 2)

    def sample(self, rng, size):
        u = sample_unit_vectors(self.n, size, rng)
        r = self.radius * rng.random(size) ** (1.0 / self.n)
        return u * r[:, None]

    def chords(self, points, directions):
        b = np.einsum("mn,mn->m", points, directions)
        c = np.einsum("mn,mn->m", points, points) - self.radius ** 2
        disc = np.sqrt(np.maximum(b * b - c, 0.0))
        return -b - disc, -b + disc

    def slack(self, points):
        """Distance-like margin to the boundary (positive inside)."""
        return self.radius - np.linalg.norm(points, axis=-1)


@dataclass(frozen=True)
class Cube:
    n: int

    kind = "cube"
    side = math.sqrt(12.0)

    @property
    def half_side(self):
        return 0.5 * self.side

    def sample(self, rng, size):
        h = self.half_side
        return rng.uniform(-h, h, (size, self.n))

    def chords(self, points, directions):
        h = self.half_side
        slack = np.concatenate([h - points, h + points], axis=-1)
        dslack = np.concatenate([-directions, directions], axis=-1)
        return _clip_polytope(slack, dslack)

    def slack(self, points):
        return self.half_side - np.abs(points).max(axis=-1)


@dataclass(frozen=True)
class IsotropicSimplex:
    """Whitened simplex ``x = c (v + beta mean(v) 1)`` with ``v = y - 1/(n+1)``."""

    n: int

    kind = "simplex"

    @property
    def scale(self):
        return math.sqrt((self.n + 1) * (self.n + 2))

    @property
    def beta(self):
        return math.sqrt(self.n + 1) - 1.0

    @property
    def center(self):
        return 1.0 / (self.n + 1)

    def whiten(self, y):
        v = y - self.center
        return self.scale * (v + self.beta * v.mean(axis=-1, keepdims=True))

    def unwhiten(self, x, shift=True):
        gamma = 1.0 / math.sqrt(self.n + 1) - 1.0
        v = (x + gamma * x.mean(axis=-1, keepdims=True)) / self.scale
        return v + self.center if shift else v

    def sample_raw(self, rng, size):
        """Uniform points of the unwhitened simplex (normalized exponentials)."""
        e = rng.standard_exponential((size, self.n + 1))
        return e[:, : self.n] / e.sum(axis=1, keepdims=True)

    def sample(self, rng, size):
        return self.whiten(self.sample_raw(rng, size))

    def _facets(self, y):
        return np.concatenate([y, 1.0 - y.sum(axis=-1, keepdims=True)], axis=-1)

    def chords(self, points, directions):
        y = self.unwhiten(points)
        d = self.unwhiten(directions, shift=False)
        slack = self._facets(y)
        dslack = np.concatenate([d, -d.sum(axis=-1, keepdims=True)], axis=-1)
        return _clip_polytope(slack, dslack)

    def slack(self, points):
        return self._facets(self.unwhiten(points)).min(axis=-1)


_BODIES = {"ball": Ball, "cube": Cube, "simplex": IsotropicSimplex}


def make_isotropic_body(kind, n):
    if kind not in _BODIES:
        raise ConfigError(f"unsupported body {kind!r}; choose from {sorted(_BODIES)}")
    if n < 2:
        raise ConfigError(f"need n >= 2, got {n}")
    return _BODIES[kind](n)


def sample_point(body, rng, size=None):
    """Uniform point(s) of ``body``; a single point when ``size`` is None."""
    if size is None:
        return body.sample(rng, 1)[0]
    return body.sample(rng, size)


# --------------------------------------------------------------------------
# Lines, chords and slabs
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LineSample:
    point: np.ndarray
    direction: np.ndarray


@dataclass(frozen=True)
class Chord:
    t_minus: float
    t_plus: float

    @property
    def length(self):
        return self.t_plus - self.t_minus


def chords(body, points, directions):
    """Vectorized chord parameters ``(t_minus, t_plus)``."""
    return body.chords(np.asarray(points, float), np.asarray(directions, float))


def chord(body, line):
    point = np.asarray(line.point, float)
    if body.slack(point[None])[0] <= 0:
        raise DomainError("line point must lie strictly inside the body")
    lo, hi = body.chords(point[None], np.asarray(line.direction, float)[None])
    return Chord(float(lo[0]), float(hi[0]))


@dataclass(frozen=True)
class SlabSet:
    """``A_xi = {x in K : |<x, xi>| >= t}``."""

    xi: np.ndarray
    t: float


def _axis(n, xi):
    if xi is None:
        e = np.zeros(n)
        e[0] = 1.0
        return e
    xi = np.asarray(xi, float)
    norm = np.linalg.norm(xi)
    if xi.shape != (n,) or norm == 0:
        raise ConfigError("xi must be a nonzero vector of the body's dimension")
    return xi / norm


def _projections(body, xi, samples, seed):
    def draw(rng, count):
        return np.abs(body.sample(rng, count) @ xi)
    return run_chunked(draw, samples, seed, stream=1)


def slab_threshold(body, xi=None, tolerance=2.5e-3, seed=0, max_iter=200):
    """Half-volume slab threshold ``t_xi``.

    Exact for the cube along a coordinate axis (``side / 4``) and for the ball
    (the ball's one-dimensional marginal is that of S^{n+1}, so the band
    threshold in dimension ``n + 2`` applies).  Otherwise bisection on a
    seeded Monte Carlo volume fraction whose standard error is a quarter of
    ``tolerance``.
    """
    xi = _axis(body.n, xi)
    if isinstance(body, Ball):
        return SlabSet(xi, body.radius * band_threshold(body.n + 2, 0.5))
    if isinstance(body, Cube) and np.count_nonzero(xi) == 1:
        return SlabSet(xi, body.side / 4.0)
    samples = int(math.ceil((2.0 / tolerance) ** 2))
    proj = np.sort(_projections(body, xi, samples, seed))

    def fraction(t):
        return 1.0 - np.searchsorted(proj, t, side="left") / samples

    lo, hi = 0.0, float(proj[-1])
    for _ in range(max_iter):
        if hi - lo <= 1e-12 * hi:
            break
        mid = 0.5 * (lo + hi)
        if fraction(mid) > 0.5:
            lo = mid
        else:
            hi = mid
    t = 0.5 * (lo + hi)
    if abs(fraction(t) - 0.5) > 0.25 * tolerance:
        raise NumericalError("slab threshold bisection did not converge")
    return SlabSet(xi, t)


def slab_chord_ratios(slab, points, directions, t_minus, t_plus):
    """Vectorized ``length(L cap A_xi) / length(L cap K)``.

    Returns ``(ratio, exact)``: ``exact`` marks lines whose excluded interval
    ``|<x + t theta, xi>| < t_xi`` misses the chord (ratio exactly 1) or covers
    it (ratio exactly 0).  Zero-length chords get ``nan``.
    """
    a = np.asarray(points, float) @ slab.xi
    b = np.asarray(directions, float) @ slab.xi
    length = t_plus - t_minus
    ts = slab.t
    flat = b == 0.0
    safe_b = np.where(flat, 1.0, b)
    e1 = (-ts - a) / safe_b
    e2 = (ts - a) / safe_b
    e_lo, e_hi = np.minimum(e1, e2), np.maximum(e1, e2)
    miss = (e_hi <= t_minus) | (e_lo >= t_plus)
    cover = (e_lo <= t_minus) & (e_hi >= t_plus)
    miss = np.where(flat, np.abs(a) >= ts, miss)
    cover = np.where(flat, np.abs(a) < ts, cover)
    overlap = np.clip(np.minimum(e_hi, t_plus) - np.maximum(e_lo, t_minus), 0.0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = 1.0 - overlap / length
    ratio = np.where(miss, 1.0, np.where(cover, 0.0, ratio))
    degenerate = ~(length > 0)
    ratio = np.where(degenerate, np.nan, ratio)
    return ratio, (miss | cover) & ~degenerate


def slab_chord_ratio(slab, line, chord_):
    """Scalar form of :func:`slab_chord_ratios`: ``(ratio, exact_flag)``."""
    ratio, exact = slab_chord_ratios(
        slab, np.asarray(line.point, float)[None], np.asarray(line.direction, float)[None],
        np.array([chord_.t_minus]), np.array([chord_.t_plus]))
    return float(ratio[0]), bool(exact[0])


def _line_draw(body):
    def draw(rng, count):
        return body.sample(rng, count), sample_unit_vectors(body.n, count, rng)
    return draw


def run_zero_one_experiment(body, samples, seed, xi=None, workers=1, bins=60):
    """Distribution of the slab ratio over hit-and-run lines.

    ``extras["fraction_in_01"]`` is the fraction of lines whose ratio is
    exactly 0 or 1.  The slab threshold itself is computed first with the
    same seed (only relevant for Monte Carlo thresholds).
    """
    if samples < 1:
        raise ConfigError("samples must be >= 1")
    slab = slab_threshold(body, xi, seed=seed)
    points, dirs = run_chunked(_line_draw(body), samples, seed, workers)
    lo, hi = body.chords(points, dirs)
    ratio, exact = slab_chord_ratios(slab, points, dirs, lo, hi)
    frac = float(np.count_nonzero(exact)) / samples
    extras = {
        "fraction_in_01": frac,
        "fraction_in_01_se": math.sqrt(max(frac * (1 - frac), 0.0) / samples),
        "fraction_zero": float(np.count_nonzero(exact & (ratio == 0.0))) / samples,
        "fraction_one": float(np.count_nonzero(exact & (ratio == 1.0))) / samples,
        "slab_threshold": slab.t,
        "mean_chord_length": float(np.mean(hi - lo)),
    }
    axis_aligned = np.count_nonzero(slab.xi) == 1
    config = {"experiment": "convex", "body": body.kind, "n": body.n,
              "xi_axis": int(np.argmax(np.abs(slab.xi))) if axis_aligned else None}
    return summarize(ratio, seed, config, center=0.5, bins=bins,
                     hist_range=(0.0, 1.0), extras=extras)


def run_tail_checks(body, samples, seed, xi=None, grid=50, workers=1):
    """Empirical tail checks for chord lengths, directions and slab marginals.

    * chord length survival ``S(t)`` on ``[median, max]``: the tightest
      ``2 exp(-c t)`` envelope is fitted on the first half of the grid and
      checked on all of it;
    * ``P(|<theta, xi>| >= t)`` against ``2 exp(-n t^2 / 2)``;
    * histogram maximum of the density of ``<X, xi>`` against ``e sqrt 2``.
    """
    xi = _axis(body.n, xi)
    n = body.n
    points, dirs = run_chunked(_line_draw(body), samples, seed, workers)
    lo, hi = body.chords(points, dirs)
    lengths = np.sort(hi - lo)

    ts = np.linspace(float(np.median(lengths)), float(lengths[-1]), grid)
    surv = 1.0 - np.searchsorted(lengths, ts, side="left") / samples
    fit = slice(0, grid // 2)
    positive = surv[fit] > 0
    c = float(np.min(-np.log(surv[fit][positive] / 2.0) / ts[fit][positive]))
    envelope = 2.0 * np.exp(-c * ts)
    chord_ok = bool(c > 0 and np.all(surv <= envelope * (1 + 1e-12)))

    proj = np.abs(dirs @ xi)
    dts = np.linspace(0.0, 4.0 / math.sqrt(n), grid)
    dir_tail = np.array([np.count_nonzero(proj >= t) / samples for t in dts])
    dir_env = 2.0 * np.exp(-n * dts ** 2 / 2.0)
    direction_ok = bool(np.all(dir_tail <= dir_env))

    marg = points @ xi
    counts, edges = np.histogram(marg, bins=np.arange(-8.0, 8.0 + 1e-9, 0.05))
    density = counts / (samples * np.diff(edges))
    sup_density = float(density.max())

    return {
        "body": body.kind,
        "n": n,
        "samples": samples,
        "seed": seed,
        "chord": {
            "t": ts.tolist(),
            "survival": surv.tolist(),
            "envelope_c": c,
            "envelope": envelope.tolist(),
            "max_length": float(lengths[-1]),
            "ok": chord_ok,
        },
        "direction": {
            "t": dts.tolist(),
            "tail": dir_tail.tolist(),
            "envelope": dir_env.tolist(),
            "ok": direction_ok,
        },
        "marginal": {
            "sup_density": sup_density,
            "bound": E_SQRT2,
            "ok": sup_density <= E_SQRT2,
        },
    }


# --------------------------------------------------------------------------
# Sphere -> simplex pushforward and random ellipses
# --------------------------------------------------------------------------

def simplex_pushforward(x, n=None):
    """``(x_j^2 + x_{n+1+j}^2)_{j=1..n}`` for points of S^{2n+1} in R^{2n+2}.

    The pair ``(x_{n+1}, x_{2n+2})`` is the implicit slack coordinate, so the
    outputs are nonnegative and sum to at most 1.
    """
    x = np.asarray(x, float)
    dim = x.shape[-1]
    if dim % 2 or dim < 4 or (n is not None and dim != 2 * n + 2):
        raise ConfigError(f"ambient dimension {dim} is not 2n+2" + (f" for n={n}" if n else ""))
    n = dim // 2 - 1
    return x[..., :n] ** 2 + x[..., n + 1: 2 * n + 1] ** 2


def ellipse_first_coordinate(x, y, n, t):
    """First simplex coordinate along ``pi_n(x cos t + y sin t)``.

    ``x``, ``y`` have shape ``(m, 2n+2)``; ``t`` has shape ``(m, points)``.
    """
    c, s = np.cos(t), np.sin(t)
    p = x[:, [0]] * c + y[:, [0]] * s
    q = x[:, [n + 1]] * c + y[:, [n + 1]] * s
    return p * p + q * q


def run_ellipse_experiment(n, samples, seed, points=512, workers=1, bins=60):
    """Random ellipses in the simplex: ``2 mu(A cap L) / mu(L)``.

    ``A = {y in Delta_n : y_1 >= m}`` with ``m = 1 - 2^{-1/n}`` the median of
    Beta(1, n), so ``vol(A) / vol(Delta_n) = 1/2``.  ``mu`` is estimated from
    an equispaced grid of ``points`` circle parameters with a random phase.
    """
    if n < 1 or points < 2:
        raise ConfigError("need n >= 1 and points >= 2")
    median = 1.0 - 2.0 ** (-1.0 / n)
    dim = 2 * n + 2
    grid = 2.0 * math.pi * np.arange(points) / points

    def draw(rng, count):
        frames = sample_frames(dim, 2, count, rng)
        phase = rng.uniform(0.0, 2.0 * math.pi / points, count)
        coord = ellipse_first_coordinate(frames[:, 0], frames[:, 1], n, phase[:, None] + grid)
        return np.mean(coord >= median, axis=1)

    frac = run_chunked(draw, samples, seed, workers)
    x = 2.0 * frac
    config = {"experiment": "ellipse", "n": n, "points": points}
    extras = {"median": median, "mean_fraction": float(np.mean(frac)),
              "tail_level": TAIL_LEVEL}
    return summarize(x, seed, config, center=1.0, tail_thresholds=(TAIL_LEVEL,),
                     bins=bins, extras=extras)
