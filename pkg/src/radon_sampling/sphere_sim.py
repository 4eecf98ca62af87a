"""
Random geodesics and random k-dimensional sections of S^{n-1}.

For the symmetric test sets (bands, central bands, hemispheres) the measure of
``A cap H`` depends on the frame only through ``rho = |P_H e_1|``: on the
section sphere, ``x_1 = rho <x, w>`` for a unit ``w`` in ``H``, so a band of
threshold ``T`` meets ``H`` in a band of threshold ``T / rho`` on S^{k-1}.
Monte Carlo therefore runs over Haar frames only, with no inner sampling.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, stats

from .errors import ConfigError
from .montecarlo import TAIL_LEVEL, run_chunked, summarize
from .specfun import BandSpec, band_measure, band_measure_beta, band_threshold
from .spectrum import CorrelationQuery, correlation_eigenvalue, variance_bound

__all__ = [
    "OrthonormalFrame",
    "SphereSet",
    "PredicateSet",
    "sample_unit_vector",
    "sample_unit_vectors",
    "sample_frame",
    "sample_frames",
    "sample_tangent_frames",
    "section_fraction",
    "geodesic_band_fraction",
    "subspace_section_estimate",
    "band_section_moments",
    "run_sphere_experiment",
    "run_sharpness_check",
    "run_correlation_experiment",
]

ORTHO_TOL = 1e-10


# --------------------------------------------------------------------------
# Sampling
# --------------------------------------------------------------------------

def sample_unit_vectors(n, size, rng):
    """``size`` independent uniform points on S^{n-1}, shape ``(size, n)``."""
    if n < 2:
        raise ConfigError(f"need n >= 2, got {n}")
    g = rng.standard_normal((size, n))
    norm = np.linalg.norm(g, axis=1)
    bad = norm == 0.0
    while np.any(bad):
        g[bad] = rng.standard_normal((int(bad.sum()), n))
        norm = np.linalg.norm(g, axis=1)
        bad = norm == 0.0
    return g / norm[:, None]


def sample_unit_vector(n, rng):
    return sample_unit_vectors(n, 1, rng)[0]


def _mgs(q):
    # modified Gram-Schmidt on the rows of each (k, n) block, in place
    k = q.shape[1]
    norms = np.empty(q.shape[:2])
    for i in range(k):
        v = q[:, i]
        for j in range(i):
            v -= np.einsum("mn,mn->m", q[:, j], v)[:, None] * q[:, j]
        norms[:, i] = np.linalg.norm(v, axis=1)
        v /= np.where(norms[:, i] > 0, norms[:, i], 1.0)[:, None]
    return norms


def _orthonormalize(g):
    q = g.copy()
    norms = _mgs(q)
    deficient = np.any(norms < 1e-12, axis=1)
    gram = np.einsum("mkn,mjn->mkj", q, q)
    off = np.abs(gram - np.eye(q.shape[1])).max(axis=(1, 2))
    redo = off > ORTHO_TOL
    if np.any(redo):
        sub = q[redo]
        _mgs(sub)
        q[redo] = sub
    return q, deficient


def sample_frames(n, k, size, rng):
    """Haar-distributed orthonormal k-frames in R^n, shape ``(size, k, n)``.

    Gaussian blocks orthonormalized by modified Gram-Schmidt, with a second
    pass on any frame whose Gram matrix is off by more than 1e-10.
    """
    if not 1 <= k <= n:
        raise ConfigError(f"need 1 <= k <= n, got n={n}, k={k}")
    q, deficient = _orthonormalize(rng.standard_normal((size, k, n)))
    while np.any(deficient):
        idx = np.flatnonzero(deficient)
        fresh, still = _orthonormalize(rng.standard_normal((idx.size, k, n)))
        q[idx] = fresh
        deficient[idx] = still
    return q


@dataclass(frozen=True)
class OrthonormalFrame:
    """k orthonormal vectors spanning a random subspace of R^n."""

    basis: np.ndarray

    @property
    def k(self):
        return self.basis.shape[0]

    @property
    def n(self):
        return self.basis.shape[1]

    def projection_norm_sq(self, axis=0):
        """``|P_H e_axis|^2``."""
        return float(np.sum(self.basis[:, axis] ** 2))


def sample_frame(n, k, rng):
    if not 2 <= k <= n - 1:
        raise ConfigError(f"need 2 <= k <= n-1, got n={n}, k={k}")
    return OrthonormalFrame(sample_frames(n, k, 1, rng)[0])


def sample_tangent_frames(n, size, rng):
    """Geodesic frames from a uniform point plus a uniform unit tangent.

    The tangent is a uniform point of S^{n-2} carried onto ``X^perp`` by the
    Householder reflection that sends ``e_n`` to ``X``.  Shape ``(size, 2, n)``.
    """
    x = sample_unit_vectors(n, size, rng)
    z = np.zeros((size, n))
    z[:, : n - 1] = sample_unit_vectors(n - 1, size, rng)
    w = -x.copy()
    w[:, -1] += 1.0
    ww = np.einsum("mn,mn->m", w, w)
    safe = ww > 1e-30
    coef = np.where(safe, 2.0 * np.einsum("mn,mn->m", w, z) / np.where(safe, ww, 1.0), 0.0)
    y = z - coef[:, None] * w
    # x == e_n: reflection is the identity and z already lies in e_n^perp
    return np.stack([x, y], axis=1)


# --------------------------------------------------------------------------
# Test sets
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SphereSet:
    """Symmetric test set on S^{n-1} with its exact normalized measure.

    ``kind`` is ``"band"`` (``|x_1| >= T``), ``"central_band"`` (``|x_1| <= T``)
    or ``"hemisphere"`` (``x_1 >= 0``).
    """

    kind: str
    n: int
    T: float = 0.0
    measure: float = field(default=None)

    def __post_init__(self):
        if self.kind not in ("band", "central_band", "hemisphere"):
            raise ConfigError(f"unknown set kind {self.kind!r}")
        if self.measure is None:
            if self.kind == "hemisphere":
                m = 0.5
            else:
                m = band_measure(BandSpec(self.n, self.T))
                if self.kind == "central_band":
                    m = 1.0 - m
            object.__setattr__(self, "measure", m)

    @classmethod
    def band(cls, n, T):
        return cls("band", n, T)

    @classmethod
    def central_band(cls, n, T):
        return cls("central_band", n, T)

    @classmethod
    def hemisphere(cls, n):
        return cls("hemisphere", n)

    @classmethod
    def with_measure(cls, kind, n, measure):
        """Band or central band whose threshold is tuned to ``measure``."""
        if kind == "hemisphere":
            return cls.hemisphere(n)
        target = measure if kind == "band" else 1.0 - measure
        return cls(kind, n, band_threshold(n, target))

    def contains(self, points):
        x1 = np.asarray(points)[..., 0]
        if self.kind == "band":
            return np.abs(x1) >= self.T
        if self.kind == "central_band":
            return np.abs(x1) <= self.T
        return x1 >= 0.0


@dataclass(frozen=True)
class PredicateSet:
    """Arbitrary set given by a vectorized membership test and its measure."""

    predicate: object
    measure: float
    n: int

    def contains(self, points):
        return np.asarray(self.predicate(points), dtype=bool)


def section_fraction(sphere_set, rho, k):
    """``sigma_H(A cap H)`` for a k-section with ``|P_H e_1| = rho`` (vectorized)."""
    rho = np.asarray(rho, dtype=float)
    if sphere_set.kind == "hemisphere":
        out = np.where(rho > 0.0, 0.5, 1.0)
    else:
        T = sphere_set.T
        if T == 0.0:
            band = np.ones_like(rho)
        else:
            hit = rho > T
            ratio = np.where(hit, T / np.where(hit, rho, 1.0), 1.0)
            if k == 2:
                inner = (2.0 / math.pi) * np.arccos(np.minimum(ratio, 1.0))
            else:
                inner = band_measure_beta(k, ratio)
            band = np.where(hit, inner, 0.0)
        out = band if sphere_set.kind == "band" else 1.0 - band
    return out if out.ndim else float(out)


def geodesic_band_fraction(sphere_set, frame):
    """Exact fraction of the great circle spanned by a 2-frame lying in the set.

    With ``x_1(t) = r cos(t - phi)`` and ``r^2 = u_1^2 + v_1^2`` the band
    ``|x_1| >= T`` covers ``(2/pi) arccos(T/r)`` of the circle when ``r > T``.
    """
    basis = frame.basis if isinstance(frame, OrthonormalFrame) else np.asarray(frame)
    if basis.shape[-2] != 2:
        raise ConfigError("geodesic_band_fraction needs a 2-frame")
    r = np.sqrt(np.sum(basis[..., 0] ** 2, axis=-1))
    return section_fraction(sphere_set, r, 2)


def subspace_section_estimate(sphere_set, frame, m=0, rng=None):
    """``sigma_H(A cap H)`` for the subspace spanned by ``frame``.

    Symmetric sets are evaluated exactly; :class:`PredicateSet` instances are
    estimated from ``m`` uniform points of S^{n-1} cap H.
    """
    basis = frame.basis if isinstance(frame, OrthonormalFrame) else np.asarray(frame)
    k = basis.shape[0]
    if k < 2:
        raise ConfigError("section needs k >= 2")
    if isinstance(sphere_set, SphereSet):
        if k == basis.shape[1]:
            return sphere_set.measure
        rho = math.sqrt(float(np.sum(basis[:, 0] ** 2)))
        return float(section_fraction(sphere_set, rho, k))
    if m <= 0:
        raise ConfigError("predicate sets need m > 0 section samples")
    if rng is None:
        raise ConfigError("predicate sets need an rng")
    y = sample_unit_vectors(k, m, rng)
    return float(np.mean(sphere_set.contains(y @ basis)))


def band_section_moments(n, k, sphere_set):
    """Exact ``(E X, Var X)`` for ``X = sigma_H(A cap H)/sigma(A)``, symmetric ``A``.

    ``rho^2 = |P_H e_1|^2`` is Beta(k/2, (n-k)/2); the expectation is a
    one-dimensional integral over its quantile function.
    """
    dist = stats.beta(k / 2.0, (n - k) / 2.0)
    sigma = sphere_set.measure

    def moment(power):
        def integrand(u):
            rho = math.sqrt(dist.ppf(u))
            return (section_fraction(sphere_set, rho, k) / sigma) ** power
        lo = 0.0
        if sphere_set.kind != "hemisphere" and sphere_set.T > 0:
            lo = float(dist.cdf(sphere_set.T ** 2))
        pts = [lo] if 0 < lo < 1 else []
        val, _ = integrate.quad(integrand, 0.0, 1.0, points=pts or None, limit=400,
                                epsabs=1e-13, epsrel=1e-12)
        return val

    m1 = moment(1)
    return m1, moment(2) - m1 * m1


# --------------------------------------------------------------------------
# Experiments
# --------------------------------------------------------------------------

def _check_nk(n, k):
    if n < 3:
        raise ConfigError(f"need n >= 3, got {n}")
    if not 2 <= k <= n - 1:
        raise ConfigError(f"need 2 <= k <= n-1, got n={n}, k={k}")


def _rho_sq_draw(n, k, model):
    def draw(rng, count):
        if model == "tangent":
            frames = sample_tangent_frames(n, count, rng)
        else:
            frames = sample_frames(n, k, count, rng)
        return np.sum(frames[:, :, 0] ** 2, axis=1)
    return draw


def run_sphere_experiment(n, k, sphere_set, samples, seed, bins=60, workers=1,
                          model="subspace", tail_thresholds=(0.25, 0.5, TAIL_LEVEL, 1.0)):
    """Simulate ``X = sigma_H(A cap H) / sigma(A)`` over Haar k-frames.

    ``model="tangent"`` (k = 2 only) draws geodesics as point plus unit
    tangent instead of as random 2-planes.
    """
    _check_nk(n, k)
    if model not in ("subspace", "tangent"):
        raise ConfigError(f"unknown geodesic model {model!r}")
    if model == "tangent" and k != 2:
        raise ConfigError("the tangent model describes geodesics only (k = 2)")
    if sphere_set.n != n:
        raise ConfigError(f"set lives on S^{sphere_set.n - 1}, experiment on S^{n - 1}")
    rho_sq = run_chunked(_rho_sq_draw(n, k, model), samples, seed, workers)
    x = section_fraction(sphere_set, np.sqrt(rho_sq), k) / sphere_set.measure
    extras = {
        "set_measure": sphere_set.measure,
        "threshold_T": sphere_set.T,
        "p_zero": float(np.count_nonzero(x == 0.0)) / x.size,
        "variance_bound": variance_bound(n, k, sphere_set.measure),
        "tail_level": TAIL_LEVEL,
    }
    config = {"experiment": "sphere", "n": n, "k": k, "set": sphere_set.kind,
              "model": model, "bins": bins}
    return summarize(x, seed, config, center=1.0, tail_thresholds=tail_thresholds,
                     bins=bins, extras=extras)


def run_sharpness_check(dims, samples, seed, workers=1):
    """Empirical and analytic ``P(X = 0)`` for the half-measure band.

    A geodesic misses ``{|x_1| >= T}`` exactly when ``r <= T``; with ``r^2``
    Beta(1, (n-2)/2) that has probability ``1 - (1 - T^2)^{(n-2)/2}``.
    """
    rows = []
    for n in dims:
        if n < 4:
            raise ConfigError(f"sharpness check needs n >= 4, got {n}")
        sset = SphereSet.with_measure("band", n, 0.5)
        rho_sq = run_chunked(_rho_sq_draw(n, 2, "subspace"), samples, seed, workers)
        p = float(np.count_nonzero(rho_sq <= sset.T ** 2)) / samples
        rows.append({
            "n": n,
            "T": sset.T,
            "p_zero": p,
            "p_zero_se": math.sqrt(max(p * (1 - p), 1e-300) / samples),
            "p_zero_exact": 1.0 - (1.0 - sset.T ** 2) ** ((n - 2) / 2.0),
            "samples": samples,
            "seed": seed,
        })
    return rows


def run_correlation_experiment(n, k, samples, seed, workers=1, test_function="x1sq"):
    """Estimate ``E[R_k f(H) R_{n-k} f(H^perp)]``.

    ``test_function="x1sq"`` uses ``f = x_1^2 - 1/n``, whose averages over the
    two complementary sections are ``rho^2/k - 1/n`` and
    ``(1 - rho^2)/(n - k) - 1/n``; ``"constant"`` uses ``f = 1``.
    """
    if n < 4 or not 2 <= k <= n - 2:
        raise ConfigError(f"need 2 <= k <= n-2, got n={n}, k={k}")
    if test_function not in ("x1sq", "constant"):
        raise ConfigError(f"unknown test function {test_function!r}")
    rho_sq = run_chunked(_rho_sq_draw(n, k, "subspace"), samples, seed, workers)
    if test_function == "constant":
        prod = np.ones_like(rho_sq)
        expected = 1.0
    else:
        prod = (rho_sq / k - 1.0 / n) * ((1.0 - rho_sq) / (n - k) - 1.0 / n)
        f_norm_sq = 2.0 * (n - 1) / (n * n * (n + 2))
        expected = correlation_eigenvalue(CorrelationQuery(n, 1)) * f_norm_sq
    config = {"experiment": "correlation", "n": n, "k": k, "test_function": test_function}
    lo, hi = float(prod.min()), float(prod.max())
    if hi <= lo:
        hi = lo + 1.0
    return summarize(prod, seed, config, center=expected, bins=60,
                     hist_range=(lo, hi), extras={"expected": expected})
