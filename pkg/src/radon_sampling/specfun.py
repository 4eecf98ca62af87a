"""
Special functions for zonal harmonics on S^{n-1}.

Gegenbauer polynomials here carry the weight (1 - t^2)^{(n-3)/2} and the
normalization ``P_ell(1) = C(ell + n - 3, ell)``, which coincides with the
classical ultraspherical polynomial ``C_ell^{(alpha)}`` for ``alpha = (n-2)/2``.

Everything that can overflow (binomials, Pochhammer symbols) is carried in
log space together with an explicit sign.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import betainc, gammaln, zeta

from .errors import DomainError, NumericalError

__all__ = [
    "GegenbauerParams",
    "BandSpec",
    "log_gamma",
    "log_binomial",
    "log_pochhammer",
    "gegenbauer_eval",
    "gegenbauer_normalized",
    "gegenbauer_explicit",
    "tau",
    "adaptive_gauss_legendre",
    "band_measure",
    "band_measure_beta",
    "band_threshold",
]

LOG_PI = math.log(math.pi)


@dataclass(frozen=True)
class GegenbauerParams:
    """Degree ``ell`` zonal polynomial on S^{n-1}."""

    n: int
    ell: int

    def __post_init__(self):
        if self.n < 3:
            raise DomainError(f"Gegenbauer weight needs n >= 3, got n={self.n}")
        if self.ell < 0:
            raise DomainError(f"degree must be nonnegative, got {self.ell}")

    @property
    def alpha(self):
        """Ultraspherical parameter (n-2)/2."""
        return (self.n - 2) / 2.0

    @property
    def weight_exponent(self):
        return (self.n - 3) / 2.0


@dataclass(frozen=True)
class BandSpec:
    """The symmetric band ``{x in S^{n-1} : |x_1| >= T}``."""

    n: int
    T: float

    def __post_init__(self):
        if self.n < 2:
            raise DomainError(f"band needs n >= 2, got n={self.n}")
        if not 0.0 <= self.T <= 1.0:
            raise DomainError(f"band threshold must lie in [0, 1], got {self.T}")


# --------------------------------------------------------------------------
# Gamma family
# --------------------------------------------------------------------------

# ln Gamma(1 + e) = -gamma e + sum_{k>=2} (-1)^k zeta(k) e^k / k, for |e| < 1
_ROOT_SERIES = [-0.5772156649015329] + [(-1) ** k * float(zeta(k)) / k for k in range(2, 40)]
_ROOT_WINDOW = 0.2


def _log_gamma_near_one(eps):
    return math.fsum(c * eps ** (i + 1) for i, c in enumerate(_ROOT_SERIES))


def log_gamma(x):
    """Natural log of the Gamma function for positive real ``x``.

    Next to the roots ``x = 1`` and ``x = 2`` a Taylor series keeps the
    relative error small where ``ln Gamma`` itself vanishes.
    """
    if not x > 0:
        raise DomainError(f"log_gamma requires x > 0, got {x}")
    if abs(x - 1.0) < _ROOT_WINDOW:
        return _log_gamma_near_one(x - 1.0)
    if abs(x - 2.0) < _ROOT_WINDOW:
        eps = x - 2.0
        return _log_gamma_near_one(eps) + math.log1p(eps)
    return float(gammaln(x))


def log_binomial(x, m):
    """ln C(x, m) = ln Gamma(x+1) - ln Gamma(m+1) - ln Gamma(x-m+1).

    ``x`` may be real (half-integer arguments arise for odd n); requires
    ``x - m + 1 > 0``.
    """
    if m < 0 or x - m + 1 <= 0:
        raise DomainError(f"log_binomial undefined for x={x}, m={m}")
    return float(gammaln(x + 1) - gammaln(m + 1) - gammaln(x - m + 1))


def log_pochhammer(a, m):
    """Rising factorial ``(a)_m = a (a+1) ... (a+m-1)`` as ``(sign, ln|value|)``.

    A zero factor gives ``(0, -inf)``; ``m = 0`` gives ``(1, 0.0)``.
    """
    m = int(m)
    if m < 0:
        raise DomainError(f"Pochhammer length must be nonnegative, got {m}")
    if m == 0:
        return 1, 0.0
    if a > 0:
        return 1, float(gammaln(a + m) - gammaln(a))
    # factors a, a+1, ... are negative until index ceil(-a)
    if float(a).is_integer() and m > -a:
        return 0, -math.inf
    n_neg = min(m, math.ceil(-a))
    log_abs = math.fsum(math.log(-(a + i)) for i in range(n_neg))
    if m > n_neg:
        first_pos = a + n_neg
        log_abs += float(gammaln(first_pos + (m - n_neg)) - gammaln(first_pos))
    return (-1 if n_neg % 2 else 1), log_abs


# --------------------------------------------------------------------------
# Gegenbauer polynomials
# --------------------------------------------------------------------------

def _check_t(t):
    arr = np.asarray(t, dtype=float)
    if np.any(np.abs(arr) > 1.0):
        raise DomainError("Gegenbauer argument must satisfy |t| <= 1")


def gegenbauer_eval(params, t):
    """Evaluate ``P_ell(t)`` by the three-term ultraspherical recurrence.

    ``t`` may be a float or an array; values with ``|t| > 1`` raise
    :class:`DomainError`.
    """
    _check_t(t)
    return _gegenbauer_recurrence(params.ell, params.alpha, t)


def _gegenbauer_recurrence(ell, alpha, t):
    # ell C_ell = 2 t (ell + alpha - 1) C_{ell-1} - (ell + 2 alpha - 2) C_{ell-2}
    p_prev = t * 0 + 1
    if ell == 0:
        return p_prev
    p = 2 * alpha * t
    for j in range(2, ell + 1):
        p_prev, p = p, (2 * t * (j + alpha - 1) * p - (j + 2 * alpha - 2) * p_prev) / j
    return p


def gegenbauer_normalized(ell, n, t):
    """``P_ell(t) / P_ell(1)`` for the weight (1-t^2)^{(n-3)/2}.

    Bounded by 1 in absolute value, so it never overflows.  Works unchanged on
    floats, numpy arrays and ``mpmath.mpf`` scalars (no domain check is done,
    callers pass nodes in [-1, 1]).
    """
    # p_ell = (2 t (ell + a - 1) p_{ell-1} - (ell - 1) p_{ell-2}) / (2a + ell - 1)
    two_a = n - 2
    p_prev = t * 0 + 1
    if ell == 0:
        return p_prev
    p = t
    for j in range(2, ell + 1):
        p_prev, p = p, (t * (2 * j + two_a - 2) * p - (j - 1) * p_prev) / (two_a + j - 1)
    return p


def gegenbauer_explicit(params, t, exact=False):
    """``P_ell(t)`` from the explicit power-sum expansion.

        P_ell(t) = sum_j (-1)^j Gamma(ell - j + alpha) / (Gamma(alpha) j! (ell - 2j)!) (2t)^{ell-2j}

    In float mode every coefficient is formed in log space with explicit sign
    and the alternating sum goes through ``math.fsum``; the terms still grow
    like ``(1 + sqrt 2)^ell`` at ``t = 1`` so this loses all digits near
    degree 40.  ``exact=True`` evaluates the same sum over ``Fraction``
    (``t`` is converted exactly from its binary value) and returns a
    ``Fraction``.
    """
    if abs(t) > 1:
        raise DomainError("Gegenbauer argument must satisfy |t| <= 1")
    ell = params.ell
    if exact:
        alpha = Fraction(params.n - 2, 2)
        t = Fraction(t)
        total = Fraction(0)
        for j in range(ell // 2 + 1):
            poch = Fraction(1)
            for i in range(ell - j):
                poch *= alpha + i
            term = poch / (math.factorial(j) * math.factorial(ell - 2 * j)) * (2 * t) ** (ell - 2 * j)
            total += -term if j % 2 else term
        return total

    t = float(t)
    alpha = params.alpha
    terms = []
    for j in range(ell // 2 + 1):
        power = ell - 2 * j
        if t == 0.0 and power > 0:
            continue
        sign, log_poch = log_pochhammer(alpha, ell - j)
        log_mag = log_poch - gammaln(j + 1) - gammaln(power + 1)
        if power > 0:
            log_mag += power * math.log(2.0 * abs(t))
            if t < 0 and power % 2:
                sign = -sign
        if j % 2:
            sign = -sign
        terms.append(sign * math.exp(log_mag))
    return math.fsum(terms)


# --------------------------------------------------------------------------
# Sphere integration constant and bands
# --------------------------------------------------------------------------

def tau(k):
    """Normalizing constant of the weight (1-t^2)^{(k-3)/2} on [-1, 1].

    ``tau(k) = Gamma(k/2) / (sqrt(pi) Gamma(k/2 - 1/2))``.
    """
    if k < 2:
        raise DomainError(f"tau needs k >= 2, got {k}")
    return math.exp(gammaln(k / 2.0) - 0.5 * LOG_PI - gammaln(k / 2.0 - 0.5))


def adaptive_gauss_legendre(f, a, b, tol=1e-15, order=20, max_intervals=20000):
    """Integrate a vectorized ``f`` over ``[a, b]`` by interval bisection.

    Each panel is accepted when the ``order``-point Gauss-Legendre value on it
    agrees with the sum over its two halves to within ``tol`` scaled by the
    panel's share of ``[a, b]``.
    """
    if b == a:
        return 0.0
    x, w = np.polynomial.legendre.leggauss(order)

    def rule(lo, hi):
        half = 0.5 * (hi - lo)
        return half * float(np.dot(w, f(half * x + 0.5 * (hi + lo))))

    width = b - a
    total = []
    stack = [(a, b, rule(a, b))]
    n_intervals = 0
    while stack:
        lo, hi, whole = stack.pop()
        mid = 0.5 * (lo + hi)
        left, right = rule(lo, mid), rule(mid, hi)
        n_intervals += 1
        if abs(left + right - whole) <= tol * max((hi - lo) / width, 1e-3) or mid in (lo, hi):
            total.append(left + right)
        elif n_intervals > max_intervals:
            raise NumericalError("adaptive quadrature exceeded its interval budget")
        else:
            stack.append((lo, mid, left))
            stack.append((mid, hi, right))
    return math.fsum(total)


def _band_tail_integral(n, T):
    # int_T^1 (1 - t^2)^{(n-3)/2} dt
    e = (n - 3) / 2.0
    if n < 5:
        # t = 1 - u^2 removes the endpoint singularity of the weight
        def g(u):
            return 2.0 * u ** (n - 2) * (2.0 - u * u) ** e
        return adaptive_gauss_legendre(g, 0.0, math.sqrt(1.0 - T))

    def h(t):
        return (1.0 - t * t) ** e
    return adaptive_gauss_legendre(h, T, 1.0)


def band_measure(spec):
    """Normalized surface measure of ``{x in S^{n-1} : |x_1| >= T}``.

    Evaluated by adaptive quadrature of the one-dimensional marginal density.
    """
    if isinstance(spec, tuple):
        spec = BandSpec(*spec)
    n, T = spec.n, float(spec.T)
    if T == 0.0:
        return 1.0
    if T == 1.0:
        return 0.0
    value = 2.0 * tau(n) * _band_tail_integral(n, T)
    return min(max(value, 0.0), 1.0)


def band_measure_beta(n, T):
    """Vectorized band measure through the regularized incomplete beta function.

    ``x_1^2`` is Beta(1/2, (n-1)/2) distributed, so the band measure equals
    ``I_{1-T^2}((n-1)/2, 1/2)``.  ``T`` may be an array.
    """
    T = np.asarray(T, dtype=float)
    out = betainc((n - 1) / 2.0, 0.5, np.clip(1.0 - T * T, 0.0, 1.0))
    return out if out.ndim else float(out)


def band_threshold(n, target, tol=1e-13, max_iter=200):
    """Threshold ``T`` with ``band_measure(n, T) == target`` by bisection."""
    if not 0.0 < target < 1.0:
        raise DomainError(f"target measure must lie in (0, 1), got {target}")
    lo, hi = 0.0, 1.0
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            return mid
        m = band_measure(BandSpec(n, mid))
        if abs(m - target) <= 0.01 * tol:
            return mid
        if m > target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * 1e-3:
            return 0.5 * (lo + hi)
    raise NumericalError(f"band_threshold did not converge for n={n}, target={target}")
