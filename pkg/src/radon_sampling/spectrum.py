"""
Eigenvalues of ``S_k = R_k^* R_k`` on zonal harmonics of S^{n-1}.

Two independent routes are provided.  :func:`eigenvalue_quadrature` integrates
the normalized Gegenbauer polynomial against the section weight
``(1 - t^2)^{(k-3)/2}`` with an exact Gaussian rule in extended precision;
:func:`eigenvalue_general` and :func:`eigenvalue_k2` evaluate the closed
Gamma-product forms in log space.

Conventions: ``SpectrumQuery.ell`` is the *harmonic degree* for the quadrature
route, while the closed forms, the ratio recursion and the correlation
eigenvalues take the *half degree* ``ell`` (harmonic degree ``2 ell``), since
odd degrees are annihilated.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath.calculus.quadrature import GaussLegendre
from scipy.special import gammaln

from .errors import ConfigError, DomainError, NumericalError
from .specfun import gegenbauer_normalized, log_binomial

__all__ = [
    "SpectrumQuery",
    "CorrelationQuery",
    "ELL_MAX",
    "eigenvalue_quadrature",
    "eigenvalue_k2",
    "eigenvalue_general",
    "eigenvalue_ratio",
    "correlation_eigenvalue",
    "variance_bound",
    "vandermonde_check",
    "spectrum_table",
]

ELL_MAX = 10_000


@dataclass(frozen=True)
class SpectrumQuery:
    n: int
    k: int
    ell: int

    def __post_init__(self):
        if self.n < 3:
            raise ConfigError(f"ambient dimension must be >= 3, got n={self.n}")
        if not 2 <= self.k <= self.n - 1:
            raise ConfigError(f"need 2 <= k <= n-1, got n={self.n}, k={self.k}")
        if self.ell < 0:
            raise ConfigError(f"degree must be nonnegative, got {self.ell}")


@dataclass(frozen=True)
class CorrelationQuery:
    n: int
    ell: int

    def __post_init__(self):
        if self.n < 3:
            raise ConfigError(f"ambient dimension must be >= 3, got n={self.n}")
        if self.ell < 0:
            raise ConfigError(f"half degree must be nonnegative, got {self.ell}")


# --------------------------------------------------------------------------
# Quadrature oracle
# --------------------------------------------------------------------------

_GL = GaussLegendre(mpmath.mp)


def _section_integral_terms(n, k, degree):
    """Weighted node values of int_{-1}^{1} p(t) (1-t^2)^{(k-3)/2} dt.

    Runs at the current mpmath precision.  For odd ``k`` the integrand is a
    polynomial and Gauss-Legendre is exact; for even ``k`` it is a polynomial
    times (1-t^2)^{-1/2} and Gauss-Chebyshev is exact.
    """
    if k % 2:
        d = degree + k - 3
        need = d // 2 + 1
        level = 1
        while 3 * 2 ** (level - 1) < need:
            level += 1
        nodes = _GL.get_nodes(-1, 1, level, mpmath.mp.prec)
        e = (k - 3) // 2
        return [w * gegenbauer_normalized(degree, n, t) * (1 - t * t) ** e for t, w in nodes]
    d = degree + k - 2
    m = d // 2 + 1
    w = mpmath.pi / m
    e = (k - 2) // 2
    terms = []
    for i in range(1, m + 1):
        t = mpmath.cos((2 * i - 1) * mpmath.pi / (2 * m))
        terms.append(w * gegenbauer_normalized(degree, n, t) * (1 - t * t) ** e)
    return terms


def eigenvalue_quadrature(q, dps=30, max_dps=600):
    """``lambda_{k,ell}^2 = tau_k int P_ell(t)(1-t^2)^{(k-3)/2} dt / P_ell(1)``.

    The Gaussian rule is exact for the integrand, so the only error is
    rounding; the working precision is raised until at least 15 significant
    digits survive the cancellation (for ``k = n-1`` the result can be 40
    orders of magnitude below the integrand).
    """
    n, k, degree = q.n, q.k, q.ell
    if degree % 2:
        # odd zonal harmonics are odd functions and average to zero on sections
        return 0.0
    digits = dps
    while digits <= max_dps:
        with mpmath.workdps(digits):
            terms = _section_integral_terms(n, k, degree)
            value = mpmath.fsum(terms)
            scale = mpmath.fsum(abs(x) for x in terms)
            if value != 0 and abs(value) > scale * mpmath.mpf(10) ** (15 - digits):
                tau_k = mpmath.gamma(mpmath.mpf(k) / 2) / (
                    mpmath.sqrt(mpmath.pi) * mpmath.gamma(mpmath.mpf(k - 1) / 2))
                return float(tau_k * value)
        digits += 30
    raise NumericalError(f"quadrature lost all digits for n={n}, k={k}, degree={degree}")


# --------------------------------------------------------------------------
# Closed forms (half degree ell, harmonic degree 2 ell)
# --------------------------------------------------------------------------

def _log_binom_half(ell, n):
    # ln C(ell + n/2 - 2, ell) through Gamma so odd n works
    return float(gammaln(ell + n / 2.0 - 1) - gammaln(ell + 1) - gammaln(n / 2.0 - 1))


def eigenvalue_k2(n, ell):
    """Geodesic case: ``C(ell+n/2-2, ell)^2 / C(2 ell+n-3, 2 ell)``."""
    if n < 3 or ell < 0:
        raise ConfigError(f"eigenvalue_k2 needs n >= 3, ell >= 0 (got n={n}, ell={ell})")
    if ell == 0:
        return 1.0
    return math.exp(2.0 * _log_binom_half(ell, n) - log_binomial(2 * ell + n - 3, 2 * ell))


def _log_eigenvalue_general(n, k, ell):
    h, kh = n / 2.0, k / 2.0
    # tau_k * sqrt(pi) * Gamma(k/2 - 1/2) collapses to Gamma(k/2)
    log_integral_scaled = (
        gammaln(kh)
        + gammaln(h + ell - 1) - gammaln(ell + 1) - gammaln(kh + ell) - gammaln(h - 1)
        + gammaln(h + ell - kh) - gammaln(h - kh)
    )
    return float(log_integral_scaled) - log_binomial(2 * ell + n - 3, 2 * ell)


def eigenvalue_general(q):
    """Closed form of ``lambda_{k,2 ell}^2`` for any ``2 <= k <= n-1``.

    ``q.ell`` is the half degree.  Summing the power expansion of
    ``P_{2 ell}`` against the section weight reduces, via Chu-Vandermonde, to

        Gamma(k/2) Gamma(n/2+ell-1) Gamma(n/2-k/2+ell)
        ----------------------------------------------------------------
        C(2ell+n-3, 2ell) ell! Gamma(k/2+ell) Gamma(n/2-1) Gamma(n/2-k/2)
    """
    if q.ell == 0:
        return 1.0
    if q.ell > ELL_MAX:
        raise ConfigError(f"half degree capped at {ELL_MAX}, got {q.ell}")
    return math.exp(_log_eigenvalue_general(q.n, q.k, q.ell))


def eigenvalue_ratio(n, k, ell):
    """``lambda_{k,2ell+2}^2 / lambda_{k,2ell}^2``."""
    SpectrumQuery(n, k, ell)
    return (2 * ell + 1) * (2 * ell + n - k) / ((2 * ell + k) * (2 * ell + n - 1))


def correlation_eigenvalue(q):
    """``eta_{2 ell} = P_{2 ell}(0) / P_{2 ell}(1)``, signed.

    Governs ``int R_k f(H) R_{n-k} f(H^perp)`` on degree-``2 ell`` harmonics,
    independently of ``k``.
    """
    if q.ell == 0:
        return 1.0
    log_abs = _log_binom_half(q.ell, q.n) - log_binomial(2 * q.ell + q.n - 3, 2 * q.ell)
    return (-1.0) ** q.ell * math.exp(log_abs)


def variance_bound(n, k, sigma_a):
    """Upper bound on Var(sigma_H(A cap H) / sigma(A)) for a random k-subspace."""
    SpectrumQuery(n, k, 0)
    if not 0.0 < sigma_a < 1.0:
        if sigma_a == 1.0:
            return 0.0
        raise DomainError(f"set measure must lie in (0, 1], got {sigma_a}")
    return (n - k) / (k * (n - 1)) * (1.0 / sigma_a - 1.0)


def vandermonde_check(a, b, c):
    """Both sides of the ball-drawing identity, as exact fractions.

    lhs = sum_j (-1)^j C(b,j) (a+b)! (2b+c-j)! / ((a+b-j)! (2b+c)!)
    rhs = (b+c)! (c-a+b)! / ((c-a)! (2b+c)!)
    """
    if min(a, b, c) <= 0:
        raise DomainError("a, b, c must be positive integers")
    if c < a:
        raise DomainError(f"need c >= a, got a={a}, c={c}")
    fact = math.factorial
    denom = fact(2 * b + c)
    num = 0
    for j in range(b + 1):
        falling = fact(a + b) // fact(a + b - j)
        term = math.comb(b, j) * falling * fact(2 * b + c - j)
        num += -term if j % 2 else term
    lhs = Fraction(num, denom)
    rhs = Fraction(fact(b + c) * fact(c - a + b) // fact(c - a), denom)
    return lhs, rhs


def spectrum_table(n, k, ell_max):
    """Rows ``(n, k, ell, lambda_sq)`` for half degrees ``0..ell_max``."""
    SpectrumQuery(n, k, 0)
    if not 0 <= ell_max <= ELL_MAX:
        raise ConfigError(f"ell_max must lie in [0, {ELL_MAX}], got {ell_max}")
    return [
        {"n": n, "k": k, "ell": ell, "lambda_sq": eigenvalue_general(SpectrumQuery(n, k, ell))}
        for ell in range(ell_max + 1)
    ]
