"""Real gamma function and the Riesz normalization constant.

The normalization gamma_riesz(alpha) = 2^alpha pi^(N/2) Gamma(alpha/2) / Gamma((N-alpha)/2)
makes the Fourier symbol of the Riesz potential I_alpha equal (2 pi |xi|)^(-alpha);
in particular gamma_riesz(2, 3) = 4 pi, the Newton-potential normalization in R^3.
"""

import math

from .errors import DomainError

# math.gamma is a correctly-rounded Lanczos-type rational approximation, good to
# well under 1e-15 relative on (0, 50]. Above 50 we go through log-gamma so the
# function keeps returning a value (inf on overflow) instead of raising.
_RATIONAL_CUTOFF = 50.0


def gamma(z):
    """Gamma(z) for real z > 0.

    Raises DomainError for non-positive or non-finite arguments; no analytic
    continuation is provided because every formula here keeps its gamma
    arguments positive.
    """
    z = float(z)
    if not math.isfinite(z) or z <= 0.0:
        raise DomainError(f"gamma requires finite z > 0, got {z}")
    if z <= _RATIONAL_CUTOFF:
        return math.gamma(z)
    try:
        return math.exp(math.lgamma(z))
    except OverflowError:
        return math.inf


def riesz_gamma(alpha, dim):
    """Normalization constant gamma(alpha) = 2^alpha pi^(N/2) Gamma(alpha/2) / Gamma((N-alpha)/2).

    Requires 0 < alpha < N and integer N >= 3. Strictly positive on that window;
    it blows up as alpha -> 0+ (numerator pole) and vanishes as alpha -> N-.
    """
    n = _check_dim(dim)
    alpha = float(alpha)
    if not math.isfinite(alpha) or not 0.0 < alpha < n:
        raise DomainError(f"riesz_gamma requires 0 < alpha < N={n}, got alpha={alpha}")
    return 2.0 ** alpha * math.pi ** (n / 2.0) * gamma(alpha / 2.0) / gamma((n - alpha) / 2.0)


def sphere_area(dim):
    """Surface area of the unit sphere S^(N-1) in R^N: 2 pi^(N/2) / Gamma(N/2)."""
    n = _check_dim(dim, minimum=2)
    return 2.0 * math.pi ** (n / 2.0) / gamma(n / 2.0)


def _check_dim(dim, minimum=3):
    n = int(dim)
    if n != dim or n < minimum:
        raise DomainError(f"dimension must be an integer >= {minimum}, got {dim}")
    return n
