"""Student-t CDF and quantile from first principles.

The CDF is expressed through the regularized incomplete beta function,
evaluated with a modified Lentz continued fraction; the quantile inverts the
CDF numerically by bracketed bisection.
"""

from __future__ import annotations

import math

from .errors import ConfigError, NumericalError

_TINY = 1e-30


def log_beta(a: float, b: float) -> float:
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def _beta_cf(a: float, b: float, x: float, max_iter: int = 300, eps: float = 3e-14) -> float:
    """Continued fraction for the incomplete beta (modified Lentz iteration)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        coeff = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + coeff * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + coeff / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        coeff = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + coeff * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + coeff / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        factor = d * c
        h *= factor
        if abs(factor - 1.0) < eps:
            return h
    raise NumericalError(f"incomplete beta continued fraction stalled at a={a}, b={b}, x={x}")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if a <= 0 or b <= 0:
        raise ConfigError(f"beta parameters must be positive, got a={a}, b={b}")
    if not 0.0 <= x <= 1.0:
        raise ConfigError(f"x must be in [0, 1], got {x}")
    if x == 0.0 or x == 1.0:
        return float(x)
    front = math.exp(a * math.log(x) + b * math.log1p(-x) - log_beta(a, b))
    # choose the branch where the continued fraction converges fast
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, 1.0 - x) / b


def student_cdf(t: float, df: float) -> float:
    if df <= 0:
        raise ConfigError(f"degrees of freedom must be positive, got {df}")
    if t == 0.0:
        return 0.5
    x = df / (df + t * t)
    tail = 0.5 * regularized_incomplete_beta(df / 2.0, 0.5, x)
    return 1.0 - tail if t > 0 else tail


def student_quantile(p: float, df: float, tol: float = 1e-6) -> float:
    """Inverse Student-t CDF via bisection to absolute tolerance ``tol``."""
    if not 0.0 < p < 1.0:
        raise ConfigError(f"p must be in (0, 1), got {p}")
    if df <= 0:
        raise ConfigError(f"degrees of freedom must be positive, got {df}")
    if p == 0.5:
        return 0.0
    if p < 0.5:
        return -student_quantile(1.0 - p, df, tol=tol)
    lo, hi = 0.0, 1.0
    while student_cdf(hi, df) < p:
        hi *= 2.0
        if hi > 1e12:
            raise NumericalError(f"quantile bracket blew up for p={p}, df={df}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if student_cdf(mid, df) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
