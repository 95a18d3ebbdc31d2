"""Binomial tail/CDF helpers, log-space with streaming summation.

Terms are streamed by the pmf ratio recurrence starting from the first term of
the requested range, which keeps every evaluation O(range) with a single
lgamma-based anchor.  The public `binomial_tail`/`binomial_cdf` pair rewrites
queries so the streamed range always sits on the decaying side of the mode;
the `_direct` variants deliberately do not, because tests compare the two raw
algebraic forms of the alarm probability against each other.
"""

from __future__ import annotations

from math import exp, lgamma, log, log1p

__all__ = [
    "binomial_pmf",
    "binomial_tail",
    "binomial_cdf",
    "binomial_tail_direct",
    "binomial_cdf_direct",
]

# relative size at which a streamed term can no longer move the sum
_STREAM_EPS = 1e-17


def _log_pmf(k: int, n: int, p: float) -> float:
    return (
        lgamma(n + 1.0)
        - lgamma(k + 1.0)
        - lgamma(n - k + 1.0)
        + k * log(p)
        + (n - k) * log1p(-p)
    )


def binomial_pmf(k: int, n: int, p: float) -> float:
    """P(X = k) for X ~ Binomial(n, p)."""
    if not 0 <= k <= n:
        return 0.0
    if p <= 0.0:
        return 1.0 if k == 0 else 0.0
    if p >= 1.0:
        return 1.0 if k == n else 0.0
    return exp(_log_pmf(k, n, p))


def _tail_stream_up(n: int, m: int, p: float) -> float:
    # sum pmf(k) for k = m..n, streaming upward from k = m
    term = exp(_log_pmf(m, n, p))
    total = term
    ratio = p / (1.0 - p)
    for k in range(m, n):
        term *= (n - k) * ratio / (k + 1.0)
        total += term
        if term <= total * _STREAM_EPS:
            break
    return min(total, 1.0)


def _cdf_stream_down(n: int, m: int, p: float) -> float:
    # sum pmf(k) for k = 0..m, streaming downward from k = m
    if m < 0:
        return 0.0
    term = exp(_log_pmf(m, n, p))
    total = term
    ratio = (1.0 - p) / p
    for k in range(m, 0, -1):
        term *= k * ratio / (n - k + 1.0)
        total += term
        if term <= total * _STREAM_EPS:
            break
    return min(total, 1.0)


def binomial_tail(n: int, m: int, p: float) -> float:
    """P(X >= m) for X ~ Binomial(n, p), underflow-safe on either side of the mode."""
    if m <= 0:
        return 1.0
    if m > n:
        return 0.0
    if p <= 0.0:
        return 0.0
    if p >= 1.0:
        return 1.0
    mode = int((n + 1) * p)
    if m <= mode:
        # left of the mode the complement is the small quantity; stream that
        return max(0.0, 1.0 - _cdf_stream_down(n, m - 1, p))
    return _tail_stream_up(n, m, p)


def binomial_cdf(n: int, m: int, p: float) -> float:
    """P(X <= m) for X ~ Binomial(n, p), underflow-safe on either side of the mode."""
    if m < 0:
        return 0.0
    if m >= n:
        return 1.0
    if p <= 0.0:
        return 1.0
    if p >= 1.0:
        return 0.0
    mode = int((n + 1) * p)
    if m >= mode:
        return max(0.0, 1.0 - _tail_stream_up(n, m + 1, p))
    return _cdf_stream_down(n, m, p)


def binomial_tail_direct(n: int, m: int, p: float) -> float:
    """P(X >= m) by the plain upper sum, no mode rewrite.

    Kept separate so the two algebraic forms of the alarm probability can be
    compared against each other as genuinely different computations.
    """
    if m <= 0:
        return 1.0
    if m > n:
        return 0.0
    if p <= 0.0:
        return 0.0
    if p >= 1.0:
        return 1.0
    return _tail_stream_up(n, m, p)


def binomial_cdf_direct(n: int, m: int, p: float) -> float:
    """P(X <= m) by the plain lower sum, no mode rewrite."""
    if m < 0:
        return 0.0
    if m >= n:
        return 1.0
    if p <= 0.0:
        return 1.0
    if p >= 1.0:
        return 0.0
    return _cdf_stream_down(n, m, p)
