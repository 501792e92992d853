"""Compensated summation helpers and the empty-range conventions.

Every summation over an index range in this package goes through these
helpers so that the conventions ``sum over an empty range = 0`` and
``product over an empty range = 1`` have a single home, and so that
brute-force sums are reproducible to 1e-12 across platforms
(``math.fsum`` is exact up to the final rounding).
"""

import math

import numpy as np


def fsum(values):
    """Exactly rounded sum of an iterable or array of floats."""
    if isinstance(values, np.ndarray):
        values = values.tolist()
    return math.fsum(values)


def sum_range(term, lo, hi):
    """Compensated sum of ``term(k)`` for integer k in [lo, hi].

    Returns 0.0 when lo > hi (empty range).
    """
    if lo > hi:
        return 0.0
    return math.fsum(term(k) for k in range(lo, hi + 1))


def prod_range(factor, lo, hi):
    """Product of ``factor(k)`` for integer k in [lo, hi]; 1.0 when empty."""
    out = 1.0
    for k in range(lo, hi + 1):
        out *= factor(k)
    return out


def power_sum(theta, t):
    """Brute-force partial sum of k^(-theta) for k = 1..t."""
    if t < 1:
        return 0.0
    k = np.arange(1, t + 1, dtype=np.float64)
    return fsum(k ** (-theta))
