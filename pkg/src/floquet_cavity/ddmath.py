"""Minimal double-double (compensated) arithmetic, vectorized over ndarrays.

Null lines in a compress/decompress protocol amplify mid-course position
errors by the inverse of the accumulated contraction (~1e7 for 16 periods at
the acceptance amplitude), so event times and committed ray positions are
carried as unevaluated (hi, lo) sums. Only a handful of operations per event
are needed; bisection search stays in plain doubles.
"""

import numpy as np

_SPLIT = 134217729.0  # 2**27 + 1


def two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def quick_two_sum(a, b):
    """two_sum requiring |a| >= |b|."""
    s = a + b
    return s, b - (s - a)


def two_product(a, b):
    p = a * b
    ca = _SPLIT * a
    a_hi = ca - (ca - a)
    a_lo = a - a_hi
    cb = _SPLIT * b
    b_hi = cb - (cb - b)
    b_lo = b - b_hi
    err = ((a_hi * b_hi - p) + a_hi * b_lo + a_lo * b_hi) + a_lo * b_lo
    return p, err


def dd_add(a_hi, a_lo, b_hi, b_lo):
    s, e = two_sum(a_hi, b_hi)
    e = e + (a_lo + b_lo)
    return quick_two_sum(s, e)


def dd_sub(a_hi, a_lo, b_hi, b_lo):
    return dd_add(a_hi, a_lo, -b_hi, -b_lo)


def dd_add_double(a_hi, a_lo, b):
    s, e = two_sum(a_hi, b)
    e = e + a_lo
    return quick_two_sum(s, e)


def dd_collapse(a_hi, a_lo):
    return a_hi + a_lo


def dd_where(mask, a_hi, a_lo, b_hi, b_lo):
    return np.where(mask, a_hi, b_hi), np.where(mask, a_lo, b_lo)
