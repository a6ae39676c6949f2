"""Bessel functions of the first kind and modified Bessel functions I_0, I_1.

Thin, validated wrappers over :mod:`scipy.special`. Every amplitude formula in
the package goes through these so argument checking lives in one place.
"""

import numpy as np
from scipy import special

from .exceptions import DomainError, RangeError

MAX_ORDER = 64
MAX_ZERO_COUNT = 100_000


def _check_order(n, max_order=MAX_ORDER):
    if int(n) != n:
        raise DomainError(f"Bessel order must be an integer, got {n!r}")
    n = int(n)
    if abs(n) > max_order:
        raise DomainError(f"|n| = {abs(n)} exceeds the maximum order {max_order}")
    return n


def _check_argument(x):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("Bessel argument must be finite")
    if np.any(x < 0):
        raise DomainError("Bessel argument must be non-negative")
    return x


def bessel_j(n, x):
    """J_n(x) for integer ``n`` (negative allowed) and ``x >= 0``.

    Accepts scalars or arrays. Negative orders use J_{-n} = (-1)^n J_n.
    """
    n = _check_order(n)
    x = _check_argument(x)
    m = abs(n)
    if m == 0:
        val = special.j0(x)
    elif m == 1:
        val = special.j1(x)
    else:
        val = special.jv(m, x)
    if n < 0 and m % 2:
        val = -val
    return val[()] if isinstance(val, np.ndarray) else val


def bessel_i(n, x, scaled=False):
    """Modified Bessel function I_n(x), n in {0, 1}.

    With ``scaled=True`` returns exp(-x) * I_n(x), which stays finite for all
    x >= 0. The unscaled value overflows a little above x = 713.
    """
    n = _check_order(n)
    if n not in (0, 1):
        raise DomainError(f"bessel_i supports n in {{0, 1}}, got {n}")
    x = _check_argument(x)
    if scaled:
        val = special.i0e(x) if n == 0 else special.i1e(x)
    else:
        with np.errstate(over="ignore"):
            val = special.i0(x) if n == 0 else special.i1(x)
        if not np.all(np.isfinite(val)):
            raise RangeError(
                f"I_{n}(x) overflows for x = {np.max(x):g}; request scaled=True"
            )
    return val[()] if isinstance(val, np.ndarray) else val


def bessel_j_zeros(n, count):
    """First ``count`` positive zeros of J_n, in increasing order."""
    n = _check_order(n)
    if int(count) != count or count < 1 or count > MAX_ZERO_COUNT:
        raise DomainError(f"count must be an integer in [1, {MAX_ZERO_COUNT}]")
    return special.jn_zeros(abs(n), int(count))
