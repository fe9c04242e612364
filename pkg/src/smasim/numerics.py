"""Special functions used by the closed-form performance expressions.

`q_function` wraps :func:`scipy.special.erfc`; the exponential integral is
evaluated locally so its accuracy can be pinned over the whole range used
by the ergodic-capacity formula.
"""

import math

import numpy as np
from scipy.special import erfc

__all__ = ["q_function", "exp_integral_ei", "exp_scaled_e1", "binomial"]

EULER_GAMMA = 0.57721566490153286061

# Above this, the asymptotic series for Ei(x) is accurate to < 1e-16 relative.
_ASYMPTOTIC_THRESHOLD = 40.0


def q_function(x):
    """Gaussian tail probability Q(x) = P(Z > x), Z ~ N(0, 1).

    Parameters
    ----------
    x : float or array_like
        Argument(s). Must be finite.

    Returns
    -------
    float or np.ndarray
        ``0.5 * erfc(x / sqrt(2))``.

    Examples
    --------
    >>> q_function(0.0)
    0.5
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("q_function requires finite arguments")
    out = 0.5 * erfc(arr / math.sqrt(2.0))
    if out.ndim == 0:
        return float(out)
    return out


def _ei_series(x: float) -> float:
    # Ei(x) = gamma + ln|x| + sum_{k>=1} x^k / (k * k!)
    term = 1.0
    total = 0.0
    k = 0
    while True:
        k += 1
        term *= x / k
        contrib = term / k
        total += contrib
        if abs(contrib) <= 1e-17 * abs(total):
            break
    return EULER_GAMMA + math.log(abs(x)) + total


def _scaled_e1_continued_fraction(z: float) -> float:
    # e^z E1(z) for z >= 1, modified Lentz on 1 / (z + 1 - 1/(z + 3 - 4/(z + 5 - ...)))
    tiny = 1e-300
    b = z + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 10_000):
        a = -float(i * i)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return h


def _ei_asymptotic(x: float) -> float:
    # Ei(x) ~ e^x / x * sum_k k! / x^k, truncated at the smallest term
    total = 1.0
    term = 1.0
    for k in range(1, int(x)):
        new = term * k / x
        if new > term:
            break
        term = new
        total += term
        if term < 1e-17 * total:
            break
    return math.exp(x) / x * total


def exp_integral_ei(x: float) -> float:
    """Exponential integral Ei(x) for real, nonzero ``x``.

    For negative arguments ``Ei(x) = -E1(-x)``. The power series is used
    for small magnitudes and for moderate positive arguments; a continued
    fraction covers ``x <= -1`` and an asymptotic series ``x > 40``.

    Raises
    ------
    ValueError
        If ``x`` is zero or not finite.
    """
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("exp_integral_ei requires a finite argument")
    if x == 0.0:
        raise ValueError("Ei(x) has a logarithmic singularity at x = 0")
    if x < 0.0:
        if x > -1.0:
            return _ei_series(x)
        return -_scaled_e1_continued_fraction(-x) * math.exp(x)
    if x <= _ASYMPTOTIC_THRESHOLD:
        return _ei_series(x)
    return _ei_asymptotic(x)


def exp_scaled_e1(z: float) -> float:
    """``exp(z) * E1(z)`` for ``z > 0``, without overflow for large ``z``.

    Equal to ``-exp(z) * Ei(-z)``.
    """
    z = float(z)
    if not (z > 0.0 and math.isfinite(z)):
        raise ValueError(f"exp_scaled_e1 requires finite z > 0, got {z}")
    if z < 1.0:
        return -math.exp(z) * _ei_series(-z)
    return _scaled_e1_continued_fraction(z)


def binomial(n: int, k: int) -> int:
    """Exact binomial coefficient C(n, k) for 0 <= k <= n."""
    if isinstance(n, bool) or isinstance(k, bool):
        raise TypeError("binomial expects integers")
    n = int(n) if isinstance(n, (np.integer,)) else n
    k = int(k) if isinstance(k, (np.integer,)) else k
    if not isinstance(n, int) or not isinstance(k, int):
        raise TypeError("binomial expects integers")
    if n < 0 or k < 0:
        raise ValueError("binomial arguments must be non-negative")
    if k > n:
        raise ValueError(f"binomial requires k <= n, got n={n}, k={k}")
    return math.comb(n, k)
