"""Gamma-family special functions on the positive half line.

Everything the rest of the package needs from the gamma world lives here:
the complete gamma function, the lower/upper incomplete pair, their
regularized forms, and the inverse of the regularized lower function.
Evaluation is delegated to the battle-tested routines in
:mod:`scipy.special`; this module adds the domain policing and the
unregularized variants that the loss/offset computations rely on.

Conventions:

    gamma(a)              = integral_0^inf t^(a-1) exp(-t) dt
    lower_incomplete(a,x) = integral_0^x   t^(a-1) exp(-t) dt
    upper_incomplete(a,x) = integral_x^inf t^(a-1) exp(-t) dt

so ``lower_incomplete(a, x) + upper_incomplete(a, x) == gamma(a)`` for every
admissible ``(a, x)``.  All functions accept scalars or array_likes and
return a float for scalar input, an ndarray otherwise.
"""

from __future__ import annotations

import numpy as np
from scipy import special as _sc

from .errors import DomainError, RangeError

# gamma(a) overflows float64 just above this point.
_GAMMA_OVERFLOW_A = 171.624


def _as_array(name, value, *, positive=False, nonnegative=False):
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite, got {value!r}")
    if positive and not np.all(arr > 0.0):
        raise DomainError(f"{name} must be strictly positive, got {value!r}")
    if nonnegative and not np.all(arr >= 0.0):
        raise DomainError(f"{name} must be non-negative, got {value!r}")
    return arr


def _ret(arr):
    arr = np.asarray(arr)
    return float(arr) if arr.ndim == 0 else arr


def gamma(a):
    """Complete gamma function of a strictly positive argument."""
    a = _as_array("a", a, positive=True)
    if np.any(a > _GAMMA_OVERFLOW_A):
        raise RangeError(f"gamma(a) overflows float64 for a > {_GAMMA_OVERFLOW_A}")
    return _ret(_sc.gamma(a))


def log_gamma(a):
    """Natural log of gamma(a); usable far beyond gamma's overflow point."""
    a = _as_array("a", a, positive=True)
    return _ret(_sc.gammaln(a))


def regularized_lower(a, x):
    """P(a, x) = lower_incomplete(a, x) / gamma(a), in [0, 1]."""
    a = _as_array("a", a, positive=True)
    x = _as_array("x", x, nonnegative=True)
    return _ret(_sc.gammainc(a, x))


def regularized_upper(a, x):
    """Q(a, x) = upper_incomplete(a, x) / gamma(a) = 1 - P(a, x)."""
    a = _as_array("a", a, positive=True)
    x = _as_array("x", x, nonnegative=True)
    return _ret(_sc.gammaincc(a, x))


def regularized_lower_inv(a, p):
    """Inverse of P(a, .): the x with regularized_lower(a, x) == p."""
    a = _as_array("a", a, positive=True)
    p = np.asarray(p, dtype=float)
    if not np.all((p >= 0.0) & (p <= 1.0)):
        raise DomainError(f"p must lie in [0, 1], got {p!r}")
    return _ret(_sc.gammaincinv(a, p))


def lower_incomplete(a, x):
    """Unregularized lower incomplete gamma function."""
    # The unregularized value is bounded by gamma(a), so the only overflow
    # hazard is gamma(a) itself.
    return _ret(np.asarray(gamma(a)) * np.asarray(regularized_lower(a, x)))


def upper_incomplete(a, x):
    """Unregularized upper incomplete gamma function."""
    return _ret(np.asarray(gamma(a)) * np.asarray(regularized_upper(a, x)))
