"""Input validation helpers used across the estimators and functions."""

import math
import numbers

from .exceptions import DomainError


def check_bound(N, *, allow_unbounded=False, minimum=1, name="N"):
    """Validate a digit bound; ``None`` or ``inf`` means unbounded."""
    if N is None or (isinstance(N, float) and math.isinf(N)):
        if not allow_unbounded:
            raise DomainError(f"{name} must be a finite integer here")
        return None
    if isinstance(N, bool) or not isinstance(N, numbers.Integral):
        if isinstance(N, float) and N.is_integer():
            N = int(N)
        else:
            raise DomainError(f"{name} must be an integer, got {N!r}")
    N = int(N)
    if N < minimum:
        raise DomainError(f"{name} must be >= {minimum}, got {N}")
    return N


def check_positive(value, name, *, strict=True):
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise DomainError(f"{name} must be a real number, got {value!r}") from None
    if not math.isfinite(value) or value < 0 or (strict and value == 0):
        raise DomainError(f"{name} must be {'> 0' if strict else '>= 0'}, got {value}")
    return value


def check_count(value, name, minimum=1):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise DomainError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise DomainError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_digits(digits):
    """Return ``digits`` as a tuple of Python ints, all >= 1."""
    out = tuple(int(k) for k in digits)
    if not out:
        raise DomainError("digit sequence must be nonempty")
    if min(out) < 1:
        raise DomainError("continued fraction digits must be >= 1")
    return out
