"""Exact quadratic irrationals ``(P + sqrt(D)) / Q`` with integer data.

Only what the continued fraction machinery needs is implemented: the
floor, subtraction of an integer, reciprocal and conversion to float.
All operations are exact; the invariant ``Q | D - P**2`` is maintained so
that the reciprocal stays in the same normal form.
"""

import math
import re
from decimal import Decimal, localcontext
from fractions import Fraction

from .exceptions import DomainError

__all__ = ["QuadraticSurd", "parse_surd"]


class QuadraticSurd:
    """The real number ``(P + sqrt(D)) / Q``.

    ``D`` is a positive non-square integer and ``Q`` is a nonzero integer
    dividing ``D - P**2``. Use :meth:`from_abcd` for the friendlier
    ``(a + b*sqrt(d)) / c`` form.
    """

    __slots__ = ("P", "D", "Q")

    def __init__(self, P, D, Q):
        P, D, Q = int(P), int(D), int(Q)
        if Q == 0:
            raise DomainError("denominator must be nonzero")
        if D <= 0 or math.isqrt(D) ** 2 == D:
            raise DomainError(f"D={D} must be a positive non-square")
        if (D - P * P) % Q:
            raise DomainError("Q must divide D - P**2")
        self.P, self.D, self.Q = P, D, Q

    @classmethod
    def from_abcd(cls, a, b, d, c=1):
        """Build ``(a + b*sqrt(d)) / c``; returns a Fraction if it is rational."""
        a, b, d, c = int(a), int(b), int(d), int(c)
        if c == 0:
            raise DomainError("denominator must be nonzero")
        if d < 0:
            raise DomainError("negative radicand")
        r = math.isqrt(d)
        if b == 0 or r * r == d:
            return Fraction(a + b * r, c)
        if b < 0:
            a, b, c = -a, -b, -c
        # (a + sqrt(b^2 d)) / c, then scale by |c| to get Q | D - P^2
        D = b * b * d * c * c
        return cls(a * abs(c), D, c * abs(c))

    def __repr__(self):
        return f"QuadraticSurd(P={self.P}, D={self.D}, Q={self.Q})"

    def __eq__(self, other):
        if not isinstance(other, QuadraticSurd):
            return NotImplemented
        # normal forms can differ by a common square factor; compare cross-wise
        return (
            self.P * other.Q == other.P * self.Q
            and self.D * other.Q * other.Q == other.D * self.Q * self.Q
        )

    def __hash__(self):
        return hash(float(self))

    def __float__(self):
        with localcontext() as ctx:
            ctx.prec = 50
            value = (Decimal(self.P) + Decimal(self.D).sqrt()) / Decimal(self.Q)
        return float(value)

    def floor(self):
        r = math.isqrt(self.D)
        if self.Q > 0:
            return (self.P + r) // self.Q
        return (self.P + r + 1) // self.Q

    def __sub__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        # keep P, Q: (P - nQ + sqrt D)/Q and D - (P-nQ)^2 = D - P^2 + Q(...)
        return QuadraticSurd(self.P - n * self.Q, self.D, self.Q)

    def __add__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        return self - (-n)

    __radd__ = __add__

    def reciprocal(self):
        # Q / (P + sqrt D) = (-P + sqrt D) / ((D - P^2) / Q)
        return QuadraticSurd(-self.P, self.D, (self.D - self.P * self.P) // self.Q)

    # irrational, so comparisons with rationals never tie
    def __lt__(self, other):
        return float(self) < float(other)

    def __gt__(self, other):
        return float(self) > float(other)

    def __le__(self, other):
        return float(self) <= float(other)

    def __ge__(self, other):
        return float(self) >= float(other)


_NAMED = {
    "golden": (-1, 1, 5, 2),
    "sqrt2m1": (-1, 1, 2, 1),
}

_SURD_RE = re.compile(
    r"""^\(?(?:(?P<a>[+-]?\d+)(?=[+-]))?(?P<sign>[+-])?(?:(?P<b>\d+)\*?)?
        sqrt\((?P<d>\d+)\)\)?(?:/(?P<c>[+-]?\d+))?$""",
    re.VERBOSE,
)


def parse_surd(text):
    """Parse ``golden``, ``sqrt2m1`` or ``(a+b*sqrt(d))/c``.

    Returns a :class:`QuadraticSurd`, or a :class:`~fractions.Fraction`
    when the expression is rational.
    """
    text = text.strip().replace(" ", "")
    if text in _NAMED:
        a, b, d, c = _NAMED[text]
        return QuadraticSurd.from_abcd(a, b, d, c)
    m = _SURD_RE.match(text)
    if not m:
        raise DomainError(f"cannot parse surd {text!r}")
    a = int(m["a"]) if m["a"] else 0
    b = int(m["b"]) if m["b"] else 1
    if m["sign"] == "-":
        b = -b
    c = int(m["c"]) if m["c"] else 1
    return QuadraticSurd.from_abcd(a, b, int(m["d"]), c)
