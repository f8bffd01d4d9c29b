"""Continued fractions, convergent matrices and the coset action on P^1(F_2).

The extended shift acts on pairs ``(x, s)`` with ``x`` in ``[0, 1]`` and
``s`` one of the three points ``0, 1, inf`` of the projective line over
the field with two elements::

    T(x, s) = (1/x - [1/x], (-[1/x], 1; 1, 0) . s)

Convergents use the indexing ``p_{-1}/q_{-1} = 1/0`` and ``p_0/q_0 = 0/1``
so that the matrix of a single digit ``k`` is ``(0, 1; 1, k)``.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from ._validation import check_count, check_digits
from .exceptions import CuspError, DomainError
from .surd import QuadraticSurd, parse_surd

__all__ = [
    "Coset",
    "AXIS_OF",
    "COSET_OF_AXIS",
    "Digits",
    "ExtendedPoint",
    "Expansion",
    "expansion",
    "cf_digits",
    "cf_value",
    "convergent_matrix",
    "continuant",
    "gauss_shift",
    "coset_act",
    "mobius",
    "extended_shift",
    "axis_permutation",
    "shift_matrix",
    "branch_matrix",
]

# float digits are kept only while the convergent denominator stays below this
FLOAT_DENOMINATOR_CAP = 2**53


class Coset(Enum):
    """A point of P^1(F_2), ordered ``0, 1, inf``."""

    ZERO = "0"
    ONE = "1"
    INF = "inf"

    @property
    def vector(self):
        """Homogeneous coordinates ``[a : b]`` over F_2."""
        return _VECTORS[self]

    @property
    def index(self):
        return _ORDER.index(self)

    @classmethod
    def from_vector(cls, a, b):
        a, b = a % 2, b % 2
        for s, v in _VECTORS.items():
            if v == (a, b):
                return s
        raise DomainError("[0:0] is not a point of the projective line")

    @classmethod
    def parse(cls, value):
        if isinstance(value, Coset):
            return value
        text = str(value).strip().lower()
        if text in ("inf", "infinity", "oo", "∞"):
            return cls.INF
        try:
            return cls(text)
        except ValueError:
            raise DomainError(f"unknown coset label {value!r}") from None

    def __str__(self):
        return self.value


_VECTORS = {Coset.ZERO: (0, 1), Coset.ONE: (1, 1), Coset.INF: (1, 0)}
_ORDER = (Coset.ZERO, Coset.ONE, Coset.INF)
Coset.ORDER = _ORDER

# identification of coset labels with the space axes
AXIS_OF = {Coset.ZERO: "z", Coset.INF: "y", Coset.ONE: "x"}
COSET_OF_AXIS = {axis: s for s, axis in AXIS_OF.items()}


class Digits(Sequence):
    """A finite prefix ``k_1, k_2, ...`` of a continued fraction expansion.

    Parameters
    ----------
    values : sequence of int
        The digits, each at least 1.
    terminated : bool
        The expansion is complete: the number is rational and equals
        ``cf_value(values)``.
    truncated : bool
        Fewer digits than requested could be extracted reliably.
    """

    __slots__ = ("values", "terminated", "truncated")

    def __init__(self, values, terminated=False, truncated=False):
        values = tuple(int(k) for k in values)
        if values and min(values) < 1:
            raise DomainError("continued fraction digits must be >= 1")
        self.values = values
        self.terminated = bool(terminated)
        self.truncated = bool(truncated)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return Digits(self.values[i], truncated=self.truncated)
        return self.values[i]

    def __len__(self):
        return len(self.values)

    def __eq__(self, other):
        if isinstance(other, Digits):
            return (self.values, self.terminated) == (other.values, other.terminated)
        if isinstance(other, (list, tuple)):
            return list(self.values) == list(other)
        return NotImplemented

    def __hash__(self):
        return hash(self.values)

    def __repr__(self):
        flags = "".join(
            f", {name}=True" for name in ("terminated", "truncated") if getattr(self, name)
        )
        return f"Digits({list(self.values)}{flags})"

    def to_json(self):
        return list(self.values)


@dataclass(frozen=True)
class ExtendedPoint:
    """A point ``(x, s)`` of ``[0, 1] x P^1(F_2)``."""

    x: object
    s: Coset

    def __post_init__(self):
        object.__setattr__(self, "s", Coset.parse(self.s))
        if not 0 <= self.x <= 1:
            raise DomainError(f"x must lie in [0, 1], got {self.x}")


# -- exact digit extraction -------------------------------------------------


def _exact_step(value):
    """One Gauss step on an exact value in (0, 1]: returns ``(k, Tx)``."""
    if isinstance(value, QuadraticSurd):
        r = value.reciprocal()
        k = r.floor()
        return k, r - k
    r = 1 / value
    k = math.floor(r)
    return k, r - k


def _rational_digits(x, n):
    out = []
    while x and len(out) < n:
        k, x = _exact_step(x)
        out.append(k)
    return out, x == 0


def _float_digits(x, n):
    exact = Fraction(x)
    ulp = Fraction(math.ulp(x))
    # a float that sits on a simple rational is read as that rational
    simple = exact.limit_denominator(2**20)
    if abs(exact - simple) <= 4 * ulp:
        values, done = _rational_digits(simple, n)
        return Digits(values, terminated=done, truncated=len(values) < n and not done)
    lo, _ = _rational_digits(exact - 2 * ulp, n + 1)
    hi, _ = _rational_digits(exact + 2 * ulp, n + 1)
    values = []
    q_prev, q = 0, 1
    for a, b in zip(lo, hi):
        # the last digit of either endpoint is unreliable as a partial quotient
        if a != b or len(values) >= n:
            break
        q_prev, q = q, a * q + q_prev
        if q > FLOAT_DENOMINATOR_CAP:
            break
        values.append(a)
    return Digits(values, truncated=len(values) < n)


def cf_digits(x, n):
    """First ``n`` continued fraction digits of ``x`` in (0, 1).

    ``x`` may be a float, a :class:`~fractions.Fraction`, a
    :class:`~mixlab.surd.QuadraticSurd` or a surd string such as
    ``"golden"``. Rational numbers give their short expansion (no
    trailing digit 1) with ``terminated=True``. For floats only digits
    that are determined by the float to its last bit are returned, and
    ``truncated=True`` flags a shortfall.

    >>> cf_digits(0.5, 3)
    Digits([2], terminated=True)
    >>> list(cf_digits("sqrt2m1", 4))
    [2, 2, 2, 2]
    """
    n = check_count(n, "n")
    if isinstance(x, str):
        x = parse_surd(x)
    if isinstance(x, int) and not isinstance(x, bool):
        x = Fraction(x)
    if isinstance(x, (Fraction, QuadraticSurd)):
        if not 0 < x < 1:
            raise DomainError(f"x must lie in (0, 1), got {float(x)}")
        values, x_rest = [], x
        while len(values) < n:
            if isinstance(x_rest, Fraction) and x_rest == 0:
                break
            k, x_rest = _exact_step(x_rest)
            values.append(k)
        done = isinstance(x_rest, Fraction) and x_rest == 0
        return Digits(values, terminated=done)
    x = float(x)
    if not 0 < x < 1:
        raise DomainError(f"x must lie in (0, 1), got {x}")
    return _float_digits(x, n)


# -- convergents ------------------------------------------------------------


def _mul(a, b):
    (a00, a01), (a10, a11) = a
    (b00, b01), (b10, b11) = b
    return (
        (a00 * b00 + a01 * b10, a00 * b01 + a01 * b11),
        (a10 * b00 + a11 * b10, a10 * b01 + a11 * b11),
    )


def _chunk_matrix(digits):
    # continuant recursion on one chunk, starting from p_{-1}/q_{-1} = 1/0
    p0, p1, q0, q1 = 1, 0, 0, 1
    for k in digits:
        p0, p1 = p1, k * p1 + p0
        q0, q1 = q1, k * q1 + q0
    return ((p0, p1), (q0, q1))


def convergent_matrix(digits, *, chunk=64):
    """The matrix ``g_n = (p_{n-1}, p_n; q_{n-1}, q_n)`` for ``digits``.

    Computed as a balanced product of per-chunk continuant matrices so that
    very long prefixes stay fast. Entries are exact Python integers.
    """
    digits = check_digits(digits)
    mats = [_chunk_matrix(digits[i : i + chunk]) for i in range(0, len(digits), chunk)]
    while len(mats) > 1:
        paired = [_mul(mats[i], mats[i + 1]) for i in range(0, len(mats) - 1, 2)]
        if len(mats) % 2:
            paired.append(mats[-1])
        mats = paired
    return mats[0]


def continuant(digits):
    """Denominator ``q_n`` of the last convergent of ``digits``."""
    return convergent_matrix(digits)[1][1]


def cf_value(digits):
    """Exact value ``p_n / q_n`` of a finite continued fraction."""
    (_, p), (_, q) = convergent_matrix(digits)
    return Fraction(p, q)


# -- the shift and its coset component -------------------------------------


def gauss_shift(x):
    """Gauss map ``x -> 1/x - [1/x]``; ``0`` is fixed (terminated orbit)."""
    if isinstance(x, (Fraction, QuadraticSurd, int)) and not isinstance(x, bool):
        if isinstance(x, int):
            x = Fraction(x)
        if isinstance(x, Fraction) and x == 0:
            return Fraction(0)
        if not 0 < x <= 1:
            raise DomainError(f"x must lie in (0, 1], got {float(x)}")
        return _exact_step(x)[1]
    x = float(x)
    if x == 0:
        return 0.0
    if not 0 < x <= 1:
        raise DomainError(f"x must lie in (0, 1], got {x}")
    r = 1.0 / x
    return r - math.floor(r)


def shift_matrix(k):
    """``(-k, 1; 1, 0)``, the coset part of one application of the shift."""
    return ((-k, 1), (1, 0))


def branch_matrix(k):
    """``(0, 1; 1, k)``, the inverse branch ``x -> 1/(x + k)``."""
    return ((0, 1), (1, k))


def coset_act(m, s):
    """Fractional linear action of an integer matrix on P^1(F_2).

    ``m`` must have odd determinant, i.e. be invertible modulo 2.
    """
    (a, b), (c, d) = ((int(v) for v in row) for row in m)
    if (a * d - b * c) % 2 == 0:
        raise DomainError("matrix has even determinant; it does not act on P^1(F_2)")
    u, v = Coset.parse(s).vector
    return Coset.from_vector(a * u + b * v, c * u + d * v)


def mobius(m, x):
    """Fractional linear map ``x -> (a x + b) / (c x + d)``."""
    (a, b), (c, d) = m
    return (a * x + b) / (c * x + d)


def _digit(x):
    if isinstance(x, (Fraction, QuadraticSurd)):
        return _exact_step(x)[0]
    return math.floor(1.0 / x)


def extended_shift(p):
    """Apply ``T`` to an :class:`ExtendedPoint`."""
    if p.x == 0:
        raise CuspError("orbit terminated at x = 0")
    k = _digit(p.x)
    return ExtendedPoint(gauss_shift(p.x), coset_act(shift_matrix(k), p.s))


def axis_permutation(k):
    """Permutation of the axes induced by an era with digit ``k``.

    Returned as the string of images of ``x``, ``y``, ``z``: ``"xzy"`` for
    even ``k`` (swap y and z) and ``"zxy"`` for odd ``k``
    (x -> z, y -> x, z -> y).
    """
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise DomainError(f"digit must be a positive integer, got {k!r}")
    m = shift_matrix(int(k))
    return "".join(AXIS_OF[coset_act(m, COSET_OF_AXIS[a])] for a in "xyz")


# -- sources of digits -------------------------------------------------------


class Expansion:
    """A number in ``[0, 1]`` seen as a stream of continued fraction digits.

    Built by :func:`expansion`. Exact values (rationals, quadratic surds)
    produce as many digits as asked for; a finite prefix (from a float or
    an explicit digit list) produces only the digits it holds.
    """

    def __init__(self, value=None, prefix=None, truncated=False):
        if (value is None) == (prefix is None):
            raise ValueError("give exactly one of value, prefix")
        self.value = value
        self.prefix = None if prefix is None else tuple(prefix)
        self.truncated = bool(truncated) if prefix is not None else False
        self._tails = None

    @property
    def exact(self):
        return self.value is not None

    def __repr__(self):
        if self.exact:
            return f"Expansion(value={self.value!r})"
        return f"Expansion(prefix={list(self.prefix)!r}, truncated={self.truncated})"

    def __float__(self):
        if self.exact:
            return float(self.value)
        x = 0.0
        for k in reversed(self.prefix):
            x = 1.0 / (k + x)
        return x

    def is_zero(self):
        if self.exact:
            return isinstance(self.value, Fraction) and self.value == 0
        return not self.prefix

    def digits(self, n):
        n = check_count(n, "n")
        if self.exact:
            if self.is_zero():
                return Digits((), terminated=True)
            values, x = [], self.value
            while len(values) < n and not (isinstance(x, Fraction) and x == 0):
                k, x = _exact_step(x)
                values.append(k)
            return Digits(values, terminated=isinstance(x, Fraction) and x == 0)
        values = self.prefix[:n]
        short = len(values) < n
        return Digits(
            values,
            terminated=short and not self.truncated,
            truncated=short and self.truncated,
        )

    def first_digit(self):
        if self.is_zero():
            raise CuspError("expansion has terminated")
        if self.exact:
            return _exact_step(self.value)[0]
        return self.prefix[0]

    def shift(self):
        """The expansion of ``T x``."""
        if self.is_zero():
            raise CuspError("expansion has terminated")
        if self.exact:
            return Expansion(value=_exact_step(self.value)[1])
        return Expansion(prefix=self.prefix[1:], truncated=self.truncated)

    def tails(self, n):
        """Pairs ``(k_i, x_i)`` for ``i < n`` with ``x_i = float(T^i x)``.

        Stops early when the expansion terminates or runs out of digits.
        """
        if self.exact:
            x = self.value
            for _ in range(n):
                if isinstance(x, Fraction) and x == 0:
                    return
                xf = float(x)
                k, x = _exact_step(x)
                yield k, xf
            return
        if self._tails is None:
            # one backward pass; x_i depends only on the suffix from i on
            tails, x = [], 0.0
            for k in reversed(self.prefix):
                x = 1.0 / (k + x)
                tails.append(x)
            tails.reverse()
            self._tails = tails
        for i in range(min(n, len(self.prefix))):
            yield self.prefix[i], self._tails[i]


def expansion(x):
    """Coerce ``x`` into an :class:`Expansion`.

    Accepts an Expansion, a Fraction or int, a QuadraticSurd, a surd string,
    a decimal string or float, a :class:`Digits`, or a list of digits.
    """
    if isinstance(x, Expansion):
        return x
    if isinstance(x, Digits):
        return Expansion(prefix=x.values, truncated=not x.terminated)
    if isinstance(x, (list, tuple)):
        return Expansion(prefix=check_digits(x), truncated=True)
    if isinstance(x, str):
        try:
            x = parse_surd(x)
        except DomainError:
            x = float(x)
    if isinstance(x, int) and not isinstance(x, bool):
        x = Fraction(x)
    if isinstance(x, (Fraction, QuadraticSurd)):
        if not 0 <= x <= 1:
            raise DomainError(f"expansion point must lie in [0, 1], got {float(x)}")
        return Expansion(value=x)
    x = float(x)
    if x == 0:
        return Expansion(value=Fraction(0))
    if x == 1:
        return Expansion(value=Fraction(1))
    d = cf_digits(x, 10_000)
    if d.terminated:
        return Expansion(value=cf_value(d.values))
    return Expansion(prefix=d.values, truncated=True)
