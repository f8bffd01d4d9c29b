"""Discrete mixmaster evolution driven by the two-sided extended shift.

A universe is coded by ``(omega_plus, omega_minus, s)``. The digits of
``omega_plus`` are the numbers of cycles in successive Kasner eras, with
``u_n = 1 / T^n(omega_plus)``. Within an era the parameter steps down
``u, u - 1, ...``; each step swaps the axes carrying ``p1`` and ``p2``.
When ``u`` drops below 1 the bounce ``u -> 1/u`` swaps the axes carrying
``p2`` and ``p3``. Axis assignments are strings naming the axes that
carry ``(p1, p2, p3)``, starting from ``"xyz"``.
"""

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import check_count
from .cfrac import (
    Coset,
    Expansion,
    branch_matrix,
    coset_act,
    expansion,
    shift_matrix,
)
from .exceptions import CuspError, DomainError

__all__ = [
    "KasnerTriple",
    "GeodesicData",
    "Cycle",
    "Era",
    "MixmasterTrajectory",
    "kasner_exponents",
    "era_transition",
    "two_sided_shift",
    "inverse_two_sided_shift",
    "v_evolution",
    "amplitude_from_v",
    "evolve_universe",
    "iter_eras",
    "axis_frequencies",
    "KasnerTransformer",
]

GOLDEN = (1 + math.sqrt(5)) / 2


@dataclass(frozen=True)
class KasnerTriple:
    p1: float
    p2: float
    p3: float
    u: float

    def as_tuple(self):
        return (self.p1, self.p2, self.p3)


def kasner_exponents(u):
    """Kasner exponents for the parameter ``u >= 1``, ordered ``p1 <= p2 <= p3``."""
    u = float(u)
    if not u >= 1:
        raise DomainError(f"u must be >= 1 (bounce first), got {u}")
    if math.isinf(u):
        return KasnerTriple(0.0, 0.0, 1.0, u)
    s = 1.0 + u + u * u
    return KasnerTriple(-u / s, (1.0 + u) / s, u * (1.0 + u) / s, u)


def era_transition(u):
    """The bounce ``u -> 1/u`` for ``0 < u < 1``."""
    u = float(u)
    if u == 0:
        raise CuspError("u = 0: the orbit ends at a cusp")
    if not 0 < u < 1:
        raise DomainError(f"era transition needs 0 < u < 1, got {u}")
    return 1.0 / u


def v_evolution(y, k):
    """``y -> 1 / (y + k)``, i.e. ``v -> k + 1/v`` for ``v = 1/y``."""
    if y <= 0:
        raise DomainError(f"y must be > 0, got {y}")
    if k < 1:
        raise DomainError(f"digit must be >= 1, got {k}")
    return 1.0 / (y + k)


def amplitude_from_v(v, u):
    """Cycle amplitude ``delta = v / (v + 1 + u)`` solving ``v = delta (1+u) / (1-delta)``."""
    if v <= 0 or u <= 0:
        raise DomainError("v and u must be positive")
    return v / (v + 1.0 + u)


@dataclass(frozen=True)
class GeodesicData:
    """Endpoints and sheet of a geodesic: ``(omega_plus, omega_minus, s)``.

    ``omega_plus`` in ``[0, 1]`` is held as an :class:`~mixlab.cfrac.Expansion`
    (anything accepted by :func:`~mixlab.cfrac.expansion` can be passed).
    ``omega_minus <= -1`` is a float.
    """

    omega_plus: Expansion
    omega_minus: float = -GOLDEN
    s: Coset = Coset.ZERO

    def __post_init__(self):
        object.__setattr__(self, "omega_plus", expansion(self.omega_plus))
        object.__setattr__(self, "s", Coset.parse(self.s))
        w = float(self.omega_minus)
        if not w <= -1:
            raise DomainError(f"omega_minus must be <= -1, got {w}")
        object.__setattr__(self, "omega_minus", w)

    @property
    def is_rational(self):
        e = self.omega_plus
        return e.exact and isinstance(e.value, Fraction)


def _shift(g):
    k = g.omega_plus.first_digit()
    return GeodesicData(
        g.omega_plus.shift(),
        1.0 / g.omega_minus - k,
        coset_act(shift_matrix(k), g.s),
    )


def two_sided_shift(g):
    """Shift both endpoints with the digit ``k = [1/omega_plus]``.

    ``omega_plus -> 1/omega_plus - k`` and ``omega_minus -> 1/omega_minus - k``
    (equivalently ``v -> k + 1/v`` for ``v = -omega_minus``), and the sheet
    moves by ``(-k, 1; 1, 0)``.
    """
    if g.is_rational:
        raise CuspError("omega_plus is rational: the geodesic ends at a cusp")
    return _shift(g)


def inverse_two_sided_shift(g):
    """Undo :func:`two_sided_shift` using the leading digit of ``-omega_minus``."""
    w = -g.omega_minus
    k = math.floor(w)
    if w == k:
        raise CuspError("omega_minus is an integer: backward orbit ends at a cusp")
    e = g.omega_plus
    if e.exact:
        if e.is_zero():
            prev = Expansion(value=Fraction(1, k))
        elif isinstance(e.value, Fraction):
            prev = Expansion(value=1 / (k + e.value))
        else:
            prev = Expansion(value=(e.value + k).reciprocal())
    else:
        prev = Expansion(prefix=(k,) + e.prefix, truncated=e.truncated)
    prev_minus = 1.0 / (g.omega_minus + k)
    if prev_minus > -1:
        # a digit k from a float endpoint can land on the boundary; clamp
        prev_minus = -1.0
    return GeodesicData(prev, prev_minus, coset_act(branch_matrix(k), g.s))


@dataclass(frozen=True)
class Cycle:
    u: float
    exponents: KasnerTriple
    axes: str


def _swap12(a):
    return a[1] + a[0] + a[2]


def _swap23(a):
    return a[0] + a[2] + a[1]


def era_relabel(axes, k):
    """Axis assignment after an era with ``k`` cycles and the closing bounce."""
    if k % 2:
        axes = _swap12(axes)
    return _swap23(axes)


@dataclass(frozen=True)
class Era:
    """One Kasner era.

    ``axes`` names the axes carrying ``(p1, p2, p3)`` in the first cycle;
    ``axes[2]`` is the axis of dominant compression for the whole era.
    ``delta`` is the amplitude fixed by ``(v, u)`` through
    :func:`amplitude_from_v`.
    """

    n: int
    u: float
    k: int
    axes: str
    coset: Coset
    v: float
    delta: float
    omega: object = None
    degenerate: bool = False

    @property
    def y(self):
        return 1.0 / self.v

    @property
    def dominant_axis(self):
        return self.axes[2]

    @property
    def n_cycles(self):
        return self.k - 1 if self.degenerate else self.k

    def iter_cycles(self):
        axes = self.axes
        for j in range(self.n_cycles):
            uj = max(self.u - j, 1.0)
            yield Cycle(uj, kasner_exponents(uj), axes)
            axes = _swap12(axes)

    @property
    def cycles(self):
        return list(self.iter_cycles())

    def to_json(self, max_cycles=None):
        cycles = []
        for j, c in enumerate(self.iter_cycles()):
            if max_cycles is not None and j >= max_cycles:
                break
            cycles.append({"u": c.u, "p": list(c.exponents.as_tuple()), "axes": c.axes})
        out = {
            "n": self.n,
            "u": self.u,
            "k": self.k,
            "cycles": cycles,
            "v": self.v,
            "delta": self.delta,
            "axes": self.axes,
            "coset": str(self.coset),
        }
        if max_cycles is not None and self.n_cycles > max_cycles:
            out["cycles_truncated"] = True
        if self.omega is not None:
            out["omega"] = self.omega
        if self.degenerate:
            out["degenerate"] = True
        return out


@dataclass
class MixmasterTrajectory:
    eras: list
    truncated: bool = False
    cusp: bool = False
    initial_axes: str = "xyz"
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.eras)

    def __iter__(self):
        return iter(self.eras)

    def __getitem__(self, i):
        return self.eras[i]

    @property
    def digits(self):
        return [e.k for e in self.eras]

    def to_json(self, max_cycles=10_000):
        return {
            "initial_axes": self.initial_axes,
            "truncated": self.truncated,
            "cusp": self.cusp,
            **self.meta,
            "eras": [e.to_json(max_cycles) for e in self.eras],
        }

    def to_csv(self, max_cycles=10_000):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["era", "cycle", "k", "u", "p1", "p2", "p3", "axes"])
        for e in self.eras:
            for j, c in enumerate(e.iter_cycles()):
                if j >= max_cycles:
                    break
                w.writerow([e.n, j, e.k, repr(c.u), *map(repr, c.exponents.as_tuple()), c.axes])
        return buf.getvalue()


def iter_eras(g, n_eras, *, y0=None, omega_hook=None, omega0=None, start=0, status=None):
    """Yield the eras of the universe coded by ``g``; see :func:`evolve_universe`.

    ``status`` (a dict, optional) receives ``truncated`` and ``cusp`` flags
    once the generator is exhausted.
    """
    n_eras = check_count(n_eras, "n_eras")
    if y0 is None:
        omega_minus = g.omega_minus
    else:
        if not float(y0) > 0:
            raise DomainError(f"y0 must be > 0, got {y0}")
        omega_minus = -1.0 / float(y0)
    axes, s, omega = "xyz", g.s, omega0
    produced = 0
    exp = g.omega_plus
    tails = list(exp.tails(n_eras))
    # a terminating expansion ends on an integer u: flag that era, stop there
    terminated = exp.digits(n_eras).terminated
    for i, (k, x) in enumerate(tails):
        last = terminated and i == len(tails) - 1
        u = float(k) if last else 1.0 / x
        v = -omega_minus
        yield Era(
            n=start + i,
            u=u,
            k=k,
            axes=axes,
            coset=s,
            v=v,
            delta=amplitude_from_v(v, u),
            omega=omega,
            degenerate=last,
        )
        produced += 1
        if omega_hook is not None:
            omega = omega_hook(omega, x, 1.0 / v)
        axes = era_relabel(axes, k)
        s = coset_act(shift_matrix(k), s)
        omega_minus = 1.0 / omega_minus - k
    if status is not None:
        status["cusp"] = terminated
        status["truncated"] = produced < n_eras and not terminated


def evolve_universe(g, n_eras, *, y0=None, omega_hook=None, omega0=None, backward=0):
    """Mixmaster trajectory of ``n_eras`` eras coded by ``g``.

    Parameters
    ----------
    g : GeodesicData
    n_eras : int
    y0 : float, optional
        Override for the initial ``y = 1/v``; by default ``v_0 = -omega_minus``.
    omega_hook : callable, optional
        ``omega_hook(Omega_n, x_n, y_n) -> Omega_{n+1}``. No default
        recursion is supplied; without a hook ``Omega`` is not tracked.
    omega0 : float, optional
        Starting value passed to ``omega_hook``.
    backward : int
        Number of eras to reconstruct before ``g`` from ``omega_minus``.
        They get negative indices; the identity axis assignment is placed
        on the earliest era.
    """
    start = 0
    if backward:
        for _ in range(check_count(backward, "backward")):
            g = inverse_two_sided_shift(g)
        start = -backward
    status = {}
    eras = list(
        iter_eras(
            g, n_eras + (backward or 0), y0=y0, omega_hook=omega_hook,
            omega0=omega0, start=start, status=status,
        )
    )
    return MixmasterTrajectory(
        eras,
        truncated=status["truncated"],
        cusp=status["cusp"],
        meta={"s0": str(g.s), "omega_minus": g.omega_minus},
    )


def axis_frequencies(trajectory):
    """Fraction of eras in which each axis is the dominant-compression axis."""
    counts = {"x": 0, "y": 0, "z": 0}
    total = 0
    for era in trajectory:
        counts[era.axes[2]] += 1
        total += 1
    if total == 0:
        raise DomainError("trajectory has no eras")
    return {a: c / total for a, c in counts.items()}


class KasnerTransformer(TransformerMixin, BaseEstimator):
    """Map parameters ``u >= 1`` to rows ``(p1, p2, p3)``.

    Stateless; ``fit`` only validates the input shape.
    """

    def fit(self, X, y=None):
        np.asarray(X, dtype=float)
        return self

    def transform(self, X):
        u = np.asarray(X, dtype=float).reshape(-1)
        if np.any(~(u >= 1)):
            raise DomainError("all u must be >= 1")
        s = 1.0 + u + u * u
        return np.column_stack([-u / s, (1.0 + u) / s, u * (1.0 + u) / s])
