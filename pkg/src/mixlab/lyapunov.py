"""Monte Carlo Lyapunov exponents ``2 lim (1/n) log q_n`` and digit samplers.

Random points are never represented as floats. Digits are drawn from their
exact conditional law instead: if ``x`` is Lebesgue-distributed and
``r = q_{n-1}/q_n`` after ``n`` digits, the shifted point ``T^n x`` has
density ``(1 + r) / (1 + r y)^2`` on ``[0, 1]``. Inverting that distribution
function gives the next digit, so arbitrarily long expansions stay exact
and ``q_n`` is then formed with integer continuants.
"""

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_bound, check_count
from .cfrac import Digits, continuant, expansion
from .dimension import HausdorffDimension
from .exceptions import DomainError, NotFittedError

__all__ = [
    "LyapunovEstimate",
    "ContinuedFractionSampler",
    "GibbsDigitSampler",
    "lyapunov_mc",
    "lyapunov_of_digits",
    "sample_EN",
]

CHUNK = 64  # chains per independent random stream


@dataclass
class LyapunovEstimate:
    mean: float
    stderr: float
    n_samples: int
    n_digits: int
    n_discarded: int = 0
    values: np.ndarray = field(default=None, repr=False)

    def to_json(self):
        return {
            "mean": self.mean,
            "stderr": self.stderr,
            "n_samples": self.n_samples,
            "n_digits": self.n_digits,
            "n_discarded": self.n_discarded,
        }


def lyapunov_of_digits(digits):
    """``(2/n) log q_n`` with ``q_n`` an exact continuant."""
    n = len(digits)
    if n == 0:
        raise DomainError("need at least one digit")
    return 2.0 * math.log(continuant(digits)) / n


class ContinuedFractionSampler:
    """Digits of random points under Lebesgue or Gauss measure.

    ``start="gauss"`` draws the initial ratio ``r_0`` with distribution
    function ``log2(1 + r)``, which makes the digit process stationary
    (the Gauss measure case); ``"lebesgue"`` starts at ``r_0 = 0``.
    """

    def __init__(self, start="lebesgue"):
        if start not in ("lebesgue", "gauss"):
            raise DomainError(f"start must be 'lebesgue' or 'gauss', got {start!r}")
        self.start = start

    def sample_digits(self, n_samples, n_digits, rng):
        """Return ``(digits, valid)``; invalid rows hit a terminating expansion."""
        if self.start == "gauss":
            r = np.exp2(rng.random(n_samples)) - 1.0
        else:
            r = np.zeros(n_samples)
        out = np.empty((n_samples, n_digits), dtype=np.int64)
        valid = np.ones(n_samples, dtype=bool)
        for j in range(n_digits):
            U = rng.random(n_samples)
            y = U / ((1.0 + r) - r * U)
            bad = y <= 1e-18
            valid &= ~bad
            y = np.where(bad, 0.5, y)
            k = np.floor(1.0 / y)
            out[:, j] = k
            r = 1.0 / (k + r)
        return out, valid


def _point_digits(point, n_digits):
    if isinstance(point, (list, tuple, Digits, np.ndarray)):
        d = [int(k) for k in point]
        return d[:n_digits]
    return list(expansion(point).digits(n_digits))


def _run_chunks(sampler, n_samples, n_digits, seed, threads):
    sizes = [min(CHUNK, n_samples - i) for i in range(0, n_samples, CHUNK)]
    seqs = np.random.SeedSequence(seed).spawn(len(sizes))

    def work(args):
        size, ss = args
        digits, valid = sampler.sample_digits(size, n_digits, np.random.default_rng(ss))
        vals = np.array([lyapunov_of_digits(row.tolist()) if ok else np.nan
                         for row, ok in zip(digits, valid)])
        return vals

    if threads and threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(work, zip(sizes, seqs)))
    else:
        parts = [work(a) for a in zip(sizes, seqs)]
    return np.concatenate(parts)


def lyapunov_mc(source="lebesgue", n_digits=10_000, n_samples=1000, seed=0, *, threads=None):
    """Monte Carlo estimate of ``lambda = 2 lim (1/n) log q_n``.

    Parameters
    ----------
    source : {"lebesgue", "gauss"}, sampler, or a point
        A point may be a digit list, float, Fraction, surd or surd string;
        a sampler is any object with ``sample_digits(n, n_digits, rng)``
        such as a fitted :class:`GibbsDigitSampler`.
    n_digits : int >= 100
    n_samples : int
        Ignored for a single point.
    seed : int
        Chains are split into fixed-size chunks with spawned seeds, so the
        result does not depend on ``threads``.

    Terminated expansions are discarded with a warning.
    """
    n_digits = check_count(n_digits, "n_digits", minimum=100)
    if isinstance(source, str) and source in ("lebesgue", "gauss"):
        source = ContinuedFractionSampler(source)
    if hasattr(source, "sample_digits"):
        n_samples = check_count(n_samples, "n_samples")
        vals = _run_chunks(source, n_samples, n_digits, seed, threads)
    else:
        d = _point_digits(source, n_digits)
        if len(d) < n_digits:
            warnings.warn(
                f"expansion has only {len(d)} digits (< {n_digits}); sample discarded",
                RuntimeWarning,
                stacklevel=2,
            )
            vals = np.array([np.nan])
        else:
            vals = np.array([lyapunov_of_digits(d)])
    ok = np.isfinite(vals)
    dropped = int((~ok).sum())
    if dropped and len(vals) > 1:
        warnings.warn(f"{dropped} terminated samples discarded", RuntimeWarning, stacklevel=2)
    good = vals[ok]
    if good.size == 0:
        return LyapunovEstimate(float("nan"), float("nan"), 0, n_digits, dropped, vals)
    stderr = float(good.std(ddof=1) / math.sqrt(good.size)) if good.size > 1 else 0.0
    return LyapunovEstimate(float(good.mean()), stderr, int(good.size), n_digits, dropped, vals)


class GibbsDigitSampler(BaseEstimator):
    """Digit strings distributed by the equilibrium measure on ``E_N``.

    Fitting solves for ``dim E_N`` and keeps the eigenfunction ``f`` of the
    operator at ``beta* = 2 dim E_N``. A backward chain then picks
    ``k`` with probability ``(x + k)^(-beta*) f(1/(x + k)) / f(x)`` and moves
    to ``x = 1/(x + k)``. Reading the generated digits in reverse gives the
    leading digits of a typical point of the invariant Gibbs measure.

    Parameters
    ----------
    N : int >= 2
    burn_in : int
        Digits generated before the first emitted one (nearest the chain's
        arbitrary start).
    resolution : int
        Collocation size for the eigenfunction.
    tol : float
        Dimension solve tolerance.
    """

    def __init__(self, N=2, burn_in=200, resolution=32, tol=1e-10):
        self.N = N
        self.burn_in = burn_in
        self.resolution = resolution
        self.tol = tol

    def fit(self, X=None, y=None, *, dimension=None):
        """Fit, optionally reusing an already fitted :class:`HausdorffDimension`."""
        N = check_bound(self.N, minimum=2)
        if dimension is None:
            dimension = HausdorffDimension(N=N, tol=self.tol, resolution=self.resolution).fit()
        else:
            check_is_fitted(dimension, "operator_")
            if dimension.operator_.operator_.spec.scheme != "collocation":
                raise DomainError("the Gibbs sampler needs collocation eigendata")
        self.dimension_ = dimension.dimension_
        self.beta_star_ = dimension.beta_star_
        self.operator_ = dimension.operator_
        return self

    def _check(self):
        if not hasattr(self, "operator_"):
            raise NotFittedError(
                "no eigendata: run the dimension solve first "
                "(GibbsDigitSampler(N).fit() or HausdorffDimension(N).fit())"
            )

    def sample_digits(self, n_samples, n_digits, rng):
        self._check()
        N, beta = self.N, self.beta_star_
        ks = np.arange(1, N + 1)
        x = np.full(n_samples, 0.5)
        total = self.burn_in + n_digits
        out = np.empty((n_samples, total), dtype=np.int64)
        for j in range(total):
            z = 1.0 / (x[:, None] + ks[None, :])
            w = z**beta * self.operator_.transform(z.ravel()).reshape(z.shape)
            w = np.maximum(w, 0.0)
            cdf = np.cumsum(w, axis=1)
            U = rng.random(n_samples) * cdf[:, -1]
            idx = np.minimum((cdf < U[:, None]).sum(axis=1), N - 1)
            out[:, j] = ks[idx]
            x = z[np.arange(n_samples), idx]
        digits = out[:, ::-1][:, :n_digits]
        return digits, np.ones(n_samples, dtype=bool)

    def sample(self, length, random_state=None):
        """One digit string of the given length."""
        length = check_count(length, "length")
        rng = np.random.default_rng(random_state)
        d, _ = self.sample_digits(1, length, rng)
        return Digits(d[0].tolist(), truncated=True)


def sample_EN(N, length, seed=None, *, sampler=None):
    """Gibbs-typical digit string of ``E_N``.

    ``sampler`` may be a :class:`GibbsDigitSampler`; an unfitted one raises
    :class:`~mixlab.exceptions.NotFittedError`. When omitted, the dimension
    solve is run here.
    """
    N = check_bound(N, minimum=2)
    if sampler is None:
        sampler = GibbsDigitSampler(N=N).fit()
    elif sampler.N != N:
        raise DomainError(f"sampler was built for N={sampler.N}, not N={N}")
    return sampler.sample(length, random_state=seed)
