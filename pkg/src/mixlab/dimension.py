"""Hausdorff dimension of bounded-digit Cantor sets and spectral Lyapunov exponents.

``dim E_N`` is the zero ``s*`` of ``s -> P(2 s)`` where ``P`` is the pressure
of the operator with digits ``1..N``. The Lyapunov exponent of the Gibbs
measure at that point is ``-2 P'(2 s*)``.
"""

import math
import warnings

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import check_bound, check_positive
from .exceptions import ConvergenceError, DomainError
from .transfer import TransferOperator

__all__ = [
    "hensley_dim_asymptotic",
    "hausdorff_dim_spectral",
    "lyapunov_spectral",
    "HausdorffDimension",
    "AsymptoticRegimeWarning",
]

# below this N the two-term asymptotic expansion is unreliable
ASYMPTOTIC_MIN_N = 8
LAMBDA_0 = math.pi**2 / (6 * math.log(2))


class AsymptoticRegimeWarning(UserWarning):
    """The asymptotic dimension formula was evaluated at small ``N``."""


def hensley_dim_asymptotic(N):
    """``1 - 6/(pi^2 N) - 72 log N / (pi^4 N^2)``; tends to 1 as ``N`` grows.

    ``N = None`` (all digits) returns 1.
    """
    N = check_bound(N, allow_unbounded=True, minimum=2)
    if N is None:
        return 1.0
    if N < ASYMPTOTIC_MIN_N:
        warnings.warn(
            f"N={N} is outside the asymptotic regime of the dimension formula",
            AsymptoticRegimeWarning,
            stacklevel=2,
        )
    return 1.0 - 6.0 / (math.pi**2 * N) - 72.0 * math.log(N) / (math.pi**4 * N**2)


def _pressure_fn(N, scheme, resolution, tol):
    cache = {}

    def P(beta):
        if beta not in cache:
            est = TransferOperator(beta=beta, N=N, scheme=scheme, resolution=resolution,
                                   tol=tol).fit()
            cache[beta] = est.pressure_
        return cache[beta]

    return P


def _solve(P, tol, lo=0.1, hi=1.0, bracket_width=1e-4, max_iter=200):
    """Zero of ``s -> P(2 s)`` by bisection, then a safeguarded secant."""
    f_lo, f_hi = P(2 * lo), P(2 * hi)
    if not (f_lo > 0 > f_hi):
        raise ConvergenceError(
            f"no sign change on [{lo}, {hi}]: P(2*{lo})={f_lo:.6g}, P(2*{hi})={f_hi:.6g}"
        )
    history = []
    while hi - lo > bracket_width:
        mid = 0.5 * (lo + hi)
        f_mid = P(2 * mid)
        history.append((mid, f_mid))
        if f_mid > 0:
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    a, fa, b, fb = lo, f_lo, hi, f_hi
    for _ in range(max_iter):
        s = b - fb * (b - a) / (fb - fa)
        if not (lo < s < hi):
            s = 0.5 * (lo + hi)
        fs = P(2 * s)
        history.append((s, fs))
        if fs > 0:
            lo = s
        else:
            hi = s
        if abs(fs) <= tol or abs(s - b) <= tol:
            return s, history
        a, fa, b, fb = b, fb, s, fs
    raise ConvergenceError("secant refinement did not converge", iterations=max_iter)


def hausdorff_dim_spectral(N, tol=1e-10, *, scheme="collocation", resolution=None,
                           eigen_tol=1e-13):
    """Hausdorff dimension of ``E_N`` from the pressure zero.

    Parameters
    ----------
    N : int >= 2
    tol : float
        Target accuracy of the root in ``s`` and of ``|P(2 s)|``.
    scheme, resolution :
        Discretization passed to :class:`~mixlab.transfer.TransferOperator`.
    """
    return HausdorffDimension(N=N, tol=tol, scheme=scheme, resolution=resolution,
                              eigen_tol=eigen_tol).fit().dimension_


class HausdorffDimension(BaseEstimator):
    """Solve for ``dim E_N`` and keep the eigendata at ``beta* = 2 dim``.

    Attributes
    ----------
    dimension_ : float
    beta_star_ : float
    pressure_at_root_ : float
    operator_ : TransferOperator
        Fitted at ``beta_star_``.
    history_ : list of (s, P(2 s))
    """

    def __init__(self, N=2, tol=1e-10, scheme="collocation", resolution=None,
                 eigen_tol=1e-13):
        self.N = N
        self.tol = tol
        self.scheme = scheme
        self.resolution = resolution
        self.eigen_tol = eigen_tol

    def fit(self, X=None, y=None):
        N = check_bound(self.N, allow_unbounded=False, minimum=2)
        tol = check_positive(self.tol, "tol")
        P = _pressure_fn(N, self.scheme, self.resolution, self.eigen_tol)
        s, history = _solve(P, tol)
        self.dimension_ = s
        self.beta_star_ = 2 * s
        self.history_ = history
        self.operator_ = TransferOperator(beta=2 * s, N=N, scheme=self.scheme,
                                          resolution=self.resolution,
                                          tol=self.eigen_tol).fit()
        self.pressure_at_root_ = self.operator_.pressure_
        return self

    def to_json(self):
        return {
            "N": self.N,
            "dimension": self.dimension_,
            "beta_star": self.beta_star_,
            "pressure_at_root": self.pressure_at_root_,
            "scheme": self.operator_.operator_.spec.scheme,
            "resolution": self.operator_.operator_.spec.resolution,
            "tol": self.tol,
        }


def lyapunov_spectral(N, h=1e-3, *, beta=None, scheme="collocation", resolution=None,
                      eigen_tol=1e-13):
    """Lyapunov exponent ``-2 dP/dbeta`` at ``beta* = 2 dim E_N``.

    Central differences with step ``h`` and one Richardson step
    ``(4 D(h/2) - D(h)) / 3``. For ``N = None`` the derivative is taken at
    ``beta = 2`` (Lebesgue-typical points). ``beta`` overrides the point.
    """
    N = check_bound(N, allow_unbounded=True, minimum=2)
    h = check_positive(h, "h")
    if h < 1e-6:
        raise DomainError(f"step h={h} is below the eigen-solver noise floor (use h >= 1e-6)")
    if beta is None:
        beta = 2.0 if N is None else 2 * hausdorff_dim_spectral(
            N, scheme=scheme, resolution=resolution, eigen_tol=eigen_tol)
    P = _pressure_fn(N, scheme, resolution, eigen_tol)

    def D(step):
        return (P(beta + step) - P(beta - step)) / (2 * step)

    deriv = (4 * D(h / 2) - D(h)) / 3
    return float(-2 * deriv)


def dimension_refinement(N, depths, *, tol=1e-10):
    """Ulam dimension estimates at increasing cylinder depth with Richardson extrapolation.

    Returns ``(table, extrapolated)`` where ``table`` rows are
    ``(depth, dim, diff_to_previous)``. The extrapolation assumes geometric
    convergence of the last three estimates.
    """
    dims = [hausdorff_dim_spectral(N, tol, scheme="ulam", resolution=d) for d in depths]
    table = []
    for i, (d, v) in enumerate(zip(depths, dims)):
        table.append((d, v, None if i == 0 else v - dims[i - 1]))
    extrapolated = dims[-1]
    if len(dims) >= 3:
        d1, d2 = dims[-2] - dims[-3], dims[-1] - dims[-2]
        if d1 != 0 and abs(d2) < abs(d1):
            r = d2 / d1
            extrapolated = dims[-1] + d2 * r / (1 - r)
    return table, float(np.float64(extrapolated))
