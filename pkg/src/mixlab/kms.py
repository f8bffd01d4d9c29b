"""KMS-state data for the Cuntz-Krieger algebra of ``A_N``.

The state restricted to the diagonal is a probability measure ``mu`` on
``E_N x P`` with ``L*_beta mu = exp(u) mu``, where ``u = P(beta)``. It is
computed here as the left Perron vector of the coset-aware Ulam operator,
so masses of cylinders no deeper than the resolution are exact sums of bins.
"""

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_bound, check_count, check_positive
from .cfrac import Coset, shift_matrix, branch_matrix, coset_act
from .exceptions import DomainError, InadmissibleParameterError, NotFittedError
from .markov import build_AN, spectral_radius
from .transfer import OperatorSpec, build_operator, leading_eigen

__all__ = [
    "KMSSpec",
    "CylinderWord",
    "Var0",
    "kms_beta_bound",
    "var0_h",
    "KMSState",
    "gibbs_cylinder_mass",
    "finite_level_state",
]


def kms_beta_bound(N):
    """``2 log r(A_N) / log(N + 1)`` with ``r(A_N)`` the Perron root."""
    N = check_bound(N, minimum=2)
    r = spectral_radius(build_AN(N), check=False)
    return 2.0 * math.log(r) / math.log(N + 1)


@dataclass(frozen=True)
class Var0:
    formula_value: float
    exact_value: float
    x_min: float
    x_max: float


def var0_h(beta, N):
    """Oscillation of ``h = -beta/2 log|T'| = beta log x`` over ``E_N``.

    ``formula_value`` is ``(beta/2) log(N + 1)``. ``exact_value`` is
    ``beta (log x_max - log x_min)`` with the extreme points of ``E_N``:
    ``x_max = [1, N, 1, N, ...]`` and ``x_min = [N, 1, N, 1, ...]``.
    """
    beta = check_positive(beta, "beta")
    N = check_bound(N, minimum=2)
    x_max = (math.sqrt(N * N + 4 * N) - N) / 2
    x_min = 1.0 / (N + x_max)
    return Var0(0.5 * beta * math.log(N + 1), beta * (math.log(x_max) - math.log(x_min)),
                x_min, x_max)


@dataclass(frozen=True)
class CylinderWord:
    """Digits ``k_1 .. k_m`` together with a sheet ``t``."""

    digits: tuple
    sheet: Coset

    def __post_init__(self):
        d = tuple(int(k) for k in self.digits)
        if not d or min(d) < 1:
            raise DomainError("a cylinder word needs at least one digit, all >= 1")
        object.__setattr__(self, "digits", d)
        object.__setattr__(self, "sheet", Coset.parse(self.sheet))

    def admissible(self, N):
        # every 3x3 block of A_N is a permutation, so any word over 1..N is allowed
        return max(self.digits) <= N

    def __len__(self):
        return len(self.digits)


@dataclass(frozen=True)
class KMSSpec:
    beta: float
    N: int
    u: float
    admissible: bool
    bound: float

    @property
    def potential(self):
        return f"h(x) = -{self.beta}/2 log|T'(x)| = {self.beta} log x"

    def to_json(self):
        return {"beta": self.beta, "N": self.N, "u": self.u, "admissible": self.admissible,
                "bound": self.bound, "potential": self.potential}


def _default_depth(N):
    return max(2, int(math.floor(math.log(3000) / math.log(N) + 1e-9)))


class KMSState(BaseEstimator):
    """Eigenmeasure and eigenfunction of the coset-aware operator at ``(beta, N)``.

    Parameters
    ----------
    N : int >= 2
    beta : float
        Must lie below :func:`kms_beta_bound` unless ``check_admissible``
        is False (useful for ``beta* = 2 dim E_N`` diagnostics, which is
        admissible anyway for every ``N``).
    depth : int, optional
        Cylinder depth of the Ulam discretization.
    tol : float
        Power-iteration tolerance.
    random_state : optional
        Random positive starting vectors (uniqueness probes).

    Attributes
    ----------
    spec_ : KMSSpec
    measure_ : ndarray, shape (3, N**depth)
        Eigenmeasure by sheet and cylinder, total mass 1.
    density_ : ndarray, shape (3, N**depth)
        Eigenfunction values, normalized so that ``density * measure`` has mass 1.
    """

    def __init__(self, N=2, beta=1.2, depth=None, tol=1e-13, random_state=None,
                 check_admissible=True):
        self.N = N
        self.beta = beta
        self.depth = depth
        self.tol = tol
        self.random_state = random_state
        self.check_admissible = check_admissible

    def fit(self, X=None, y=None):
        N = check_bound(self.N, minimum=2)
        beta = check_positive(self.beta, "beta")
        bound = kms_beta_bound(N)
        admissible = beta < bound
        if self.check_admissible and not admissible:
            raise InadmissibleParameterError(
                f"beta={beta} is not below the uniqueness bound 2 log r(A_N)/log(N+1) = "
                f"{bound:.6f} for N={N}"
            )
        depth = self.depth if self.depth is not None else _default_depth(N)
        depth = check_count(depth, "depth")
        op = build_operator(OperatorSpec(beta, N, "ulam", depth, coset=True))
        res = leading_eigen(op, self.tol, random_state=self.random_state)
        self.operator_ = op
        self.result_ = res
        self.basis_ = op.basis
        self.measure_ = res.left.reshape(3, -1)
        f = res.right.reshape(3, -1)
        self.density_ = f / float((f * self.measure_).sum())
        self.spec_ = KMSSpec(beta, N, math.log(res.eta), admissible, bound)
        self.depth_ = depth
        return self

    def _require(self, m):
        if not hasattr(self, "measure_"):
            raise NotFittedError("KMSState is not fitted; call fit() first")
        if m > self.depth_:
            raise DomainError(
                f"word of length {m} is deeper than the resolution depth {self.depth_}"
            )

    def _word(self, word, sheet):
        if isinstance(word, CylinderWord):
            return word
        return CylinderWord(tuple(word), sheet)

    def cylinder_mass(self, word, sheet=None):
        """``mu([word] x {sheet})``; with ``sheet=None`` summed over the sheets."""
        digits = tuple(word.digits if isinstance(word, CylinderWord) else word)
        self._require(len(digits))
        sl = self.basis_.prefix_slice(digits)
        if sheet is None and not isinstance(word, CylinderWord):
            return float(self.measure_[:, sl].sum())
        w = self._word(word, sheet)
        return float(self.measure_[w.sheet.index, sl].sum())

    def gibbs_mass(self, word, sheet=None):
        """Mass under the invariant measure ``nu = f mu``."""
        digits = tuple(word.digits if isinstance(word, CylinderWord) else word)
        self._require(len(digits))
        sl = self.basis_.prefix_slice(digits)
        nu = self.density_ * self.measure_
        if sheet is None and not isinstance(word, CylinderWord):
            return float(nu[:, sl].sum())
        w = self._word(word, sheet)
        return float(nu[w.sheet.index, sl].sum())

    def invariance_defect(self, depth=4):
        """``max |nu(T^-1 B) - nu(B)|`` over cylinders ``B = [w] x {t}`` with ``|w| = depth``.

        ``T^-1([w] x {t})`` is the union over ``k`` of ``[k w] x {(0,1;1,k) . t}``.
        """
        self._require(depth + 1)
        nu = self.density_ * self.measure_
        N = self.N
        worst = 0.0
        for idx in np.ndindex(*([N] * depth)):
            w = tuple(i + 1 for i in idx)
            for t in Coset.ORDER:
                direct = nu[t.index, self.basis_.prefix_slice(w)].sum()
                pre = sum(
                    nu[coset_act(branch_matrix(k), t).index,
                       self.basis_.prefix_slice((k,) + w)].sum()
                    for k in range(1, N + 1)
                )
                worst = max(worst, abs(pre - direct))
        return float(worst)

    def finite_level_state(self, k):
        """Weights ``phi_k(w, t)`` on words of length ``k`` and sheets.

        ``phi_k(w, t) = exp(-u) sum mu_b (x_b + w_1)^(-beta)`` over bins ``b`` of
        ``[w_2 .. w_k]`` on the sheet ``(-w_1, 1; 1, 0) . t``, with ``x_b`` the
        bin midpoint. This is the recursion for the inductive state with
        ``exp(h)`` evaluated at cylinder midpoints. Each level is normalized;
        the raw totals are returned in ``norms``.

        Returns
        -------
        dict with ``words`` (list of digit tuples), ``weights`` (array of
        shape (len(words), 3), columns in sheet order 0, 1, inf) and ``norm``.
        """
        k = check_count(k, "k")
        self._require(k)
        N, beta = self.N, self.spec_.beta
        eu = math.exp(-self.spec_.u)
        mids = self.basis_.midpoints
        words = [tuple(i + 1 for i in idx) for idx in np.ndindex(*([N] * k))]
        W = np.empty((len(words), 3))
        for r, w in enumerate(words):
            sl = self.basis_.prefix_slice(w[1:])
            factor = (mids[sl] + w[0]) ** (-beta)
            for t in Coset.ORDER:
                s = coset_act(shift_matrix(w[0]), t)
                W[r, t.index] = eu * float(self.measure_[s.index, sl] @ factor)
        norm = float(W.sum())
        return {"words": words, "weights": W / norm, "norm": norm}


def _fit_state(spec_or_state, **kw):
    if isinstance(spec_or_state, KMSState):
        check_is_fitted(spec_or_state, "measure_")
        return spec_or_state
    if isinstance(spec_or_state, KMSSpec):
        return KMSState(N=spec_or_state.N, beta=spec_or_state.beta, **kw).fit()
    raise DomainError("expected a KMSSpec or a KMSState")


def gibbs_cylinder_mass(word, spec, sheet=None, **kw):
    """Eigenmeasure mass of ``[word] x {sheet}`` for a :class:`KMSSpec` or fitted state."""
    state = _fit_state(spec, **kw)
    if not state.spec_.admissible and state.check_admissible:
        raise InadmissibleParameterError(f"beta={state.spec_.beta} is inadmissible")
    return state.cylinder_mass(word, sheet)


def finite_level_state(k, spec, **kw):
    """Level-``k`` weights of the inductive KMS construction; see :meth:`KMSState.finite_level_state`."""
    return _fit_state(spec, **kw).finite_level_state(k)
