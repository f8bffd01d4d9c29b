"""Transfer operators of the extended Gauss shift and their leading eigendata.

The operator with digit bound ``N`` (``N = None`` for all digits) is::

    (L f)(x, s) = sum_{k=1}^{N} (x + k)^(-beta) f(1/(x + k), (0, 1; 1, k) . s)

Two discretizations are provided:

``collocation``
    Interpolation at ``M`` Chebyshev points of ``[0, 1]``. The branch sum
    is carried out directly up to a cutoff and the remaining tail is
    summed in closed form with Hurwitz zeta values applied to the Taylor
    coefficients of the interpolant at 0. Spectrally accurate.
``ulam``
    Piecewise constants on the depth-``d`` cylinders of the bounded-digit
    Cantor set, with branch weights taken at cylinder midpoints. The
    matrix is sparse and nonnegative, so Perron iteration applies and the
    left eigenvector is a measure on cylinders. Only for finite ``N``.

With ``coset=True`` functions live on the three sheets ``0, 1, inf``
(sheet-major ordering), and each branch also permutes the sheets.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from numpy.polynomial import chebyshev as C
from scipy.special import zeta
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils import check_random_state
from sklearn.utils.validation import check_is_fitted

from ._validation import check_bound, check_count, check_positive
from .cfrac import Coset, branch_matrix, coset_act
from .exceptions import ConvergenceError, DomainError

__all__ = [
    "OperatorSpec",
    "OperatorMatrix",
    "SpectralResult",
    "ChebyshevBasis",
    "CylinderBasis",
    "HensleySet",
    "build_operator",
    "leading_eigen",
    "subdominant_eigenvalue",
    "pressure",
    "gauss_density",
    "invariant_density_full",
    "sheet_permutations",
    "TransferOperator",
]

SCHEMES = ("collocation", "ulam")
# largest number of cylinders a single Ulam matrix may have (per sheet)
MAX_CYLINDERS = 2_000_000
# Taylor order of the closed-form tail
TAIL_ORDER = 20


@dataclass(frozen=True)
class OperatorSpec:
    """What to discretize: ``beta``, digit bound, scheme and resolution.

    ``resolution`` is the basis size ``M`` for collocation and the cylinder
    depth ``d`` for Ulam.
    """

    beta: float
    N: object = None
    scheme: str = "collocation"
    resolution: int = 32
    coset: bool = False

    def __post_init__(self):
        beta = float(self.beta)
        if not math.isfinite(beta):
            raise DomainError(f"beta must be finite, got {self.beta}")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "N", check_bound(self.N, allow_unbounded=True))
        if self.scheme not in SCHEMES:
            raise DomainError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        object.__setattr__(self, "resolution", check_count(self.resolution, "resolution"))
        if self.N is None:
            if self.scheme == "ulam":
                raise DomainError("the Ulam scheme needs a finite digit bound N")
            if beta <= 1:
                raise DomainError(f"the full branch sum diverges for beta <= 1 (beta={beta})")

    def to_json(self):
        return {
            "beta": self.beta,
            "N": "inf" if self.N is None else self.N,
            "scheme": self.scheme,
            "resolution": self.resolution,
            "coset": self.coset,
        }


def sheet_permutations():
    """Index maps ``s -> (0,1;1,k) . s`` on sheet indices, for even and odd ``k``."""
    order = Coset.ORDER
    return {
        parity: np.array([coset_act(branch_matrix(2 - parity), s).index for s in order])
        for parity in (0, 1)
    }


class ChebyshevBasis:
    """Values at ``M`` Chebyshev points of the first kind on ``[0, 1]``."""

    def __init__(self, M):
        self.M = M
        i = np.arange(M)
        self.s_nodes = np.cos((2 * i + 1) * np.pi / (2 * M))
        self.nodes = (1 + self.s_nodes) / 2
        # discrete orthogonality: values -> Chebyshev coefficients
        coef = (2.0 / M) * C.chebvander(self.s_nodes, M - 1).T
        coef[0] /= 2
        self.coef_map = coef

    def coefficients(self, values):
        return self.coef_map @ values

    def eval_matrix(self, t):
        t = np.asarray(t, dtype=float)
        return C.chebvander(2 * t - 1, self.M - 1) @ self.coef_map

    def evaluate(self, values, t):
        return C.chebval(2 * np.asarray(t, dtype=float) - 1, self.coefficients(values))

    def taylor_at_zero(self, order):
        """Rows ``m``: linear maps values -> ``p^(m)(0) / m!``."""
        rows = []
        coef = np.eye(self.M)
        edge = (-1.0) ** np.arange(self.M)
        for m in range(order + 1):
            rows.append(edge[: coef.shape[0]] @ coef * (2.0**m / math.factorial(m)))
            if coef.shape[0] == 1:
                coef = np.zeros((1, self.M))
            else:
                coef = C.chebder(coef, axis=0)
        return np.array(rows) @ self.coef_map

    def quadrature_weights(self):
        """Weights ``w`` with ``w @ values = integral over [0, 1]`` of the interpolant."""
        n = np.arange(self.M)
        integrals = np.zeros(self.M)
        even = n % 2 == 0
        integrals[even] = 2.0 / (1.0 - n[even] ** 2)
        # integral over s in [-1, 1] is twice the integral over t in [0, 1]
        return 0.5 * integrals @ self.coef_map

    def describe(self):
        return {"kind": "chebyshev", "M": self.M}


class CylinderBasis:
    """The ``N**depth`` cylinders of depth ``depth`` over digits ``1..N``.

    Cylinder ``w`` is the interval between ``p_d/q_d`` and
    ``(p_d + p_{d-1}) / (q_d + q_{d-1})``; words are enumerated
    lexicographically with the first digit most significant.
    """

    def __init__(self, N, depth):
        if N**depth > MAX_CYLINDERS:
            raise DomainError(
                f"N**depth = {N}**{depth} exceeds the cylinder budget {MAX_CYLINDERS}"
            )
        self.N, self.depth = N, depth
        n = N**depth
        idx = np.arange(n)
        digits = np.empty((n, depth), dtype=np.int64)
        for j in range(depth):
            digits[:, j] = (idx // N ** (depth - 1 - j)) % N + 1
        self.digits = digits
        exact = (N + 1) ** depth < 2**62
        dtype = np.int64 if exact else float
        p0, p1 = np.ones(n, dtype), np.zeros(n, dtype)
        q0, q1 = np.zeros(n, dtype), np.ones(n, dtype)
        for j in range(depth):
            k = digits[:, j].astype(dtype)
            p0, p1 = p1, k * p1 + p0
            q0, q1 = q1, k * q1 + q0
        a = p1 / q1
        b = (p1 + p0) / (q1 + q0)
        self.left = np.minimum(a, b)
        self.right = np.maximum(a, b)
        self.midpoints = (a + b) / 2
        self.widths = 1.0 / (q1.astype(float) * (q1 + q0).astype(float))

    @property
    def size(self):
        return self.N**self.depth

    def index(self, word):
        word = tuple(word)
        if len(word) != self.depth or min(word) < 1 or max(word) > self.N:
            raise DomainError(f"{word} is not a depth-{self.depth} word over 1..{self.N}")
        out = 0
        for k in word:
            out = out * self.N + (k - 1)
        return out

    def prefix_slice(self, word):
        """Contiguous index range of cylinders extending ``word``."""
        word = tuple(word)
        m = len(word)
        if m > self.depth:
            raise DomainError(f"word of length {m} is deeper than the resolution {self.depth}")
        if m and (min(word) < 1 or max(word) > self.N):
            raise DomainError(f"{word} uses digits outside 1..{self.N}")
        start = 0
        for k in word:
            start = start * self.N + (k - 1)
        span = self.N ** (self.depth - m)
        return slice(start * span, (start + 1) * span)

    def locate(self, x):
        """Cylinder index of each point (``-1`` outside the cover)."""
        x = np.atleast_1d(np.asarray(x, dtype=float)).copy()
        out = np.zeros(x.shape, dtype=np.int64)
        ok = (x > 0) & (x <= 1)
        for _ in range(self.depth):
            with np.errstate(divide="ignore"):
                r = np.where(ok, 1.0 / np.where(ok, x, 1.0), 1.0)
            k = np.floor(r)
            ok &= (k >= 1) & (k <= self.N)
            out = out * self.N + (np.clip(k, 1, self.N) - 1).astype(np.int64)
            x = r - k
            ok &= x >= 0
            x = np.where(x == 0, 1e-300, x)
        return np.where(ok, out, -1)

    def describe(self):
        return {"kind": "cylinders", "N": self.N, "depth": self.depth}


# the bounded-digit Cantor set's cylinder cover is the Ulam basis
HensleySet = CylinderBasis


@dataclass
class OperatorMatrix:
    spec: OperatorSpec
    matrix: object
    basis: object

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def sheets(self):
        return 3 if self.spec.coset else 1


def _hurwitz_tail(s, q, step=1):
    """``sum_{j>=0} (q + step*j)^(-s)``."""
    if step == 1:
        return zeta(s, q)
    return step ** (-s) * zeta(s, q / step)


def _collocation_parts(beta, N, basis):
    """Scalar operator split by parity of the digit: (even part, odd part)."""
    M = basis.M
    x = basis.nodes
    cutoff = min(4096, max(512, 4 * M * M))
    cutoff += cutoff % 2
    K = cutoff if N is None else min(N, cutoff)
    parts = [np.zeros((M, M)), np.zeros((M, M))]
    chunk = max(1, 2**20 // (M * M))
    for k0 in range(1, K + 1, chunk):
        ks = np.arange(k0, min(K, k0 + chunk - 1) + 1)
        xk = x[:, None] + ks[None, :]
        w = xk ** (-beta)
        B = basis.eval_matrix((1.0 / xk).ravel()).reshape(M, len(ks), M)
        for parity in (0, 1):
            sel = ks % 2 == parity
            if sel.any():
                parts[parity] += np.einsum("ik,ikj->ij", w[:, sel], B[:, sel, :])
    if N is None or N > K:
        taylor = basis.taylor_at_zero(TAIL_ORDER)
        m = np.arange(TAIL_ORDER + 1)
        s = beta + m[None, :]
        for parity in (0, 1):
            # first digit > K with this parity; K is even
            first = K + (2 if parity == 0 else 1)
            q = x[:, None] + first
            tail = _hurwitz_tail(s, q, step=2)
            if N is not None:
                last = N if N % 2 == parity else N - 1
                if last >= first:
                    tail = tail - _hurwitz_tail(s, x[:, None] + last + 2, step=2)
                else:
                    tail = np.zeros_like(tail)
            parts[parity] += tail @ taylor
    return parts


def _ulam_parts(beta, N, basis):
    n = basis.size
    rows = np.arange(n)
    base = rows // N
    span = N ** (basis.depth - 1)
    parts = [None, None]
    for parity in (0, 1):
        r, c, v = [], [], []
        for k in range(1, N + 1):
            if k % 2 != parity:
                continue
            r.append(rows)
            c.append((k - 1) * span + base)
            v.append((basis.midpoints + k) ** (-beta))
        if r:
            parts[parity] = sp.csr_matrix(
                (np.concatenate(v), (np.concatenate(r), np.concatenate(c))), shape=(n, n)
            )
        else:
            parts[parity] = sp.csr_matrix((n, n))
    return parts


def _assemble(parts, coset, sparse):
    if not coset:
        return parts[0] + parts[1]
    perms = sheet_permutations()
    blocks = [[None] * 3 for _ in range(3)]
    zero = (lambda a: sp.csr_matrix(a.shape)) if sparse else (lambda a: np.zeros(a.shape))
    for s in range(3):
        for t in range(3):
            acc = zero(parts[0])
            for parity in (0, 1):
                if perms[parity][s] == t:
                    acc = acc + parts[parity]
            blocks[s][t] = acc
    if sparse:
        return sp.bmat(blocks, format="csr")
    return np.block(blocks)


def build_operator(spec):
    """Discretize the transfer operator described by ``spec``."""
    if spec.scheme == "collocation":
        basis = ChebyshevBasis(spec.resolution)
        parts = _collocation_parts(spec.beta, spec.N, basis)
        return OperatorMatrix(spec, _assemble(parts, spec.coset, sparse=False), basis)
    basis = CylinderBasis(spec.N, spec.resolution)
    parts = _ulam_parts(spec.beta, spec.N, basis)
    return OperatorMatrix(spec, _assemble(parts, spec.coset, sparse=True), basis)


@dataclass
class SpectralResult:
    """Leading eigendata of a discretized operator.

    ``right`` holds eigenfunction values normalized to integral 1 and
    ``left`` the eigenmeasure weights normalized to total mass 1 (when the
    basis admits these normalizations, otherwise unit max-norm / unit sum).
    """

    eta: float
    right: np.ndarray
    left: np.ndarray
    residual: float
    iterations: int
    left_residual: float = float("nan")
    meta: dict = field(default_factory=dict)

    @property
    def pressure(self):
        return math.log(self.eta)


def _power(A, v, tol, max_iter, what):
    v = v / np.max(np.abs(v))
    eta = 0.0
    for it in range(1, max_iter + 1):
        w = A @ v
        k = np.argmax(np.abs(w))
        eta = w[k] / v[k] if v[k] != 0 else np.max(np.abs(w))
        eta = float(np.max(np.abs(w)) * np.sign(eta))
        resid = float(np.max(np.abs(w - eta * v)) / abs(eta)) if eta else float("inf")
        v = w / eta
        if resid <= tol:
            return eta, v, resid, it
    raise ConvergenceError(
        f"{what} power iteration did not converge in {max_iter} steps "
        f"(residual {resid:.3e} > tol {tol:.1e})",
        residual=resid,
        iterations=max_iter,
    )


def leading_eigen(m, tol=1e-12, *, max_iter=100_000, start=None, left_start=None,
                  random_state=None):
    """Perron eigenvalue with right and left eigenvectors by power iteration.

    Parameters
    ----------
    m : OperatorMatrix or array-like
    tol : float
        Relative residual ``||A v - eta v||_inf / eta`` (with ``||v||_inf = 1``)
        required for both eigenvectors.
    start, left_start : array, optional
        Initial vectors; default all-ones, or random positive vectors when
        ``random_state`` is given.
    """
    op = m if isinstance(m, OperatorMatrix) else None
    A = m.matrix if op is not None else m
    if not sp.issparse(A):
        A = np.asarray(A, dtype=float)
    n = A.shape[0]
    tol = check_positive(tol, "tol")
    rng = check_random_state(random_state) if random_state is not None else None

    def init(given):
        if given is not None:
            return np.asarray(given, dtype=float).copy()
        return rng.uniform(0.5, 1.5, n) if rng is not None else np.ones(n)

    eta, right, res, it = _power(A, init(start), tol, max_iter, "right")
    eta_l, left, res_l, it_l = _power(A.T, init(left_start), tol, max_iter, "left")
    if eta < 0:
        raise ConvergenceError("leading eigenvalue is negative; matrix is not of Perron type")
    if right.sum() < 0:
        right = -right
    if left.sum() < 0:
        left = -left
    if op is not None:
        right = right / _integral(op, right)
    else:
        right = right / right.sum()
    left = left / left.sum()
    return SpectralResult(
        eta=eta,
        right=right,
        left=left,
        residual=res,
        iterations=max(it, it_l),
        left_residual=res_l,
        meta={"eta_left": eta_l},
    )


def _integral(op, values):
    sheets = op.sheets
    per = values.reshape(sheets, -1)
    if isinstance(op.basis, ChebyshevBasis):
        w = op.basis.quadrature_weights()
        total = float(sum(w @ row for row in per))
    else:
        total = float(sum(op.basis.widths @ row for row in per))
    return total if total != 0 else 1.0


def subdominant_eigenvalue(m, result=None, tol=1e-10, max_iter=100_000):
    """Second eigenvalue by deflated power iteration (real, signed).

    The deflated map is ``A - eta r l^T / (l^T r)``; its dominant eigenvalue
    is estimated with a Rayleigh quotient once the iterate settles.
    """
    A = m.matrix if isinstance(m, OperatorMatrix) else np.asarray(m, dtype=float)
    if result is None:
        result = leading_eigen(m)
    r, l = result.right, result.left
    scale = result.eta / float(l @ r)

    def apply(v):
        return A @ v - scale * r * float(l @ v)

    rng = np.random.default_rng(0)
    v = rng.standard_normal(A.shape[0])
    v /= np.linalg.norm(v)
    lam = 0.0
    for it in range(1, max_iter + 1):
        w = apply(v)
        lam_new = float(v @ w)
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0
        v_new = w / nw
        if abs(lam_new - lam) <= tol * max(abs(lam_new), 1e-300) and it > 2:
            return lam_new
        lam, v = lam_new, v_new
    raise ConvergenceError("deflated power iteration did not converge", iterations=max_iter)


def pressure(beta, N=None, *, scheme="collocation", resolution=None, tol=1e-12):
    """Topological pressure ``log eta_beta``."""
    return TransferOperator(beta=beta, N=N, scheme=scheme, resolution=resolution,
                            tol=tol).fit().pressure_


def gauss_density(x):
    """Gauss density ``1 / (log 2 (1 + x))`` on ``[0, 1]``."""
    return 1.0 / (math.log(2.0) * (1.0 + np.asarray(x, dtype=float)))


@dataclass
class InvariantDensity:
    x: np.ndarray
    density: np.ndarray
    sheet_mass: np.ndarray
    fixed_point_residual: float
    resolution: int

    def to_csv_rows(self):
        for i, xi in enumerate(self.x):
            yield (xi, *self.density[:, i])


def invariant_density_full(M=32):
    """The invariant density ``delta(s) dx / (3 log 2 (1 + x))`` on the three sheets.

    Sampled at the Chebyshev nodes of a coset-aware collocation operator
    at ``beta = 2``; ``fixed_point_residual`` is ``||L f - f||_inf`` there.
    """
    op = build_operator(OperatorSpec(2.0, None, "collocation", M, coset=True))
    x = op.basis.nodes
    f = gauss_density(x) / 3.0
    values = np.tile(f, 3)
    resid = float(np.max(np.abs(op.matrix @ values - values)))
    w = op.basis.quadrature_weights()
    mass = np.array([w @ f for _ in range(3)])
    return InvariantDensity(x, np.vstack([f, f, f]), mass, resid, M)


def _default_resolution(scheme, N):
    if scheme == "collocation":
        return 32
    # deepest cylinders within a few thousand states
    return max(1, int(math.floor(math.log(4096) / math.log(N) + 1e-9)))


class TransferOperator(TransformerMixin, BaseEstimator):
    """Leading eigendata of the transfer operator at a fixed ``beta``.

    Parameters
    ----------
    beta : float
        Exponent of the branch weights ``(x + k)^(-beta)``.
    N : int or None
        Digit bound; ``None`` sums over all digits.
    scheme : {"collocation", "ulam"}
    resolution : int, optional
        Basis size (collocation) or cylinder depth (ulam). Defaults to 32
        for collocation and the deepest level with at most 4096 cylinders
        for ulam.
    coset : bool
        Act on functions on ``[0, 1] x P^1(F_2)``.
    tol : float
        Power-iteration residual tolerance.
    random_state : int, RandomState or None
        Randomizes the starting vectors (all-ones when None).

    Attributes
    ----------
    operator_ : OperatorMatrix
    result_ : SpectralResult
    eigenvalue_ : float
    pressure_ : float
    eigenfunction_ : ndarray
    eigenmeasure_ : ndarray
    residual_ : float
    n_iter_ : int
    """

    def __init__(self, beta=2.0, N=None, scheme="collocation", resolution=None,
                 coset=False, tol=1e-12, max_iter=100_000, random_state=None):
        self.beta = beta
        self.N = N
        self.scheme = scheme
        self.resolution = resolution
        self.coset = coset
        self.tol = tol
        self.max_iter = max_iter
        self.random_state = random_state

    def _spec(self):
        N = check_bound(self.N, allow_unbounded=True)
        resolution = self.resolution
        if resolution is None:
            resolution = _default_resolution(self.scheme, N)
        return OperatorSpec(self.beta, N, self.scheme, resolution, self.coset)

    def fit(self, X=None, y=None):
        spec = self._spec()
        self.operator_ = build_operator(spec)
        self.result_ = leading_eigen(self.operator_, self.tol, max_iter=self.max_iter,
                                     random_state=self.random_state)
        self.eigenvalue_ = self.result_.eta
        self.pressure_ = math.log(self.result_.eta)
        self.eigenfunction_ = self.result_.right
        self.eigenmeasure_ = self.result_.left
        self.residual_ = max(self.result_.residual, self.result_.left_residual)
        self.n_iter_ = self.result_.iterations
        return self

    def transform(self, X):
        """Eigenfunction values at points ``X`` in ``[0, 1]``.

        Returns shape ``(n,)``, or ``(n, 3)`` (one column per sheet) for a
        coset-aware operator. Ulam eigenfunctions are piecewise constant and
        vanish off the cylinder cover.
        """
        check_is_fitted(self, "operator_")
        x = np.asarray(X, dtype=float).reshape(-1)
        if np.any((x < 0) | (x > 1)):
            raise DomainError("points must lie in [0, 1]")
        op = self.operator_
        per = self.eigenfunction_.reshape(op.sheets, -1)
        if isinstance(op.basis, ChebyshevBasis):
            cols = [op.basis.evaluate(row, x) for row in per]
        else:
            idx = op.basis.locate(x)
            cols = [np.where(idx >= 0, row[np.maximum(idx, 0)], 0.0) for row in per]
        out = np.column_stack(cols)
        return out[:, 0] if op.sheets == 1 else out

    def to_json(self):
        check_is_fitted(self, "operator_")
        return {
            **self.operator_.spec.to_json(),
            "eta": self.eigenvalue_,
            "pressure": self.pressure_,
            "residual": self.residual_,
            "iterations": self.n_iter_,
        }
