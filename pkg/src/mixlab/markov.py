"""Markov partition of the bounded-digit extended shift and its invariants.

States are pairs ``(k, t)`` with digit ``k`` in ``1..N`` and sheet ``t`` in
``(0, 1, inf)``, ordered lexicographically. Under the ``"lemma"``
convention the entry ``(k, t), (l, s)`` is 1 exactly when
``(0, 1; 1, l) . s = t``, so the 3x3 block in block-column ``l`` is
``M1`` for even ``l`` and ``M2`` for odd ``l``. The ``"transpose"``
convention stores the transposed matrix; every invariant computed here is
the same for both.
"""

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_bound
from .cfrac import Coset, branch_matrix, coset_act
from .exceptions import ConvergenceError, DomainError
from .snf import bareiss_det, smith_normal_form

__all__ = [
    "M1",
    "M2",
    "MarkovSystem",
    "BowenFranksResult",
    "KTheory",
    "build_AN",
    "block_structure_ok",
    "is_irreducible",
    "is_aperiodic",
    "spectral_radius",
    "power_spectral_radius",
    "bowen_franks",
    "k_theory",
]

M1 = np.array([[0, 0, 1], [0, 1, 0], [1, 0, 0]], dtype=np.int64)
M2 = np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]], dtype=np.int64)
CONVENTIONS = ("lemma", "transpose")


def _block(l):
    B = np.zeros((3, 3), dtype=np.int64)
    for s in Coset.ORDER:
        B[coset_act(branch_matrix(l), s).index, s.index] = 1
    return B


@dataclass
class MarkovSystem:
    N: int
    A: np.ndarray
    convention: str = "lemma"
    states: list = field(default=None)

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=np.int64)
        if self.A.ndim != 2 or self.A.shape[0] != self.A.shape[1]:
            raise DomainError("transition matrix must be square")
        if self.states is None:
            self.states = [(k, str(t)) for k in range(1, self.N + 1) for t in Coset.ORDER]

    @property
    def size(self):
        return self.A.shape[0]

    def transpose(self):
        other = "transpose" if self.convention == "lemma" else "lemma"
        return MarkovSystem(self.N, self.A.T.copy(), other, list(self.states))

    def successors(self, u):
        return np.flatnonzero(self.A[u])

    def edges(self):
        rows, cols = np.nonzero(self.A)
        return list(zip(rows.tolist(), cols.tolist()))

    def to_json(self):
        return {"N": self.N, "convention": self.convention, "matrix": self.A.tolist()}

    def edge_list(self):
        """One ``"u v"`` line per directed edge."""
        return "".join(f"{u} {v}\n" for u, v in self.edges())


def build_AN(N, convention="lemma"):
    """The ``3N x 3N`` matrix ``A_N`` of the Markov partition."""
    N = check_bound(N, minimum=1)
    if convention not in CONVENTIONS:
        raise DomainError(f"convention must be one of {CONVENTIONS}")
    row = np.hstack([_block(l) for l in range(1, N + 1)])
    A = np.vstack([row] * N)
    m = MarkovSystem(N, A, "lemma")
    return m if convention == "lemma" else m.transpose()


def block_structure_ok(m):
    """Every 3x3 block is ``M1`` (even digit) or ``M2`` (odd digit) per the convention."""
    A = m.A if m.convention == "lemma" else m.A.T
    if A.shape != (3 * m.N, 3 * m.N):
        return False
    for k in range(m.N):
        for l in range(m.N):
            want = M1 if (l + 1) % 2 == 0 else M2
            if not np.array_equal(A[3 * k : 3 * k + 3, 3 * l : 3 * l + 3], want):
                return False
    return True


def _bfs(adj, root):
    level = {root: 0}
    parent = {root: None}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in level:
                level[v] = level[u] + 1
                parent[v] = u
                queue.append(v)
    return level, parent


def _adjacency(A):
    return [np.flatnonzero(A[u]).tolist() for u in range(A.shape[0])]


@dataclass
class Connectivity:
    irreducible: bool
    witness: dict

    def __bool__(self):
        return self.irreducible


def is_irreducible(m):
    """Strong connectivity of the transition graph.

    The witness holds BFS parent trees from state 0 in the graph and its
    reverse when connected (every state reaches and is reached from 0);
    otherwise the states missed by one of the searches.
    """
    A = m.A if isinstance(m, MarkovSystem) else np.asarray(m)
    n = A.shape[0]
    fwd_level, fwd = _bfs(_adjacency(A), 0)
    bwd_level, bwd = _bfs(_adjacency(A.T), 0)
    if len(fwd_level) == n and len(bwd_level) == n:
        return Connectivity(True, {"root": 0, "forward_parent": fwd, "backward_parent": bwd})
    return Connectivity(
        False,
        {
            "root": 0,
            "unreachable_from_root": sorted(set(range(n)) - set(fwd_level)),
            "cannot_reach_root": sorted(set(range(n)) - set(bwd_level)),
        },
    )


@dataclass
class Periodicity:
    aperiodic: bool
    period: int

    def __bool__(self):
        return self.aperiodic


def is_aperiodic(m):
    """Period as the gcd of ``level(u) + 1 - level(v)`` over all edges."""
    A = m.A if isinstance(m, MarkovSystem) else np.asarray(m)
    if not is_irreducible(A):
        raise DomainError("period is only defined for irreducible matrices")
    level, _ = _bfs(_adjacency(A), 0)
    g = 0
    for u, v in zip(*np.nonzero(A)):
        g = math.gcd(g, abs(level[int(u)] + 1 - level[int(v)]))
    return Periodicity(g == 1, g)


def power_spectral_radius(A, tol=1e-13, max_iter=100_000, seed=0):
    """Perron root of a nonnegative matrix by power iteration from a random start."""
    A = np.asarray(A, dtype=float)
    v = np.random.default_rng(seed).uniform(0.5, 1.5, A.shape[0])
    lam = 0.0
    for _ in range(max_iter):
        w = A @ v
        new = float(np.max(w) / np.max(v))
        w /= np.max(w)
        if abs(new - lam) <= tol * new and np.max(np.abs(w - v)) <= 1e-12:
            return new
        lam, v = new, w
    raise ConvergenceError("power iteration for the spectral radius did not converge",
                           iterations=max_iter)


def spectral_radius(m, check=True):
    """Exact Perron root when row sums are constant, else the power-iteration value.

    With ``check`` the exact value is compared with power iteration to 1e-10.
    """
    A = m.A if isinstance(m, MarkovSystem) else np.asarray(m)
    sums = A.sum(axis=1)
    if sums.size and np.all(sums == sums[0]) and np.all(A >= 0):
        r = int(sums[0])
        if check:
            approx = power_spectral_radius(A)
            if abs(approx - r) > 1e-10:
                raise ConvergenceError(f"power iteration gives {approx}, expected {r}")
        return r
    return power_spectral_radius(A)


@dataclass
class BowenFranksResult:
    divisors: list
    free_rank: int
    det: int

    @property
    def torsion(self):
        return [d for d in self.divisors if d > 1]

    def group(self):
        parts = [f"Z/{d}" for d in self.torsion] + ["Z"] * self.free_rank
        return " + ".join(parts) if parts else "0"

    def to_json(self):
        return {"divisors": self.divisors, "free_rank": self.free_rank, "det": self.det,
                "group": self.group()}


def _cokernel(B):
    diag = smith_normal_form(B)
    return [d for d in diag if d], sum(1 for d in diag if d == 0)


def bowen_franks(m):
    """Cokernel of ``I - A`` via Smith normal form, with ``det(I - A)``."""
    A = m.A if isinstance(m, MarkovSystem) else np.asarray(m, dtype=np.int64)
    B = np.eye(A.shape[0], dtype=np.int64) - A
    divisors, free = _cokernel(B)
    return BowenFranksResult(divisors, free, bareiss_det(B))


@dataclass
class KTheory:
    K0_divisors: list
    K0_free_rank: int
    K1_rank: int

    @property
    def K0_torsion(self):
        return [d for d in self.K0_divisors if d > 1]

    def to_json(self):
        return {"K0": {"torsion": self.K0_torsion, "free_rank": self.K0_free_rank},
                "K1_rank": self.K1_rank}


def k_theory(m):
    """``K0 = coker(I - A^T)`` and ``rank K1 = rank ker(I - A^T)``."""
    A = m.A if isinstance(m, MarkovSystem) else np.asarray(m, dtype=np.int64)
    B = np.eye(A.shape[0], dtype=np.int64) - A.T
    divisors, free = _cokernel(B)
    return KTheory(divisors, free, free)
