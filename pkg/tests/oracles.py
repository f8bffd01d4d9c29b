"""Independent reference computations used by the tests.

Nothing here imports mixlab. Each oracle takes a different route from the
library code: high-precision mpmath arithmetic, plain Fraction recursions,
dense LAPACK eigenvalues, sympy and networkx.
"""

import math
from fractions import Fraction

import mpmath
import networkx as nx
import numpy as np
import sympy

LAMBDA_0 = math.pi**2 / (6 * math.log(2))
GOLDEN = (1 + 5**0.5) / 2
# dim of E_2, known to many digits from the literature on bounded-digit sets
DIM_E2 = 0.531280506277205
# leading nontrivial eigenvalue of the Gauss-Kuzmin-Wirsing operator
WIRSING = -0.3036630028987326


def mp_digits(value, n, dps=400):
    """Continued fraction digits of an mpmath expression string via high precision."""
    with mpmath.workdps(dps):
        x = mpmath.mpf(mpmath.mpmathify(value)) if not callable(value) else value()
        out = []
        for _ in range(n):
            if x == 0:
                break
            r = 1 / x
            k = int(mpmath.floor(r))
            out.append(k)
            x = r - k
        return out


def fraction_convergents(digits):
    """Convergents ``p_i/q_i`` by the textbook recursion on Fractions."""
    out = []
    for i in range(1, len(digits) + 1):
        v = Fraction(0)
        for k in reversed(digits[:i]):
            v = 1 / (k + v)
        out.append(v)
    return out


def fold(digits):
    """Evaluate ``[k1, ..., kn]`` by folding from the right."""
    v = Fraction(0)
    for k in reversed(digits):
        v = 1 / (k + v)
    return v


# P^1(F_2) as explicit homogeneous vectors; index order 0, 1, inf
P1 = [(0, 1), (1, 1), (1, 0)]


def p1_act(m, idx):
    (a, b), (c, d) = m
    u, v = P1[idx]
    w = ((a * u + b * v) % 2, (c * u + d * v) % 2)
    return P1.index(w)


def gauss_power_digits_oracle(x, n):
    """``T^n x`` computed with mpmath from a float start."""
    with mpmath.workdps(60):
        y = mpmath.mpf(x)
        for _ in range(n):
            r = 1 / y
            y = r - mpmath.floor(r)
        return float(y)


def dense_spectrum(A):
    """Eigenvalues sorted by decreasing modulus (LAPACK)."""
    w = np.linalg.eigvals(np.asarray(A, dtype=float))
    return w[np.argsort(-np.abs(w))]


def hurwitz_sum(s, q, terms=None):
    return float(mpmath.zeta(s, q))


def sympy_snf(A):
    from sympy.matrices.normalforms import smith_normal_form

    S = smith_normal_form(sympy.Matrix(np.asarray(A).tolist()), domain=sympy.ZZ)
    n = min(S.shape)
    diag = [abs(int(S[i, i])) for i in range(n)]
    return sorted(d for d in diag if d) + [0] * diag.count(0)


def sympy_det(A):
    return int(sympy.Matrix(np.asarray(A).tolist()).det())


def graph_of(A):
    A = np.asarray(A)
    return nx.from_numpy_array(A, create_using=nx.DiGraph)


def nx_strongly_connected(A):
    return nx.is_strongly_connected(graph_of(A))


def nx_aperiodic(A):
    return nx.is_aperiodic(graph_of(A))


def kasner_oracle(u):
    """Kasner exponents from the ``u`` parametrization with Fractions when possible."""
    u = Fraction(u)
    den = 1 + u + u * u
    return (-u / den, (1 + u) / den, u * (1 + u) / den)


def bkl_eras(u0, n):
    """Eras by literal rules: cycles decrement u while u > 1, then bounce u -> 1/u."""
    u = Fraction(u0)
    out = []
    for _ in range(n):
        cycles = 0
        while u > 1:
            cycles += 1
            u -= 1
        out.append(cycles)
        if u == 0:
            break
        u = 1 / u
    return out
