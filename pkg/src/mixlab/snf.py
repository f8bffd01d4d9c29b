"""Exact integer linear algebra: Smith normal form and Bareiss determinant.

Entries are Python integers throughout, so intermediate growth is harmless.
"""

__all__ = ["smith_normal_form", "bareiss_det", "to_int_rows"]


def to_int_rows(A):
    """Copy any 2-d array-like into a list of lists of Python ints."""
    rows = [[int(v) for v in row] for row in A]
    width = {len(r) for r in rows}
    if len(width) > 1:
        raise ValueError("ragged matrix")
    return rows


def _pivot(M, t, n_rows, n_cols):
    best = None
    for i in range(t, n_rows):
        for j in range(t, n_cols):
            v = M[i][j]
            if v and (best is None or abs(v) < best[0]):
                best = (abs(v), i, j)
                if best[0] == 1:
                    return best
    return best


def smith_normal_form(A):
    """Diagonal of the Smith normal form of an integer matrix.

    Returns ``min(rows, cols)`` nonnegative integers ``d_1 | d_2 | ...``;
    trailing zeros mark the rank deficiency.
    """
    M = to_int_rows(A)
    n_rows = len(M)
    n_cols = len(M[0]) if M else 0
    diag = []
    t = 0
    while t < min(n_rows, n_cols):
        piv = _pivot(M, t, n_rows, n_cols)
        if piv is None:
            break
        _, i, j = piv
        M[t], M[i] = M[i], M[t]
        for row in M:
            row[t], row[j] = row[j], row[t]
        while True:
            p = M[t][t]
            dirty = False
            # clear column t below the pivot
            for i in range(t + 1, n_rows):
                if M[i][t]:
                    q = M[i][t] // p
                    if q:
                        Mi, Mt = M[i], M[t]
                        for j in range(t, n_cols):
                            Mi[j] -= q * Mt[j]
                    if M[i][t]:
                        dirty = True
            # clear row t right of the pivot
            for j in range(t + 1, n_cols):
                if M[t][j]:
                    q = M[t][j] // p
                    if q:
                        for row in M[t:]:
                            row[j] -= q * row[t]
                    if M[t][j]:
                        dirty = True
            if not dirty:
                # divisibility fix-up: the pivot must divide the remaining block
                bad = next(
                    (i for i in range(t + 1, n_rows)
                     for j in range(t + 1, n_cols) if M[i][j] % p),
                    None,
                )
                if bad is None:
                    break
                Mt, Mb = M[t], M[bad]
                for j in range(t, n_cols):
                    Mt[j] += Mb[j]
                dirty = True
            # remainders are smaller than the pivot: move the smallest one in
            piv = _pivot(M, t, n_rows, n_cols)
            _, i, j = piv
            M[t], M[i] = M[i], M[t]
            for row in M:
                row[t], row[j] = row[j], row[t]
        diag.append(abs(M[t][t]))
        t += 1
    diag.extend([0] * (min(n_rows, n_cols) - len(diag)))
    return diag


def bareiss_det(A):
    """Determinant by fraction-free Bareiss elimination."""
    M = to_int_rows(A)
    n = len(M)
    if any(len(r) != n for r in M):
        raise ValueError("determinant needs a square matrix")
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k]), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]
