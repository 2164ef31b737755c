"""Small dense integer linear algebra: Smith normal form and exact solving.

Matrices are lists of lists of Python ints. Sizes here are tiny (2x4 at most
in the hot path) so the textbook elimination is used without pivoting tricks.
"""

from __future__ import annotations

from math import gcd

Mat = list[list[int]]


def identity(n: int) -> Mat:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A: Mat, B: Mat) -> Mat:
    return [
        [sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))]
        for i in range(len(A))
    ]


def _swap_rows(M: Mat, i: int, j: int) -> None:
    M[i], M[j] = M[j], M[i]


def _swap_cols(M: Mat, i: int, j: int) -> None:
    for row in M:
        row[i], row[j] = row[j], row[i]


def _add_row(M: Mat, dst: int, src: int, k: int) -> None:
    # row[dst] += k * row[src]
    if k:
        rs, rd = M[src], M[dst]
        for j in range(len(rd)):
            rd[j] += k * rs[j]


def _add_col(M: Mat, dst: int, src: int, k: int) -> None:
    if k:
        for row in M:
            row[dst] += k * row[src]


def smith_normal_form(A: Mat) -> tuple[Mat, Mat, Mat]:
    """Return ``(S, U, V)`` with ``U @ A @ V == S``.

    ``S`` is diagonal with non-negative entries, each dividing the next;
    ``U`` and ``V`` are unimodular.
    """
    m, n = len(A), len(A[0])
    S = [row[:] for row in A]
    U = identity(m)
    V = identity(n)
    for t in range(min(m, n)):
        while True:
            # Pivot: smallest non-zero absolute value in the trailing block.
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if S[i][j] and (best is None or abs(S[i][j]) < abs(S[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                return S, U, V
            i, j = best
            if i != t:
                _swap_rows(S, i, t)
                _swap_rows(U, i, t)
            if j != t:
                _swap_cols(S, j, t)
                _swap_cols(V, j, t)
            p = S[t][t]
            dirty = False
            for i in range(t + 1, m):
                q = S[i][t] // p
                _add_row(S, i, t, -q)
                _add_row(U, i, t, -q)
                dirty |= S[i][t] != 0
            for j in range(t + 1, n):
                q = S[t][j] // p
                _add_col(S, j, t, -q)
                _add_col(V, j, t, -q)
                dirty |= S[t][j] != 0
            if dirty:
                continue
            # Divisibility of the trailing block by the pivot.
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if S[i][j] % p),
                None,
            )
            if bad is None:
                break
            _add_row(S, t, bad, 1)
            _add_row(U, t, bad, 1)
        if S[t][t] < 0:
            S[t] = [-x for x in S[t]]
            U[t] = [-x for x in U[t]]
    return S, U, V


def solve_integer(A: Mat, b: list[int]) -> list[int] | None:
    """One integer solution ``z`` of ``A z = b``, or ``None`` if there is none."""
    m, n = len(A), len(A[0])
    S, U, V = smith_normal_form(A)
    ub = [sum(U[i][k] * b[k] for k in range(m)) for i in range(m)]
    y = [0] * n
    for i in range(m):
        s = S[i][i] if i < n else 0
        if s == 0:
            if ub[i]:
                return None
            continue
        q, r = divmod(ub[i], s)
        if r:
            return None
        y[i] = q
    return [sum(V[i][k] * y[k] for k in range(n)) for i in range(n)]


def lattice_hnf(vectors: list[tuple[int, int]]) -> tuple[int, int, int]:
    """Column Hermite normal form of a full-rank lattice in Z^2.

    Returns ``(n1, b, n2)`` describing the basis ``(n1, 0), (b, n2)`` with
    ``n1, n2 > 0`` and ``0 <= b < n1``.
    """
    cols = [list(v) for v in vectors if v[0] or v[1]]
    # Clear the second coordinate into a single column by gcd steps.
    piv = None
    rest: list[list[int]] = []
    for c in cols:
        if c[1] == 0:
            rest.append(c)
            continue
        if piv is None:
            piv = c
            continue
        while c[1]:
            q = piv[1] // c[1]
            piv = [piv[0] - q * c[0], piv[1] - q * c[1]]
            piv, c = c, piv
        rest.append(c)
    if piv is None:
        raise ValueError("lattice is not of full rank")
    n1 = 0
    for c in rest:
        n1 = gcd(n1, c[0])
    if n1 == 0:
        raise ValueError("lattice is not of full rank")
    if piv[1] < 0:
        piv = [-piv[0], -piv[1]]
    return n1, piv[0] % n1, piv[1]

