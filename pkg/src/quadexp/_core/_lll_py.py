"""Exact integer LLL kernel, pure Python reference implementation.

Integral variant maintaining the Gram determinants d[i] and scaled
Gram-Schmidt coefficients lam[i][j] = d[j] * mu_ij, so every division below
is exact and no floating point is involved. The compiled kernel in
_lll_cy.pyx implements the identical algorithm; both must stay in lockstep.
"""

from __future__ import annotations


def lll_reduce_rows(rows, delta_num=99, delta_den=100, progressive=True):
    """Reduce integer basis rows in place semantics-free (a copy is made).

    Returns (reduced_rows, transform) where transform is the unimodular
    matrix with transform @ input == reduced. Raises ValueError when the
    rows are linearly dependent. delta_num/delta_den is the Lovász
    parameter, required to lie in (1/4, 1).

    With progressive=True the reduction runs a ladder of increasing delta
    values ending at the requested one; the final basis satisfies the
    requested Lovász condition exactly, the ladder only saves swaps.
    """
    if not (0 < delta_num < delta_den and 4 * delta_num > delta_den):
        raise ValueError("delta must lie in (1/4, 1)")
    n = len(rows)
    if n == 0:
        return [], []
    m = len(rows[0])
    b = [list(map(int, r)) for r in rows]
    if any(len(r) != m for r in b):
        raise ValueError("ragged basis")
    u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    if n == 1:
        if not any(b[0]):
            raise ValueError("dependent rows (zero vector)")
        return b, u

    # d[0..n], lam[i][j] valid for 1 <= j < i <= n (1-based like the
    # classical description; row i of the basis is b[i-1]).
    d = [0] * (n + 1)
    d[0] = 1
    lam = [[0] * (n + 1) for _ in range(n + 1)]

    d[1] = _dot(b[0], b[0])
    if d[1] == 0:
        raise ValueError("dependent rows (zero vector)")
    kmax = 1

    ladder = [(3, 4), (9, 10), (delta_num, delta_den)] if progressive else []
    ladder = [t for t in ladder if t[0] * delta_den <= delta_num * t[1]]
    if not ladder or ladder[-1] != (delta_num, delta_den):
        ladder.append((delta_num, delta_den))

    for num, den in ladder:
        k = 2
        while k <= n:
            if k > kmax:
                kmax = k
                for j in range(1, k + 1):
                    s = _dot(b[k - 1], b[j - 1])
                    for i in range(1, j):
                        s = (d[i] * s - lam[k][i] * lam[j][i]) // d[i - 1]
                    if j < k:
                        lam[k][j] = s
                    else:
                        if s == 0:
                            raise ValueError("dependent rows")
                        d[k] = s
            while True:
                _red(b, u, d, lam, k, k - 1)
                if den * (d[k] * d[k - 2] + lam[k][k - 1] ** 2) < num * d[k - 1] ** 2:
                    _swap(b, u, d, lam, k, kmax)
                    k = max(2, k - 1)
                else:
                    for l in range(k - 2, 0, -1):
                        _red(b, u, d, lam, k, l)
                    k += 1
                    break
    return b, u


def _dot(x, y):
    s = 0
    for a, c in zip(x, y):
        s += a * c
    return s


def _red(b, u, d, lam, k, l):
    lkl = lam[k][l]
    dl = d[l]
    if 2 * abs(lkl) <= dl:
        return
    q = (2 * lkl + dl) // (2 * dl)
    bk = b[k - 1]
    bl = b[l - 1]
    for i in range(len(bk)):
        bk[i] -= q * bl[i]
    uk = u[k - 1]
    ul = u[l - 1]
    for i in range(len(uk)):
        uk[i] -= q * ul[i]
    lam[k][l] = lkl - q * dl
    lamk = lam[k]
    laml = lam[l]
    for i in range(1, l):
        lamk[i] -= q * laml[i]


def _swap(b, u, d, lam, k, kmax):
    b[k - 1], b[k - 2] = b[k - 2], b[k - 1]
    u[k - 1], u[k - 2] = u[k - 2], u[k - 1]
    lamk = lam[k]
    lamk1 = lam[k - 1]
    for j in range(1, k - 1):
        lamk[j], lamk1[j] = lamk1[j], lamk[j]
    lab = lamk[k - 1]
    bness = (d[k - 2] * d[k] + lab * lab) // d[k - 1]
    for i in range(k + 1, kmax + 1):
        lami = lam[i]
        t = lami[k]
        lami[k] = (d[k] * lami[k - 1] - lab * t) // d[k - 1]
        lami[k - 1] = (bness * t + lab * lami[k]) // d[k]
    d[k - 1] = bness
