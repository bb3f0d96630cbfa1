# cython: language_level=3, boundscheck=False, wraparound=False
"""Exact integer LLL kernel, compiled variant.

Same integral algorithm as _lll_py.py; mantissas stay arbitrary-precision
Python ints, Cython removes the interpreter overhead of the inner loops.
"""


cdef object _dot(list x, list y, Py_ssize_t m):
    cdef Py_ssize_t i
    s = 0
    for i in range(m):
        s += x[i] * y[i]
    return s


cdef void _red(list b, list u, list d, list lam, Py_ssize_t k, Py_ssize_t l, Py_ssize_t m, Py_ssize_t n):
    cdef Py_ssize_t i
    lkl = (<list>lam[k])[l]
    dl = d[l]
    if 2 * abs(lkl) <= dl:
        return
    q = (2 * lkl + dl) // (2 * dl)
    cdef list bk = <list>b[k - 1]
    cdef list bl = <list>b[l - 1]
    for i in range(m):
        bk[i] = bk[i] - q * bl[i]
    cdef list uk = <list>u[k - 1]
    cdef list ul = <list>u[l - 1]
    for i in range(n):
        uk[i] = uk[i] - q * ul[i]
    cdef list lamk = <list>lam[k]
    cdef list laml = <list>lam[l]
    lamk[l] = lkl - q * dl
    for i in range(1, l):
        lamk[i] = lamk[i] - q * laml[i]


cdef void _swap(list b, list u, list d, list lam, Py_ssize_t k, Py_ssize_t kmax):
    cdef Py_ssize_t j, i
    b[k - 1], b[k - 2] = b[k - 2], b[k - 1]
    u[k - 1], u[k - 2] = u[k - 2], u[k - 1]
    cdef list lamk = <list>lam[k]
    cdef list lamk1 = <list>lam[k - 1]
    for j in range(1, k - 1):
        lamk[j], lamk1[j] = lamk1[j], lamk[j]
    lab = lamk[k - 1]
    bness = (d[k - 2] * d[k] + lab * lab) // d[k - 1]
    cdef list lami
    for i in range(k + 1, kmax + 1):
        lami = <list>lam[i]
        t = lami[k]
        lami[k] = (d[k] * lami[k - 1] - lab * t) // d[k - 1]
        lami[k - 1] = (bness * t + lab * lami[k]) // d[k]
    d[k - 1] = bness


def lll_reduce_rows(rows, delta_num=99, delta_den=100, progressive=True):
    """Compiled twin of quadexp._core._lll_py.lll_reduce_rows."""
    cdef Py_ssize_t n, m, k, kmax, i, j, l
    if not (0 < delta_num < delta_den and 4 * delta_num > delta_den):
        raise ValueError("delta must lie in (1/4, 1)")
    n = len(rows)
    if n == 0:
        return [], []
    cdef list b = [list(map(int, r)) for r in rows]
    m = len(<list>b[0])
    for i in range(n):
        if len(<list>b[i]) != m:
            raise ValueError("ragged basis")
    cdef list u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    if n == 1:
        if not any(<list>b[0]):
            raise ValueError("dependent rows (zero vector)")
        return b, u

    cdef list d = [0] * (n + 1)
    d[0] = 1
    cdef list lam = [[0] * (n + 1) for _ in range(n + 1)]

    d[1] = _dot(<list>b[0], <list>b[0], m)
    if d[1] == 0:
        raise ValueError("dependent rows (zero vector)")
    kmax = 1

    ladder = [(3, 4), (9, 10), (delta_num, delta_den)] if progressive else []
    ladder = [t for t in ladder if t[0] * delta_den <= delta_num * t[1]]
    if not ladder or ladder[len(ladder) - 1] != (delta_num, delta_den):
        ladder.append((delta_num, delta_den))

    cdef list lamk, lamj
    for num, den in ladder:
        k = 2
        while k <= n:
            if k > kmax:
                kmax = k
                lamk = <list>lam[k]
                for j in range(1, k + 1):
                    s = _dot(<list>b[k - 1], <list>b[j - 1], m)
                    lamj = <list>lam[j]
                    for i in range(1, j):
                        s = (d[i] * s - lamk[i] * lamj[i]) // d[i - 1]
                    if j < k:
                        lamk[j] = s
                    else:
                        if s == 0:
                            raise ValueError("dependent rows")
                        d[k] = s
            while True:
                _red(b, u, d, lam, k, k - 1, m, n)
                lkk = (<list>lam[k])[k - 1]
                if den * (d[k] * d[k - 2] + lkk * lkk) < num * d[k - 1] * d[k - 1]:
                    _swap(b, u, d, lam, k, kmax)
                    k = max(2, k - 1)
                else:
                    for l in range(k - 2, 0, -1):
                        _red(b, u, d, lam, k, l, m, n)
                    k += 1
                    break
    return b, u
