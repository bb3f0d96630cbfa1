"""Independent reference implementations used only to cross-check results.

Nothing here shares code paths with the library: class numbers come from
union-find orbit closure under the elementary substitutions, units from a
direct Pell scan, Lovasz conditions from rational Gram-Schmidt, and short
vectors from exhaustive enumeration.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt


def definite_class_number_orbit(disc: int) -> int:
    """Class count for disc < 0 by orbit closure under S and T moves.

    Seeds every primitive form with a <= sqrt(|disc|/3) + 1 and |b| <= a-range,
    then unions forms connected by (a,b,c) -> (a, b+2a, a+b+c), its inverse,
    and (a,b,c) -> (c,-b,a), capped inside a box that provably contains every
    reduction path from the seeds. Components = classes.
    """
    assert disc < 0 and disc % 4 in (0, 1)
    r = isqrt(abs(disc) // 3) + 1
    cap = (r * r + abs(disc)) // 4 + r + 4

    seeds = []
    for a in range(1, r + 1):
        for b in range(-a, a + 1):
            num = b * b - disc
            if num % (4 * a) == 0:
                c = num // (4 * a)
                if gcd(gcd(a, abs(b)), c) == 1:
                    seeds.append((a, b, c))

    parent: dict[tuple, tuple] = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        if y not in parent:
            parent[y] = y
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    def in_box(form):
        a, b, c = form
        return 0 < a <= cap and 0 < c <= cap

    stack = []
    for s in seeds:
        if s not in parent:
            parent[s] = s
        stack.append(s)
    visited = set()
    while stack:
        f = stack.pop()
        if f in visited:
            continue
        visited.add(f)
        a, b, c = f
        neighbours = [(a, b + 2 * a, a + b + c),
                      (a, b - 2 * a, a - b + c),
                      (c, -b, a)]
        for g in neighbours:
            if in_box(g):
                union(f, g)
                if g not in visited:
                    stack.append(g)
    return len({find(s) for s in seeds})


def min_unit_power_in_suborder(eps1, order) -> object:
    """Least power of the maximal-order unit lying in the suborder."""
    from quadexp.quadfield import _in_order

    value = eps1
    for k in range(1, 64):
        if _in_order(value, order):
            return value
        value = value * eps1
    raise AssertionError("no unit power landed in the suborder below 64")


def gram_schmidt_mu(rows):
    """Rational Gram-Schmidt data (b*, mu) for exact Lovasz verification."""
    n = len(rows)
    bstar = []
    mu = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        v = [Fraction(x) for x in rows[i]]
        for j in range(i):
            num = sum(Fraction(rows[i][k]) * bstar[j][k] for k in range(len(v)))
            den = sum(x * x for x in bstar[j])
            mu[i][j] = num / den
            v = [v[k] - mu[i][j] * bstar[j][k] for k in range(len(v))]
        bstar.append(v)
    return bstar, mu


def lovasz_holds(rows, delta: Fraction) -> bool:
    """Exact size-reduction + Lovasz condition check over Q."""
    bstar, mu = gram_schmidt_mu(rows)
    n = len(rows)
    for i in range(n):
        for j in range(i):
            if abs(mu[i][j]) > Fraction(1, 2):
                return False
    norms = [sum(x * x for x in b) for b in bstar]
    for k in range(1, n):
        if norms[k] < (delta - mu[k][k - 1] ** 2) * norms[k - 1]:
            return False
    return True


def shortest_vector_brute(rows, coeff_bound: int = 4) -> int:
    """Squared length of the shortest nonzero small-coefficient combination."""
    import itertools

    n = len(rows)
    m = len(rows[0])
    best = None
    for coeffs in itertools.product(range(-coeff_bound, coeff_bound + 1), repeat=n):
        if not any(coeffs):
            continue
        v = [sum(coeffs[i] * rows[i][k] for i in range(n)) for k in range(m)]
        norm = sum(x * x for x in v)
        if best is None or norm < best:
            best = norm
    return best
