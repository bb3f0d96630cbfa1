"""Benchmark: compiled vs pure-Python LLL kernel on recognition lattices.

Builds the same algdep-style lattices the recognition layer uses (identity
block plus scaled power columns) at several sizes and times both backends
on identical inputs. Run from the repository root:

    python benchmarks/bench_lll.py
"""

import random
import time

import mpmath as mp

from quadexp._core import _lll_py

try:
    from quadexp._core import _lll_cy
except ImportError:
    _lll_cy = None


def algdep_lattice(value, degree: int, scale_bits: int):
    mp.mp.dps = int(scale_bits * 0.302) + 20
    rows = []
    powers = [mp.mpf(1)]
    for _ in range(degree):
        powers.append(powers[-1] * value)
    for k, v in enumerate(powers):
        row = [0] * (degree + 1)
        row[k] = 1
        row.append(int(mp.floor(v * (1 << scale_bits))))
        rows.append(row)
    return rows


def random_lattice(rng, n: int, bits: int):
    return [[rng.getrandbits(bits) - (1 << (bits - 1)) for _ in range(n + 1)]
            for _ in range(n)]


def timed(fn, rows, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn([r[:] for r in rows], 99, 100)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    rng = random.Random(1)
    cases = [
        ("algdep deg 8, 340 bits", algdep_lattice(mp.sqrt(2) + mp.sqrt(3), 8, 340), 3),
        ("algdep deg 8, 660 bits", algdep_lattice(mp.pi, 8, 660), 3),
        ("algdep deg 12, 900 bits", algdep_lattice(mp.log(7), 12, 900), 2),
        ("random 10x11, 128 bits", random_lattice(rng, 10, 128), 3),
        ("random 16x17, 64 bits", random_lattice(rng, 16, 64), 2),
    ]
    print(f"{'case':28s} {'python':>10s} {'cython':>10s} {'speedup':>8s}")
    for label, rows, repeat in cases:
        t_py = timed(_lll_py.lll_reduce_rows, rows, repeat)
        if _lll_cy is not None:
            t_cy = timed(_lll_cy.lll_reduce_rows, rows, repeat)
            a = _lll_py.lll_reduce_rows([r[:] for r in rows], 99, 100)
            b = _lll_cy.lll_reduce_rows([r[:] for r in rows], 99, 100)
            assert a[0] == b[0] and a[1] == b[1], "backends disagree"
            print(f"{label:28s} {t_py*1e3:9.2f}ms {t_cy*1e3:9.2f}ms "
                  f"{t_py/t_cy:7.2f}x")
        else:
            print(f"{label:28s} {t_py*1e3:9.2f}ms {'n/a':>10s} {'n/a':>8s}")
    if _lll_cy is None:
        print("\ncompiled kernel not built; run: python setup.py build_ext --inplace")


if __name__ == "__main__":
    main()
