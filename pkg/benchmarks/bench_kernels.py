"""Compare the numba and numpy residue-ring kernels.

    python3 benchmarks/bench_kernels.py [--repeat N]

Both variants run on the same residue rings and must agree; the table shows
the best wall time of each. Set SL2PARAM_DISABLE_NUMBA=1 to check that the
package still runs without the jit path (the numba column is then skipped).
"""

import argparse
import time

from sympy import factorint

from sl2param import kernels
from sl2param.primes import residue_constants, unit_count
from sl2param.ring import ResidueRing, ring

# (d, modulus as (x, y)) spanning a few hundred to ~10^5 residues
CASES = [
    (-1, (11, 4)),
    (-3, (37, 11)),
    (-7, (101, 30)),
    (-19, (211, 5)),
    (-163, (307, 0)),
]


def best_time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench(d, mod, repeat):
    R = ring(d)
    rr = ResidueRing(R(*mod))
    consts = residue_constants(rr)
    order = unit_count(rr.modulus)
    fac = sorted(factorint(order).items())
    primes = kernels.np.array([p for p, _ in fac], dtype=kernels.np.int64)
    exps = kernels.np.array([e for _, e in fac], dtype=kernels.np.int64)
    # a cube whose root the search has to find somewhere in the middle
    target = rr.reduce(R(rr.n1 // 2, rr.n2 // 2) ** 3)
    root_args = consts + (target.x, target.y, 3)

    rows = []
    jobs = [
        ("unit_exponent", lambda: kernels.unit_exponent_numpy(*consts, order, primes, exps),
         lambda: kernels.unit_exponent_numba(*consts, order, primes, exps)),
        ("first_root", lambda: kernels.first_root_numpy(*root_args),
         lambda: kernels.first_root_numba(*root_args)),
    ]
    for name, np_fn, nb_fn in jobs:
        t_np, r_np = best_time(np_fn, repeat)
        if kernels.HAVE_NUMBA:
            nb_fn()  # compile outside the timing
            t_nb, r_nb = best_time(nb_fn, repeat)
            assert int(r_np) == int(r_nb), (name, d, mod, r_np, r_nb)
        else:
            t_nb = None
        rows.append((name, d, rr.size, t_np, t_nb))
    return rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"numba enabled: {kernels.HAVE_NUMBA}")
    print(f"{'kernel':<14} {'d':>5} {'size':>7} {'numpy ms':>10} {'numba ms':>10} {'speedup':>8}")
    for d, mod in CASES:
        for name, dd, size, t_np, t_nb in bench(d, mod, args.repeat):
            if t_nb is None:
                print(f"{name:<14} {dd:>5} {size:>7} {t_np * 1e3:>10.2f} {'-':>10} {'-':>8}")
            else:
                print(f"{name:<14} {dd:>5} {size:>7} {t_np * 1e3:>10.2f} {t_nb * 1e3:>10.2f} {t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
