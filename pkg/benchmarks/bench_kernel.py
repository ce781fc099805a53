"""Time the GMP and pure-Python continued-fraction kernels side by side.

    python3 benchmarks/bench_kernel.py [--depths 1000,10000] [--reps 20]

Both kernels run on the same random dyadic points; their outputs are
compared before any timing is reported.
"""

import argparse
import random
import sys
import time

from cfdim import _purekernel

try:
    from cfdim import _cfkernel
except ImportError:
    _cfkernel = None


def _points(depth, reps, seed):
    rng = random.Random(seed)
    bits = 4 * depth
    return [(rng.getrandbits(bits) | 1, 1 << bits) for _ in range(reps)]


def _time(fn, pts, depth):
    t0 = time.perf_counter()
    out = [fn(p, q, depth) for p, q in pts]
    return time.perf_counter() - t0, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--depths", default="1000,10000")
    ap.add_argument("--reps", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if _cfkernel is None:
        print("compiled kernel not built; only the python backend is available", file=sys.stderr)

    print(f"{'op':<14}{'depth':>8}{'python (ms)':>14}{'gmp (ms)':>12}{'speedup':>10}")
    for depth in (int(d) for d in args.depths.split(",")):
        pts = _points(depth, args.reps, args.seed)
        for name in ("cf_digit_sum", "cf_expand"):
            t_py, out_py = _time(getattr(_purekernel, name), pts, depth)
            if _cfkernel is None:
                print(f"{name:<14}{depth:>8}{1e3 * t_py / args.reps:>14.2f}{'-':>12}{'-':>10}")
                continue
            t_c, out_c = _time(getattr(_cfkernel, name), pts, depth)
            if [tuple(x) if isinstance(x, list) else x for x in out_py] != \
                    [tuple(x) if isinstance(x, list) else x for x in out_c]:
                raise SystemExit(f"{name} at depth {depth}: backends disagree")
            print(f"{name:<14}{depth:>8}{1e3 * t_py / args.reps:>14.2f}{1e3 * t_c / args.reps:>12.2f}"
                  f"{t_py / t_c:>9.1f}x")


if __name__ == "__main__":
    main()
