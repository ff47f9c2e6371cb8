"""Compare the compiled search kernel with the pure-Python fallback.

    python3 benchmarks/bench_search.py [--repeat 3] [--seed 0]

Workloads are graph-homomorphism counting problems of growing size, fed to
both kernels with identical inputs; results are checked for equality.
"""
import argparse
import random
import time

from rwb import kernel
from rwb._search import search as python_search


def hom_problem(rng, n_src, n_tgt, p_src, p_tgt):
    """Count homs of a random digraph into another, as kernel input."""
    src = [(a, b) for a in range(n_src) for b in range(n_src) if a != b and rng.random() < p_src]
    tgt = {(a, b) for a in range(n_tgt) for b in range(n_tgt) if rng.random() < p_tgt}
    domains = [tuple(range(n_tgt))] * n_src
    checks = [[] for _ in range(n_src)]
    for a, b in src:
        checks[max(a, b)].append((0, (a, b)))
    return domains, checks, [tgt], n_src


def timed(fn, args, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if kernel.BACKEND != "cython":
        print("compiled kernel unavailable; only the fallback would run")
        return 1
    rng = random.Random(args.seed)
    cases = [(5, 6, 0.3, 0.5), (6, 8, 0.3, 0.5), (7, 9, 0.25, 0.5), (8, 10, 0.25, 0.45)]
    print(f"{'src':>4} {'tgt':>4} {'homs':>9} {'cython s':>10} {'python s':>10} {'speedup':>8}")
    for n_src, n_tgt, ps, pt in cases:
        prob = hom_problem(rng, n_src, n_tgt, ps, pt)
        tc, rc = timed(kernel.search, prob, args.repeat)
        tp, rp = timed(python_search, prob, args.repeat)
        assert rc == rp, "kernels disagree"
        print(f"{n_src:>4} {n_tgt:>4} {len(rc):>9} {tc:>10.4f} {tp:>10.4f} {tp / tc:>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
