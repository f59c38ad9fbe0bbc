"""Compare the compiled monomial kernel against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--n 4] [--pairs 200] [--repeat 5]

Times ``mul_terms`` on random de Rham elements, once with integer
coefficients (isolates the sign and monomial bookkeeping the kernel owns)
and once with the real scalars, then a full deformed-product workload with
each kernel swapped into ``dgdeform.kernels``.  With exact scalars most of
the time goes to Fraction arithmetic, so the end-to-end gap is small.
"""

import argparse
import random
import timeit

from dgdeform import _pykernels, kernels
from dgdeform.catalog import catalog_get
from dgdeform.deform import deformed_mul
from dgdeform.sampling import Bounds, random_element

try:
    from dgdeform import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def workload(n: int, pairs: int, seed: int):
    inst = catalog_get("derham", n=n)
    rng = random.Random(seed)
    bounds = Bounds(max_terms=6, max_word=6)
    data = [(random_element(rng, inst.ctx, bounds), random_element(rng, inst.ctx, bounds)) for _ in range(pairs)]
    return inst, data


def best(fn, repeat: int) -> float:
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=4)
    ap.add_argument("--pairs", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    inst, data = workload(args.n, args.pairs, args.seed)
    odd = inst.ctx.odd
    impls = {"python": _pykernels}
    if _ckernels is not None:
        impls["compiled"] = _ckernels
    else:
        print("compiled kernel not available; timing the fallback only")

    # both kernels must agree before timing means anything
    if _ckernels is not None:
        for a, b in data:
            assert _ckernels.mul_terms(a.terms, b.terms, odd) == _pykernels.mul_terms(a.terms, b.terms, odd)

    print(f"derham({args.n}), {args.pairs} pairs, best of {args.repeat}")
    times = {}
    ints = [({m: 1 for m in a.terms}, {m: 1 for m in b.terms}) for a, b in data]
    for label, mod in impls.items():
        bare = best(lambda: [mod.mul_terms(a, b, odd) for a, b in ints], args.repeat)
        raw = best(lambda: [mod.mul_terms(a.terms, b.terms, odd) for a, b in data], args.repeat)
        saved = kernels.mul_terms
        kernels.mul_terms = mod.mul_terms
        try:
            full = best(lambda: [deformed_mul(a, b, inst.d) for a, b in data], args.repeat)
        finally:
            kernels.mul_terms = saved
        times[label] = (bare, raw, full)
        print(f"  {label:9s} int coeffs {bare * 1e3:8.2f} ms   scalars {raw * 1e3:8.2f} ms   deformed_mul {full * 1e3:8.2f} ms")
    if len(times) == 2:
        ratios = [p / c for p, c in zip(times["python"], times["compiled"])]
        print("  speedup   int coeffs {:7.2f}x      scalars {:7.2f}x      deformed_mul {:7.2f}x".format(*ratios))


if __name__ == "__main__":
    main()
