"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from cribmac import _fallback
from cribmac.prob import Alphabet, JointLaw
from cribmac.typicality import Tester, TypicalityContext

try:
    from cribmac import _ckernels
except ImportError:
    _ckernels = None


def typicality_case(rng, sizes, n, batch):
    m = rng.dirichlet(np.ones(int(np.prod(sizes)))).reshape(sizes)
    t = Tester(TypicalityContext(JointLaw([Alphabet(s, f"A{i}") for i, s in enumerate(sizes)], m), 4.0, n))
    codes = rng.choice(m.size, p=m.ravel(), size=(batch, n))
    return (codes, t.maps, t.offsets, t.targets, t.threshold)


def pentagon_case(rng, shape):
    q = rng.dirichlet(np.ones(int(np.prod(shape)))).reshape(shape)
    return (q,)


def bench(fn, args, repeat):
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    opts = ap.parse_args()
    rng = np.random.default_rng(0)
    cases = [
        ("typical_mask (V,X1,U,Y) 2x2x4x4, n=200, 5000 rows", "typical_mask",
         typicality_case(rng, (2, 2, 4, 4), 200, 5000)),
        ("typical_mask (V,U,S) 1x2x2, n=1000, 20000 rows", "typical_mask",
         typicality_case(rng, (1, 2, 2), 1000, 20000)),
        ("pentagon_terms 4x2x8x2x2x2", "pentagon_terms", pentagon_case(rng, (4, 2, 8, 2, 2, 2))),
        ("pentagon_terms 13x2x8x2x2x2", "pentagon_terms", pentagon_case(rng, (13, 2, 8, 2, 2, 2))),
    ]
    print(f"{'case':<52} {'numpy ms':>10} {'cython ms':>10} {'speedup':>8}")
    for label, name, args in cases:
        t_np = bench(getattr(_fallback, name), args, opts.repeat) * 1e3
        if _ckernels is None:
            print(f"{label:<52} {t_np:10.2f} {'n/a':>10} {'':>8}")
            continue
        c_fn = getattr(_ckernels, name)
        a, b = np.asarray(c_fn(*args)), np.asarray(getattr(_fallback, name)(*args))
        assert np.allclose(a, b, atol=1e-12), f"{name}: backends disagree"
        t_c = bench(c_fn, args, opts.repeat) * 1e3
        print(f"{label:<52} {t_np:10.2f} {t_c:10.2f} {t_np / t_c:7.1f}x")


if __name__ == "__main__":
    main()
