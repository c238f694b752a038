"""The compiled kernels must agree with the numpy fallback."""

import numpy as np
import pytest

from cribmac import _fallback, kernels
from cribmac.prob import Alphabet, JointLaw
from cribmac.typicality import Tester as TypTester, TypicalityContext

ckern = pytest.importorskip("cribmac._ckernels")


def random_tester(rng, sizes, eps, n):
    m = rng.dirichlet(np.ones(int(np.prod(sizes)))).reshape(sizes)
    j = JointLaw([Alphabet(s, f"A{i}") for i, s in enumerate(sizes)], m)
    return TypTester(TypicalityContext(j, eps, n)), m


@pytest.mark.parametrize("sizes", [(2,), (2, 3), (2, 2, 2), (3, 1, 2, 2)])
def test_typical_mask_agrees(sizes):
    rng = np.random.default_rng(len(sizes))
    n = 60
    t, m = random_tester(rng, sizes, 2.0, n)
    flat = rng.choice(m.size, p=m.ravel(), size=(400, n))
    args = (flat, t.maps, t.offsets, t.targets, t.threshold)
    a = ckern.typical_mask(*args)
    b = _fallback.typical_mask(*args)
    assert np.array_equal(a, b)
    assert np.array_equal(ckern.typical_mask(*args, True), _fallback.typical_mask(*args, True))


def test_first_only_zeroes_tail():
    rng = np.random.default_rng(0)
    t, m = random_tester(rng, (2, 2), 4.0, 40)
    flat = rng.choice(m.size, p=m.ravel(), size=(200, 40))
    full = _fallback.typical_mask(flat, t.maps, t.offsets, t.targets, t.threshold)
    first = ckern.typical_mask(flat, t.maps, t.offsets, t.targets, t.threshold, True)
    if full.any():
        k = int(np.argmax(full))
        assert first[k] == 1 and first.sum() == 1


def test_empty_batch():
    out = ckern.typical_mask(np.zeros((0, 5), dtype=np.int64), np.zeros((1, 2), dtype=np.int64),
                             np.array([0, 2]), np.array([0.5, 0.5]), 0.1)
    assert out.shape == (0,)


@pytest.mark.parametrize("seed", range(5))
def test_pentagon_terms_agree(seed):
    rng = np.random.default_rng(seed)
    shape = tuple(rng.integers(1, 4, size=6))
    q = rng.dirichlet(np.ones(int(np.prod(shape)))).reshape(shape)
    q[q < 0.01] = 0
    q /= q.sum()
    assert np.allclose(ckern.pentagon_terms(q), _fallback.pentagon_terms(q), atol=1e-12)


def test_backend_reported():
    assert kernels.BACKEND in ("cython", "numpy")
