import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import binomtest

from cribmac.channel import LengthMismatch
from cribmac.prob import Alphabet, JointLaw
from cribmac.typicality import (Tester as TypTester, TypicalityContext, VariableMismatch, cross_law_typicality_rate,
                                empirical_type, is_strongly_typical, sequence_log_probability,
                                sequence_probability, typical_probability_bounds, wilson_interval)


def law(mass, labels=None):
    mass = np.asarray(mass, dtype=float)
    labels = labels or "XYZW"[:mass.ndim]
    return JointLaw([Alphabet(s, lab) for s, lab in zip(mass.shape, labels)], mass)


def naive_typical(mass, seqs, eps):
    """Literal definition: every nonempty subset, every tuple, strict inequality."""
    k, n = len(seqs), len(seqs[0])
    thr = eps / mass.size
    for r in range(1, k + 1):
        for sub in itertools.combinations(range(k), r):
            marg = mass.sum(axis=tuple(a for a in range(k) if a not in sub))
            for cell in itertools.product(*(range(mass.shape[a]) for a in sub)):
                cnt = sum(all(seqs[a][t] == v for a, v in zip(sub, cell)) for t in range(n))
                if not abs(cnt / n - marg[cell]) < thr:
                    return False
    return True


class TestEmpiricalType:
    def test_single(self):
        assert empirical_type([[0, 0, 1]]).counts.tolist() == [2, 1]

    def test_pair(self):
        t = empirical_type([[0, 0, 1], [1, 1, 0]])
        assert t.counts[0, 1] == 2 and t.counts[1, 0] == 1 and t.counts.sum() == 3

    def test_constant(self):
        t = empirical_type([[2] * 9], sizes=(3,))
        assert t.counts.tolist() == [0, 0, 9]

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            empirical_type([[0, 1], [0]])


class TestDefinition:
    def test_n1_literal(self):
        # P = (0.5, 0.5), eps = 1.2, threshold 0.6: |1 - 0.5| < 0.6 holds for either symbol
        ctx = TypicalityContext(law([0.5, 0.5]), 1.2, 1)
        assert is_strongly_typical(ctx, [[0]]) and is_strongly_typical(ctx, [[1]])
        # threshold 0.5: strict inequality fails exactly at the boundary
        assert not is_strongly_typical(TypicalityContext(law([0.5, 0.5]), 1.0, 1), [[0]])

    def test_disjoint_support(self):
        ctx = TypicalityContext(law([1.0, 0.0]), 0.1, 50)
        assert not is_strongly_typical(ctx, [np.ones(50, dtype=int)])

    def test_threshold_uses_full_alphabet(self):
        ctx = TypicalityContext(law(np.full((2, 3), 1 / 6)), 0.6, 10)
        assert ctx.threshold == pytest.approx(0.1)

    @given(st.integers(0, 2 ** 32 - 1))
    def test_matches_literal_definition(self, seed):
        rng = np.random.default_rng(seed)
        m = rng.dirichlet(np.ones(4)).reshape(2, 2)
        n = int(rng.integers(1, 25))
        seqs = [rng.integers(2, size=n) for _ in range(2)]
        eps = float(rng.uniform(0.05, 2.0))
        ctx = TypicalityContext(law(m), eps, n)
        assert is_strongly_typical(ctx, seqs) == naive_typical(m, seqs, eps)

    @given(st.integers(0, 2 ** 32 - 1))
    def test_subset_closure(self, seed):
        rng = np.random.default_rng(seed)
        m = rng.dirichlet(np.ones(8)).reshape(2, 2, 2)
        n = 40
        flat = rng.choice(8, p=m.ravel(), size=n)
        seqs = list(np.unravel_index(flat, m.shape))
        ctx = TypicalityContext(law(m), 1.5, n)
        if is_strongly_typical(ctx, seqs):
            assert is_strongly_typical(ctx, [seqs[0]], ["X"])
            assert is_strongly_typical(ctx, [seqs[2], seqs[1]], ["Z", "Y"])

    def test_variable_mismatch(self):
        ctx = TypicalityContext(law(np.full((2, 2), 0.25)), 0.1, 3)
        with pytest.raises(VariableMismatch):
            is_strongly_typical(ctx, [[0, 1, 0]], ["X", "X"])
        with pytest.raises(VariableMismatch):
            TypTester(ctx).check([0, 1, 0])

    def test_wrong_length(self):
        with pytest.raises(LengthMismatch):
            TypTester(TypicalityContext(law([0.5, 0.5]), 0.1, 3)).check([0, 1])

    def test_bad_context(self):
        with pytest.raises(ValueError):
            TypicalityContext(law([0.5, 0.5]), 0.0, 3)


class TestBounds:
    def test_uniform_exact(self):
        lo, hi = typical_probability_bounds(TypicalityContext(law([0.5, 0.5]), 1e-9, 4))
        assert lo == pytest.approx(2 ** -4) and hi == pytest.approx(2 ** -4)

    def test_deterministic(self):
        lo, hi = typical_probability_bounds(TypicalityContext(law([1.0, 0.0]), 0.1, 7))
        assert lo == pytest.approx(math.exp(-0.7)) and hi == pytest.approx(math.exp(0.7))

    def test_log_form(self):
        ctx = TypicalityContext(law([0.3, 0.7]), 0.1, 5000)
        lo, hi = typical_probability_bounds(ctx, log=True)
        assert math.exp(lo) == typical_probability_bounds(ctx)[0]
        assert lo < hi < 0

    def test_conditional_slack(self):
        ctx = TypicalityContext(law([[0.35, 0.15], [0.1, 0.4]]), 0.2, 10)
        lo, hi = typical_probability_bounds(ctx, ["Y"], ["X"], log=True)
        assert hi - lo == pytest.approx(2 * 10 * 2 * 0.2)

    def test_sequence_probability_oracle(self):
        j = law([[0.35, 0.15], [0.1, 0.4]])
        x, y = [0, 1, 1], [1, 1, 0]
        assert sequence_probability(j, [x, y]) == pytest.approx(0.15 * 0.4 * 0.1)
        cond = sequence_log_probability(j, [y], ["Y"], given=(["X"], [x]))
        assert math.exp(cond) == pytest.approx((0.15 / 0.5) * (0.4 / 0.5) * (0.1 / 0.5))

    def test_sampled_typical_within_bounds(self):
        j = law([0.3, 0.7])
        n = 200
        ctx = TypicalityContext(j, 0.3, n)
        lo, hi = typical_probability_bounds(ctx, log=True)
        rng = np.random.default_rng(0)
        t = TypTester(ctx)
        seqs = rng.choice(2, p=[0.3, 0.7], size=(500, n))
        typ = seqs[t.mask(seqs)]
        assert len(typ) > 0
        for s in typ:
            assert lo <= sequence_log_probability(j, [s]) <= hi


class TestCrossLaw:
    def test_constants(self):
        j = law(np.ones((1, 1, 1)))
        r = cross_law_typicality_rate(j, 0.1, 20, 50, 0)
        assert r.rate == 1.0 and r.hits == 50

    def test_conditionally_independent_base(self):
        pz = np.array([0.4, 0.6])
        px = np.array([[0.2, 0.8], [0.7, 0.3]])
        py = np.array([[0.5, 0.5], [0.9, 0.1]])
        m = np.einsum("z,zx,zy->xyz", pz, px, py)
        n, trials, eps = 300, 3000, 0.3
        r = cross_law_typicality_rate(law(m), eps, n, trials, 1)
        assert r.information == pytest.approx(0, abs=1e-12)
        # the two sampling laws coincide, so compare with direct draws from the base law
        rng = np.random.default_rng(2)
        flat = rng.choice(m.size, p=m.ravel(), size=(trials, n))
        direct = TypTester(TypicalityContext(law(m), eps, n)).mask(flat).mean()
        sd = math.sqrt(2 * direct * (1 - direct) / trials) + 1e-9
        assert 0.05 < direct < 0.95
        assert abs(r.rate - direct) < 4 * sd

    def test_correlated_rate_below_bound(self):
        m = np.zeros((2, 2, 1))
        m[0, 0, 0] = m[1, 1, 0] = 0.45
        m[0, 1, 0] = m[1, 0, 0] = 0.05
        r = cross_law_typicality_rate(law(m), 0.4, 30, 5000, 3)
        assert r.information > 0.3
        assert r.interval[0] <= r.bound

    def test_needs_three(self):
        with pytest.raises(VariableMismatch):
            cross_law_typicality_rate(law(np.full((2, 2), 0.25)), 0.1, 10, 10, 0)


@pytest.mark.parametrize("k,n", [(0, 10), (3, 10), (10, 10), (37, 200), (199, 200)])
def test_wilson_matches_scipy(k, n):
    ci = binomtest(k, n).proportion_ci(0.95, method="wilson")
    lo, hi = wilson_interval(k, n, 0.95)
    assert lo == pytest.approx(ci.low, abs=1e-12) and hi == pytest.approx(ci.high, abs=1e-12)
