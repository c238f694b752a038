import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cribmac.prob import (Alphabet, CondPmf, InconsistentInformation, JointLaw, NegativeMass,
                          NotNormalized, OverlappingSubsets, Pmf, UnknownVariable, binary_entropy,
                          clamp_information, conditional_entropy, entropy, marginalize,
                          mutual_information, product, validate_pmf)

from oracles import hb


def joint(mass, labels=None):
    mass = np.asarray(mass, dtype=float)
    labels = labels or [f"A{i}" for i in range(mass.ndim)]
    return JointLaw([Alphabet(s, lab) for s, lab in zip(mass.shape, labels)], mass)


@st.composite
def laws(draw, max_vars=4, max_size=3):
    k = draw(st.integers(2, max_vars))
    shape = tuple(draw(st.integers(1, max_size)) for _ in range(k))
    w = draw(arrays(float, shape, elements=st.floats(0, 1)))
    w = w + 1e-3 * draw(st.booleans())
    if w.sum() <= 0:
        w = np.ones(shape)
    return joint(w / w.sum())


class TestValidate:
    def test_uniform_ok(self):
        validate_pmf(Pmf(Alphabet(2), np.array([0.5, 0.5])))

    def test_not_normalized_reports_deviation(self):
        with pytest.raises(NotNormalized) as e:
            Pmf(Alphabet(2), np.array([0.7, 0.4]))
        assert e.value.deviation == pytest.approx(0.1)

    def test_negative(self):
        with pytest.raises(NegativeMass):
            Pmf(Alphabet(2), np.array([1.0 + 1e-12, -1e-12]))

    def test_cond_rows(self):
        c = CondPmf((Alphabet(2, "V"),), Alphabet(2, "X"), np.array([[0.2, 0.8], [1.0, 0.0]]))
        assert c.row(0).mass.tolist() == [0.2, 0.8]
        with pytest.raises(NotNormalized):
            CondPmf((Alphabet(2, "V"),), Alphabet(2, "X"), np.array([[0.2, 0.7], [1.0, 0.0]]))

    def test_joint_does_not_freeze_caller_array(self):
        m = np.full((2, 2), 0.25)
        joint(m)
        m[0, 0] = 0.25   # still writable


class TestMarginalize:
    def test_uniform_keep_first(self):
        j = joint(np.full((2, 2), 0.25))
        assert np.allclose(marginalize(j, ["A0"]).mass, [0.5, 0.5])

    def test_product_keep_second(self):
        p, q = Pmf(Alphabet(2, "P"), np.array([0.3, 0.7])), Pmf(Alphabet(3, "Q"), np.array([0.2, 0.3, 0.5]))
        assert np.allclose(marginalize(product(p, q), ["Q"]).mass, q.mass)

    def test_direct_addition(self):
        j = joint([[0.5, 0.25], [0.0, 0.25]])
        assert marginalize(j, [0]).mass.tolist() == [0.75, 0.25]

    def test_order_preserved(self):
        j = joint(np.arange(6).reshape(1, 2, 3) / 15, ["X", "Y", "Z"])
        assert marginalize(j, ["Z", "X"]).labels == ("X", "Z")

    def test_unknown(self):
        with pytest.raises(UnknownVariable):
            marginalize(joint(np.full((2, 2), 0.25)), ["nope"])

    @given(laws())
    def test_projection_consistent(self, j):
        k = len(j.variables)
        inner = marginalize(marginalize(j, range(k - 1)), [0])
        assert np.allclose(inner.mass, marginalize(j, [0]).mass, atol=1e-12)


class TestEntropy:
    def test_uniform_binary(self):
        assert entropy(joint([0.5, 0.5])) == pytest.approx(math.log(2))

    def test_point_mass(self):
        assert entropy(joint([0.0, 1.0, 0.0])) == 0.0

    def test_quarter(self):
        # -(0.25 ln 0.25 + 0.75 ln 0.75), evaluated by hand: 0.562335
        assert entropy(joint([0.25, 0.75])) == pytest.approx(0.562335, abs=1e-6)

    def test_conditional_independent_bits(self):
        assert conditional_entropy(joint(np.full((2, 2), 0.25)), [0], [1]) == pytest.approx(math.log(2))

    def test_conditional_copy(self):
        assert conditional_entropy(joint(np.diag([0.5, 0.5])), [0], [1]) == pytest.approx(0.0, abs=1e-15)

    def test_overlap(self):
        with pytest.raises(OverlappingSubsets):
            conditional_entropy(joint(np.full((2, 2), 0.25)), [0], [0, 1])

    @given(laws())
    def test_chain_rule(self, j):
        h_ab = entropy(j, [0, 1])
        assert h_ab == pytest.approx(entropy(j, [0]) + conditional_entropy(j, [1], [0]), abs=1e-10)

    @given(laws())
    def test_chain_two_ways(self, j):
        # direct conditional sum  -sum p(a,b) ln p(b|a)  vs  subtraction of joints
        m = marginalize(j, [0, 1]).mass
        pa = m.sum(axis=1, keepdims=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            direct = -np.nansum(np.where(m > 0, m * np.log(m / pa), 0.0))
        assert conditional_entropy(j, [1], [0]) == pytest.approx(direct, abs=1e-12)

    @given(laws())
    def test_bounds(self, j):
        for i, a in enumerate(j.variables):
            h = entropy(j, [i])
            assert -1e-15 <= h <= math.log(a.size) + 1e-12


class TestMutualInformation:
    def test_independent(self):
        assert mutual_information(joint(np.outer([0.3, 0.7], [0.6, 0.4])), [0], [1]) == pytest.approx(0, abs=1e-15)

    def test_copy(self):
        assert mutual_information(joint(np.diag([0.5, 0.5])), [0], [1]) == pytest.approx(math.log(2))

    def test_bsc(self):
        j = joint(0.5 * np.array([[0.9, 0.1], [0.1, 0.9]]))
        assert mutual_information(j, [0], [1]) == pytest.approx(math.log(2) - hb(0.1), abs=1e-12)
        assert math.log(2) - binary_entropy(0.1) == pytest.approx(0.368064, abs=1e-6)

    @given(laws(max_vars=3))
    def test_symmetry(self, j):
        given_ = [2] if len(j.variables) > 2 else []
        assert mutual_information(j, [0], [1], given_) == pytest.approx(
            mutual_information(j, [1], [0], given_), abs=1e-10)

    @given(laws(max_vars=3))
    def test_nonnegative(self, j):
        given_ = [2] if len(j.variables) > 2 else []
        assert mutual_information(j, [0], [1], given_) >= 0

    def test_clamp(self):
        assert clamp_information(-5e-13) == 0.0
        with pytest.raises(InconsistentInformation):
            clamp_information(-1e-9)
