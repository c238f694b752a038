import math

import numpy as np
import pytest

from cribmac.channel import MacChannel
from cribmac.coding import CodeParams
from cribmac.region import FactorizedLaw, SearchConfig, search_region
from cribmac.simulator import estimate_error, sweep_n

from conftest import bsc_law, reveal_channel
from test_coding import constant_law, reveal_law


def noisy_xor_channel(p=0.3):
    """Stateless, Y = X1 xor X2 through a BSC(p); sum capacity ln 2 - h(p)."""
    law = np.zeros((2, 2, 1, 2))
    for a in range(2):
        for b in range(2):
            law[a, b, 0] = bsc_law(p)[a ^ b]
    return MacChannel(law, [1.0])


def x2_law(nx1=2):
    """V trivial, X1 fixed, U = X2 uniform, single state."""
    ux2 = np.zeros((1, 1, 2, 2))
    ux2[0, 0, 0, 0] = ux2[0, 0, 1, 1] = 0.5
    x1 = np.zeros((1, nx1))
    x1[0, 0] = 1.0
    return FactorizedLaw("sc", [1.0], x1, pUX2gSV=ux2)


REVEAL = CodeParams(n=1000, B=4, R1=0.004, R2=0.004, Rprime=0, epsilon=0.8)


def test_zero_rates_zero_error():
    c = reveal_channel()
    rep = estimate_error(c, constant_law(), CodeParams(n=30, B=3, R1=0, R2=0, Rprime=0), 20, seed=1)
    assert rep.errors == 0 and rep.message_error_rate == 0


def test_reveal_inside_region_no_errors():
    rep = estimate_error(reveal_channel(), reveal_law(), REVEAL, 30, seed=2)
    assert rep.errors == 0
    assert rep.interval[0] == 0.0


def test_useless_channel_blind_guess():
    c = MacChannel(np.full((2, 2, 2, 2), 0.5), [0.5, 0.5])
    p = CodeParams(n=20, B=2, R1=0, R2=math.log(4) / 20, Rprime=0, epsilon=0.5)
    rep = estimate_error(c, reveal_law(), p, 300, seed=3)
    assert p.M2 == 4
    lo, hi = rep.interval
    assert lo <= 0.75 <= hi


def test_event_coherence():
    c = noisy_xor_channel(0.2)
    p = CodeParams(n=60, B=3, R1=0, R2=0.05, Rprime=0, epsilon=0.6)
    rep = estimate_error(c, x2_law(), p, 60, seed=4)
    assert rep.errors > 0
    assert rep.unattributed == 0


def test_reproducible_and_thread_invariant():
    c = noisy_xor_channel(0.2)
    p = CodeParams(n=40, B=3, R1=0, R2=0.05, Rprime=0, epsilon=0.6)
    a = estimate_error(c, x2_law(), p, 16, seed=5)
    b = estimate_error(c, x2_law(), p, 16, seed=5)
    t = estimate_error(c, x2_law(), p, 16, seed=5, threads=3)
    assert a == b == t


def test_trials_validation():
    with pytest.raises(ValueError):
        estimate_error(reveal_channel(), reveal_law(), REVEAL, 0)


def test_effective_rates_reported():
    rep = estimate_error(reveal_channel(), constant_law(), CodeParams(n=30, B=8, R1=0.05, R2=0.05, Rprime=0,
                                                                       epsilon=5.0), 2, seed=0)
    m1 = math.ceil(math.exp(1.5) * (1 - 1e-12))
    assert rep.effective_rates[0] == pytest.approx(math.log(m1) / 30 * 7 / 8)


class TestSweep:
    def test_single_entry(self):
        r = sweep_n(reveal_channel(), constant_law(), (0, 0), [20], 3, 5)
        assert len(r.entries) == 1 and r.error_rates() == [0.0]

    def test_validation(self):
        with pytest.raises(ValueError):
            sweep_n(reveal_channel(), constant_law(), (0, 0), [40, 20], 3, 5)
        with pytest.raises(ValueError):
            sweep_n(reveal_channel(), constant_law(), (0, 0), [], 3, 5)

    @pytest.mark.slow
    def test_reveal_trend(self):
        r = sweep_n(reveal_channel(), reveal_law(), (0.004, 0.004), [200, 500, 1000], 4, 40,
                    seed=6, epsilon=0.8, Rprime=0)
        rates = r.error_rates()
        # non-increasing up to one binomial standard deviation of slack
        for a, b in zip(rates, rates[1:]):
            assert b <= a + math.sqrt(max(a * (1 - a), 0.01) / 40)
        assert rates[-1] < 0.1

    def test_outside_region_fails(self):
        c = noisy_xor_channel(0.3)
        region = search_region(c, "sc", SearchConfig(samples=20, refine=40, v_size=2, u_size=2))
        r2 = 1.2 * region.max_sum()
        assert r2 == pytest.approx(1.2 * (math.log(2) + 0.3 * math.log(0.3) + 0.7 * math.log(0.7)), rel=1e-3)
        res = sweep_n(c, x2_law(), (0, r2), [50, 100], 3, 30, seed=7, epsilon=0.5, Rprime=0)
        assert res.error_rates()[-1] > 0.5
