import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from cribmac.channel import MacChannel, deterministic_channel

settings.register_profile("repo", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


def bsc_law(p):
    return np.array([[1 - p, p], [p, 1 - p]])


def gp_channel(flip=0.1):
    """|X1| = 1, Y = X2 xor S through a BSC(flip), uniform state."""
    law = np.zeros((1, 2, 2, 2))
    for b in range(2):
        for s in range(2):
            law[0, b, s] = bsc_law(flip)[b ^ s]
    return MacChannel(law, [0.5, 0.5])


def reveal_channel():
    """Y = (X1, X2 xor S) as the symbol 2*x1 + (x2 xor s); uniform binary state."""
    return deterministic_channel(lambda a, b, s: 2 * a + (b ^ s), 2, 2, 2, 4, [0.5, 0.5])


def adder_channel():
    """Stateless binary adder MAC, Y = X1 + X2."""
    return deterministic_channel(lambda a, b, s: a + b, 2, 2, 1, 3, [1.0])


def random_binary_channel(seed):
    rng = np.random.default_rng(seed)
    law = rng.dirichlet(np.ones(2), size=(2, 2, 2))
    state = rng.dirichlet(np.ones(2))
    return MacChannel(law, state)


def binary_test_channel():
    """The fixed all-binary channel used for the cardinality spot check."""
    return random_binary_channel(7)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
