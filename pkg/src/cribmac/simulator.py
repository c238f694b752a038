"""Monte Carlo estimates of session error rates, with error-event attribution."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .channel import MacChannel, child_seed, make_rng
from .coding import CodeParams, generate_codebook, resolve_params, run_session, scheme_laws
from .region import FactorizedLaw
from .typicality import wilson_interval

EVENTS = ("E0", "E1", "E2", "E3", "E4", "E5")


@dataclass(frozen=True)
class TrialReport:
    params: CodeParams
    trials: int
    errors: int
    encoder_errors: int
    crib_errors: int
    unattributed: int              # failed sessions with no recorded event
    event_counts: dict

    @property
    def message_error_rate(self) -> float:
        return self.errors / self.trials

    @property
    def interval(self) -> tuple:
        return wilson_interval(self.errors, self.trials, 0.95)

    @property
    def encoder_error_rate(self) -> float:
        return self.encoder_errors / self.trials

    @property
    def crib_error_rate(self) -> float:
        return self.crib_errors / self.trials

    @property
    def effective_rates(self) -> tuple:
        return self.params.effective_rates()


def _counts(c, f, p, laws, seed, indices) -> np.ndarray:
    # columns: errors, encoder errors, crib errors, unattributed, E0..E5
    acc = np.zeros(4 + len(EVENTS), dtype=np.int64)
    for k in indices:
        cb = generate_codebook(c, f, p, child_seed(seed, k, 0), laws)
        rng = make_rng(child_seed(seed, k, 1))
        m1, m2 = cb.x1.shape[0], cb.u.shape[0]
        msgs = (rng.integers(m1, size=p.B - 1), rng.integers(m2, size=p.B - 1))
        tr = run_session(c, cb, msgs, rng)
        flags = tr.event_flags()
        failed = not tr.success
        acc[0] += failed
        acc[1] += tr.encoder_error
        acc[2] += tr.crib_error
        acc[3] += failed and not any(flags.values())
        acc[4:] += [flags[e] for e in EVENTS]
    return acc


def _counts_job(args):
    return _counts(*args)


def estimate_error(c: MacChannel, f: FactorizedLaw, p: CodeParams, trials: int, seed=0,
                   threads: int = 1) -> TrialReport:
    """Run ``trials`` independent sessions, each with a freshly drawn codebook.

    Trial ``k`` owns the streams ``(seed, k, ·)``, so results do not depend on
    how trials are split across worker processes.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    laws = scheme_laws(c, f)
    p = resolve_params(c, f, p, laws)
    seed = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(int(seed))
    idx = list(range(trials))
    if threads > 1 and trials > 1:
        parts = [idx[i::threads] for i in range(threads)]
        with ProcessPoolExecutor(threads) as pool:
            acc = sum(pool.map(_counts_job, [(c, f, p, laws, seed, part) for part in parts]))
    else:
        acc = _counts(c, f, p, laws, seed, idx)
    return TrialReport(p, trials, int(acc[0]), int(acc[1]), int(acc[2]), int(acc[3]),
                       {e: int(x) for e, x in zip(EVENTS, acc[4:])})


@dataclass(frozen=True)
class SweepResult:
    rates: tuple
    law_id: str
    entries: list                  # [(n, TrialReport)]

    def error_rates(self) -> list:
        return [r.message_error_rate for _, r in self.entries]


def sweep_n(c: MacChannel, f: FactorizedLaw, rates, n_list, B: int, trials: int, seed=0, *,
            epsilon: float = 0.1, Rprime: float | None = None, threads: int = 1,
            law_id: str = "") -> SweepResult:
    n_list = [int(n) for n in n_list]
    if not n_list or any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be nonempty and strictly increasing")
    base = CodeParams(n=n_list[0], B=B, R1=rates[0], R2=rates[1], Rprime=Rprime,
                      epsilon=epsilon, mode=f.mode)
    entries = []
    for i, n in enumerate(n_list):
        rep = estimate_error(c, f, replace(base, n=n), trials, child_seed(seed, i), threads)
        entries.append((n, rep))
    return SweepResult(tuple(rates), law_id, entries)


__all__ = ["EVENTS", "TrialReport", "SweepResult", "estimate_error", "sweep_n"]
