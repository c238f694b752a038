"""Discrete memoryless state-dependent MAC and per-letter sampling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .prob import Alphabet, NORM_TOL, ProbabilityError, check_rows


class ChannelError(ValueError):
    pass


class BadRow(ChannelError):
    def __init__(self, x1: int, x2: int, s: int, detail: str = ""):
        super().__init__(f"law row (x1={x1}, x2={x2}, s={s}) is not a pmf {detail}".rstrip())
        self.index = (x1, x2, s)


class BadStatePmf(ChannelError):
    pass


class LengthMismatch(ChannelError):
    pass


class AlphabetMismatch(ChannelError):
    pass


def make_rng(seed) -> np.random.Generator:
    """Counter-based generator; ``seed`` may be an int or a SeedSequence."""
    if isinstance(seed, np.random.Generator):
        return seed
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(seed))


def child_seed(seed, *key: int) -> np.random.SeedSequence:
    """Deterministic sub-stream addressed by an integer path.

    Addressing by index (rather than spawning sequentially) keeps stream ``i``
    identical no matter how many siblings exist, which the prefix-stable
    search and the trial partitioning rely on.
    """
    if isinstance(seed, np.random.SeedSequence):
        return np.random.SeedSequence(seed.entropy, spawn_key=tuple(seed.spawn_key) + tuple(key))
    return np.random.SeedSequence(int(seed), spawn_key=tuple(key))


@dataclass(frozen=True)
class SymbolSeq:
    alphabet: Alphabet
    symbols: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.symbols)
        if s.ndim != 1:
            raise ValueError("symbol sequence must be one-dimensional")
        if s.size and (s.min() < 0 or s.max() >= self.alphabet.size):
            raise AlphabetMismatch(f"symbol out of range for {self.alphabet}")
        object.__setattr__(self, "symbols", s.astype(np.int64, copy=False))

    def __len__(self):
        return int(self.symbols.shape[0])


def sample_rows(table: np.ndarray, cond: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Inverse-CDF draw from ``table[cond[k], :]`` independently for each k.

    ``table`` is (n_conditions, n_symbols); ``cond`` holds flat condition
    indices of any shape.
    """
    cdf = np.cumsum(table, axis=-1)
    cdf[:, -1] = 1.0
    u = rng.random(cond.shape)
    rows = cdf[cond]
    out = (u[..., None] >= rows).sum(axis=-1)
    return np.minimum(out, table.shape[-1] - 1)


def sample_iid(p: np.ndarray, shape, rng: np.random.Generator) -> np.ndarray:
    return sample_rows(np.asarray(p, dtype=float)[None, :], np.zeros(shape, dtype=np.int64), rng)


class MacChannel:
    """Channel law ``law[x1, x2, s, y] = p(y | x1, x2, s)`` plus state law ``state[s]``."""

    def __init__(self, law, state, *, validate: bool = True):
        law = np.array(law, dtype=float)
        if law.ndim != 4:
            raise ChannelError(f"law must be indexed [x1][x2][s][y], got ndim={law.ndim}")
        self.law = law
        self.state = np.array(state, dtype=float)
        nx1, nx2, ns, ny = law.shape
        self.x1 = Alphabet(nx1, "X1")
        self.x2 = Alphabet(nx2, "X2")
        self.s = Alphabet(ns, "S")
        self.y = Alphabet(ny, "Y")
        if validate:
            validate_channel(self)
        self.law.setflags(write=False)
        self.state.setflags(write=False)

    @property
    def sizes(self) -> tuple:
        return self.x1.size, self.x2.size, self.s.size, self.y.size

    def cardinality_bounds(self) -> tuple:
        """(|V| bound, |U| bound given that |V|) from the auxiliary cardinality counts."""
        base = self.x1.size * self.x2.size * self.s.size
        v = base + 5
        return v, base * v + 2

    def __repr__(self):
        return "MacChannel(|X1|={}, |X2|={}, |S|={}, |Y|={})".format(*self.sizes)


def validate_channel(c: MacChannel) -> None:
    if c.state.shape != (c.s.size,):
        raise BadStatePmf(f"state pmf needs {c.s.size} entries, got {c.state.shape}")
    if np.any(c.state < 0) or abs(c.state.sum() - 1.0) > NORM_TOL:
        raise BadStatePmf(f"state pmf {c.state.tolist()} is not a probability vector")
    law = c.law
    dev = np.abs(law.sum(axis=-1) - 1.0)
    neg = (law < 0).any(axis=-1)
    bad = np.argwhere((dev > NORM_TOL) | neg)
    if bad.size:
        x1, x2, s = (int(i) for i in bad[0])
        raise BadRow(x1, x2, s, f"(sum={law[x1, x2, s].sum():.6g})")


def sample_states(c: MacChannel, n: int, rng) -> SymbolSeq:
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = make_rng(rng)
    return SymbolSeq(c.s, sample_iid(c.state, (n,), rng))


def _symbols(seq) -> np.ndarray:
    return seq.symbols if isinstance(seq, SymbolSeq) else np.asarray(seq, dtype=np.int64)


def transmit(c: MacChannel, x1, x2, s, rng) -> SymbolSeq:
    """Pass equal-length input/state sequences through the memoryless law."""
    for seq, alph in ((x1, c.x1), (x2, c.x2), (s, c.s)):
        if isinstance(seq, SymbolSeq) and seq.alphabet.size != alph.size:
            raise AlphabetMismatch(f"{seq.alphabet} does not match channel alphabet {alph}")
    a, b, st = _symbols(x1), _symbols(x2), _symbols(s)
    if not (a.shape == b.shape == st.shape):
        raise LengthMismatch(f"lengths {a.shape}, {b.shape}, {st.shape} differ")
    for arr, alph in ((a, c.x1), (b, c.x2), (st, c.s)):
        if arr.size and (arr.min() < 0 or arr.max() >= alph.size):
            raise AlphabetMismatch(f"symbol out of range for {alph}")
    nx1, nx2, ns, ny = c.sizes
    cond = (a * nx2 + b) * ns + st
    y = sample_rows(c.law.reshape(-1, ny), cond, make_rng(rng))
    return SymbolSeq(c.y, y)


def canonical_form(c: MacChannel) -> dict:
    """Normalized JSON-ready description (rows renormalized to sum exactly to 1)."""
    law = c.law / c.law.sum(axis=-1, keepdims=True)
    state = c.state / c.state.sum()
    return {
        "sizes": {"x1": c.x1.size, "x2": c.x2.size, "s": c.s.size, "y": c.y.size},
        "state": state.tolist(),
        "law": law.tolist(),
    }


def channel_from_dict(d: dict) -> MacChannel:
    try:
        law = np.array(d["law"], dtype=float)
        state = np.array(d.get("state", [1.0]), dtype=float)
    except KeyError as exc:
        raise ChannelError(f"channel description lacks {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise ChannelError(f"channel law is not a rectangular numeric array: {exc}") from None
    sizes = d.get("sizes")
    if sizes is not None:
        want = tuple(int(sizes[k]) for k in ("x1", "x2", "s", "y"))
        if law.shape != want:
            raise ChannelError(f"law shape {law.shape} disagrees with declared sizes {want}")
    try:
        return MacChannel(law, state)
    except ProbabilityError as exc:
        raise ChannelError(str(exc)) from None


def deterministic_channel(fn, nx1: int, nx2: int, ns: int, ny: int, state) -> MacChannel:
    """Channel with ``y = fn(x1, x2, s)``."""
    law = np.zeros((nx1, nx2, ns, ny))
    for a in range(nx1):
        for b in range(nx2):
            for s in range(ns):
                law[a, b, s, fn(a, b, s)] = 1.0
    return MacChannel(law, state)


__all__ = [
    "MacChannel", "SymbolSeq", "ChannelError", "BadRow", "BadStatePmf", "LengthMismatch",
    "AlphabetMismatch", "validate_channel", "sample_states", "transmit", "make_rng",
    "child_seed", "sample_rows", "sample_iid", "canonical_form", "channel_from_dict",
    "deterministic_channel", "check_rows",
]
