"""Block-Markov superposition coding with state-dependent binning at the
cribbing encoder and backward decoding at the receiver.

Indices are 0-based throughout; index 0 plays the role of the fixed
"message 1" used in the first and last blocks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .channel import MacChannel, child_seed, make_rng, sample_iid, sample_states, transmit
from .prob import Alphabet, JointLaw, clamp_information, mutual_information
from .region import FactorizedLaw, Mode, assemble_joint
from .typicality import Tester, TypicalityContext

DEFAULT_BUDGET = 2 * 1024 ** 3
_CHUNK = 1 << 22


class OutOfMemoryBudget(MemoryError):
    def __init__(self, required: float, budget: int):
        super().__init__(f"codebook needs {required:.4g} bytes, budget is {budget} bytes")
        self.required = required
        self.budget = budget


class ModeMismatch(ValueError):
    pass


def message_count(n: int, rate: float) -> int:
    """``ceil(e^{nR})``, computed so that ``R = ln(M)/n`` maps back to ``M``."""
    if rate < 0:
        raise ValueError("rates must be non-negative")
    x = n * rate
    if x > 700:
        return math.inf
    return max(1, math.ceil(math.exp(x) * (1 - 1e-12)))


@dataclass(frozen=True)
class CodeParams:
    n: int
    B: int
    R1: float
    R2: float
    Rprime: float | None = None      # None: I(U;S|V) + 3ε from the law
    epsilon: float = 0.1
    mode: Mode = Mode.STRICTLY_CAUSAL
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode.parse(self.mode))
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.B < 2:
            raise ValueError("B must be >= 2")
        if min(self.R1, self.R2) < 0 or (self.Rprime is not None and self.Rprime < 0):
            raise ValueError("rates must be non-negative")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")

    @property
    def M1(self) -> int:
        return message_count(self.n, self.R1)

    @property
    def M2(self) -> int:
        return message_count(self.n, self.R2)

    @property
    def Mprime(self) -> int:
        if self.Rprime is None:
            raise ValueError("Rprime unresolved; call resolve_params first")
        return message_count(self.n, self.Rprime)

    def required_bytes(self) -> float:
        m1, m2, mp = self.M1, self.M2, self.Mprime
        return float(self.n) * (m1 + float(m1) * m1 + float(m2) * mp * m1)

    def effective_rates(self) -> tuple:
        scale = (self.B - 1) / self.B
        return (math.log(self.M1) / self.n * scale, math.log(self.M2) / self.n * scale)


@dataclass(frozen=True)
class SchemeLaws:
    """The per-letter laws the encoders and decoders test against."""

    joint: JointLaw            # (V, S, U, X1, X2, Y)
    enc: JointLaw              # (V, U, S)
    crib: JointLaw             # (V, X1, X1')
    rx: JointLaw               # (V, X1, U, Y)
    vux1: JointLaw             # (V, U, X1)
    pU_V: np.ndarray
    pX2: np.ndarray            # x2 | (v, s, u, x1) as (V, S, U, X1, X2)
    info_us_v: float


def scheme_laws(c: MacChannel, f: FactorizedLaw) -> SchemeLaws:
    j = assemble_joint(c, f)
    q = j.mass
    nv, ns, nu, nx1, nx2, ny = q.shape

    def law(mass, labels):
        return JointLaw([Alphabet(s, lab) for s, lab in zip(mass.shape, labels)], mass)

    vsu = q.sum(axis=(3, 4, 5))
    enc = law(vsu.transpose(0, 2, 1), ("V", "U", "S"))
    vx1 = q.sum(axis=(1, 2, 4, 5))
    crib = np.zeros((nv, nx1, nx1))
    crib[:, np.arange(nx1), np.arange(nx1)] = vx1
    rx = law(q.sum(axis=(1, 4)).transpose(0, 2, 1, 3), ("V", "X1", "U", "Y"))
    vux1 = law(q.sum(axis=(1, 4, 5)), ("V", "U", "X1"))
    pu_v = f.marginal_u_given_v(c.state)
    if f.mode is Mode.STRICTLY_CAUSAL:
        with np.errstate(invalid="ignore", divide="ignore"):
            pu = f.pUX2gSV.sum(axis=3, keepdims=True)
            cond = np.where(pu > 0, f.pUX2gSV / pu, 1.0 / nx2)      # (S, V, U, X2)
        px2 = np.broadcast_to(cond.transpose(1, 0, 2, 3)[:, :, :, None, :],
                              (nv, ns, nu, nx1, nx2)).copy()
    else:
        px2 = f.pX2gVUSX1.transpose(0, 2, 1, 3, 4).copy()
    info = clamp_information(mutual_information(enc, ["U"], ["S"], ["V"]))
    return SchemeLaws(j, enc, law(crib, ("V", "X1", "X1'")), rx, vux1, pu_v, px2, info)


def resolve_params(c: MacChannel, f: FactorizedLaw, p: CodeParams, laws: SchemeLaws | None = None) -> CodeParams:
    if f.mode is not p.mode:
        raise ModeMismatch(f"law is {f.mode.value}, parameters ask for {p.mode.value}")
    if p.Rprime is not None:
        return p
    laws = laws or scheme_laws(c, f)
    return replace(p, Rprime=laws.info_us_v + 3 * p.epsilon)


def _draw(table: np.ndarray, cond: np.ndarray, rng) -> np.ndarray:
    """Inverse-CDF draw per entry of ``cond`` without materializing row copies."""
    cdf = np.cumsum(table, axis=1)
    cdf[:, -1] = 1.0
    u = rng.random(cond.shape)
    out = np.zeros(cond.shape, dtype=np.uint8)
    for k in range(table.shape[1] - 1):
        out += u >= cdf[cond, k]
    return out


@dataclass(eq=False)
class Codebook:
    v: np.ndarray            # (M1, n)            v[ω0]
    x1: np.ndarray           # (M1, M1, n)        x1[i, ω0]
    u: np.ndarray            # (M2, M', M1, n)    u[j, ȷ, ω0]
    law: FactorizedLaw
    params: CodeParams
    laws: SchemeLaws

    @property
    def nbytes(self) -> int:
        return self.v.nbytes + self.x1.nbytes + self.u.nbytes


def generate_codebook(c: MacChannel, f: FactorizedLaw, p: CodeParams, rng,
                      laws: SchemeLaws | None = None) -> Codebook:
    """Draw the v, x1 and binned u tables.

    ``rng`` is a seed or SeedSequence; each ω0 column uses its own child
    stream so tables are reproducible regardless of evaluation order.
    """
    laws = laws or scheme_laws(c, f)
    p = resolve_params(c, f, p, laws)
    m1, m2, mp = p.M1, p.M2, p.Mprime
    need = p.required_bytes()
    if not math.isfinite(need) or need > p.budget:
        raise OutOfMemoryBudget(need, p.budget)
    if max(f.v_size, f.u_size, *c.sizes) > 255:
        raise ValueError("alphabets above 255 symbols are not supported by the uint8 tables")
    seed = _seed_of(rng)
    n = p.n
    v = np.empty((m1, n), dtype=np.uint8)
    x1 = np.empty((m1, m1, n), dtype=np.uint8)
    u = np.empty((m2, mp, m1, n), dtype=np.uint8)
    for w0 in range(m1):
        g = make_rng(child_seed(seed, 0, w0))
        v[w0] = sample_iid(f.pV, (n,), g)
        vw = v[w0].astype(np.int64)
        x1[:, w0] = _draw(f.pX1gV, np.broadcast_to(vw, (m1, n)), g)
        u[:, :, w0] = _draw(laws.pU_V, np.broadcast_to(vw, (m2, mp, n)), g)
    return Codebook(v, x1, u, f, p, laws)


def _seed_of(rng) -> np.random.SeedSequence:
    if isinstance(rng, np.random.SeedSequence):
        return rng
    if isinstance(rng, np.random.Generator):
        return np.random.SeedSequence(int(rng.integers(2 ** 63)))
    return np.random.SeedSequence(int(rng))


class _Testers:
    """Typicality testers with nested slack: encoder ε/2, decoders ε."""

    def __init__(self, laws: SchemeLaws, n: int, eps: float):
        self.enc = Tester(TypicalityContext(laws.enc, eps / 2, n))
        self.enc_s = Tester(TypicalityContext(laws.enc, eps / 2, n), ["S"])
        self.crib = Tester(TypicalityContext(laws.crib, eps, n))
        self.rx = Tester(TypicalityContext(laws.rx, eps, n))
        self.vux1 = Tester(TypicalityContext(laws.vux1, eps, n))


def _testers(cb: Codebook, eps: float | None) -> _Testers:
    eps = cb.params.epsilon if eps is None else eps
    cache = cb.__dict__.setdefault("_testers", {})
    if eps not in cache:
        cache[eps] = _Testers(cb.laws, cb.params.n, eps)
    return cache[eps]


def gp_bin_search(cb: Codebook, w2: int, w0: int, s, eps: float | None = None) -> tuple:
    """Lowest bin index ȷ0 making (v(ω0), u(w2, ȷ0, ω0), s) typical.

    Returns ``(ȷ0, encoder_error)``; on failure, or when s itself is not
    typical, ``(0, True)``.
    """
    t = _testers(cb, eps)
    s = np.asarray(getattr(s, "symbols", s), dtype=np.int64)
    if not t.enc_s.mask(s[None, :])[0]:
        return 0, True
    codes = t.enc.encode(cb.v[w0][None, :], cb.u[w2, :, w0], s[None, :])
    hit = np.flatnonzero(t.enc.mask(codes, first_only=True))
    if hit.size == 0:
        return 0, True
    return int(hit[0]), False


def make_x2(cb_or_law, s, u, v, x1=None, rng=None) -> np.ndarray:
    """Per-letter draw of x2 given (v, s, u) and, in causal mode, the current x1."""
    if isinstance(cb_or_law, Codebook):
        f, px2 = cb_or_law.law, cb_or_law.laws.pX2
    else:
        f = cb_or_law
        px2 = None
    if f.mode is Mode.STRICTLY_CAUSAL and x1 is not None:
        raise ModeMismatch("strictly causal encoding cannot see the current x1")
    if f.mode is Mode.CAUSAL and x1 is None:
        raise ModeMismatch("causal encoding needs the current x1 block")
    if px2 is None:
        if f.mode is Mode.STRICTLY_CAUSAL:
            with np.errstate(invalid="ignore", divide="ignore"):
                pu = f.pUX2gSV.sum(axis=3, keepdims=True)
                cond = np.where(pu > 0, f.pUX2gSV / pu, 1.0 / f.pUX2gSV.shape[3])
            px2 = cond.transpose(1, 0, 2, 3)[:, :, :, None, :]
        else:
            px2 = f.pX2gVUSX1.transpose(0, 2, 1, 3, 4)
    s, u, v = (np.asarray(getattr(a, "symbols", a), dtype=np.int64) for a in (s, u, v))
    if not (s.shape == u.shape == v.shape):
        raise ValueError("conditioning sequences must share one length")
    a = np.zeros_like(s) if x1 is None else np.asarray(getattr(x1, "symbols", x1), dtype=np.int64)
    nv, ns, nu, nx1, nx2 = px2.shape
    table = px2.reshape(-1, nx2)
    cond = ((v * ns + s) * nu + u) * nx1 + (a if nx1 > 1 else 0)
    return _draw(table, cond, make_rng(rng)).astype(np.int64)


def _pick(matches: np.ndarray, total: int, rng) -> tuple:
    """Unique match, else a random choice (among matches if several, else among all)."""
    if matches.size == 1:
        return int(matches[0]), False
    pool = matches if matches.size > 1 else np.arange(total)
    return int(pool[rng.integers(pool.size)]), True


def crib_decode(cb: Codebook, w0_prev: int, x1_obs, eps: float | None = None, rng=None) -> tuple:
    """Encoder 2's estimate of Encoder 1's current message from the observed x1 block.

    Returns ``(estimate, ambiguous)``.
    """
    t = _testers(cb, eps)
    x1_obs = np.asarray(getattr(x1_obs, "symbols", x1_obs), dtype=np.int64)
    codes = t.crib.encode(cb.v[w0_prev][None, :], cb.x1[:, w0_prev], x1_obs[None, :])
    matches = np.flatnonzero(t.crib.mask(codes))
    return _pick(matches, cb.x1.shape[0], make_rng(rng))


def _rx_mask(cb: Codebook, t: _Testers, y: np.ndarray, w1_known: int, js, w0s) -> np.ndarray:
    """(len(js), len(w0s)) flags: does some ȷ make (v, x1, u, y) typical."""
    n = cb.params.n
    mp = cb.u.shape[1]
    js = np.asarray(js)
    out = np.zeros((js.size, len(w0s)), dtype=bool)
    per = max(1, _CHUNK // max(1, js.size * mp * n))
    for lo in range(0, len(w0s), per):
        cols = np.asarray(w0s[lo:lo + per])
        v = cb.v[cols].astype(np.int64)                       # (k, n)
        x1 = cb.x1[w1_known, cols].astype(np.int64)           # (k, n)
        u = cb.u[js][:, :, cols].astype(np.int64)             # (J, M', k, n)
        codes = t.rx.encode(v[None, None], x1[None, None], u, y[None, None, None, :])
        out[:, lo:lo + cols.size] = t.rx.mask(codes).any(axis=1)
    return out


@dataclass
class DecodeResult:
    w1: np.ndarray                 # (B-1,) estimates
    w2: np.ndarray                 # (B-1,)
    ambiguous: list                # per block
    events: list = field(default_factory=list)   # per block {E3, E4, E5} when truth is given


def backward_decode(cb: Codebook, y_blocks, eps: float | None = None, rng=None, truth=None) -> DecodeResult:
    """Decode from the last block downward.

    ``truth`` (optional) is ``(w1_all, w2_all)`` over all B blocks, including
    the fixed last-block entries; with it the per-block E3/E4/E5 flags are
    recorded.
    """
    t = _testers(cb, eps)
    rng = make_rng(rng if rng is not None else 0)
    y_blocks = np.asarray(y_blocks, dtype=np.int64)
    B = y_blocks.shape[0]
    m1, m2 = cb.x1.shape[0], cb.u.shape[0]
    w1_hat = np.zeros(B, dtype=np.int64)      # w1_hat[b]: message of block b (last is fixed 0)
    w2_hat = np.zeros(B, dtype=np.int64)
    amb = [False] * B
    events = [None] * B
    all_w0 = list(range(m1))
    for b in range(B - 1, -1, -1):
        js = [0] if b == B - 1 else list(range(m2))
        w0s = [0] if b == 0 else all_w0
        mask = _rx_mask(cb, t, y_blocks[b], int(w1_hat[b]), js, w0s)
        flat, amb[b] = _pick(np.flatnonzero(mask.ravel()), mask.size, rng)
        ji, wi = divmod(flat, len(w0s))
        w2_hat[b] = js[ji]
        if b > 0:
            w1_hat[b - 1] = w0s[wi]
        if truth is not None:
            tw1, tw2 = truth
            w0_true = 0 if b == 0 else int(tw1[b - 1])
            if w1_hat[b] != tw1[b]:
                events[b] = {"E3": False, "E4": False, "E5": False}  # blamed on a later block
                continue
            jt = js.index(int(tw2[b]))
            wt = w0s.index(w0_true)
            other_w0 = np.delete(mask, wt, axis=1)
            other_j = np.delete(mask[:, wt], jt)
            events[b] = {"E3": not mask[jt, wt], "E4": bool(other_w0.any()),
                         "E5": bool(other_j.any())}
    return DecodeResult(w1_hat[:-1].copy(), w2_hat[:-1].copy(), amb, events)


@dataclass
class BlockRecord:
    w1: int
    w2: int
    w0: int                 # Encoder 1's cloud centre (true previous w1)
    w0_enc2: int            # Encoder 2's cribbed version of it
    s: np.ndarray
    x1: np.ndarray
    u_index: int            # ȷ0
    x2: np.ndarray
    y: np.ndarray
    crib_estimate: int | None
    encoder_error: bool
    events: dict


@dataclass
class SessionTranscript:
    params: CodeParams
    blocks: list
    w1_sent: np.ndarray
    w2_sent: np.ndarray
    w1_hat: np.ndarray
    w2_hat: np.ndarray

    @property
    def success(self) -> bool:
        return bool(np.array_equal(self.w1_sent, self.w1_hat) and np.array_equal(self.w2_sent, self.w2_hat))

    @property
    def effective_rates(self) -> tuple:
        return self.params.effective_rates()

    def event_flags(self) -> dict:
        keys = ("E0", "E1", "E2", "E3", "E4", "E5")
        return {k: any(b.events.get(k, False) for b in self.blocks) for k in keys}

    @property
    def crib_error(self) -> bool:
        return any(b.crib_estimate is not None and b.crib_estimate != b.w1 for b in self.blocks)

    @property
    def encoder_error(self) -> bool:
        return any(b.encoder_error for b in self.blocks)


def run_session(c: MacChannel, cb: Codebook, messages, rng) -> SessionTranscript:
    """Transmit B-1 message pairs over B blocks and decode them backward."""
    p = cb.params
    f = cb.law
    w1_msgs, w2_msgs = (np.asarray(m, dtype=np.int64) for m in messages)
    if w1_msgs.shape != (p.B - 1,) or w2_msgs.shape != (p.B - 1,):
        raise ValueError(f"need {p.B - 1} message pairs")
    m1, m2 = cb.x1.shape[0], cb.u.shape[0]
    if w1_msgs.size and (w1_msgs.min() < 0 or w1_msgs.max() >= m1 or w2_msgs.min() < 0 or w2_msgs.max() >= m2):
        raise ValueError("message index out of range")
    rng = make_rng(rng)
    t = _testers(cb, None)
    w1_all = np.append(w1_msgs, 0)
    w2_all = np.append(w2_msgs, 0)
    blocks = []
    w0_enc2 = 0
    for b in range(p.B):
        w1, w2 = int(w1_all[b]), int(w2_all[b])
        w0 = 0 if b == 0 else int(w1_all[b - 1])
        s = sample_states(c, p.n, rng).symbols
        x1 = cb.x1[w1, w0].astype(np.int64)
        j0, enc_err = gp_bin_search(cb, w2, w0_enc2, s)
        u = cb.u[w2, j0, w0_enc2].astype(np.int64)
        v = cb.v[w0_enc2].astype(np.int64)
        x2 = make_x2(cb, s, u, v, x1 if f.mode is Mode.CAUSAL else None, rng)
        y = transmit(c, x1, x2, s, rng).symbols
        e0 = not t.vux1.mask(t.vux1.encode(v, u, x1)[None, :])[0]
        crib = None
        if b < p.B - 1:
            crib, _ = crib_decode(cb, w0_enc2, x1, rng=rng)
        blocks.append(BlockRecord(w1, w2, w0, w0_enc2, s, x1, j0, x2, y, crib, enc_err,
                                  {"E0": e0, "E1": crib is not None and crib != w1, "E2": enc_err}))
        if crib is not None:
            w0_enc2 = crib
    dec = backward_decode(cb, np.stack([blk.y for blk in blocks]), rng=rng, truth=(w1_all, w2_all))
    for blk, ev in zip(blocks, dec.events):
        blk.events.update(ev or {})
    return SessionTranscript(p, blocks, w1_msgs, w2_msgs, dec.w1, dec.w2)


__all__ = [
    "CodeParams", "Codebook", "SchemeLaws", "SessionTranscript", "BlockRecord", "DecodeResult",
    "OutOfMemoryBudget", "ModeMismatch", "DEFAULT_BUDGET", "message_count", "scheme_laws",
    "resolve_params", "generate_codebook", "gp_bin_search", "make_x2", "crib_decode",
    "backward_decode", "run_session",
]
