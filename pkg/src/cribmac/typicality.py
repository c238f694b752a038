"""Strong typicality over collections of finite-alphabet sequences.

A sequence tuple is ε-strongly typical for a context when, for every nonempty
subset of its variables and every symbol tuple of that subset,

    |N(tuple)/n - P(tuple)| < ε / (product of ALL alphabet sizes in the context).

The single denominator is shared by every subset.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from . import kernels
from .channel import LengthMismatch, SymbolSeq, make_rng, sample_rows
from .prob import JointLaw, conditional_entropy, marginal_mass, mutual_information


class VariableMismatch(ValueError):
    pass


@dataclass(frozen=True)
class TypicalityContext:
    joint: JointLaw
    epsilon: float
    n: int

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if int(self.n) < 1:
            raise ValueError("n must be >= 1")

    @property
    def threshold(self) -> float:
        return self.epsilon / math.prod(self.joint.shape)


@dataclass(frozen=True)
class EmpiricalType:
    counts: np.ndarray
    n: int

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / self.n


def _as_array(seq) -> np.ndarray:
    return seq.symbols if isinstance(seq, SymbolSeq) else np.asarray(seq, dtype=np.int64)


def empirical_type(seqs, sizes=None) -> EmpiricalType:
    arrs = [_as_array(s) for s in seqs]
    if not arrs:
        raise VariableMismatch("need at least one sequence")
    lengths = {a.shape for a in arrs}
    if len(lengths) != 1:
        raise LengthMismatch(f"sequence lengths differ: {sorted(a.shape[0] for a in arrs)}")
    if sizes is None:
        sizes = tuple(s.alphabet.size if isinstance(s, SymbolSeq) else int(a.max(initial=0)) + 1
                      for s, a in zip(seqs, arrs))
    flat = np.ravel_multi_index(tuple(arrs), sizes)
    counts = np.bincount(flat, minlength=math.prod(sizes)).reshape(sizes)
    return EmpiricalType(counts, int(arrs[0].shape[0]))


class Tester:
    """Precomputed subset projections for repeated typicality checks.

    ``variables`` picks (by label or axis) which context variables the
    sequences carry, in the order they will be supplied.
    """

    def __init__(self, ctx: TypicalityContext, variables=None):
        j = ctx.joint
        refs = list(range(len(j.variables))) if variables is None else list(variables)
        axes = [j.axes([r])[0] for r in refs]
        if len(set(axes)) != len(axes):
            raise VariableMismatch("variables repeat")
        self.ctx = ctx
        self.axes = axes
        self.sizes = tuple(j.shape[a] for a in axes)
        mass = _law_in_order(j, refs)
        self.n_cells = math.prod(self.sizes)
        k = len(axes)
        grid = np.indices(self.sizes).reshape(k, -1)
        maps, targets, offsets = [], [], [0]
        for r in range(1, k + 1):
            for sub in itertools.combinations(range(k), r):
                sub_sizes = tuple(self.sizes[i] for i in sub)
                maps.append(np.ravel_multi_index(tuple(grid[i] for i in sub), sub_sizes))
                targets.append(marginal_mass(mass, sub).ravel())
                offsets.append(offsets[-1] + math.prod(sub_sizes))
        self.maps = np.ascontiguousarray(np.stack(maps), dtype=np.int64)
        self.offsets = np.asarray(offsets, dtype=np.int64)
        self.targets = np.concatenate(targets)
        self.threshold = ctx.threshold

    def encode(self, *seqs) -> np.ndarray:
        """Joint cell index per letter; inputs broadcast over leading axes."""
        if len(seqs) != len(self.sizes):
            raise VariableMismatch(f"expected {len(self.sizes)} sequences, got {len(seqs)}")
        code = np.zeros(np.broadcast_shapes(*(np.shape(_as_array(s)) for s in seqs)), dtype=np.int64)
        for s, size in zip(seqs, self.sizes):
            code = code * size + _as_array(s)
        return code

    def mask(self, codes: np.ndarray, first_only: bool = False) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        codes2 = codes.reshape(-1, codes.shape[-1])
        out = kernels.typical_mask(codes2, self.maps, self.offsets, self.targets,
                                   self.threshold, first_only)
        return out.reshape(codes.shape[:-1]).astype(bool)

    def check(self, *seqs) -> bool:
        code = self.encode(*seqs)
        if code.ndim != 1:
            raise VariableMismatch("check() takes one tuple of sequences")
        if code.shape[0] != self.ctx.n:
            raise LengthMismatch(f"sequence length {code.shape[0]} != context n {self.ctx.n}")
        return bool(self.mask(code[None, :])[0])


def is_strongly_typical(ctx: TypicalityContext, seqs, variables=None) -> bool:
    t = Tester(ctx, variables)
    for s, size in zip(seqs, t.sizes):
        if isinstance(s, SymbolSeq) and s.alphabet.size != size:
            raise VariableMismatch(f"{s.alphabet} does not match context alphabet of size {size}")
    return t.check(*seqs)


def typical_probability_bounds(ctx: TypicalityContext, variables=None, given=None,
                               log: bool = False) -> tuple:
    """(lower, upper) on the probability of one typical sequence (tuple).

    Unconditional: ``exp(-n(H +- ε))``; conditional on ``given``: the slack
    doubles to 2ε.  With ``log=True`` the exponents are returned instead,
    which avoids underflow at large n.
    """
    j = ctx.joint
    target = list(range(len(j.variables))) if variables is None else list(variables)
    if given:
        h = conditional_entropy(j, target, given)
        slack = 2 * ctx.epsilon
    else:
        h = conditional_entropy(j, target)
        slack = ctx.epsilon
    lo, hi = -ctx.n * (h + slack), -ctx.n * (h - slack)
    return (lo, hi) if log else (math.exp(lo), math.exp(hi))


def _law_in_order(j: JointLaw, refs) -> np.ndarray:
    axes = [j.axes([r])[0] for r in refs]
    rest = [a for a in range(j.mass.ndim) if a not in axes]
    m = np.transpose(j.mass, axes + rest)
    return m.reshape(m.shape[:len(axes)] + (-1,)).sum(axis=-1)


def sequence_log_probability(j: JointLaw, seqs, variables=None, given=None) -> float:
    """ln of the product-law probability of the letter tuples (the direct oracle).

    With ``given`` (a list of further variables and their sequences, as
    ``(refs, seqs)``) the conditional probability is returned.
    """
    refs = list(range(len(j.variables))) if variables is None else list(variables)
    arrs = [_as_array(s) for s in seqs]
    with np.errstate(divide="ignore"):
        if given is None:
            return float(np.log(_law_in_order(j, refs)[tuple(arrs)]).sum())
        grefs, gseqs = given
        garrs = [_as_array(s) for s in gseqs]
        num = np.log(_law_in_order(j, list(grefs) + refs)[tuple(garrs + arrs)]).sum()
        den = np.log(_law_in_order(j, list(grefs))[tuple(garrs)]).sum()
        return float(num - den)


def sequence_probability(j: JointLaw, seqs, variables=None) -> float:
    return math.exp(sequence_log_probability(j, seqs, variables))


def wilson_interval(k: int, n: int, confidence: float = 0.95) -> tuple:
    if n <= 0:
        return 0.0, 1.0
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    p = k / n
    den = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / den
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / den
    return max(0.0, centre - half), min(1.0, centre + half)


@dataclass(frozen=True)
class CrossLawRate:
    hits: int
    trials: int
    rate: float
    interval: tuple
    bound: float
    information: float


def cross_law_typicality_rate(joint: JointLaw, epsilon: float, n: int, trials: int, rng,
                              confidence: float = 0.99) -> CrossLawRate:
    """Typicality frequency of (X', Y', Z) drawn with X' and Y' independent given Z.

    ``joint`` has exactly three variables, in the order X, Y, Z.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if len(joint.variables) != 3:
        raise VariableMismatch("cross-law rate needs a joint over exactly (X, Y, Z)")
    rng = make_rng(rng)
    m = joint.mass
    pz = m.sum(axis=(0, 1))
    pxz = m.sum(axis=1)            # (X, Z)
    pyz = m.sum(axis=0)            # (Y, Z)
    with np.errstate(invalid="ignore", divide="ignore"):
        px_z = np.where(pz > 0, pxz / pz, 1.0 / m.shape[0]).T     # (Z, X)
        py_z = np.where(pz > 0, pyz / pz, 1.0 / m.shape[1]).T     # (Z, Y)
    t = Tester(TypicalityContext(joint, epsilon, n))
    hits = 0
    batch = max(1, min(trials, (1 << 22) // n))
    done = 0
    while done < trials:
        k = min(batch, trials - done)
        z = sample_rows(pz[None, :], np.zeros((k, n), dtype=np.int64), rng)
        x = sample_rows(px_z, z, rng)
        y = sample_rows(py_z, z, rng)
        hits += int(t.mask(t.encode(x, y, z)).sum())
        done += k
    info = mutual_information(joint, [0], [1], [2])
    return CrossLawRate(hits, trials, hits / trials, wilson_interval(hits, trials, confidence),
                        math.exp(-n * (info - epsilon)), info)


__all__ = [
    "TypicalityContext", "EmpiricalType", "VariableMismatch", "Tester", "empirical_type",
    "is_strongly_typical", "typical_probability_bounds", "sequence_probability",
    "sequence_log_probability",
    "wilson_interval", "CrossLawRate", "cross_law_typicality_rate",
]
