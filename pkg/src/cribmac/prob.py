"""Finite-alphabet probability arithmetic.

All information quantities are in nats.  Laws are dense numpy tables; a
:class:`JointLaw` carries one axis per variable and variables are referred
to either by label or by axis index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

NORM_TOL = 1e-9
IDENTITY_TOL = 1e-12

VarRef = Union[str, int]


class ProbabilityError(ValueError):
    """Base class for malformed probability tables."""


class NegativeMass(ProbabilityError):
    pass


class NotNormalized(ProbabilityError):
    def __init__(self, deviation: float):
        super().__init__(f"mass sums to 1{deviation:+.3e}")
        self.deviation = deviation


class UnknownVariable(ProbabilityError):
    pass


class OverlappingSubsets(ProbabilityError):
    pass


class InconsistentInformation(ArithmeticError):
    """A mutual information came out clearly negative."""


@dataclass(frozen=True)
class Alphabet:
    size: int
    label: str = ""

    def __post_init__(self):
        if int(self.size) < 1:
            raise ValueError(f"alphabet {self.label!r} must have size >= 1")


@dataclass(frozen=True)
class Pmf:
    support: Alphabet
    mass: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mass, dtype=float)
        if m.shape != (self.support.size,):
            raise ProbabilityError(
                f"pmf over {self.support.label!r} needs {self.support.size} entries, got {m.shape}")
        object.__setattr__(self, "mass", m)
        validate_pmf(self)


@dataclass(frozen=True)
class CondPmf:
    """Conditional law; ``mass[g1, ..., gk, t] = P(target=t | given=(g1..gk))``."""

    given: tuple
    target: Alphabet
    mass: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mass, dtype=float)
        shape = tuple(a.size for a in self.given) + (self.target.size,)
        if m.shape != shape:
            raise ProbabilityError(f"conditional table needs shape {shape}, got {m.shape}")
        object.__setattr__(self, "given", tuple(self.given))
        object.__setattr__(self, "mass", m)
        check_rows(m)

    def row(self, *given_symbols: int) -> Pmf:
        return Pmf(self.target, self.mass[tuple(given_symbols)])


class JointLaw:
    """Dense joint law over an ordered list of variables."""

    __slots__ = ("variables", "mass")

    def __init__(self, variables: Sequence[Alphabet], mass, *, check: bool = True):
        self.variables = tuple(variables)
        mass = np.array(mass, dtype=float)
        shape = tuple(a.size for a in self.variables)
        if mass.shape != shape:
            raise ProbabilityError(f"joint table needs shape {shape}, got {mass.shape}")
        labels = [a.label for a in self.variables]
        if len(set(labels)) != len(labels):
            raise ProbabilityError(f"duplicate variable labels {labels}")
        if check:
            _check_mass(mass.ravel())
        mass.setflags(write=False)
        self.mass = mass

    @property
    def labels(self) -> tuple:
        return tuple(a.label for a in self.variables)

    @property
    def shape(self) -> tuple:
        return self.mass.shape

    def axes(self, refs: Iterable[VarRef]) -> tuple:
        """Resolve labels / indices to sorted, de-duplicated axis numbers."""
        out = []
        labels = self.labels
        for r in refs:
            if isinstance(r, (int, np.integer)):
                if not 0 <= r < len(labels):
                    raise UnknownVariable(f"axis {r} out of range for {labels}")
                out.append(int(r))
            else:
                try:
                    out.append(labels.index(r))
                except ValueError:
                    raise UnknownVariable(f"{r!r} not among {labels}") from None
        return tuple(sorted(set(out)))

    def __repr__(self):
        return f"JointLaw({'x'.join(f'{a.label}[{a.size}]' for a in self.variables)})"


def _check_mass(m: np.ndarray) -> None:
    if np.any(m < 0):
        raise NegativeMass(f"negative entry {m.min():.3e}")
    dev = float(m.sum()) - 1.0
    if abs(dev) > NORM_TOL:
        raise NotNormalized(dev)


def validate_pmf(p: Pmf) -> None:
    _check_mass(np.asarray(p.mass, dtype=float))


def check_rows(table: np.ndarray) -> None:
    """Validate every row (last axis) of a conditional table."""
    t = np.asarray(table, dtype=float)
    if np.any(t < 0):
        raise NegativeMass(f"negative entry {t.min():.3e}")
    dev = t.sum(axis=-1) - 1.0
    worst = float(dev.flat[np.argmax(np.abs(dev))]) if dev.size else 0.0
    if abs(worst) > NORM_TOL:
        raise NotNormalized(worst)


def product(*pmfs: Pmf) -> JointLaw:
    """Independent joint law of the given marginals."""
    mass = np.ones(())
    for p in pmfs:
        mass = np.multiply.outer(mass, p.mass)
    return JointLaw([p.support for p in pmfs], mass)


def marginal_mass(mass: np.ndarray, keep_axes: Sequence[int]) -> np.ndarray:
    drop = tuple(i for i in range(mass.ndim) if i not in keep_axes)
    return mass.sum(axis=drop) if drop else mass


def marginalize(j: JointLaw, keep: Iterable[VarRef]) -> JointLaw:
    axes = j.axes(keep)
    return JointLaw([j.variables[i] for i in axes], marginal_mass(j.mass, axes), check=False)


def entropy_of_mass(mass: np.ndarray) -> float:
    p = np.asarray(mass).ravel()
    p = p[p > 0]
    return float(-(p * np.log(p)).sum())


def entropy(j: JointLaw, subset: Iterable[VarRef] | None = None) -> float:
    """Entropy of the whole law, or of the marginal on ``subset``."""
    if subset is None:
        return entropy_of_mass(j.mass)
    return entropy_of_mass(marginal_mass(j.mass, j.axes(subset)))


def _disjoint(j: JointLaw, *groups) -> list:
    resolved = [j.axes(g) for g in groups]
    seen: set = set()
    for g in resolved:
        if seen & set(g):
            raise OverlappingSubsets(f"subsets {resolved} overlap")
        seen |= set(g)
    return resolved


def conditional_entropy(j: JointLaw, target: Iterable[VarRef], given: Iterable[VarRef] = ()) -> float:
    t, g = _disjoint(j, tuple(target), tuple(given))
    h = entropy_of_mass(marginal_mass(j.mass, t + g)) - (
        entropy_of_mass(marginal_mass(j.mass, g)) if g else 0.0)
    return max(h, 0.0) if h > -IDENTITY_TOL else h


def mutual_information(j: JointLaw, a: Iterable[VarRef], b: Iterable[VarRef],
                       given: Iterable[VarRef] = ()) -> float:
    """I(a; b | given) in nats; tiny negative round-off is clamped to zero."""
    a, b, c = _disjoint(j, tuple(a), tuple(b), tuple(given))
    m = j.mass
    val = (entropy_of_mass(marginal_mass(m, a + c)) + entropy_of_mass(marginal_mass(m, b + c))
           - entropy_of_mass(marginal_mass(m, a + b + c))
           - (entropy_of_mass(marginal_mass(m, c)) if c else 0.0))
    return clamp_information(val)


def clamp_information(val: float) -> float:
    if val >= 0:
        return val
    if val >= -IDENTITY_TOL:
        return 0.0
    raise InconsistentInformation(f"mutual information {val:.3e} < 0")


def binary_entropy(p: float) -> float:
    return entropy_of_mass(np.array([p, 1.0 - p]))
