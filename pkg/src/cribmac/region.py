"""Capacity-region evaluation: auxiliary-law factorizations, rate pentagons,
their union by randomized search, and convex-hull geometry in rate space.

Joint laws are laid out with axes ``(V, S, U, X1, X2, Y)``.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .channel import MacChannel, child_seed, make_rng
from .prob import Alphabet, JointLaw, NORM_TOL, ProbabilityError, check_rows

AXES = ("V", "S", "U", "X1", "X2", "Y")
LAMBDAS = (0.0, 0.25, 0.5, 1.0, 2.0, 4.0, math.inf)
OBJECTIVES = ("r1", "r2", "sum") + tuple(f"w{lam}" for lam in LAMBDAS)


class Mode(str, enum.Enum):
    STRICTLY_CAUSAL = "sc"
    CAUSAL = "c"

    @classmethod
    def parse(cls, value) -> "Mode":
        if isinstance(value, Mode):
            return value
        aliases = {"sc": cls.STRICTLY_CAUSAL, "strictly_causal": cls.STRICTLY_CAUSAL,
                   "c": cls.CAUSAL, "causal": cls.CAUSAL}
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise ValueError(f"mode must be one of sc, c (got {value!r})") from None


class SizeMismatch(ValueError):
    pass


class BudgetTooSmall(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FactorizedLaw:
    """Auxiliary-variable law in one of the two admissible factorizations.

    Strictly causal: ``pV, pX1gV[v, x1], pUX2gSV[s, v, u, x2]``.
    Causal: ``pV, pX1gV, pUgSV[s, v, u], pX2gVUSX1[v, u, s, x1, x2]``.
    """

    mode: Mode
    pV: np.ndarray
    pX1gV: np.ndarray
    pUX2gSV: np.ndarray | None = None
    pUgSV: np.ndarray | None = None
    pX2gVUSX1: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode.parse(self.mode))
        for name in ("pV", "pX1gV", "pUX2gSV", "pUgSV", "pX2gVUSX1"):
            val = getattr(self, name)
            if val is not None:
                object.__setattr__(self, name, np.asarray(val, dtype=float))
        if self.mode is Mode.STRICTLY_CAUSAL and self.pUX2gSV is None:
            raise SizeMismatch("strictly causal law needs pUX2gSV")
        if self.mode is Mode.CAUSAL and (self.pUgSV is None or self.pX2gVUSX1 is None):
            raise SizeMismatch("causal law needs pUgSV and pX2gVUSX1")

    @property
    def v_size(self) -> int:
        return self.pV.shape[0]

    @property
    def u_size(self) -> int:
        return (self.pUX2gSV if self.mode is Mode.STRICTLY_CAUSAL else self.pUgSV).shape[2]

    def factors(self) -> list:
        if self.mode is Mode.STRICTLY_CAUSAL:
            return [self.pV, self.pX1gV, self.pUX2gSV]
        return [self.pV, self.pX1gV, self.pUgSV, self.pX2gVUSX1]

    def check(self, c: MacChannel) -> None:
        nx1, nx2, ns, _ = c.sizes
        nv, nu = self.v_size, self.u_size
        want = {"pV": (nv,), "pX1gV": (nv, nx1)}
        if self.mode is Mode.STRICTLY_CAUSAL:
            want["pUX2gSV"] = (ns, nv, nu, nx2)
        else:
            want["pUgSV"] = (ns, nv, nu)
            want["pX2gVUSX1"] = (nv, nu, ns, nx1, nx2)
        for name, shape in want.items():
            got = getattr(self, name).shape
            if got != shape:
                raise SizeMismatch(f"{name} has shape {got}, channel requires {shape}")
        try:
            check_rows(self.pV)
            check_rows(self.pX1gV)
            if self.mode is Mode.STRICTLY_CAUSAL:
                check_rows(self.pUX2gSV.reshape(ns, nv, -1))
            else:
                check_rows(self.pUgSV)
                check_rows(self.pX2gVUSX1)
        except ProbabilityError as exc:
            raise SizeMismatch(f"invalid conditional in law: {exc}") from None

    def marginal_u_given_v(self, state: np.ndarray) -> np.ndarray:
        """p(u | v), the law used to draw u-codewords on top of v."""
        pu_sv = self.pUX2gSV.sum(axis=3) if self.mode is Mode.STRICTLY_CAUSAL else self.pUgSV
        return np.einsum("s,svu->vu", state, pu_sv)

    def to_dict(self) -> dict:
        d = {"mode": self.mode.value, "v": self.v_size, "u": self.u_size,
             "pV": self.pV.tolist(), "pX1gV": self.pX1gV.tolist()}
        if self.mode is Mode.STRICTLY_CAUSAL:
            d["pUX2gSV"] = self.pUX2gSV.tolist()
        else:
            d["pUgSV"] = self.pUgSV.tolist()
            d["pX2gVUSX1"] = self.pX2gVUSX1.tolist()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "FactorizedLaw":
        keys = ("pV", "pX1gV", "pUX2gSV", "pUgSV", "pX2gVUSX1")
        return cls(d["mode"], **{k: np.array(d[k], dtype=float) for k in keys if k in d})


def embed_causal(f: FactorizedLaw) -> FactorizedLaw:
    """Rewrite a strictly causal law in causal form (X2 ignoring the current X1)."""
    if f.mode is Mode.CAUSAL:
        return f
    joint = f.pUX2gSV                            # (S, V, U, X2)
    pu = joint.sum(axis=3)                       # (S, V, U)
    nx2 = joint.shape[3]
    with np.errstate(invalid="ignore", divide="ignore"):
        cond = np.where(pu[..., None] > 0, joint / pu[..., None], 1.0 / nx2)
    nx1 = f.pX1gV.shape[1]
    x2 = np.broadcast_to(cond.transpose(1, 2, 0, 3)[:, :, :, None, :],
                         cond.shape[1:3] + (cond.shape[0], nx1, nx2)).copy()
    return FactorizedLaw(Mode.CAUSAL, f.pV.copy(), f.pX1gV.copy(), pUgSV=pu, pX2gVUSX1=x2)


def joint_mass(c: MacChannel, f: FactorizedLaw) -> np.ndarray:
    """Dense ``(V, S, U, X1, X2, Y)`` table of the factorized law."""
    a = f.pV[:, None] * f.pX1gV                                  # (V, X1)
    lt = c.law.transpose(2, 0, 1, 3)                             # (S, X1, X2, Y)
    if f.mode is Mode.STRICTLY_CAUSAL:
        b = f.pUX2gSV.transpose(1, 0, 2, 3) * c.state[None, :, None, None]   # (V, S, U, X2)
        return a[:, None, None, :, None, None] * b[:, :, :, None, :, None] * lt[None, :, None, :, :, :]
    b = f.pUgSV.transpose(1, 0, 2) * c.state[None, :, None]      # (V, S, U)
    x2 = f.pX2gVUSX1.transpose(0, 2, 1, 3, 4)                    # (V, S, U, X1, X2)
    return (a[:, None, None, :, None, None] * b[:, :, :, None, None, None]
            * x2[..., None] * lt[None, :, None, :, :, :])


def assemble_joint(c: MacChannel, f: FactorizedLaw) -> JointLaw:
    f.check(c)
    nx1, nx2, ns, ny = c.sizes
    sizes = (f.v_size, ns, f.u_size, nx1, nx2, ny)
    return JointLaw([Alphabet(n, lab) for n, lab in zip(sizes, AXES)], joint_mass(c, f))


@dataclass(frozen=True, eq=False)
class RatePentagon:
    r1_max: float
    r2_max: float
    sum_max: float
    law: FactorizedLaw | None = None

    @property
    def bounds(self) -> tuple:
        return self.r1_max, self.r2_max, self.sum_max


def _clamp(b: float) -> float:
    # round-off in differences of entropies is treated as zero
    return b if b > 1e-12 else 0.0


def _pentagon_from_terms(terms) -> tuple:
    h_x1_v, i_uy, i_us, i_y = terms
    return _clamp(h_x1_v), _clamp(i_uy - i_us), _clamp(i_y - i_us)


def rate_pentagon(c: MacChannel, f: FactorizedLaw) -> RatePentagon:
    joint = assemble_joint(c, f)
    r1, r2, s = _pentagon_from_terms(kernels.pentagon_terms(joint.mass))
    return RatePentagon(r1, r2, s, f)


def pentagon_to_polygon(p) -> list:
    """Counter-clockwise vertices of the pentagon's polygon, duplicates removed."""
    a, b, s = p.bounds if isinstance(p, RatePentagon) else p
    r1 = max(0.0, min(a, s))
    r2 = max(0.0, min(b, s))
    pts = [(0.0, 0.0), (r1, 0.0), (r1, max(0.0, min(b, s - r1))),
           (max(0.0, min(a, s - r2)), r2), (0.0, r2)]
    out = []
    for q in pts:
        if not out or q != out[-1]:
            out.append(q)
    while len(out) > 1 and out[-1] == out[0]:
        out.pop()
    return out


def support_value(bounds, w1: float, w2: float) -> float:
    """max of ``w1*R1 + w2*R2`` over the pentagon, for ``w1, w2 >= 0``."""
    a, b, s = bounds
    if w1 >= w2:
        return (w1 - w2) * min(a, s) + w2 * min(s, a + b)
    return (w2 - w1) * min(b, s) + w1 * min(s, a + b)


def objective_value(name: str, bounds) -> float:
    if name == "r1":
        return bounds[0]
    if name == "r2":
        return bounds[1]
    if name == "sum":
        return bounds[2]
    lam = float(name[1:])
    if math.isinf(lam):
        return support_value(bounds, 0.0, 1.0)
    return support_value(bounds, 1.0, lam)


# ---------------------------------------------------------------- geometry

def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points) -> np.ndarray:
    """Counter-clockwise hull vertices, collinear points removed."""
    pts = sorted(set((float(x), float(y)) for x, y in np.asarray(points, dtype=float).reshape(-1, 2)))
    if len(pts) <= 2:
        return np.array(pts, dtype=float).reshape(-1, 2)
    scale = max(1.0, max(abs(v) for p in pts for v in p))
    eps = 1e-13 * scale * scale

    def half(seq):
        chain = []
        for p in seq:
            while len(chain) >= 2 and _cross(chain[-2], chain[-1], p) <= eps:
                chain.pop()
            chain.append(p)
        return chain

    lower = half(pts)
    upper = half(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    return np.array(hull, dtype=float)


def _inside(poly: np.ndarray, p, slack: float = 1e-12) -> bool:
    if len(poly) < 3:
        return False
    for i in range(len(poly)):
        if _cross(poly[i], poly[(i + 1) % len(poly)], p) < -slack:
            return False
    return True


def _seg_dist(p, a, b, norm: str) -> float:
    p, a, b = (np.asarray(v, dtype=float) for v in (p, a, b))
    d = b - a
    if norm == "euclid":
        L = float(d @ d)
        t = 0.0 if L == 0 else min(1.0, max(0.0, float((p - a) @ d) / L))
        return float(np.hypot(*(p - a - t * d)))
    # Chebyshev: the distance along the segment is convex piecewise-linear, so
    # its minimum sits at an endpoint, a kink, or where the two terms balance.
    e = p - a
    cands = {0.0, 1.0}
    for k in range(2):
        if d[k] != 0:
            cands.add(e[k] / d[k])
    for sgn in (1.0, -1.0):
        den = d[0] - sgn * d[1]
        if den != 0:
            cands.add((e[0] - sgn * e[1]) / den)
    return min(float(np.max(np.abs(e - t * d))) for t in cands if 0.0 <= t <= 1.0)


def distance_to_hull(hull: np.ndarray, p, norm: str = "euclid") -> float:
    hull = np.asarray(hull, dtype=float).reshape(-1, 2)
    if len(hull) == 0:
        return math.inf
    if _inside(hull, p):
        return 0.0
    if len(hull) == 1:
        return _seg_dist(p, hull[0], hull[0], norm)
    return min(_seg_dist(p, hull[i], hull[(i + 1) % len(hull)], norm) for i in range(len(hull)))


def hausdorff(h1, h2) -> float:
    """Euclidean Hausdorff distance between two convex polygons."""
    h1 = np.asarray(h1, dtype=float).reshape(-1, 2)
    h2 = np.asarray(h2, dtype=float).reshape(-1, 2)
    d12 = max((distance_to_hull(h2, p) for p in h1), default=0.0)
    d21 = max((distance_to_hull(h1, p) for p in h2), default=0.0)
    return max(d12, d21)


# ---------------------------------------------------------------- search

@dataclass
class SearchConfig:
    samples: int = 200
    refine: int = 200
    seed: int = 0
    v_size: int | None = None
    u_size: int | None = None
    vmax: int = 4
    umax: int = 8
    threads: int = 1

    def sizes(self, c: MacChannel) -> tuple:
        vb, _ = c.cardinality_bounds()
        nv = self.v_size if self.v_size is not None else min(vb, self.vmax)
        ub = c.x1.size * c.x2.size * c.s.size * nv + 2
        nu = self.u_size if self.u_size is not None else min(ub, self.umax)
        return int(nv), int(nu)


@dataclass
class RateRegion:
    points: np.ndarray                 # (P, 2) all pentagon vertices found
    point_witness: np.ndarray          # (P,) witness id per point
    hull: np.ndarray                   # (H, 2) counter-clockwise
    hull_witness: list                 # witness id per hull vertex
    witnesses: dict = field(default_factory=dict)   # id -> FactorizedLaw, every sampled law
    mode: Mode = Mode.STRICTLY_CAUSAL

    def max_r1(self) -> float:
        return float(self.hull[:, 0].max())

    def max_r2(self) -> float:
        return float(self.hull[:, 1].max())

    def max_sum(self) -> float:
        return float(self.hull.sum(axis=1).max())


def region_contains(r, point, tol: float = 0.0) -> bool:
    hull = r.hull if isinstance(r, RateRegion) else np.asarray(r, dtype=float)
    return distance_to_hull(hull, point, norm="cheb") <= tol + 1e-12


def _dirichlet_rows(rng, shape, alpha) -> np.ndarray:
    rows = rng.dirichlet(np.full(shape[-1], alpha), size=shape[:-1])
    bad = ~np.isfinite(rows).all(axis=-1) | (rows.sum(axis=-1) <= 0)
    if bad.any():
        idx = rng.integers(shape[-1], size=int(bad.sum()))
        repl = np.zeros((idx.size, shape[-1]))
        repl[np.arange(idx.size), idx] = 1.0
        rows[bad] = repl
    return rows / rows.sum(axis=-1, keepdims=True)


def random_law(c: MacChannel, mode, nv: int, nu: int, rng, alpha: float = 1.0) -> FactorizedLaw:
    mode = Mode.parse(mode)
    nx1, nx2, ns, _ = c.sizes
    pV = _dirichlet_rows(rng, (nv,), alpha)
    pX1 = _dirichlet_rows(rng, (nv, nx1), alpha)
    if mode is Mode.STRICTLY_CAUSAL:
        ux2 = _dirichlet_rows(rng, (ns, nv, nu * nx2), alpha).reshape(ns, nv, nu, nx2)
        return FactorizedLaw(mode, pV, pX1, pUX2gSV=ux2)
    pu = _dirichlet_rows(rng, (ns, nv, nu), alpha)
    px2 = _dirichlet_rows(rng, (nv, nu, ns, nx1, nx2), alpha)
    return FactorizedLaw(mode, pV, pX1, pUgSV=pu, pX2gVUSX1=px2)


def _raw_bounds(c: MacChannel, f: FactorizedLaw) -> tuple:
    h_x1_v, i_uy, i_us, i_y = kernels.pentagon_terms(joint_mass(c, f))
    return h_x1_v, i_uy - i_us, i_y - i_us


def _bounds_of(c: MacChannel, f: FactorizedLaw) -> tuple:
    return tuple(_clamp(b) for b in _raw_bounds(c, f))


# entropy sets (axes V=0 S=1 U=2 X1=3 X2=4 Y=5) and their coefficients in
# the raw bounds (r1, r2 - penalty, sum - penalty)
_SETS = {
    "V": (0,), "VX1": (0, 3), "VX1U": (0, 2, 3), "VX1Y": (0, 3, 5), "VX1UY": (0, 2, 3, 5),
    "VU": (0, 2), "VS": (0, 1), "VUS": (0, 1, 2), "Y": (5,),
}
_COEF = (
    {"VX1": 1, "V": -1},
    {"VX1U": 1, "VX1Y": 1, "VX1UY": -1, "VX1": -1, "VU": -1, "VS": -1, "VUS": 1, "V": 1},
    {"VX1U": 1, "Y": 1, "VX1UY": -1, "VU": -1, "VS": -1, "VUS": 1, "V": 1},
)


def _objective_weights(name: str, raw) -> tuple:
    """(d/dr1, d/dr2, d/dsum) of the named objective at ``raw`` (a subgradient)."""
    if name == "r1":
        return 1.0, 0.0, 0.0
    if name == "r2":
        return 0.0, 1.0, 0.0
    if name == "sum":
        return 0.0, 0.0, 1.0
    lam = float(name[1:])
    w1, w2 = (0.0, 1.0) if math.isinf(lam) else (1.0, lam)
    a, b, s = raw
    g = [0.0, 0.0, 0.0]
    hi, lo, k = (w1, w2, 0) if w1 >= w2 else (w2, w1, 1)
    g[k if raw[k] < s else 2] += hi - lo
    if s < a + b:
        g[2] += lo
    else:
        g[0] += lo
        g[1] += lo
    return tuple(g)


def _joint_gradient(q: np.ndarray, weights) -> np.ndarray:
    coef = {}
    for w, table in zip(weights, _COEF):
        if w:
            for key, c in table.items():
                coef[key] = coef.get(key, 0.0) + w * c
    grad = np.zeros_like(q)
    for key, c in coef.items():
        if c:
            drop = tuple(ax for ax in range(6) if ax not in _SETS[key])
            m = q.sum(axis=drop, keepdims=True)
            grad -= c * np.log(np.maximum(m, 1e-30))
    return grad


def _factor_gradients(c: MacChannel, law: FactorizedLaw, g: np.ndarray) -> list:
    """Objective gradient per factor row, divided by the row's context mass."""
    h = np.einsum("vsuaby,saby->vsua" + "b", g, c.law.transpose(2, 0, 1, 3))
    ps = c.state
    X = law.pX1gV
    if law.mode is Mode.STRICTLY_CAUSAL:
        B = law.pUX2gSV.transpose(1, 0, 2, 3)                    # (V, S, U, X2)
        gB = np.einsum("vsuab,va->vsub", h, X)
        K = np.einsum("vsuab,vsub,s->va", h, B, ps)
        gV = (X * K).sum(axis=1)
        return [gV, K, gB.transpose(1, 0, 2, 3)]
    Bu = law.pUgSV.transpose(1, 0, 2)                            # (V, S, U)
    C2 = law.pX2gVUSX1.transpose(0, 2, 1, 3, 4)                  # (V, S, U, X1, X2)
    gC2 = h
    gBu = np.einsum("vsuab,va,vsuab->vsu", h, X, C2)
    K = np.einsum("vsuab,vsu,vsuab,s->va", h, Bu, C2, ps)
    gV = (X * K).sum(axis=1)
    return [gV, K, gBu.transpose(1, 0, 2), gC2.transpose(0, 2, 1, 3, 4)]


def _row_view(a: np.ndarray, k: int, sc: bool) -> np.ndarray:
    if k == 0:
        return a.reshape(1, -1)
    if sc and k == 2:
        return a.reshape(-1, a.shape[-1] * a.shape[-2])
    return a.reshape(-1, a.shape[-1])


def _make_law(mode: Mode, factors: list) -> FactorizedLaw:
    if mode is Mode.STRICTLY_CAUSAL:
        return FactorizedLaw(mode, factors[0], factors[1], pUX2gSV=factors[2])
    return FactorizedLaw(mode, factors[0], factors[1], pUgSV=factors[2], pX2gVUSX1=factors[3])


def refine_law(c: MacChannel, f: FactorizedLaw, objective: str, iters: int, rng=None) -> tuple:
    """Exponentiated-gradient ascent of one objective over the law's rows.

    Each iteration takes a multiplicative step on every conditional row with
    a backtracking step size, accepting only non-decreasing objective values.
    Returns the refined law and its (clamped) pentagon bounds.
    """
    sc = f.mode is Mode.STRICTLY_CAUSAL
    law = _make_law(f.mode, [a.copy() for a in f.factors()])
    raw = _raw_bounds(c, law)
    best = objective_value(objective, raw)
    eta = 1.0
    for _ in range(max(iters, 0)):
        q = joint_mass(c, law)
        g = _joint_gradient(q, _objective_weights(objective, raw))
        grads = _factor_gradients(c, law, g)
        accepted = False
        while eta > 1e-8:
            trial = []
            for k, (a, ga) in enumerate(zip(law.factors(), grads)):
                rows, gr = _row_view(a, k, sc), _row_view(ga, k, sc)
                step = eta * (gr - gr.max(axis=1, keepdims=True))
                new = rows * np.exp(np.maximum(step, -700.0))
                new /= new.sum(axis=1, keepdims=True)
                trial.append(new.reshape(a.shape))
            cand = _make_law(f.mode, trial)
            cand_raw = _raw_bounds(c, cand)
            val = objective_value(objective, cand_raw)
            if val >= best:
                accepted = val > best + 1e-15
                law, raw, best = cand, cand_raw, val
                eta *= 1.5
                break
            eta *= 0.5
        if not accepted and eta <= 1e-8:
            break
    return law, tuple(_clamp(b) for b in raw)


_ALPHAS = (0.15, 0.5, 1.0)


def _search_one(c: MacChannel, mode: Mode, nv: int, nu: int, refine: int, seed, stream: int, i: int):
    rng = make_rng(child_seed(seed, stream, i))
    alpha = _ALPHAS[i % len(_ALPHAS)]
    law = random_law(c, mode, nv, nu, rng, alpha)
    start = _bounds_of(c, law)
    objective = OBJECTIVES[i % len(OBJECTIVES)]
    refined, bounds = refine_law(c, law, objective, refine, rng)
    return [(law, start), (refined, bounds)]


def _search_chunk(args):
    c, mode, nv, nu, refine, seed, stream, idx, embed = args
    out = []
    for i in idx:
        pairs = _search_one(c, mode, nv, nu, refine, seed, stream, i)
        if embed:
            pairs = [(embed_causal(f), b) for f, b in pairs]
        out.append(pairs)
    return out


def _run_stream(c, mode, nv, nu, cfg, stream, embed, pool):
    idx = list(range(cfg.samples))
    if pool is None:
        return _search_chunk((c, mode, nv, nu, cfg.refine, cfg.seed, stream, idx, embed))
    chunks = [idx[k::cfg.threads] for k in range(cfg.threads)]
    parts = list(pool.map(_search_chunk, [(c, mode, nv, nu, cfg.refine, cfg.seed, stream, ch, embed)
                                          for ch in chunks]))
    merged = [None] * cfg.samples
    for ch, res in zip(chunks, parts):
        for i, r in zip(ch, res):
            merged[i] = r
    return merged


def search_region(c: MacChannel, mode, cfg: SearchConfig | None = None) -> RateRegion:
    """Union of rate pentagons over randomly drawn and locally refined laws.

    Sample ``i`` draws its law from an independent stream addressed by
    ``(seed, stream, i)`` and is refined on objective ``i mod 10``, so the
    point set for ``N`` samples is a prefix of the one for ``2N``.  The
    causal search additionally runs the strictly causal stream (embedded),
    which keeps the strictly causal result inside the causal one.
    """
    cfg = cfg or SearchConfig()
    if cfg.samples < 1:
        raise BudgetTooSmall("search needs at least one sample")
    mode = Mode.parse(mode)
    nv, nu = cfg.sizes(c)
    streams = [(Mode.STRICTLY_CAUSAL, 0, mode is Mode.CAUSAL)]
    if mode is Mode.CAUSAL:
        streams.append((Mode.CAUSAL, 1, False))
    pool = ProcessPoolExecutor(cfg.threads) if cfg.threads > 1 else None
    try:
        results = [_run_stream(c, m, nv, nu, cfg, stream, embed, pool) for m, stream, embed in streams]
    finally:
        if pool is not None:
            pool.shutdown()
    laws, pts, owner = [], [(0.0, 0.0)], [-1]
    for res in results:
        for pairs in res:
            for f, bounds in pairs:
                wid = len(laws)
                laws.append(f)
                for q in pentagon_to_polygon(bounds):
                    pts.append(q)
                    owner.append(wid)
    points = np.array(pts, dtype=float)
    owner = np.array(owner, dtype=np.int64)
    hull = convex_hull(points)
    hull_witness = []
    for v in hull:
        hit = np.flatnonzero((points[:, 0] == v[0]) & (points[:, 1] == v[1]))
        wids = [int(owner[h]) for h in hit if owner[h] >= 0]
        hull_witness.append(min(wids) if wids else -1)
    return RateRegion(points, owner, hull, hull_witness, dict(enumerate(laws)), mode)
