"""Command-line entry point: ``cribmac {region,simulate,verify-typicality,check-inclusion}``.

Settings resolve as command-line flags > ``--config`` JSON file > built-in
defaults.  Exit codes: 0 success, 1 domain or input error, 2 usage error.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import os
import sys

import numpy as np

from . import __version__
from .channel import make_rng, sample_iid
from .coding import CodeParams, ModeMismatch, OutOfMemoryBudget, resolve_params
from .fileio import InputError, header_line, load_channel, load_law, read_json, write_csv, write_json
from .prob import Alphabet, JointLaw, ProbabilityError
from .region import (FactorizedLaw, Mode, SearchConfig, SizeMismatch, assemble_joint,
                     region_contains, search_region)
from .simulator import EVENTS, sweep_n
from .typicality import (Tester, TypicalityContext, cross_law_typicality_rate, sequence_log_probability,
                         typical_probability_bounds)

DEFAULT_SEED = 20240917
LN2 = math.log(2)

DEFAULTS = {
    "region": {"mode": "sc", "samples": 200, "refine": 200, "vmax": 4, "umax": 8,
               "v_size": None, "u_size": None, "out": "region.csv", "witness_out": None},
    "simulate": {"mode": None, "witness_id": None, "rprime": None, "n": [50, 100, 200],
                 "blocks": 8, "trials": 200, "epsilon": 0.1, "budget": 2 * 1024 ** 3,
                 "out": "simulate.csv"},
    "verify-typicality": {"law": None, "epsilon": 0.1, "n": 1000, "samples": 10000,
                          "cross_n": 50, "cross_trials": 2000, "out": None},
    "check-inclusion": {"samples": 200, "refine": 200, "vmax": 4, "umax": 8, "v_size": None,
                        "u_size": None, "tol": 0.02, "out": None},
}
REQUIRED = {"region": ("channel",), "simulate": ("channel", "law", "r1", "r2"),
            "verify-typicality": ("channel",), "check-inclusion": ("channel",)}
# keys that do not change results and are left out of the config hash
_UNHASHED = {"out", "witness_out", "threads", "config", "verbose", "command"}


def _threads_default() -> int:
    env = os.environ.get("CRIBMAC_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    common = argparse.ArgumentParser(add_help=False, argument_default=S)
    common.add_argument("--config", help="JSON file of option values (flags override it)")
    common.add_argument("--seed", type=int, help=f"master seed (default {DEFAULT_SEED})")
    common.add_argument("--threads", type=int, help="worker processes (default: CRIBMAC_THREADS or all cores)")
    common.add_argument("-v", "--verbose", action="store_true")

    search = argparse.ArgumentParser(add_help=False, argument_default=S)
    search.add_argument("--channel")
    search.add_argument("--samples", type=int)
    search.add_argument("--refine", type=int)
    search.add_argument("--vmax", type=int)
    search.add_argument("--umax", type=int)
    search.add_argument("--v-size", dest="v_size", type=int)
    search.add_argument("--u-size", dest="u_size", type=int)

    p = argparse.ArgumentParser(prog="cribmac", description="Rate regions and block-Markov coding simulations for two-sender "
                                "channels with encoder-side state and cribbing.")
    p.add_argument("--version", action="version", version=f"cribmac {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("region", parents=[common, search], argument_default=S,
                       help="search the achievable region and write its hull")
    r.add_argument("--mode", choices=["sc", "c"])
    r.add_argument("--out")
    r.add_argument("--witness-out", dest="witness_out")

    s = sub.add_parser("simulate", parents=[common], argument_default=S,
                       help="Monte Carlo error rates of the coding scheme")
    s.add_argument("--channel")
    s.add_argument("--law", help="law JSON or witness sidecar")
    s.add_argument("--witness-id", dest="witness_id", type=int)
    s.add_argument("--mode", choices=["sc", "c"])
    s.add_argument("--r1", type=float)
    s.add_argument("--r2", type=float)
    s.add_argument("--rprime", type=float)
    s.add_argument("--n", type=int, action="append")
    s.add_argument("--blocks", type=int)
    s.add_argument("--trials", type=int)
    s.add_argument("--epsilon", type=float)
    s.add_argument("--budget", type=int, help="codebook memory cap in bytes")
    s.add_argument("--out")

    t = sub.add_parser("verify-typicality", parents=[common], argument_default=S,
                       help="check the typical-set bounds statistically")
    t.add_argument("--channel")
    t.add_argument("--law")
    t.add_argument("--epsilon", type=float)
    t.add_argument("--n", type=int)
    t.add_argument("--samples", type=int)
    t.add_argument("--cross-n", dest="cross_n", type=int, help="block length of the cross-law check")
    t.add_argument("--cross-trials", dest="cross_trials", type=int)
    t.add_argument("--out")

    c = sub.add_parser("check-inclusion", parents=[common, search], argument_default=S,
                       help="test that the strictly causal hull lies inside the causal hull")
    c.add_argument("--tol", type=float)
    c.add_argument("--out")
    return p


def parse_args(argv=None) -> dict:
    """Merged settings dict; exits with status 2 on usage errors."""
    parser = build_parser()
    ns = vars(parser.parse_args(argv))
    cmd = ns["command"]
    cfg = {"seed": DEFAULT_SEED, "threads": _threads_default(), "verbose": False, **DEFAULTS[cmd]}
    if "config" in ns:
        try:
            extra = read_json(ns["config"])
        except InputError as exc:
            parser.error(str(exc))
        if not isinstance(extra, dict):
            parser.error(f"{ns['config']}: config must be a JSON object")
        allowed = set(cfg) | set(REQUIRED[cmd]) | {"channel", "law"}
        unknown = sorted(set(extra) - allowed)
        if unknown:
            parser.error(f"{ns['config']}: unknown option(s) for {cmd}: {', '.join(unknown)}")
        cfg.update(extra)
    cfg.update(ns)
    missing = [k for k in REQUIRED[cmd] if cfg.get(k) is None]
    if missing:
        parser.error(f"{cmd}: missing required option(s): " + ", ".join("--" + k for k in missing))
    if cfg.get("mode") not in (None, "sc", "c"):
        parser.error(f"--mode must be one of sc, c (got {cfg['mode']!r})")
    return cfg


def _hashable(cfg: dict) -> dict:
    return {k: v for k, v in cfg.items() if k not in _UNHASHED}


def _search_config(cfg: dict) -> SearchConfig:
    return SearchConfig(samples=cfg["samples"], refine=cfg["refine"], seed=cfg["seed"],
                        v_size=cfg["v_size"], u_size=cfg["u_size"], vmax=cfg["vmax"],
                        umax=cfg["umax"], threads=cfg["threads"])


def _log(cfg, msg):
    if cfg.get("verbose"):
        print(msg, file=sys.stderr)


def cmd_region(cfg: dict) -> int:
    ch = load_channel(cfg["channel"])
    reg = search_region(ch, cfg["mode"], _search_config(cfg))
    head = header_line(_hashable(cfg), cfg["seed"])
    on_hull = {(float(x), float(y)) for x, y in reg.hull}
    seen, rows = set(), []
    for (x, y), wid in zip(reg.points.tolist(), reg.point_witness.tolist()):
        if (x, y) in seen:
            continue
        seen.add((x, y))
        rows.append((x, y, x / LN2, y / LN2, int((x, y) in on_hull), wid))
    write_csv(cfg["out"], head, ["R1_nats", "R2_nats", "R1_bits", "R2_bits", "vertex_flag", "witness_id"], rows)
    sidecar = cfg["witness_out"] or os.path.splitext(cfg["out"])[0] + ".witnesses.json"
    sums = [(-(x + y), wid) for (x, y), wid in zip(reg.hull.tolist(), reg.hull_witness) if wid >= 0]
    default = min(sums)[1] if sums else None
    write_json(sidecar, {"default": default,
                         "witnesses": {str(k): f.to_dict() for k, f in sorted(reg.witnesses.items())}}, head)
    _log(cfg, f"{len(reg.hull)} hull vertices, max R1={reg.max_r1():.6f}, max R2={reg.max_r2():.6f} nats")
    return 0


def cmd_simulate(cfg: dict) -> int:
    ch = load_channel(cfg["channel"])
    law = load_law(cfg["law"], cfg["witness_id"])
    if cfg["mode"] is not None and Mode.parse(cfg["mode"]) is not law.mode:
        raise ModeMismatch(f"--mode {cfg['mode']} disagrees with the law's mode {law.mode.value}")
    law.check(ch)
    ns = sorted(set(cfg["n"]))
    base = CodeParams(n=ns[0], B=cfg["blocks"], R1=cfg["r1"], R2=cfg["r2"], Rprime=cfg["rprime"],
                      epsilon=cfg["epsilon"], mode=law.mode, budget=cfg["budget"])
    for n in ns:   # fail fast before any simulation if a table cannot fit
        p = resolve_params(ch, law, dataclasses.replace(base, n=n))
        need = p.required_bytes()
        if not math.isfinite(need) or need > p.budget:
            raise OutOfMemoryBudget(need, p.budget)
    res = sweep_n(ch, law, (cfg["r1"], cfg["r2"]), ns, cfg["blocks"], cfg["trials"], cfg["seed"],
                  epsilon=cfg["epsilon"], Rprime=cfg["rprime"], threads=cfg["threads"])
    rows = []
    for n, rep in res.entries:
        lo, hi = rep.interval
        er1, er2 = rep.effective_rates
        rows.append([n, rep.trials, rep.message_error_rate, lo, hi,
                     *(rep.event_counts[e] for e in EVENTS), er1, er2])
        _log(cfg, f"n={n}: error rate {rep.message_error_rate:.4f} [{lo:.4f}, {hi:.4f}]")
    cols = ["n", "trials", "msg_err", "wilson_lo", "wilson_hi", "e0", "e1", "e2", "e3", "e4", "e5",
            "effective_r1", "effective_r2"]
    write_csv(cfg["out"], header_line(_hashable(cfg), cfg["seed"]), cols, rows)
    return 0


def _default_law(ch) -> FactorizedLaw:
    nx1, nx2, ns, _ = ch.sizes
    return FactorizedLaw("sc", np.ones(1), np.full((1, nx1), 1 / nx1),
                         pUX2gSV=np.full((ns, 1, 1, nx2), 1 / nx2))


def cmd_verify(cfg: dict) -> int:
    """Typical-set checks on the (X1, X2, Y) marginal of the assembled law."""
    ch = load_channel(cfg["channel"])
    law = load_law(cfg["law"]) if cfg["law"] else _default_law(ch)
    q = assemble_joint(ch, law).mass.sum(axis=(0, 1, 2))           # (X1, X2, Y)
    j = JointLaw([Alphabet(s, lab) for s, lab in zip(q.shape, ("X1", "X2", "Y"))], q)
    eps, n, samples = cfg["epsilon"], cfg["n"], cfg["samples"]
    rng = make_rng(cfg["seed"])
    ctx = TypicalityContext(j, eps, n)
    t = Tester(ctx)
    lo, hi = typical_probability_bounds(ctx, log=True)
    flat = sample_iid(q.ravel(), (samples, n), rng)
    x = np.unravel_index(flat, q.shape)
    typ = t.mask(t.encode(*x))
    in_bounds = all(lo <= sequence_log_probability(j, [a[k] for a in x]) <= hi for k in np.flatnonzero(typ))
    frac = float(typ.mean())
    results = [("log_prob_bounds", float(typ.sum()), f"[{lo:.6g},{hi:.6g}]", in_bounds),
               ("typical_mass", frac, f">={1 - eps}", frac >= 1 - eps)]
    l2 = cross_law_typicality_rate(j, eps, cfg["cross_n"], cfg["cross_trials"], make_rng(cfg["seed"] + 1))
    results.append(("cross_law_rate", l2.rate, f"<={l2.bound:.4g}", l2.interval[0] <= l2.bound))
    for name, val, bound, ok in results:
        print(f"{'PASS' if ok else 'FAIL'} {name} value={val:.6g} bound={bound}")
    if cfg["out"]:
        write_csv(cfg["out"], header_line(_hashable(cfg), cfg["seed"]), ["check", "value", "bound", "pass"],
                  [(nm, v, b, int(ok)) for nm, v, b, ok in results])
    return 0 if all(ok for *_, ok in results) else 1


def cmd_inclusion(cfg: dict) -> int:
    ch = load_channel(cfg["channel"])
    sc = search_region(ch, "sc", _search_config(cfg))
    c = search_region(ch, "c", _search_config(cfg))
    rows = [(float(x), float(y), int(region_contains(c, (x, y), cfg["tol"]))) for x, y in sc.hull]
    for x, y, ok in rows:
        print(f"{'PASS' if ok else 'FAIL'} ({x:.6f}, {y:.6f})")
    if cfg["out"]:
        write_csv(cfg["out"], header_line(_hashable(cfg), cfg["seed"]), ["R1_nats", "R2_nats", "contained"], rows)
    return 0 if all(ok for *_, ok in rows) else 1


COMMANDS = {"region": cmd_region, "simulate": cmd_simulate, "verify-typicality": cmd_verify,
            "check-inclusion": cmd_inclusion}


def run(cfg: dict) -> int:
    try:
        return COMMANDS[cfg["command"]](cfg)
    except OutOfMemoryBudget as exc:
        print(f"cribmac: error: {exc}", file=sys.stderr)
        return 1
    except (InputError, ModeMismatch, SizeMismatch, ProbabilityError, ValueError) as exc:
        print(f"cribmac: error: {exc}", file=sys.stderr)
        return 1


def main(argv=None) -> int:
    return run(parse_args(argv))


if __name__ == "__main__":
    sys.exit(main())
