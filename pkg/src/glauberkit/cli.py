"""Command-line front end.

Every subcommand resolves its configuration from built-in defaults, then an
optional JSON file (``--config``), then explicit flags, validates it, runs,
and writes ``<out>/<subcommand>.json`` plus any CSV curves. The JSON holds
``format_version``, the resolved config (seed and derived stream keys
included) and the results; it has no timestamps, so equal configs give
byte-identical files.

Exit codes: 0 success, 1 a verified bound or invariant failed, 2 usage or
validation error, 3 a size cap was exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Callable

import numpy as np

from . import annealing, coloring, coupling, exact, fixed_point, hardcore
from . import graph as gmod
from .seeding import STREAM_ANNEAL, STREAM_COUPLE, STREAM_SAMPLE, STREAM_VERIFY, make_rng

FORMAT_VERSION = 1
OUT_DIR_ENV = "GLAUBERKIT_OUT_DIR"

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_CAP = 3

log = logging.getLogger("glauberkit")


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Parameter parsing helpers
# ---------------------------------------------------------------------------

def load_graph(source: str) -> gmod.Graph:
    """A path to an edge-list file, or a generator spec like ``cycle:6``."""
    if source is None:
        raise UsageError("--graph is required")
    p = Path(source)
    if p.is_file():
        return gmod.load(p)
    if ":" not in source:
        raise UsageError(f"graph {source!r} is neither a file nor a generator spec")
    return gmod.parse_family(source)


def parse_rational(value) -> Fraction:
    try:
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a number: {value!r}") from None


def parse_float_list(value) -> list[float]:
    if isinstance(value, (list, tuple)):
        return [float(v) for v in value]
    return [float(v) for v in str(value).split(",") if v.strip()]


def _positive(name: str, value, allow_zero: bool = False):
    if value is None:
        raise UsageError(f"--{name} is required")
    if value < 0 or (value == 0 and not allow_zero):
        raise UsageError(f"--{name} must be {'non-negative' if allow_zero else 'positive'}, got {value}")
    return value


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, frozenset):
        return sorted(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

class Output:
    def __init__(self, out_dir: Path, name: str):
        self.dir = out_dir
        self.name = name
        self.files: list[str] = []

    def csv(self, curve: str, header: list[str], rows) -> str:
        path = self.dir / f"{self.name}_{curve}.csv"
        write_csv(path, header, rows)
        self.files.append(path.name)
        return path.name


def write_csv(path: Path, header: list[str], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(x) for x in row])


def _cell(x):
    if isinstance(x, float):
        return repr(x)
    return x


def emit_plotdata(results: dict, out_dir: str | Path, name: str) -> list[str]:
    """Write one CSV per curve found in ``results``:

    ``tv`` -> T, tv; ``distances`` (replicas x steps) -> replica, step,
    distance; ``histogram`` {value: count} -> bin_lo, bin_hi, count;
    ``sweep`` rows -> C, zeta, xi, t_bound, t_actual, contained.
    """
    out = Output(Path(out_dir), name)
    if "tv" in results:
        out.csv("tv", ["T", "tv"], enumerate(results["tv"]))
    if "distances" in results:
        d = np.asarray(results["distances"])
        out.csv(
            "distance",
            ["replica", "step", "distance"],
            ((r, t, int(d[r, t])) for r in range(d.shape[0]) for t in range(d.shape[1])),
        )
    if "histogram" in results:
        out.csv("histogram", ["bin_lo", "bin_hi", "count"], ((a, a + 1, c) for a, c in sorted(results["histogram"].items())))
    if "sweep" in results:
        cols = ["C", "zeta", "xi", "t_bound", "t_actual", "contained"]
        out.csv("sweep", cols, ([row[c] for c in cols] for row in results["sweep"]))
    return out.files


# ---------------------------------------------------------------------------
# Subcommands: each takes the resolved config and returns (results, curves, ok)
# ---------------------------------------------------------------------------

def _coloring_start(g, k, spec, shifted: bool):
    if spec is None:
        X = coloring.greedy_proper_coloring(g, k)
        if shifted:
            X = tuple(c % k + 1 for c in X)
        return X
    return coloring.validate_coloring(g, k, coloring.loads(spec))


def cmd_sample_colorings(cfg: dict):
    g = load_graph(cfg["graph"])
    k = int(_positive("k", cfg["k"]))
    coloring.check_palette(g, k)
    steps = int(_positive("steps", cfg["steps"], allow_zero=True))
    m = int(_positive("replicas", cfg["replicas"]))
    rng = make_rng(cfg["seed"], STREAM_SAMPLE)
    start = np.tile(np.array(_coloring_start(g, k, cfg.get("start"), False), dtype=np.int64), (m, 1))
    states = coloring.glauber_batch(g, k, start, steps, rng)
    mins = coloring.batch_min_available(g, k, states)
    proper = [coloring.is_proper(g, tuple(int(c) for c in row)) for row in states]
    hist = {int(a): int(c) for a, c in zip(*np.unique(mins, return_counts=True))}
    results = {
        "proper_fraction": float(np.mean(proper)),
        "min_available_hist": hist,
        "samples": [coloring.dumps(row.tolist()) for row in states[: cfg["keep"]]],
    }
    return results, {"histogram": hist}, True


def cmd_sample_hardcore(cfg: dict):
    g = load_graph(cfg["graph"])
    lam = parse_rational(cfg["lambda"])
    _positive("lambda", lam)
    steps = int(_positive("steps", cfg["steps"], allow_zero=True))
    m = int(_positive("replicas", cfg["replicas"]))
    rng = make_rng(cfg["seed"], STREAM_SAMPLE)
    occ = hardcore.hardcore_batch(g, float(lam), np.zeros((m, g.n), dtype=bool), steps, rng)
    sizes = occ.sum(axis=1)
    hist = {int(a): int(c) for a, c in zip(*np.unique(sizes, return_counts=True))}
    results = {
        "mean_size": float(sizes.mean()),
        "size_hist": hist,
        "samples": [hardcore.dumps(np.flatnonzero(row).tolist()) for row in occ[: cfg["keep"]]],
    }
    return results, {"histogram": hist}, True


def _coupled_summary(d: np.ndarray) -> dict:
    met = d == 0
    return {
        "mean_distance": d.mean(axis=0).tolist(),
        "disagreement_rate": (~met).mean(axis=0).tolist(),
        "met_fraction": float(met[:, -1].mean()),
    }


def cmd_couple_colorings(cfg: dict):
    g = load_graph(cfg["graph"])
    k = int(_positive("k", cfg["k"]))
    coloring.check_palette(g, k)
    steps = int(_positive("steps", cfg["steps"], allow_zero=True))
    m = int(_positive("replicas", cfg["replicas"]))
    X = _coloring_start(g, k, cfg.get("x0"), False)
    Y = _coloring_start(g, k, cfg.get("y0"), True)
    rng = make_rng(cfg["seed"], STREAM_COUPLE)
    d = coupling.run_coupled_replicas(
        np.array(X), np.array(Y), lambda xs, ys, r: coloring.jerrum_coupled_batch(g, k, xs, ys, r), steps, m, rng
    )
    results = {"x0": coloring.dumps(X), "y0": coloring.dumps(Y), **_coupled_summary(d)}
    eps = coloring.jerrum_contraction(g.n, gmod.max_degree(g), k)
    if eps is not None:
        results["worst_case_eps"] = eps
        results["theorem31_raw"] = [coupling.theorem31_bound(float(eps), 0.0, t, g.n)[0] for t in range(steps + 1)]
    return results, {"distances": d}, True


def _greedy_maximal_set(g) -> frozenset:
    X: set[int] = set()
    for v in range(g.n):
        if not any(w in X for w in g.adjacency[v]):
            X.add(v)
    return frozenset(X)


def cmd_couple_hardcore(cfg: dict):
    g = load_graph(cfg["graph"])
    lam = parse_rational(cfg["lambda"])
    _positive("lambda", lam)
    steps = int(_positive("steps", cfg["steps"], allow_zero=True))
    m = int(_positive("replicas", cfg["replicas"]))
    X = frozenset() if cfg.get("x0") is None else hardcore.loads(cfg["x0"])
    Y = _greedy_maximal_set(g) if cfg.get("y0") is None else hardcore.loads(cfg["y0"])
    for S in (X, Y):
        if not hardcore.is_independent(g, S):
            raise UsageError(f"start state {sorted(S)} is not an independent set")
    xs0 = np.zeros(g.n, dtype=bool)
    xs0[list(X)] = True
    ys0 = np.zeros(g.n, dtype=bool)
    ys0[list(Y)] = True
    rng = make_rng(cfg["seed"], STREAM_COUPLE)
    d = coupling.run_coupled_replicas(
        xs0, ys0, lambda xs, ys, r: hardcore.maximal_coupled_batch(g, float(lam), xs, ys, r), steps, m, rng
    )
    results = {"x0": hardcore.dumps(X), "y0": hardcore.dumps(Y), **_coupled_summary(d)}
    eps = hardcore.hc_contraction(g.n, gmod.max_degree(g), lam)
    if eps is not None:
        results["worst_case_eps"] = eps
        results["theorem31_raw"] = [coupling.theorem31_bound(float(eps), 0.0, t, g.n)[0] for t in range(steps + 1)]
    return results, {"distances": d}, True


def cmd_verify_lemma21(cfg: dict):
    g = load_graph(cfg["graph"])
    rng = make_rng(cfg["seed"], STREAM_VERIFY)
    rep = coloring.verify_lemma21(
        g, int(cfg["k"]), float(cfg["beta"]), int(cfg["samples"]), rng,
        sampler=cfg["sampler"], burn_in=cfg.get("burn_in"), exact_reference=cfg.get("exact_reference"),
    )
    results = {
        "threshold": rep.threshold,
        "bound": rep.bound,
        "empirical_rate": rep.empirical_rate,
        "exact_rate": rep.exact_rate,
        "burn_in": rep.burn_in,
        "empirical_hist": rep.empirical_hist,
        "exact_hist": rep.exact_hist,
        "passed": rep.passed,
    }
    ok = rep.passed and (rep.exact_rate is None or rep.exact_rate <= rep.bound)
    return results, {"histogram": rep.empirical_hist}, ok


def cmd_verify_lemma23(cfg: dict):
    g = load_graph(cfg["graph"])
    k = int(_positive("k", cfg["k"]))
    betas = None if cfg.get("beta") is None else [parse_rational(b) for b in parse_float_list(cfg["beta"])]
    pairs = cfg.get("pairs")
    if pairs is None and k**g.n > 2000:
        raise exact.CapExceeded(f"{k}^{g.n} colorings is too many for an exhaustive pair check; pass --pairs")
    rng = make_rng(cfg["seed"], STREAM_VERIFY) if pairs is not None else None
    rep = coloring.check_lemma23(g, k, betas=betas, pairs=pairs, rng=rng)
    results = {
        "pairs_checked": rep.pairs_checked,
        "hypothesis_pairs": rep.hypothesis_pairs,
        "violations": len(rep.violations),
        "worst_ratio": rep.worst_ratio,
        "first_violations": [list(map(_jsonable, v)) for v in rep.violations[:10]],
    }
    return results, {}, rep.passed


def cmd_verify_lemma42(cfg: dict):
    g = load_graph(cfg["graph"])
    rng = make_rng(cfg["seed"], STREAM_VERIFY)
    rep = hardcore.verify_lemma42(
        g, float(parse_rational(cfg["lambda"])), float(cfg["zeta"]), float(cfg["xi"]), int(cfg["samples"]), rng,
        sampler=cfg["sampler"], burn_in=cfg.get("burn_in"), exact_reference=cfg.get("exact_reference"),
    )
    results = {
        "mu": rep.mu,
        "window": list(rep.window),
        "bound": rep.bound,
        "empirical_rate": rep.empirical_rate,
        "exact_rate": rep.exact_rate,
        "burn_in": rep.burn_in,
        "empirical_min_hist": rep.empirical_min_hist,
        "empirical_max_hist": rep.empirical_max_hist,
        "exact_min_hist": rep.exact_min_hist,
        "exact_max_hist": rep.exact_max_hist,
        "passed": rep.passed,
    }
    ok = rep.passed and (rep.exact_rate is None or rep.exact_rate <= rep.bound)
    return results, {"histogram": rep.empirical_min_hist}, ok


def cmd_verify_lemma48(cfg: dict):
    g = load_graph(cfg["graph"])
    lam = parse_rational(cfg["lambda"])
    _positive("lambda", lam)
    zetas = None if cfg.get("zeta") is None else [parse_rational(z) for z in parse_float_list(cfg["zeta"])]
    n_sets = len(exact.enumerate_independent_sets(g, cap=cfg["cap"]))
    if n_sets * n_sets > 10**6:
        raise exact.CapExceeded(f"{n_sets}^2 pairs exceed the exhaustive check cap")
    rep = hardcore.check_lemma48(g, lam, zetas=zetas)
    results = {
        "pairs_checked": rep.pairs_checked,
        "hypothesis_pairs": rep.hypothesis_pairs,
        "violations": len(rep.violations),
        "worst_ratio": rep.worst_ratio,
    }
    return results, {}, rep.passed


def cmd_fixed_point_sweep(cfg: dict):
    zetas = parse_float_list(cfg["zetas"])
    xis = parse_float_list(cfg["xis"])
    rows = []
    ok = True
    for zeta in zetas:
        top = (1 - zeta) * math.e
        for C in sorted({1.0, (1 + top) / 2, top}):
            for xi in xis:
                run = fixed_point.iterate_until_contained(C, zeta, xi)
                rows.append({
                    "C": C, "zeta": zeta, "xi": xi, "t_bound": run.t_bound, "t_actual": run.t_actual,
                    "contained": run.within_bound, "in_hypothesis": run.in_hypothesis,
                })
                if run.in_hypothesis and not run.within_bound:
                    ok = False
    results = {
        "cells": len(rows),
        "all_within_bound": all(r["contained"] for r in rows),
        "alpha": fixed_point.solve_alpha(),
    }
    return results, {"sweep": rows}, ok


def cmd_anneal(cfg: dict):
    g = load_graph(cfg["graph"])
    lam = parse_rational(cfg["lambda"])
    delta = float(cfg["delta"])
    runs = int(_positive("runs", cfg["runs"]))
    mode = cfg["mode"]
    if mode == "practical" and cfg.get("ti") in (None, "calibrate"):
        schedule = annealing.calibrate_steps(g, lam, delta)
    elif mode == "practical":
        ti = cfg["ti"]
        steps = int(ti) if isinstance(ti, int) or str(ti).isdigit() else [int(s) for s in parse_float_list(ti)]
        schedule = annealing.build_schedule(g.n, lam, delta, mode="practical", steps=steps)
    else:
        schedule = annealing.build_schedule(g.n, lam, delta, zeta=cfg.get("zeta"), mode=mode)
    results = {"schedule": schedule.to_dict(), "total_steps": sum(schedule.steps)}
    if mode == "paper" and sum(schedule.steps) * runs > cfg["max_work"]:
        results["note"] = "schedule from the worst-case step bound reported only; raise --max-work to run it"
        return results, {}, True
    rng = make_rng(cfg["seed"], STREAM_ANNEAL)
    occ = annealing.annealed_samples(g, schedule, runs, rng)
    sizes = occ.sum(axis=1)
    hist = {int(a): int(c) for a, c in zip(*np.unique(sizes, return_counts=True))}
    results["size_hist"] = hist
    ok = True
    try:
        space = exact.enumerate_independent_sets(g, cap=cfg["cap"])
    except exact.CapExceeded:
        space = None
    if space is not None:
        pi = np.array([float(p) for p in exact.gibbs(space, lam)])
        counts = np.zeros(len(space))
        for row in occ:
            counts[space.index[frozenset(np.flatnonzero(row).tolist())]] += 1
        emp = counts / runs
        slack = 0.5 * float(np.sum(3 * np.sqrt(pi * (1 - pi) / runs)))
        tv = exact.tv_distance(emp, pi)
        results.update({"empirical_tv": tv, "slack": slack, "within_delta": tv <= delta + slack})
        if mode == "practical" and cfg.get("ti") in (None, "calibrate"):
            _, law = annealing.annealed_distribution(g, schedule)
            results["exact_output_tv"] = exact.tv_distance(law, pi)
            ok = tv <= delta + slack
    return results, {"histogram": hist}, ok


def cmd_exact_tv(cfg: dict):
    g = load_graph(cfg["graph"])
    chain_kind = cfg["chain"]
    if chain_kind in ("coloring", "colorings"):
        chain = exact.coloring_chain(g, int(_positive("k", cfg["k"])))
    elif chain_kind == "hardcore":
        lam = parse_rational(cfg["lambda"])
        _positive("lambda", lam)
        chain = exact.hardcore_chain(g, lam, exact=True)
    else:
        raise UsageError(f"unknown chain {chain_kind!r}; use coloring or hardcore")
    T = int(_positive("T", cfg["T"], allow_zero=True))
    curve = exact.tv_curve(chain, T, starts=cfg["starts"])
    results = {
        "states": len(chain.space),
        "final_tv": float(curve[-1]),
        "non_increasing": bool(np.all(np.diff(curve) <= 1e-15)),
        "mixing_time": exact.exact_mixing_time(chain, float(cfg["delta"]), starts=cfg["starts"]),
    }
    return results, {"tv": curve.tolist()}, results["non_increasing"]


def cmd_bounds(cfg: dict):
    theorem = str(cfg["theorem"])
    diam = int(_positive("diam", cfg["diam"]))
    eps = float(_positive("eps", cfg["eps"]))
    delta = cfg.get("delta")
    if theorem == "1.1":
        results = {"T": coupling.mixing_time_theorem11(diam, float(_positive("delta", delta)), eps)}
    elif theorem in ("1.2", "1.3"):
        fn = coupling.mixing_time_theorem12 if theorem == "1.2" else coupling.mixing_time_theorem13
        b = fn(diam, float(_positive("delta", delta)), eps)
        results = {"T": b.steps, "pi_S_threshold": b.pi_s_threshold}
    elif theorem == "3.1":
        raw, clamped = coupling.theorem31_bound(eps, float(cfg.get("delta_bad") or 0.0), int(_positive("T", cfg["T"], True)), diam)
        results = {"raw": raw, "clamped": clamped}
    else:
        raise UsageError(f"unknown theorem {theorem!r}; use 1.1, 1.2, 1.3 or 3.1")
    return results, {}, True


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_COMMON = {"seed": 0, "keep": 10, "cap": exact.INDEPENDENT_SETS_CAP}

# name -> (handler, stream key, defaults, flags); flags are (dest, type, help)
_SUBCOMMANDS: dict[str, tuple[Callable, int | None, dict, list]] = {
    "sample-colorings": (cmd_sample_colorings, STREAM_SAMPLE, {"steps": 1000, "replicas": 100}, [
        ("graph", str, "edge-list file or generator spec"), ("k", int, "palette size"),
        ("steps", int, "Glauber steps per replica"), ("replicas", int, "independent chains"),
        ("start", str, "start coloring, space separated (default greedy proper)"),
    ]),
    "sample-hardcore": (cmd_sample_hardcore, STREAM_SAMPLE, {"steps": 1000, "replicas": 100}, [
        ("graph", str, "edge-list file or generator spec"), ("lambda", str, "fugacity"),
        ("steps", int, "Glauber steps per replica"), ("replicas", int, "independent chains"),
    ]),
    "couple-colorings": (cmd_couple_colorings, STREAM_COUPLE, {"steps": 50, "replicas": 1000}, [
        ("graph", str, "edge-list file or generator spec"), ("k", int, "palette size"),
        ("steps", int, "coupled steps"), ("replicas", int, "coupled pairs"),
        ("x0", str, "first start coloring"), ("y0", str, "second start coloring"),
    ]),
    "couple-hardcore": (cmd_couple_hardcore, STREAM_COUPLE, {"steps": 50, "replicas": 1000}, [
        ("graph", str, "edge-list file or generator spec"), ("lambda", str, "fugacity"),
        ("steps", int, "coupled steps"), ("replicas", int, "coupled pairs"),
        ("x0", str, "first start set, e.g. '0 2' or '-'"), ("y0", str, "second start set"),
    ]),
    "verify-lemma21": (cmd_verify_lemma21, STREAM_VERIFY, {"beta": 0.5, "samples": 10000, "sampler": "mcmc"}, [
        ("graph", str, "edge-list file or generator spec"), ("k", int, "palette size"),
        ("beta", float, "slack beta"), ("samples", int, "samples M"),
        ("sampler", str, "exact or mcmc"), ("burn_in", int, "Glauber steps per mcmc sample"),
    ]),
    "verify-lemma23": (cmd_verify_lemma23, STREAM_VERIFY, {}, [
        ("graph", str, "edge-list file or generator spec"), ("k", int, "palette size"),
        ("beta", str, "comma-separated betas (default: supremum per state)"),
        ("pairs", int, "random pairs instead of all pairs"),
    ]),
    "verify-lemma42": (cmd_verify_lemma42, STREAM_VERIFY, {"samples": 10000, "sampler": "mcmc"}, [
        ("graph", str, "edge-list file or generator spec"), ("lambda", str, "fugacity"),
        ("zeta", float, "zeta"), ("xi", float, "window half-width xi"), ("samples", int, "samples M"),
        ("sampler", str, "exact or mcmc"), ("burn_in", int, "Glauber steps per mcmc sample"),
    ]),
    "verify-lemma48": (cmd_verify_lemma48, None, {}, [
        ("graph", str, "edge-list file or generator spec"), ("lambda", str, "rational fugacity"),
        ("zeta", str, "comma-separated zetas (default: supremum per pair)"),
    ]),
    "fixed-point-sweep": (cmd_fixed_point_sweep, None, {
        "zetas": [round(0.1 * i, 10) for i in range(1, 10)], "xis": [0.01, 0.05, 0.1, 0.5],
    }, [
        ("zetas", str, "comma-separated zetas"), ("xis", str, "comma-separated xis"),
    ]),
    "anneal": (cmd_anneal, STREAM_ANNEAL, {"mode": "practical", "runs": 1000, "delta": 0.05, "max_work": 10**8}, [
        ("graph", str, "edge-list file or generator spec"), ("lambda", str, "target fugacity"),
        ("delta", float, "target accuracy"), ("zeta", float, "zeta (mode paper)"),
        ("mode", str, "paper (worst-case step bound) or practical"), ("ti", str, "steps per level: int, list, or 'calibrate'"),
        ("runs", int, "independent annealing runs"), ("max_work", int, "step budget for mode paper"),
    ]),
    "exact-tv": (cmd_exact_tv, None, {"T": 100, "delta": 0.01, "starts": "recurrent"}, [
        ("graph", str, "edge-list file or generator spec"), ("chain", str, "coloring or hardcore"),
        ("k", int, "palette size"), ("lambda", str, "fugacity"), ("T", int, "curve length"),
        ("delta", float, "accuracy for the mixing time"), ("starts", str, "recurrent or all"),
    ]),
    "bounds": (cmd_bounds, None, {}, [
        ("theorem", str, "1.1, 1.2, 1.3 or 3.1"), ("diam", int, "diameter"), ("delta", float, "accuracy"),
        ("eps", float, "contraction epsilon"), ("delta_bad", float, "bad-set mass (3.1)"), ("T", int, "steps (3.1)"),
    ]),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="glauberkit", description="Glauber dynamics experiments and verifications.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True
    for name, (_, _, _, flags) in _SUBCOMMANDS.items():
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON file of parameters; flags override it")
        p.add_argument("--seed", type=int, help="64-bit master seed")
        p.add_argument("--out", help=f"output directory (default ${OUT_DIR_ENV} or .)")
        p.add_argument("--keep", type=int, help="samples echoed in the JSON")
        p.add_argument("--cap", type=int, help="state-space enumeration cap")
        for dest, typ, text in flags:
            p.add_argument("--" + dest.replace("_", "-"), dest=dest, type=typ, help=text)
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    name = args.command
    _, stream, defaults, flags = _SUBCOMMANDS[name]
    cfg = {**_COMMON, **defaults}
    cfg.update({dest: None for dest, _, _ in flags if dest not in cfg})
    if args.config:
        try:
            with open(args.config) as fh:
                from_file = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(from_file, dict):
            raise UsageError("config file must hold a JSON object")
        unknown = set(from_file) - set(cfg) - {"out"}
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        cfg.update(from_file)
    for key in list(cfg) + ["out"]:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    cfg["command"] = name
    cfg["seed"] = int(cfg["seed"])
    if not 0 <= cfg["seed"] < 2**64:
        raise UsageError("seed must be a 64-bit unsigned integer")
    if stream is not None:
        cfg["stream_keys"] = [stream]
    return cfg


def run(cfg: dict) -> int:
    """Execute a resolved config; writes artifacts and returns the exit code."""
    name = cfg["command"]
    handler = _SUBCOMMANDS[name][0]
    out_dir = Path(cfg.get("out") or os.environ.get(OUT_DIR_ENV) or ".")
    results, curves, ok = handler(cfg)
    files = emit_plotdata(curves, out_dir, name.replace("-", "_"))
    echoed = {k: v for k, v in cfg.items() if k != "out"}
    doc = {
        "format_version": FORMAT_VERSION,
        "config": _jsonable(echoed),
        "results": _jsonable(results),
        "artifacts": files,
        "ok": bool(ok),
    }
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / f"{name.replace('-', '_')}.json").write_text(text)
    sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_FAILED


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = resolve_config(args)
        return run(cfg)
    except exact.CapExceeded as exc:
        print(f"glauberkit: cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except AssertionError as exc:
        print(f"glauberkit: check failed: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except exact.NonErgodic as exc:
        print(f"glauberkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, TypeError) as exc:
        print(f"glauberkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
