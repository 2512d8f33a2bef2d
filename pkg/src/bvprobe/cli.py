"""Command-line driver: one subcommand per verification.

Every subcommand writes a table (CSV with a ``#`` metadata header, or JSON
with a ``meta`` object) and exits with 0 when all of its checks hold, 1 when
one fails and 2 on a usage error. Output depends only on the arguments and
``--seed``. Per-sample random streams are spawned from one
``numpy.random.SeedSequence``, so results do not depend on how work is
split across processes.
"""
from __future__ import annotations

import argparse
import io
import itertools
import json
import os
import sys
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Callable

import numpy as np

from . import __version__
from .coherence import frontier_search, theorem2_frontier
from .entanglement import (
    Dqc1Instance,
    WStateSpec,
    build_w_state,
    control_offdiagonal,
    dqc1_bound_check,
    dqc1_bound_closed_form,
    geometric_entanglement,
    grid_product_overlap,
    max_coherence_deficit,
    theta_basis,
)
from .exceptions import BVProbeError
from .guessing import (
    performance_closed_minus,
    performance_oracle_sdp,
    performance_theorem1,
    phase_ensemble,
    povm_from_robustness,
    product_performance,
    product_povm,
)
from .linalg import tensor_all
from .model import (
    DitString,
    OracleSpec,
    all_strings,
    classical_guess_probability,
    classical_monte_carlo,
    max_coherent_state,
    minus_state,
    oracle_eigen_action_check,
    plus_state,
)
from .sampling import haar_state, haar_unitary, random_density_matrix

SIG_DIGITS = 12


class UsageError(Exception):
    pass


@dataclass
class Result:
    columns: list[str]
    rows: list[dict]
    checks: list[tuple[str, bool]] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    @property
    def failed(self) -> list[str]:
        return [name for name, ok in self.checks if not ok]


def _threads() -> int:
    raw = os.environ.get("BVPROBE_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"BVPROBE_THREADS must be an integer, got {raw!r}")
    return max(1, min(n, os.cpu_count() or 1))


def _pmap(fn: Callable, items: list) -> list:
    workers = _threads()
    if workers == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def _streams(seed: int, count: int) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence(seed).spawn(count)


def _positive(name: str, value: int, lo: int = 1, hi: int | None = None) -> int:
    if value < lo or (hi is not None and value > hi):
        bound = f"[{lo}, {hi}]" if hi is not None else f">= {lo}"
        raise UsageError(f"--{name} must be {bound}, got {value}")
    return value


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


# ---------------------------------------------------------------------------
# per-sample workers (top level so they pickle)


def _theorem1_sample(ss, n: int, tol: float) -> tuple[float, float]:
    mu = haar_state(2 ** (n + 1), np.random.default_rng(ss))
    return performance_theorem1(mu), performance_oracle_sdp(mu, 2, tol).sdp_value


def _eq14_sample(ss, D: int, n: int, tol: float) -> tuple[float, float]:
    sigma = random_density_matrix(D**n, np.random.default_rng(ss))
    initial = np.kron(minus_state(D).density().matrix, sigma)
    return performance_closed_minus(sigma, D, tol), performance_oracle_sdp(initial, D, tol).sdp_value


def _povm_sample(ss, D: int, n: int, tol: float) -> dict:
    sigma = random_density_matrix(D**n, np.random.default_rng(ss))
    povm, r = povm_from_robustness(sigma, D, tol)
    labels, states = phase_ensemble(sigma, D)
    achieved = povm.success_probability(states, np.full(len(states), 1.0 / len(states)))
    initial = np.kron(minus_state(D).density().matrix, sigma)
    rep = performance_oracle_sdp(initial, D, tol)
    return {
        "robustness": r,
        "povm_value": achieved,
        "sdp_value": rep.sdp_value,
        "completeness_residual": povm.completeness_residual(),
        "min_eigenvalue": povm.min_eigenvalue(),
    }


def _product_sample(ss, n: int, tol: float) -> tuple[float, float, float]:
    rng = np.random.default_rng(ss)
    phis = [haar_state(2, rng) for _ in range(n)]
    povm = product_povm(phis)
    psi = tensor_all([np.asarray(p) for p in phis])
    labels, states = phase_ensemble(np.outer(psi, psi.conj()))
    achieved = povm.success_probability(states, np.full(len(states), 1.0 / len(states)))
    initial = np.kron(minus_state(2).amplitudes, psi)
    sdp = performance_oracle_sdp(initial, 2, tol).sdp_value
    return achieved, product_performance(phis), sdp


def _wstate_sample(ss, n: int, restarts: int) -> tuple[float, float]:
    rng = np.random.default_rng(ss)
    spec = WStateSpec.random_theta(n, rng)
    ge = geometric_entanglement(build_w_state(spec), restarts=restarts, seed=rng).value
    return max_coherence_deficit(spec), ge


# ---------------------------------------------------------------------------
# subcommands


def cmd_theorem1_check(args) -> Result:
    _positive("n", args.n, 1, 3)
    _positive("samples", args.samples)
    work = partial(_theorem1_sample, n=args.n, tol=args.tol)
    vals = _pmap(work, _streams(args.seed, args.samples))
    rows = [
        {"sample_id": i, "closed_form": c, "sdp_value": s, "abs_diff": abs(c - s)}
        for i, (c, s) in enumerate(vals)
    ]
    worst = max(r["abs_diff"] for r in rows)
    return Result(
        ["sample_id", "closed_form", "sdp_value", "abs_diff"],
        rows,
        [("closed form matches discrimination SDP within 1e-5", worst <= 1e-5)],
        {"max_abs_diff": worst},
    )


def cmd_eq14_check(args) -> Result:
    _positive("D", args.D, 2)
    _positive("n", args.n, 1)
    _positive("samples", args.samples)
    if args.D ** (args.n + 1) > 256 or args.D**args.n > 64:
        raise UsageError("D**(n+1) must be at most 256 and D**n at most 64")
    work = partial(_eq14_sample, D=args.D, n=args.n, tol=args.tol)
    vals = _pmap(work, _streams(args.seed, args.samples))
    rows = [
        {"sample_id": i, "closed_form": c, "sdp_value": s, "abs_diff": abs(c - s)}
        for i, (c, s) in enumerate(vals)
    ]
    worst = max(r["abs_diff"] for r in rows)
    return Result(
        ["sample_id", "closed_form", "sdp_value", "abs_diff"],
        rows,
        [("(1 + R(sigma)) / D**N matches discrimination SDP within 1e-5", worst <= 1e-5)],
        {"max_abs_diff": worst},
    )


def cmd_classical_baseline(args) -> Result:
    _positive("n", args.n, 1, 6)
    _positive("trials", args.trials)
    strings = list(all_strings(2, args.n))
    streams = _streams(args.seed, len(strings))
    rows = []
    ok = True
    for x, ss in zip(strings, streams):
        exact = classical_guess_probability(args.n, x)
        est = classical_monte_carlo(args.n, x, args.trials, np.random.default_rng(ss))
        sigma = np.sqrt(exact * (1 - exact) / args.trials)
        z = (est - exact) / sigma if sigma > 0 else 0.0
        ok &= abs(est - exact) <= 3 * sigma
        rows.append({"x": str(x), "exact": exact, "estimate": est, "sigma": sigma, "z": z})
    classical_max = max(r["exact"] for r in rows)
    mu = tensor_all([minus_state(2)] + [plus_state(2)] * args.n)
    quantum = performance_theorem1(mu)
    return Result(
        ["x", "exact", "estimate", "sigma", "z"],
        rows,
        [
            ("Monte Carlo within 3 binomial sigma of exact value", bool(ok)),
            ("quantum optimum exceeds classical maximum", quantum > classical_max),
        ],
        {"classical_max": classical_max, "quantum_optimum": quantum},
    )


def cmd_povm_verify(args) -> Result:
    _positive("D", args.D, 2)
    _positive("n", args.n, 1)
    _positive("samples", args.samples)
    if args.D ** (args.n + 1) > 256 or args.D**args.n > 64:
        raise UsageError("D**(n+1) must be at most 256 and D**n at most 64")
    work = partial(_povm_sample, D=args.D, n=args.n, tol=args.tol)
    vals = _pmap(work, _streams(args.seed, args.samples))
    rows = []
    for i, v in enumerate(vals):
        v = dict(v)
        v["abs_diff"] = abs(v["povm_value"] - v["sdp_value"])
        rows.append({"sample_id": i, **v})
    bound = max(10 * args.tol, 1e-8)
    return Result(
        ["sample_id", "robustness", "povm_value", "sdp_value", "abs_diff", "completeness_residual", "min_eigenvalue"],
        rows,
        [
            ("POVM elements sum to identity", all(r["completeness_residual"] <= bound for r in rows)),
            ("POVM elements are positive", all(r["min_eigenvalue"] >= -bound for r in rows)),
            ("robustness POVM attains the SDP optimum within 1e-5", all(r["abs_diff"] <= 1e-5 for r in rows)),
        ],
        {"max_abs_diff": max(r["abs_diff"] for r in rows)},
    )


def cmd_product_povm_demo(args) -> Result:
    _positive("n", args.n, 1, 5)
    _positive("samples", args.samples)
    work = partial(_product_sample, n=args.n, tol=args.tol)
    vals = _pmap(work, _streams(args.seed, args.samples))
    rows = [
        {"sample_id": i, "product_povm": a, "formula": f, "sdp_value": s, "abs_diff": abs(a - s)}
        for i, (a, f, s) in enumerate(vals)
    ]
    return Result(
        ["sample_id", "product_povm", "formula", "sdp_value", "abs_diff"],
        rows,
        [
            ("product POVM attains prod (1 + R_i) / 2 within 1e-8", all(abs(r["product_povm"] - r["formula"]) <= 1e-8 for r in rows)),
            ("product POVM matches global SDP within 1e-5", all(r["abs_diff"] <= 1e-5 for r in rows)),
        ],
        {"max_abs_diff": max(r["abs_diff"] for r in rows)},
    )


def cmd_purity_frontier(args) -> Result:
    _positive("d", args.d, 2, 64)
    _positive("samples", args.samples)
    gammas = args.gamma
    for g in gammas:
        if not 1.0 / args.d < g <= 1.0:
            raise UsageError(f"gamma {g} outside (1/{args.d}, 1]")
    streams = _streams(args.seed, len(gammas))
    rows = [frontier_search(args.d, g, args.samples, np.random.default_rng(ss), tol=args.tol) for g, ss in zip(gammas, streams)]
    for r in rows:
        r.pop("best_random_R")
    top = theorem2_frontier(1.0, args.d).optimal_performance
    low = theorem2_frontier(1.0 / args.d + 1e-14, args.d).optimal_performance
    return Result(
        ["gamma", "lambda1", "lambda2", "frontier_P", "best_random_P"],
        rows,
        [
            ("no random state beats the frontier by more than 1e-4", all(r["best_random_P"] <= r["frontier_P"] + 1e-4 for r in rows)),
            ("frontier reaches 1 at gamma = 1", abs(top - 1) <= 1e-6),
            ("frontier tends to 1/d as gamma -> 1/d", abs(low - 1.0 / args.d) <= 1e-6),
        ],
        {"P_at_gamma_1": top, "P_near_gamma_min": low},
    )


def cmd_wstate_audit(args) -> Result:
    _positive("n", args.n, 2, 6)
    _positive("samples", args.samples)
    work = partial(_wstate_sample, n=args.n, restarts=args.restarts)
    vals = _pmap(work, _streams(args.seed, args.samples))
    rows = [{"sample_id": i, "deficit": d, "geometric_entanglement": g} for i, (d, g) in enumerate(vals)]
    checks = []
    summary = {"min_deficit": min(r["deficit"] for r in rows)}
    std = build_w_state(WStateSpec.standard(args.n))
    ge_std = geometric_entanglement(std, restarts=50, seed=args.seed).value
    summary["standard_geometric_entanglement"] = ge_std
    if args.n <= 4:
        grid = 1 - grid_product_overlap(std.amplitudes, args.n)
        summary["standard_geometric_entanglement_grid"] = grid
        checks.append(("alternating and grid geometric entanglement agree within 1e-4", abs(ge_std - grid) <= 1e-4))
    if args.n == 2:
        witness = WStateSpec(2, (0.0, np.pi / 2), (theta_basis(0.0), theta_basis(0.0)))
        summary["witness_deficit"] = max_coherence_deficit(witness)
        checks.append(("a two-qubit W state is maximally coherent", summary["witness_deficit"] <= 1e-10))
    else:
        checks.append(("every sampled W state stays below maximal coherence by 0.01", summary["min_deficit"] > 0.01))
    return Result(["sample_id", "deficit", "geometric_entanglement"], rows, checks, summary)


def cmd_qudit_check(args) -> Result:
    _positive("D", args.D, 2)
    _positive("n", args.n, 1)
    _positive("samples", args.samples)
    if args.D ** (args.n + 1) > 256 or args.D**args.n > 64:
        raise UsageError("D**(n+1) must be at most 256 and D**n at most 64")
    D, n = args.D, args.n
    zero = DitString.zeros(D, n)
    secret = DitString.from_index(D**n - 1, D, n)
    eig_err = max(oracle_eigen_action_check(OracleSpec(D, n, s)) for s in (zero, secret))
    psi = max_coherent_state(D, n)
    top = performance_oracle_sdp(np.kron(minus_state(D).amplitudes, psi.amplitudes), D, args.tol).sdp_value
    rows = [{"sample_id": -1, "kind": "max-coherent", "closed_form": 1.0, "sdp_value": top, "abs_diff": abs(top - 1.0)}]
    work = partial(_eq14_sample, D=D, n=n, tol=args.tol)
    for i, (c, s) in enumerate(_pmap(work, _streams(args.seed, args.samples))):
        rows.append({"sample_id": i, "kind": "random-mixed", "closed_form": c, "sdp_value": s, "abs_diff": abs(c - s)})
    return Result(
        ["sample_id", "kind", "closed_form", "sdp_value", "abs_diff"],
        rows,
        [
            ("oracle only imprints a phase on the |-_D> register", eig_err <= 1e-12),
            ("maximally coherent qudit input reaches 1", abs(top - 1) <= 1e-8),
            ("qudit closed form matches SDP within 1e-5", all(r["abs_diff"] <= 1e-5 for r in rows)),
        ],
        {"eigen_action_error": eig_err},
    )


def cmd_dqc1_bound(args) -> Result:
    _positive("n", args.n, 1, 6)
    _positive("unitaries", args.unitaries)
    for a in args.alpha:
        if not 0 <= a <= 1:
            raise UsageError(f"alpha {a} outside [0, 1]")
    names = ["relative_entropy", "trace_distance"] if args.distance == "both" else [args.distance.replace("-", "_").replace("rel_", "relative_")]
    streams = _streams(args.seed, args.unitaries)
    unitaries = [haar_unitary(2**args.n, np.random.default_rng(ss)) for ss in streams]
    rows = []
    for alpha in args.alpha:
        for k, u in enumerate(unitaries):
            inst = Dqc1Instance(alpha, args.n, u)
            sig_err = abs(control_offdiagonal(inst) - inst.trace_signal())
            for name in names:
                rep = dqc1_bound_check(inst, name)
                rows.append({
                    "alpha": alpha,
                    "unitary_id": k,
                    "distance": name,
                    "lhs_chain": rep.lhs_chain,
                    "bound": rep.rhs,
                    "closed_form": dqc1_bound_closed_form(alpha, name),
                    "chain_residual": rep.residual,
                    "signal_error": sig_err,
                })
    return Result(
        ["alpha", "unitary_id", "distance", "lhs_chain", "bound", "closed_form", "chain_residual", "signal_error"],
        rows,
        [
            ("equality chain holds within 1e-8", all(r["chain_residual"] <= 1e-8 for r in rows)),
            ("bound equals its closed form within 1e-10", all(abs(r["bound"] - r["closed_form"]) <= 1e-10 for r in rows)),
            ("control coherence equals the trace signal within 1e-10", all(r["signal_error"] <= 1e-10 for r in rows)),
        ],
        {"max_chain_residual": max(r["chain_residual"] for r in rows)},
    )


def cmd_sweep(args) -> Result:
    """Run another subcommand over the cartesian product of ``--grid`` values."""
    grid = []
    for spec in args.grid:
        if "=" not in spec:
            raise UsageError(f"--grid expects name=v1,v2,..., got {spec!r}")
        name, vals = spec.split("=", 1)
        grid.append((name.replace("-", "_"), [v for v in vals.split(",") if v]))
    if not grid:
        raise UsageError("sweep needs at least one --grid")
    cells = list(itertools.product(*[vals for _, vals in grid]))
    streams = _streams(args.seed, len(cells))
    parser = build_parser()
    all_rows, checks, columns = [], [], None
    for cell, ss in zip(cells, streams):
        argv = [args.target, "--seed", str(int(ss.generate_state(1, np.uint32)[0]))]
        for (name, _), val in zip(grid, cell):
            argv += [f"--{name.replace('_', '-')}", val]
        sub = parser.parse_args(argv)
        res = COMMANDS[args.target](sub)
        tag = {name: val for (name, _), val in zip(grid, cell)}
        columns = [n for n, _ in grid] + res.columns
        all_rows += [{**tag, **r} for r in res.rows]
        checks += [(f"{name} [{', '.join(f'{k}={v}' for k, v in tag.items())}]", ok) for name, ok in res.checks]
    return Result(columns, all_rows, checks, {"cells": len(cells)})


COMMANDS: dict[str, Callable[[argparse.Namespace], Result]] = {
    "theorem1-check": cmd_theorem1_check,
    "eq14-check": cmd_eq14_check,
    "classical-baseline": cmd_classical_baseline,
    "povm-verify": cmd_povm_verify,
    "product-povm-demo": cmd_product_povm_demo,
    "purity-frontier": cmd_purity_frontier,
    "wstate-audit": cmd_wstate_audit,
    "qudit-check": cmd_qudit_check,
    "dqc1-bound": cmd_dqc1_bound,
    "sweep": cmd_sweep,
}


# ---------------------------------------------------------------------------
# output


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), f".{SIG_DIGITS}g")
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    return v


def render(res: Result, meta: dict, fmt: str) -> str:
    if fmt == "json":
        doc = {"meta": meta, "summary": res.summary, "rows": res.rows}
        return json.dumps(_jsonable(doc), indent=1) + "\n"
    buf = io.StringIO()
    for k, v in meta.items():
        text = json.dumps(_jsonable(v), sort_keys=True) if isinstance(v, (dict, list)) else _fmt(v)
        buf.write(f"# {k}: {text}\n")
    for k, v in res.summary.items():
        buf.write(f"# summary.{k}: {_fmt(v)}\n")
    buf.write(",".join(res.columns) + "\n")
    for r in res.rows:
        buf.write(",".join(_fmt(r.get(c, "")) for c in res.columns) + "\n")
    return buf.getvalue()


def gnuplot_script(res: Result, data_path: str, command: str) -> str:
    numeric = [c for c in res.columns if res.rows and isinstance(res.rows[0].get(c), (int, float, np.number))]
    x = numeric[0] if numeric else res.columns[0]
    ys = [c for c in numeric if c != x]
    lines = [
        f"# {command}",
        "set datafile separator ','",
        "set key autotitle columnhead",
        f"set xlabel '{x}'",
    ]
    col = {c: i + 1 for i, c in enumerate(res.columns)}
    plots = [f"'{data_path}' using {col[x]}:{col[y]} with linespoints title '{y}'" for y in ys]
    lines.append("plot " + ", \\\n     ".join(plots) if plots else "# no numeric columns to plot")
    return "\n".join(lines) + "\n"


def atomic_write(path: str, text: str) -> None:
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".bvprobe-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bvprobe", description="Verification runs for the probabilistic Bernstein-Vazirani game.")
    p.add_argument("--version", action="version", version=f"bvprobe {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help, samples=None, tol=True):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("--seed", type=int, default=0, help="root seed (default 0)")
        sp.add_argument("-o", "--output", default=None, help="output file (default stdout)")
        sp.add_argument("--format", choices=["csv", "json"], default="csv")
        sp.add_argument("--gnuplot", action="store_true", help="also write OUTPUT.gp")
        sp.add_argument("--record-time", action="store_true", help="add wall time to the metadata")
        if samples is not None:
            sp.add_argument("--samples", type=int, default=samples)
        if tol:
            sp.add_argument("--tol", type=float, default=1e-9, help="solver tolerance in [1e-10, 1e-4]")
        return sp

    sp = add("theorem1-check", "closed form vs SDP for random pure inputs", samples=200)
    sp.add_argument("--n", type=int, default=2)
    sp = add("eq14-check", "(1+R)/D^N vs SDP for |-><-| x sigma", samples=100)
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--D", type=int, default=2)
    sp = add("classical-baseline", "Monte Carlo of the one-query classical guesser", tol=False)
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--trials", type=int, default=100000)
    sp = add("povm-verify", "robustness-derived POVM vs extracted SDP POVM", samples=20)
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--D", type=int, default=2)
    sp = add("product-povm-demo", "non-entangling POVM on product inputs", samples=100)
    sp.add_argument("--n", type=int, default=2)
    sp = add("purity-frontier", "random states vs the bounded-purity optimum", samples=10000)
    sp.add_argument("--d", type=int, default=4)
    sp.add_argument("--gamma", type=_float_list, default=[0.3, 0.5, 0.8])
    sp = add("wstate-audit", "coherence deficit and entanglement of W states", samples=1000, tol=False)
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--restarts", type=int, default=5)
    sp = add("qudit-check", "qudit oracle and closed form vs SDP", samples=20)
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--D", type=int, default=3)
    sp = add("dqc1-bound", "one-clean-qubit distance chain and trace signal", tol=False)
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--alpha", type=_float_list, default=[0.0, 0.01, 0.1, 0.5, 1.0])
    sp.add_argument("--unitaries", type=int, default=20)
    sp.add_argument("--distance", choices=["rel-entropy", "trace-distance", "both"], default="both")
    sp = add("sweep", "run a subcommand over a parameter grid", tol=False)
    sp.add_argument("--target", required=True, choices=[c for c in COMMANDS if c != "sweep"], help="subcommand to run")
    sp.add_argument("--grid", action="append", default=[], help="name=v1,v2,... (repeatable)")
    return p


def run(args: argparse.Namespace) -> int:
    if getattr(args, "tol", None) is not None and not 1e-10 <= args.tol <= 1e-4:
        raise UsageError(f"--tol must lie in [1e-10, 1e-4], got {args.tol}")
    if args.gnuplot and not args.output:
        raise UsageError("--gnuplot needs --output")
    start = time.perf_counter()
    res = COMMANDS[args.command](args)
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("output", "gnuplot", "record_time", "format")}
    meta = {
        "tool": "bvprobe",
        "version": __version__,
        "subcommand": args.command,
        "seed": args.seed,
        "config": config,
        "checks": [{"name": n, "ok": ok} for n, ok in res.checks],
        "status": "fail" if res.failed else "ok",
    }
    if res.failed:
        meta["failed"] = res.failed
    if args.record_time:
        meta["wall_time_s"] = round(time.perf_counter() - start, 3)
    text = render(res, meta, args.format)
    if args.output:
        atomic_write(args.output, text)
        if args.gnuplot:
            atomic_write(args.output + ".gp", gnuplot_script(res, args.output, args.command))
    else:
        sys.stdout.write(text)
    for name in res.failed:
        print(f"bvprobe: check failed: {name}", file=sys.stderr)
    return 1 if res.failed else 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (BVProbeError, ValueError) as exc:
        print(f"bvprobe: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
