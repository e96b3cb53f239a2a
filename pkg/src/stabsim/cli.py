"""Command-line front end: ``stabsim simulate|decomp|gen|cost``.

Output is one ``key: value`` pair per line (or CSV for ``cost thresholds``).
Exit codes: 0 success, 2 bad input, 3 memory cap exceeded, 4 failed
consistency check such as a database entry that does not verify.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import cost as C
from .circuit import CircuitError, ensemble_generate, layerize, load, serialize, stats
from .decomposition import (
    DatabaseError,
    DecompositionError,
    builtin_decomposition,
    load_database,
    parse_target,
    search_decomposition,
    state_label,
    target_matrix,
    verify_decomposition,
)
from .engines import METHODS, CapacityError, EngineError, simulate

EXIT_OK, EXIT_INPUT, EXIT_CAPACITY, EXIT_CONSISTENCY = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _num(v: float) -> str:
    return f"{v + 0.0:.12g}"


def _emit(out, pairs) -> None:
    for k, v in pairs:
        if isinstance(v, float):
            v = _num(v)
        print(f"{k}: {v}", file=out)


# --- simulate --------------------------------------------------------------------


def cmd_simulate(args, out) -> int:
    circ = load(args.circuit)
    x = args.x if args.x is not None else "0" * circ.n
    if len(x) != circ.n or set(x) - {"0", "1"}:
        raise UsageError(f"--x must be a {circ.n}-bit string, got {x!r}")
    amp, trace = simulate(circ, x, args.method, threads=args.threads, mem_cap=args.mem_cap, prune=args.prune)
    _emit(
        out,
        [
            ("method", args.method),
            ("n", circ.n),
            ("x", x),
            ("amplitude_real", amp.real),
            ("amplitude_imag", amp.imag),
            ("probability", abs(amp) ** 2),
            ("inner_products", trace.inner_product_count),
            ("max_live_terms", trace.max_live_terms),
            ("wall_time", trace.wall_time),
        ],
    )
    return EXIT_OK


# --- decomp ---------------------------------------------------------------------------


def _entry(name: str):
    try:
        return builtin_decomposition(name)
    except DecompositionError as exc:
        known = ", ".join(sorted(load_database()))
        raise UsageError(f"{exc}; known entries: {known}") from None


def _show(name: str, d, out) -> None:
    from .decomposition import _pauli_str

    _emit(out, [("gate", name), ("arity", d.arity), ("rank", d.rank), ("source", d.source)])
    for i, t in enumerate(d.terms):
        gens = " ".join(_pauli_str(g, d.arity) for g in t.state.gens)
        c = t.coefficient
        print(f"term_{i}: {_num(c.real)} {_num(c.imag)} | {gens} | {state_label(t.state)}", file=out)


def cmd_decomp(args, out) -> int:
    if args.decomp_cmd == "show":
        _show(args.gate, _entry(args.gate), out)
        return EXIT_OK
    if args.decomp_cmd == "verify":
        names = sorted(load_database()) if args.gate == "all" else [args.gate]
        ok = True
        for name in names:
            d = _entry(name)
            rep = verify_decomposition(d, target_matrix(d.target, d.arity), args.tol)
            ok &= rep.passed
            _emit(out, [("gate", name), ("rank", rep.rank), ("max_error", rep.max_error),
                        ("tolerance", rep.tolerance), ("pass", str(rep.passed).lower())])
        return EXIT_OK if ok else EXIT_CONSISTENCY
    # search
    if args.matrix:
        try:
            u = np.load(args.matrix)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read matrix file: {exc}") from None
    elif args.target:
        word = parse_target(args.target)
        arity = 1 + max(q for _, qs in word for q in qs)
        u = target_matrix(word, arity)
    else:
        raise UsageError("search needs --matrix or --target")
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1] or u.shape[0] not in (2, 4):
        raise UsageError("search needs a 2x2 or 4x4 matrix")
    found = search_decomposition(u, args.max_rank, budget=args.budget, seed=args.seed, tol=args.tol or 1e-9)
    if found is None:
        _emit(out, [("result", "none-found"), ("max_rank", args.max_rank)])
        return EXIT_OK
    print("result: found", file=out)
    _show("search", found, out)
    return EXIT_OK


# --- gen ---------------------------------------------------------------------------


def cmd_gen(args, out) -> int:
    try:
        circ = ensemble_generate(args.family, args.n, args.cycles, args.p, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = serialize(circ)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        _emit(out, [("wrote", args.out), ("gates", len(circ.gates))])
    else:
        out.write(text)
    return EXIT_OK


# --- cost -------------------------------------------------------------------------


def _parse_census(text: str | None) -> dict | None:
    if not text:
        return None
    census = {}
    for item in text.split(","):
        key, _, val = item.partition("=")
        if not val:
            raise UsageError(f"census item {item!r} is not class=count")
        census[key.strip()] = int(val)
    return census


def cmd_cost(args, out) -> int:
    sub = args.cost_cmd
    try:
        if sub == "estimate":
            st = stats(layerize(load(args.circuit))) if args.circuit else None
            q = C.CostQuery(args.method, st, args.n, args.m, args.d, args.d_nc, args.k, args.t, args.cut)
            res = C.predicted_cost(q)
            _emit(out, [("method", args.method), ("log2_time", res["log2_time"]), ("log2_space", res["log2_space"])])
        elif sub == "thresholds":
            fams = tuple(f.strip() for f in args.families.split(","))
            for f in fams:
                if f not in ("cz", "cs"):
                    raise UsageError(f"unknown family {f!r}")
            rng = range(args.d_min, args.d_max + 1)
            if args.out:
                rows = C.emit_threshold_csv(rng, args.out, fams)
                _emit(out, [("wrote", args.out), ("rows", rows)])
            else:
                C.emit_threshold_csv(rng, out, fams)
        elif sub == "crossover":
            if args.family not in ("cz", "cs"):
                raise UsageError(f"unknown family {args.family!r}")
            d = C.crossover_dnc(args.family, args.p)
            _emit(out, [("family", args.family), ("p", args.p), ("crossover_dnc", "none" if d is None else d)])
        else:
            census = _parse_census(args.census)
            _emit(out, [("log2_kappa", C.supremacy_cycle_rank(census))])
    except C.CostError as exc:
        raise UsageError(str(exc)) from None
    return EXIT_OK


# --- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stabsim", description="Stabilizer projector amplitude simulation.")
    p.add_argument("--version", action="version", version=f"stabsim {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="compute one amplitude <x|U|0>")
    s.add_argument("circuit", help=".sqc circuit file")
    s.add_argument("--method", choices=METHODS, default="spir")
    s.add_argument("--x", help="output bit string (default all zeros)")
    s.add_argument("--seed", type=int, default=0, help="accepted for uniformity; engines are deterministic")
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--mem-cap", type=int, default=None, help="maximum live terms")
    s.add_argument("--prune", action="store_true", help="drop terms with |coefficient| < 1e-12 (SPC)")
    s.set_defaults(func=cmd_simulate)

    d = sub.add_parser("decomp", help="inspect the decomposition database")
    dsub = d.add_subparsers(dest="decomp_cmd", required=True)
    ds = dsub.add_parser("show")
    ds.add_argument("gate")
    dv = dsub.add_parser("verify")
    dv.add_argument("gate", help="entry name or 'all'")
    dv.add_argument("--tol", type=float, default=None)
    dq = dsub.add_parser("search")
    dq.add_argument("--matrix", help=".npy file with a 2x2 or 4x4 matrix")
    dq.add_argument("--target", help="gate word such as 'w:0' or 'w:0 fsim:0,1'")
    dq.add_argument("--max-rank", type=int, required=True)
    dq.add_argument("--budget", type=int, default=20000)
    dq.add_argument("--seed", type=int, default=0)
    dq.add_argument("--tol", type=float, default=None)
    d.set_defaults(func=cmd_decomp)

    g = sub.add_parser("gen", help="generate a random ensemble circuit")
    g.add_argument("family", choices=("cz", "cs", "supremacy_like"))
    g.add_argument("n", type=int)
    g.add_argument("cycles", type=int)
    g.add_argument("--p", type=float, default=0.0, help="probability of a T gate per qubit and cycle")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("cost", help="closed-form cost model")
    csub = c.add_subparsers(dest="cost_cmd", required=True)
    ce = csub.add_parser("estimate")
    ce.add_argument("--method", choices=C.METHODS, required=True)
    ce.add_argument("--circuit")
    for flag, typ in (("n", int), ("m", int), ("d", int), ("d-nc", int), ("k", float), ("t", int), ("x", int)):
        ce.add_argument(f"--{flag}", type=typ, dest=flag.replace("-", "_") if flag != "x" else "cut")
    ct = csub.add_parser("thresholds")
    ct.add_argument("--d-min", type=int, default=2)
    ct.add_argument("--d-max", type=int, default=40)
    ct.add_argument("--families", default="cz,cs")
    ct.add_argument("--out")
    cc = csub.add_parser("crossover")
    cc.add_argument("family")
    cc.add_argument("p", type=float)
    cs = csub.add_parser("supremacy")
    cs.add_argument("--census", help="class=count list, e.g. fsim_w=10,fsim=10,fsim_ww=2,w_pair=1,w=1")
    c.set_defaults(func=cmd_cost)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except (UsageError, CircuitError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except DatabaseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
