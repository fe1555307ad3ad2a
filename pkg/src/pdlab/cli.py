"""Command-line entry point: ``pdlab <command> ...``.

Stats go to stdout as ``key=value`` lines; artifacts are only written to
paths given explicitly.  Exit codes: 0 ok, 1 property violated, 2 usage
error, 3 budget exceeded.
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .cachesat import solve_cachesat
from .cdcl import BUDGET, CdclConfig, solve_cdcl
from .cnf import DimacsError, emit_dimacs, parse_dimacs
from .oracles import (OracleBudgetError, TruthTable, add_graph_table, brute_pathwidth_graph,
                      brute_sat, eq_table, min_dnf_size, mult_graph_table, parity_table)
from .proofdoor import (AssemblyError, DescriptorError, ProofdoorDescriptor, assemble_refutation,
                        cutting_partial_orders, verify_proofdoor)
from .resolution import (InterpolantError, ResFormatError, VarPartition, check_partial_order,
                         check_resolution_proof, emit_res, extract_interpolant, ordered_refutation,
                         parse_res)
from .structure import build_graph, complete_order, parse_order, parse_partial_order

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _read(path) -> str:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"no such file: {path}")
    return p.read_text()


def _write(path, text: str):
    if path is None:
        return
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(text)


def _cnf(path):
    try:
        return parse_dimacs(_read(path))
    except DimacsError as e:
        raise UsageError(f"{path}: {e}") from None


def _proof(path, f):
    try:
        return parse_res(_read(path), f)
    except ResFormatError as e:
        raise UsageError(f"{path}: {e}") from None


def _descriptor(path, f):
    try:
        d = ProofdoorDescriptor.from_json(_read(path))
        d.validate(f)
    except DescriptorError as e:
        raise UsageError(f"{path}: {e}") from None
    return d


def _positive(text):
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _emit(**kv):
    for k, v in kv.items():
        print(f"{k}={v}")


# -- gen ---------------------------------------------------------------------------

def _ordered_proof(path, f, vp):
    # before-variables eliminated first, so the proof respects before < rest
    if path:
        _write(path, emit_res(ordered_refutation(f, sorted(vp.before))))


def cmd_gen(args) -> int:
    from .encodings import emit_wire_map

    if args.family == "fp-miter":
        from .encodings.fpadder import build_fp_comm_miter
        fm = build_fp_comm_miter(args.mantissa, args.exponent)
        _write(args.cnf, emit_dimacs(fm.formula))
        _write(args.descriptor, fm.descriptor.to_json())
        _write(args.wires, emit_wire_map(fm.netlist))
        f, extra = fm.formula, {"k": fm.descriptor.k, **fm.descriptor.params}
    elif args.family == "tree-miter":
        from .encodings.tree import build_tree_miter, partition_at_node
        tm = build_tree_miter(args.expr1, args.expr2, args.bits)
        _write(args.cnf, emit_dimacs(tm.formula))
        _write(args.wires, emit_wire_map(tm.netlist))
        f, extra = tm.formula, {"nodes": ",".join(sorted(tm.nodes))}
        if args.node:
            vp = partition_at_node(tm, args.node)
            _write(args.partition, vp.emit())
            extra.update(before=len(vp.before), after=len(vp.after), shared=len(vp.shared))
            _ordered_proof(args.proof, tm.formula, vp)
    elif args.family == "fn-encoding":
        from .encodings.functions import build_function_encoding
        fe = build_function_encoding(args.fn, args.n)
        _write(args.cnf, emit_dimacs(fe.formula))
        _write(args.partition, fe.partition.emit())
        _ordered_proof(args.proof, fe.formula, fe.partition)
        f, extra = fe.formula, {"inputs": " ".join(map(str, fe.inputs))}
    else:
        from .encodings.strips import build_mult_strip_descriptor
        sr = build_mult_strip_descriptor(args.n, args.delta)
        _write(args.cnf, emit_dimacs(sr.miter.formula))
        _write(args.descriptor, sr.descriptor.to_json())
        _write(args.wires, emit_wire_map(sr.miter.netlist))
        f = sr.miter.formula
        extra = {"k": sr.descriptor.k, "variant": sr.variant, "verified": int(sr.verified)}
    _emit(vars=f.num_vars, clauses=len(f.clauses), **extra)
    return EXIT_OK


# -- solve / check -----------------------------------------------------------------------

def cmd_solve(args) -> int:
    f = _cnf(args.cnf)
    order = complete_order(parse_order(_read(args.order)) if args.order else (), f.variables())
    t0 = time.perf_counter()
    if args.engine == "brute":
        try:
            r = brute_sat(f)
        except OracleBudgetError as e:
            print(f"error={e}", file=sys.stderr)
            return EXIT_BUDGET
        _emit(status=r.status, wall_time=f"{time.perf_counter() - t0:.3f}")
    elif args.engine == "cachesat":
        r = solve_cachesat(f, order)
        _emit(status=r.status, dcsf_count=r.dcsf_count, empty_residuals=r.empty_residuals,
              decisions=r.decisions, wall_time=f"{time.perf_counter() - t0:.3f}")
    else:
        r = solve_cdcl(f, CdclConfig(order=order, conflict_budget=args.budget))
        _emit(status=r.status, conflicts=r.conflicts, learned=len(r.learned), restarts=r.restarts,
              decisions=r.decisions, wall_time=f"{time.perf_counter() - t0:.3f}")
        if r.status == "UNSAT" and args.proof:
            _write(args.proof, emit_res(r.proof))
        if r.status == BUDGET:
            return EXIT_BUDGET
    if r.status == "SAT" and args.model:
        print("v " + " ".join(str(v if r.model[v] else -v) for v in sorted(r.model)) + " 0")
    return EXIT_OK


def cmd_check_proof(args) -> int:
    f = _cnf(args.cnf)
    p = _proof(args.proof, f)
    chk = check_resolution_proof(f, p, refutation=not args.derivation)
    if not chk:
        _emit(accepted=0, step=chk.step, reason=chk.reason)
        return EXIT_VIOLATION
    if args.partial_order:
        po = parse_partial_order(_read(args.partial_order))
        oc = check_partial_order(p, po)
        if not oc:
            _emit(accepted=0, violation=f"x{p.step(oc.after_step).pivot} resolved before "
                  f"x{p.step(oc.before_step).pivot}", witness_path=" ".join(map(str, oc.path)))
            return EXIT_VIOLATION
    _emit(accepted=1, steps=len(p.steps))
    return EXIT_OK


def cmd_extract(args) -> int:
    f = _cnf(args.cnf)
    p = _proof(args.proof, f)
    try:
        vp = VarPartition.parse(_read(args.partition))
    except ValueError as e:
        raise UsageError(f"{args.partition}: {e}") from None
    try:
        interp = extract_interpolant(p, vp)
    except InterpolantError as e:
        _emit(extracted=0, reason=e)
        return EXIT_VIOLATION
    text = emit_dimacs(interp)
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    _emit(extracted=1, clauses=len(interp.clauses), proof_lines=len(p.steps) + p.num_inputs)
    return EXIT_OK


def cmd_verify(args) -> int:
    f = _cnf(args.cnf)
    d = _descriptor(args.descriptor, f)
    rep = verify_proofdoor(f, d, graph=args.graph)
    print("\n".join(rep.lines()))
    return EXIT_OK if rep.passed else EXIT_VIOLATION


def cmd_assemble(args) -> int:
    f = _cnf(args.cnf)
    d = _descriptor(args.descriptor, f)
    try:
        res = assemble_refutation(f, d, budget=args.budget)
    except AssemblyError as e:
        _emit(assembled=0, j=e.j, clause=" ".join(map(str, e.clause)))
        return EXIT_VIOLATION
    _write(args.out, emit_res(res.proof))
    ok = bool(check_resolution_proof(f, res.proof))
    orders = cutting_partial_orders(d, f)
    bad = [i for i, po in enumerate(orders, 1) if not check_partial_order(res.proof, po)]
    _emit(assembled=1, steps=len(res.proof.steps), subcalls=res.subcalls, reused=res.reused,
          fallbacks=res.fallbacks, conflicts=res.conflicts, checked=int(ok),
          orders=len(orders), order_violations=len(bad), wall_time=f"{res.wall_time:.3f}")
    return EXIT_OK if ok and not bad else EXIT_VIOLATION


# -- oracle / bench --------------------------------------------------------------------

_TABLES = {"eq": eq_table, "parity": parity_table, "mult-graph": mult_graph_table,
           "add-graph": add_graph_table}


def cmd_oracle(args) -> int:
    try:
        if args.kind == "sat":
            r = brute_sat(_cnf(args.cnf))
            _emit(status=r.status)
        elif args.kind == "pathwidth":
            g = build_graph(_cnf(args.cnf), args.graph)
            _emit(pathwidth=brute_pathwidth_graph(g), vertices=len(g.vertices))
        else:
            if args.fn:
                t = _TABLES[args.fn](args.n)
            elif args.table and args.arity is not None:
                t = TruthTable.from_hex(args.table, args.arity)
            else:
                raise UsageError("min-dnf needs --fn/--n or --arity with a hex table")
            _emit(min_dnf_size=min_dnf_size(t), arity=t.arity)
    except OracleBudgetError as e:
        print(f"error={e}", file=sys.stderr)
        return EXIT_BUDGET
    return EXIT_OK


def bench_rows(family: str, sizes, budget: int = 100000):
    """Yield one measurement dict per size (currently family ``fp`` only)."""
    from .encodings.fpadder import build_fp_comm_miter
    if family != "fp":
        raise UsageError(f"unknown family {family!r}")
    for n in sizes:
        t0 = time.perf_counter()
        fm = build_fp_comm_miter(n, n)
        rep = verify_proofdoor(fm.formula, fm.descriptor, graph="bipartite")
        res = assemble_refutation(fm.formula, fm.descriptor, budget=budget, count_dcsf=True)
        yield {"size": n, "c": rep.measured["c"], "w": rep.measured["w"], "s": rep.measured["s"],
               "dcsf": res.max_dcsf, "conflicts": res.conflicts,
               "proof_lines": res.proof.num_inputs + len(res.proof.steps),
               "wall_time": f"{time.perf_counter() - t0:.2f}", "verified": int(rep.passed)}


def cmd_bench(args) -> int:
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"bad --sizes {args.sizes!r}") from None
    if not sizes or min(sizes) < 1:
        raise UsageError("--sizes needs positive integers")
    cols = ["size", "c", "w", "s", "dcsf", "conflicts", "proof_lines", "wall_time"]
    print("\t".join(cols))
    ok = True
    for row in bench_rows(args.family, sizes, args.budget):
        print("\t".join(str(row[c]) for c in cols), flush=True)
        ok &= bool(row["verified"])
    return EXIT_OK if ok else EXIT_VIOLATION


# -- parser ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pdlab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate formula families")
    gsub = gen.add_subparsers(dest="family", required=True)
    g = gsub.add_parser("fp-miter")
    g.add_argument("--mantissa", type=_positive, required=True)
    g.add_argument("--exponent", type=_positive, required=True)
    g.add_argument("--cnf")
    g.add_argument("--descriptor")
    g.add_argument("--wires")
    g = gsub.add_parser("tree-miter")
    g.add_argument("--expr1", required=True)
    g.add_argument("--expr2", required=True)
    g.add_argument("--bits", type=_positive, required=True)
    g.add_argument("--node", help="internal node id for --partition, e.g. 1 or 2r")
    g.add_argument("--cnf")
    g.add_argument("--wires")
    g.add_argument("--partition")
    g.add_argument("--proof", help="with --node: refutation eliminating before-variables first")
    g = gsub.add_parser("fn-encoding")
    g.add_argument("--fn", choices=["parity", "eq"], required=True)
    g.add_argument("--n", type=_positive, required=True)
    g.add_argument("--cnf")
    g.add_argument("--partition")
    g.add_argument("--proof", help="refutation eliminating the F+ auxiliaries first")
    g = gsub.add_parser("mult-strips")
    g.add_argument("--n", type=_positive, required=True)
    g.add_argument("--delta", type=_positive, required=True)
    g.add_argument("--cnf")
    g.add_argument("--descriptor")
    g.add_argument("--wires")
    gen.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="solve a DIMACS file")
    s.add_argument("--engine", choices=["cachesat", "cdcl", "brute"], default="cdcl")
    s.add_argument("--order", help="variable order file (missing variables follow by id)")
    s.add_argument("--budget", type=_positive, help="CDCL conflict budget")
    s.add_argument("--proof", help="write the CDCL refutation here")
    s.add_argument("--model", action="store_true", help="print a model line when SAT")
    s.add_argument("cnf")
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("check-proof", help="check a RES trace")
    c.add_argument("--partial-order")
    c.add_argument("--derivation", action="store_true", help="do not require an empty root")
    c.add_argument("cnf")
    c.add_argument("proof")
    c.set_defaults(func=cmd_check_proof)

    e = sub.add_parser("extract-interpolant", help="interpolant from an ordered refutation")
    e.add_argument("--partition", required=True)
    e.add_argument("--out")
    e.add_argument("cnf")
    e.add_argument("proof")
    e.set_defaults(func=cmd_extract)

    v = sub.add_parser("verify-proofdoor", help="check a chunk descriptor")
    v.add_argument("--graph", choices=["primal", "bipartite"], default="primal")
    v.add_argument("cnf")
    v.add_argument("descriptor")
    v.set_defaults(func=cmd_verify)

    a = sub.add_parser("assemble-refutation", help="build a refutation from a descriptor")
    a.add_argument("--out", required=True)
    a.add_argument("--budget", type=_positive, default=100000)
    a.add_argument("cnf")
    a.add_argument("descriptor")
    a.set_defaults(func=cmd_assemble)

    o = sub.add_parser("oracle", help="exhaustive oracles")
    osub = o.add_subparsers(dest="kind", required=True)
    x = osub.add_parser("sat")
    x.add_argument("cnf")
    x = osub.add_parser("pathwidth")
    x.add_argument("--graph", choices=["primal", "bipartite"], default="primal")
    x.add_argument("cnf")
    x = osub.add_parser("min-dnf")
    x.add_argument("--fn", choices=sorted(_TABLES))
    x.add_argument("--n", type=_positive, default=1)
    x.add_argument("--arity", type=int)
    x.add_argument("table", nargs="?", help="truth table as hex, bit i = f(i)")
    o.set_defaults(func=cmd_oracle)

    b = sub.add_parser("bench", help="parameter and cost tables")
    bsub = b.add_subparsers(dest="bench", required=True)
    x = bsub.add_parser("proofdoor-family")
    x.add_argument("--family", choices=["fp"], default="fp")
    x.add_argument("--sizes", default="2,3,4")
    x.add_argument("--budget", type=_positive, default=100000)
    b.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as e:
        print(f"pdlab: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
