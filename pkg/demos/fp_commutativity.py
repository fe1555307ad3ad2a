"""Build the FP-adder commutativity miter, check its descriptor and assemble
a refutation from it, for a few sizes."""
import sys
import time

from pdlab.encodings.fpadder import build_fp_comm_miter
from pdlab.proofdoor import assemble_refutation, cutting_partial_orders, verify_proofdoor
from pdlab.resolution import check_partial_order, check_resolution_proof


def run(n, m):
    fm = build_fp_comm_miter(n, m)
    f, d = fm.formula, fm.descriptor
    t0 = time.perf_counter()
    rep = verify_proofdoor(f, d, graph="bipartite")
    out = assemble_refutation(f, d)
    ok = bool(check_resolution_proof(f, out.proof))
    orders = cutting_partial_orders(d, f)
    bad = sum(not check_partial_order(out.proof, po) for po in orders)
    print(f"n={n} m={m}: {f.num_vars} vars, {len(f.clauses)} clauses, k={d.k}, "
          f"c={rep.measured['c']} w={rep.measured['w']} s={rep.measured['s']}, "
          f"proof {len(out.proof.steps)} steps (checked={ok}), "
          f"{len(orders)} cutting orders, {bad} violated, {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    sizes = [int(a) for a in sys.argv[1:]] or [2, 3, 4]
    for s in sizes:
        run(s, s)
