"""Extract an interpolant for parity from an ordered refutation and print it
next to the parity truth table."""
import itertools

from pdlab.encodings.functions import build_function_encoding
from pdlab.resolution import extract_interpolant, ordered_refutation

n = 3
fe = build_function_encoding("parity", n)
proof = ordered_refutation(fe.formula, sorted(fe.partition.before))
interp = extract_interpolant(proof, fe.partition, a_clause_ids=fe.plus_ids)
print(f"refutation: {len(proof.steps)} steps; interpolant: {len(interp.clauses)} clauses over inputs {fe.inputs}")
for c in interp.clauses:
    print("  ", " v ".join(("" if l > 0 else "~") + f"x{abs(l)}" for l in c))
for bits in itertools.product((0, 1), repeat=n):
    val = dict(zip(fe.inputs, bits))
    holds = all(any(val[abs(l)] == (l > 0) for l in c) for c in interp.clauses)
    print(bits, "parity", sum(bits) % 2, "interpolant", int(holds))
