"""Small formula families for solver benchmarks and cross-checks."""
from __future__ import annotations

import itertools
import random

from ..cnf import Clause, CnfFormula
from ..structure import PathDecomposition


def parity_clauses(vs, parity: int) -> list[Clause]:
    """Direct CNF of XOR(vs) = parity: one clause per forbidden assignment."""
    out = []
    for bits in itertools.product((0, 1), repeat=len(vs)):
        if sum(bits) % 2 != parity:
            out.append(Clause(-v if b else v for v, b in zip(vs, bits)))
    return out


def _edge(i: int, k: int, w: int) -> int:
    # k-th parallel edge between cycle vertices i and i+1 (vertex n wraps to 1)
    return (i - 1) * w + k + 1


def _incident(i: int, n: int, w: int) -> list[int]:
    prev = i - 1 if i > 1 else n
    return [_edge(prev, k, w) for k in range(w)] + [_edge(i, k, w) for k in range(w)]


def xor_chain(n: int, w: int) -> CnfFormula:
    """Cyclic XOR chain: n parity constraints around a cycle, consecutive
    constraints sharing w variables.  Constraint 1 is odd and the others
    even while every variable occurs twice, so the formula is unsatisfiable.

    With w = 1 this is x_n ^ x_1 = 1, x_1 ^ x_2 = 0, ..., x_{n-1} ^ x_n = 0.
    """
    if n < 2 or w < 1:
        raise ValueError("need n >= 2 and w >= 1")
    clauses = []
    for i in range(1, n + 1):
        clauses += parity_clauses(_incident(i, n, w), 1 if i == 1 else 0)
    return CnfFormula(n * w, tuple(clauses))


def xor_chain_decomposition(n: int, w: int) -> PathDecomposition:
    """Primal decomposition: bag i holds constraint i's variables plus the w
    wrap-around variables; width 3w - 1."""
    wrap = {_edge(n, k, w) for k in range(w)}
    return PathDecomposition([wrap | set(_incident(i, n, w)) for i in range(1, n + 1)])


def random_kcnf(num_vars: int, num_clauses: int, k: int, rng: random.Random) -> CnfFormula:
    clauses = []
    for _ in range(num_clauses):
        vs = rng.sample(range(1, num_vars + 1), min(k, num_vars))
        clauses.append(Clause(v if rng.random() < 0.5 else -v for v in vs))
    return CnfFormula(num_vars, tuple(clauses))


def pigeonhole(holes: int) -> CnfFormula:
    """holes+1 pigeons into ``holes`` holes; p(i, h) is variable i*holes + h + 1."""
    def p(i, h):
        return i * holes + h + 1
    clauses = [Clause(p(i, h) for h in range(holes)) for i in range(holes + 1)]
    for h in range(holes):
        for i, j in itertools.combinations(range(holes + 1), 2):
            clauses.append(Clause((-p(i, h), -p(j, h))))
    return CnfFormula((holes + 1) * holes, tuple(clauses))


def random_corpus(count: int, seed: int, max_vars: int = 20) -> list[tuple[str, CnfFormula]]:
    """Random 3-CNF around the threshold, mixed clause widths, and small
    structured formulas, all with at most ``max_vars`` variables."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        kind = len(out) % 4
        nv = rng.randint(3, max_vars)
        if kind == 0:
            f = random_kcnf(nv, max(1, round(4.26 * nv)), 3, rng)
        elif kind == 1:
            f = random_kcnf(nv, max(1, round(2.0 * nv)), 2, rng)
        elif kind == 2:
            f = random_kcnf(nv, rng.randint(1, 6 * nv), rng.randint(1, 4), rng)
        else:
            f = xor_chain(rng.randint(2, 8), rng.randint(1, 3))
            if f.num_vars > max_vars:
                continue
        out.append((f"r{len(out)}", f))
    return out
