"""Exhaustive ground truth for small instances: SAT, minimum DNF size, pathwidth."""
from __future__ import annotations

from dataclasses import dataclass
import numpy as np
from scipy.optimize import LinearConstraint, milp

from .cnf import CnfFormula

SAT_VAR_LIMIT = 26
DNF_ARITY_LIMIT = 8
PATHWIDTH_VERTEX_LIMIT = 12


class OracleBudgetError(RuntimeError):
    pass


@dataclass
class BruteResult:
    status: str            # "SAT" | "UNSAT"
    model: dict | None = None

    @property
    def sat(self):
        return self.status == "SAT"


def brute_sat(f: CnfFormula, limit: int = SAT_VAR_LIMIT) -> BruteResult:
    n = f.num_vars
    if n > limit:
        raise OracleBudgetError(f"brute_sat: {n} variables exceeds budget {limit}")
    if f.has_empty():
        return BruteResult("UNSAT")
    low = min(n, 16)
    idx = np.arange(1 << low, dtype=np.int64)
    low_bits = [((idx >> i) & 1).astype(bool) for i in range(low)]
    for hi in range(1 << (n - low)):
        ok = np.ones(1 << low, dtype=bool)
        for c in f.clauses:
            if any(abs(l) > low and bool((hi >> (abs(l) - 1 - low)) & 1) == (l > 0) for l in c):
                continue
            sat = np.zeros(1 << low, dtype=bool)
            for l in c:
                if abs(l) <= low:
                    b = low_bits[abs(l) - 1]
                    sat |= b if l > 0 else ~b
            ok &= sat
            if not ok.any():
                break
        hits = np.flatnonzero(ok)
        if len(hits):
            a = (int(hits[0])) | (hi << low)
            return BruteResult("SAT", {v: bool((a >> (v - 1)) & 1) for v in range(1, n + 1)})
    return BruteResult("UNSAT")


# -- truth tables and minimum DNF ---------------------------------------------

@dataclass(frozen=True)
class TruthTable:
    """bits is an int; bit i is f(x) where x_k is bit k of i (x_0 = bit 0)."""
    arity: int
    bits: int

    def __post_init__(self):
        if not 0 <= self.arity <= 16:
            raise ValueError("arity must be in 0..16")
        if self.bits >> (1 << self.arity):
            raise ValueError("truth table longer than 2^arity bits")

    @classmethod
    def from_function(cls, arity, fn):
        bits = 0
        for i in range(1 << arity):
            if fn(tuple((i >> k) & 1 for k in range(arity))):
                bits |= 1 << i
        return cls(arity, bits)

    @classmethod
    def from_hex(cls, text: str, arity: int):
        return cls(arity, int(text, 16))

    def to_hex(self) -> str:
        return format(self.bits, "x")

    def __call__(self, i: int) -> int:
        return (self.bits >> i) & 1

    def minterms(self):
        return [i for i in range(1 << self.arity) if (self.bits >> i) & 1]

    def restrict(self, fixed: dict[int, int]) -> "TruthTable":
        """Subfunction with the given input positions fixed; remaining inputs keep order."""
        free = [k for k in range(self.arity) if k not in fixed]
        base = sum(v << k for k, v in fixed.items())
        bits = 0
        for j in range(1 << len(free)):
            i = base
            for t, k in enumerate(free):
                i |= ((j >> t) & 1) << k
            if self(i):
                bits |= 1 << j
        return TruthTable(len(free), bits)


def prime_implicants(t: TruthTable) -> list[tuple[int, int]]:
    """Quine-McCluskey.  An implicant is (mask, value): care bits and their values."""
    full = (1 << t.arity) - 1
    current = {(full, m) for m in t.minterms()}
    primes = set()
    while current:
        merged = set()
        used = set()
        by_mask: dict[int, list[int]] = {}
        for mask, val in current:
            by_mask.setdefault(mask, []).append(val)
        for mask, vals in by_mask.items():
            vs = set(vals)
            for v in vals:
                b = mask
                while b:
                    low = b & -b
                    b ^= low
                    if not v & low and (v | low) in vs:
                        merged.add((mask & ~low, v))
                        used.add((mask, v))
                        used.add((mask, v | low))
        primes |= current - used
        current = merged
    return sorted(primes)


def _covers(imp, m):
    mask, val = imp
    return (m & mask) == val


def min_dnf_size(t: TruthTable) -> int:
    if t.arity > DNF_ARITY_LIMIT:
        raise OracleBudgetError(f"min_dnf_size: arity {t.arity} exceeds budget {DNF_ARITY_LIMIT}")
    ms = t.minterms()
    if not ms:
        return 0
    primes = prime_implicants(t)
    # exact minimum set cover as a 0/1 integer program
    a = np.array([[1 if _covers(p, m) else 0 for p in primes] for m in ms], dtype=float)
    res = milp(c=np.ones(len(primes)),
               constraints=LinearConstraint(a, lb=np.ones(len(ms)), ub=np.inf),
               integrality=np.ones(len(primes)), bounds=(0, 1))
    if not res.success:
        raise RuntimeError("set cover solver failed: " + str(res.message))
    return int(round(res.fun))


def eq_table(n: int) -> TruthTable:
    """EQ_n over inputs (x_0..x_{n-1}, z_0..z_{n-1})."""
    return TruthTable.from_function(2 * n, lambda b: all(b[i] == b[n + i] for i in range(n)))


def _num(bits):
    return sum(b << i for i, b in enumerate(bits))


def mult_graph_table(n: int) -> TruthTable:
    """Mult-Graph_n over (x: n bits, y: n bits, z: 2n bits), true iff x*y = z."""
    return TruthTable.from_function(
        4 * n, lambda b: _num(b[:n]) * _num(b[n:2 * n]) == _num(b[2 * n:]))


def add_graph_table(n: int) -> TruthTable:
    """Add-Graph_n over (x: n bits, y: n bits, z: n+1 bits), true iff x+y = z."""
    return TruthTable.from_function(
        3 * n + 1, lambda b: _num(b[:n]) + _num(b[n:2 * n]) == _num(b[2 * n:]))


def parity_table(n: int) -> TruthTable:
    return TruthTable.from_function(n, lambda b: sum(b) % 2 == 1)


# -- pathwidth ----------------------------------------------------------------

def brute_pathwidth(vertices, edges) -> int:
    """Exact pathwidth as the vertex separation number, by DP over subsets."""
    vs = sorted(set(vertices) | {u for e in edges for u in e})
    n = len(vs)
    if n > PATHWIDTH_VERTEX_LIMIT:
        raise OracleBudgetError(f"brute_pathwidth: {n} vertices exceeds budget {PATHWIDTH_VERTEX_LIMIT}")
    if n == 0:
        return 0
    pos = {v: i for i, v in enumerate(vs)}
    nbr = [0] * n
    for u, w in edges:
        if u == w:
            continue
        nbr[pos[u]] |= 1 << pos[w]
        nbr[pos[w]] |= 1 << pos[u]
    full = (1 << n) - 1
    inf = n + 1
    best = [inf] * (1 << n)
    best[0] = 0
    for s in range(1, 1 << n):
        cut = 0
        rest = full & ~s
        b = s
        while b:
            low = b & -b
            b ^= low
            if nbr[low.bit_length() - 1] & rest:
                cut += 1
        m = inf
        b = s
        while b:
            low = b & -b
            b ^= low
            if best[s ^ low] < m:
                m = best[s ^ low]
        best[s] = max(m, cut)
    # vertex separation counts boundary vertices of prefixes; pathwidth equals it
    return best[full]


def brute_pathwidth_graph(g) -> int:
    return brute_pathwidth(g.vertices, g.edges)


__all__ = ["brute_sat", "min_dnf_size", "brute_pathwidth", "TruthTable", "OracleBudgetError",
           "eq_table", "mult_graph_table", "add_graph_table", "parity_table", "prime_implicants",
           "BruteResult"]
