"""DPLL over a fixed variable order with a cache of residual subformulas.

A node's key is the residual formula after restriction and unit propagation.
Residuals containing the empty clause share one key.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field

from .cnf import Clause, CnfFormula
from .resolution import ProofBuilder, ResolutionProof

BOTTOM_KEY = ((),)


def _bcp(clauses, lits):
    """Restrict by ``lits`` then propagate units.  Returns (residual, implied)
    or (None, implied) on conflict.  Clauses are plain tuples."""
    assigned = set()
    queue = list(lits)
    implied = []
    cur = list(clauses)
    while queue:
        for l in queue:
            if -l in assigned:
                return None, implied
            assigned.add(l)
        queue = []
        nxt = []
        for c in cur:
            if any(l in assigned for l in c):
                continue
            r = tuple(l for l in c if -l not in assigned)
            if not r:
                return None, implied
            nxt.append(r)
        cur = nxt
        for c in cur:
            if len(c) == 1 and c[0] not in assigned and c[0] not in queue:
                queue.append(c[0])
        implied.extend(queue)
    return tuple(sorted(cur)), implied


@dataclass
class CacheSatResult:
    status: str
    model: dict | None = None
    dcsf_count: int = 0
    empty_residuals: int = 0   # satisfied residuals reached (not cached)
    decisions: int = 0
    hits: int = 0
    trace: list = field(default_factory=list)   # (key index, decision var, outcome)
    cache: dict = field(default_factory=dict)   # key -> verdict

    @property
    def dcsf_count_with_empty(self) -> int:
        return self.dcsf_count + self.empty_residuals


def _check_order(f, order):
    missing = f.variables() - set(order)
    if missing:
        raise ValueError(f"order misses variables {sorted(missing)[:10]}")
    return {v: i for i, v in enumerate(order)}


def solve_cachesat(f: CnfFormula, order, use_cache: bool = True) -> CacheSatResult:
    """Only fully explored (unsatisfiable) residuals are stored: a satisfiable
    residual ends the whole search, so its entry could never be reused."""
    rank = _check_order(f, order)
    res = CacheSatResult("UNSAT")
    keys: dict = {}
    cache = res.cache
    path: list[int] = []

    def kid(key):
        return keys.setdefault(key, len(keys))

    def node(residual):
        if residual is None:
            res.trace.append((kid(BOTTOM_KEY), None, "conflict"))
            if use_cache:
                cache[BOTTOM_KEY] = "UNSAT"
            return False
        if not residual:
            res.empty_residuals += 1
            res.trace.append((kid(residual), None, "empty"))
            return True
        if use_cache and residual in cache:
            res.hits += 1
            res.trace.append((kid(residual), None, "hit"))
            return False
        x = min({abs(l) for c in residual for l in c}, key=rank.__getitem__)
        res.trace.append((kid(residual), x, "expand"))
        for lit in (-x, x):
            res.decisions += 1
            child, implied = _bcp(residual, [lit])
            mark = len(path)
            path.append(lit)
            path.extend(implied)
            if node(child):
                return True
            del path[mark:]
        if use_cache:
            cache[residual] = "UNSAT"
        return False

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 4 * f.num_vars + 1000))
    try:
        if f.has_empty():
            root = None
        else:
            root, implied = _bcp([tuple(c) for c in f.clauses], [])
            path.extend(implied)
        sat = node(root)
    finally:
        sys.setrecursionlimit(limit)
    if sat:
        res.status = "SAT"
        model = {v: False for v in range(1, f.num_vars + 1)}
        for l in path:
            model[abs(l)] = l > 0
        res.model = model
    res.dcsf_count = len(cache)
    return res


class SatisfiableError(ValueError):
    pass


def cachesat_refutation(f: CnfFormula, order) -> ResolutionProof:
    """Resolution refutation read off a caching DPLL search.

    Each node returns the id of a clause made of negated decisions that is
    falsified at that node; a branch clause not mentioning the branch
    variable is passed up unchanged, otherwise the two branch clauses are
    resolved.  Cache entries store those clauses and are reused whenever one
    is falsified by the current decisions."""
    rank = _check_order(f, order)
    b = ProofBuilder(f)
    empty = next((i for i, c in enumerate(f.clauses, 1) if not c), None)
    if empty is not None:
        return b.build(empty)
    cache: dict = {}
    clauses = list(f.clauses)

    def propagate(decisions):
        val, reason, pos = {}, {}, {}
        for l in decisions:
            val[abs(l)] = l > 0
            reason[abs(l)] = None
            pos[abs(l)] = len(pos)
        changed = True
        while changed:
            changed = False
            for i, c in enumerate(clauses, 1):
                free = None
                nfree = 0
                sat = False
                for l in c:
                    v = val.get(abs(l))
                    if v is None:
                        nfree += 1
                        free = l
                    elif v == (l > 0):
                        sat = True
                        break
                if sat:
                    continue
                if nfree == 0:
                    return val, reason, pos, i
                if nfree == 1:
                    val[abs(free)] = free > 0
                    reason[abs(free)] = i
                    pos[abs(free)] = len(pos)
                    changed = True
        return val, reason, pos, None

    def analyze(cid, reason, pos):
        c = b.clause(cid)
        while True:
            implied = [l for l in c if reason.get(abs(l)) is not None]
            if not implied:
                return cid
            l = max(implied, key=lambda x: pos[abs(x)])
            cid = b.resolve(cid, reason[abs(l)], abs(l))
            c = b.clause(cid)

    def node(decisions):
        val, reason, pos, confl = propagate(decisions)
        if confl is not None:
            return analyze(confl, reason, pos)
        residual = []
        for c in clauses:
            if any(val.get(abs(l)) == (l > 0) for l in c):
                continue
            residual.append(tuple(l for l in c if abs(l) not in val))
        if not residual:
            raise SatisfiableError("formula is satisfiable")
        key = tuple(sorted(residual))
        for d in cache.get(key, ()):
            if all(val.get(abs(l)) == (l < 0) for l in b.clause(d)):
                return d
        x = min({abs(l) for c in residual for l in c}, key=rank.__getitem__)
        d0 = node(decisions + [-x])
        if x not in b.clause(d0):
            return d0
        d1 = node(decisions + [x])
        if -x not in b.clause(d1):
            return d1
        d = b.resolve(d0, d1, x)
        cache.setdefault(key, []).append(d)
        return d

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 4 * f.num_vars + 1000))
    try:
        root = node([])
    finally:
        sys.setrecursionlimit(limit)
    return b.build(root)


def residual_formula(key, num_vars: int) -> CnfFormula:
    return CnfFormula(num_vars, tuple(Clause(c) for c in key))
