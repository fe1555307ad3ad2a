"""Proofdoor descriptors: verification, cutting partial orders and refutation
assembly from chunk-local sub-refutations."""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

from .cachesat import cachesat_refutation, solve_cachesat
from .cdcl import BUDGET, SAT, CdclConfig, solve_cdcl
from .cnf import Clause, CnfFormula, restrict
from .resolution import ProofBuilder, ResolutionProof
from .sat import is_unsat
from .structure import (PartialOrder, PathDecomposition, build_graph, heuristic_path_decomposition,
                        verify_path_decomposition)


class DescriptorError(ValueError):
    pass


@dataclass
class ProofdoorDescriptor:
    chunks: list                       # k lists of clause ids
    interpolants: list                 # k-1 lists of Clauses
    supports: list                     # for j = 2..k-1: per clause, indices into I_{j-1}
    params: dict = field(default_factory=lambda: {"c": 0, "w": 0, "s": 0})
    decompositions: list | None = None           # per chunk, primal graph
    decompositions_bipartite: list | None = None
    labels: list | None = None

    def __post_init__(self):
        self.chunks = [list(map(int, c)) for c in self.chunks]
        self.interpolants = [[Clause(c) for c in i] for i in self.interpolants]
        self.supports = [[list(map(int, s)) for s in sj] for sj in self.supports]

    @property
    def k(self) -> int:
        return len(self.chunks)

    def interpolant(self, j: int) -> list[Clause]:
        return self.interpolants[j - 1]

    def support(self, j: int, ci: int) -> list[int]:
        """Indices into I_{j-1} supporting clause ci of I_j (empty for j = 1)."""
        if j == 1:
            return []
        return self.supports[j - 2][ci]

    def chunk_vars(self, f: CnfFormula) -> list[set]:
        return [set().union(*(f.clause(i).variables() for i in ch)) if ch else set() for ch in self.chunks]

    def x_sets(self, f: CnfFormula) -> list[set]:
        cv = self.chunk_vars(f)
        later = set()
        out = [None] * self.k
        for i in range(self.k - 1, -1, -1):
            out[i] = cv[i] - later
            later |= cv[i]
        return out

    def z_sets(self) -> list[set]:
        return [set().union(*(c.variables() for c in ij)) if ij else set() for ij in self.interpolants]

    def decomposition(self, j: int, graph: str):
        ds = self.decompositions if graph == "primal" else self.decompositions_bipartite
        if ds is None:
            return None
        return ds[j - 1]

    # -- structure -----------------------------------------------------------------
    def validate(self, f: CnfFormula) -> None:
        m = len(f.clauses)
        if self.k < 1:
            raise DescriptorError("descriptor has no chunks")
        seen = []
        for ch in self.chunks:
            seen.extend(ch)
        if sorted(seen) != list(range(1, m + 1)):
            dup = len(seen) - len(set(seen))
            raise DescriptorError(f"chunks do not partition clause ids 1..{m}"
                                  + (f" ({dup} duplicates)" if dup else ""))
        if len(self.interpolants) != self.k - 1:
            raise DescriptorError(f"expected {self.k - 1} interpolants, found {len(self.interpolants)}")
        if len(self.supports) != max(self.k - 2, 0):
            raise DescriptorError(f"expected {max(self.k - 2, 0)} support lists, found {len(self.supports)}")
        for j in range(2, self.k):
            sj = self.supports[j - 2]
            if len(sj) != len(self.interpolant(j)):
                raise DescriptorError(f"supports for I_{j} have {len(sj)} entries, I_{j} has "
                                      f"{len(self.interpolant(j))} clauses")
            for s in sj:
                for x in s:
                    if not 0 <= x < len(self.interpolant(j - 1)):
                        raise DescriptorError(f"support index {x} out of range for I_{j - 1}")
        for ij in self.interpolants:
            for c in ij:
                for l in c:
                    if abs(l) > f.num_vars:
                        raise DescriptorError(f"interpolant literal {l} beyond num_vars")
        for key in ("c", "w", "s"):
            if key not in self.params:
                raise DescriptorError(f"params missing {key!r}")
        for name in ("decompositions", "decompositions_bipartite"):
            ds = getattr(self, name)
            if ds is not None and len(ds) != self.k:
                raise DescriptorError(f"{name} must have one entry per chunk")

    # -- JSON ------------------------------------------------------------------------
    def to_json(self) -> str:
        obj = {
            "chunks": self.chunks,
            "interpolants": [[list(c) for c in ij] for ij in self.interpolants],
            "supports": self.supports,
            "params": dict(self.params),
        }
        if self.decompositions is not None:
            obj["decompositions"] = [[sorted(b) for b in d.bags] for d in self.decompositions]
        if self.decompositions_bipartite is not None:
            obj["decompositions_bipartite"] = [[sorted(b) for b in d.bags]
                                               for d in self.decompositions_bipartite]
        if self.labels is not None:
            obj["labels"] = self.labels
        return json.dumps(obj, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "ProofdoorDescriptor":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            raise DescriptorError(f"descriptor is not valid JSON: {e}") from None
        for key in ("chunks", "interpolants", "supports", "params"):
            if key not in obj:
                raise DescriptorError(f"descriptor missing field {key!r}")

        def decs(key):
            if key not in obj:
                return None
            return [PathDecomposition(bags) for bags in obj[key]]
        try:
            return cls(obj["chunks"], obj["interpolants"], obj["supports"], obj["params"],
                       decs("decompositions"), decs("decompositions_bipartite"), obj.get("labels"))
        except (TypeError, ValueError) as e:
            raise DescriptorError(f"malformed descriptor: {e}") from None


# -- cutting partial orders ------------------------------------------------------

def cutting_orders_from_sets(xs: list[set], zs: list[set]) -> list[PartialOrder]:
    k = len(xs)
    out = []
    for i in range(1, k):
        before = set().union(*xs[:i])
        after = set().union(*xs[i:]) | set().union(*zs[i - 1:])
        out.append(PartialOrder(before, after - before))
    return out


def cutting_partial_orders(d: ProofdoorDescriptor, f: CnfFormula) -> list[PartialOrder]:
    return cutting_orders_from_sets(d.x_sets(f), d.z_sets())


# -- verification ------------------------------------------------------------------

@dataclass
class Condition:
    passed: bool = True
    witnesses: list = field(default_factory=list)
    note: str = ""


@dataclass
class VerificationReport:
    conditions: dict
    measured: dict
    widths: list
    sat_calls: int
    wall_time: float
    graph: str

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions.values())

    def lines(self) -> list[str]:
        out = [f"passed={int(self.passed)}"]
        for name, c in self.conditions.items():
            out.append(f"cond.{name}={'pass' if c.passed else 'FAIL'}")
            for w in c.witnesses[:5]:
                out.append(f"cond.{name}.witness={w}")
        for key, v in self.measured.items():
            out.append(f"measured.{key}={v}")
        out.append(f"sat_calls={self.sat_calls}")
        out.append(f"wall_time={self.wall_time:.3f}")
        return out


def _chunk_width(f, d, j, graph):
    g = build_graph(f, graph, d.chunks[j - 1])
    dec = d.decomposition(j, graph)
    if dec is not None:
        chk = verify_path_decomposition(g, dec)
        if not chk:
            return None, f"shipped decomposition invalid ({chk.condition}: {chk.witness})"
        return chk.width, "certified"
    dec = heuristic_path_decomposition(g)
    return max(dec.width, 0), "heuristic upper bound"


def verify_proofdoor(f: CnfFormula, d: ProofdoorDescriptor, graph: str = "primal",
                     cross_check: bool = True) -> VerificationReport:
    t0 = time.perf_counter()
    d.validate(f)
    k = d.k
    c_max, w_max, s_max = d.params["c"], d.params["w"], d.params["s"]
    conds = {name: Condition() for name in
             ("interpolant_size", "entailment", "final_size", "support_size", "width",
              "termination", "scope")}
    calls = 0

    def unsat(clauses):
        nonlocal calls
        calls += 1
        return is_unsat(CnfFormula(f.num_vars, tuple(clauses)), cross_check=cross_check)

    # (1) interpolant sizes
    for j in range(1, k):
        if len(d.interpolant(j)) > c_max:
            conds["interpolant_size"].passed = False
            conds["interpolant_size"].witnesses.append((j, len(d.interpolant(j))))
    # (2) entailment A_j ∧ S(C) ⊨ C
    for j in range(1, k):
        a = [f.clause(i) for i in d.chunks[j - 1]]
        for ci, c in enumerate(d.interpolant(j)):
            sup = [d.interpolant(j - 1)[x] for x in d.support(j, ci)]
            if len(sup) > s_max:
                conds["support_size"].passed = False
                conds["support_size"].witnesses.append((j, ci, len(sup)))
            if not unsat(a + sup + [Clause([-l]) for l in c]):
                conds["entailment"].passed = False
                conds["entailment"].witnesses.append((j, ci, tuple(c)))
    # (3) final interpolant size
    if k > 1 and len(d.interpolant(k - 1)) > s_max:
        conds["final_size"].passed = False
        conds["final_size"].witnesses.append(len(d.interpolant(k - 1)))
    # (4) chunk widths
    widths = []
    notes = set()
    for j in range(1, k + 1):
        wj, how = _chunk_width(f, d, j, graph)
        notes.add(how)
        widths.append(wj)
        if wj is None or wj > w_max:
            conds["width"].passed = False
            conds["width"].witnesses.append((j, wj if wj is not None else how))
    conds["width"].note = ", ".join(sorted(notes))
    # termination: I_{k-1} ∧ A_k unsatisfiable
    last = [f.clause(i) for i in d.chunks[-1]]
    prev = list(d.interpolant(k - 1)) if k > 1 else []
    if not unsat(prev + last):
        conds["termination"].passed = False
        conds["termination"].witnesses.append(k)
    # scope: vars(I_j) ⊆ vars(A_{j+1..k}) ∩ vars(A_1..A_j ∪ I_{j-1})
    cv = d.chunk_vars(f)
    for j in range(1, k):
        later = set().union(*cv[j:])
        earlier = set().union(*cv[:j]) | (d.z_sets()[j - 2] if j > 1 else set())
        zs = d.z_sets()[j - 1]
        bad = zs - (later & earlier)
        if bad:
            conds["scope"].passed = False
            conds["scope"].witnesses.append((j, sorted(bad)[:5]))
    sup_sizes = [len(s) for sj in d.supports for s in sj]
    measured = {
        "c": max((len(i) for i in d.interpolants), default=0),
        "s": max(sup_sizes + ([len(d.interpolant(k - 1))] if k > 1 else []), default=0),
        "max_support": max(sup_sizes, default=0),
        "w": max((w for w in widths if w is not None), default=0),
        "k": k,
    }
    return VerificationReport(conds, measured, widths, calls, time.perf_counter() - t0, graph)


# -- assembly ----------------------------------------------------------------------

class AssemblyError(RuntimeError):
    def __init__(self, j, clause, msg):
        super().__init__(f"cannot derive clause {tuple(clause)} of I_{j}: {msg}")
        self.j = j
        self.clause = clause


@dataclass
class AssemblyResult:
    proof: ResolutionProof
    subcalls: int = 0
    reused: int = 0
    fallbacks: int = 0          # CacheSAT conversions after a CDCL budget stop
    unfiltered: int = 0         # sub-problems that needed clauses outside X_j
    conflicts: int = 0
    max_dcsf: int = 0           # largest CacheSAT cache over sub-problems, if counted
    wall_time: float = 0.0


def _introduction_order(dec: PathDecomposition, num_vars: int) -> list[int]:
    """Variables by the first bag that contains them, ties by id."""
    first = {}
    for i, bag in enumerate(dec.bags):
        for v in bag:
            first.setdefault(v, i)
    return sorted((v for v in first if v <= num_vars), key=lambda v: (first[v], v))


def _chunk_order(f, d, j):
    dec = d.decomposition(j, "primal")
    if dec is None:
        dec = heuristic_path_decomposition(build_graph(f, "primal", d.chunks[j - 1]))
    return _introduction_order(dec, f.num_vars)


def _refute(b: ProofBuilder, leaf_ids, alpha, order, budget, stats, count_dcsf=False):
    """Refute the clauses ``leaf_ids`` restricted by ``alpha``; splice the lifted
    proof into b.  Returns the new root id, or None if satisfiable."""
    local = CnfFormula(b.formula.num_vars, tuple(b.clause(i) for i in leaf_ids))
    r = restrict(local, alpha)
    vs = r.variables()
    order = [v for v in order if v in vs] + sorted(vs - set(order))
    stats.subcalls += 1
    res = solve_cdcl(r, CdclConfig(order=tuple(order), conflict_budget=budget))
    stats.conflicts += res.conflicts
    if res.status == SAT:
        return None
    if count_dcsf:
        stats.max_dcsf = max(stats.max_dcsf, solve_cachesat(r, order).dcsf_count)
    if res.status == BUDGET:
        stats.fallbacks += 1
        p = cachesat_refutation(r, order)
    else:
        p = res.proof
    leaf_map = {i: leaf_ids[o - 1] for i, o in enumerate(r.origin, 1)}
    return b.splice(p, leaf_map)


def assemble_refutation(f: CnfFormula, d: ProofdoorDescriptor, budget: int = 100000,
                        count_dcsf: bool = False) -> AssemblyResult:
    """Derive I_1, ..., I_{k-1} clause by clause, then refute I_{k-1} and A_k.

    Each clause C of I_j is derived by refuting (A_j and its supports)
    restricted by the negation of C and lifting the proof back.  Sub-problems
    first try only the clauses over X_j and vars(C); that keeps every
    resolution inside the cutting orders.
    """
    t0 = time.perf_counter()
    d.validate(f)
    stats = AssemblyResult(None)
    b = ProofBuilder(f)
    xs = d.x_sets(f)
    derived: dict[Clause, int] = {}
    prev_ids: list[int] = []

    def finish(root):
        stats.proof = b.build(root)
        stats.wall_time = time.perf_counter() - t0
        return stats

    for j in range(1, d.k):
        order = _chunk_order(f, d, j)
        cur = []
        for ci, c in enumerate(d.interpolant(j)):
            if c in derived:
                stats.reused += 1
                cur.append(derived[c])
                continue
            sub = next((i for i in prev_ids if set(b.clause(i)) <= set(c)), None)
            if sub is not None:
                stats.reused += 1
                derived[c] = sub
                cur.append(sub)
                continue
            leaves = list(d.chunks[j - 1]) + [prev_ids[x] for x in d.support(j, ci)]
            scope = xs[j - 1] | c.variables()
            narrow = [i for i in leaves if b.clause(i).variables() <= scope]
            alpha = [-l for l in c]
            root = _refute(b, narrow, alpha, order, budget, stats, count_dcsf)
            if root is None:
                stats.unfiltered += 1
                root = _refute(b, leaves, alpha, order, budget, stats, count_dcsf)
            if root is None:
                raise AssemblyError(j, c, "chunk and support do not entail it")
            derived[c] = root
            cur.append(root)
            if not b.clause(root):
                return finish(root)
        prev_ids = cur
    leaves = list(d.chunks[-1]) + prev_ids
    root = _refute(b, leaves, [], _chunk_order(f, d, d.k), budget, stats, count_dcsf)
    if root is None:
        raise AssemblyError(d.k, Clause(), "final chunk is consistent with I_{k-1}")
    return finish(root)
