"""Resolution proofs: the DAG, the RES trace format, checking, two-layer
partial-order compliance, interpolant extraction and restriction lifting."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .cnf import Clause, CnfFormula, as_literals, resolve
from .structure import PartialOrder


@dataclass(frozen=True)
class Step:
    id: int
    left: int
    right: int
    pivot: int
    clause: Clause


class ResolutionProof:
    """Inputs are the formula's clauses (ids 1..m); steps carry ids m+1.. ."""

    def __init__(self, formula: CnfFormula, steps: Iterable[Step] = (), root: int | None = None):
        self.formula = formula
        self.steps = list(steps)
        self.root = root

    @property
    def num_inputs(self) -> int:
        return len(self.formula.clauses)

    def __len__(self):
        return len(self.steps)

    def step(self, sid: int) -> Step:
        return self.steps[sid - self.num_inputs - 1]

    def is_input(self, cid: int) -> bool:
        return 1 <= cid <= self.num_inputs

    def clause(self, cid: int) -> Clause:
        if self.is_input(cid):
            return self.formula.clause(cid)
        return self.step(cid).clause

    def root_clause(self) -> Clause | None:
        return None if self.root is None else self.clause(self.root)

    def is_refutation(self) -> bool:
        return self.root is not None and len(self.clause(self.root)) == 0

    def ancestors(self, sid: int | None = None) -> set[int]:
        """Ids (inputs and steps) that the given id (default: root) depends on."""
        sid = self.root if sid is None else sid
        if sid is None:
            return set()
        seen = {sid}
        stack = [sid]
        while stack:
            s = stack.pop()
            if self.is_input(s):
                continue
            st = self.step(s)
            for a in (st.left, st.right):
                if a not in seen:
                    seen.add(a)
                    stack.append(a)
        return seen

    def consumers(self, live: set[int] | None = None) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for st in self.steps:
            if live is not None and st.id not in live:
                continue
            out.setdefault(st.left, []).append(st.id)
            if st.right != st.left:
                out.setdefault(st.right, []).append(st.id)
        return out

    def pruned(self) -> "ResolutionProof":
        """Drop steps the root does not depend on, renumbering the rest."""
        live = self.ancestors()
        b = ProofBuilder(self.formula)
        remap = {i: i for i in range(1, self.num_inputs + 1)}
        for st in self.steps:
            if st.id in live:
                remap[st.id] = b.resolve(remap[st.left], remap[st.right], st.pivot)
        return b.build(remap.get(self.root) if self.root is not None else None)


class ProofBuilder:
    """Accumulates resolution steps over a fixed input formula."""

    def __init__(self, formula: CnfFormula):
        self.formula = formula
        self.m = len(formula.clauses)
        self.steps: list[Step] = []
        self._index: dict[Clause, int] = {}

    def clause(self, cid: int) -> Clause:
        if cid <= self.m:
            return self.formula.clause(cid)
        return self.steps[cid - self.m - 1].clause

    @property
    def next_id(self) -> int:
        return self.m + len(self.steps) + 1

    def resolve(self, left: int, right: int, pivot: int) -> int:
        c = resolve(self.clause(left), self.clause(right), pivot)
        sid = self.next_id
        self.steps.append(Step(sid, left, right, abs(pivot), c))
        self._index.setdefault(c, sid)
        return sid

    def splice(self, proof: ResolutionProof, leaf_map: dict[int, int]) -> int:
        """Replay the live steps of ``proof`` with its inputs mapped to ids here.

        Mapped clauses may carry extra literals; the replayed resolvents then
        carry them too, which is exactly restriction lifting.  Returns the id
        of the replayed root."""
        live = proof.ancestors()
        remap = dict(leaf_map)
        if proof.is_input(proof.root):
            return remap[proof.root]
        for st in proof.steps:
            if st.id in live:
                remap[st.id] = self.resolve(remap[st.left], remap[st.right], st.pivot)
        return remap[proof.root]

    def build(self, root: int | None = None) -> ResolutionProof:
        if root is None and self.steps:
            root = self.steps[-1].id
        return ResolutionProof(self.formula, list(self.steps), root)


# -- RES trace format -------------------------------------------------------------

def emit_res(p: ResolutionProof) -> str:
    out = [f"p res {p.num_inputs} {len(p.steps)}"]
    for st in p.steps:
        lits = " ".join(map(str, st.clause))
        out.append(f"{st.id} {st.left} {st.right} {st.pivot} " + (lits + " 0" if lits else "0"))
    return "\n".join(out) + "\n"


class ResFormatError(ValueError):
    pass


def parse_res(text: str, formula: CnfFormula) -> ResolutionProof:
    lines = [l.strip() for l in text.splitlines() if l.strip() and not l.startswith("c")]
    if not lines or not lines[0].startswith("p res"):
        raise ResFormatError("missing 'p res' header")
    parts = lines[0].split()
    if len(parts) != 4:
        raise ResFormatError("malformed 'p res' header")
    m, nsteps = int(parts[2]), int(parts[3])
    if m != len(formula.clauses):
        raise ResFormatError(f"header declares {m} inputs but formula has {len(formula.clauses)}")
    steps = []
    for l in lines[1:]:
        toks = [int(t) for t in l.split()]
        if len(toks) < 5 or toks[-1] != 0:
            raise ResFormatError(f"malformed step line {l!r}")
        steps.append(Step(toks[0], toks[1], toks[2], toks[3], Clause(toks[4:-1])))
    if len(steps) != nsteps:
        raise ResFormatError(f"step-count mismatch (declared {nsteps}, found {len(steps)})")
    root = None
    for st in steps:
        if len(st.clause) == 0:
            root = st.id
            break
    if root is None and steps:
        root = steps[-1].id
    if root is None:
        root = next((i for i, c in enumerate(formula.clauses, 1) if not c), None)
    return ResolutionProof(formula, steps, root)


# -- checking ----------------------------------------------------------------------

@dataclass
class ProofCheck:
    ok: bool
    step: int | None = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def check_resolution_proof(f: CnfFormula, p: ResolutionProof, refutation: bool = True) -> ProofCheck:
    m = len(f.clauses)
    if p.num_inputs != m:
        return ProofCheck(False, None, f"proof has {p.num_inputs} inputs, formula has {m}")
    if p.formula is not f:
        for i in range(1, m + 1):
            if p.formula.clause(i) != f.clause(i):
                return ProofCheck(False, i, "input clause does not match formula")
    clauses = list(f.clauses)
    expect = m + 1
    for st in p.steps:
        if st.id != expect:
            return ProofCheck(False, st.id, f"step id out of sequence (expected {expect})")
        expect += 1
        for a in (st.left, st.right):
            if not 1 <= a < st.id:
                return ProofCheck(False, st.id, f"dangling antecedent {a}")
        try:
            r = resolve(clauses[st.left - 1], clauses[st.right - 1], st.pivot)
        except ValueError as e:
            return ProofCheck(False, st.id, f"bad pivot: {e}")
        if r != st.clause:
            return ProofCheck(False, st.id, f"resolvent mismatch: expected {r}, claimed {st.clause}")
        clauses.append(st.clause)
    if refutation:
        if p.root is None or not 1 <= p.root <= len(clauses):
            return ProofCheck(False, None, "no root")
        if clauses[p.root - 1]:
            return ProofCheck(False, p.root, "root clause is not empty")
    return ProofCheck(True)


@dataclass
class OrderCheck:
    ok: bool
    path: list[int] = field(default_factory=list)   # leaf-to-root ids
    after_step: int | None = None                   # resolves y in after ...
    before_step: int | None = None                  # ... below a later x in before

    def __bool__(self):
        return self.ok


def check_partial_order(p: ResolutionProof, po: PartialOrder) -> OrderCheck:
    if not po.before or p.root is None:
        return OrderCheck(True)
    live = p.ancestors()
    cons = p.consumers(live)
    bit = {v: 1 << i for i, v in enumerate(sorted(po.before))}
    # down[s]: before-pivots resolved on some path from s to the root
    down: dict[int, int] = {}
    bad = None
    for st in reversed(p.steps):
        if st.id not in live:
            continue
        acc = 0
        for c in cons.get(st.id, ()):
            acc |= down[c] | bit.get(p.step(c).pivot, 0)
        down[st.id] = acc
        if acc and st.pivot in po.after:
            bad = st.id
    if bad is None:
        return OrderCheck(True)
    # witness: leaf -> ... -> bad -> ... -> a before-pivot step -> ... -> root
    below = []
    s = bad
    while not p.is_input(s):
        below.append(s)
        s = p.step(s).left
    below.append(s)
    below.reverse()
    above = []
    s = bad
    hit = None
    while s != p.root:
        nxt = None
        for c in cons[s]:
            if hit is None:
                if p.step(c).pivot in po.before:
                    nxt, hit = c, c
                    break
                if down[c]:
                    nxt = c
                    break
            else:
                nxt = c
                break
        s = nxt
        above.append(s)
    return OrderCheck(False, below + above, bad, hit)


# -- interpolation -------------------------------------------------------------------

@dataclass(frozen=True)
class VarPartition:
    before: frozenset
    after: frozenset
    shared: frozenset

    def __init__(self, before=(), after=(), shared=()):
        b, a, s = frozenset(before), frozenset(after), frozenset(shared)
        if b & a or b & s or a & s:
            raise ValueError("partition classes overlap")
        object.__setattr__(self, "before", b)
        object.__setattr__(self, "after", a)
        object.__setattr__(self, "shared", s)

    def check_split(self, f: CnfFormula) -> int | None:
        """Id of the first clause spanning before and after, or None."""
        missing = f.variables() - (self.before | self.after | self.shared)
        if missing:
            raise ValueError(f"partition misses variables {sorted(missing)[:10]}")
        for i, c in enumerate(f.clauses, 1):
            vs = c.variables()
            if vs & self.before and vs & self.after:
                return i
        return None

    def a_side(self, f: CnfFormula) -> list[int]:
        return [i for i, c in enumerate(f.clauses, 1) if not c.variables() & self.after]

    def emit(self) -> str:
        def row(tag, s):
            return tag + "".join(f" {v}" for v in sorted(s)) + " 0"
        return "\n".join([row("b", self.before), row("a", self.after), row("s", self.shared)]) + "\n"

    @classmethod
    def parse(cls, text: str) -> "VarPartition":
        parts = {}
        for l in text.splitlines():
            toks = l.split()
            if not toks or toks[0] == "c":
                continue
            if toks[0] not in ("b", "a", "s") or toks[-1] != "0":
                raise ValueError(f"bad partition line {l!r}")
            parts[toks[0]] = [int(t) for t in toks[1:-1]]
        return cls(parts.get("b", ()), parts.get("a", ()), parts.get("s", ()))


class InterpolantError(RuntimeError):
    def __init__(self, msg, clause=None):
        super().__init__(msg)
        self.clause = clause


@dataclass
class InterpolantCheck:
    ok: bool
    reason: str = ""
    clause: Clause | None = None

    def __bool__(self):
        return self.ok


def verify_interpolant(a: CnfFormula, b: CnfFormula, i: CnfFormula, shared) -> InterpolantCheck:
    from .sat import is_unsat
    shared = set(shared)
    for c in i.clauses:
        if not c.variables() <= shared:
            return InterpolantCheck(False, "scope violation: non-shared variable", c)
    nv = max(a.num_vars, b.num_vars, i.num_vars)
    for c in i.clauses:
        q = CnfFormula(nv, a.clauses + tuple(Clause([-l]) for l in c))
        if not is_unsat(q):
            return InterpolantCheck(False, "A does not entail clause", c)
    if not is_unsat(CnfFormula(nv, i.clauses + b.clauses)):
        return InterpolantCheck(False, "interpolant is consistent with B")
    return InterpolantCheck(True)


def extract_interpolant(p: ResolutionProof, vp: VarPartition,
                        a_clause_ids: Iterable[int] | None = None,
                        verify: bool = True) -> CnfFormula:
    """Boundary-clause cut of a refutation ordered before < (after, shared)."""
    f = p.formula
    a_ids = set(vp.a_side(f) if a_clause_ids is None else a_clause_ids)
    live = p.ancestors()
    cons = p.consumers(live)
    cut = []

    def feeds_non_before(cid):
        return any(p.step(c).pivot not in vp.before for c in cons.get(cid, ()))

    for cid in sorted(live):
        if p.is_input(cid):
            if cid in a_ids and (cid == p.root or feeds_non_before(cid)):
                cut.append(cid)
        else:
            if p.step(cid).pivot in vp.before and (cid == p.root or feeds_non_before(cid)):
                cut.append(cid)
    seen, clauses = set(), []
    for cid in cut:
        c = p.clause(cid)
        if c not in seen:
            seen.add(c)
            clauses.append(c)
    interp = CnfFormula(f.num_vars, tuple(clauses))
    for c in clauses:
        if c.variables() & vp.before:
            raise InterpolantError("cut clause mentions a before-variable", c)
    if verify:
        a = CnfFormula(f.num_vars, tuple(f.clause(i) for i in sorted(a_ids)))
        b = CnfFormula(f.num_vars, tuple(f.clause(i) for i in range(1, len(f) + 1) if i not in a_ids))
        shared = set(vp.shared) | (f.variables() - vp.before - vp.after)
        chk = verify_interpolant(a, b, interp, shared)
        if not chk:
            raise InterpolantError("extracted interpolant failed verification: " + chk.reason, chk.clause)
    return interp


# -- restriction lifting ---------------------------------------------------------

class LiftError(ValueError):
    pass


def lift_restriction(p: ResolutionProof, f: CnfFormula, alpha) -> ResolutionProof:
    """Turn a refutation of f restricted by alpha into a derivation from f of a
    clause made of literals falsified by alpha."""
    g = p.formula
    if g.origin is None:
        raise LiftError("proof input carries no provenance map")
    lits = set(as_literals(alpha))
    leaf_map = {}
    for i, orig in enumerate(g.origin, 1):
        if not 1 <= orig <= len(f):
            raise LiftError(f"provenance points outside the formula ({orig})")
        oc = f.clause(orig)
        if any(l in lits for l in oc) or Clause(l for l in oc if -l not in lits) != g.clause(i):
            raise LiftError(f"restricted clause {i} does not match clause {orig} under the restriction")
        leaf_map[i] = orig
    b = ProofBuilder(f)
    root = b.splice(p, leaf_map)
    return b.build(root)


# -- ordered refutation by variable elimination --------------------------------------

def ordered_refutation(f: CnfFormula, order: Iterable[int], limit: int = 200000) -> ResolutionProof:
    """Davis-Putnam elimination in the given order.  Every path of the result
    resolves variables in that order."""
    b = ProofBuilder(f)
    active: dict[Clause, int] = {}
    for i, c in enumerate(f.clauses, 1):
        if not c:
            return b.build(i)
        if not c.tautological:
            active.setdefault(c, i)
    order = list(order)
    rest = sorted(f.variables() - set(order))
    for v in order + rest:
        pos = [(c, i) for c, i in active.items() if v in c]
        negs = [(c, i) for c, i in active.items() if -v in c]
        for c, _ in pos + negs:
            del active[c]
        for cp, ip in pos:
            for cn, i_n in negs:
                r = resolve(cp, cn, v)
                if r.tautological or r in active:
                    continue
                sid = b.resolve(ip, i_n, v)
                if not r:
                    return b.build(sid)
                active[r] = sid
                if len(b.steps) > limit:
                    raise RuntimeError("ordered refutation exceeded its step limit")
    raise ValueError("formula is satisfiable; no refutation exists")
