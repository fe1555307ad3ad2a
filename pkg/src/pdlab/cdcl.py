"""CDCL with a fixed decision order, DECISION learning, a restart after every
conflict, no clause deletion and naive BCP.

Every learned clause is derived by a trivial resolution chain over the
implication graph, so each run exports a checkable ResolutionProof.
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields

import numpy as np

from .cnf import Clause, CnfFormula, Propagator, absorbs
from .resolution import ProofBuilder, ResolutionProof

SAT, UNSAT, BUDGET = "SAT", "UNSAT", "BUDGET_EXCEEDED"


@dataclass
class CdclConfig:
    order: tuple = ()
    value_selection: object = "zero-first"    # "zero-first" | "one-first" | tuple of literals
    learning: str = "decision"
    restart: str = "every-conflict"
    deletion: object = None
    bcp: str = "naive"
    conflict_budget: int | None = None

    def overrides(self) -> dict:
        base = CdclConfig()
        return {f.name: getattr(self, f.name) for f in fields(self)
                if f.name not in ("order", "conflict_budget") and getattr(self, f.name) != getattr(base, f.name)}

    def validate(self):
        if self.learning != "decision":
            raise NotImplementedError("only DECISION learning is implemented")
        if self.restart != "every-conflict":
            raise NotImplementedError("only restart-after-every-conflict is implemented")
        if self.deletion is not None:
            raise NotImplementedError("clause deletion is not part of this configuration")
        if self.bcp != "naive":
            raise NotImplementedError("only naive BCP is implemented")
        if self.conflict_budget is not None and self.conflict_budget <= 0:
            raise ValueError("conflict budget must be positive")


@dataclass
class CdclResult:
    status: str
    conflicts: int = 0
    decisions: int = 0
    restarts: int = 0
    learned: list = field(default_factory=list)      # Clauses, in learning order
    learned_ids: list = field(default_factory=list)  # their ids in ``proof``
    proof: ResolutionProof | None = None
    model: dict | None = None
    overrides: dict = field(default_factory=dict)


class Engine:
    """Search state shared by solve_cdcl and derive_clause."""

    def __init__(self, f: CnfFormula, order, selection="zero-first"):
        self.f = f
        self.builder = ProofBuilder(f)
        self.prop = Propagator(f.num_vars, f.clauses)
        self.ids = list(range(1, len(f.clauses) + 1))   # propagator index -> proof id
        occurring = f.variables()
        seen = set()
        ordered = []
        for v in order:
            if v in occurring and v not in seen:
                ordered.append(v)
                seen.add(v)
        missing = occurring - seen
        if missing:
            raise ValueError(f"order misses variables {sorted(missing)[:10]}")
        self.order = np.array(ordered, dtype=np.int64)
        self.selection = selection
        self.conflicts = self.decisions = self.restarts = 0
        self.learned: list[Clause] = []
        self.learned_ids: list[int] = []
        self.model = None

    def _pick(self, val, script):
        for l in script:
            if val[abs(l)] == 0:
                return l
        if len(self.order) == 0:
            return None
        free = np.flatnonzero(val[self.order] == 0)
        if len(free) == 0:
            return None
        v = int(self.order[free[0]])
        if self.selection == "one-first":
            return v
        return -v

    def _analyze(self, k, reason, pos) -> int:
        cur = self.ids[k]
        c = self.builder.clause(cur)
        steps = 0
        while True:
            implied = [l for l in c if reason.get(abs(l)) is not None]
            if not implied:
                break
            l = max(implied, key=lambda x: pos[abs(x)])
            cur = self.builder.resolve(cur, self.ids[reason[abs(l)]], abs(l))
            c = self.builder.clause(cur)
            steps += 1
        if steps == 0 and c:
            raise RuntimeError("conflict clause made only of decisions; propagation was not at fixpoint")
        return cur

    def descend(self, script=()):
        """One restart-to-conflict descent.  Returns ("conflict", id), ("unsat", id)
        or ("sat", None)."""
        self.restarts += 1
        val = self.prop.new_values()
        reason: dict[int, int | None] = {}
        pos: dict[int, int] = {}

        def note(lit, ci):
            reason[abs(lit)] = ci
            pos[abs(lit)] = len(pos)

        k = self.prop.run(val, note)
        while k is None:
            lit = self._pick(val, script)
            if lit is None:
                self.model = {v: bool(val[v] > 0) for v in range(1, self.f.num_vars + 1)}
                return "sat", None
            self.decisions += 1
            val[abs(lit)] = 1 if lit > 0 else -1
            reason[abs(lit)] = None
            pos[abs(lit)] = len(pos)
            k = self.prop.run(val, note)
        cid = self._analyze(k, reason, pos)
        self.conflicts += 1
        c = self.builder.clause(cid)
        if not c:
            return "unsat", cid
        self.prop.add(c)
        self.ids.append(cid)
        self.learned.append(c)
        self.learned_ids.append(cid)
        return "conflict", cid


def solve_cdcl(f: CnfFormula, cfg: CdclConfig | None = None) -> CdclResult:
    cfg = cfg or CdclConfig(order=tuple(sorted(f.variables())))
    cfg.validate()
    order = cfg.order if cfg.order else tuple(sorted(f.variables()))
    script = ()
    selection = cfg.value_selection
    if not isinstance(selection, str):
        script, selection = tuple(selection), "zero-first"
    eng = Engine(f, order, selection)
    empty = next((i for i, c in enumerate(f.clauses, 1) if not c), None)
    if empty is not None:
        return CdclResult(UNSAT, conflicts=1, proof=ResolutionProof(f, [], empty),
                          overrides=cfg.overrides())
    while True:
        kind, cid = eng.descend(script)
        res = CdclResult(UNSAT, eng.conflicts, eng.decisions, eng.restarts, list(eng.learned),
                         list(eng.learned_ids), overrides=cfg.overrides())
        if kind == "unsat":
            res.proof = eng.builder.build(cid)
            return res
        if kind == "sat":
            res.status = SAT
            res.model = eng.model
            res.proof = eng.builder.build(None)
            res.proof.root = None
            return res
        if cfg.conflict_budget is not None and eng.conflicts >= cfg.conflict_budget:
            res.status = BUDGET
            res.proof = eng.builder.build(None)
            res.proof.root = None
            return res


# -- guided derivation -----------------------------------------------------------

ABSORBED = "ABSORBED"


@dataclass
class DeriveOutcome:
    status: str
    conflicts: int
    learned: list            # clauses learned during this call
    proof: ResolutionProof   # over f ∪ db as inputs
    learned_ids: list


def derive_clause(f: CnfFormula, db, c, order, budget: int | None = None) -> DeriveOutcome:
    """Drive CDCL until f ∪ db ∪ learned absorbs c.

    Success is always reported as ABSORBED; the clauses learned on the way are
    returned in ``learned`` (the empty clause if the search refuted f ∪ db).

    For each literal l of c the search restarts, decides the negations of the
    other literals of c, then ¬l, then follows ``order``.  Each descent ends in
    a conflict whose DECISION clause blocks it, so eventually propagation under
    the negated rest of c forces l (or conflicts).
    """
    c = Clause(c)
    base = CnfFormula(f.num_vars, f.clauses + tuple(Clause(d) for d in db))
    order = list(order) + sorted(base.variables() - set(order))
    eng = Engine(base, order)
    if base.has_empty() or any(not d for d in db):
        return DeriveOutcome(ABSORBED, 0, [], eng.builder.build(None), [])
    for l in c:
        rest = [-o for o in c if o != l]
        while not _absorbed_for(eng.prop, c, l):
            if budget is not None and eng.conflicts >= budget:
                return DeriveOutcome(BUDGET, eng.conflicts, list(eng.learned), eng.builder.build(None),
                                     list(eng.learned_ids))
            kind, cid = eng.descend(tuple(rest) + (-l,))
            if kind == "unsat":
                # a level-0 conflict: the empty clause subsumes c
                eng.learned.append(Clause())
                eng.learned_ids.append(cid)
                return DeriveOutcome(ABSORBED, eng.conflicts, list(eng.learned),
                                     eng.builder.build(cid), list(eng.learned_ids))
            if kind == "sat":
                raise ValueError(f"{c} is not entailed: found a model falsifying it")
    assert absorbs(None, c, eng.prop)
    return DeriveOutcome(ABSORBED, eng.conflicts, list(eng.learned), eng.builder.build(None),
                         list(eng.learned_ids))


def _absorbed_for(prop: Propagator, c: Clause, l: int) -> bool:
    val = prop.new_values()
    for o in c:
        if o != l:
            val[abs(o)] = -1 if o > 0 else 1
    if prop.run(val) is not None:
        return True
    return val[abs(l)] == (1 if l > 0 else -1)
