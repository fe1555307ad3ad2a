"""CNF formulas, DIMACS I/O, restriction, naive unit propagation and resolution.

Literals are signed DIMACS integers throughout: ``3`` is x3, ``-3`` is its
negation.  Clauses are canonical tuples sorted by variable.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

Literal = int


def var(lit: Literal) -> int:
    return lit if lit > 0 else -lit


def neg(lit: Literal) -> Literal:
    return -lit


class Clause(tuple):
    """Immutable canonical clause: duplicates removed, sorted by (var, sign)."""

    def __new__(cls, lits: Iterable[int] = ()):
        s = set()
        for l in lits:
            l = int(l)
            if l == 0:
                raise ValueError("0 is not a literal")
            s.add(l)
        return super().__new__(cls, sorted(s, key=lambda l: (abs(l), l)))

    @property
    def tautological(self) -> bool:
        return any(self[i] == -self[i + 1] for i in range(len(self) - 1))

    @property
    def is_empty(self) -> bool:
        return len(self) == 0

    def variables(self) -> set[int]:
        return {abs(l) for l in self}

    def subsumes(self, other: Iterable[int]) -> bool:
        return set(self) <= set(other)

    def __repr__(self):
        if not self:
            return "Clause(⊥)"
        return "Clause(" + " ".join(map(str, self)) + ")"


BOTTOM = Clause()


class Assignment:
    """Partial map var -> bool with decision-level tags."""

    def __init__(self, values: Mapping[int, bool] | None = None):
        self._val: dict[int, bool] = {}
        self._lvl: dict[int, int] = {}
        for v, b in (values or {}).items():
            self.assign(v, b)

    @classmethod
    def from_literals(cls, lits: Iterable[int], level: int = 0) -> "Assignment":
        a = cls()
        for l in lits:
            a.assign(abs(l), l > 0, level)
        return a

    def assign(self, v: int, value: bool, level: int = 0) -> None:
        if v < 1:
            raise ValueError(f"bad variable {v}")
        if level < 0:
            raise ValueError("negative level")
        if v in self._val:
            raise ValueError(f"variable {v} already assigned")
        self._val[v] = bool(value)
        self._lvl[v] = level

    def value(self, lit: int):
        b = self._val.get(abs(lit))
        if b is None:
            return None
        return b if lit > 0 else not b

    def level(self, v: int) -> int:
        return self._lvl[v]

    def literals(self) -> list[int]:
        return [v if b else -v for v, b in self._val.items()]

    def as_dict(self) -> dict[int, bool]:
        return dict(self._val)

    def __contains__(self, v):
        return v in self._val

    def __len__(self):
        return len(self._val)

    def __repr__(self):
        return f"Assignment({self._val})"


def as_literals(alpha) -> list[int]:
    """Accept an Assignment, a dict var->bool, or an iterable of literals."""
    if alpha is None:
        return []
    if isinstance(alpha, Assignment):
        return alpha.literals()
    if isinstance(alpha, Mapping):
        return [v if b else -v for v, b in alpha.items()]
    return [int(l) for l in alpha]


@dataclass(frozen=True, eq=False)
class CnfFormula:
    num_vars: int
    clauses: tuple = ()
    comments: tuple = ()
    # origin[i] is the id (1-based) of the clause in the parent formula that
    # produced clause i+1 here; set by restrict()
    origin: tuple | None = None
    parent: "CnfFormula | None" = field(default=None, repr=False)

    def __post_init__(self):
        cl = tuple(c if isinstance(c, Clause) else Clause(c) for c in self.clauses)
        object.__setattr__(self, "clauses", cl)
        for i, c in enumerate(cl, 1):
            for l in c:
                if abs(l) > self.num_vars:
                    raise ValueError(f"clause {i}: literal {l} exceeds num_vars={self.num_vars}")

    def clause(self, cid: int) -> Clause:
        if cid < 1:
            raise IndexError(cid)
        return self.clauses[cid - 1]

    def __len__(self):
        return len(self.clauses)

    def __iter__(self):
        return iter(self.clauses)

    def __eq__(self, other):
        if not isinstance(other, CnfFormula):
            return NotImplemented
        return self.num_vars == other.num_vars and self.clauses == other.clauses

    def __hash__(self):
        return hash((self.num_vars, self.clauses))

    def variables(self) -> set[int]:
        out = set()
        for c in self.clauses:
            out.update(abs(l) for l in c)
        return out

    def num_literals(self) -> int:
        return sum(len(c) for c in self.clauses)

    def has_empty(self) -> bool:
        return any(len(c) == 0 for c in self.clauses)

    def subformula(self, ids: Iterable[int]) -> "CnfFormula":
        ids = list(ids)
        return CnfFormula(self.num_vars, [self.clause(i) for i in ids],
                          origin=tuple(ids), parent=self)

    def extend(self, clauses: Iterable) -> "CnfFormula":
        return CnfFormula(self.num_vars, self.clauses + tuple(Clause(c) for c in clauses))


# -- DIMACS ---------------------------------------------------------------

class DimacsError(ValueError):
    def __init__(self, msg: str, line: int):
        super().__init__(f"line {line}: {msg}")
        self.line = line


class HeaderError(DimacsError):
    pass


class LiteralRangeError(DimacsError):
    pass


class UnterminatedClauseError(DimacsError):
    pass


class ClauseCountError(DimacsError):
    pass


def parse_dimacs(text) -> CnfFormula:
    if not isinstance(text, str):
        text = text.read()
    header = None
    clauses = []
    comments = []
    lineno = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            comments.append(line[1:].strip())
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            parts = line.split()
            if header is not None:
                raise HeaderError("duplicate header", lineno)
            if len(parts) != 4 or parts[1] != "cnf":
                raise HeaderError(f"malformed header {line!r}", lineno)
            try:
                nv, nc = int(parts[2]), int(parts[3])
            except ValueError:
                raise HeaderError(f"malformed header {line!r}", lineno) from None
            if nv < 0 or nc < 0:
                raise HeaderError(f"malformed header {line!r}", lineno)
            header = (nv, nc)
            continue
        if header is None:
            raise HeaderError("clause before header", lineno)
        try:
            toks = [int(t) for t in line.split()]
        except ValueError:
            raise DimacsError(f"non-integer token in {line!r}", lineno) from None
        if toks[-1] != 0:
            raise UnterminatedClauseError("clause missing terminating 0", lineno)
        cur = []
        for t in toks:
            if t == 0:
                clauses.append(Clause(cur))
                cur = []
            elif abs(t) > header[0]:
                raise LiteralRangeError(f"literal {t} out of range 1..{header[0]}", lineno)
            else:
                cur.append(t)
    if header is None:
        raise HeaderError("missing header", lineno)
    if len(clauses) != header[1]:
        raise ClauseCountError(f"clause-count mismatch (declared {header[1]}, found {len(clauses)})",
                               lineno)
    return CnfFormula(header[0], tuple(clauses), tuple(comments))


def emit_dimacs(f: CnfFormula) -> str:
    out = [f"p cnf {f.num_vars} {len(f.clauses)}"]
    for c in f.clauses:
        out.append(" ".join(map(str, c)) + " 0" if c else "0")
    return "\n".join(out) + "\n"


def read_dimacs(path) -> CnfFormula:
    with open(path) as fh:
        return parse_dimacs(fh.read())


def write_dimacs(f: CnfFormula, path) -> None:
    with open(path, "w") as fh:
        fh.write(emit_dimacs(f))


# -- restriction ----------------------------------------------------------

def restrict(f: CnfFormula, alpha) -> CnfFormula:
    lits = set(as_literals(alpha))
    for l in lits:
        if abs(l) > f.num_vars:
            raise ValueError(f"assignment mentions x{abs(l)} beyond num_vars")
        if -l in lits:
            raise ValueError(f"inconsistent assignment on x{abs(l)}")
    out, origin = [], []
    for i, c in enumerate(f.clauses, 1):
        if any(l in lits for l in c):
            continue
        out.append(Clause(l for l in c if -l not in lits))
        origin.append(i)
    return CnfFormula(f.num_vars, tuple(out), origin=tuple(origin), parent=f)


def resolve(a: Clause, b: Clause, pivot: int) -> Clause:
    pivot = abs(pivot)
    if pivot in a and -pivot in b:
        pos, negc = a, b
    elif -pivot in a and pivot in b:
        pos, negc = b, a
    else:
        raise ValueError(f"pivot x{pivot} does not clash between {a} and {b}")
    return Clause([l for l in pos if l != pivot] + [l for l in negc if l != -pivot])


# -- naive BCP --------------------------------------------------------------

class Propagator:
    """Naive BCP: every round rescans all clauses (vectorised with numpy).

    Values live in an int8 array indexed by variable: 1 true, -1 false,
    0 unassigned.  Clauses may be appended at any time.
    """

    def __init__(self, num_vars: int, clauses: Iterable = ()):
        self.num_vars = num_vars
        self.clauses: list[Clause] = []
        self._empty: list[int] = []
        # growable buffers; only the first _nl literals / _nr rows are live
        self._lbuf = np.zeros(64, dtype=np.int64)
        self._obuf = np.zeros(64, dtype=np.int64)
        self._vbuf = np.zeros(64, dtype=np.int64)
        self._gbuf = np.zeros(64, dtype=np.int8)
        self._sbuf = np.zeros(16, dtype=np.int64)
        self._rbuf = np.zeros(16, dtype=np.int64)
        self._nl = self._nr = 0
        for c in clauses:
            self.add(c)

    @staticmethod
    def _grow(buf, need):
        if need <= len(buf):
            return buf
        out = np.zeros(max(need, 2 * len(buf)), dtype=buf.dtype)
        out[:len(buf)] = buf
        return out

    def add(self, clause) -> int:
        c = clause if isinstance(clause, Clause) else Clause(clause)
        idx = len(self.clauses)
        self.clauses.append(c)
        if not c:
            self._empty.append(idx)
            return idx
        nl, nr = self._nl, self._nr
        self._lbuf = self._grow(self._lbuf, nl + len(c))
        self._obuf = self._grow(self._obuf, nl + len(c))
        self._vbuf = self._grow(self._vbuf, nl + len(c))
        self._gbuf = self._grow(self._gbuf, nl + len(c))
        self._sbuf = self._grow(self._sbuf, nr + 1)
        self._rbuf = self._grow(self._rbuf, nr + 1)
        self._lbuf[nl:nl + len(c)] = c
        self._obuf[nl:nl + len(c)] = nr
        self._vbuf[nl:nl + len(c)] = [abs(l) for l in c]
        self._gbuf[nl:nl + len(c)] = [1 if l > 0 else -1 for l in c]
        self._sbuf[nr] = nl
        self._rbuf[nr] = idx
        self._nl, self._nr = nl + len(c), nr + 1
        return idx

    def new_values(self) -> np.ndarray:
        return np.zeros(self.num_vars + 1, dtype=np.int8)

    def run(self, val: np.ndarray, on_assign=None):
        """Propagate to fixpoint.  Returns the index of a falsified clause or None.

        ``on_assign(lit, clause_index)`` is called for every implied literal in
        assignment order.
        """
        if self._empty:
            return self._empty[0]
        if self._nr == 0:
            return None
        lits = self._lbuf[:self._nl]
        var = self._vbuf[:self._nl]
        sgn = self._gbuf[:self._nl]
        starts = self._sbuf[:self._nr]
        rows = self._rbuf[:self._nr]
        rowof = self._obuf[:self._nl]
        while True:
            lv = val[var] * sgn
            sat = np.maximum.reduceat(lv, starts) > 0
            free = np.add.reduceat((lv == 0).astype(np.int32), starts)
            open_ = ~sat
            confl = np.flatnonzero(open_ & (free == 0))
            if len(confl):
                return int(rows[confl[0]])
            unit = open_ & (free == 1)
            if not unit.any():
                return None
            pos = np.flatnonzero((lv == 0) & unit[rowof])
            for p in pos:
                lit = int(lits[p])
                row = int(rowof[p])
                cur = val[abs(lit)]
                if cur == 0:
                    val[abs(lit)] = 1 if lit > 0 else -1
                    if on_assign is not None:
                        on_assign(lit, int(rows[row]))
                elif (cur > 0) != (lit > 0):
                    # an earlier unit in this same round falsified this clause
                    return int(rows[row])


@dataclass
class PropagationResult:
    assignment: dict
    status: str                      # "stable" | "conflict"
    conflict: int | None = None      # 1-based clause id
    implications: list = field(default_factory=list)  # (literal, antecedent id)


def unit_propagate(f: CnfFormula, alpha=None) -> PropagationResult:
    prop = Propagator(f.num_vars, f.clauses)
    val = prop.new_values()
    assignment = {}
    for l in as_literals(alpha):
        if val[abs(l)] != 0 and (val[abs(l)] > 0) != (l > 0):
            raise ValueError("inconsistent assignment")
        val[abs(l)] = 1 if l > 0 else -1
        assignment[abs(l)] = l > 0
    edges = []

    def note(lit, ci):
        assignment[abs(lit)] = lit > 0
        edges.append((lit, ci + 1))

    k = prop.run(val, note)
    if k is None:
        return PropagationResult(assignment, "stable", None, edges)
    return PropagationResult(assignment, "conflict", k + 1, edges)


def absorbs(f, c, prop: Propagator | None = None) -> bool:
    """True iff falsifying all but one literal of c lets BCP force the last one
    (or conflict), for every choice of that literal."""
    c = Clause(c)
    if not c:
        raise ValueError("absorbs needs a nonempty clause")
    if c.tautological:
        raise ValueError("absorbs needs a non-tautological clause")
    if prop is None:
        prop = Propagator(f.num_vars, f.clauses)
    nv = prop.num_vars
    for l in c:
        val = np.zeros(nv + 1, dtype=np.int8)
        for o in c:
            if o != l:
                val[abs(o)] = -1 if o > 0 else 1
        if prop.run(val) is not None:
            continue
        if val[abs(l)] != (1 if l > 0 else -1):
            return False
    return True


def compact(f: CnfFormula) -> tuple[CnfFormula, dict[int, int]]:
    """Renumber the occurring variables densely; returns (formula, new->old)."""
    used = sorted(f.variables())
    fwd = {v: i for i, v in enumerate(used, 1)}
    cl = [Clause((fwd[abs(l)] if l > 0 else -fwd[abs(l)]) for l in c) for c in f.clauses]
    return CnfFormula(len(used), tuple(cl)), {i: v for v, i in fwd.items()}
