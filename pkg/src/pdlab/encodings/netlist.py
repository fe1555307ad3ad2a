"""Gate-level netlists and their Tseitin encoding.

Wires are positive ints and double as CNF variables.  Gate inputs are wire
literals, so ``-w`` feeds the complement of wire ``w`` without a NOT gate.
Two-output gates (HALF_ADDER, FULL_ADDER) return ``(sum, carry)`` and their
clauses are split per output.
"""
from __future__ import annotations

from collections import Counter, OrderedDict
from dataclasses import dataclass

from ..cnf import Clause, CnfFormula

KINDS = {"AND", "OR", "XOR", "NOT", "BUF", "MUX", "EQ", "CONST", "HALF_ADDER", "FULL_ADDER"}


@dataclass
class Gate:
    kind: str
    inputs: tuple
    outputs: tuple
    stage: str
    chunk: object = None
    value: int | None = None      # CONST only
    pos: int = 0                  # bit position, used for layouts and strip windows


@dataclass
class Assertion:
    lits: tuple
    stage: str
    chunk: object = None
    pos: int = 0


class Netlist:
    def __init__(self):
        self.num_wires = 0
        self.gates: list[Gate] = []
        self.asserts: list[Assertion] = []
        self.groups: "OrderedDict[str, list[int]]" = OrderedDict()
        self.inputs: list[int] = []
        self.driver: dict[int, int] = {}       # wire -> gate index
        self.stage = "misc"
        self.chunk = None
        self.pos = 0
        self.side = None
        self.wire_pos: dict[int, int] = {}
        self.side_wires: dict = {}             # (chunk, side) -> wires, in creation order

    # -- construction ------------------------------------------------------------
    def _wire(self) -> int:
        self.num_wires += 1
        self.wire_pos[self.num_wires] = self.pos
        if self.side is not None:
            self.side_wires.setdefault((self.chunk, self.side), []).append(self.num_wires)
        return self.num_wires

    def input(self, name: str | None = None) -> int:
        w = self._wire()
        self.inputs.append(w)
        if name:
            self.groups.setdefault(name, []).append(w)
        return w

    def input_vector(self, name: str, width: int) -> list[int]:
        out = []
        for i in range(width):
            self.pos = i
            out.append(self.input(name))
        return out

    def name(self, group: str, wires):
        """Record ``wires`` (a wire or a list, LSB first) under ``group``."""
        if isinstance(wires, int):
            wires = [wires]
        self.groups.setdefault(group, []).extend(wires)
        return wires

    def _check(self, lits):
        for l in lits:
            w = abs(l)
            if not 1 <= w <= self.num_wires:
                raise ValueError(f"wire {w} used before definition")

    def gate(self, kind: str, *inputs, value=None):
        if kind not in KINDS:
            raise ValueError(f"unknown gate kind {kind}")
        self._check(inputs)
        nout = 2 if kind in ("HALF_ADDER", "FULL_ADDER") else 1
        outs = tuple(self._wire() for _ in range(nout))
        g = Gate(kind, tuple(inputs), outs, self.stage, self.chunk, value, self.pos)
        for o in outs:
            self.driver[o] = len(self.gates)
        self.gates.append(g)
        return outs if nout == 2 else outs[0]

    def AND(self, *xs):
        return self.gate("AND", *xs)

    def OR(self, *xs):
        return self.gate("OR", *xs)

    def XOR(self, a, b):
        return self.gate("XOR", a, b)

    def EQ(self, a, b):
        return self.gate("EQ", a, b)

    def NOT(self, a):
        return self.gate("NOT", a)

    def BUF(self, a):
        return self.gate("BUF", a)

    def MUX(self, s, a, b):
        """s ? a : b"""
        return self.gate("MUX", s, a, b)

    def CONST(self, v: int):
        return self.gate("CONST", value=int(bool(v)))

    def HA(self, a, b):
        return self.gate("HALF_ADDER", a, b)

    def FA(self, a, b, c):
        return self.gate("FULL_ADDER", a, b, c)

    def assert_clause(self, lits):
        self._check(lits)
        self.asserts.append(Assertion(tuple(lits), self.stage, self.chunk, self.pos))

    # -- evaluation -------------------------------------------------------------
    def simulate(self, values: dict[int, int]) -> dict[int, int]:
        val = dict(values)
        missing = [w for w in self.inputs if w not in val]
        if missing:
            raise ValueError(f"missing input values for wires {missing[:5]}")

        def lv(l):
            return val[l] if l > 0 else 1 - val[-l]

        for g in self.gates:
            x = [lv(l) for l in g.inputs]
            k = g.kind
            if k == "AND":
                r = int(all(x))
            elif k == "OR":
                r = int(any(x))
            elif k == "XOR":
                r = x[0] ^ x[1]
            elif k == "EQ":
                r = int(x[0] == x[1])
            elif k == "NOT":
                r = 1 - x[0]
            elif k == "BUF":
                r = x[0]
            elif k == "MUX":
                r = x[1] if x[0] else x[2]
            elif k == "CONST":
                r = g.value
            elif k == "HALF_ADDER":
                val[g.outputs[0]] = x[0] ^ x[1]
                val[g.outputs[1]] = x[0] & x[1]
                continue
            else:  # FULL_ADDER
                t = x[0] + x[1] + x[2]
                val[g.outputs[0]] = t & 1
                val[g.outputs[1]] = t >> 1
                continue
            val[g.outputs[0]] = r
        return val

    def read(self, val, group) -> int:
        return sum(val[w] << i for i, w in enumerate(self.groups[group]))

    # -- accounting ---------------------------------------------------------------
    def stage_counts(self) -> dict[str, tuple[int, int]]:
        """stage -> (variables introduced, clauses emitted)."""
        nv, nc = Counter(), Counter()
        for g in self.gates:
            nv[g.stage] += len(g.outputs)
            nc[g.stage] += sum(len(c) for _, c in gate_clauses(g))
        for a in self.asserts:
            nc[a.stage] += 1
        return {s: (nv[s], nc[s]) for s in sorted(set(nv) | set(nc))}


def gate_clauses(g: Gate):
    """[(output wire, [clauses])] with the standard Tseitin clauses."""
    k, x = g.kind, g.inputs
    o = g.outputs[0]
    if k == "AND":
        return [(o, [(-o, a) for a in x] + [(o,) + tuple(-a for a in x)])]
    if k == "OR":
        return [(o, [(o, -a) for a in x] + [(-o,) + tuple(x)])]
    if k == "XOR":
        a, b = x
        return [(o, _xor(o, a, b))]
    if k == "EQ":
        a, b = x
        return [(o, _xor(o, a, -b))]
    if k == "NOT":
        return [(o, [(o, x[0]), (-o, -x[0])])]
    if k == "BUF":
        return [(o, [(o, -x[0]), (-o, x[0])])]
    if k == "MUX":
        s, a, b = x
        return [(o, [(-s, -a, o), (-s, a, -o), (s, -b, o), (s, b, -o)])]
    if k == "CONST":
        return [(o, [(o,) if g.value else (-o,)])]
    if k == "HALF_ADDER":
        a, b = x
        s, c = g.outputs
        return [(s, _xor(s, a, b)), (c, [(-c, a), (-c, b), (c, -a, -b)])]
    if k == "FULL_ADDER":
        a, b, ci = x
        s, c = g.outputs
        sum_cl = []
        for va in (0, 1):
            for vb in (0, 1):
                for vc in (0, 1):
                    out = va ^ vb ^ vc
                    sum_cl.append(tuple([a if not va else -a, b if not vb else -b,
                                         ci if not vc else -ci, s if out else -s]))
        carry = [(-c, a, b), (-c, a, ci), (-c, b, ci), (c, -a, -b), (c, -a, -ci), (c, -b, -ci)]
        return [(s, sum_cl), (c, carry)]
    raise ValueError(k)


def _xor(o, a, b):
    # o <-> a xor b
    return [(-o, a, b), (-o, -a, -b), (o, -a, b), (o, a, -b)]


@dataclass
class Encoding:
    formula: CnfFormula
    wire_var: dict            # identity map, kept explicit for the interface
    clause_gate: list         # per clause: gate index, or -1 - assertion index
    clause_output: list       # per clause: output wire it defines (None for assertions)
    clause_chunk: list
    clause_stage: list
    clause_pos: list


def encode_circuit(nl: Netlist) -> Encoding:
    clauses, cg, co, cc, cs, cp = [], [], [], [], [], []
    for gi, g in enumerate(nl.gates):
        for out, cl in gate_clauses(g):
            for c in cl:
                clauses.append(Clause(c))
                cg.append(gi)
                co.append(out)
                cc.append(g.chunk)
                cs.append(g.stage)
                cp.append(nl.wire_pos.get(out, g.pos))
    for ai, a in enumerate(nl.asserts):
        clauses.append(Clause(a.lits))
        cg.append(-1 - ai)
        co.append(None)
        cc.append(a.chunk)
        cs.append(a.stage)
        cp.append(a.pos)
    f = CnfFormula(nl.num_wires, tuple(clauses))
    return Encoding(f, {w: w for w in range(1, nl.num_wires + 1)}, cg, co, cc, cs, cp)


def emit_wire_map(nl: Netlist) -> str:
    out = []
    for name, ws in nl.groups.items():
        for i, w in enumerate(ws):
            out.append(f"{name}[{i}] = {w}")
    return "\n".join(out) + "\n"


def parse_wire_map(text: str) -> dict[str, list[int]]:
    groups: dict[str, dict[int, int]] = {}
    for l in text.splitlines():
        if not l.strip():
            continue
        lhs, rhs = l.split("=")
        name, bit = lhs.strip()[:-1].split("[")
        groups.setdefault(name, {})[int(bit)] = int(rhs)
    return {k: [v[i] for i in sorted(v)] for k, v in groups.items()}


def bits(x: int, width: int) -> list[int]:
    return [(x >> i) & 1 for i in range(width)]
