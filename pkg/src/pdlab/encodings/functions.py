"""Split encodings F+(T+, X) and F-(T-, X) of a Boolean function f: F+ says
f(X) = 1, F- says f(X) = 0, each through its own Tseitin auxiliaries."""
from __future__ import annotations

from dataclasses import dataclass

from ..cnf import Clause, CnfFormula
from ..oracles import TruthTable, eq_table, parity_table
from ..resolution import VarPartition
from .netlist import Netlist, encode_circuit


@dataclass
class FunctionEncoding:
    formula: CnfFormula
    partition: VarPartition      # before = T+, after = T-, shared = X
    inputs: list                 # X, in truth-table bit order
    plus_ids: list               # clause ids of F+
    minus_ids: list
    table: TruthTable


def _parity(nl, xs):
    acc = xs[0]
    for x in xs[1:]:
        acc = nl.XOR(acc, x)
    return acc


def _eq(nl, xs):
    n = len(xs) // 2
    eqs = [nl.EQ(xs[i], xs[n + i]) for i in range(n)]
    acc = eqs[0]
    for e in eqs[1:]:
        acc = nl.AND(acc, e)
    return acc


FUNCTIONS = {
    "parity": (lambda n: n, _parity, parity_table),
    "eq": (lambda n: 2 * n, _eq, eq_table),       # inputs x_0..x_{n-1}, z_0..z_{n-1}
}


def build_function_encoding(name: str, n: int) -> FunctionEncoding:
    if name not in FUNCTIONS:
        raise ValueError(f"unknown function {name!r}; choose from {sorted(FUNCTIONS)}")
    if n < 1:
        raise ValueError("need n >= 1")
    arity, circuit, table = FUNCTIONS[name]
    nl = Netlist()
    xs = nl.input_vector("X", arity(n))
    first = nl.num_wires + 1
    nl.chunk = "+"
    out_p = circuit(nl, xs)
    nl.assert_clause([out_p])
    plus = set(range(first, nl.num_wires + 1))
    first = nl.num_wires + 1
    nl.chunk = "-"
    out_m = circuit(nl, xs)
    nl.assert_clause([-out_m])
    minus = set(range(first, nl.num_wires + 1))
    enc = encode_circuit(nl)
    f = enc.formula
    plus_ids = [i for i, c in enumerate(enc.clause_chunk, 1) if c == "+"]
    minus_ids = [i for i, c in enumerate(enc.clause_chunk, 1) if c == "-"]
    return FunctionEncoding(f, VarPartition(plus, minus, xs), xs, plus_ids, minus_ids, table(n))


def side_formula(fe: FunctionEncoding, side: str) -> CnfFormula:
    ids = fe.plus_ids if side == "+" else fe.minus_ids
    return CnfFormula(fe.formula.num_vars, tuple(Clause(fe.formula.clause(i)) for i in ids))
