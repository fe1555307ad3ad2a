"""Tree-like arithmetic circuits and their miters.

+ nodes are ripple-carry adders, x nodes shift-and-add array multipliers.
Widths grow bottom-up (+ adds one bit, x adds the widths) so nothing
overflows.  Every wire records the output column it belongs to.
"""
from __future__ import annotations

import ast
from dataclasses import dataclass, field

from ..cnf import CnfFormula
from ..resolution import VarPartition
from .netlist import Encoding, Netlist, encode_circuit


@dataclass(frozen=True)
class TreeExpr:
    op: str                      # "+", "*" or "leaf"
    left: "TreeExpr | None" = None
    right: "TreeExpr | None" = None
    name: str | None = None

    @classmethod
    def leaf(cls, name: str) -> "TreeExpr":
        return cls("leaf", name=name)

    @property
    def is_leaf(self) -> bool:
        return self.op == "leaf"

    def leaves(self) -> list[str]:
        if self.is_leaf:
            return [self.name]
        return self.left.leaves() + self.right.leaves()

    def width(self, n: int) -> int:
        if self.is_leaf:
            return n
        a, b = self.left.width(n), self.right.width(n)
        return max(a, b) + 1 if self.op == "+" else a + b

    def evaluate(self, env: dict[str, int]) -> int:
        if self.is_leaf:
            return env[self.name]
        a, b = self.left.evaluate(env), self.right.evaluate(env)
        return a + b if self.op == "+" else a * b

    def __str__(self):
        if self.is_leaf:
            return self.name
        return f"({self.left} {self.op} {self.right})"


def parse_expr(text: str) -> TreeExpr:
    """Parse e.g. ``x*(w+y+z)``; ``a+b+c`` associates to the left."""
    try:
        node = ast.parse(text.strip(), mode="eval").body
    except SyntaxError as e:
        raise ValueError(f"cannot parse expression {text!r}: {e.msg}") from None

    def conv(nd):
        if isinstance(nd, ast.Name):
            return TreeExpr.leaf(nd.id)
        if isinstance(nd, ast.BinOp) and isinstance(nd.op, (ast.Add, ast.Mult)):
            return TreeExpr("+" if isinstance(nd.op, ast.Add) else "*", conv(nd.left), conv(nd.right))
        raise ValueError(f"unsupported syntax in {text!r}: only names, + and * are allowed")
    return conv(node)


@dataclass
class NodeInfo:
    node_id: str
    op: str
    left: list
    right: list
    out: list
    internal: set = field(default_factory=set)     # wires created inside the subtree
    leaves: set = field(default_factory=set)       # leaf input wires used by the subtree


@dataclass
class TreeMiter:
    formula: CnfFormula
    netlist: Netlist
    encoding: Encoding
    nodes: dict            # node id -> NodeInfo; ids are "1", "1l", "1lr", ... and "2", ...
    outputs: tuple         # output wires of t1 and t2
    errors: list           # error wire per compared bit (None where a side has no bit)
    t1: TreeExpr
    t2: TreeExpr
    n: int


def _set_col(nl, w, col):
    nl.wire_pos[w] = col
    return w


def _add_vectors(nl: Netlist, a: list, b: list, base: int = 0) -> list:
    """a + b, LSB first; result has max(len)+1 bits.  ``base`` is the column
    of bit 0."""
    out, carry = [], None
    for i in range(max(len(a), len(b))):
        nl.pos = base + i
        xs = [w for w in (a[i] if i < len(a) else None, b[i] if i < len(b) else None, carry) if w is not None]
        if len(xs) == 3:
            s, carry = nl.FA(*xs)
        elif len(xs) == 2:
            s, carry = nl.HA(*xs)
        else:
            s, carry = nl.BUF(xs[0]), None
        out.append(s)
        if carry is not None:
            _set_col(nl, carry, base + i + 1)
    nl.pos = base + len(out)
    out.append(carry if carry is not None else nl.CONST(0))
    return out


def _multiply(nl: Netlist, a: list, b: list) -> list:
    """Shift-and-add: row i is a AND b_i, added in at column i."""
    width = len(a) + len(b)
    rows = []
    for i, bi in enumerate(b):
        row = []
        for j, aj in enumerate(a):
            nl.pos = i + j
            row.append(nl.AND(aj, bi))
        rows.append(row)
    acc = list(rows[0])
    for i in range(1, len(rows)):
        low, high = acc[:i], acc[i:]
        acc = low + _add_vectors(nl, high, rows[i], base=i)
    while len(acc) < width:
        nl.pos = len(acc)
        acc.append(nl.CONST(0))
    return acc[:width]


def _build_side(nl, t: TreeExpr, leaves: dict, nodes: dict, node_id: str):
    if t.is_leaf:
        return leaves[t.name], set(), set(leaves[t.name])
    left, li, ll = _build_side(nl, t.left, leaves, nodes, node_id + "l")
    right, ri, rl = _build_side(nl, t.right, leaves, nodes, node_id + "r")
    first = nl.num_wires + 1
    nl.stage = f"{node_id}{t.op}"
    out = _add_vectors(nl, left, right) if t.op == "+" else _multiply(nl, left, right)
    mine = set(range(first, nl.num_wires + 1))
    nl.name(f"node{node_id}", out)
    info = NodeInfo(node_id, t.op, list(left), list(right), list(out), li | ri | mine, ll | rl)
    nodes[node_id] = info
    return out, info.internal, info.leaves


def build_tree_miter(t1, t2, n: int) -> TreeMiter:
    t1 = parse_expr(t1) if isinstance(t1, str) else t1
    t2 = parse_expr(t2) if isinstance(t2, str) else t2
    if n < 1:
        raise ValueError("need n >= 1")
    if t1.is_leaf and t2.is_leaf:
        raise ValueError("at least one side needs an operator")
    nl = Netlist()
    names = list(dict.fromkeys(t1.leaves() + t2.leaves()))
    leaves = {}
    for name in names:
        leaves[name] = nl.input_vector(name, n)
    nodes: dict = {}
    nl.side = None
    nl.chunk = "T1"
    o1, _, _ = _build_side(nl, t1, leaves, nodes, "1")
    nl.chunk = "T2"
    o2, _, _ = _build_side(nl, t2, leaves, nodes, "2")
    nl.chunk = "E"
    nl.stage = "miter.err"
    errs, lits = [], []
    for i in range(max(len(o1), len(o2))):
        nl.pos = i
        a = o1[i] if i < len(o1) else None
        b = o2[i] if i < len(o2) else None
        if a is not None and b is not None:
            e = nl.XOR(a, b)
            nl.name("e", e)
            errs.append(e)
            lits.append(e)
        else:
            errs.append(None)
            lits.append(a if a is not None else b)
    nl.pos = 0
    nl.stage = "miter.disagree"
    nl.assert_clause(lits)
    enc = encode_circuit(nl)
    return TreeMiter(enc.formula, nl, enc, nodes, (o1, o2), errs, t1, t2, n)


def partition_at_node(miter: TreeMiter, node_id: str) -> VarPartition:
    if node_id not in miter.nodes:
        raise KeyError(f"no internal node {node_id!r}; nodes are {sorted(miter.nodes)}")
    info = miter.nodes[node_id]
    shared = set(info.out) | info.leaves
    after = info.internal - shared
    before = set(range(1, miter.formula.num_vars + 1)) - after - shared
    vp = VarPartition(before, after, shared)
    bad = vp.check_split(miter.formula)
    if bad is not None:
        raise RuntimeError(f"clause {bad} spans before and after at node {node_id}")
    return vp
