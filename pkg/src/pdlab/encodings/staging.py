"""Descriptors for netlists built as a sequence of chunks.

Two copies of a circuit (sides "L" and "R") are built chunk by chunk with
identical code, so the k-th wire each side creates inside a chunk forms a
pair.  After each chunk the interpolant carries the equality x_L <-> x_R
(two binary clauses) for every paired wire that is still used later, plus any
extra facts the caller supplies.  A new equality is supported by the previous
interpolant's facts over the chunk-local fan-in boundary of both wires.
"""
from __future__ import annotations

from ..cnf import Clause
from ..proofdoor import ProofdoorDescriptor
from ..structure import build_graph, decomposition_from_layout, heuristic_path_decomposition, layout_width
from .netlist import Encoding, Netlist


def eq_clauses(a: int, b: int) -> list[Clause]:
    return [Clause((-a, b)), Clause((a, -b))]


def chunk_ids(enc: Encoding, labels) -> list[list[int]]:
    where = {lab: i for i, lab in enumerate(labels)}
    chunks = [[] for _ in labels]
    for cid, lab in enumerate(enc.clause_chunk, 1):
        chunks[where[lab]].append(cid)
    return chunks


def local_boundary(nl: Netlist, wire: int, chunk) -> set[int]:
    """Wires feeding ``wire`` from outside ``chunk`` (through gates of the chunk)."""
    out, seen, todo = set(), set(), [wire]
    while todo:
        w = todo.pop()
        if w in seen:
            continue
        seen.add(w)
        gi = nl.driver.get(w)
        if gi is None or nl.gates[gi].chunk != chunk:
            out.add(w)
            continue
        todo.extend(abs(l) for l in nl.gates[gi].inputs)
    out.discard(wire)
    return out


def clause_layout(f, ids, key, graph: str, lazy_wide: bool = False) -> list[int]:
    """Vertex layout visiting clauses sorted by ``key``: each clause's
    unplaced variables, then (bipartite) the clause vertex itself.  Variables
    of wide clauses are left for the narrow clauses that mention them when
    ``lazy_wide`` is set."""
    seen, out = set(), []
    for cid in sorted(ids, key=lambda i: (key(i), i)):
        c = f.clause(cid)
        if not lazy_wide or len(c) <= 3 or graph == "primal":
            for v in sorted(c.variables(), reverse=True):   # outputs before their inputs
                if v not in seen:
                    seen.add(v)
                    out.append(v)
        if graph == "bipartite":
            out.append(f.num_vars + cid)
    return out


def layout_key(nl: Netlist, enc: Encoding):
    """Clause sort key for chunk layouts: the position of the defining gate.
    Gates whose stage ends in ".agg" are wide aggregates: their binary
    clauses follow the operand they mention and the wide clause goes first."""
    f = enc.formula

    def key(cid):
        gi = enc.clause_gate[cid - 1]
        if gi >= 0 and nl.gates[gi].stage.endswith(".agg"):
            out = enc.clause_output[cid - 1]
            c = f.clause(cid)
            if len(c) == 2:
                other = next(abs(l) for l in c if abs(l) != out)
                return nl.wire_pos.get(other, 0) + 0.5
            return float("-inf")
        return enc.clause_pos[cid - 1]
    return key


def chunk_decompositions(nl: Netlist, enc: Encoding, chunks, graph: str, structural: bool = False):
    """One decomposition per chunk.  With ``structural`` set, only layouts
    that follow the circuit's bit positions are considered, so the shipped
    widths reflect the construction rather than the heuristics' luck."""
    f = enc.formula
    key = layout_key(nl, enc)
    decs = []
    for ids in chunks:
        g = build_graph(f, graph, ids)
        hints = [clause_layout(f, ids, key, graph, lazy) for lazy in (False, True)]
        if structural:
            adj = g.adjacency()
            best = min(([v for v in h if v in adj] + sorted(set(adj) - set(h)) for h in hints),
                       key=lambda o: layout_width(adj, o))
            decs.append(decomposition_from_layout(adj, best))
        else:
            decs.append(heuristic_path_decomposition(g, hints))
    return decs


def staged_descriptor(nl: Netlist, enc: Encoding, labels, extra=None, unpaired=(),
                      structural: bool = True) -> ProofdoorDescriptor:
    """``extra`` maps a chunk label to [(clause, boundary vars or None)]; a
    boundary of None means an empty support."""
    extra = extra or {}
    unpaired = set(unpaired)
    f = enc.formula
    chunks = chunk_ids(enc, labels)
    k = len(labels)
    cvars = [set().union(*(f.clause(i).variables() for i in ch)) for ch in chunks]
    later = [set() for _ in range(k)]
    acc = set()
    for j in range(k - 1, -1, -1):
        later[j] = set(acc)
        acc |= cvars[j]
    interpolants, supports = [], []
    prev: list[Clause] = []
    for j in range(k - 1):
        lab = labels[j]
        cur, sup = [], []
        for i, c in enumerate(prev):
            if c.variables() <= later[j] and c not in cur:
                cur.append(c)
                sup.append([i])

        def add(c, boundary):
            if c in cur or not c.variables() <= later[j]:
                return
            cur.append(c)
            if boundary is None or j == 0:
                sup.append([])
            else:
                sup.append([i for i, p in enumerate(prev) if p.variables() <= boundary])

        ls = nl.side_wires.get((lab, "L"), [])
        rs = nl.side_wires.get((lab, "R"), [])
        if len(ls) != len(rs):
            raise ValueError(f"sides differ in chunk {lab}: {len(ls)} vs {len(rs)} wires")
        for a, b in zip(ls, rs):
            if a in unpaired or b in unpaired:
                continue
            bd = local_boundary(nl, a, lab) | local_boundary(nl, b, lab)
            for c in eq_clauses(a, b):
                add(c, bd)
        for c, bd in extra.get(lab, ()):
            add(Clause(c), None if bd is None else set(bd))
        interpolants.append(cur)
        if j > 0:
            supports.append(sup)
        prev = cur
    d = ProofdoorDescriptor(chunks, interpolants, supports, labels=list(map(str, labels)))
    d.decompositions = chunk_decompositions(nl, enc, chunks, "primal", structural)
    d.decompositions_bipartite = chunk_decompositions(nl, enc, chunks, "bipartite", structural)
    sup_sizes = [len(s) for sj in supports for s in sj]
    d.params = {
        "c": max((len(i) for i in interpolants), default=0),
        "s": max(sup_sizes + [len(interpolants[-1]) if interpolants else 0]),
        "w": max(dd.width for dd in d.decompositions + d.decompositions_bipartite),
    }
    return d
