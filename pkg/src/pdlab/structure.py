"""Incidence graphs, path decompositions and the variable orders derived from them."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .cnf import CnfFormula


class Graph:
    kind = "graph"

    def __init__(self, vertices: Iterable[int] = (), edges: Iterable[tuple[int, int]] = ()):
        self.vertices = frozenset(vertices)
        es = set()
        for u, v in edges:
            if u == v:
                continue
            es.add((u, v) if u < v else (v, u))
        self.edges = frozenset(es)
        self.vertices = self.vertices | {u for e in self.edges for u in e}

    def adjacency(self) -> dict[int, set[int]]:
        adj = {v: set() for v in self.vertices}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def __repr__(self):
        return f"{type(self).__name__}({len(self.vertices)} vertices, {len(self.edges)} edges)"


class PrimalGraph(Graph):
    kind = "primal"


class BipartiteIncidenceGraph(Graph):
    """Variables keep their ids; clause C_i is the vertex num_vars + i."""
    kind = "bipartite"

    def __init__(self, num_vars, vertices=(), edges=()):
        super().__init__(vertices, edges)
        self.num_vars = num_vars

    def clause_vertex(self, cid: int) -> int:
        return self.num_vars + cid

    def is_clause_vertex(self, v: int) -> bool:
        return v > self.num_vars


def _ids(f, ids):
    return range(1, len(f.clauses) + 1) if ids is None else ids


def build_primal_graph(f: CnfFormula, ids: Iterable[int] | None = None) -> PrimalGraph:
    vs, es = set(), set()
    for i in _ids(f, ids):
        c = sorted({abs(l) for l in f.clause(i)})
        vs.update(c)
        for a in range(len(c)):
            for b in range(a + 1, len(c)):
                es.add((c[a], c[b]))
    return PrimalGraph(vs, es)


def build_bipartite_incidence(f: CnfFormula, ids: Iterable[int] | None = None) -> BipartiteIncidenceGraph:
    vs, es = set(), set()
    for i in _ids(f, ids):
        cv = f.num_vars + i
        vs.add(cv)
        for l in f.clause(i):
            vs.add(abs(l))
            es.add((abs(l), cv))
    return BipartiteIncidenceGraph(f.num_vars, vs, es)


def build_graph(f: CnfFormula, kind: str = "primal", ids=None) -> Graph:
    if kind == "primal":
        return build_primal_graph(f, ids)
    if kind == "bipartite":
        return build_bipartite_incidence(f, ids)
    raise ValueError(f"unknown graph kind {kind!r}")


@dataclass(frozen=True)
class PathDecomposition:
    bags: tuple

    def __init__(self, bags):
        object.__setattr__(self, "bags", tuple(frozenset(b) for b in bags))

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def vertices(self) -> set[int]:
        return set().union(*self.bags) if self.bags else set()


@dataclass
class DecompositionCheck:
    ok: bool
    width: int | None = None
    condition: str | None = None      # "vertex" | "edge" | "contiguity"
    witness: object = None

    def __bool__(self):
        return self.ok


def verify_path_decomposition(g: Graph, d: PathDecomposition) -> DecompositionCheck:
    seen = d.vertices()
    for v in sorted(g.vertices):
        if v not in seen:
            return DecompositionCheck(False, condition="vertex", witness=v)
    for u, v in sorted(g.edges):
        if not any(u in b and v in b for b in d.bags):
            return DecompositionCheck(False, condition="edge", witness=(u, v))
    first, last, count = {}, {}, {}
    for i, b in enumerate(d.bags):
        for v in b:
            first.setdefault(v, i)
            last[v] = i
            count[v] = count.get(v, 0) + 1
    for v in sorted(first):
        if last[v] - first[v] + 1 != count[v]:
            return DecompositionCheck(False, condition="contiguity", witness=v)
    return DecompositionCheck(True, width=max(d.width, 0) if d.bags else -1)


def order_from_decomposition(d: PathDecomposition, keep=None) -> tuple[int, ...]:
    """Vertices by ascending r(v) = last bag index containing v, ties by id.

    ``keep`` optionally filters vertices (e.g. drop clause vertices)."""
    r = {}
    for i, b in enumerate(d.bags):
        for v in b:
            r[v] = i
    vs = [v for v in r if keep is None or keep(v)]
    return tuple(sorted(vs, key=lambda v: (r[v], v)))


# -- heuristic decompositions --------------------------------------------------

def _min_degree_layout(adj):
    g = {v: set(ns) for v, ns in adj.items()}
    order = []
    while g:
        v = min(g, key=lambda u: (len(g[u]), u))
        ns = g.pop(v)
        for a in ns:
            g[a].discard(v)
            g[a] |= ns - {a}
        order.append(v)
    return order


def _frontier_layout(adj):
    """Greedily add the vertex that keeps the prefix boundary smallest."""
    placed = set()
    remaining_deg = {v: len(ns) for v, ns in adj.items()}  # neighbours not yet placed
    boundary = set()
    order = []
    candidates = set()
    while len(order) < len(adj):
        pool = candidates - placed if candidates - placed else set(adj) - placed
        best = None
        for v in pool:
            # boundary after placing v
            closes = sum(1 for u in adj[v] if u in boundary and remaining_deg[u] == 1)
            opens = 1 if remaining_deg[v] > 0 else 0
            key = (len(boundary) - closes + opens, -closes, remaining_deg[v], v)
            if best is None or key < best[0]:
                best = (key, v)
        v = best[1]
        placed.add(v)
        order.append(v)
        for u in adj[v]:
            remaining_deg[u] -= 1
            if u in boundary and remaining_deg[u] == 0:
                boundary.discard(u)
            if u not in placed:
                candidates.add(u)
        if remaining_deg[v] > 0:
            boundary.add(v)
        candidates.discard(v)
    return order


def layout_width(adj, order) -> int:
    pos = {v: i for i, v in enumerate(order)}
    last = {v: max([pos[v]] + [pos[u] for u in adj[v]]) for v in order}
    events = [0] * (len(order) + 1)
    for v in order:
        events[pos[v]] += 1
        events[last[v] + 1] -= 1
    cur = best = 0
    for i in range(len(order)):
        cur += events[i]
        best = max(best, cur)
    return best - 1


def decomposition_from_layout(adj, order) -> PathDecomposition:
    pos = {v: i for i, v in enumerate(order)}
    last = {v: max([pos[v]] + [pos[u] for u in adj[v]]) for v in order}
    bags = [set() for _ in order]
    for v in order:
        for i in range(pos[v], last[v] + 1):
            bags[i].add(v)
    return PathDecomposition(bags)


def heuristic_path_decomposition(g: Graph, hints: Iterable[list[int]] = ()) -> PathDecomposition:
    """Best of the min-degree elimination layout, a greedy frontier layout and
    any caller-supplied layouts.  Deterministic for a fixed input."""
    adj = g.adjacency()
    if not adj:
        return PathDecomposition([])
    layouts = [_min_degree_layout(adj), _frontier_layout(adj)]
    for h in hints:
        h = [v for v in h if v in adj]
        missing = sorted(set(adj) - set(h))
        layouts.append(h + missing)
    best = min(layouts, key=lambda o: layout_width(adj, o))
    return decomposition_from_layout(adj, best)


# -- partial orders ------------------------------------------------------------

@dataclass(frozen=True)
class PartialOrder:
    """Two-layer order before < after."""
    before: frozenset
    after: frozenset

    def __init__(self, before=(), after=()):
        b, a = frozenset(before), frozenset(after)
        if b & a:
            raise ValueError(f"before and after overlap on {sorted(b & a)}")
        object.__setattr__(self, "before", b)
        object.__setattr__(self, "after", a)


# -- file formats -------------------------------------------------------------

def emit_decomposition(d: PathDecomposition) -> str:
    out = [f"p pd {len(d.vertices())} {len(d.bags)}"]
    for b in d.bags:
        out.append(" ".join(map(str, sorted(b))) + (" 0" if b else "0"))
    return "\n".join(out) + "\n"


def parse_decomposition(text: str) -> PathDecomposition:
    lines = [l.strip() for l in text.splitlines() if l.strip() and not l.startswith("c")]
    if not lines or not lines[0].startswith("p pd"):
        raise ValueError("missing 'p pd' header")
    parts = lines[0].split()
    if len(parts) != 4:
        raise ValueError("malformed 'p pd' header")
    nv, nb = int(parts[2]), int(parts[3])
    bags = []
    for l in lines[1:]:
        toks = [int(t) for t in l.split()]
        if not toks or toks[-1] != 0:
            raise ValueError(f"bag line not terminated by 0: {l!r}")
        bags.append(toks[:-1])
    if len(bags) != nb:
        raise ValueError(f"bag-count mismatch (declared {nb}, found {len(bags)})")
    d = PathDecomposition(bags)
    if len(d.vertices()) != nv:
        raise ValueError(f"vertex-count mismatch (declared {nv}, found {len(d.vertices())})")
    return d


def emit_order(order) -> str:
    return " ".join(map(str, order)) + "\n"


def parse_order(text: str) -> tuple[int, ...]:
    ids = [int(t) for t in text.split()]
    if len(set(ids)) != len(ids):
        raise ValueError("order repeats a variable")
    if any(i < 1 for i in ids):
        raise ValueError("order contains a non-positive id")
    return tuple(ids)


def emit_partial_order(po: PartialOrder) -> str:
    return ("x " + " ".join(map(str, sorted(po.before))) + " 0\n"
            "y " + " ".join(map(str, sorted(po.after))) + " 0\n").replace("  ", " ")


def parse_partial_order(text: str) -> PartialOrder:
    before, after = None, None
    for l in text.splitlines():
        toks = l.split()
        if not toks or toks[0] == "c":
            continue
        if toks[0] not in ("x", "y") or toks[-1] != "0":
            raise ValueError(f"bad partial-order line {l!r}")
        ids = [int(t) for t in toks[1:-1]]
        if toks[0] == "x":
            before = ids
        else:
            after = ids
    if before is None or after is None:
        raise ValueError("partial order needs both an 'x' and a 'y' line")
    return PartialOrder(before, after)


def complete_order(order, variables) -> tuple[int, ...]:
    """order restricted to ``variables``, followed by missing ones by id."""
    vs = set(variables)
    head = [v for v in order if v in vs]
    return tuple(head + sorted(vs - set(head)))
