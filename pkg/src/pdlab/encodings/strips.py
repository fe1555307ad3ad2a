"""Column-window ("critical strip") descriptors for the xy-vs-yx multiplier
miter.

Chunk A_j holds the clauses of output columns up to j that no earlier window
took, so the chunks partition the formula; the disagreement clause sits in the
first chunk.  Two interpolant shapes are tried in turn and the first one that
verifies is returned:

  window:  units -e_{j-D+1} .. -e_j and the clause (e_{j-D} v ... v e_{2n-1})
  shifted: the clause (e_{j+1} v ... v e_{2n-1})
"""
from __future__ import annotations

from dataclasses import dataclass

from ..cnf import Clause
from ..proofdoor import ProofdoorDescriptor, VerificationReport, verify_proofdoor
from .staging import chunk_decompositions
from .tree import TreeMiter, build_tree_miter


@dataclass
class StripResult:
    descriptor: ProofdoorDescriptor
    miter: TreeMiter
    variant: str                 # "window" or "shifted"
    report: VerificationReport
    tried: dict                  # variant -> VerificationReport

    @property
    def verified(self) -> bool:
        return self.report.passed


def _interpolants(errs, ends, delta, variant):
    top = len(errs) - 1
    out = []
    for j in ends[:-1]:
        if variant == "window":
            units = [Clause((-errs[i],)) for i in range(max(j - delta + 1, 0), j + 1)]
            wide = Clause(errs[i] for i in range(max(j - delta, 0), top + 1))
            out.append(units + [wide])
        else:
            out.append([Clause(errs[i] for i in range(j + 1, top + 1))])
    return out


def _supports(interps):
    # every clause may draw on the whole previous interpolant (at most D+1 clauses)
    return [[list(range(len(interps[j - 1]))) for _ in interps[j]] for j in range(1, len(interps))]


def build_mult_strip_descriptor(n: int, delta: int, variants=("window", "shifted"),
                                cross_check: bool = True) -> StripResult:
    if delta < 1:
        raise ValueError("delta must be >= 1")
    miter = build_tree_miter("x*y", "y*x", n)
    enc, errs = miter.encoding, miter.errors
    top = len(errs) - 1
    j0 = min(delta, top)
    ends = list(range(j0, top + 1))
    chunks = [[] for _ in ends]
    for cid, col in enumerate(enc.clause_pos, 1):
        idx = max(0, min(col, top) - j0) if col > j0 else 0
        chunks[idx].append(cid)
    decs = chunk_decompositions(miter.netlist, enc, chunks, "primal")
    bdecs = chunk_decompositions(miter.netlist, enc, chunks, "bipartite")
    tried = {}
    for variant in variants:
        interps = _interpolants(errs, ends, delta, variant)
        supports = _supports(interps)
        sizes = [len(s) for sj in supports for s in sj]
        params = {"c": max((len(i) for i in interps), default=0),
                  "w": max(d.width for d in decs + bdecs),
                  "s": max(sizes + [len(interps[-1]) if interps else 0])}
        d = ProofdoorDescriptor(chunks, interps, supports, params, decs, bdecs,
                                labels=[f"cols..{j}" for j in ends])
        rep = verify_proofdoor(miter.formula, d, cross_check=cross_check)
        tried[variant] = rep
        if rep.passed:
            return StripResult(d, miter, variant, rep, tried)
    return StripResult(d, miter, variant, rep, tried)
