"""Unsatisfiability queries with an exhaustive cross-check on small inputs."""
from __future__ import annotations

from .cdcl import SAT, UNSAT, CdclConfig, solve_cdcl
from .cnf import CnfFormula, compact
from .oracles import brute_sat

CROSS_CHECK_VARS = 20


class OracleDisagreement(AssertionError):
    pass


def is_unsat(f: CnfFormula, order=None, cross_check: bool = True) -> bool:
    g, back = compact(f)
    if order is not None:
        fwd = {v: k for k, v in back.items()}
        order = tuple(fwd[v] for v in order if v in fwd)
    res = solve_cdcl(g, CdclConfig(order=order or tuple(range(1, g.num_vars + 1))))
    assert res.status in (SAT, UNSAT)
    verdict = res.status == UNSAT
    if cross_check and g.num_vars <= CROSS_CHECK_VARS:
        if brute_sat(g).sat == verdict:
            raise OracleDisagreement("CDCL and exhaustive search disagree")
    return verdict
