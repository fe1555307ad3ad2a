import itertools

import pytest
from hypothesis import strategies as st

from pdlab.cnf import Clause, CnfFormula


def satisfies(assign, clauses):
    """assign: tuple of bools indexed by var-1."""
    return all(any(assign[abs(l) - 1] == (l > 0) for l in c) for c in clauses)


def all_models(num_vars, clauses):
    return [a for a in itertools.product((False, True), repeat=num_vars) if satisfies(a, clauses)]


def entails(num_vars, clauses, c):
    return all(satisfies(a, [c]) for a in all_models(num_vars, clauses))


def fml(num_vars, *clauses):
    return CnfFormula(num_vars, tuple(Clause(c) for c in clauses))


@st.composite
def formulas(draw, max_vars=7, max_clauses=12, max_width=4):
    n = draw(st.integers(1, max_vars))
    lit = st.integers(1, n).flatmap(lambda v: st.sampled_from((v, -v)))
    clauses = draw(st.lists(st.lists(lit, min_size=0, max_size=max_width),
                            min_size=0, max_size=max_clauses))
    return CnfFormula(n, tuple(Clause(c) for c in clauses))


@pytest.fixture
def xor4():
    # x1^x2=1, x2^x3=1, x3^x4=1, x1^x4=0: odd cycle, unsatisfiable
    cl = []
    for (a, b), p in (((1, 2), 1), ((2, 3), 1), ((3, 4), 1), ((1, 4), 0)):
        if p:
            cl += [(a, b), (-a, -b)]
        else:
            cl += [(a, -b), (-a, b)]
    return fml(4, *cl)


ACCEPTANCE = {}


def record_acceptance(num, ok, detail=""):
    line = f"criterion {num}: {'PASS' if ok else 'FAIL'}" + (f" ({detail})" if detail else "")
    ACCEPTANCE[num] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[num])
