import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdlab.cdcl import CdclConfig, solve_cdcl
from pdlab.cnf import Clause, CnfFormula, restrict
from pdlab.encodings.functions import build_function_encoding
from pdlab.oracles import brute_sat
from pdlab.resolution import (InterpolantError, LiftError, ProofBuilder, ResFormatError,
                              ResolutionProof, Step, VarPartition, check_partial_order,
                              check_resolution_proof, emit_res, extract_interpolant,
                              lift_restriction, ordered_refutation, parse_res, verify_interpolant)
from pdlab.structure import PartialOrder

from conftest import entails, fml, satisfies


def _proof(f, *steps, root=None):
    m = len(f.clauses)
    ss = [Step(m + i, l, r, p, Clause(c)) for i, (l, r, p, c) in enumerate(steps, 1)]
    return ResolutionProof(f, ss, root if root is not None else m + len(ss))


# -- checker -------------------------------------------------------------------------

def test_check_accepts_trivial():
    f = fml(1, (1,), (-1,))
    assert check_resolution_proof(f, _proof(f, (1, 2, 1, ())))


def test_check_resolvent_mismatch():
    f = fml(1, (1,), (-1,))
    chk = check_resolution_proof(f, _proof(f, (1, 2, 1, (1,))))
    assert not chk and chk.step == 3 and "mismatch" in chk.reason


def test_check_dangling_antecedent():
    f = fml(1, (1,), (-1,))
    chk = check_resolution_proof(f, _proof(f, (1, 9, 1, ())))
    assert not chk and chk.step == 3 and "dangling" in chk.reason


def test_check_other_rejections():
    f = fml(1, (1,), (-1,))
    assert not check_resolution_proof(f, _proof(f, (1, 2, 2, ())))
    assert not check_resolution_proof(f, ResolutionProof(f, [], None))
    g = fml(1, (1,), (1,))
    assert not check_resolution_proof(g, _proof(f, (1, 2, 1, ())))
    f3 = fml(2, (1, 2), (-1,))
    p = _proof(f3, (1, 2, 1, (2,)))
    assert not check_resolution_proof(f3, p)
    assert check_resolution_proof(f3, p, refutation=False)


# -- partial orders ------------------------------------------------------------------

def test_order_compliant():
    f = fml(2, (1,), (-1, 2), (-2,))
    p = _proof(f, (1, 2, 1, (2,)), (4, 3, 2, ()))
    assert check_partial_order(p, PartialOrder({1}, {2}))


def test_order_violation_witness():
    # vars: x=1, z=3
    f = fml(3, (1, 3), (1, -3), (-1,))
    p = _proof(f, (1, 2, 3, (1,)), (4, 3, 1, ()))
    chk = check_partial_order(p, PartialOrder({1}, {3}))
    assert not chk
    assert chk.after_step == 4 and chk.before_step == 5
    assert chk.path == [1, 4, 5]


def test_order_vacuous():
    f = fml(3, (1, 3), (1, -3), (-1,))
    p = _proof(f, (1, 2, 3, (1,)), (4, 3, 1, ()))
    assert check_partial_order(p, PartialOrder((), {1, 3}))


def _brute_paths_ok(p, po):
    """Enumerate every leaf-to-root path of the live DAG."""
    def paths(cid):
        if p.is_input(cid):
            return [[]]
        s = p.step(cid)
        return [q + [s.pivot] for a in (s.left, s.right) for q in paths(a)]
    for q in paths(p.root):
        seen_after = False
        for v in q:
            if v in po.after:
                seen_after = True
            elif v in po.before and seen_after:
                return False
    return True


@st.composite
def split_formulas(draw):
    nb, na, ns = draw(st.integers(1, 3)), draw(st.integers(0, 3)), draw(st.integers(1, 3))
    b = list(range(1, nb + 1))
    a = list(range(nb + 1, nb + na + 1))
    s = list(range(nb + na + 1, nb + na + ns + 1))
    side = st.sampled_from([b + s, a + s]) if a else st.just(b + s)
    clauses = []
    for _ in range(draw(st.integers(1, 14))):
        pool = draw(side)
        vs = draw(st.lists(st.sampled_from(pool), min_size=1, max_size=3, unique=True))
        clauses.append(tuple(v if draw(st.booleans()) else -v for v in vs))
    return fml(nb + na + ns, *clauses), VarPartition(b, a, s)


@settings(max_examples=80, deadline=None)
@given(split_formulas(), st.booleans())
def test_order_check_matches_path_enumeration(fs, use_cdcl):
    f, vp = fs
    if brute_sat(f).sat:
        return
    if use_cdcl:
        p = solve_cdcl(f, CdclConfig(order=tuple(range(f.num_vars, 0, -1)))).proof.pruned()
    else:
        p = ordered_refutation(f, sorted(vp.after) + sorted(vp.before))
    for po in (PartialOrder(vp.before, vp.after | vp.shared), PartialOrder(vp.before | vp.after, vp.shared)):
        assert bool(check_partial_order(p, po)) == _brute_paths_ok(p, po)


@settings(max_examples=80, deadline=None)
@given(split_formulas(), st.booleans())
def test_corollary_coarser_order(fs, use_cdcl):
    f, vp = fs
    if brute_sat(f).sat:
        return
    if use_cdcl:
        p = solve_cdcl(f, CdclConfig(order=tuple(range(1, f.num_vars + 1)))).proof
    else:
        p = ordered_refutation(f, sorted(vp.before | vp.after))
    if check_partial_order(p, PartialOrder(vp.before | vp.after, vp.shared)):
        assert check_partial_order(p, PartialOrder(vp.before, vp.after | vp.shared))


# -- interpolants ----------------------------------------------------------------------

def test_extract_simple():
    # x1=1, z=2
    f = fml(2, (1,), (-1, 2), (-2,))
    p = _proof(f, (1, 2, 1, (2,)), (4, 3, 2, ()))
    vp = VarPartition({1}, (), {2})
    i = extract_interpolant(p, vp, a_clause_ids=[1, 2])
    assert i.clauses == (Clause([2]),)


def test_extract_empty_before():
    f = fml(2, (1,), (-1, 2), (-2,))
    p = _proof(f, (1, 2, 1, (2,)), (4, 3, 2, ()))
    vp = VarPartition((), (), {1, 2})
    i = extract_interpolant(p, vp, a_clause_ids=[1, 2])
    assert set(i.clauses) == {Clause([1]), Clause([-1, 2])}


@pytest.mark.parametrize("n", [2, 3])
def test_extract_parity(n):
    fe = build_function_encoding("parity", n)
    p = ordered_refutation(fe.formula, sorted(fe.partition.before))
    assert check_resolution_proof(fe.formula, p)
    assert check_partial_order(p, PartialOrder(fe.partition.before, fe.partition.after | fe.partition.shared))
    i = extract_interpolant(p, fe.partition, a_clause_ids=fe.plus_ids)
    assert len(i.clauses) <= len(p.steps)
    pos = {v: k for k, v in enumerate(fe.inputs)}
    for bits in itertools.product((False, True), repeat=n):
        a = [False] * fe.formula.num_vars
        for v, b in zip(fe.inputs, bits):
            a[v - 1] = b
        assert satisfies(a, i.clauses) == (sum(bits) % 2 == 1)
    assert all(v in pos for c in i.clauses for v in c.variables())


def test_extract_rejects_noncompliant():
    # z is resolved below x, so the A-leaves on the cut still mention x
    f = fml(3, (1, 3), (1, -3), (-1,))
    p = _proof(f, (1, 2, 3, (1,)), (4, 3, 1, ()))
    with pytest.raises(InterpolantError):
        extract_interpolant(p, VarPartition({1}, (), {3}), a_clause_ids=[1, 2])


def test_verify_interpolant():
    a, b = fml(1, (1,)), fml(1, (-1,))
    assert verify_interpolant(a, b, fml(1, (1,)), {1})
    chk = verify_interpolant(a, b, fml(1, (-1,)), {1})
    assert not chk and "entail" in chk.reason
    chk = verify_interpolant(a, b, fml(2, (2,)), {1})
    assert not chk and "scope" in chk.reason
    chk = verify_interpolant(a, b, fml(1), {1})
    assert not chk


@settings(max_examples=60, deadline=None)
@given(split_formulas())
def test_extracted_interpolants_verify(fs):
    f, vp = fs
    if brute_sat(f).sat:
        return
    p = ordered_refutation(f, sorted(vp.before))
    i = extract_interpolant(p, vp, verify=False)
    a_ids = vp.a_side(f)
    a = CnfFormula(f.num_vars, tuple(f.clause(k) for k in a_ids))
    b = CnfFormula(f.num_vars, tuple(f.clause(k) for k in range(1, len(f) + 1) if k not in a_ids))
    assert verify_interpolant(a, b, i, vp.shared | vp.after)
    assert len(i.clauses) <= len(p.ancestors())
    for c in i.clauses:
        assert entails(f.num_vars, a.clauses, c)


# -- lifting ---------------------------------------------------------------------------

def test_lift_single_literal():
    f = fml(2, (1, 2), (-2,))
    r = restrict(f, {1: False})
    assert r.clauses == (Clause([2]), Clause([-2]))
    p = _proof(r, (1, 2, 2, ()))
    lifted = lift_restriction(p, f, {1: False})
    assert lifted.root_clause() == Clause([1])
    assert check_resolution_proof(f, lifted, refutation=False)


def test_lift_identity():
    f = fml(1, (1,), (-1,))
    r = restrict(f, {})
    lifted = lift_restriction(_proof(r, (1, 2, 1, ())), f, {})
    assert lifted.is_refutation() and check_resolution_proof(f, lifted)


def test_lift_needs_provenance():
    f = fml(1, (1,), (-1,))
    with pytest.raises(LiftError):
        lift_restriction(_proof(f, (1, 2, 1, ())), f, {})


@settings(max_examples=60, deadline=None)
@given(split_formulas(), st.data())
def test_lift_soundness(fs, data):
    f, _ = fs
    alpha = data.draw(st.dictionaries(st.integers(1, f.num_vars), st.booleans(), max_size=3))
    r = restrict(f, alpha)
    if brute_sat(r).sat:
        return
    p = solve_cdcl(r, CdclConfig(order=tuple(range(1, f.num_vars + 1)))).proof
    lifted = lift_restriction(p, f, alpha)
    assert check_resolution_proof(f, lifted, refutation=False)
    falsified = {(-v if b else v) for v, b in alpha.items()}
    assert set(lifted.root_clause()) <= falsified


# -- RES format --------------------------------------------------------------------------

def test_res_round_trip():
    f = fml(2, (1,), (-1, 2), (-2,))
    b = ProofBuilder(f)
    root = b.resolve(b.resolve(1, 2, 1), 3, 2)
    p = b.build(root)
    text = emit_res(p)
    assert text == "p res 3 2\n4 1 2 1 2 0\n5 4 3 2 0\n"
    q = parse_res(text, f)
    assert q.root == 5 and [s.clause for s in q.steps] == [s.clause for s in p.steps]
    assert check_resolution_proof(f, q)


@pytest.mark.parametrize("text", ["", "p res 3\n", "p res 2 0\n", "p res 3 1\n4 1 2 1 2\n", "p res 3 2\n4 1 2 1 2 0\n"])
def test_res_format_errors(text):
    with pytest.raises(ResFormatError):
        parse_res(text, fml(2, (1,), (-1, 2), (-2,)))
