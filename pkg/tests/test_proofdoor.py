import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdlab.cnf import CnfFormula
from pdlab.oracles import brute_sat
from pdlab.proofdoor import (AssemblyError, DescriptorError, ProofdoorDescriptor, assemble_refutation,
                             cutting_orders_from_sets, cutting_partial_orders, verify_proofdoor)
from pdlab.resolution import (VarPartition, check_partial_order, check_resolution_proof,
                              extract_interpolant, ordered_refutation)
from pdlab.structure import PartialOrder, PathDecomposition

from conftest import entails, fml

P, A = 1, 2


def toy(interp=((A,),)):
    f = fml(2, (P,), (-P, A), (-A,))
    d = ProofdoorDescriptor([[1, 2], [3]], [list(interp)], [], {"c": 1, "w": 1, "s": 1})
    return f, d


def test_toy_passes():
    f, d = toy()
    rep = verify_proofdoor(f, d)
    assert rep.passed
    assert rep.measured["c"] == 1 and rep.measured["w"] <= 1 and rep.measured["k"] == 2


def test_toy_wrong_interpolant():
    f, d = toy(((-A,),))
    rep = verify_proofdoor(f, d)
    assert not rep.passed
    assert not rep.conditions["entailment"].passed
    assert rep.conditions["entailment"].witnesses == [(1, 0, (-A,))]
    assert any(l.startswith("cond.entailment=FAIL") for l in rep.lines())


def test_size_and_width_conditions():
    f, d = toy()
    d.params = {"c": 0, "w": 0, "s": 0}
    rep = verify_proofdoor(f, d)
    assert not rep.conditions["interpolant_size"].passed
    assert not rep.conditions["final_size"].passed
    assert not rep.conditions["width"].passed
    assert rep.conditions["entailment"].passed


def test_shipped_decomposition_certifies_width():
    f, d = toy()
    d.decompositions = [PathDecomposition([{P, A}]), PathDecomposition([{A}])]
    rep = verify_proofdoor(f, d)
    assert rep.passed and rep.widths == [1, 0]
    assert rep.conditions["width"].note == "certified"
    d.decompositions = [PathDecomposition([{P}]), PathDecomposition([{A}])]
    assert not verify_proofdoor(f, d).conditions["width"].passed


def test_cutting_orders_toy():
    f, d = toy()
    assert cutting_partial_orders(d, f) == [PartialOrder({P}, {A})]


def test_cutting_orders_three_chunks():
    p, q, a, b = 1, 2, 3, 4
    orders = cutting_orders_from_sets([{p}, {q}, set()], [{a}, {b}])
    # the second order only carries Z_2 on the right
    assert orders == [PartialOrder({p}, {q, a, b}), PartialOrder({p, q}, {b})]


def test_cutting_orders_single_chunk():
    f = fml(1, (1,), (-1,))
    d = ProofdoorDescriptor([[1, 2]], [], [], {"c": 0, "w": 1, "s": 0})
    assert cutting_partial_orders(d, f) == []
    assert verify_proofdoor(f, d).passed
    out = assemble_refutation(f, d)
    assert check_resolution_proof(f, out.proof)


def test_assemble_toy():
    f, d = toy()
    out = assemble_refutation(f, d)
    assert check_resolution_proof(f, out.proof)
    assert len(out.proof.steps) == 2
    assert check_partial_order(out.proof, PartialOrder({P}, {A}))


def test_assemble_aborts_on_bad_clause():
    f, d = toy(((-A,),))
    with pytest.raises(AssemblyError) as ei:
        assemble_refutation(f, d)
    assert ei.value.j == 1 and tuple(ei.value.clause) == (-A,)


def test_assemble_aborts_without_termination():
    f = fml(3, (P,), (-P, A), (3,))
    d = ProofdoorDescriptor([[1, 2], [3]], [[(A,)]], [], {"c": 1, "w": 1, "s": 1})
    with pytest.raises(AssemblyError):
        assemble_refutation(f, d)


def _chain3():
    # A_1 = {p, ¬p∨a}, A_2 = {¬a∨b}, A_3 = {¬b}
    f = fml(3, (1,), (-1, 2), (-2, 3), (-3,))
    d = ProofdoorDescriptor([[1, 2], [3], [4]], [[(2,)], [(3,)]], [[[0]]], {"c": 1, "w": 1, "s": 1})
    return f, d


def test_three_chunk_chain():
    f, d = _chain3()
    assert verify_proofdoor(f, d).passed
    out = assemble_refutation(f, d)
    assert check_resolution_proof(f, out.proof)
    for po in cutting_partial_orders(d, f):
        assert check_partial_order(out.proof, po)


def test_missing_support_fails_entailment():
    f, d = _chain3()
    d.supports = [[[]]]
    rep = verify_proofdoor(f, d)
    assert not rep.conditions["entailment"].passed


def test_json_round_trip():
    f, d = _chain3()
    d.decompositions = [PathDecomposition([{1, 2}]), PathDecomposition([{2, 3}]), PathDecomposition([{3}])]
    e = ProofdoorDescriptor.from_json(d.to_json())
    assert e.chunks == d.chunks and e.interpolants == d.interpolants and e.supports == d.supports
    assert e.params == d.params and e.decompositions == d.decompositions
    assert e.to_json() == d.to_json()


@pytest.mark.parametrize("mutate", [
    lambda d: setattr(d, "chunks", [[1, 2], [3], [3]]),
    lambda d: setattr(d, "chunks", [[1, 2], [3]]),
    lambda d: setattr(d, "interpolants", [[(2,)]]),
    lambda d: setattr(d, "supports", [[[5]]]),
    lambda d: setattr(d, "supports", []),
    lambda d: setattr(d, "params", {"c": 1}),
    lambda d: setattr(d, "interpolants", [[(2,)], [(9,)]]),
])
def test_malformed_descriptor(mutate):
    f, d = _chain3()
    mutate(d)
    with pytest.raises(DescriptorError):
        verify_proofdoor(f, d)


@pytest.mark.parametrize("text", ["{", '{"chunks": []}', '{"chunks": 1, "interpolants": [], "supports": [], "params": {}}'])
def test_malformed_json(text):
    with pytest.raises(DescriptorError):
        ProofdoorDescriptor.from_json(text)


@st.composite
def two_sided(draw):
    nb, na, ns = draw(st.integers(1, 3)), draw(st.integers(1, 3)), draw(st.integers(1, 2))
    b = list(range(1, nb + 1))
    a = list(range(nb + 1, nb + na + 1))
    s = list(range(nb + na + 1, nb + na + ns + 1))
    sides = ([], [])
    for _ in range(draw(st.integers(2, 14))):
        k = draw(st.integers(0, 1))
        pool = (b + s, a + s)[k]
        vs = draw(st.lists(st.sampled_from(pool), min_size=1, max_size=3, unique=True))
        sides[k].append(tuple(v if draw(st.booleans()) else -v for v in vs))
    f = fml(nb + na + ns, *(sides[0] + sides[1]))
    return f, len(sides[0]), VarPartition(b, a, s)


@settings(max_examples=50, deadline=None)
@given(two_sided())
def test_two_chunk_pipeline(case):
    f, na, vp = case
    if brute_sat(f).sat or na == 0 or na == len(f.clauses):
        return
    a_ids = list(range(1, na + 1))
    p = ordered_refutation(f, sorted(vp.before))
    interp = extract_interpolant(p, vp, a_clause_ids=a_ids)
    if not interp.clauses:
        return
    for c in interp.clauses:
        assert entails(f.num_vars, [f.clause(i) for i in a_ids], c)
    d = ProofdoorDescriptor([a_ids, list(range(na + 1, len(f.clauses) + 1))], [list(interp.clauses)], [],
                            {"c": len(interp.clauses), "w": f.num_vars, "s": len(interp.clauses)})
    assert verify_proofdoor(f, d).passed
    out = assemble_refutation(f, d)
    assert check_resolution_proof(f, out.proof)
    for po in cutting_partial_orders(d, f):
        assert check_partial_order(out.proof, po)


def test_formula_mismatch_reported_as_descriptor_error():
    f, d = toy()
    with pytest.raises(DescriptorError):
        verify_proofdoor(CnfFormula(2, f.clauses[:2]), d)
