from lazlie import gfp
from lazlie.lla import abelian, closure, from_levels, is_malcev, malcev_basis
from suites import base_change_suite, chain_span_suite, stage1_malcev_suite, triangle_suite


def test_triangle_small():
    s = triangle_suite(25, seed=2)
    assert s["fail_some"] > 0  # the negative side is exercised too


def test_stage_one_hall_tuples_small():
    assert stage1_malcev_suite(20, seed=3)["nodes"] >= 20


def test_chain_spans_small():
    assert chain_span_suite(30, seed=4)["chains"] == 30


def test_base_change_small():
    s = base_change_suite(25, seed=5)
    assert s["indep_over_C"] > 0 and s["proper_E"] > 0


def test_order_insensitive():
    L = from_levels(7, 3, 3, {(1, 2): (1, 0, 0)}, [3, 2, 1])
    a1, a2, a3 = gfp.identity(3)
    assert is_malcev(L, [a3, a1, a2], []) and is_malcev(L, [a1, a2, a3], [])


def test_dependent_tuple_is_not_malcev():
    L = abelian(5, 2, 2, [1, 1])
    assert not is_malcev(L, [(1, 0), (2, 0)], [])
    assert not is_malcev(L, [(1, 0)], [(1, 0)])


def test_malcev_basis_over_subalgebra():
    L = from_levels(5, 3, 4, {(2, 3): (0, 1, 0, 0), (1, 3): (1, 0, 0, 0)}, [3, 2, 1, 1])
    B = closure(L, [(0, 0, 1, 0)])
    m = malcev_basis(L, B)
    assert [L.level(v) for v in m] == sorted((L.level(v) for v in m), reverse=True)
    assert gfp.rank(B + m, 5) == 4 and is_malcev(L, m, B)
