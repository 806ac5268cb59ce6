import random

import pytest

from lazlie import gfp
from lazlie.lla import LlaError, LlaHom, abelian, hom_check, sub_lla, validate
from lazlie.witnesses import (BudgetExceeded, ExtType, build_ip_witness, build_sop3,
                              check_refutation, extension_types, find_witness, generic_round,
                              heisenberg_gadget, leibniz_split, level_raiser, realize,
                              refutation_free_check, sop3_claim1, sop3_claim2, t2p_axiom_check,
                              tracked_substructures, witness_embedding, ZERO)


def test_sop3_structure():
    inst = build_sop3(3, 5)
    V = inst.V
    assert validate(V) is None and V.dim == 4 * 3 + 3
    assert V.bracket(inst.vec("a'", 0), inst.vec("b", 2)) == inst.vec("d", 0, 2)
    assert not any(V.bracket(inst.vec("a'", 2), inst.vec("b", 0)))
    assert not any(V.bracket(inst.vec("a", 0), inst.vec("b", 1)))
    assert V.level(inst.vec("d", 0, 1)) == 3 and V.level(inst.vec("a'", 1)) == 2


@pytest.mark.parametrize("n", [1, 2, 3])
def test_sop3_claim1(n):
    inst = build_sop3(n, 5)
    for k in range(n):
        res = sop3_claim1(inst, k)
        assert res.ok, res.equations
        assert isinstance(hom_check(res.emb), LlaHom) and res.emb.is_injective()


def test_sop3_claim2_chain():
    inst = build_sop3(3, 7)
    for i in range(3):
        for j in range(3):
            ref = sop3_claim2(inst, i, j)
            if i < j:
                assert ref.contradiction and check_refutation(ref)
                assert ref.terms()[-1] == ZERO and ref.terms()[0] == ("sym", f"d{i}{j}")
                assert refutation_free_check(ref, 7)
            else:
                assert not ref.contradiction and not ref.steps


def test_refutation_tampering_is_caught():
    inst = build_sop3(2, 5)
    ref = sop3_claim2(inst, 0, 1)
    bad = list(ref.steps)
    s = bad[7]
    # claim [b'_1, a_0] is d_01 instead of 0
    from dataclasses import replace
    bad[7] = replace(s, rel=(s.rel[0], ("sym", "d01")))
    ref.steps = bad
    assert not check_refutation(ref)


@pytest.mark.parametrize("c,m", [(2, 2), (3, 2)])
def test_ip_biconditional(c, m):
    rng = random.Random(c * 10 + m)
    import itertools
    tuples = list(itertools.product(range(m), repeat=c - 1))
    for _ in range(4):
        X = [t for t in tuples if rng.random() < 0.5]
        inst = build_ip_witness(c, 7, m, X)
        assert inst.holds
        assert inst.quotient.dim == inst.L.dim - len(set(X))
        assert validate(inst.quotient) is None


def test_ip_rejects_bad_input():
    with pytest.raises(LlaError):
        build_ip_witness(3, 3, 2, [])
    with pytest.raises(LlaError):
        build_ip_witness(2, 5, 2, [(5,)])


def test_gadgets():
    H = heisenberg_gadget(1, 2, 4, 5)
    assert validate(H) is None and H.level((1, 0, 0)) == 3
    R = level_raiser(2, 3, 7)
    assert validate(R) is None and R.level((0, 0, 1)) == 3
    with pytest.raises(LlaError):
        level_raiser(3, 3, 7)
    L = build_sop3(2, 5).V
    rng = random.Random(0)
    for _ in range(20):
        x, y, z = (tuple(rng.randrange(5) for _ in range(L.dim)) for _ in range(3))
        lhs, a, b = leibniz_split(L, x, y, z)
        assert lhs == gfp.vadd(a, b, 5)


def test_extension_types():
    # a line has no room for a level-raising action
    line = extension_types(abelian(5, 2, 1, [1]))
    assert sorted((t.level, any(map(any, t.delta))) for t in line) == [(1, False), (2, False)]
    # x at level 1 and z at level 2: x -> z spans the only nonzero class at level 1
    A = abelian(5, 2, 2, [1, 2])
    types = extension_types(A)
    assert sorted((t.level, any(map(any, t.delta))) for t in types) == \
        [(1, False), (1, True), (2, False)]
    for t in types:
        B = realize(A, t)
        assert validate(B) is None and B.dim == 3


def test_find_witness_in_realization():
    A = heisenberg_gadget(1, 1, 3, 5)
    for t in extension_types(A):
        B = realize(A, t)
        iA = [gfp.unit(k, B.dim) for k in range(A.dim)]
        w = find_witness(B, iA, t)
        assert w is not None
        emb = witness_embedding(B, A, iA, t, w)
        assert isinstance(hom_check(emb), LlaHom)


def test_tracked_substructures():
    L = abelian(5, 2, 2)
    subs, exhaustive = tracked_substructures(L, 1)
    assert exhaustive and len(subs) == 1 + 6


def test_generic_round_budget():
    L = abelian(5, 2, 0)
    with pytest.raises(BudgetExceeded):
        generic_round(L, 9)
    r = generic_round(L, 2)
    assert r.L.dim >= 1 and validate(r.L) is None
    assert r.added


def test_generic_rounds_saturate_small():
    L = abelian(5, 2, 0)
    for _ in range(3):
        r = generic_round(L, 2)
        assert isinstance(hom_check(r.inclusion), LlaHom)
        L = r.L
    rep = t2p_axiom_check(L, random.Random(1))
    assert rep.violated == []


def test_axiom_check_flags_broken_structure():
    with pytest.raises(LlaError):
        t2p_axiom_check(abelian(5, 3, 1))
