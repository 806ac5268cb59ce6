import random

import pytest

from lazlie import gfp
from lazlie.amalgam import (AmalgamInvariantError, amalgam_violations, amalgamate, commutes,
                            free_amalgam, freeness_check, generates, h_level_ok,
                            induced_by_generation, is_embedding, is_strong, stage1,
                            stage2_gains_ok)
from lazlie.free_lie import FreeLie, hall_set
from lazlie.lla import LlaError, LlaHom, abelian, from_levels, iso_search, validate
from instances import PairSampler, amalgam_instances, stage1_nodes, walk
from oracles import pushout_dims


@pytest.fixture(scope="module")
def insts():
    return amalgam_instances(random.Random(31), 60)


def test_laws(insts):
    for inst in insts:
        r = inst.r
        assert validate(r.S) is None
        assert amalgam_violations(r) == []
        assert generates(r) and is_strong(r) and commutes(r)
        assert is_embedding(r.embA) and is_embedding(r.embB)


def test_against_presentation(insts):
    checked = 0
    for inst in insts:
        Cl, Al, Bl, jA, jB, _, _ = inst.inputs
        if Al.dim + Bl.dim > 7:
            continue
        want = pushout_dims(Al, Bl, jA.images, jB.images, Cl.dim, FreeLie)
        assert [len(inst.r.S.P(i)) for i in range(1, inst.r.S.c + 2)] == want
        checked += 1
    assert checked >= 30


def test_stage_one_dimension_law(insts):
    seen = 0
    for inst in insts:
        for node in stage1_nodes(inst.r):
            tr = node.trace
            if tr.degenerate:
                continue
            c = node.S.c
            assert node.S.dim == tr.base_dim + len(hall_set(2, (tr.alpha, tr.beta), c))
            seen += 1
    assert seen > 0


def test_stage_two_traces(insts):
    for inst in insts:
        assert stage2_gains_ok(inst.r)
        for node in walk(inst.r):
            if node.kind == "stage2" and node.H is not None:
                assert h_level_ok(node)


def test_freeness_two_routes(insts):
    rng = random.Random(32)
    for inst in insts[:25]:
        sampler = PairSampler(inst, rng)
        for _ in range(15):
            f, g = sampler.sample()
            h = freeness_check(inst.r, f, g)
            other = induced_by_generation(inst.r, f, g)
            assert other is not None and other.images == h.images


def test_freeness_rejects_disagreeing_pairs():
    C = abelian(5, 2, 0)
    A = abelian(5, 2, 1)
    e = LlaHom(C, A, [])
    r = amalgamate(A, A, e, e)
    # into an abelian target, [a, b] has to vanish, which the free amalgam resolves
    T = abelian(5, 2, 2)
    h = freeness_check(r, LlaHom(A, T, [(1, 0)]), LlaHom(A, T, [(0, 1)]))
    assert all(not any(h(v)) for v in r.S.P(2))
    C1 = abelian(5, 2, 1)
    i = LlaHom(C1, C1, [(1,)])
    r1 = amalgamate(C1, C1, i, i)
    with pytest.raises(LlaError):
        freeness_check(r1, LlaHom(C1, T, [(1, 0)]), LlaHom(C1, T, [(0, 1)]))


def test_symmetry(insts):
    for inst in insts[:40]:
        r = inst.r
        r2 = amalgamate(r.B, r.A, r.iB, r.iA)
        fixing = list(zip(r.embA.images, r2.embB.images)) + list(zip(r.embB.images, r2.embA.images))
        assert iso_search(r.S, r2.S, fixing=fixing) is not None


def test_free_on_two_lines():
    C = abelian(7, 3, 0)
    A = abelian(7, 3, 1, [1])
    e = LlaHom(C, A, [])
    r = stage1(C, A, A, e, e)
    assert r.S.dim == 5 and r.trace.alpha == r.trace.beta == 1
    B = abelian(7, 3, 1, [2])
    r = free_amalgam(A, B, e, LlaHom(C, B, []))
    assert r.S.dim == 3


def test_heisenberg_over_centre():
    H = from_levels(5, 2, 3, {(1, 2): (1, 0, 0)}, [2, 1, 1])
    Z = abelian(5, 2, 1, [2])
    i = LlaHom(Z, H, [(1, 0, 0)])
    r = amalgamate(H, H, i, i)
    # four level-1 vectors, the shared centre, and four new cross brackets
    assert amalgam_violations(r) == []
    assert r.S.dim == 9
    assert [len(r.S.P(i)) for i in (1, 2, 3)] == pushout_dims(H, H, i.images, i.images, 1, FreeLie)


def test_bad_inputs():
    A = abelian(5, 2, 1, [1])
    C = abelian(5, 2, 1, [1])
    with pytest.raises(LlaError):
        free_amalgam(A, A, LlaHom(C, A, [(0,)]), LlaHom(C, A, [(1,)]))
    B = abelian(7, 2, 1, [1])
    with pytest.raises(LlaError):
        free_amalgam(A, B, LlaHom(C, A, [(1,)]), LlaHom(C, B, [(1,)]))


def test_strongness_negative_control():
    # two lines glued by the identity share more than the zero algebra
    C = abelian(5, 2, 0)
    A = abelian(5, 2, 1, [1])
    e = LlaHom(C, A, [])
    r = amalgamate(A, A, e, e)
    from dataclasses import replace
    fake = replace(r, embB=r.embA)
    assert not is_strong(fake)
    assert amalgam_violations(fake)
