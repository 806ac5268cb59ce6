import itertools
import random

import pytest
from hypothesis import given, strategies as st

from lazlie import gfp
from lazlie.free_lie import free_lla
from lazlie.lla import (Lla, LlaError, LlaHom, SearchRefused, abelian, closure, der_laz,
                        from_levels, hom_check, ideal_closure, identity_hom, is_derivation,
                        is_ideal_in, is_malcev, is_subalgebra, iso_search, level_over,
                        malcev_basis, quotient, rank, rebase, semidirect, sub_lla, validate)
from lazlie.randgen import random_lla, random_vec
from oracles import span_set


def heis(p=5, levels=(2, 1, 1), c=2):
    # [e2, e3] = e1
    return from_levels(p, c, 3, {(1, 2): (1, 0, 0)}, levels)


def test_validate_accepts_heisenberg():
    assert validate(heis()) is None


def test_validate_reports_jacobi():
    L = from_levels(5, 3, 5, {(0, 1): (0, 0, 0, 1, 0), (2, 3): (0, 0, 0, 0, 1)},
                    [1, 1, 1, 2, 3])
    v = validate(L)
    assert v is not None and v.kind == "jacobi"


def test_flag_must_be_lazard():
    # e1 at level 1 and e2 at level 1 but the bracket lands in a level-1 vector
    L = from_levels(5, 2, 3, {(0, 1): (0, 0, 1)}, [1, 1, 1])
    v = validate(L)
    assert v is not None and v.kind == "flag"


def test_constructor_rejects_bad_flags():
    with pytest.raises(LlaError):
        Lla(5, 2, 2, {}, [[(1, 0), (0, 1)], [(1, 0)], [(1, 0)]])
    with pytest.raises(LlaError):
        Lla(5, 2, 2, {}, [[(1, 0)], [], []])
    with pytest.raises(LlaError):
        Lla(5, 1, 3, {(1, 2): (1, 0, 0)})  # not 1-nilpotent


@pytest.fixture(scope="module")
def samples():
    rng = random.Random(7)
    return [random_lla(rng, rng.choice([5, 7]), rng.randint(1, 4), 7) for _ in range(40)]


def test_random_algebras_are_valid(samples):
    for L in samples:
        assert validate(L) is None


def test_closures(samples):
    rng = random.Random(3)
    for L in samples:
        gens = [random_vec(rng, L.dim, L.p) for _ in range(2)]
        S = closure(L, gens)
        assert is_subalgebra(L, S) and gfp.contains(S, gens, L.p)
        I = ideal_closure(L, gens)
        assert is_ideal_in(L, I) and gfp.contains(I, S, L.p)
        # minimality: brackets of generators close up to S within a few steps
        cur = gfp.span(gens, L.p)
        for _ in range(L.c + 1):
            cur = gfp.span(cur + [L.bracket(u, v) for u in cur for v in cur], L.p)
        assert cur == S


def test_sub_and_quotient(samples):
    rng = random.Random(4)
    for L in samples:
        S = closure(L, [random_vec(rng, L.dim, L.p)])
        sub, inc = sub_lla(L, S)
        assert validate(sub) is None
        assert isinstance(hom_check(inc), LlaHom)
        I = ideal_closure(L, [random_vec(rng, L.dim, L.p)])
        Q, pi = quotient(L, I)
        assert validate(Q) is None and Q.dim == L.dim - len(I)
        assert isinstance(hom_check(pi), LlaHom)
        assert all(not any(pi(v)) for v in I)


def test_rebase_round_trip(samples):
    rng = random.Random(5)
    for L in samples[:15]:
        while True:
            rows = [random_vec(rng, L.dim, L.p) for _ in range(L.dim)]
            if gfp.rank(rows, L.p) == L.dim:
                break
        M, back = rebase(L, rows)
        assert validate(M) is None
        assert back.is_bijective() and isinstance(hom_check(back), LlaHom)


def test_levels_and_ranks():
    # b at level 1, a at level 2, trivial bracket; B = span(b)
    L = abelian(5, 3, 2, [2, 1])
    a, b = (1, 0), (0, 1)
    c = gfp.vadd(a, b, 5)
    assert L.level(a) == 2 and L.level(b) == 1 and L.level(c) == 1
    # span(b, P_2) is everything, so the extension sits at level 2 with one new vector
    assert level_over(L, [b]) == 2
    assert tuple(rank(L, [b])) == (2, 1)
    assert tuple(rank(L, [a])) == (1, 1)
    assert is_malcev(L, [a], [b])
    assert not is_malcev(L, [c], [b])
    # both generate by span
    assert closure(L, [b, a]) == closure(L, [b, c])


def test_rank_order():
    from lazlie.lla import Rank
    assert Rank(3, 5).precedes(Rank(2, 1))
    assert Rank(2, 1).precedes(Rank(2, 2))
    assert not Rank(2, 2).precedes(Rank(2, 2))


def test_malcev_subtuple_need_not_be_malcev():
    L = heis(5, (3, 2, 1), 3)
    a1, a2, a3 = gfp.identity(3)
    assert is_malcev(L, [a1, a2, a3], [])
    assert not is_malcev(L, [a2, a3], [])


def test_malcev_basis_spans(samples):
    rng = random.Random(6)
    for L in samples:
        B = closure(L, [random_vec(rng, L.dim, L.p)])
        m = malcev_basis(L, B)
        assert len(m) + len(B) == L.dim
        assert is_malcev(L, m, B)
        levels = [L.level(v) for v in m]
        assert levels == sorted(levels, reverse=True)


def test_derivations(samples):
    for L in samples[:20]:
        D = der_laz(L)
        for d in D.maps:
            assert is_derivation(L, d)
        for u in L.basis():
            assert D.contains(L.ad(u)) == all(
                gfp.contains(L.P(i + 1), [L.bracket(u, v) for v in L.P(i)], L.p)
                for i in range(1, L.c + 1))
        assert validate(D.algebra) is None


def test_semidirect_with_line():
    C = abelian(5, 2, 2, [1, 2])
    F = abelian(5, 2, 1, [1])
    d = [(0, 1), (0, 0)]  # e1 -> e2, raises level by one
    S = semidirect(C, F, [d])
    assert validate(S) is None and S.dim == 3
    assert S.bracket((0, 0, 1), (1, 0, 0)) == (0, 1, 0)
    with pytest.raises(LlaError):
        semidirect(C, F, [[(1, 0), (0, 0)]])  # does not raise levels


def test_iso_search():
    A = heis()
    rows = [(2, 0, 0), (1, 1, 0), (0, 0, 1)]
    M, _ = rebase(A, rows)
    h = iso_search(A, M)
    assert h is not None and h.is_bijective()
    assert iso_search(A, abelian(5, 2, 3, [2, 1, 1])) is None
    with pytest.raises(SearchRefused):
        iso_search(free_lla(3, None, 3, 5), free_lla(3, None, 3, 5), ceiling=8)


def test_iso_search_respects_fixing():
    A = abelian(5, 2, 2, [1, 1])
    assert iso_search(A, A, fixing=[((1, 0), (0, 1))]) is not None
    L = heis()
    # the centre cannot go to a level-1 vector
    assert iso_search(L, L, fixing=[((1, 0, 0), (0, 1, 0))]) is None


def test_hom_check_catches_bracket_failure():
    L = heis()
    bad = hom_check([(0, 1, 0), (0, 1, 0), (0, 0, 1)], L, L)
    assert not isinstance(bad, LlaHom)
    assert isinstance(hom_check(identity_hom(L)), LlaHom)
