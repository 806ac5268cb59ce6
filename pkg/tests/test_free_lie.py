import itertools
import random

import pytest
from hypothesis import given, strategies as st

from lazlie import FreeLie, free_lla, hall_set, lev_deg, validate, witt_count
from lazlie.free_lie import LiePoly, mobius
from oracles import hall_words, poly_words, rank_mod, w_bracket, w_mod


def test_two_generators_class_three():
    assert hall_set(2, (1, 1), 3) == ["X", "Y", "[Y,X]", "[[Y,X],X]", "[[Y,X],Y]"]
    L = free_lla(2, (1, 1), 3, 5)
    assert L.dim == 5
    assert validate(L) is None
    assert [len(L.P(i)) for i in range(1, 5)] == [5, 3, 2, 0]


def test_weighted_generator_truncates():
    assert hall_set(2, (1, 2), 3) == ["X", "Y", "[Y,X]"]
    L = free_lla(2, (1, 2), 3, 5)
    assert L.dim == 3
    assert L.P(4) == []
    assert [len(L.P(i)) for i in range(1, 5)] == [3, 2, 1, 0]
    # the would-be degree 4 and 5 monomials are gone
    F = FreeLie(2, (1, 2), 3, 5)
    YX = F.bracket(F.gen(1), F.gen(0))
    assert F.bracket(YX, F.gen(0)) == F.zero()
    assert F.bracket(YX, F.gen(1)) == F.zero()


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("c", range(1, 7))
def test_witt_counts(n, c):
    assert len(hall_set(n, None, c)) == sum(witt_count(n, d) for d in range(1, c + 1))


def test_witt_values():
    assert [witt_count(2, d) for d in range(1, 7)] == [2, 1, 2, 3, 6, 9]
    assert [witt_count(3, d) for d in range(1, 5)] == [3, 3, 8, 18]
    assert [mobius(k) for k in range(1, 11)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]


def test_hall_order_is_by_degree():
    F = FreeLie(3, (1, 2, 1), 4, 7)
    assert F.deg == sorted(F.deg)
    # generators of equal weight appear by index
    assert F.labels()[:2] == ["X", "Z"]


@pytest.mark.parametrize("n,weights,c,p", [
    (2, (1, 1), 4, 5), (3, (1, 1, 1), 3, 7), (2, (1, 2), 5, 11), (3, (2, 1, 1), 4, 5),
])
def test_bracket_table_against_free_associative_algebra(n, weights, c, p):
    F = FreeLie(n, weights, c, p)
    words = [w_mod(w, p) for w in hall_words(F)]
    # Hall monomials stay independent inside the tensor algebra
    support = sorted({w for d in words for w in d})
    rows = [[d.get(w, 0) for w in support] for d in words]
    assert rank_mod(rows, p) == F.dim
    for P, Q in itertools.product(range(F.dim), repeat=2):
        got = poly_words(F, F.bracket_mono(P, Q), p)
        want = w_mod(w_bracket(hall_words(F)[P], hall_words(F)[Q], F.weights, c), p)
        assert got == want, (F.label(P), F.label(Q))


def test_normal_form_examples():
    F = FreeLie(2, None, 4, 7)
    X, Y = F.gen(0), F.gen(1)
    assert F.normal_form(("Y", ("Y", "X"))) == -F.normal_form((("Y", "X"), "Y"))
    assert F.normal_form(("X", "Y")) == -F.normal_form(("Y", "X"))
    assert F.normal_form(("X", "X")) == F.zero()
    assert F.parse("[X,Y] + 2*[Y,X]") == F.bracket(Y, X)
    assert F.vector(F.from_vector(F.vector(X + Y))) == F.vector(X + Y)


def test_lev_deg():
    F = FreeLie(2, (1, 2), 4, 5)
    X, Y = F.gen(0), F.gen(1)
    assert lev_deg(X) == (1, 1)
    assert lev_deg(Y) == (2, 2)
    assert lev_deg(X + F.bracket(Y, X)) == (1, 3)
    assert lev_deg(F.zero()) == (5, 5)


def _random_poly(rng, F, terms=4):
    return LiePoly(F, {rng.randrange(F.dim): rng.randrange(1, F.p) for _ in range(terms)})


@st.composite
def algebra_and_polys(draw):
    n = draw(st.integers(1, 3))
    c = draw(st.integers(1, 4))
    p = draw(st.sampled_from([5, 7, 11]))
    F = FreeLie(n, None, c, p)
    rng = random.Random(draw(st.integers(0, 10 ** 6)))
    return F, [_random_poly(rng, F) for _ in range(3)]


@given(algebra_and_polys())
def test_lie_laws_on_polys(data):
    F, (a, b, c) = data
    br = F.bracket
    assert br(a, b) == -br(b, a)
    assert br(a, a) == F.zero()
    assert br(a, br(b, c)) + br(b, br(c, a)) + br(c, br(a, b)) == F.zero()
    assert br(a + b, c) == br(a, c) + br(b, c)
    assert br(a * 3, c) == br(a, c) * 3


@given(algebra_and_polys())
def test_valuation_and_homogeneity(data):
    F, (a, b, _) = data
    la, lb = lev_deg(a)[0], lev_deg(b)[0]
    s = lev_deg(a + b)[0]
    assert s >= min(la, lb)
    if la != lb:
        assert s == min(la, lb)
    q = F.bracket(a, b)
    if q.terms:
        assert lev_deg(q)[0] >= la + lb
    for P, Q in itertools.product(range(min(F.dim, 6)), repeat=2):
        for k in F.bracket_mono(P, Q):
            assert F.deg[k] == F.deg[P] + F.deg[Q]


def test_bad_weights():
    with pytest.raises(ValueError):
        FreeLie(2, (1, 4), 3, 5)
    with pytest.raises(ValueError):
        FreeLie(2, (1,), 3, 5)
