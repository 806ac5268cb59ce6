"""The Lazard correspondence for class c < p.

Group elements are Lie-coordinate vectors; the product is the truncated
Baker-Campbell-Hausdorff series evaluated with the algebra's bracket.  The
inverse direction recovers the sum and the bracket from group operations
alone, using correction exponents solved degree by degree.
"""
from __future__ import annotations

import itertools
import random
import threading
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Callable, Sequence

from . import gfp
from .free_lie import FreeLie, LiePoly
from .lla import Lla, LlaError, LlaHom, hom_check, is_ideal_in, is_subalgebra, Violation
from .gfp import Vec


def _compositions(m: int, parts: int):
    """Sequences of ``parts`` pairs (r, s) with r + s >= 1 and total m."""
    if parts == 0:
        if m == 0:
            yield ()
        return
    for t in range(1, m - parts + 2):
        for r in range(t + 1):
            for rest in _compositions(m - t, parts - 1):
                yield ((r, t - r),) + rest


def dynkin_words(c: int) -> dict[str, Fraction]:
    """Coefficient of each right-nested word in Dynkin's form of log(e^X e^Y)."""
    out: dict[str, Fraction] = {}
    for m in range(1, c + 1):
        for n in range(1, m + 1):
            sign = Fraction((-1) ** (n - 1), n)
            for seq in _compositions(m, n):
                den = m
                word = ""
                for r, s in seq:
                    den *= factorial(r) * factorial(s)
                    word += "X" * r + "Y" * s
                out[word] = out.get(word, Fraction(0)) + sign / den
    return {w: q for w, q in out.items() if q}


def right_nested(F: FreeLie, word: str) -> LiePoly:
    """[w1,[w2,[...,wm]]] in Hall coordinates."""
    acc = F.gen(word[-1])
    for ch in reversed(word[:-1]):
        acc = F.bracket(F.gen(ch), acc)
    return acc


@dataclass
class BchPolys:
    c: int
    p: int
    F: FreeLie
    H: LiePoly
    h1: LiePoly
    h2: LiePoly

    def __str__(self) -> str:
        return f"H  = {self.H}\nh1 = X*Y * prod P^e  with e: {self.h1}\nh2 = [X,Y]_G * prod P^e  with e: {self.h2}"


_cache: dict[tuple[int, int], BchPolys] = {}
_cache_lock = threading.Lock()


def _check_cp(c: int, p: int) -> None:
    gfp.check_modulus(p)
    if not 1 <= c < p:
        raise ValueError(f"need 1 <= c < p, got c={c}, p={p}")


def bch_series(c: int, p: int) -> tuple[FreeLie, LiePoly]:
    _check_cp(c, p)
    F = FreeLie(2, (1, 1), c, p)
    H = F.zero()
    for word, q in dynkin_words(c).items():
        H = H + right_nested(F, word) * gfp.reduce_rational(q, p)
    return F, H


def bch(c: int, p: int) -> BchPolys:
    """H, h1 and h2 for (c, p), computed once and cached."""
    key = (c, p)
    hit = _cache.get(key)
    if hit is not None:
        return hit
    with _cache_lock:
        hit = _cache.get(key)
        if hit is None:
            F, H = bch_series(c, p)
            h1, h2 = _solve_corrections(F, H)
            hit = BchPolys(c, p, F, H, h1, h2)
            _cache[key] = hit
    return hit


def invert_bch(c: int, p: int) -> tuple[LiePoly, LiePoly]:
    b = bch(c, p)
    return b.h1, b.h2


# -- evaluation ----------------------------------------------------------------

def eval_hall(F: FreeLie, values: Sequence, bracket: Callable) -> list:
    """Images of every Hall monomial when the generators take ``values``."""
    out: list = []
    for k in range(F.dim):
        if F.leaf[k] is not None:
            out.append(values[F.leaf[k]])
        else:
            out.append(bracket(out[F.left[k]], out[F.right[k]]))
    return out


def group_commutators(F: FreeLie, x, y, mul, inv) -> list:
    """Group-commutator images of the Hall monomials, with [g,h] = g^-1 h^-1 g h."""

    return eval_hall(F, [x, y], lambda g, h: _comm(g, h, mul, inv))


def power(x, e: int, mul, one):
    out = one
    base = x
    while e:
        if e & 1:
            out = mul(out, base)
        base = mul(base, base)
        e >>= 1
    return out


def _apply_word(F: FreeLie, head, exps: LiePoly, comms: list, mul, one):
    out = head
    for k in sorted(exps.terms):
        out = mul(out, power(comms[k], exps.terms[k], mul, one))
    return out


def _solve_corrections(F: FreeLie, H: LiePoly) -> tuple[LiePoly, LiePoly]:
    """Exponents e_P with X+Y = X*Y*prod P_G^{e_P} and [X,Y] = [X,Y]_G*prod P_G^{e_P}."""
    p, c = F.p, F.c

    def mul(a: LiePoly, b: LiePoly) -> LiePoly:
        return evaluate_poly(F, H, [a, b], F.bracket, _lie_add)

    def inv(a):
        return -a

    X, Y = F.gen(0), F.gen(1)
    one = F.zero()
    comms = group_commutators(F, X, Y, mul, inv)
    exps = []
    for head, target, start in ((mul(X, Y), X + Y, 2),
                                (_comm(X, Y, mul, inv), F.bracket(X, Y), 3)):
        e = F.zero()
        for d in range(start, c + 1):
            cur = _apply_word(F, head, e, comms, mul, one)
            resid = target - cur
            fix = {k: v for k, v in resid.terms.items() if F.deg[k] == d}
            bad = [k for k, v in resid.terms.items() if F.deg[k] < d]
            assert not bad, "lower-degree residue survived"
            e = e + LiePoly(F, fix)
        assert _apply_word(F, head, e, comms, mul, one) == target
        exps.append(e)
    return exps[0], exps[1]


def _comm(g, h, mul, inv):
    return mul(mul(inv(g), inv(h)), mul(g, h))


def _lie_add(a, b):
    return a + b


def evaluate_poly(F: FreeLie, poly: LiePoly, values: Sequence, bracket: Callable, add: Callable,
                  scale: Callable | None = None, zero=None):
    """Evaluate a polynomial of F at ``values`` using the given operations."""
    imgs = eval_hall(F, values, bracket)
    if scale is None:
        def scale(k, v):
            return v * k
    out = zero if zero is not None else values[0] * 0
    for k, coef in poly.terms.items():
        out = add(out, scale(coef, imgs[k]))
    return out


# -- groups ----------------------------------------------------------------------

class LazGroup:
    """The group on the underlying set of L with a*b = H(a,b)."""

    def __init__(self, L: Lla, polys: BchPolys | None = None):
        if L.p <= L.c:
            raise LlaError(f"need p > c for the correspondence (p={L.p}, c={L.c})")
        self.L = L
        self.polys = polys or bch(L.c, L.p)
        self.identity = gfp.zero(L.dim)
        self.p, self.dim = L.p, L.dim

    def _scale(self, k, v):
        return gfp.vscale(k, v, self.L.p)

    def _add(self, u, v):
        return gfp.vadd(u, v, self.L.p)

    def mul(self, a: Sequence[int], b: Sequence[int]) -> Vec:
        F, H = self.polys.F, self.polys.H
        return evaluate_poly(F, H, [tuple(a), tuple(b)], self.L.bracket, self._add, self._scale,
                             self.identity)

    def mul_many(self, U, V):
        """Row-wise products of two (N, dim) integer arrays."""
        F, H, p = self.polys.F, self.polys.H, self.L.p
        imgs = eval_hall(F, [U, V], self.L.bracket_many)
        out = U * 0
        for k, coef in H.terms.items():
            out = out + coef * imgs[k]
        return out % p

    def inv(self, a: Sequence[int]) -> Vec:
        return gfp.vscale(-1, a, self.L.p)

    def pow(self, a: Sequence[int], e: int) -> Vec:
        return power(tuple(a), e, self.mul, self.identity)

    def commutator(self, a, b) -> Vec:
        return self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b))

    def conj(self, x, g) -> Vec:
        """g^-1 x g."""
        return self.mul(self.mul(self.inv(g), x), g)

    def elements(self):
        for v in itertools.product(range(self.L.p), repeat=self.L.dim):
            yield v


def group_of(L: Lla) -> LazGroup:
    return LazGroup(L)


class GroupOps:
    """Sum and bracket recovered from group multiplication and inversion only."""

    def __init__(self, mul, inv, identity, polys: BchPolys):
        self.mul, self.inv, self.one, self.polys = mul, inv, identity, polys

    def _word(self, head, exps, a, b):
        F = self.polys.F
        comms = group_commutators(F, a, b, self.mul, self.inv)
        return _apply_word(F, head, exps, comms, self.mul, self.one), comms

    def add(self, a, b):
        out, _ = self._word(self.mul(a, b), self.polys.h1, a, b)
        return out

    def bracket(self, a, b):
        F = self.polys.F
        comms = group_commutators(F, a, b, self.mul, self.inv)
        head = _comm(a, b, self.mul, self.inv)
        return _apply_word(F, head, self.polys.h2, comms, self.mul, self.one)


def lie_of(G: LazGroup) -> Lla:
    """Rebuild the Lla from G's product and inverse.

    Coordinates of the result are read off the underlying set, which is the
    only thing shared with the original algebra.
    """
    L = G.L
    ops = GroupOps(G.mul, G.inv, G.identity, G.polys)
    n = L.dim
    e = L.basis()
    sc = {}
    for i in range(n):
        for j in range(i + 1, n):
            w = ops.bracket(e[i], e[j])
            if any(w):
                sc[(i, j)] = w
    # the flag is a family of subgroups; its members are the same subsets
    flag = [list(P) for P in L.flag]
    return Lla(L.p, L.c, n, sc, flag, L.labels)


def recovered_sum_ok(G: LazGroup, pairs) -> bool:
    ops = GroupOps(G.mul, G.inv, G.identity, G.polys)
    p = G.L.p
    return all(ops.add(a, b) == gfp.vadd(a, b, p) for a, b in pairs)


# -- verification battery ------------------------------------------------------

def _subspace_elements(S, p):
    n = len(S[0]) if S else 0
    for coeffs in itertools.product(range(p), repeat=len(S)):
        yield gfp.lincomb(coeffs, S, n, p)


def is_subgroup(G: LazGroup, S) -> bool:
    p = G.L.p
    S = gfp.span(S, p)
    if not S:
        return True
    elems = list(_subspace_elements(S, p))
    return all(gfp.in_span(S, G.mul(x, y), p) for x in elems for y in elems) and \
        all(gfp.in_span(S, G.inv(x), p) for x in elems)


def is_normal(G: LazGroup, S) -> bool:
    p = G.L.p
    S = gfp.span(S, p)
    if not S:
        return True
    elems = list(_subspace_elements(S, p))
    return all(gfp.in_span(S, G.conj(x, g), p) for x in elems for g in G.elements())


def discrepancy_in_P3(G: LazGroup, a, b) -> bool:
    """[a,b]_G - [a,b]_L lies in P_3."""
    L = G.L
    d = gfp.vsub(G.commutator(a, b), L.bracket(a, b), L.p)
    return gfp.in_span(L.P(3), d, L.p)


def exp_derivation(L: Lla, d) -> LlaHom:
    """exp of a nilpotent Lazard derivation, as a linear map."""
    p, n = L.p, L.dim
    out = [list(e) for e in L.basis()]
    term = L.basis()
    k = 1
    while True:
        term = [gfp.lincomb(t, d, n, p) for t in term]
        if not any(any(t) for t in term):
            break
        if k >= p:
            raise LlaError("derivation is not nilpotent below p")
        coef = gfp.inv(factorial(k), p)
        out = [gfp.axpy(coef, t, o, p) for t, o in zip(term, out)]
        k += 1
    return LlaHom(L, L, [tuple(r) for r in out])


def verify_correspondence(L: Lla, rng: random.Random | None = None, samples: int = 20,
                          max_subspace_dim: int = 2) -> dict[str, bool]:
    """Finite checks that substructures and maps correspond across the two sides."""
    rng = rng or random.Random(0)
    G = group_of(L)
    p, n = L.p, L.dim
    report: dict[str, bool] = {}

    def rvec():
        return tuple(rng.randrange(p) for _ in range(n))

    # centers
    basis = L.basis()
    lie_center = [v for v in _subspace_elements(basis, p)
                  if all(not any(L.bracket(v, e)) for e in basis)] if p ** n <= 4096 else None
    if lie_center is not None:
        grp_center = [v for v in _subspace_elements(basis, p)
                      if all(G.mul(v, e) == G.mul(e, v) for e in basis)]
        report["center"] = set(lie_center) == set(grp_center)

    sub_ok = normal_ok = True
    for _ in range(samples):
        k = rng.randint(1, min(max_subspace_dim, n))
        S = gfp.span([rvec() for _ in range(k)], p)
        sub_ok &= is_subalgebra(L, S) == is_subgroup(G, S)
        if p ** n <= 4096:
            normal_ok &= is_ideal_in(L, S) == is_normal(G, S)
    report["subgroup_iff_subalgebra"] = sub_ok
    if p ** n <= 4096:
        report["normal_iff_ideal"] = normal_ok

    report["discrepancy_in_P3"] = all(discrepancy_in_P3(G, rvec(), rvec()) for _ in range(samples))

    # inner automorphisms of G are Lie automorphisms
    inner_ok = True
    for _ in range(max(1, samples // 4)):
        g = rvec()
        imgs = [G.conj(e, g) for e in basis]
        phi = LlaHom(L, L, imgs)
        x, y = rvec(), rvec()
        inner_ok &= phi(gfp.vadd(x, y, p)) == gfp.vadd(G.conj(x, g), G.conj(y, g), p)
        inner_ok &= not isinstance(hom_check(phi), Violation) and phi.is_bijective()
    report["group_auto_is_lie_auto"] = inner_ok

    # exponentials of Lazard derivations are group automorphisms
    from .lla import der_laz

    D = der_laz(L)
    auto_ok = True
    for _ in range(max(1, samples // 4)):
        if not D.maps:
            break
        coeffs = [rng.randrange(p) for _ in D.maps]
        phi = exp_derivation(L, D.map_of(coeffs))
        auto_ok &= not isinstance(hom_check(phi), Violation)
        x, y = rvec(), rvec()
        auto_ok &= phi(G.mul(x, y)) == G.mul(phi(x), phi(y))
    report["lie_auto_is_group_auto"] = auto_ok
    return report
