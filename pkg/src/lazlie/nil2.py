"""Class-2 groups of exponent p and their alternating bilinear maps.

A class-2 group G with a central subgroup P containing [G, G] is turned into
a triple (G/P, P, commutator) and back again.  The reverse direction writes
elements as pairs (v, w) and multiplies with an explicit correction term.
Independence checks on finite ambients live here too.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from . import gfp
from .gfp import Mat, Vec
from .lla import Lla, LlaError, from_levels


class Nil2Error(ValueError):
    pass


@dataclass
class BilinearStruct:
    """Spaces V, W over F_p with an alternating map beta: V x V -> W.

    ``beta`` maps index pairs (i, j), i < j, of V's standard basis to W vectors;
    missing pairs are zero.
    """

    p: int
    dim_v: int
    dim_w: int
    beta: Mapping[tuple[int, int], Sequence[int]]

    def __post_init__(self):
        gfp.check_modulus(self.p)
        table: dict[tuple[int, int], Vec] = {}
        for (i, j), w in dict(self.beta).items():
            if not (0 <= i < self.dim_v and 0 <= j < self.dim_v):
                raise Nil2Error(f"beta index ({i},{j}) out of range")
            if len(w) != self.dim_w:
                raise Nil2Error(f"beta({i},{j}) has length {len(w)}, expected {self.dim_w}")
            w = tuple(x % self.p for x in w)
            if i == j:
                if any(w):
                    raise Nil2Error("beta must vanish on the diagonal")
                continue
            if i > j:
                i, j, w = j, i, gfp.vscale(-1, w, self.p)
            if any(w):
                table[(i, j)] = w
        self.beta = table

    @property
    def tensor(self) -> np.ndarray:
        T = np.zeros((self.dim_v, self.dim_v, self.dim_w), dtype=np.int64)
        for (i, j), w in self.beta.items():
            T[i, j] = w
            T[j, i] = [(-x) % self.p for x in w]
        return T

    def basis_value(self, i: int, j: int) -> Vec:
        if i == j:
            return gfp.zero(self.dim_w)
        if i < j:
            return self.beta.get((i, j), gfp.zero(self.dim_w))
        return gfp.vscale(-1, self.beta.get((j, i), gfp.zero(self.dim_w)), self.p)

    def form(self, u: Sequence[int], v: Sequence[int]) -> Vec:
        out = [0] * self.dim_w
        for (i, j), w in self.beta.items():
            k = u[i] * v[j] - u[j] * v[i]
            if k:
                for t, x in enumerate(w):
                    out[t] += k * x
        return tuple(x % self.p for x in out)

    def lie_algebra(self, c: int = 2, levels_v: Sequence[int] | None = None,
                    levels_w: Sequence[int] | None = None,
                    labels: Sequence[str] | None = None) -> Lla:
        """V ⊕ W with [(v, w), (v', w')] = (0, beta(v, v')); a class-2 Lie algebra.

        Levels default to 1 on V and 2 on W.
        """
        n = self.dim_v + self.dim_w
        lv = list(levels_v) if levels_v is not None else [1] * self.dim_v
        lw = list(levels_w) if levels_w is not None else [min(2, c + 1)] * self.dim_w
        sc = {(i, j): (0,) * self.dim_v + tuple(w) for (i, j), w in self.beta.items()}
        return from_levels(self.p, c, n, sc, lv + lw, labels)

    def __eq__(self, other) -> bool:
        return (isinstance(other, BilinearStruct) and self.p == other.p
                and self.dim_v == other.dim_v and self.dim_w == other.dim_w
                and self.beta == other.beta)


def bilinear_isomorphism(B1: BilinearStruct, B2: BilinearStruct, fV: Sequence[Sequence[int]],
                         fW: Sequence[Sequence[int]]) -> bool:
    """Whether the linear maps (fV, fW), given as basis images, form an isomorphism B1 -> B2."""
    p = B1.p
    if (B1.dim_v, B1.dim_w) != (B2.dim_v, B2.dim_w):
        return False
    if gfp.rank(fV, p) != B1.dim_v or gfp.rank(fW, p) != B1.dim_w:
        return False
    for i in range(B1.dim_v):
        for j in range(i + 1, B1.dim_v):
            lhs = gfp.lincomb(B1.basis_value(i, j), fW, B1.dim_w, p) if B1.dim_w else ()
            if lhs != B2.form(fV[i], fV[j]):
                return False
    return True


def bilinear_of_lla(L: Lla, P: Sequence[Sequence[int]] | None = None) -> tuple[BilinearStruct, Mat, Mat]:
    """(L/P, P, bracket) read straight off the structure constants.

    Returns the structure together with the representatives of V's basis and
    the basis of P (defaults to P_2).
    """
    p = L.p
    P = gfp.span(P if P is not None else L.P(2), p)
    reps = gfp.complement_basis(P, L.dim, p)
    beta = {}
    for s in range(len(reps)):
        for t in range(s + 1, len(reps)):
            w = L.bracket(reps[s], reps[t])
            co = gfp.coords(P, w, p) if P else ()
            if co is None:
                raise Nil2Error("bracket of representatives leaves P")
            if any(co):
                beta[(s, t)] = co
    return BilinearStruct(p, len(reps), len(P), beta), reps, P


# -- the group on V x W -----------------------------------------------------------------------

class Nil2Group:
    """V x W with (x, w)(y, w') = (x + y, w + w' + sum_{i<j} r_i s_j beta(b_j, b_i)).

    Elements are flat tuples (v coordinates, then w coordinates); r and s are
    the coordinates of x and y in the chosen basis ``bbar`` of V.
    """

    def __init__(self, B: BilinearStruct, bbar: Sequence[Sequence[int]] | None = None):
        self.B = B
        self.p = B.p
        dv = B.dim_v
        self.bbar = [tuple(r) for r in (bbar if bbar is not None else gfp.identity(dv))]
        if len(self.bbar) != dv or gfp.rank(self.bbar, self.p) != dv:
            raise Nil2Error("bbar must be a basis of V")
        self.dim = dv + B.dim_w
        # c[i][j] = beta(b_j, b_i), used for i < j
        self._corr = [[B.form(self.bbar[j], self.bbar[i]) for j in range(dv)] for i in range(dv)]
        self.identity: Vec = gfp.zero(self.dim)

    def split(self, g: Sequence[int]) -> tuple[Vec, Vec]:
        dv = self.B.dim_v
        return tuple(g[:dv]), tuple(g[dv:])

    def _r(self, x: Sequence[int]) -> Vec:
        if not self.bbar:
            return ()
        return gfp.coords(self.bbar, x, self.p)

    def _correction(self, r: Sequence[int], s: Sequence[int]) -> list[int]:
        out = [0] * self.B.dim_w
        dv = self.B.dim_v
        for i in range(dv):
            if not r[i]:
                continue
            for j in range(i + 1, dv):
                if s[j]:
                    k = r[i] * s[j]
                    for t, x in enumerate(self._corr[i][j]):
                        out[t] += k * x
        return out

    def mul(self, g: Sequence[int], h: Sequence[int]) -> Vec:
        p = self.p
        x, w = self.split(g)
        y, w2 = self.split(h)
        corr = self._correction(self._r(x), self._r(y))
        v = tuple((a + b) % p for a, b in zip(x, y))
        return v + tuple((a + b + e) % p for a, b, e in zip(w, w2, corr))

    def mul_many(self, U, V):
        """Row-wise products of two (N, dim) integer arrays."""
        p, dv = self.p, self.B.dim_v
        U, V = np.asarray(U, dtype=np.int64), np.asarray(V, dtype=np.int64)
        out = (U + V) % p
        if dv and self.B.dim_w:
            binv = np.array([gfp.coords(self.bbar, e, p) for e in gfp.identity(dv)], dtype=np.int64)
            R, S = (U[:, :dv] @ binv) % p, (V[:, :dv] @ binv) % p
            upper = np.zeros((dv, dv, self.B.dim_w), dtype=np.int64)
            for i in range(dv):
                for j in range(i + 1, dv):
                    upper[i, j] = self._corr[i][j]
            corr = np.einsum("ni,nj,ijw->nw", R, S, upper)
            out[:, dv:] = (out[:, dv:] + corr) % p
        return out

    def inv(self, g: Sequence[int]) -> Vec:
        p = self.p
        x, w = self.split(g)
        r = self._r(x)
        corr = self._correction(r, r)
        return tuple((-a) % p for a in x) + tuple((-a + e) % p for a, e in zip(w, corr))

    def commutator(self, g, h) -> Vec:
        """g^-1 h^-1 g h."""
        return self.mul(self.mul(self.inv(g), self.inv(h)), self.mul(g, h))

    def pow(self, g, e: int) -> Vec:
        out = self.identity
        for _ in range(e % self.p):
            out = self.mul(out, g)
        return out

    def elements(self):
        import itertools
        for t in itertools.product(range(self.p), repeat=self.dim):
            yield tuple(t)

    def generators(self) -> Mat:
        return gfp.identity(self.dim)


def group_from_bilinear(B: BilinearStruct, bbar: Sequence[Sequence[int]] | None = None) -> Nil2Group:
    return Nil2Group(B, bbar)


# -- the functor F ----------------------------------------------------------------------------

@dataclass
class FImage:
    """F(G) together with the data used to read it off."""

    bilinear: BilinearStruct
    reps: Mat          # representatives in G of V's basis
    P: Mat             # basis of P (as a subspace of G's underlying vectors)


def _group_gens(G) -> Mat:
    return gfp.identity(G.dim)


def center_of(G) -> Mat:
    """Basis of the center of a class-2 group whose commutator is bilinear in coordinates."""
    p, n = G.p, G.dim
    gens = _group_gens(G)
    one = G.identity
    # z -> (comm(z, g_k))_k is linear here, so the center is a kernel
    cols = []
    for t in range(n):
        e = gfp.unit(t, n)
        row = []
        for g in gens:
            row.extend(gfp.vsub(G.commutator(e, g), one, p))
        cols.append(row)
    m = gfp.transpose(cols, n)
    Z = gfp.nullspace(m, n, p)
    for z in Z:
        for g in gens:
            if tuple(G.commutator(z, g)) != tuple(one):
                raise Nil2Error("commutator is not bilinear in coordinates; group is not of class 2")
    return gfp.span(Z, p)


def functor_F(G, P: Sequence[Sequence[int]] | None = None) -> FImage:
    """(G/P, P, commutator) for a class-2 group G and central P ⊇ [G, G].

    P defaults to {0} x W for a Nil2Group and to the center otherwise.
    """
    p, n = G.p, G.dim
    if P is None:
        if isinstance(G, Nil2Group):
            P = [gfp.unit(G.B.dim_v + k, n) for k in range(G.B.dim_w)]
        else:
            P = center_of(G)
    P = gfp.span(P, p)
    one = gfp.zero(n)
    gens = _group_gens(G)
    for z in P:
        for g in gens:
            if tuple(G.commutator(z, g)) != one:
                raise Nil2Error("P is not central")
    for a in P:
        for b in P:
            if not gfp.in_span(P, G.mul(a, b), p):
                raise Nil2Error("P is not a subgroup")
    for i, g in enumerate(gens):
        for h in gens[i + 1:]:
            if not gfp.in_span(P, G.commutator(g, h), p):
                raise Nil2Error("P does not contain the commutator subgroup")
    reps = gfp.complement_basis(P, n, p)
    beta = {}
    for s in range(len(reps)):
        for t in range(s + 1, len(reps)):
            co = gfp.coords(P, G.commutator(reps[s], reps[t]), p) if P else ()
            if co is None:
                raise Nil2Error("commutator of representatives leaves P")
            if any(co):
                beta[(s, t)] = co
    return FImage(BilinearStruct(p, len(reps), len(P), beta), reps, P)


def quotient_coords(F: FImage, g: Sequence[int], p: int) -> Vec:
    """Coordinates of the coset gP on the representatives."""
    rows = list(F.reps) + list(F.P)
    co = gfp.coords(rows, g, p)
    return tuple(co[: len(F.reps)])


def decompose(G, F: FImage, g: Sequence[int]) -> tuple[Vec, Vec]:
    """g = (prod_i c_i^{r_i}) * w with w in P; returns (r, coordinates of w)."""
    p = G.p
    r = quotient_coords(F, g, p)
    head = G.identity
    for ci, ri in zip(F.reps, r):
        for _ in range(ri):
            head = G.mul(head, ci)
    w = G.mul(G.inv(head), g)
    co = gfp.coords(F.P, w, p) if F.P else ()
    if co is None:
        raise Nil2Error("remainder is not in P")
    return r, co


def standard_iso(G, P: Sequence[Sequence[int]] | None = None
                 ) -> tuple[Nil2Group, Callable[[Sequence[int]], Vec]]:
    """The group G(b, F(G)) and the generator-defined map G -> G(b, F(G)).

    c_i goes to (b_i, 0) and w in P goes to (0, -w): with the displayed
    multiplication the commutator of (b_i, 0) and (b_j, 0) is -beta(b_i, b_j),
    so P has to be negated for the map to respect commutators.
    """
    F = functor_F(G, P)
    H = group_from_bilinear(F.bilinear)
    dv, dw = F.bilinear.dim_v, F.bilinear.dim_w
    p = G.p

    def phi(g):
        r, w = decompose(G, F, g)
        out = H.identity
        for i, ri in enumerate(r):
            b = gfp.unit(i, dv) + gfp.zero(dw)
            for _ in range(ri):
                out = H.mul(out, b)
        return H.mul(out, gfp.zero(dv) + tuple((-x) % p for x in w))

    return H, phi


def is_hom_on(G, H, phi, pairs: Iterable[tuple[Sequence[int], Sequence[int]]]) -> bool:
    return all(tuple(phi(G.mul(x, y))) == tuple(H.mul(phi(x), phi(y))) for x, y in pairs)


def group_axioms(G, elements: Sequence[Sequence[int]] | None = None) -> list[str]:
    """Failures of associativity, inverses, identity and exponent p on the given elements."""
    els = list(elements) if elements is not None else list(G.elements())
    one = G.identity
    bad: list[str] = []
    for x in els:
        if G.mul(x, one) != tuple(x) or G.mul(one, x) != tuple(x):
            bad.append(f"identity fails at {x}")
        if G.mul(x, G.inv(x)) != one:
            bad.append(f"inverse fails at {x}")
        y = one
        for _ in range(G.p):
            y = G.mul(y, x)
        if y != one:
            bad.append(f"x^p != 1 at {x}")
    if hasattr(G, "mul_many") and els:
        return bad + _associativity_many(G, els)
    for x in els:
        for y in els:
            xy = G.mul(x, y)
            for z in els:
                if G.mul(xy, z) != G.mul(x, G.mul(y, z)):
                    bad.append(f"associativity fails at {x},{y},{z}")
                    return bad
    return bad


def _associativity_many(G, els) -> list[str]:
    E = np.array(els, dtype=np.int64).reshape(len(els), -1)
    M = len(E)
    Y = np.repeat(E, M, axis=0)
    Z = np.tile(E, (M, 1))
    YZ = G.mul_many(Y, Z)
    for x in E:
        X = np.broadcast_to(x, Y.shape)
        diff = (G.mul_many(G.mul_many(X, Y), Z) != G.mul_many(X, YZ)).any(axis=1)
        if diff.any():
            k = int(np.argmax(diff))
            return [f"associativity fails at {tuple(x)},{tuple(Y[k])},{tuple(Z[k])}"]
    return []


# -- substructures and independence -----------------------------------------------------------

def acl_bilinear(B: BilinearStruct, V_part: Iterable[Sequence[int]], W_part: Iterable[Sequence[int]]
                 ) -> tuple[Mat, Mat]:
    """span(V_part) together with span(W_part ∪ beta(span(V_part)^2))."""
    p = B.p
    Vs = gfp.span(list(V_part), p)
    extra = [B.form(u, v) for i, u in enumerate(Vs) for v in Vs[i + 1:]]
    Ws = gfp.span(list(W_part) + extra, p)
    return Vs, Ws


def generated(G, X: Iterable[Sequence[int]]) -> frozenset[Vec]:
    """The subgroup generated by X, by breadth-first closure (finite exponent-p groups)."""
    gens = [tuple(x) for x in X]
    one = tuple(G.identity)
    seen = {one}
    queue = deque([one])
    while queue:
        g = queue.popleft()
        for x in gens:
            h = tuple(G.mul(g, x))
            if h not in seen:
                seen.add(h)
                queue.append(h)
    return frozenset(seen)


def indep_star(G, A: Sequence[Sequence[int]], B: Sequence[Sequence[int]],
               C: Sequence[Sequence[int]]) -> bool:
    """⟨AC⟩ ∩ ⟨BC⟩ = ⟨C⟩ and the same modulo the center."""
    A, B, C = ([tuple(x) for x in S] for S in (A, B, C))
    Z = center_of(G)
    hA, hB, hC = generated(G, A + C), generated(G, B + C), generated(G, C)
    if hA & hB != hC:
        return False
    zA, zB, zC = generated(G, A + C + Z), generated(G, B + C + Z), generated(G, C + Z)
    return zA & zB == zC


def indep_alg_images(G, A: Sequence[Sequence[int]], B: Sequence[Sequence[int]],
                     C: Sequence[Sequence[int]]) -> bool:
    """Algebraic independence of F⟨AC⟩ and F⟨BC⟩ over F⟨C⟩, with P the center."""
    p = G.p
    A, B, C = ([tuple(x) for x in S] for S in (A, B, C))
    F = functor_F(G, center_of(G))
    Zrows = F.P
    Zset = set(generated(G, Zrows))

    def image(X):
        H = generated(G, X)
        V = [quotient_coords(F, x, p) for x in X]
        W = [gfp.coords(Zrows, h, p) for h in H if h in Zset] if Zrows else []
        return acl_bilinear(F.bilinear, V, W)

    VA, WA = image(A + C)
    VB, WB = image(B + C)
    VC, WC = image(C)
    return gfp.intersect_spans(VA, VB, p) == VC and gfp.intersect_spans(WA, WB, p) == WC
