"""Finite-dimensional Lazard Lie algebras over F_p.

An :class:`Lla` is a Lie algebra with a descending flag P_1 ⊇ ... ⊇ P_{c+1}
satisfying [P_i, P_j] ⊆ P_{i+j}.  Subalgebras of a fixed algebra are passed
around as subspaces (rref bases); linear maps are lists of basis images, so
``f(x) = sum_i x_i f[i]``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import gfp
from .gfp import Mat, Vec


class LlaError(ValueError):
    pass


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.detail}"


class Lla:
    """Structure constants for i < j plus a flag of rref subspaces."""

    def __init__(self, p: int, c: int, dim: int, sc: Mapping[tuple[int, int], Sequence[int]],
                 flag: Sequence[Iterable[Sequence[int]]] | None = None,
                 labels: Sequence[str] | None = None):
        self.p = gfp.check_modulus(p)
        if c < 0:
            raise LlaError("class bound must be >= 0")
        self.c = c
        self.dim = dim
        table: dict[tuple[int, int], Vec] = {}
        for (i, j), v in sc.items():
            if not (0 <= i < dim and 0 <= j < dim):
                raise LlaError(f"bracket index ({i},{j}) out of range")
            if len(v) != dim:
                raise LlaError(f"bracket ({i},{j}) has length {len(v)}, expected {dim}")
            v = tuple(x % p for x in v)
            if i == j:
                if any(v):
                    raise LlaError(f"[e{i},e{i}] must vanish")
                continue
            if i > j:
                i, j, v = j, i, gfp.vscale(-1, v, p)
            if (i, j) in table and table[(i, j)] != v:
                raise LlaError(f"bracket ({i},{j}) given twice with different values")
            if any(v):
                table[(i, j)] = v
        self.sc = table
        if flag is None:
            # lower central series, padded to length c+1
            flag = _lower_central(self, p, dim, c)
        flag = [gfp.span(list(P), p) for P in flag]
        if len(flag) != c + 1:
            raise LlaError(f"flag must have c+1={c + 1} terms, got {len(flag)}")
        self.flag: list[Mat] = flag
        self.labels = list(labels) if labels is not None else [f"e{k + 1}" for k in range(dim)]
        if len(self.labels) != dim:
            raise LlaError("one label per basis vector")
        self._check_flag_shape()

    def _check_flag_shape(self) -> None:
        p = self.p
        if len(self.flag[0]) != self.dim:
            raise LlaError("P_1 must be the whole space")
        if self.flag[-1]:
            raise LlaError("P_{c+1} must be zero")
        for k in range(self.c):
            if not gfp.contains(self.flag[k], self.flag[k + 1], p):
                raise LlaError(f"flag is not descending at P_{k + 2}")

    # -- arithmetic ----------------------------------------------------------

    @cached_property
    def _pairs(self) -> list[tuple[int, int, list[tuple[int, int]]]]:
        return [(i, j, [(t, x) for t, x in enumerate(v) if x]) for (i, j), v in self.sc.items()]

    @cached_property
    def tensor(self):
        """Dense array T with T[i, j] = [e_i, e_j]."""
        n = self.dim
        T = np.zeros((n, n, n), dtype=np.int64)
        for (i, j), v in self.sc.items():
            T[i, j] = v
            T[j, i] = [(-x) % self.p for x in v]
        return T

    def bracket(self, u: Sequence[int], v: Sequence[int]) -> Vec:
        out = [0] * self.dim
        for i, j, w in self._pairs:
            k = u[i] * v[j] - u[j] * v[i]
            if k:
                for t, x in w:
                    out[t] += k * x
        p = self.p
        return tuple(x % p for x in out)

    def bracket_many(self, U, V):
        """Row-wise brackets of two (N, dim) integer arrays."""
        N, n = U.shape
        p = self.p
        if n == 0:
            return np.zeros((N, 0), dtype=np.int64)
        # float64 products are exact here: every partial sum stays below n * p**2 < 2**53
        left = np.fmod(np.asarray(U, dtype=np.float64) % p @ self._tensor_f, p).reshape(N, n, n)
        out = np.matmul((np.asarray(V, dtype=np.float64) % p)[:, None, :], left)[:, 0, :]
        return np.fmod(out, p).astype(np.int64)

    @cached_property
    def _tensor_f(self):
        n = self.dim
        return self.tensor.reshape(n, n * n).astype(np.float64)

    def products(self, U: Sequence[Sequence[int]], W: Sequence[Sequence[int]]) -> np.ndarray:
        """All brackets [u, w] for u in U, w in W, as rows of an array."""
        if not U or not W or not self.dim:
            return np.zeros((len(U) * len(W), self.dim), dtype=np.int64)
        Ua = np.array(U, dtype=np.int64)
        Wa = np.array(W, dtype=np.int64)
        n = self.dim
        left = (Ua @ self.tensor.reshape(n, n * n)).reshape(len(U), n, n) % self.p
        return np.matmul(Wa, left).reshape(-1, n) % self.p

    def bracket_basis(self, i: int, j: int) -> Vec:
        if i == j:
            return gfp.zero(self.dim)
        if i < j:
            return self.sc.get((i, j), gfp.zero(self.dim))
        return gfp.vscale(-1, self.sc.get((j, i), gfp.zero(self.dim)), self.p)

    def ad(self, u: Sequence[int]) -> list[Vec]:
        """ad(u) as a list of images of the basis vectors."""
        return [self.bracket(u, gfp.unit(j, self.dim)) for j in range(self.dim)]

    def basis(self) -> list[Vec]:
        return gfp.identity(self.dim)

    def level(self, v: Sequence[int]) -> int:
        """Largest i with v in P_i; the zero vector has level c+1."""
        lev = 1
        for i in range(1, self.c + 1):
            if gfp.in_span(self.flag[i], v, self.p):
                lev = i + 1
            else:
                break
        return lev

    def P(self, i: int) -> Mat:
        """P_i, saturating at c+1."""
        return self.flag[min(max(i, 1), self.c + 1) - 1]

    def flag_dims(self) -> tuple[int, ...]:
        return tuple(len(P) for P in self.flag)

    def sat(self, i: int) -> int:
        return min(i, self.c + 1)

    def is_abelian(self) -> bool:
        return not self.sc

    def __eq__(self, other) -> bool:
        return (isinstance(other, Lla) and self.p == other.p and self.c == other.c
                and self.dim == other.dim and self.sc == other.sc and self.flag == other.flag)

    def __hash__(self):
        return hash((self.p, self.c, self.dim, tuple(sorted(self.sc.items())),
                     tuple(tuple(P) for P in self.flag)))

    def __repr__(self) -> str:
        return f"Lla(p={self.p}, c={self.c}, dim={self.dim}, flag={self.flag_dims()})"

    def with_class(self, c: int) -> "Lla":
        """Same algebra regarded with another class bound (flag truncated or padded)."""
        flag = [self.P(i) for i in range(1, c + 1)] + [[]]
        return Lla(self.p, c, self.dim, self.sc, flag, self.labels)


def _lower_central(L: Lla, p: int, n: int, c: int) -> list[Mat]:
    terms = [gfp.identity(n)]
    for _ in range(c):
        prev = terms[-1]
        gens = [L.bracket(u, gfp.unit(j, n)) for u in prev for j in range(n)]
        terms.append(gfp.span(gens, p))
    if terms[-1]:
        raise LlaError(f"algebra is not nilpotent of class <= {c}")
    return terms


def abelian(p: int, c: int, dim: int, levels: Sequence[int] | None = None) -> Lla:
    """Abelian algebra whose k-th basis vector has the given level."""
    levels = list(levels) if levels is not None else [1] * dim
    flag = [[gfp.unit(k, dim) for k in range(dim) if levels[k] >= i] for i in range(1, c + 2)]
    return Lla(p, c, dim, {}, flag)


def from_levels(p: int, c: int, dim: int, sc, levels: Sequence[int], labels=None) -> Lla:
    """Algebra whose flag is spanned by basis vectors of level >= i."""
    flag = [[gfp.unit(k, dim) for k in range(dim) if levels[k] >= i] for i in range(1, c + 2)]
    return Lla(p, c, dim, sc, flag, labels)


# -- validation ----------------------------------------------------------------

def validate(L: Lla) -> Violation | None:
    p, n = L.p, L.dim
    T = L.tensor
    for i in range(n):
        # J[j, k] = [e_i,[e_j,e_k]] + [e_j,[e_k,e_i]] + [e_k,[e_i,e_j]]
        J = T @ T[i]
        J -= np.matmul(T[i], T)
        J += np.tensordot(T[i], T, axes=([1], [1]))
        bad = np.argwhere((J % p).any(axis=2))
        if bad.size:
            trip = sorted({i, *(int(x) for x in bad[0])})
            names = ", ".join(L.labels[t] for t in trip)
            return Violation("jacobi", f"basis triple ({names})")
    if len(L.flag[0]) != n:
        return Violation("flag", "P_1 is not the whole space")
    if L.flag[-1]:
        return Violation("flag", "P_{c+1} is not zero")
    for i in range(1, L.c + 1):
        if not gfp.contains(L.P(i), L.P(i + 1), p):
            return Violation("flag", f"P_{i + 1} not contained in P_{i}")
    for i in range(1, L.c + 1):
        for j in range(i, L.c + 1):
            if not gfp.contains(L.P(i + j), _rows(L.products(L.P(i), L.P(j))), p):
                return Violation("flag", f"[P_{i},P_{j}] not contained in P_{L.sat(i + j)}")
    return None


# -- homomorphisms -------------------------------------------------------------

@dataclass
class LlaHom:
    source: Lla
    target: Lla
    images: list[Vec]

    def __call__(self, v: Sequence[int]) -> Vec:
        return gfp.lincomb(v, self.images, self.target.dim, self.target.p)

    def apply_all(self, vs: Iterable[Sequence[int]]) -> list[Vec]:
        return [self(v) for v in vs]

    def compose(self, first: "LlaHom") -> "LlaHom":
        """self ∘ first."""
        return LlaHom(first.source, self.target, [self(v) for v in first.images])

    def image(self) -> Mat:
        return gfp.span(self.images, self.target.p)

    def rank(self) -> int:
        return len(self.image())

    def is_injective(self) -> bool:
        return self.rank() == self.source.dim

    def is_bijective(self) -> bool:
        return self.source.dim == self.target.dim and self.is_injective()

    def restrict(self, sub_images: Sequence[Sequence[int]], sub: Lla) -> "LlaHom":
        """Precompose with the inclusion of ``sub`` given by ``sub_images``."""
        return LlaHom(sub, self.target, [self(v) for v in sub_images])


def linear_map(source: Lla, target: Lla, images: Sequence[Sequence[int]]) -> LlaHom:
    return LlaHom(source, target, [tuple(x % target.p for x in v) for v in images])


def hom_check(images: Sequence[Sequence[int]] | LlaHom, A: Lla | None = None,
              B: Lla | None = None) -> LlaHom | Violation:
    """Certify that the basis images define an Lla homomorphism A -> B."""
    if isinstance(images, LlaHom):
        f = images
        A, B = f.source, f.target
    else:
        f = linear_map(A, B, images)
    p = B.p
    if len(f.images) != A.dim or any(len(v) != B.dim for v in f.images):
        return Violation("shape", "image list does not match the dimensions")
    if A.dim:
        M = np.array(f.images, dtype=np.int64).reshape(A.dim, B.dim)
        lhs = (A.tensor.reshape(-1, A.dim) @ M) % p
        rhs = B.products(f.images, f.images)
        bad = np.argwhere((lhs != rhs).any(axis=1))
        if bad.size:
            i, j = sorted(divmod(int(bad[0][0]), A.dim))
            return Violation("bracket", f"basis pair ({i},{j})")
    for i in range(1, min(A.c, B.c) + 2):
        if not gfp.contains(B.P(i), [f(v) for v in A.P(i)], p):
            return Violation("flag", f"image of P_{i} leaves P_{i}")
    if A.c > B.c:
        for v in A.P(B.c + 1):
            if any(f(v)):
                return Violation("flag", f"image of P_{B.c + 1} is nonzero")
    return f


def identity_hom(L: Lla) -> LlaHom:
    return LlaHom(L, L, L.basis())


# -- substructures -------------------------------------------------------------

def closure(L: Lla, gens: Iterable[Sequence[int]]) -> Mat:
    """Subalgebra generated by gens, as an rref basis."""
    p = L.p
    basis = gfp.span(list(gens), p)
    frontier = list(basis)
    while frontier:
        grown = gfp.span(basis + _rows(L.products(frontier, basis)), p)
        if len(grown) == len(basis):
            break
        # brackets against new directions are all that can still be missing
        frontier = gfp.complement_in(grown, basis, p)
        basis = grown
    return basis


def ideal_closure(L: Lla, gens: Iterable[Sequence[int]]) -> Mat:
    p = L.p
    basis = gfp.span(list(gens), p)
    units = L.basis()
    frontier = list(basis)
    while frontier:
        grown = gfp.span(basis + _rows(L.products(frontier, units)), p)
        if len(grown) == len(basis):
            break
        frontier = gfp.complement_in(grown, basis, p)
        basis = grown
    return basis


def _rows(a: np.ndarray) -> list[Vec]:
    return [tuple(r) for r in a.tolist()]


def is_subalgebra(L: Lla, S: Sequence[Sequence[int]]) -> bool:
    S = gfp.span(S, L.p)
    return gfp.contains(S, _rows(L.products(S, S)), L.p)


def is_ideal_in(L: Lla, I: Sequence[Sequence[int]], within: Sequence[Sequence[int]] | None = None) -> bool:
    """Whether I is an ideal of the subalgebra ``within`` (default: all of L)."""
    p = L.p
    I = gfp.span(I, p)
    W = gfp.span(within, p) if within is not None else L.basis()
    if not gfp.contains(W, I, p):
        return False
    return gfp.contains(I, _rows(L.products(I, W)), p)


def sub_flag(L: Lla, S: Sequence[Sequence[int]]) -> list[Mat]:
    """Induced flag P_i(S) = S ∩ P_i(L)."""
    return [gfp.intersect_spans(S, P, L.p) for P in L.flag]


def sub_lla(L: Lla, S: Sequence[Sequence[int]], labels: Sequence[str] | None = None
            ) -> tuple[Lla, LlaHom]:
    """The subalgebra with basis S (assumed closed) and its inclusion into L."""
    p = L.p
    S = [tuple(v) for v in S]
    m = len(S)

    def co(v):
        if m == 0:
            return ()
        x = gfp.coords(S, v, p)
        if x is None:
            raise LlaError("subspace is not closed under the bracket")
        return x

    sc = {}
    for i in range(m):
        for j in range(i + 1, m):
            w = L.bracket(S[i], S[j])
            if any(w):
                sc[(i, j)] = co(w)
    flag = [[co(v) for v in P] for P in sub_flag(L, S)]
    if labels is None:
        labels = [_vec_label(L, v) for v in S]
    sub = Lla(p, L.c, m, sc, flag, labels)
    return sub, LlaHom(sub, L, S)


def _vec_label(L: Lla, v: Sequence[int]) -> str:
    parts = []
    for k, x in enumerate(v):
        if x:
            parts.append(L.labels[k] if x == 1 else f"{x}*{L.labels[k]}")
    return "+".join(parts) if parts else "0"


def subalgebra(L: Lla, gens: Iterable[Sequence[int]]) -> tuple[Lla, LlaHom]:
    return sub_lla(L, closure(L, gens))


def quotient(L: Lla, I: Sequence[Sequence[int]]) -> tuple[Lla, LlaHom]:
    p, n = L.p, L.dim
    I, piv = gfp.rref(list(I), p)
    if not is_ideal_in(L, I):
        raise LlaError("quotient by a subspace that is not an ideal")
    keep = [k for k in range(n) if k not in set(piv)]

    def proj(v):
        w = gfp.reduce_vec(I, piv, v, p)
        return tuple(w[k] for k in keep)

    m = len(keep)
    sc = {}
    for a in range(m):
        for b in range(a + 1, m):
            w = proj(L.bracket_basis(keep[a], keep[b]))
            if any(w):
                sc[(a, b)] = w
    flag = [[proj(v) for v in P] for P in L.flag]
    Q = Lla(p, L.c, m, sc, flag, [L.labels[k] for k in keep])
    return Q, LlaHom(L, Q, [proj(e) for e in L.basis()])


def rebase(L: Lla, rows: Sequence[Sequence[int]], labels: Sequence[str] | None = None
           ) -> tuple[Lla, LlaHom]:
    """The same algebra written in the basis ``rows``; returns it with the map back to L."""
    p = L.p
    rows = [tuple(x % p for x in r) for r in rows]
    if len(rows) != L.dim or gfp.rank(rows, p) != L.dim:
        raise LlaError("rebase needs a basis of the whole space")

    def co(v):
        return gfp.coords(rows, v, p)

    sc = {}
    for i in range(L.dim):
        for j in range(i + 1, L.dim):
            w = L.bracket(rows[i], rows[j])
            if any(w):
                sc[(i, j)] = co(w)
    flag = [[co(v) for v in P] for P in L.flag]
    if labels is None:
        labels = [_vec_label(L, v) for v in rows]
    M = Lla(p, L.c, L.dim, sc, flag, labels)
    return M, LlaHom(M, L, rows)


# -- levels, ranks, Malcev bases -------------------------------------------------

def level(L: Lla, v: Sequence[int]) -> int:
    return L.level(v)


def _whole(L: Lla, A) -> Mat:
    return L.basis() if A is None else gfp.span(A, L.p)


def level_over(L: Lla, B: Sequence[Sequence[int]], A: Sequence[Sequence[int]] | None = None) -> int:
    """Largest i with A = span(B ∪ P_i(A)); A defaults to all of L."""
    p = L.p
    A = _whole(L, A)
    best = 1
    for i in range(1, L.c + 2):
        PiA = gfp.intersect_spans(A, L.P(i), p)
        if gfp.rank(list(B) + PiA, p) == len(A):
            best = i
        else:
            break
    return best


@dataclass(frozen=True, order=False)
class Rank:
    level: int
    count: int

    def precedes(self, other: "Rank") -> bool:
        """Strict order: higher level is smaller; equal levels compare counts."""
        return self.level > other.level or (self.level == other.level and self.count < other.count)

    def __iter__(self):
        return iter((self.level, self.count))


def rank(L: Lla, B: Sequence[Sequence[int]], A: Sequence[Sequence[int]] | None = None) -> Rank:
    p = L.p
    A = _whole(L, A)
    nu = level_over(L, B, A)
    if nu == L.c + 1:
        return Rank(nu, 0)
    hi = gfp.rank(list(B) + gfp.intersect_spans(A, L.P(nu), p), p)
    lo = gfp.rank(list(B) + gfp.intersect_spans(A, L.P(nu + 1), p), p)
    return Rank(nu, hi - lo)


def malcev_basis(L: Lla, B: Sequence[Sequence[int]], A: Sequence[Sequence[int]] | None = None
                 ) -> list[Vec]:
    """Ordered Malcev basis of A over B, highest levels first."""
    p = L.p
    A = _whole(L, A)
    cur, piv = gfp.rref(list(B), p)
    out: list[Vec] = []
    for i in range(L.c, 0, -1):
        for v in gfp.intersect_spans(A, L.P(i), p):
            if any(gfp.reduce_vec(cur, piv, v, p)):
                out.append(v)
                cur, piv = gfp.rref(cur + [v], p)
    return out


def is_malcev(L: Lla, tup: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> bool:
    p = L.p
    B = gfp.span(B, p)
    tup = [tuple(v) for v in tup]
    if gfp.rank(B + tup, p) != len(B) + len(tup):
        return False
    gen = closure(L, B + tup)
    levels = [L.level(v) for v in tup]
    for i in range(1, L.c + 1):
        lhs = gfp.span(B + gfp.intersect_spans(gen, L.P(i), p), p)
        rhs = gfp.span(B + [v for v, l in zip(tup, levels) if l >= i], p)
        if lhs != rhs:
            return False
    return True


def basic_generator(L: Lla, C: Sequence[Sequence[int]], A: Sequence[Sequence[int]] | None = None
                    ) -> Vec | None:
    """A vector of maximal level spanning A over C, or None when A = C.

    Scans P_c(A) down to P_1(A) and returns the first rref basis vector
    outside C.
    """
    p = L.p
    A = _whole(L, A)
    C, piv = gfp.rref(list(C), p)
    if len(C) == len(A):
        return None
    if len(A) != len(C) + 1:
        raise LlaError("extension is not one-dimensional over the base")
    for i in range(L.c, 0, -1):
        for v in gfp.intersect_spans(A, L.P(i), p):
            if any(gfp.reduce_vec(C, piv, v, p)):
                return v
    raise AssertionError("unreachable: P_1(A) = A")


# -- derivations -----------------------------------------------------------------

def _annihilator(S: Mat, n: int, p: int) -> Mat:
    """Functionals (as vectors) vanishing on span S."""
    return gfp.nullspace(S, n, p) if S else gfp.identity(n)


def map_commutator(p: int, d: Sequence[Sequence[int]], e: Sequence[Sequence[int]]) -> list[Vec]:
    """d∘e - e∘d for maps given as lists of basis images."""
    n = len(d)
    de = [gfp.lincomb(e[i], d, n, p) for i in range(n)]
    ed = [gfp.lincomb(d[i], e, n, p) for i in range(n)]
    return [gfp.vsub(x, y, p) for x, y in zip(de, ed)]


class DerLaz:
    """The Lazard derivations of L together with their matrices.

    ``algebra`` is an Lla of class c-1 whose k-th basis vector is the
    derivation ``maps[k]`` (a list of basis images).
    """

    def __init__(self, L: Lla):
        self.L = L
        p, n, c = L.p, L.dim, L.c
        N = n * n
        rows: list[list[int]] = []

        def var(i, k):  # coefficient of e_k in delta(e_i)
            return i * n + k

        # Leibniz: d[e_i,e_j] - [d e_i, e_j] - [e_i, d e_j] = 0
        for i in range(n):
            for j in range(i + 1, n):
                w = L.bracket_basis(i, j)
                for t in range(n):
                    row = [0] * N
                    for s, x in enumerate(w):
                        if x:
                            row[var(s, t)] += x
                    for k in range(n):
                        # [e_k, e_j]_t contributes via d e_i = sum_k x_{ik} e_k
                        y = L.bracket_basis(k, j)[t]
                        if y:
                            row[var(i, k)] -= y
                        z = L.bracket_basis(i, k)[t]
                        if z:
                            row[var(j, k)] -= z
                    if any(r % p for r in row):
                        rows.append([r % p for r in row])
        rows += self._displacement_rows(1)
        self.space = gfp.nullspace(rows, N, p) if rows else gfp.identity(N)
        self.maps = [self._to_map(v) for v in self.space]
        m = len(self.space)
        self._tr = gfp.transpose(self.space) if m else []
        sc = {}
        for a in range(m):
            for b in range(a + 1, m):
                w = self.coords(self.commutator(self.maps[a], self.maps[b]))
                if any(w):
                    sc[(a, b)] = w
        cc = max(c - 1, 0)
        flag = [self._displacement_sub(i) for i in range(1, cc + 1)] + [[]]
        self.algebra = Lla(p, cc, m, sc, flag, [f"d{k + 1}" for k in range(m)])

    def _displacement_rows(self, shift: int) -> list[list[int]]:
        L = self.L
        p, n = L.p, L.dim
        rows = []
        for j in range(1, L.c + 1):
            ann = _annihilator(L.P(j + shift), n, p)
            for v in L.P(j):
                for phi in ann:
                    row = [0] * (n * n)
                    for s, x in enumerate(v):
                        if x:
                            for t, y in enumerate(phi):
                                if y:
                                    row[s * n + t] += x * y
                    if any(r % p for r in row):
                        rows.append([r % p for r in row])
        return rows

    def _displacement_sub(self, i: int) -> Mat:
        """Coordinates (in the derivation basis) of D_i."""
        p = self.L.p
        m = len(self.space)
        if m == 0:
            return []
        rows = self._displacement_rows(i)
        if not rows:
            return gfp.identity(m)
        # rows act on the N-dim space; pull back along the basis
        pulled = [tuple(sum(r[k] * v[k] for k in range(len(r))) % p for v in self.space) for r in rows]
        return gfp.nullspace(pulled, m, p)

    def _to_map(self, v: Sequence[int]) -> list[Vec]:
        n = self.L.dim
        return [tuple(v[i * n:(i + 1) * n]) for i in range(n)]

    def flatten(self, d: Sequence[Sequence[int]]) -> Vec:
        return tuple(x for row in d for x in row)

    def commutator(self, d: Sequence[Sequence[int]], e: Sequence[Sequence[int]]) -> list[Vec]:
        return map_commutator(self.L.p, d, e)

    def coords(self, d: Sequence[Sequence[int]]) -> Vec:
        if not self.space:
            if any(any(r) for r in d):
                raise LlaError("map is not a Lazard derivation")
            return ()
        x = gfp.solve(self._tr, self.flatten(d), self.L.p)
        if x is None:
            raise LlaError("map is not a Lazard derivation")
        return x

    def contains(self, d: Sequence[Sequence[int]]) -> bool:
        try:
            self.coords(d)
        except LlaError:
            return False
        return True

    def map_of(self, v: Sequence[int]) -> list[Vec]:
        p, n = self.L.p, self.L.dim
        flat = gfp.lincomb(v, self.space, n * n, p)
        return self._to_map(flat)


def der_laz(L: Lla) -> DerLaz:
    return DerLaz(L)


def displacement(L: Lla, d: Sequence[Sequence[int]]) -> int:
    """Largest i (saturating at c+1) with d(P_j) ⊆ P_{i+j} for all j."""
    p = L.p
    best = 0
    if L.dim == 0:
        return L.c + 1
    D = np.array(d, dtype=np.int64).reshape(L.dim, L.dim)
    imgs = {j: _rows((np.array(L.P(j), dtype=np.int64).reshape(-1, L.dim) @ D) % p)
            for j in range(1, L.c + 1)}
    for i in range(0, L.c + 2):
        ok = all(gfp.contains(L.P(i + j), imgs[j], p) for j in range(1, L.c + 1))
        if ok:
            best = i
        else:
            break
    return min(best, L.c + 1)


def is_derivation(L: Lla, d: Sequence[Sequence[int]]) -> bool:
    p, n = L.p, L.dim
    if n == 0:
        return True
    D = np.array(d, dtype=np.int64).reshape(n, n)
    T = L.tensor
    # d[e_i, e_j] against [d e_i, e_j] + [e_i, d e_j]
    lhs = T.reshape(n * n, n) @ D
    rhs = np.tensordot(D, T, axes=([1], [0])) + np.matmul(D, T)
    return not ((lhs - rhs.reshape(n * n, n)) % p).any()


def semidirect(C: Lla, F: Lla, g: Sequence[Sequence[Sequence[int]]] | LlaHom,
               der: DerLaz | None = None) -> Lla:
    """C ⋊ F where ``g[k]`` is the derivation of C attached to F's k-th basis vector.

    ``g`` may also be an LlaHom into ``der.algebra``.  The basis of the result
    is C's basis followed by F's.
    """
    p = C.p
    if C.p != F.p or C.c != F.c:
        raise LlaError("semidirect factors must share p and c")
    n, m = C.dim, F.dim
    if isinstance(g, LlaHom):
        if der is None:
            der = der_laz(C)
        if isinstance(hom_check(g), Violation):
            raise LlaError("action is not a homomorphism into Der_Laz")
        maps = [der.map_of(v) for v in g.images]
    else:
        maps = [[tuple(x % p for x in r) for r in d] for d in g]
    if len(maps) != m:
        raise LlaError("one derivation per basis vector of F")
    _check_action(C, F, maps)
    N = n + m
    sc = {}

    def emb_c(v):
        return tuple(v) + (0,) * m

    for (i, j), w in C.sc.items():
        sc[(i, j)] = emb_c(w)
    for k in range(m):
        for i in range(n):
            # [f_k, c_i] = g(f_k)(c_i)
            w = maps[k][i]
            if any(w):
                sc[(n + k, i)] = emb_c(w)
    for (i, j), w in F.sc.items():
        sc[(n + i, n + j)] = (0,) * n + tuple(w)
    flag = []
    for i in range(1, C.c + 2):
        flag.append([emb_c(v) for v in C.P(i)] + [(0,) * n + tuple(v) for v in F.P(i)])
    return Lla(p, C.c, N, sc, flag, list(C.labels) + list(F.labels))


def _check_action(C: Lla, F: Lla, maps: Sequence[Sequence[Vec]]) -> None:
    p, n = C.p, C.dim
    for k, d in enumerate(maps):
        if not is_derivation(C, d):
            raise LlaError(f"action of basis vector {k} is not a derivation")

    def act(v):
        out = [gfp.zero(n) for _ in range(n)]
        for k, x in enumerate(v):
            if x:
                out = [gfp.axpy(x, a, b, p) for a, b in zip(maps[k], out)]
        return out

    for i in range(1, F.c + 1):
        for v in F.P(i):
            if displacement(C, act(v)) < i:
                raise LlaError(f"action of P_{i}(F) does not raise levels by {i}")
    for a in range(F.dim):
        for b in range(a + 1, F.dim):
            lhs = act(F.bracket_basis(a, b))
            rhs = map_commutator(p, maps[a], maps[b])
            if [tuple(r) for r in lhs] != rhs:
                raise LlaError(f"action does not respect the bracket on ({a},{b})")


# -- isomorphism search --------------------------------------------------------------

class SearchRefused(RuntimeError):
    """The instance exceeds the configured search ceiling."""


class _Partial:
    """A partially defined linear map, closed under brackets as it grows."""

    def __init__(self, A: Lla, B: Lla):
        self.A, self.B = A, B
        self.rows: list[Vec] = []  # echelon rows of the domain
        self.piv: list[int] = []
        self.imgs: list[Vec] = []
        self.gens: list[Vec] = []  # independent domain vectors (unreduced)
        self.gen_imgs: list[Vec] = []
        self.img_rows: list[Vec] = []
        self.img_piv: list[int] = []

    def copy(self) -> "_Partial":
        q = _Partial(self.A, self.B)
        q.rows, q.piv, q.imgs = list(self.rows), list(self.piv), list(self.imgs)
        q.gens, q.gen_imgs = list(self.gens), list(self.gen_imgs)
        q.img_rows, q.img_piv = list(self.img_rows), list(self.img_piv)
        return q

    def _reduce(self, u):
        p = self.A.p
        u = list(u)
        w = [0] * self.B.dim
        for r, c, im in zip(self.rows, self.piv, self.imgs):
            f = u[c]
            if f:
                u = [(a - f * b) % p for a, b in zip(u, r)]
                w = [(a + f * b) % p for a, b in zip(w, im)]
        return u, tuple(w)

    def value(self, u) -> Vec | None:
        rem, w = self._reduce(u)
        return w if not any(rem) else None

    def add(self, u, w, injective: bool, exact_level: bool) -> bool:
        """Add u -> w and close under brackets; False on inconsistency."""
        A, B, p = self.A, self.B, self.A.p
        queue = [(tuple(u), tuple(w))]
        while queue:
            u, w = queue.pop()
            rem, implied = self._reduce(u)
            if not any(rem):
                if tuple(implied) != tuple(w):
                    return False
                continue
            lu, lw = A.level(u), B.level(w)
            if lw < lu or (exact_level and lw != lu):
                return False
            if injective:
                r2 = gfp.reduce_vec(self.img_rows, self.img_piv, w, p)
                if not any(r2):
                    return False
                self.img_rows, self.img_piv = gfp.rref(self.img_rows + [tuple(w)], p)
            c = next(k for k, x in enumerate(rem) if x)
            iv = gfp.inv(rem[c], p)
            row = tuple(x * iv % p for x in rem)
            im = tuple((a - b) * iv % p for a, b in zip(w, implied))
            # keep echelon rows fully reduced on pivots
            for k in range(len(self.rows)):
                f = self.rows[k][c]
                if f:
                    self.rows[k] = tuple((a - f * b) % p for a, b in zip(self.rows[k], row))
                    self.imgs[k] = tuple((a - f * b) % p for a, b in zip(self.imgs[k], im))
            self.rows.append(row)
            self.piv.append(c)
            self.imgs.append(im)
            for g, gi in zip(self.gens, self.gen_imgs):
                queue.append((A.bracket(u, g), B.bracket(w, gi)))
            self.gens.append(tuple(u))
            self.gen_imgs.append(tuple(w))
        return True

    @property
    def size(self) -> int:
        return len(self.rows)

    def as_hom(self) -> LlaHom:
        return LlaHom(self.A, self.B, [self.value(e) for e in self.A.basis()])


def extend_from_generators(A: Lla, B: Lla, pairs: Iterable[tuple[Sequence[int], Sequence[int]]]
                           ) -> LlaHom | None:
    """The unique bracket-compatible linear extension of u -> w to ⟨u⟩ = A.

    Returns None if the prescription is inconsistent or does not determine
    a map on all of A.  Flag preservation is not checked here.
    """
    part = _Partial(A, B)
    for u, w in pairs:
        if not part.add(u, w, injective=False, exact_level=False):
            return None
    if part.size != A.dim:
        return None
    return part.as_hom()


def _generators_over(A: Lla, fixed: Mat) -> list[Vec]:
    """Greedy generators of A over the subalgebra generated by ``fixed``, low levels first."""
    p = A.p
    cur = closure(A, fixed)
    gens: list[Vec] = []
    for i in range(1, A.c + 1):
        layer = gfp.span(A.P(i), p)
        for v in layer:
            if A.level(v) != i:
                continue
            if gfp.in_span(cur, v, p):
                continue
            gens.append(v)
            cur = closure(A, cur + [v])
        if len(cur) == A.dim:
            break
    # vectors that are in no single layer's rref basis at exact level
    for v in A.basis():
        if not gfp.in_span(cur, v, p):
            gens.append(v)
            cur = closure(A, cur + [v])
    return gens


def _candidates(B: Lla, lev: int):
    """Vectors of B of exact level ``lev``, in order of increasing weight."""
    p = B.p
    Pl = B.P(lev)
    Pn = B.P(lev + 1)
    m = len(Pl)
    for weight in range(1, m + 1):
        for support in itertools.combinations(range(m), weight):
            for coeffs in itertools.product(range(1, p), repeat=weight):
                v = gfp.lincomb(coeffs, [Pl[k] for k in support], B.dim, p)
                if not gfp.in_span(Pn, v, p):
                    yield v


def iso_search(A: Lla, B: Lla, fixing: Iterable[tuple[Sequence[int], Sequence[int]]] | None = None,
               ceiling: int = 8) -> LlaHom | None:
    """Backtracking search for an isomorphism A -> B extending ``fixing``.

    ``fixing`` is a list of (vector of A, prescribed image in B).  Raises
    SearchRefused when the dimension exceeds ``ceiling``.
    """
    if A.dim > ceiling or B.dim > ceiling:
        raise SearchRefused(f"dimension {max(A.dim, B.dim)} exceeds search ceiling {ceiling}")
    if A.p != B.p or A.dim != B.dim or A.flag_dims() != B.flag_dims():
        return None
    if len(A.sc) == 0 and len(B.sc) != 0 or len(B.sc) == 0 and len(A.sc) != 0:
        return None
    root = _Partial(A, B)
    fixing = list(fixing or [])
    for u, w in fixing:
        if not root.add(u, w, injective=True, exact_level=True):
            return None
    gens = _generators_over(A, [tuple(u) for u, _ in fixing])
    levels = [A.level(g) for g in gens]

    def rec(k: int, part: _Partial) -> _Partial | None:
        if part.size == A.dim:
            return part
        if k == len(gens):
            return None
        if part.value(gens[k]) is not None:
            return rec(k + 1, part)
        for w in _candidates(B, levels[k]):
            trial = part.copy()
            if trial.add(gens[k], w, injective=True, exact_level=True):
                got = rec(k + 1, trial)
                if got is not None:
                    return got
        return None

    found = rec(0, root)
    if found is None:
        return None
    h = found.as_hom()
    cert = hom_check(h)
    if isinstance(cert, Violation) or not h.is_bijective():
        return None
    return h
