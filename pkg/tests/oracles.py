"""Reference computations that share no code path with the package internals.

Free Lie elements are checked inside the free associative algebra (words with
commutator brackets); BCH is recomputed as log(exp X exp Y) over the rationals;
amalgam dimensions are recomputed from a presentation.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from math import factorial


# -- free associative algebra: dict word -> coefficient ------------------------------------

def w_add(a: dict, b: dict, k=1) -> dict:
    out = dict(a)
    for w, x in b.items():
        out[w] = out.get(w, 0) + k * x
        if out[w] == 0:
            del out[w]
    return out


def w_mul(a: dict, b: dict, weights, c: int) -> dict:
    out: dict = {}
    for u, x in a.items():
        du = sum(weights[i] for i in u)
        for v, y in b.items():
            if du + sum(weights[i] for i in v) > c:
                continue
            w = u + v
            out[w] = out.get(w, 0) + x * y
    return {w: x for w, x in out.items() if x != 0}


def w_bracket(a: dict, b: dict, weights, c: int) -> dict:
    return w_add(w_mul(a, b, weights, c), w_mul(b, a, weights, c), -1)


def w_mod(a: dict, p: int) -> dict:
    out = {}
    for w, x in a.items():
        if isinstance(x, Fraction):
            x = x.numerator * pow(x.denominator, -1, p)
        x %= p
        if x:
            out[w] = x
    return out


def hall_words(F) -> list[dict]:
    """Commutator expansion of every Hall monomial of a FreeLie, over the integers."""
    out: list[dict] = []
    for k in range(F.dim):
        if F.leaf[k] is not None:
            out.append({(F.leaf[k],): 1})
        else:
            out.append(w_bracket(out[F.left[k]], out[F.right[k]], F.weights, F.c))
    return out


def poly_words(F, terms: dict, p: int) -> dict:
    words = hall_words(F)
    acc: dict = {}
    for k, x in terms.items():
        acc = w_add(acc, words[k], x)
    return w_mod(acc, p)


# -- BCH over the rationals ----------------------------------------------------------------

def bch_words(c: int) -> dict:
    """log(exp X exp Y) truncated at degree c, as a word polynomial in X=0, Y=1."""
    wt = (1, 1)
    one = {(): Fraction(1)}

    def exp(g):
        out, term = dict(one), dict(one)
        for k in range(1, c + 1):
            term = {w: x / k for w, x in w_mul(term, g, wt, c).items()}
            out = w_add(out, term)
        return out

    prod = w_mul(exp({(0,): Fraction(1)}), exp({(1,): Fraction(1)}), wt, c)
    z = w_add(prod, one, -1)
    out: dict = {}
    power = dict(one)
    for k in range(1, c + 1):
        power = w_mul(power, z, wt, c)
        out = w_add(out, {w: x * Fraction((-1) ** (k + 1), k) for w, x in power.items()})
    return out


def exp_coefficient_check(c: int) -> bool:
    """Sanity check of the series machinery: exp(X) has 1/k! on X^k."""
    wt = (1,)
    term, out = {(): Fraction(1)}, {(): Fraction(1)}
    for k in range(1, c + 1):
        term = {w: x / k for w, x in w_mul(term, {(0,): Fraction(1)}, wt, c).items()}
        out = w_add(out, term)
    return all(out.get((0,) * k) == Fraction(1, factorial(k)) for k in range(c + 1))


# -- linear algebra mod p, written without the package -------------------------------------

def rank_mod(rows, p: int) -> int:
    m = [list(r) for r in rows]
    r = 0
    ncols = len(m[0]) if m else 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col] % p), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        iv = pow(m[r][col], -1, p)
        m[r] = [x * iv % p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] % p:
                f = m[i][col]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[r])]
        r += 1
    return r


def span_set(rows, p: int) -> set:
    """Every vector of the span, by enumeration (tiny spaces only)."""
    rows = [tuple(r) for r in rows]
    n = len(rows[0]) if rows else 0
    out = set()
    for cs in itertools.product(range(p), repeat=len(rows)):
        out.add(tuple(sum(k * r[i] for k, r in zip(cs, rows)) % p for i in range(n)))
    if not rows:
        out.add(())
    return out


# -- amalgam by presentation ---------------------------------------------------------------

def adapted_basis(L):
    """Basis vectors of L paired with their levels, adapted to the flag."""
    p = L.p
    out = []
    have: list = []
    for i in range(L.c, 0, -1):
        for v in L.P(i):
            if rank_mod(have + [v], p) > len(have):
                have.append(v)
                out.append((tuple(v), i))
    return out


def _coords_mod(rows, v, p):
    """Coordinates of v in the (independent) rows, by brute elimination."""
    k = len(rows)
    n = len(v)
    aug = [[rows[j][i] for j in range(k)] + [v[i]] for i in range(n)]
    r = 0
    piv = []
    for col in range(k):
        pr = next((i for i in range(r, n) if aug[i][col] % p), None)
        if pr is None:
            continue
        aug[r], aug[pr] = aug[pr], aug[r]
        iv = pow(aug[r][col], -1, p)
        aug[r] = [x * iv % p for x in aug[r]]
        for i in range(n):
            if i != r and aug[i][col] % p:
                f = aug[i][col]
                aug[i] = [(x - f * y) % p for x, y in zip(aug[i], aug[r])]
        piv.append(col)
        r += 1
    out = [0] * k
    for i, col in enumerate(piv):
        out[col] = aug[i][k]
    return out


def pushout_dims(A, B, iA_images, iB_images, C_dim: int, free_lie_cls):
    """Flag dimensions of the Lla pushout of A <- C -> B, via a presentation.

    Generators are adapted bases of A and B weighted by level; relations are the
    two multiplication tables and the identification of the two copies of C.
    """
    p, c = A.p, A.c
    ba, bb = adapted_basis(A), adapted_basis(B)
    gens = [lv for _, lv in ba] + [lv for _, lv in bb]
    na = len(ba)
    F = free_lie_cls(len(gens), tuple(gens), c, p)
    dim = F.dim

    def embed(basis, offset, v):
        co = _coords_mod([b for b, _ in basis], v, p)
        out = [0] * dim
        for k, x in enumerate(co):
            out[F.gen_rank[offset + k]] += x
        return [x % p for x in out]

    rels = []
    for L, basis, off in ((A, ba, 0), (B, bb, na)):
        for s, (u, _) in enumerate(basis):
            for t, (v, _) in enumerate(basis):
                if s >= t:
                    continue
                lhs = F.vector(F.bracket(F.gen(off + s), F.gen(off + t)))
                rhs = embed(basis, off, L.bracket(u, v))
                rels.append([(x - y) % p for x, y in zip(lhs, rhs)])
    for k in range(C_dim):
        a = embed(ba, 0, iA_images[k])
        b = embed(bb, na, iB_images[k])
        rels.append([(x - y) % p for x, y in zip(a, b)])
    # ideal closure: bracket with generators until stable
    gvecs = [F.vector(F.gen(i)) for i in range(len(gens))]
    ideal = [r for r in rels if any(r)]
    rk = rank_mod(ideal, p) if ideal else 0
    frontier = list(ideal)
    while frontier:
        new = []
        for r in frontier:
            for g in gvecs:
                v = F.vector(F.bracket(F.from_vector(r), F.from_vector(g)))
                if any(v) and rank_mod(ideal + [v], p) > rk:
                    ideal.append(v)
                    rk += 1
                    new.append(v)
        frontier = new
    out = []
    for i in range(1, c + 2):
        deep = [F.vector(F.mono(k)) for k in range(dim) if F.deg[k] >= i]
        both = ideal + deep
        out.append((rank_mod(both, p) if both else 0) - rk)
    return out
