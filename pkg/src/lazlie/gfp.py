"""Exact linear algebra over a prime field F_p.

Vectors are tuples of ints in [0, p); matrices are lists of such row tuples.
Everything here is a plain function taking the modulus explicitly, so that
the rest of the package can pass raw tuples around without wrapper objects.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

Vec = tuple[int, ...]
Mat = list[Vec]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


def check_modulus(p: int) -> int:
    if not (isinstance(p, int) and p > 2 and is_prime(p)):
        raise ValueError(f"modulus must be an odd prime, got {p!r}")
    return p


def inv(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError(f"0 has no inverse mod {p}")
    return _inverses(p)[a]


@lru_cache(maxsize=None)
def _inverses(p: int) -> tuple[int, ...]:
    return (0,) + tuple(pow(a, p - 2, p) for a in range(1, p))


def reduce_rational(q: Fraction | int, p: int) -> int:
    """Image of a p-integral rational in F_p."""
    q = Fraction(q)
    if q.denominator % p == 0:
        raise ZeroDivisionError(f"{q} is not p-integral for p={p}")
    return q.numerator % p * inv(q.denominator, p) % p


class Fp:
    """A residue class mod p. Mostly for interactive use; kernels use ints."""

    __slots__ = ("value", "p")

    def __init__(self, value: int | Fraction, p: int):
        self.p = p
        self.value = reduce_rational(value, p) if isinstance(value, Fraction) else value % p

    def _coerce(self, other) -> int:
        if isinstance(other, Fp):
            if other.p != self.p:
                raise ValueError("mixed moduli")
            return other.value
        return other % self.p

    def __add__(self, other):
        return Fp(self.value + self._coerce(other), self.p)

    __radd__ = __add__

    def __sub__(self, other):
        return Fp(self.value - self._coerce(other), self.p)

    def __rsub__(self, other):
        return Fp(self._coerce(other) - self.value, self.p)

    def __mul__(self, other):
        return Fp(self.value * self._coerce(other), self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return Fp(self.value * inv(self._coerce(other), self.p), self.p)

    def __neg__(self):
        return Fp(-self.value, self.p)

    def __pow__(self, k: int):
        if k < 0:
            return Fp(pow(inv(self.value, self.p), -k, self.p), self.p)
        return Fp(pow(self.value, k, self.p), self.p)

    def __eq__(self, other):
        if isinstance(other, Fp):
            return self.p == other.p and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p))

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"Fp({self.value}, {self.p})"


# -- vectors -----------------------------------------------------------------

def zero(n: int) -> Vec:
    return (0,) * n


def unit(i: int, n: int) -> Vec:
    v = [0] * n
    v[i] = 1
    return tuple(v)


def vadd(u: Sequence[int], v: Sequence[int], p: int) -> Vec:
    return tuple((a + b) % p for a, b in zip(u, v))


def vsub(u: Sequence[int], v: Sequence[int], p: int) -> Vec:
    return tuple((a - b) % p for a, b in zip(u, v))


def vscale(k: int, v: Sequence[int], p: int) -> Vec:
    k %= p
    return tuple(k * a % p for a in v)


def axpy(k: int, x: Sequence[int], y: Sequence[int], p: int) -> Vec:
    """k*x + y."""
    k %= p
    if k == 0:
        return tuple(y)
    return tuple((k * a + b) % p for a, b in zip(x, y))


def lincomb(coeffs: Sequence[int], vecs: Sequence[Sequence[int]], n: int, p: int) -> Vec:
    out = [0] * n
    for k, v in zip(coeffs, vecs):
        k %= p
        if k:
            for i, a in enumerate(v):
                if a:
                    out[i] += k * a
    return tuple(x % p for x in out)


def is_zero(v: Sequence[int]) -> bool:
    return not any(v)


# -- matrices ----------------------------------------------------------------

def mat_vec(m: Sequence[Sequence[int]], v: Sequence[int], p: int) -> Vec:
    return tuple(sum(a * b for a, b in zip(row, v)) % p for row in m)


def mat_mul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]], p: int) -> Mat:
    bt = list(zip(*b))
    return [tuple(sum(x * y for x, y in zip(row, col)) % p for col in bt) for row in a]


def transpose(m: Sequence[Sequence[int]], ncols: int | None = None) -> Mat:
    if not m:
        return [] if ncols is None else [()] * ncols
    return [tuple(col) for col in zip(*m)]


def identity(n: int) -> Mat:
    return [unit(i, n) for i in range(n)]


def rref(m: Iterable[Sequence[int]], p: int) -> tuple[Mat, list[int]]:
    """Reduced row echelon form (zero rows dropped) and the pivot columns.

    The full-matrix convention keeps zero rows; callers here only ever want
    a basis of the row space, so they are removed.
    """
    m = list(m)
    if not m:
        return [], []
    ncols = len(m[0])
    if len(m) * ncols >= _NP_CUTOFF:
        red, pivots = rref_array(np.array(m, dtype=np.int64), p)
        return [tuple(x) for x in red.tolist()], pivots
    rows = [[a % p for a in r] for r in m]
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        piv = None
        for k in range(r, len(rows)):
            if rows[k][col]:
                piv = k
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pr = rows[r]
        iv = inv(pr[col], p)
        if iv != 1:
            pr = [a * iv % p for a in pr]
            rows[r] = pr
        # rows are sparse in practice: only touch the pivot row's support
        support = [(j, b) for j, b in enumerate(pr) if b]
        for k in range(len(rows)):
            if k != r:
                rk = rows[k]
                f = rk[col]
                if f:
                    for j, b in support:
                        rk[j] = (rk[j] - f * b) % p
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return [tuple(x) for x in rows[:r]], pivots


_NP_CUTOFF = 8192


def rref_array(M: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """rref over F_p of an integer array, vectorised row operations."""
    M = M % p
    nrows, ncols = M.shape
    inverses = np.array([0] + [pow(a, p - 2, p) for a in range(1, p)], dtype=np.int64)
    pivots: list[int] = []
    r, col = 0, 0
    while r < nrows and col < ncols:
        live = np.flatnonzero(M[r:, col:].any(axis=0))
        if not live.size:
            break
        col += int(live[0])
        below = M[r:, col]
        k = int(below.argmax()) + r
        if k != r:
            M[[r, k]] = M[[k, r]]
        M[r] = (M[r] * inverses[M[r, col]]) % p
        f = M[:, col].copy()
        f[r] = 0
        hit = np.flatnonzero(f)
        if hit.size:
            M[hit] = (M[hit] - np.outer(f[hit], M[r])) % p
        pivots.append(col)
        r += 1
        col += 1
    return M[:r], pivots


def rank(m: Iterable[Sequence[int]], p: int) -> int:
    return len(rref(m, p)[0])


def span(vectors: Iterable[Sequence[int]], p: int) -> Mat:
    """Canonical basis (rref rows) of the span."""
    return rref(vectors, p)[0]


def reduce_vec(basis: Mat, pivots: Sequence[int], v: Sequence[int], p: int) -> Vec:
    """Remainder of v after eliminating against an rref basis."""
    w = list(v)
    for row, col in zip(basis, pivots):
        f = w[col]
        if f:
            w = [(a - f * b) % p for a, b in zip(w, row)]
    return tuple(w)


def pivots_of(basis: Mat) -> list[int]:
    out = []
    for row in basis:
        for j, a in enumerate(row):
            if a:
                out.append(j)
                break
    return out


def in_span(basis: Mat, v: Sequence[int], p: int) -> bool:
    """Membership test against a basis already in rref."""
    return is_zero(reduce_vec(basis, pivots_of(basis), v, p))


def contains(big: Mat, small: Iterable[Sequence[int]], p: int) -> bool:
    """Whether every vector of small lies in the span of the rref basis big."""
    small = list(small)
    if not small:
        return True
    if len(small) * len(small[0]) >= _NP_CUTOFF:
        return _contains_array(big, np.array(small, dtype=np.int64), p)
    piv = pivots_of(big)
    return all(is_zero(reduce_vec(big, piv, v, p)) for v in small)


def _contains_array(big: Mat, V: np.ndarray, p: int) -> bool:
    V = V % p
    if big:
        B = np.array(big, dtype=np.int64)
        for row, col in zip(B, pivots_of(big)):
            f = V[:, col]
            hit = np.nonzero(f)[0]
            if hit.size:
                V[hit] = (V[hit] - np.outer(f[hit], row)) % p
    return not V.any()


def coords(basis: Sequence[Sequence[int]], v: Sequence[int], p: int) -> Vec | None:
    """Coefficients expressing v in terms of the (independent) rows of basis."""
    if not basis:
        return () if is_zero(v) else None
    return coordinatizer(tuple(tuple(r) for r in basis), p)(v)


@lru_cache(maxsize=512)
def coordinatizer(basis: tuple[Vec, ...], p: int):
    """Reusable solver v -> x with x·basis = v (None when v is outside the span).

    Row reduces [basis | I] once; each query is then a single elimination pass.
    """
    k = len(basis)
    n = len(basis[0])
    aug, piv = rref([tuple(r) + unit(i, k) for i, r in enumerate(basis)], p)
    steps = [(col, row[:n], row[n:]) for row, col in zip(aug, piv) if col < n]

    def solve_one(v: Sequence[int]) -> Vec | None:
        w = [a % p for a in v]
        x = [0] * k
        for col, head, comb in steps:
            f = w[col]
            if f:
                w = [(a - f * b) % p for a, b in zip(w, head)]
                x = [(a + f * b) % p for a, b in zip(x, comb)]
        if any(w):
            return None
        return tuple(x)

    return solve_one


def solve(m: Sequence[Sequence[int]], b: Sequence[int], p: int) -> Vec | None:
    """One solution of m x = b with free variables set to 0, or None."""
    if len(m) != len(b):
        raise ValueError(f"row count {len(m)} does not match rhs length {len(b)}")
    if not m:
        return ()
    ncols = len(m[0])
    aug = [list(row) + [bi] for row, bi in zip(m, b)]
    red, piv = rref(aug, p)
    if piv and piv[-1] == ncols:
        return None
    x = [0] * ncols
    for row, col in zip(red, piv):
        x[col] = row[ncols]
    return tuple(x)


def nullspace(m: Sequence[Sequence[int]], ncols: int, p: int) -> Mat:
    """Basis of {x : m x = 0}, one vector per free column."""
    red, piv = rref(m, p) if m else ([], [])
    pset = set(piv)
    out = []
    for f in range(ncols):
        if f in pset:
            continue
        x = [0] * ncols
        x[f] = 1
        for row, col in zip(red, piv):
            x[col] = (-row[f]) % p
        out.append(tuple(x))
    return out


def complement_basis(sub: Iterable[Sequence[int]], n: int, p: int) -> Mat:
    """Standard vectors at the non-pivot positions of rref(sub)."""
    _, piv = rref(sub, p)
    pset = set(piv)
    return [unit(i, n) for i in range(n) if i not in pset]


def sum_spans(a: Iterable[Sequence[int]], b: Iterable[Sequence[int]], p: int) -> Mat:
    return span(list(a) + list(b), p)


def intersect_spans(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]], p: int) -> Mat:
    """Basis of span(a) ∩ span(b), in rref."""
    a = [tuple(r) for r in a]
    b = [tuple(r) for r in b]
    if not a or not b:
        return []
    # Zassenhaus: rref of [a | a ; b | 0], rows with zero left half span the meet
    n = len(a[0])
    stacked = [r + r for r in a] + [r + (0,) * n for r in b]
    red, piv = rref(stacked, p)
    return [row[n:] for row, col in zip(red, piv) if col >= n]


def complement_in(big: Mat, small: Mat, p: int) -> Mat:
    """Rows of big that, together with small, still span big."""
    piv_small = set(pivots_of(span(small, p))) if small else set()
    return [row for row, col in zip(big, pivots_of(big)) if col not in piv_small]


def dim_quotient(big: Mat, small: Mat, p: int) -> int:
    return rank(list(big) + list(small), p) - rank(small, p)


def mat_equal_span(a: Iterable[Sequence[int]], b: Iterable[Sequence[int]], p: int) -> bool:
    return span(a, p) == span(b, p)
