"""Free nilpotent Lie algebras on weighted generators, in a Hall basis.

A Hall monomial is stored by its rank in the total order; ``left[k]`` and
``right[k]`` give the children of a bracket monomial (``None`` for a
generator).  Ranks are assigned degree by degree: generators of weight d
first (by index), then brackets of degree d lexicographically by the ranks
of their children.
"""
from __future__ import annotations

import re
import sys
import threading
from typing import Iterable, Mapping, Sequence, Union

from . import gfp

DEFAULT_NAMES = ("X", "Y", "Z", "W", "V", "U")


def mobius(n: int) -> int:
    result = 1
    k = 2
    while k * k <= n:
        if n % k == 0:
            n //= k
            if n % k == 0:
                return 0
            result = -result
        k += 1
    if n > 1:
        result = -result
    return result


def witt_count(n: int, d: int) -> int:
    """Dimension of the degree-d part of the free Lie algebra on n generators."""
    if d < 1:
        raise ValueError("degree must be >= 1")
    total = sum(mobius(k) * n ** (d // k) for k in range(1, d + 1) if d % k == 0)
    assert total % d == 0
    return total // d


class FreeLie:
    """F_c(X, alpha) over F_p with a Hall basis and a memoized rewriter."""

    def __init__(self, n: int, weights: Sequence[int] | None = None, c: int = 2,
                 p: int = 5, names: Sequence[str] | None = None):
        weights = tuple(weights) if weights is not None else (1,) * n
        if len(weights) != n:
            raise ValueError("one weight per generator")
        if any(w < 1 or w > c for w in weights):
            raise ValueError(f"weights must lie in 1..{c}")
        if names is None:
            names = DEFAULT_NAMES[:n] if n <= len(DEFAULT_NAMES) else [f"X{i + 1}" for i in range(n)]
        if len(set(names)) != n:
            raise ValueError("generator names must be distinct")
        self.n, self.weights, self.c = n, weights, c
        self.p = gfp.check_modulus(p)
        self.names = tuple(names)
        self.left: list[int | None] = []
        self.right: list[int | None] = []
        self.leaf: list[int | None] = []
        self.deg: list[int] = []
        self.pair_index: dict[tuple[int, int], int] = {}
        self.gen_rank: list[int] = [0] * n
        self._build()
        self._memo: dict[tuple[int, int], dict[int, int]] = {}
        self._lock = threading.Lock()

    def _build(self) -> None:
        by_deg: dict[int, list[int]] = {}
        for d in range(1, self.c + 1):
            new: list[int] = []
            for i in sorted(range(self.n), key=lambda i: (self.weights[i], i)):
                if self.weights[i] == d:
                    k = len(self.deg)
                    self.left.append(None)
                    self.right.append(None)
                    self.leaf.append(i)
                    self.deg.append(d)
                    self.gen_rank[i] = k
                    new.append(k)
            pairs = []
            for dp in range(1, d):
                for P in by_deg.get(dp, ()):
                    for Q in by_deg.get(d - dp, ()):
                        if P <= Q:
                            continue
                        S = self.right[P]
                        if S is not None and S > Q:
                            continue
                        pairs.append((P, Q))
            for P, Q in sorted(pairs):
                k = len(self.deg)
                self.left.append(P)
                self.right.append(Q)
                self.leaf.append(None)
                self.deg.append(d)
                self.pair_index[(P, Q)] = k
                new.append(k)
            by_deg[d] = new

    # -- basic data ----------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.deg)

    def label(self, k: int) -> str:
        if self.leaf[k] is not None:
            return self.names[self.leaf[k]]
        return f"[{self.label(self.left[k])},{self.label(self.right[k])}]"

    def labels(self) -> list[str]:
        return [self.label(k) for k in range(self.dim)]

    def gen(self, i: int | str) -> "LiePoly":
        if isinstance(i, str):
            i = self.names.index(i)
        return LiePoly(self, {self.gen_rank[i]: 1})

    def mono(self, k: int) -> "LiePoly":
        return LiePoly(self, {k: 1})

    def zero(self) -> "LiePoly":
        return LiePoly(self, {})

    # -- rewriting -----------------------------------------------------------

    def bracket_mono(self, P: int, Q: int) -> dict[int, int]:
        """Hall coordinates of [P, Q], truncated above degree c."""
        if self.deg[P] + self.deg[Q] > self.c or P == Q:
            return {}
        key = (P, Q)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        p = self.p
        if P < Q:
            out = {k: (-v) % p for k, v in self.bracket_mono(Q, P).items()}
        elif self.leaf[P] is not None or self.right[P] <= Q:
            out = {self.pair_index[(P, Q)]: 1}
        else:
            # [[R,S],Q] = [[R,Q],S] + [R,[S,Q]] with S > Q
            R, S = self.left[P], self.right[P]
            out: dict[int, int] = {}
            for k, v in self.bracket_mono(R, Q).items():
                _accum(out, self.bracket_mono(k, S), v, p)
            for k, v in self.bracket_mono(S, Q).items():
                _accum(out, self.bracket_mono(R, k), v, p)
        with self._lock:
            self._memo.setdefault(key, out)
        return out

    def bracket_terms(self, a: Mapping[int, int], b: Mapping[int, int]) -> dict[int, int]:
        out: dict[int, int] = {}
        p = self.p
        for i, x in a.items():
            for j, y in b.items():
                if self.deg[i] + self.deg[j] <= self.c:
                    _accum(out, self.bracket_mono(i, j), x * y, p)
        return out

    def bracket(self, a: "LiePoly", b: "LiePoly") -> "LiePoly":
        return LiePoly(self, self.bracket_terms(a.terms, b.terms))

    def normal_form(self, tree: "Tree") -> "LiePoly":
        """Hall coordinates of a bracket expression.

        ``tree`` may be a generator name or index, a LiePoly, a tuple
        ``(left, right)`` meaning the bracket, a list of ``(coeff, tree)``
        terms, or a string such as ``"[[Y,X],X] - 2*[X,Y]"``.
        """
        if isinstance(tree, LiePoly):
            return tree
        if isinstance(tree, str):
            return self.parse(tree)
        if isinstance(tree, int):
            return self.gen(tree)
        if isinstance(tree, tuple) and len(tree) == 2:
            return self.bracket(self.normal_form(tree[0]), self.normal_form(tree[1]))
        if isinstance(tree, list):
            out = self.zero()
            for coeff, sub in tree:
                out = out + self.normal_form(sub) * coeff
            return out
        raise TypeError(f"cannot interpret {tree!r} as a bracket expression")

    def parse(self, text: str) -> "LiePoly":
        return _Parser(self, text).parse()

    def vector(self, q: "LiePoly") -> tuple[int, ...]:
        v = [0] * self.dim
        for k, x in q.terms.items():
            v[k] = x
        return tuple(v)

    def from_vector(self, v: Sequence[int]) -> "LiePoly":
        return LiePoly(self, {k: x for k, x in enumerate(v) if x % self.p})

    def to_lla(self):
        from .lla import Lla

        n = self.dim
        sc = {}
        for i in range(n):
            for j in range(i + 1, n):
                t = self.bracket_mono(i, j)
                if t:
                    v = [0] * n
                    for k, x in t.items():
                        v[k] = x
                    sc[(i, j)] = tuple(v)
        flag = []
        for lvl in range(1, self.c + 2):
            flag.append([gfp.unit(k, n) for k in range(n) if self.deg[k] >= lvl])
        return Lla(self.p, self.c, n, sc, flag, labels=self.labels())


def _accum(out: dict[int, int], terms: Mapping[int, int], scale: int, p: int) -> None:
    scale %= p
    if not scale:
        return
    for k, v in terms.items():
        s = (out.get(k, 0) + scale * v) % p
        if s:
            out[k] = s
        else:
            out.pop(k, None)


class LiePoly:
    """An F_p-combination of Hall monomials of one FreeLie."""

    __slots__ = ("alg", "terms")

    def __init__(self, alg: FreeLie, terms: Mapping[int, int]):
        self.alg = alg
        p = alg.p
        self.terms = {k: v % p for k, v in terms.items() if v % p}

    def __add__(self, other: "LiePoly") -> "LiePoly":
        out = dict(self.terms)
        _accum(out, other.terms, 1, self.alg.p)
        return LiePoly(self.alg, out)

    def __sub__(self, other: "LiePoly") -> "LiePoly":
        out = dict(self.terms)
        _accum(out, other.terms, -1, self.alg.p)
        return LiePoly(self.alg, out)

    def __neg__(self) -> "LiePoly":
        return LiePoly(self.alg, {k: -v for k, v in self.terms.items()})

    def __mul__(self, k: int) -> "LiePoly":
        return LiePoly(self.alg, {m: k * v for m, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, int) and other == 0:
            return not self.terms
        return isinstance(other, LiePoly) and other.alg is self.alg and other.terms == self.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def bracket(self, other: "LiePoly") -> "LiePoly":
        return self.alg.bracket(self, other)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms):
            v = self.terms[k]
            lab = self.alg.label(k)
            parts.append(lab if v == 1 else f"{v}*{lab}")
        return " + ".join(parts)


Tree = Union[str, int, LiePoly, tuple, list]


def lev_deg(q: LiePoly) -> tuple[int, int]:
    """(level, degree) of q; the zero polynomial gets (c+1, c+1)."""
    if not q.terms:
        s = q.alg.c + 1
        return s, s
    ds = [q.alg.deg[k] for k in q.terms]
    return min(ds), max(ds)


def hall_set(n: int, weights: Sequence[int] | None = None, c: int = 2,
             names: Sequence[str] | None = None) -> list[str]:
    """Hall monomials of degree <= c in increasing order, as bracket strings."""
    return FreeLie(n, weights, c, 3, names).labels()


def free_lla(n: int, weights: Sequence[int] | None = None, c: int = 2, p: int = 5,
             names: Sequence[str] | None = None):
    return FreeLie(n, weights, c, p, names).to_lla()


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


class _Parser:
    def __init__(self, alg: FreeLie, text: str):
        self.alg = alg
        self.toks = []
        for m in _TOKEN.finditer(text):
            if m.group(1):
                self.toks.append(("num", int(m.group(1))))
            elif m.group(2):
                self.toks.append(("name", m.group(2)))
            elif m.group(3) and not m.group(3).isspace():
                self.toks.append(("op", m.group(3)))
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, kind=None, val=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (val and tok[1] != val):
            raise ValueError(f"parse error at token {self.i}: expected {val or kind}, got {tok[1]!r}")
        self.i += 1
        return tok[1]

    def parse(self) -> LiePoly:
        out = self.expr()
        if self.i != len(self.toks):
            raise ValueError(f"trailing input at token {self.i}")
        return out

    def expr(self) -> LiePoly:
        sign = 1
        if self.peek() == ("op", "-"):
            self.take()
            sign = -1
        out = self.term() * sign
        while self.peek() in (("op", "+"), ("op", "-")):
            s = 1 if self.take() == "+" else -1
            out = out + self.term() * s
        return out

    def term(self) -> LiePoly:
        coeff = 1
        if self.peek()[0] == "num":
            coeff = self.take()
            if self.peek() == ("op", "*"):
                self.take()
            elif self.peek()[0] is None or self.peek() in (("op", "+"), ("op", "-"), ("op", "]"), ("op", ",")):
                # bare scalar is not a Lie element
                raise ValueError("bare scalar in Lie expression")
        return self.atom() * coeff

    def atom(self) -> LiePoly:
        kind, val = self.peek()
        if kind == "name":
            self.take()
            if val not in self.alg.names:
                raise ValueError(f"unknown generator {val!r}")
            return self.alg.gen(val)
        if (kind, val) == ("op", "("):
            self.take()
            out = self.expr()
            self.take("op", ")")
            return out
        self.take("op", "[")
        a = self.expr()
        self.take("op", ",")
        b = self.expr()
        self.take("op", "]")
        return self.alg.bracket(a, b)


sys.setrecursionlimit(max(sys.getrecursionlimit(), 10000))
