"""Explicit finite witnesses and extension gadgets.

* the SOP3 algebra and its two claims (a realising extension, and a checked
  Jacobi refutation),
* the quotient of a free algebra that makes one long bracket vanish exactly
  on a prescribed set of index tuples,
* two 3-dimensional gadgets, and a bounded builder that saturates a finite
  Lla against one-step extensions.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import gfp
from .amalgam import amalgamate, is_embedding
from .free_lie import FreeLie, witt_count
from .gfp import Mat, Vec
from .lla import (DerLaz, Lla, LlaError, LlaHom, SearchRefused, abelian, closure, from_levels,
                  quotient, rebase, semidirect, sub_lla, validate)
from .nil2 import BilinearStruct


# -- the SOP3 algebra ------------------------------------------------------------------------

@dataclass
class Sop3Instance:
    """Basis a_i, a'_i, b_i, b'_i (i < n) and d_ij (i < j < n), in that order."""

    n: int
    V: Lla

    def _pair(self, i: int, j: int) -> int:
        if not 0 <= i < j < self.n:
            raise IndexError(f"no basis element d_{i}{j}")
        return sum(self.n - 1 - t for t in range(i)) + (j - i - 1)

    def index(self, kind: str, i: int, j: int | None = None) -> int:
        n = self.n
        offsets = {"a": 0, "a'": n, "b": 2 * n, "b'": 3 * n}
        if kind == "d":
            return 4 * n + self._pair(i, j)
        if not 0 <= i < n:
            raise IndexError(f"index {i} out of range")
        return offsets[kind] + i

    def vec(self, kind: str, i: int, j: int | None = None) -> Vec:
        return gfp.unit(self.index(kind, i, j), self.V.dim)


def build_sop3(n: int, p: int) -> Sop3Instance:
    """Class-3 Lla whose only nonzero basis brackets are [a'_i, b_j] = d_ij, i < j."""
    if n < 1:
        raise LlaError("n must be positive")
    gfp.check_modulus(p)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    dv = 4 * n
    labels = ([f"a{i}" for i in range(n)] + [f"a{i}'" for i in range(n)]
              + [f"b{i}" for i in range(n)] + [f"b{i}'" for i in range(n)]
              + [f"d{i}{j}" for i, j in pairs])
    beta = {}
    for k, (i, j) in enumerate(pairs):
        beta[(n + i, 2 * n + j)] = gfp.unit(k, len(pairs))
    # the V-part carries levels 1 and 2, the central part level 3
    B = BilinearStruct(p, dv, len(pairs), beta)
    V = B.lie_algebra(3, [1] * n + [2] * n + [1] * n + [2] * n, [3] * len(pairs), labels)
    return Sop3Instance(n, V)


@dataclass
class Claim1Result:
    k: int
    tilde: Lla                 # W~ = W* ⊕ W**
    ext: Lla                   # extension of V containing c*
    emb: LlaHom                # V -> ext
    witness: Vec               # c* inside ext
    equations: list[tuple[str, bool]]

    @property
    def ok(self) -> bool:
        return all(flag for _, flag in self.equations)


def sop3_claim1(inst: Sop3Instance, k: int) -> Claim1Result:
    """An element c* with [c*, b_i] = b'_i (i <= k) and [c*, a_j] = a'_j (j > k)."""
    n, V, p = inst.n, inst.V, inst.V.p
    if not 0 <= k < n:
        raise LlaError(f"k must lie in [0, {n})")
    low = [("b", i) for i in range(k + 1)] + [("a", j) for j in range(k + 1, n)]
    high = [("b'", i) for i in range(k + 1)] + [("a'", j) for j in range(k + 1, n)]
    rows = [inst.vec(t, i) for t, i in low + high]
    W = closure(V, rows)
    if len(W) != len(rows):
        raise AssertionError("the generated substructure should be the plain span")
    Wl, iW = sub_lla(V, W)

    # W~: low generators plus c*, brackets [c*, x] = x' landing in the high part
    m = len(low)
    beta = {(m, s): gfp.unit(s, m) for s in range(m)}
    names = [V.labels[inst.index(t, i)] for t, i in low] + ["c*"] + \
            [V.labels[inst.index(t, i)] for t, i in high]
    tilde = BilinearStruct(p, m + 1, m, beta).lie_algebra(
        3, [1] * (m + 1), [2] * m, names)
    pos = {inst.index(t, i): s for s, (t, i) in enumerate(low)}
    pos.update({inst.index(t, i): m + 1 + s for s, (t, i) in enumerate(high)})
    imgs = []
    for v in iW.images:
        out = [0] * tilde.dim
        for idx, x in enumerate(v):
            if x:
                out[pos[idx]] = x
        imgs.append(tuple(out))
    jW = LlaHom(Wl, tilde, imgs)

    r = amalgamate(V, tilde, iW, jW)
    S = r.S
    cstar = r.embB(gfp.unit(m, tilde.dim))
    eqs: list[tuple[str, bool]] = []
    for t, i in low:
        x = r.embA(inst.vec(t, i))
        want = r.embA(inst.vec(t + "'", i))
        eqs.append((f"[c*,{t}{i}] = {t}{i}'", S.bracket(cstar, x) == want))
    flag_ok = all(gfp.span(jW.apply_all(Wl.P(i)), p) == tilde.P(i) for i in range(2, 5))
    eqs.append(("P_i(W~) = P_i(W) for i >= 2", flag_ok))
    eqs.append(("W~ valid", validate(tilde) is None))
    eqs.append(("extension valid", validate(S) is None))
    return Claim1Result(k, tilde, S, r.embA, cstar, eqs)


# -- symbolic refutation ---------------------------------------------------------------------

ZERO = ("zero",)


def sym(name: str) -> tuple:
    return ("sym", name)


def br(x, y) -> tuple:
    return ("br", x, y)


def render(t) -> str:
    kind = t[0]
    if kind == "zero":
        return "0"
    if kind == "sym":
        return t[1]
    if kind == "br":
        return f"[{render(t[1])}, {render(t[2])}]"
    if kind == "add":
        return f"{render(t[1])} + {render(t[2])}"
    inner = render(t[1])
    return f"-({inner})" if t[1][0] == "add" else f"-{inner}"


def _get(t, path):
    for k in path:
        t = t[k + 1]
    return t


def _put(t, path, new):
    if not path:
        return new
    k = path[0]
    parts = list(t)
    parts[k + 1] = _put(t[k + 1], path[1:], new)
    return tuple(parts)


def _rewrite(rule: str, t, rel=None):
    """One rule applied at the root of t; raises ValueError if it does not match."""
    if rule == "rel":
        lhs, rhs = rel
        if t == lhs:
            return rhs
        if t == rhs:
            return lhs
        raise ValueError("relation does not match")
    if rule == "antisym" and t[0] == "br":
        return ("neg", br(t[2], t[1]))
    if rule == "jacobi" and t[0] == "br" and t[2][0] == "br":
        x, (_, y, z) = t[1], t[2]
        return ("add", br(br(x, y), z), br(y, br(x, z)))
    if rule == "neg_out" and t[0] == "br":
        if t[1][0] == "neg":
            return ("neg", br(t[1][1], t[2]))
        if t[2][0] == "neg":
            return ("neg", br(t[1], t[2][1]))
    if rule == "zero_br" and t[0] == "br" and ZERO in (t[1], t[2]):
        return ZERO
    if rule == "add_zero" and t[0] == "add":
        if t[1] == ZERO:
            return t[2]
        if t[2] == ZERO:
            return t[1]
    if rule == "neg_zero" and t == ("neg", ZERO):
        return ZERO
    raise ValueError(f"rule {rule} does not apply to {render(t)}")


@dataclass
class RefStep:
    term: tuple
    rule: str
    path: tuple[int, ...]
    rel: tuple | None = None
    why: str = ""


@dataclass
class Refutation:
    i: int
    j: int
    start: tuple
    steps: list[RefStep]
    hypotheses: list[tuple]
    table: dict
    contradiction: bool = False
    reason: str = ""

    def terms(self) -> list[tuple]:
        return [self.start] + [s.term for s in self.steps]

    def lines(self) -> list[str]:
        out = [render(self.start)]
        for s in self.steps:
            out.append(f"  = {render(s.term)}    ({s.rule}{': ' + s.why if s.why else ''})")
        return out


def _table_relations(inst: Sop3Instance, names: Iterable[tuple[str, int]]) -> dict:
    """Known brackets [x, y] = value among the named basis vectors, read off V."""
    V, p = inst.V, inst.V.p
    table = {}
    items = [(inst.V.labels[inst.index(t, i)], inst.vec(t, i)) for t, i in names]
    for (nx, x), (ny, y) in itertools.product(items, repeat=2):
        w = V.bracket(x, y)
        support = [(k, c) for k, c in enumerate(w) if c]
        if not support:
            val = ZERO
        elif len(support) == 1 and support[0][1] in (1, p - 1):
            k, c = support[0]
            val = sym(V.labels[k]) if c == 1 else ("neg", sym(V.labels[k]))
        else:
            continue
        table[(sym(nx), sym(ny))] = val
    return table


def check_refutation(ref: Refutation) -> bool:
    """Replay every step; relations must be hypotheses or entries of the bracket table."""
    cur = ref.start
    for s in ref.steps:
        if s.rule == "rel":
            lhs, rhs = s.rel
            allowed = (lhs, rhs) in ref.hypotheses or (
                lhs[0] == "br" and ref.table.get((lhs[1], lhs[2])) == rhs) or (
                rhs[0] == "br" and ref.table.get((rhs[1], rhs[2])) == lhs)
            if not allowed:
                return False
        try:
            sub = _rewrite(s.rule, _get(cur, s.path), s.rel)
        except (ValueError, IndexError, TypeError):
            return False
        if _put(cur, s.path, sub) != s.term:
            return False
        cur = s.term
    return True


def sop3_claim2(inst: Sop3Instance, i: int, j: int) -> Refutation:
    """Refute an element d with [d, a_i] = a'_i and [d, b_j] = b'_j by a checked Jacobi chain."""
    n = inst.n
    if not (0 <= i < n and 0 <= j < n):
        raise LlaError("indices out of range")
    names = [("a", i), ("a'", i), ("b", j), ("b'", j)]
    table = _table_relations(inst, names)
    lab = inst.V.labels
    a, a2 = sym(lab[inst.index("a", i)]), sym(lab[inst.index("a'", i)])
    b, b2 = sym(lab[inst.index("b", j)]), sym(lab[inst.index("b'", j)])
    d = sym("d")
    hyps = [(br(d, a), a2), (br(d, b), b2)]
    if j <= i:
        # [a'_i, b_j] is already 0 in V: the relations force nothing
        return Refutation(i, j, br(a2, b), [], hyps, table, False,
                          f"[{a2[1]}, {b[1]}] = 0 in V, no d_{i}{j} exists")
    dij = sym(lab[inst.index("d", i, j)])
    start = dij
    plan = [
        ("rel", (), (br(a2, b), dij), "bracket table"),
        ("rel", (0,), (br(d, a), a2), "hypothesis psi"),
        ("antisym", (), None, ""),
        ("jacobi", (0,), None, ""),
        ("antisym", (0, 0, 0), None, ""),
        ("rel", (0, 0, 0, 0), (br(d, b), b2), "hypothesis phi"),
        ("neg_out", (0, 0), None, ""),
        ("rel", (0, 0, 0), (br(b2, a), ZERO), "bracket table"),
        ("neg_zero", (0, 0), None, ""),
        ("rel", (0, 1, 1), (br(b, a), ZERO), "bracket table"),
        ("zero_br", (0, 1), None, ""),
        ("add_zero", (0,), None, ""),
        ("neg_zero", (), None, ""),
    ]
    steps = []
    cur = start
    for rule, path, rel, why in plan:
        nxt = _put(cur, path, _rewrite(rule, _get(cur, path), rel))
        steps.append(RefStep(nxt, rule, path, rel, why))
        cur = nxt
    ref = Refutation(i, j, start, steps, hyps, table)
    nonzero = any(inst.vec("d", i, j)) and any(inst.V.bracket(inst.vec("a'", i), inst.vec("b", j)))
    ref.contradiction = check_refutation(ref) and cur == ZERO and nonzero
    ref.reason = f"{dij[1]} = 0 is derived, but {dij[1]} is a nonzero basis vector"
    return ref


def refutation_free_check(ref: Refutation, p: int) -> bool:
    """Steps other than relation substitutions must preserve the value in a free Lie algebra."""
    names = sorted({t[1] for term in ref.terms() for t in _symbols(term)})
    if not names:
        return True
    F = FreeLie(len(names), None, 3, p, names)
    idx = {nm: k for k, nm in enumerate(names)}

    def ev(t):
        kind = t[0]
        if kind == "zero":
            return F.zero()
        if kind == "sym":
            return F.gen(idx[t[1]])
        if kind == "br":
            return ev(t[1]).bracket(ev(t[2]))
        if kind == "add":
            return ev(t[1]) + ev(t[2])
        return -ev(t[1])

    prev = ref.start
    for s in ref.steps:
        if s.rule != "rel" and ev(prev) != ev(s.term):
            return False
        prev = s.term
    return True


def _symbols(t):
    if t[0] == "sym":
        yield t
    elif t[0] != "zero":
        for x in t[1:]:
            yield from _symbols(x)


# -- the independence quotient ------------------------------------------------------------------

@dataclass
class IpInstance:
    c: int
    m: int
    X: frozenset
    L: Lla
    quotient: Lla
    proj: LlaHom
    vanishing: dict
    monomials: dict

    @property
    def holds(self) -> bool:
        return all(v == (t in self.X) for t, v in self.vanishing.items())


def build_ip_witness(c: int, p: int, m: int, X: Iterable, max_dim: int = 600) -> IpInstance:
    """Free class-c algebra on a_{i,j} (i < c-1, j < m) and one b, modulo the
    degree-c monomials [b, a_{0,j0}, ..., a_{c-2,j_{c-2}}] with (j0, ...) in X."""
    if c < 2:
        raise LlaError("need c >= 2")
    gfp.check_modulus(p)
    if p <= c:
        raise LlaError("need p > c")
    if m < 1:
        raise LlaError("need m >= 1")
    r = c - 1
    Xs = set()
    for t in X:
        t = (t,) if isinstance(t, int) else tuple(t)
        if len(t) != r or any(not 0 <= x < m for x in t):
            raise LlaError(f"tuple {t} is not in {m}^{r}")
        Xs.add(t)
    ngen = r * m + 1
    size = sum(witt_count(ngen, d) for d in range(1, c + 1))
    if size > max_dim:
        raise LlaError(f"free algebra would have dimension {size} > {max_dim}")
    names = [f"a{i}_{j}" for i in range(r) for j in range(m)] + ["b"]
    F = FreeLie(ngen, None, c, p, names)
    b = ngen - 1

    def a(i, j):
        return i * m + j

    # a's precede b, and a_{i,j} precede a_{i',j'} lexicographically
    order = [F.gen_rank[g] for g in range(ngen)]
    if order != sorted(order):
        raise AssertionError("generator order must follow the index order")
    tuples = list(itertools.product(range(m), repeat=r))
    monos = {}
    for t in tuples:
        tree = b
        for i, j in enumerate(t):
            tree = (tree, a(i, j))
        poly = F.normal_form(tree)
        if len(poly.terms) != 1 or list(poly.terms.values()) != [1]:
            raise AssertionError(f"monomial for {t} is not a Hall basis element")
        monos[t] = next(iter(poly.terms))
    if len(set(monos.values())) != len(monos):
        raise AssertionError("monomials are not distinct")
    L = F.to_lla()
    I = [gfp.unit(monos[t], L.dim) for t in sorted(Xs)]
    Q, proj = quotient(L, I)
    van = {}
    for t in tuples:
        x = proj(gfp.unit(F.gen_rank[b], L.dim))
        for i, j in enumerate(t):
            x = Q.bracket(x, proj(gfp.unit(F.gen_rank[a(i, j)], L.dim)))
        van[t] = not any(x)
    return IpInstance(c, m, frozenset(Xs), L, Q, proj, van, monos)


# -- gadgets -----------------------------------------------------------------------------------

def heisenberg_gadget(i: int, j: int, c: int, p: int) -> Lla:
    """Basis (a, b, c) with [b, c] = a, lev b = i, lev c = j, lev a = i + j."""
    if i < 1 or j < 1 or i + j > c:
        raise LlaError("need i, j >= 1 and i + j <= c")
    return from_levels(p, c, 3, {(1, 2): (1, 0, 0)}, [i + j, i, j], ["a", "b", "c"])


def level_raiser(n: int, c: int, p: int) -> Lla:
    """Basis (a, b, c) with [a, b] = c, lev a = n, lev b = 1, lev c = n + 1."""
    if not 1 <= n <= c - 1:
        raise LlaError("need 1 <= n <= c - 1")
    return from_levels(p, c, 3, {(0, 1): (0, 0, 1)}, [n, 1, n + 1], ["a", "b", "c"])


def leibniz_split(L: Lla, x, y, z) -> tuple[Vec, Vec, Vec]:
    """([x,[y,z]], [[x,y],z], [y,[x,z]]); the first is the sum of the other two."""
    return (L.bracket(x, L.bracket(y, z)), L.bracket(L.bracket(x, y), z),
            L.bracket(y, L.bracket(x, z)))


# -- one-step extensions and the bounded generic builder ----------------------------------------

@dataclass(frozen=True)
class ExtType:
    """B = A + span(w), lev w = level, [w, a] = delta(a) (delta in A's coordinates)."""

    level: int
    delta: tuple[Vec, ...]


class BudgetExceeded(SearchRefused):
    pass


def extension_types(A: Lla, max_types: int = 256) -> list[ExtType]:
    """One-step extensions of A up to isomorphism fixing A pointwise.

    For each level l the candidates are Lazard derivations raising levels by l,
    taken modulo ad(P_l(A)) and up to nonzero scalars.
    """
    p, c = A.p, A.c
    der = DerLaz(A)
    out: list[ExtType] = []
    for lev in range(1, c + 1):
        Dl = der.algebra.P(lev) if der.space else []
        inner = []
        for x in A.P(lev):
            inner.append(der.coords(A.ad(x)))
        inner = gfp.span(inner, p) if inner and der.space else []
        # complement of the inner part inside D_l
        comp = _complement_within(Dl, inner, p)
        count = (p ** len(comp) - 1) // (p - 1) + 1
        if len(out) + count > max_types:
            raise BudgetExceeded(f"more than {max_types} one-step extension types")
        reps: list[Vec] = [gfp.zero(len(der.space))]
        for coeffs in _projective_points(len(comp), p):
            reps.append(gfp.lincomb(coeffs, comp, len(der.space), p))
        for v in reps:
            delta = tuple(tuple(r) for r in der.map_of(v)) if der.space else tuple(
                gfp.zero(A.dim) for _ in range(A.dim))
            out.append(ExtType(lev, delta))
    return out


def _complement_within(big: Mat, small: Mat, p: int) -> Mat:
    cur = gfp.span(small, p)
    comp = []
    for v in big:
        nxt = gfp.span(cur + [v], p)
        if len(nxt) > len(cur):
            comp.append(v)
            cur = nxt
    return comp


def _projective_points(k: int, p: int):
    """Nonzero vectors of F_p^k whose first nonzero entry is 1."""
    for lead in range(k):
        for tail in itertools.product(range(p), repeat=k - lead - 1):
            yield (0,) * lead + (1,) + tail


def realize(A: Lla, t: ExtType) -> Lla:
    """The extension B = A + span(w) of type t; A's basis comes first."""
    F = abelian(A.p, A.c, 1, [t.level])
    return semidirect(A, F, [list(t.delta)])


def find_witness(L: Lla, iA: Sequence[Sequence[int]], t: ExtType) -> Vec | None:
    """w' in L with A + w' of type t over A (A given by basis images), or None.

    Solves the affine system [w', a_k] = delta(a_k), w' in P_l(L), and then
    avoids A + P_{l+1}(L).
    """
    p, n = L.p, L.dim
    iA = [tuple(v) for v in iA]
    Pl = L.P(t.level)
    if not Pl:
        return None
    # unknown u = sum y_s Pl[s]
    rows, rhs = [], []
    for ak, dk in zip(iA, t.delta):
        target = gfp.lincomb(dk, iA, n, p) if iA else gfp.zero(n)
        cols = [L.bracket(q, ak) for q in Pl]
        for coord in range(n):
            rows.append([col[coord] for col in cols])
            rhs.append(target[coord])
    if rows:
        y0 = gfp.solve(rows, rhs, p)
        if y0 is None:
            return None
        kernel = gfp.nullspace(rows, len(Pl), p)
    else:
        y0 = gfp.zero(len(Pl))
        kernel = gfp.identity(len(Pl))
    avoid = gfp.span(list(iA) + list(L.P(t.level + 1)), p)
    u0 = gfp.lincomb(y0, Pl, n, p)
    for cand in [u0] + [gfp.vadd(u0, gfp.lincomb(k, Pl, n, p), p) for k in kernel]:
        if not gfp.in_span(avoid, cand, p):
            return cand
    return None


def witness_embedding(L: Lla, A: Lla, iA: Sequence[Sequence[int]], t: ExtType, w: Vec) -> LlaHom:
    B = realize(A, t)
    return LlaHom(B, L, [tuple(v) for v in iA] + [tuple(w)])


@dataclass
class RoundResult:
    L: Lla
    inclusion: LlaHom                 # old L -> new L, identity on the old basis
    witnessed: list = field(default_factory=list)   # (A rows, type, witness)
    added: list = field(default_factory=list)
    exhaustive: bool = True


def tracked_substructures(L: Lla, max_dim: int, max_count: int = 2000) -> tuple[list[Mat], bool]:
    """Subalgebras of dimension <= max_dim generated by at most max_dim vectors.

    Generators run over all lines of L when that is within ``max_count``,
    otherwise over the basis vectors only (then the flag is False).
    """
    p, n = L.p, L.dim
    nlines = (p ** n - 1) // (p - 1) if n else 0
    exhaustive = True
    if max_dim >= 1 and nlines <= max_count:
        gens = [gfp.lincomb(v, L.basis(), n, p) for v in _projective_points(n, p)]
    else:
        gens = L.basis()
        exhaustive = max_dim == 0
    seen = {()}
    out: list[Mat] = [[]]
    for k in range(1, max_dim + 1):
        for combo in itertools.combinations(gens, k):
            S = closure(L, list(combo))
            key = tuple(S)
            if len(S) <= max_dim and key not in seen:
                seen.add(key)
                out.append(S)
                if len(out) > max_count:
                    raise BudgetExceeded(f"more than {max_count} tracked substructures")
    return out, exhaustive


def _pad(v: Sequence[int], n: int) -> Vec:
    return tuple(v) + (0,) * (n - len(v))


def generic_round(L: Lla, d: int, ceiling: int = 8, max_types: int = 256,
                  max_count: int = 2000) -> RoundResult:
    """Embed every missing one-step extension B ⊇ A (A tracked, dim B <= d) into L.

    Missing extensions are free-amalgamated over A; the new algebra keeps the
    old basis as its first vectors.
    """
    if d < 1:
        raise LlaError("budget must be >= 1")
    if d > ceiling:
        raise BudgetExceeded(f"budget {d} exceeds ceiling {ceiling}")
    p = L.p
    n0 = L.dim
    subs, exhaustive = tracked_substructures(L, d - 1, max_count)
    cur = L
    res = RoundResult(L, LlaHom(L, L, L.basis()), exhaustive=exhaustive)
    for S in subs:
        Al, incl = sub_lla(L, S) if S else (abelian(p, L.c, 0), LlaHom(abelian(p, L.c, 0), L, []))
        for t in extension_types(Al, max_types):
            iA = [_pad(v, cur.dim) for v in incl.images]
            w = find_witness(cur, iA, t)
            if w is not None:
                res.witnessed.append((S, t, w))
                continue
            B = realize(Al, t)
            jA = LlaHom(Al, B, [gfp.unit(k, B.dim) for k in range(Al.dim)])
            iAcur = LlaHom(Al, cur, iA)
            r = amalgamate(cur, B, iAcur, jA)
            first = r.embA.images
            rows = list(first) + gfp.complement_basis(gfp.span(first, p), r.S.dim, p)
            labels = list(cur.labels) + [f"g{cur.dim + k + 1}" for k in range(r.S.dim - cur.dim)]
            new, back = rebase(r.S, rows, labels)
            wS = r.embB(gfp.unit(Al.dim, B.dim))
            w_new = gfp.coords(rows, wS, p)
            cur = new
            res.added.append((S, t, w_new))
    res.L = cur
    res.inclusion = LlaHom(L, cur, [gfp.unit(k, cur.dim) for k in range(n0)])
    return res


# -- bounded axiom checks at class 2 ------------------------------------------------------------

@dataclass
class AxiomReport:
    violated: list[str] = field(default_factory=list)
    pending: list[str] = field(default_factory=list)
    satisfied: int = 0

    def __str__(self) -> str:
        return (f"satisfied {self.satisfied}, pending {len(self.pending)}, "
                f"violated {len(self.violated)}")


def center(L: Lla) -> Mat:
    p, n = L.p, L.dim
    if n == 0:
        return []
    # z central iff [z, e_k] = 0 for all k: linear in z
    cols = [[x for k in range(n) for x in L.bracket(gfp.unit(t, n), gfp.unit(k, n))] for t in range(n)]
    return gfp.span(gfp.nullspace(gfp.transpose(cols), n, p), p)


def _solve_bracket(L: Lla, lhs: Sequence[Vec], rhs: Sequence[Vec]) -> Vec | None:
    """Some b with [a_k, b] = c_k for all k, or None."""
    p, n = L.p, L.dim
    rows, vals = [], []
    for a, c in zip(lhs, rhs):
        cols = [L.bracket(a, gfp.unit(s, n)) for s in range(n)]
        for coord in range(n):
            rows.append([col[coord] for col in cols])
            vals.append(c[coord])
    return gfp.solve(rows, vals, p)


def t2p_axiom_check(L: Lla, rng: random.Random | None = None, samples: int = 40,
                    max_n: int = 2) -> AxiomReport:
    """Bounded checks of the class-2 extension axioms.

    Center = commutators, and for a_1..a_n independent over the center and
    central c_1..c_n some b has [a_i, b] = c_i.  Failures that a larger
    finite stage can repair are pending; only broken structure is violated.
    """
    if L.c != 2:
        raise LlaError("axiom check is for class 2")
    rng = rng or random.Random(0)
    p, n = L.p, L.dim
    rep = AxiomReport()
    Z = center(L)
    P2 = L.P(2)
    if not gfp.contains(Z, P2, p):
        rep.violated.append("P_2 is not central")
    if n == 0:
        return rep

    def rvec():
        return tuple(rng.randrange(p) for _ in range(n))

    for _ in range(samples):
        x, y = rvec(), rvec()
        if not gfp.in_span(Z, L.bracket(x, y), p):
            rep.violated.append(f"commutator of {x}, {y} is not central")
    zs = list(Z) + [gfp.lincomb([rng.randrange(p) for _ in Z], Z, n, p) for _ in range(samples)] if Z else []
    for z in zs:
        if not any(z):
            continue
        if not gfp.in_span(P2, z, p):
            rep.pending.append(f"central {z} has level 1")
            continue
        found = False
        for x in L.basis() + [rvec() for _ in range(samples)]:
            y = _solve_bracket(L, [x], [z])
            if y is not None:
                if L.bracket(x, y) != tuple(z):
                    rep.violated.append(f"solver returned a wrong commutator for {z}")
                found = True
                break
        if found:
            rep.satisfied += 1
        else:
            rep.pending.append(f"central {z} is not yet a commutator")
    for _ in range(samples):
        k = rng.randint(1, max_n)
        a = [rvec() for _ in range(k)]
        if gfp.rank(list(Z) + a, p) != len(Z) + k:
            continue
        cs = [gfp.lincomb([rng.randrange(p) for _ in Z], Z, n, p) if Z else gfp.zero(n)
              for _ in range(k)]
        b = _solve_bracket(L, a, cs)
        if b is None:
            rep.pending.append(f"no b yet with [a_i, b] = c_i for a = {a}")
            continue
        if any(L.bracket(ai, b) != tuple(ci) for ai, ci in zip(a, cs)):
            rep.violated.append("solver returned a wrong solution")
        else:
            rep.satisfied += 1
    return rep
