"""Free amalgamation of Lazard Lie algebras.

Three layers build A ⊗_C B:

* ``stage1`` glues two one-dimensional ideal extensions of C as the
  semidirect product of C with a weighted free algebra on two generators;
* ``stage2`` amalgamates a one-dimensional ideal extension with an arbitrary
  extension by recursion on the rank of the latter, alternating between the
  two sides;
* ``free_amalgam`` walks an ordered Malcev basis of A and applies ``stage2``
  once per basis vector.

Every result keeps a trace of how it was built; ``freeness_check`` threads
homomorphisms through that trace to produce the induced map out of S.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from . import gfp
from .free_lie import FreeLie
from .gfp import Mat, Vec
from .lla import (Lla, LlaError, LlaHom, Rank, Violation, basic_generator, closure,
                  extend_from_generators, hom_check, is_ideal_in, is_malcev, level_over,
                  malcev_basis, rank, semidirect, sub_lla)


class AmalgamInvariantError(AssertionError):
    """A construction invariant failed; this indicates a bug, not bad input."""


# -- small map helpers ---------------------------------------------------------------

def _hom(src: Lla, tgt: Lla, images) -> LlaHom:
    return LlaHom(src, tgt, [tuple(v) for v in images])


def _coords_in(rows: Sequence[Sequence[int]], v: Sequence[int], p: int) -> Vec:
    x = gfp.coords(rows, v, p)
    if x is None:
        raise AmalgamInvariantError("vector expected in a span is missing from it")
    return x


def _factor_through(f: LlaHom, g: LlaHom) -> LlaHom:
    """The map h with g ∘ h = f, assuming image(f) ⊆ image(g) and g injective."""
    p = f.target.p
    return _hom(f.source, g.source, [_coords_in(g.images, v, p) for v in f.images])


def _certify(f: LlaHom, what: str) -> LlaHom:
    got = hom_check(f)
    if isinstance(got, Violation):
        raise AmalgamInvariantError(f"{what} is not a homomorphism ({got})")
    return got


def is_embedding(f: LlaHom) -> bool:
    """Injective, bracket- and flag-preserving, and flag-reflecting."""
    if isinstance(hom_check(f), Violation) or not f.is_injective():
        return False
    A, S, p = f.source, f.target, f.target.p
    img = f.image()
    for i in range(1, A.c + 2):
        if len(gfp.intersect_spans(img, S.P(i), p)) != len(A.P(i)):
            return False
    return True


# -- results and traces -----------------------------------------------------------------

@dataclass
class Stage1Trace:
    alpha: int
    beta: int
    free: FreeLie | None
    base_dim: int
    a: Vec | None
    b: Vec | None
    hall: list[Vec] = field(default_factory=list)  # Hall tuple evaluated in S
    degenerate: str | None = None  # "A=C" or "B=C"


@dataclass
class Step:
    side: str  # "A" or "B"
    child: "AmalgamResult"
    other: LlaHom  # child's B-input into the current algebra of the other side
    rank: Rank  # rank of the child's B-input over its base
    level: int  # level of the new base over the previous one


@dataclass
class Stage2Trace:
    mu: int
    nu: int
    rank_in: Rank
    steps: list[Step] = field(default_factory=list)
    final: "AmalgamResult | None" = None
    ending: str = ""  # "C=D", "D=C'" or "B=C"
    gains: list[tuple[str, int, int, int]] = field(default_factory=list)


@dataclass
class Stage3Trace:
    chain: list[LlaHom]  # inclusions A_i -> A
    children: list["AmalgamResult"]


@dataclass
class AmalgamResult:
    S: Lla
    embA: LlaHom
    embB: LlaHom
    iA: LlaHom
    iB: LlaHom
    kind: str
    trace: Stage1Trace | Stage2Trace | Stage3Trace | None = None
    H: Mat | None = None

    @property
    def A(self) -> Lla:
        return self.iA.target

    @property
    def B(self) -> Lla:
        return self.iB.target

    @property
    def C(self) -> Lla:
        return self.iA.source

    def image_A(self) -> Mat:
        return self.embA.image()

    def image_B(self) -> Mat:
        return self.embB.image()

    def image_C(self) -> Mat:
        return gfp.span(self.embA.apply_all(self.iA.images), self.S.p)


def _check_inputs(A: Lla, B: Lla, iA: LlaHom, iB: LlaHom) -> None:
    if iA.source is not iB.source and iA.source != iB.source:
        raise LlaError("the two inclusions must start from the same C")
    if not (A.p == B.p == iA.source.p and A.c == B.c == iA.source.c):
        raise LlaError("A, B, C must share p and c")
    for f, name in ((iA, "C -> A"), (iB, "C -> B")):
        if not is_embedding(f):
            raise LlaError(f"{name} is not an embedding")


# -- Stage I -------------------------------------------------------------------------------

def stage1(C: Lla, A: Lla, B: Lla, iA: LlaHom, iB: LlaHom, check: bool = True) -> AmalgamResult:
    """Amalgam of two extensions of C of codimension <= 1 in which C is an ideal."""
    if check:
        _check_inputs(A, B, iA, iB)
    p, c = C.p, C.c
    CA, CB = iA.image(), iB.image()
    for L, sub, name in ((A, CA, "A"), (B, CB, "B")):
        if not is_ideal_in(L, sub):
            raise LlaError(f"C is not an ideal of {name}")
    a = basic_generator(A, CA)
    b = basic_generator(B, CB)
    if a is None:
        # A = C: the amalgam is B itself
        embA = _hom(A, B, [iB(_coords_in(iA.images, e, p)) for e in A.basis()])
        r = AmalgamResult(B, embA, _hom(B, B, B.basis()), iA, iB, "stage1",
                          Stage1Trace(0, B.level(b) if b is not None else c + 1, None, C.dim, None, b,
                                      degenerate="A=C"))
        r.H = B.basis()
        return r
    if b is None:
        embB = _hom(B, A, [iA(_coords_in(iB.images, e, p)) for e in B.basis()])
        r = AmalgamResult(A, _hom(A, A, A.basis()), embB, iA, iB, "stage1",
                          Stage1Trace(A.level(a), c + 1, None, C.dim, a, None, degenerate="B=C"))
        r.H = CA
        return r
    alpha, beta = A.level(a), B.level(b)
    F = FreeLie(2, (alpha, beta), c, p)
    Fl = F.to_lla()
    n = C.dim

    def restricted_ad(L: Lla, x: Vec, inc: LlaHom) -> list[Vec]:
        return [_coords_in(inc.images, L.bracket(x, ci), p) for ci in inc.images]

    da = restricted_ad(A, a, iA)
    db = restricted_ad(B, b, iB)
    from .lla import map_commutator

    act: list[list[Vec]] = []
    for k in range(F.dim):
        if F.leaf[k] is not None:
            act.append(da if F.leaf[k] == 0 else db)
        else:
            act.append(map_commutator(p, act[F.left[k]], act[F.right[k]]))
    S = semidirect(C, Fl, act)
    N = S.dim

    def s_vec(cpart: Sequence[int], fpart: dict[int, int]) -> Vec:
        v = list(cpart) + [0] * F.dim
        for k, x in fpart.items():
            v[n + k] = x % p
        return tuple(v)

    X = s_vec([0] * n, {F.gen_rank[0]: 1})
    Y = s_vec([0] * n, {F.gen_rank[1]: 1})

    def ext_map(L: Lla, inc: LlaHom, gen: Vec, gen_img: Vec) -> LlaHom:
        rows = list(inc.images) + [gen]
        imgs = [s_vec(gfp.unit(k, n), {}) for k in range(n)] + [gen_img]
        out = []
        for e in L.basis():
            co = _coords_in(rows, e, p)
            out.append(gfp.lincomb(co, imgs, N, p))
        return _hom(L, S, out)

    embA = ext_map(A, iA, a, X)
    embB = ext_map(B, iB, b, Y)
    hall = [s_vec([0] * n, {k: 1}) for k in range(F.dim)]
    Dsub = gfp.span([s_vec(gfp.unit(k, n), {}) for k in range(n)] + [Y] +
                    [hall[k] for k in range(F.dim) if F.leaf[k] is None], p)
    tr = Stage1Trace(alpha, beta, F, n, a, b, hall)
    return AmalgamResult(S, embA, embB, iA, iB, "stage1", tr, Dsub)


# -- Stage II --------------------------------------------------------------------------------

def _sub(L: Lla, rows) -> tuple[Lla, LlaHom]:
    return sub_lla(L, gfp.span(rows, L.p))


def stage2(C: Lla, A: Lla, B: Lla, iA: LlaHom, iB: LlaHom, depth: int = 0) -> AmalgamResult:
    """Amalgam of a one-dimensional ideal extension A of C with an arbitrary B ⊇ C.

    The result carries H (a subspace of S) with embB(B) ⊆ H ⊴ S, S = H + span(a).
    Inputs are certified only at depth 0; deeper calls receive maps built here.
    """
    if depth == 0:
        _check_inputs(A, B, iA, iB)
    p, c = C.p, C.c
    CA = iA.image()
    if not is_ideal_in(A, CA):
        raise LlaError("C is not an ideal of A")
    CB = iB.image()
    a = basic_generator(A, CA)
    rk_in = rank(B, CB)
    if a is None or len(CB) == B.dim:
        if len(CB) == B.dim:
            # B = C: the amalgam is A, with H = C
            embB = _hom(B, A, [iA(_coords_in(iB.images, e, p)) for e in B.basis()])
            r = AmalgamResult(A, _hom(A, A, A.basis()), embB, iA, iB, "stage2",
                              Stage2Trace(A.level(a) if a is not None else c + 1, c + 1, rk_in,
                                          ending="B=C"), CA)
            return r
        # A = C: the amalgam is B
        embA = _hom(A, B, [iB(_coords_in(iA.images, e, p)) for e in A.basis()])
        r = AmalgamResult(B, embA, _hom(B, B, B.basis()), iA, iB, "stage2",
                          Stage2Trace(c + 1, B.level(malcev_basis(B, CB)[-1]), rk_in, ending="A=C"),
                          B.basis())
        return r
    if depth > 64:
        raise AmalgamInvariantError("stage II recursion did not terminate")
    mu = level_over(A, CA)
    bs = malcev_basis(B, CB)
    nu = B.level(bs[-1])
    tr = Stage2Trace(mu, nu, rk_in)

    # D_0 = span(C, b_1 .. b_{s-1}), an ideal of B
    Dl, iDB = _sub(B, list(CB) + bs[:-1])
    iCD = _factor_through(iB, iDB)
    Cl, iCA = C, iA
    Acur, Bcur = A, B
    eA = _hom(A, A, A.basis())
    eB = _hom(B, B, B.basis())
    i = 0
    while True:
        if i > c + 1:
            raise AmalgamInvariantError("stage II alternation exceeded c+1 rounds")
        # A-side: A_{i+1} = A_i amalgamated with D_i over C_i
        rk_child = rank(Dl, iCD.image())
        if not rk_child.precedes(rk_in):
            raise AmalgamInvariantError(f"rank did not drop: {rk_child} vs {rk_in}")
        lev_DC = rk_child.level
        want = min(i * (mu + nu) + nu, c + 1)
        tr.gains.append(("D/C", i, lev_DC, want))
        if lev_DC < want:
            raise AmalgamInvariantError(f"lev(D_{i}/C_{i}) = {lev_DC} < {want}")
        child = stage2(Cl, Acur, Dl, iCA, iCD, depth + 1)
        tr.steps.append(Step("A", child, iDB, rk_child, lev_DC))
        Anew = child.S
        eA = child.embA.compose(eA)
        Cnew, iCnewA = _sub(Anew, child.H)
        iDCnew = _factor_through(child.embB, iCnewA)
        Acur, Cl_prev, iCA_prev = Anew, Cl, iCA
        Cl, iCA = Cnew, iCnewA
        lev_CD = level_over(Cnew, iDCnew.image())
        want = min((i + 1) * (mu + nu), c + 1)
        tr.gains.append(("C/D", i, lev_CD, want))
        if lev_CD < want:
            raise AmalgamInvariantError(f"lev(C_{i + 1}/D_{i}) = {lev_CD} < {want}")
        if len(iDCnew.image()) == Cnew.dim:
            # D_i = C_{i+1}: glue A_{i+1} and B_i over D_i
            fin = stage1(Dl, Acur, Bcur, iCA.compose(iDCnew), iDB, check=False)
            tr.ending = "D=C'"
            break
        # B-side: B_{i+1} = B_i amalgamated with C_{i+1} over D_i
        rk_child = rank(Cnew, iDCnew.image())
        if not rk_child.precedes(rk_in):
            raise AmalgamInvariantError(f"rank did not drop: {rk_child} vs {rk_in}")
        child = stage2(Dl, Bcur, Cnew, iDB, iDCnew, depth + 1)
        tr.steps.append(Step("B", child, iCA, rk_child, lev_CD))
        Bnew = child.S
        eB = child.embA.compose(eB)
        Dnew, iDnewB = _sub(Bnew, child.H)
        iCDnew = _factor_through(child.embB, iDnewB)
        Bcur, Dl, iDB, iCD = Bnew, Dnew, iDnewB, iCDnew
        i += 1
        if len(iCD.image()) == Dl.dim:
            # C_i = D_i: glue A_i and B_i over C_i
            fin = stage1(Cl, Acur, Bcur, iCA, iDB.compose(iCD), check=False)
            tr.ending = "C=D"
            break
    tr.final = fin
    S = fin.S
    embA = fin.embA.compose(eA)
    embB = fin.embB.compose(eB)
    res = AmalgamResult(S, embA, embB, iA, iB, "stage2", tr, fin.H)
    return res


# -- Stage III ---------------------------------------------------------------------------------

def free_amalgam(A: Lla, B: Lla, iA: LlaHom, iB: LlaHom) -> AmalgamResult:
    """A ⊗_C B for arbitrary extensions, C given by the two inclusions."""
    _check_inputs(A, B, iA, iB)
    p = A.p
    CA = iA.image()
    avec = malcev_basis(A, CA)
    if not avec:
        embA = _hom(A, B, [iB(_coords_in(iA.images, e, p)) for e in A.basis()])
        return AmalgamResult(B, embA, _hom(B, B, B.basis()), iA, iB, "stage3",
                             Stage3Trace([], []))
    chain: list[LlaHom] = []
    for k in range(1, len(avec) + 1):
        chain.append(_sub(A, list(CA) + avec[:k])[1])
    children: list[AmalgamResult] = []
    A1 = chain[0].source
    r = stage2(iA.source, A1, B, _factor_through(iA, chain[0]), iB, depth=1)
    children.append(r)
    embB = r.embB
    for k in range(1, len(avec)):
        inc = _factor_through(chain[k - 1], chain[k])  # A_k -> A_{k+1}
        r = stage2(chain[k - 1].source, chain[k].source, r.S, inc, r.embA, depth=1)
        children.append(r)
        embB = r.embB.compose(embB)
    last = chain[-1]
    # last.source spans A with a different basis; precompose with its inverse
    to_last = _hom(A, last.source, [_coords_in(last.images, e, p) for e in A.basis()])
    embA = r.embA.compose(to_last)
    return AmalgamResult(r.S, embA, embB, iA, iB, "stage3", Stage3Trace(chain, children))


def amalgamate(A: Lla, B: Lla, iA: LlaHom, iB: LlaHom, check: bool = True) -> AmalgamResult:
    """free_amalgam plus certification of the result."""
    r = free_amalgam(A, B, iA, iB)
    if check:
        problems = amalgam_violations(r)
        if problems:
            raise AmalgamInvariantError("; ".join(problems))
    return r


# -- verification predicates ------------------------------------------------------------------

def generates(r: AmalgamResult) -> bool:
    return len(closure(r.S, r.image_A() + r.image_B())) == r.S.dim


def is_strong(r: AmalgamResult) -> bool:
    p = r.S.p
    return gfp.intersect_spans(r.image_A(), r.image_B(), p) == r.image_C()


def commutes(r: AmalgamResult) -> bool:
    return r.embA.compose(r.iA).images == r.embB.compose(r.iB).images


def amalgam_violations(r: AmalgamResult) -> list[str]:
    from .lla import validate

    out = []
    v = validate(r.S)
    if v is not None:
        out.append(f"S invalid: {v}")
    if not is_embedding(r.embA):
        out.append("A -> S is not an embedding")
    if not is_embedding(r.embB):
        out.append("B -> S is not an embedding")
    if not commutes(r):
        out.append("embeddings disagree on C")
    if not generates(r):
        out.append("S is not generated by A and B")
    if not is_strong(r):
        out.append("A ∩ B is larger than C")
    return out


def stage2_gains_ok(r: AmalgamResult) -> bool:
    """Per-step level inequalities recorded in a stage II trace (recursively)."""
    tr = r.trace
    if isinstance(tr, Stage2Trace):
        if any(got < want for _, _, got, want in tr.gains):
            return False
        return all(stage2_gains_ok(s.child) for s in tr.steps)
    if isinstance(tr, Stage3Trace):
        return all(stage2_gains_ok(ch) for ch in tr.children)
    return True


def h_level_ok(r: AmalgamResult) -> bool:
    """lev(H/B) = lev(a) + lev(B/C) for a stage II result."""
    if r.kind != "stage2" or r.H is None:
        raise ValueError("not a stage II result")
    S, c = r.S, r.S.c
    tr = r.trace
    lev_BC = level_over(r.B, r.iB.image())
    want = min(tr.mu + lev_BC, c + 1)
    Hs = gfp.span(r.H, S.p)
    if not gfp.contains(Hs, r.image_B(), S.p):
        return False
    if not is_ideal_in(S, Hs):
        return False
    got = level_over(S, r.image_B(), Hs)
    return got == want


# -- freeness -------------------------------------------------------------------------------------

def _induced(r: AmalgamResult, f: LlaHom, g: LlaHom) -> LlaHom:
    """The map S -> L extending f on A and g on B, built along the trace."""
    L = f.target
    p = L.p
    tr = r.trace
    if r.kind == "stage1":
        if tr.degenerate == "A=C":
            return g
        if tr.degenerate == "B=C":
            return f
        F = tr.free
        n = tr.base_dim
        imgs: list[Vec] = [f(ci) for ci in r.iA.images]
        hall: list[Vec] = []
        for k in range(F.dim):
            if F.leaf[k] is not None:
                hall.append(f(tr.a) if F.leaf[k] == 0 else g(tr.b))
            else:
                hall.append(L.bracket(hall[F.left[k]], hall[F.right[k]]))
        assert len(imgs) == n
        return _hom(r.S, L, imgs + hall)
    if r.kind == "stage2":
        if tr.ending == "B=C":
            return f
        if tr.ending == "A=C":
            return g
        fcur, gcur = f, g
        for st in tr.steps:
            if st.side == "A":
                fcur = _induced(st.child, fcur, gcur.compose(st.other))
            else:
                gcur = _induced(st.child, gcur, fcur.compose(st.other))
        return _induced(tr.final, fcur, gcur)
    if r.kind == "stage3":
        if not tr.children:
            return g
        j = None
        for k, child in enumerate(tr.children):
            fk = f.compose(tr.chain[k])
            j = _induced(child, fk, g if k == 0 else j)
        return j
    raise ValueError(f"unknown result kind {r.kind}")


def freeness_check(r: AmalgamResult, f: LlaHom, g: LlaHom) -> LlaHom:
    """Induced homomorphism S -> L for f: A -> L and g: B -> L agreeing on C.

    Raises AmalgamInvariantError if the trace-built map fails certification;
    the construction guarantees it exists, so a failure is a bug.
    """
    if f.compose(r.iA).images != g.compose(r.iB).images:
        raise LlaError("f and g disagree on C")
    for h_, name in ((f, "f"), (g, "g")):
        if isinstance(hom_check(h_), Violation):
            raise LlaError(f"{name} is not a homomorphism")
    h = _induced(r, f, g)
    got = hom_check(h)
    if isinstance(got, Violation):
        raise AmalgamInvariantError(f"induced map is not a homomorphism: {got}")
    if h.compose(r.embA).images != f.images or h.compose(r.embB).images != g.images:
        raise AmalgamInvariantError("induced map does not extend f and g")
    return h


def induced_by_generation(r: AmalgamResult, f: LlaHom, g: LlaHom) -> LlaHom | None:
    """The same map, found by closing the prescription on A ∪ B under brackets."""
    pairs = list(zip(r.embA.images, f.images)) + list(zip(r.embB.images, g.images))
    return extend_from_generators(r.S, f.target, pairs)


# -- independence --------------------------------------------------------------------------------

def _gen_sub(L: Lla, rows) -> tuple[Lla, LlaHom]:
    return sub_lla(L, closure(L, rows))


def free_on_two(L: Lla, a: Vec, b: Vec) -> bool:
    """⟨a, b⟩ ≅ F_c(X, Y, lev a, lev b) via a -> X, b -> Y."""
    p, c = L.p, L.c
    alpha, beta = L.level(a), L.level(b)
    if alpha > c or beta > c:
        return False
    F = FreeLie(2, (alpha, beta), c, p)
    imgs: list[Vec] = []
    for k in range(F.dim):
        if F.leaf[k] is not None:
            imgs.append(tuple(a) if F.leaf[k] == 0 else tuple(b))
        else:
            imgs.append(L.bracket(imgs[F.left[k]], imgs[F.right[k]]))
    if gfp.rank(imgs, p) != F.dim:
        return False
    gen = closure(L, [a, b])
    if len(gen) != F.dim:
        return False
    for i in range(1, c + 2):
        want = gfp.span([imgs[k] for k in range(F.dim) if F.deg[k] >= i], p)
        if gfp.intersect_spans(gen, L.P(i), p) != want:
            return False
    return True


def indep_singletons(L: Lla, a: Vec, b: Vec, C: Mat) -> bool:
    """Three-condition criterion for a single a and b over an ideal C."""
    p = L.p
    C = gfp.span(C, p)
    A1 = closure(L, C + [tuple(a)])
    B1 = closure(L, C + [tuple(b)])
    if not (is_ideal_in(L, C, A1) and is_ideal_in(L, C, B1)):
        raise LlaError("criterion needs C to be an ideal of both extensions")
    a2 = basic_generator(L, C, A1)
    b2 = basic_generator(L, C, B1)
    if a2 is None or b2 is None:
        return True
    AB = closure(L, C + [a2, b2])
    if not is_ideal_in(L, C, AB):
        return False
    ab = closure(L, [a2, b2])
    if gfp.intersect_spans(ab, C, p):
        return False
    return free_on_two(L, a2, b2)


class Undecided(RuntimeError):
    pass


def indep_otimes(L: Lla, a: Sequence[Vec], b: Sequence[Vec], C: Mat, ceiling: int = 8,
                 use_criterion: bool = True) -> bool:
    """Whether ⟨Cab⟩ is the free amalgam of ⟨Ca⟩ and ⟨Cb⟩ over C inside L."""
    from .lla import SearchRefused, iso_search

    p = L.p
    C = closure(L, C)
    a = [tuple(v) for v in a]
    b = [tuple(v) for v in b]
    if use_criterion and len(a) == 1 and len(b) == 1:
        A1 = closure(L, C + a)
        B1 = closure(L, C + b)
        if is_ideal_in(L, C, A1) and is_ideal_in(L, C, B1):
            return indep_singletons(L, a[0], b[0], C)
    Cl, iC = sub_lla(L, C)
    Al, iAL = _gen_sub(L, C + a)
    Bl, iBL = _gen_sub(L, C + b)
    ABl, iABL = _gen_sub(L, C + a + b)
    r = free_amalgam(Al, Bl, _factor_through(iC, iAL), _factor_through(iC, iBL))
    if r.S.dim != ABl.dim:
        return False
    # an isomorphism fixing ⟨Ca⟩ and ⟨Cb⟩ pointwise
    fA = _factor_through(iAL, iABL)
    fB = _factor_through(iBL, iABL)
    fixing = list(zip(r.embA.images, fA.images)) + list(zip(r.embB.images, fB.images))
    try:
        h = iso_search(r.S, ABl, fixing=fixing, ceiling=max(ceiling, 0))
    except SearchRefused as exc:
        raise Undecided(str(exc)) from exc
    return h is not None


def base_change_check(L: Lla, a: Sequence[Vec], b: Sequence[Vec], C: Mat, E: Mat,
                      ceiling: int = 8) -> bool:
    """Whether 'independent over C implies independent over E' held here."""
    p = L.p
    C = closure(L, C)
    E = closure(L, E)
    if not gfp.contains(C, E, p):
        raise LlaError("E must be contained in C")
    for t in (a, b):
        if not (is_malcev(L, t, C) and is_malcev(L, t, E)):
            raise LlaError("tuples must be Malcev over both C and E")
    if not indep_otimes(L, a, b, C, ceiling):
        return True
    return indep_otimes(L, a, b, E, ceiling)
