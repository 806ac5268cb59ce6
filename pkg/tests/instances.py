"""Random amalgam configurations and homomorphism pairs for the law suites."""
from __future__ import annotations

import random
from dataclasses import dataclass

from lazlie import gfp
from lazlie.amalgam import AmalgamResult, Stage1Trace, Stage2Trace, Stage3Trace, amalgamate
from lazlie.lazard import exp_derivation
from lazlie.lla import Lla, LlaHom, closure, der_laz, ideal_closure, identity_hom, quotient
from lazlie.randgen import as_inputs, random_lla, random_vec


def random_config(rng: random.Random, p: int, c: int, ambient: int = 7):
    """(L, C, A, B) with C of up to two generators and A, B up to two more each."""
    L = random_lla(rng, p, c, ambient)
    n = L.dim
    C = closure(L, [random_vec(rng, n, p) for _ in range(rng.choice([0, 0, 1, 1, 2]))])
    if len(C) == n:
        C = []
    A = closure(L, C + [random_vec(rng, n, p) for _ in range(rng.randint(1, 2))])
    B = closure(L, C + [random_vec(rng, n, p) for _ in range(rng.randint(1, 2))])
    return L, C, A, B


@dataclass
class Instance:
    L: Lla
    C: list
    A: list
    B: list
    inputs: tuple  # Cl, Al, Bl, jA, jB, iA, iB
    r: AmalgamResult


def amalgam_instances(rng: random.Random, count: int, max_c: int = 4, max_dim: int = 8,
                      ambient: int = 7, primes=(5, 7), nontrivial: bool = True) -> list[Instance]:
    out = []
    while len(out) < count:
        p = rng.choice(primes)
        c = rng.randint(1, max_c)
        L, C, A, B = random_config(rng, p, c, ambient=ambient)
        if nontrivial and (len(A) == len(C) or len(B) == len(C)) and rng.random() < 0.8:
            continue
        ins = as_inputs(L, C, A, B)
        Cl, Al, Bl, jA, jB, _, _ = ins
        r = amalgamate(Al, Bl, jA, jB)
        if r.S.dim > max_dim:
            continue
        out.append(Instance(L, C, A, B, ins, r))
    return out


def _random_derivation(rng, D, p, constraint=None):
    if not D.maps:
        return None
    coeffs = [rng.randrange(p) for _ in D.maps]
    if constraint is not None:
        if not constraint:
            return None
        coeffs = gfp.lincomb([rng.randrange(p) for _ in constraint], constraint, len(D.maps), p)
    return D.map_of(coeffs)


def _killing(D, C, p):
    """Coefficient vectors of the derivations that vanish on span C."""
    m = len(D.maps)
    if not C:
        return gfp.identity(m)
    n = D.L.dim
    rows = []
    for cvec in C:
        imgs = [gfp.lincomb(cvec, d, n, p) for d in D.maps]
        for t in range(n):
            rows.append([imgs[k][t] for k in range(m)])
    return gfp.nullspace(rows, m, p)


class PairSampler:
    """Pairs (f, g) out of A and B agreeing on C, built from the ambient algebra only."""

    def __init__(self, inst: Instance, rng: random.Random):
        self.inst, self.rng = inst, rng
        L = inst.L
        self.D = der_laz(L)
        self.kill = _killing(self.D, inst.C, L.p)

    def sample(self) -> tuple[LlaHom, LlaHom]:
        rng, L, p = self.rng, self.inst.L, self.inst.L.p
        _, _, _, _, _, iA, iB = self.inst.inputs
        auto = identity_hom(L)
        d = _random_derivation(rng, self.D, p)
        if d is not None:
            auto = exp_derivation(L, d)
        twist = identity_hom(L)
        if rng.random() < 0.6:
            e = _random_derivation(rng, self.D, p, self.kill)
            if e is not None:
                twist = exp_derivation(L, e)
        k = rng.choice([0, 0, 1, 1, 2])
        I = ideal_closure(L, [random_vec(rng, L.dim, p) for _ in range(k)])
        Q, pi = quotient(L, I)
        f = pi.compose(auto).compose(iA)
        g = pi.compose(auto).compose(twist).compose(iB)
        return f, g


def walk(r: AmalgamResult):
    """Every result node of a construction tree, this one included."""
    yield r
    tr = r.trace
    if isinstance(tr, Stage2Trace):
        for st in tr.steps:
            yield from walk(st.child)
        if tr.final is not None:
            yield from walk(tr.final)
    elif isinstance(tr, Stage3Trace):
        for ch in tr.children:
            yield from walk(ch)


def stage1_nodes(r: AmalgamResult):
    return [x for x in walk(r) if isinstance(x.trace, Stage1Trace)]
