"""Random Lazard Lie algebras and configurations for property checks."""
from __future__ import annotations

import random
from typing import Sequence

from . import gfp
from .free_lie import free_lla
from .gfp import Mat, Vec
from .lla import Lla, LlaHom, closure, ideal_closure, quotient, sub_lla


def random_vec(rng: random.Random, n: int, p: int) -> Vec:
    return tuple(rng.randrange(p) for _ in range(n))


def random_in(rng: random.Random, rows: Sequence[Sequence[int]], n: int, p: int) -> Vec:
    return gfp.lincomb([rng.randrange(p) for _ in rows], rows, n, p)


def random_lla(rng: random.Random, p: int, c: int, max_dim: int = 8, gens: int | None = None,
               tries: int = 50) -> Lla:
    """A quotient of a weighted free algebra by a random ideal, of dim <= max_dim."""
    for _ in range(tries):
        n = gens if gens is not None else rng.randint(1, 3)
        weights = tuple(rng.choice([1, 1, 1, 2]) if c >= 2 else 1 for _ in range(n))
        F = free_lla(n, weights, c, p)
        rels = []
        k = rng.randint(0, 3)
        deep = F.P(2) if F.P(2) else F.basis()
        for _ in range(k):
            rels.append(random_in(rng, deep, F.dim, p))
        # cut down until small enough
        while True:
            I = ideal_closure(F, rels)
            if F.dim - len(I) <= max_dim:
                break
            rels.append(random_in(rng, F.basis(), F.dim, p))
        Q, _ = quotient(F, I)
        if Q.dim >= 1:
            return Q
    return Q


def random_config(rng: random.Random, p: int, c: int, max_dim: int = 8, ambient: int = 10):
    """(L, C, A, B): subalgebras C ⊆ A, B of a random ambient L, as rref bases."""
    L = random_lla(rng, p, c, ambient)
    n = L.dim
    C = closure(L, [random_vec(rng, n, p) for _ in range(rng.randint(0, 1))])
    if len(C) == n:
        C = []
    A = closure(L, C + [random_vec(rng, n, p) for _ in range(rng.randint(0, 2))])
    B = closure(L, C + [random_vec(rng, n, p) for _ in range(rng.randint(0, 2))])
    return L, C, A, B


def as_inputs(L: Lla, C: Mat, A: Mat, B: Mat):
    """Sub-Llas and the two inclusions C -> A, C -> B."""
    Cl, iC = sub_lla(L, C)
    Al, iA = sub_lla(L, A)
    Bl, iB = sub_lla(L, B)
    p = L.p
    jA = LlaHom(Cl, Al, [gfp.coords(iA.images, v, p) for v in iC.images])
    jB = LlaHom(Cl, Bl, [gfp.coords(iB.images, v, p) for v in iC.images])
    return Cl, Al, Bl, jA, jB, iA, iB
