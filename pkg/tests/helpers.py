"""Shared generators for randomized complex/cohomology tests."""

import random
from fractions import Fraction

from leibten.exactlin import Matrix, kernel_basis, rat
from leibten.structures import (
    EmbeddingTensor,
    LieAlgebra,
    LieLeibnizTriple,
    LieRepPair,
    Representation,
    adjoint_pair,
    heisenberg_algebra,
)


def affine2_algebra() -> LieAlgebra:
    """The unique non-abelian 2-dimensional algebra: [e0, e1] = e0."""
    return LieAlgebra.from_brackets(2, {(0, 1): {0: 1}})


def abelian_pair(dim_g: int, mats: list[Matrix]) -> LieRepPair:
    algebra = LieAlgebra.from_brackets(dim_g, {})
    return LieRepPair(algebra, Representation(tuple(mats)))


def pair_pool() -> list[LieRepPair]:
    """Small algebra/module pairs with genuinely different shapes."""
    pairs = [
        adjoint_pair(heisenberg_algebra()),
        adjoint_pair(affine2_algebra()),
    ]
    # abelian algebra acting by commuting upper-triangular matrices, 3-dim module
    a = Matrix.from_rows([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    pairs.append(abelian_pair(2, [a, a @ a]))
    # affine algebra on a 2-dim non-adjoint module: [r0, r1] = r0
    alg = affine2_algebra()
    r0 = Matrix.from_rows([[0, 1], [0, 0]])
    r1 = Matrix.from_rows([[0, 0], [0, 1]])
    pairs.append(LieRepPair(alg, Representation((r0, r1))))
    return pairs


def equivariance_kernel(pair: LieRepPair) -> list[tuple[Fraction, ...]]:
    """Basis of maps module -> algebra that intertwine the action with the
    adjoint action; every such map satisfies the tensor constraint."""
    g, v = pair.dim_g, pair.dim_v
    rows = []
    ad = pair.algebra.ad()
    for x in range(g):
        for u in range(v):
            for s in range(g):
                # coefficient of T[m, w] in (T rho(x) - ad_x T)(e_u) at e_s
                row = [rat(0)] * (g * v)
                for w in range(v):
                    c = pair.rep.matrices[x].at(w, u)
                    if c:
                        row[s * v + w] += c
                for m in range(g):
                    c = ad[x].at(s, m)
                    if c:
                        row[m * v + u] -= c
                rows.append(row)
    return kernel_basis(Matrix.from_rows(rows))


def random_equivariant_triple(
    pair: LieRepPair, rng: random.Random
) -> LieLeibnizTriple:
    basis = equivariance_kernel(pair)
    g, v = pair.dim_g, pair.dim_v
    flat = [rat(0)] * (g * v)
    for vec in basis:
        c = rat(rng.randint(-3, 3))
        if c:
            flat = [a + c * b for a, b in zip(flat, vec)]
    t = Matrix.from_rows([flat[s * v : (s + 1) * v] for s in range(g)])
    triple = LieLeibnizTriple(pair, EmbeddingTensor(t))
    assert triple.validate().ok
    return triple


def random_nilpotent3_triple(rng: random.Random) -> LieLeibnizTriple:
    """A random member of one of the two tensor families on the 3-dim
    nilpotent algebra (not equivariant in general)."""
    from leibten.structures import heisenberg_family

    if rng.random() < 0.5:
        a, b = rng.randint(-3, 3), rng.randint(-3, 3)
        return heisenberg_family([[a, a, 0], [b, b, 0], [0, 0, 0]])
    a, b = rng.randint(-3, 3), rng.randint(-3, 3)
    return heisenberg_family([[1, 0, 0], [0, 1, 0], [a, b, 1]])


def random_triples(count: int, seed: int = 0x7219) -> list[LieLeibnizTriple]:
    rng = random.Random(seed)
    pool = pair_pool()
    out = []
    while len(out) < count:
        i = len(out)
        if i % len(pool) == len(pool) - 1:
            out.append(random_nilpotent3_triple(rng))
        else:
            out.append(random_equivariant_triple(pool[i % len(pool)], rng))
    return out
