"""Canonical bases of tensor / exterior / mixed powers, shuffles, Koszul signs.

Index conventions: everything in this package is 0-based internally; reports
and the CLI shift to 1-based only at the serialization boundary.  Keeping the
internal picture 0-based but the *formulas* 1-based (as in the classical
displays) is the main source of off-by-one bugs, so each operation documents
which picture it lives in.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from math import comb
from typing import Iterable, Sequence


@dataclass(frozen=True)
class SpaceLabel:
    """A named finite-dimensional vector space."""

    name: str
    dim: int

    def __post_init__(self) -> None:
        if self.dim < 0:
            raise ValueError("negative dimension")


class BasisKind(Enum):
    TENSOR = "tensor"
    WEDGE = "wedge"
    MIXED = "mixed"  # strictly increasing wedge prefix, free tail


@dataclass(frozen=True)
class BasisTuple:
    indices: tuple[int, ...]
    kind: BasisKind
    wedge_prefix: int = 0  # length of the strictly increasing prefix (MIXED)


def tensor_tuples(dims: Sequence[int]) -> list[tuple[int, ...]]:
    """Lexicographic basis of a tensor product with per-slot dimensions."""
    return list(itertools.product(*(range(d) for d in dims)))


def wedge_tuples(dim: int, degree: int) -> list[tuple[int, ...]]:
    """Strictly increasing tuples: the canonical basis of the degree-th exterior power."""
    return list(itertools.combinations(range(dim), degree))


def mixed_tuples(dim_wedge: int, wedge_degree: int, dim_last: int) -> list[tuple[int, ...]]:
    """Basis of (exterior power of one space) tensor (one slot of another)."""
    return [
        w + (v,)
        for w in wedge_tuples(dim_wedge, wedge_degree)
        for v in range(dim_last)
    ]


def enumerate_basis(
    spaces: Sequence[SpaceLabel], kind: BasisKind, wedge_prefix: int | None = None
) -> list[BasisTuple]:
    """Ordered basis tuples for the product of `spaces` under `kind`.

    TENSOR: plain lexicographic product.
    WEDGE: all slots must share one space; strictly increasing tuples.
    MIXED: the first `wedge_prefix` slots share one space and increase strictly,
    the remaining slots are free tensor slots.
    """
    if kind is BasisKind.TENSOR:
        return [
            BasisTuple(t, kind) for t in tensor_tuples([s.dim for s in spaces])
        ]
    if kind is BasisKind.WEDGE:
        if len({s.name for s in spaces}) > 1:
            raise ValueError("wedge slots must share one space")
        dim = spaces[0].dim if spaces else 0
        return [BasisTuple(t, kind, len(spaces)) for t in wedge_tuples(dim, len(spaces))]
    if kind is BasisKind.MIXED:
        if wedge_prefix is None:
            raise ValueError("MIXED needs wedge_prefix")
        prefix = spaces[:wedge_prefix]
        if len({s.name for s in prefix}) > 1:
            raise ValueError("wedge prefix slots must share one space")
        pdim = prefix[0].dim if prefix else 0
        tails = tensor_tuples([s.dim for s in spaces[wedge_prefix:]])
        return [
            BasisTuple(w + t, kind, wedge_prefix)
            for w in wedge_tuples(pdim, wedge_prefix)
            for t in tails
        ]
    raise ValueError(f"unknown kind {kind!r}")


def perm_sign(perm: Sequence[int]) -> int:
    """Sign of a permutation given as a tuple of images (0-based)."""
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def sort_with_sign(indices: Sequence[int]) -> tuple[tuple[int, ...], int]:
    """Sort a tuple, tracking the permutation sign; sign 0 if entries repeat."""
    order = sorted(range(len(indices)), key=lambda i: indices[i])
    srt = tuple(indices[i] for i in order)
    if any(srt[i] == srt[i + 1] for i in range(len(srt) - 1)):
        return srt, 0
    return srt, perm_sign(order)


@dataclass(frozen=True)
class Shuffle:
    """A block-increasing rearrangement.

    `perm` lists which input feeds each slot: slot i receives input perm[i]
    (0-based).  `sign` is the ungraded permutation sign.
    """

    perm: tuple[int, ...]
    sign: int


def shuffles(p: int, q: int) -> list[Shuffle]:
    """All (p,q)-shuffles: perms of 0..p+q-1 increasing on the first p slots
    and on the last q slots.  When p or q is 0 the only shuffle is the identity."""
    if p < 0 or q < 0:
        raise ValueError("negative block size")
    n = p + q
    out = []
    for first in itertools.combinations(range(n), p):
        rest = tuple(i for i in range(n) if i not in first)
        perm = first + rest
        out.append(Shuffle(perm, perm_sign(perm)))
    return out


def block_shuffles(sizes: Sequence[int]) -> list[Shuffle]:
    """Shuffles with an arbitrary list of increasing blocks."""
    n = sum(sizes)
    out = []

    def rec(remaining: tuple[int, ...], blocks: list[tuple[int, ...]], k: int):
        if k == len(sizes):
            perm = tuple(itertools.chain.from_iterable(blocks))
            out.append(Shuffle(perm, perm_sign(perm)))
            return
        for chosen in itertools.combinations(remaining, sizes[k]):
            rest = tuple(i for i in remaining if i not in chosen)
            rec(rest, blocks + [chosen], k + 1)

    rec(tuple(range(n)), [], 0)
    return out


def e_shuffles(block_sizes: Sequence[int]) -> list[Shuffle]:
    """Block shuffles whose block-final entries increase.

    With blocks of sizes (k_1,...,k_p), keep exactly those shuffles where the
    images of the last slot of each block increase left to right.  Used by the
    multi-component homomorphism sums.
    """
    if any(k < 1 for k in block_sizes):
        raise ValueError("block sizes must be >= 1")
    ends = list(itertools.accumulate(block_sizes))
    result = []
    for sh in block_shuffles(block_sizes):
        finals = [sh.perm[e - 1] for e in ends]
        if all(a < b for a, b in zip(finals, finals[1:])):
            result.append(sh)
    return result


def koszul_sign(sigma: Sequence[int], degrees: Sequence[int]) -> int:
    """Koszul sign of rearranging v_0 ... v_{n-1} into v_{sigma[0]} ... v_{sigma[n-1]}.

    `degrees[k]` is the degree of v_k.  Each inverted pair contributes
    (-1)^(product of the two degrees):
        v_0 (.) ... (.) v_{n-1} = sign * v_{sigma[0]} (.) ... (.) v_{sigma[n-1]}
    """
    if len(sigma) != len(degrees):
        raise ValueError("length mismatch")
    sign = 1
    for i in range(len(sigma)):
        for j in range(i + 1, len(sigma)):
            if sigma[i] > sigma[j] and degrees[sigma[i]] % 2 and degrees[sigma[j]] % 2:
                sign = -sign
    return sign


def graded_sign(sigma: Sequence[int], degrees: Sequence[int]) -> int:
    """epsilon(sigma) * sgn(sigma): the sign used by graded-antisymmetric sums."""
    return koszul_sign(sigma, degrees) * perm_sign(sigma)


def shuffle_count(p: int, q: int) -> int:
    return comb(p + q, p)


def positions_of(values: Iterable[int], perm: Sequence[int]) -> list[int]:
    """Slots of `perm` holding the given input values."""
    index = {v: i for i, v in enumerate(perm)}
    return [index[v] for v in values]
