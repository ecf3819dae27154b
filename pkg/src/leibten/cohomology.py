"""Cochain complexes controlling the deformation theory of the structures in
:mod:`leibten.structures`.

Four complexes are provided, named by what their cochains are:

* ``ET``    -- maps (module tensor powers) -> algebra, with the operator
  itself twisted into the coefficients; degree 1 is the algebra, degree 0
  is zero.
* ``PAIR``  -- pairs (alternating algebra self-maps, mixed algebra/module
  maps); the complex of the algebra-with-module pair alone.
* ``REG``   -- direct sum of the previous two with the connecting block; the
  complex of the full triple.
* ``COEFF`` -- like ``REG`` but with values in an arbitrary two-term
  representation instead of the triple itself.

Every coboundary is assembled from an explicit display formula.  Each display
has an independent definition through the bracket machinery of
:mod:`leibten.multilinear` (a commutator with the hemisemidirect element, a
derived bracket, or an iterated bracket divided by a factorial); those routes
are asserted against the assembled matrices on seeded sample cochains
whenever the ambient dimensions keep the lifted computation cheap, and the
test-suite exercises the same equalities exhaustively at small dimensions.

Flattening convention, used everywhere a cochain becomes a vector: within one
block, the coordinate of (input tuple, output index) is
``rank(input tuple) * dim_out + output index`` with input tuples ordered
lexicographically (strictly increasing tuples for alternating slots); blocks
are concatenated algebra-part, module-part, then operator-part.  All reported
indices are 0-based internally and 1-based only in rendered reports.

Matrix assembly is independent per column and could be parallelised; it is
kept sequential so results are bit-reproducible, and the exact elimination
behind ranks and representatives is single-threaded by design.
"""

from __future__ import annotations

import math
import os
import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import (
    DimensionMismatch,
    InvalidInputData,
    InvalidRepresentation,
    SizeLimit,
)
from .exactlin import (
    Matrix,
    Rational,
    hstack,
    kernel_basis,
    quotient_dim,
    rank,
    rat,
    rat_str,
    rref,
    solve,
    vstack,
)
from .multilinear import (
    MultilinearMap,
    OutVec,
    balavoine,
    horizontal_lift,
)
from .structures import (
    EmbeddingTensor,
    LieAlgebra,
    LieLeibnizTriple,
    LieRepPair,
    Representation,
    ValidationReport,
    Witness,
    _apply_cols,
    _mat_cols,
    _sum_space,
    derived_bracket,
    induced_leibniz,
)
from .structures import LeibnizAlgebra
from .tensorbasis import (
    SpaceLabel,
    mixed_tuples,
    sort_with_sign,
    tensor_tuples,
    wedge_tuples,
)

_ZERO = rat(0)
_MAX_DEGREE = 4


def _max_cells() -> int:
    return int(os.environ.get("LEIBTEN_MAX_CELLS", "200000"))


def _guard_degree(n: int) -> None:
    if n > _MAX_DEGREE:
        raise SizeLimit(
            f"degree {n} exceeds the supported cap of {_MAX_DEGREE}; "
            "exact elimination beyond it is not attempted"
        )


def _guard_dims(dim_from: int, dim_to: int) -> None:
    cap = _max_cells()
    if dim_from > cap or dim_to > cap:
        raise SizeLimit(
            f"cochain space with {max(dim_from, dim_to)} coordinates exceeds "
            f"the cap of {cap} (set LEIBTEN_MAX_CELLS to raise it)"
        )
    if dim_from * dim_to > 4 * cap:
        raise SizeLimit(
            f"coboundary matrix with {dim_from * dim_to} entries exceeds the "
            f"cap of {4 * cap} (set LEIBTEN_MAX_CELLS to raise it)"
        )


class ComplexKind(Enum):
    ET = "et"
    PAIR = "pair"
    REG = "reg"
    COEFF = "coeff"


@dataclass(frozen=True)
class Cochain:
    kind: ComplexKind
    degree: int
    vector: tuple[Rational, ...]


@dataclass(frozen=True)
class CochainComplexSlice:
    """The coboundary matrix from degree ``degree`` to ``degree + 1``."""

    kind: ComplexKind
    degree: int
    matrix: Matrix


@dataclass(frozen=True)
class TwoTermRep:
    """A two-term chain complex of coefficient spaces with compatible actions.

    ``t_mat`` maps the module-level space W into the algebra-level space h;
    ``phi_h``/``phi_w`` give the algebra's action on each level, and
    ``varphi`` sends each module basis element to a map h -> W.
    """

    h: SpaceLabel
    w: SpaceLabel
    t_mat: Matrix
    phi_h: tuple[Matrix, ...]
    phi_w: tuple[Matrix, ...]
    varphi: tuple[Matrix, ...]

    def __post_init__(self) -> None:
        if self.t_mat.rows != self.h.dim or self.t_mat.cols != self.w.dim:
            raise DimensionMismatch("two-term map must send W into h")
        for m in self.phi_h:
            if m.rows != self.h.dim or m.cols != self.h.dim:
                raise DimensionMismatch("algebra action on h has wrong shape")
        for m in self.phi_w:
            if m.rows != self.w.dim or m.cols != self.w.dim:
                raise DimensionMismatch("algebra action on W has wrong shape")
        for m in self.varphi:
            if m.rows != self.w.dim or m.cols != self.h.dim:
                raise DimensionMismatch("module action must map h into W")

    def validate_against(self, triple: LieLeibnizTriple) -> ValidationReport:
        """Check the compatibility identities with a triple.

        Witness identities: "two-term-endomorphism" (each algebra action
        commutes with the two-term map), "action-homomorphism" (bracket goes
        to commutator on both levels), "tensor-intertwine" (the operator
        matches the two-term map through the actions), "module-intertwine"
        (acting then mapping equals the commutator-style action on maps).
        """
        pair = triple.pair
        g, v = pair.dim_g, pair.dim_v
        if len(self.phi_h) != g or len(self.phi_w) != g or len(self.varphi) != v:
            raise DimensionMismatch("action tuples must match the triple dims")
        bracket = pair.algebra.bracket
        t_cols = _mat_cols(triple.tensor.matrix)
        rho = pair.rep.matrices
        ws: list[Witness] = []

        def first(identity: str, bad: list) -> None:
            if bad and not any(w.identity == identity for w in ws):
                at, lhs, rhs = bad[0]
                ws.append(Witness(identity, at, lhs, rhs))

        bad = []
        for x in range(g):
            lhs = self.phi_h[x] @ self.t_mat
            rhs = self.t_mat @ self.phi_w[x]
            if lhs != rhs:
                bad.append(((x,), _mat_entries(lhs), _mat_entries(rhs)))
        first("two-term-endomorphism", bad)

        bad = []
        for x in range(g):
            for y in range(g):
                br = bracket.value((x, y))
                lhs_h = _lincomb(self.phi_h, br, self.h.dim)
                rhs_h = self.phi_h[x] @ self.phi_h[y] - self.phi_h[y] @ self.phi_h[x]
                lhs_w = _lincomb(self.phi_w, br, self.w.dim)
                rhs_w = self.phi_w[x] @ self.phi_w[y] - self.phi_w[y] @ self.phi_w[x]
                if lhs_h != rhs_h:
                    bad.append(((x, y), _mat_entries(lhs_h), _mat_entries(rhs_h)))
                elif lhs_w != rhs_w:
                    bad.append(((x, y), _mat_entries(lhs_w), _mat_entries(rhs_w)))
        first("action-homomorphism", bad)

        bad = []
        for u in range(v):
            tu = t_cols[u]
            lhs_h = self.t_mat @ self.varphi[u]
            rhs_h = _lincomb(self.phi_h, tu, self.h.dim)
            lhs_w = self.varphi[u] @ self.t_mat
            rhs_w = _lincomb(self.phi_w, tu, self.w.dim)
            if lhs_h != rhs_h:
                bad.append(((u,), _mat_entries(lhs_h), _mat_entries(rhs_h)))
            elif lhs_w != rhs_w:
                bad.append(((u,), _mat_entries(lhs_w), _mat_entries(rhs_w)))
        first("tensor-intertwine", bad)

        bad = []
        for x in range(g):
            for u in range(v):
                acted = {m: rho[x].at(m, u) for m in range(v) if rho[x].at(m, u)}
                lhs = _lincomb(self.varphi, acted, self.w.dim, cols=self.h.dim)
                rhs = self.phi_w[x] @ self.varphi[u] - self.varphi[u] @ self.phi_h[x]
                if lhs != rhs:
                    bad.append(((x, u), _mat_entries(lhs), _mat_entries(rhs)))
        first("module-intertwine", bad)
        return ValidationReport.from_witnesses(ws)


def _mat_entries(m: Matrix) -> OutVec:
    return {i: c for i, c in enumerate(m.entries) if c}


def _lincomb(
    mats: Sequence[Matrix], coeffs: Mapping[int, Rational], rows: int, cols: int | None = None
) -> Matrix:
    out = Matrix.zero(rows, cols if cols is not None else rows)
    for i, c in coeffs.items():
        out = out + mats[i].scale(c)
    return out


@dataclass(frozen=True)
class CohomologyReport:
    kind: ComplexKind
    degree: int
    dim_cochain: int
    dim_kernel: int
    dim_image_in: int
    betti: int
    representatives: tuple[tuple[Rational, ...], ...]

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "degree": self.degree,
            "dim_cochain": self.dim_cochain,
            "dim_kernel": self.dim_kernel,
            "dim_image": self.dim_image_in,
            "betti": self.betti,
            "representatives": [
                [rat_str(c) for c in vec] for vec in self.representatives
            ],
        }


# --------------------------------------------------------------------------
# basis bookkeeping


class _Block:
    """One homogeneous block of a cochain space: input tuples times outputs."""

    def __init__(self, tuples: list[tuple[int, ...]], dim_out: int):
        self.tuples = tuples
        self.dim_out = dim_out
        self.rank = {t: i for i, t in enumerate(tuples)}
        self.dim = len(tuples) * dim_out

    def index(self, key: tuple[int, ...], out: int) -> int:
        return self.rank[key] * self.dim_out + out


def _et_block(g: int, v: int, n: int) -> _Block:
    if n <= 0:
        return _Block([], max(g, 1))
    if n == 1:
        return _Block([()], g)
    return _Block(tensor_tuples((v,) * (n - 1)), g)


def _pair_blocks(g: int, v: int, n: int, out_g: int, out_v: int) -> tuple[_Block, _Block]:
    if n <= 0:
        return _Block([], max(out_g, 1)), _Block([], max(out_v, 1))
    return (
        _Block(wedge_tuples(g, n), out_g),
        _Block(mixed_tuples(g, n - 1, v), out_v),
    )


def et_dim(triple: LieLeibnizTriple, n: int) -> int:
    return _et_block(triple.pair.dim_g, triple.pair.dim_v, n).dim


def pair_dim(pair: LieRepPair, n: int) -> int:
    b1, b2 = _pair_blocks(pair.dim_g, pair.dim_v, n, pair.dim_g, pair.dim_v)
    return b1.dim + b2.dim


def reg_dim(triple: LieLeibnizTriple, n: int) -> int:
    return pair_dim(triple.pair, n) + et_dim(triple, n)


def coeff_dim(triple: LieLeibnizTriple, rep: TwoTermRep, n: int) -> int:
    g, v = triple.pair.dim_g, triple.pair.dim_v
    b1, b2 = _pair_blocks(g, v, n, rep.h.dim, rep.w.dim)
    if n <= 0:
        return 0
    op = _Block([()] if n == 1 else tensor_tuples((v,) * (n - 1)), rep.h.dim)
    return b1.dim + b2.dim + op.dim


def cochain_dim(
    obj, kind: ComplexKind, n: int, rep: TwoTermRep | None = None
) -> int:
    if n <= 0:
        return 0
    if kind is ComplexKind.ET:
        return et_dim(obj, n)
    if kind is ComplexKind.PAIR:
        return pair_dim(obj.pair if isinstance(obj, LieLeibnizTriple) else obj, n)
    if kind is ComplexKind.REG:
        return reg_dim(obj, n)
    if kind is ComplexKind.COEFF:
        if rep is None:
            raise InvalidInputData("coefficient complex needs a two-term representation")
        return coeff_dim(obj, rep, n)
    raise InvalidInputData(f"unknown complex kind: {kind!r}")


class _MatBuilder:
    def __init__(self, rows: int, cols: int):
        self.rows = rows
        self.cols = cols
        self.data: dict[tuple[int, int], Rational] = {}

    def add(self, i: int, j: int, c: Rational) -> None:
        if not c:
            return
        key = (i, j)
        cur = self.data.get(key, _ZERO) + c
        if cur:
            self.data[key] = cur
        else:
            self.data.pop(key, None)

    def build(self) -> Matrix:
        entries = [_ZERO] * (self.rows * self.cols)
        for (i, j), c in self.data.items():
            entries[i * self.cols + j] = c
        return Matrix(self.rows, self.cols, tuple(entries))


# --------------------------------------------------------------------------
# generic single-block coboundary (non-alternating inputs, twisted coefficients)


def _bracket_by_output(bracket: MultilinearMap) -> dict[int, list[tuple[int, int, Rational]]]:
    by_out: dict[int, list[tuple[int, int, Rational]]] = {}
    for (t, w), vec in bracket.coeffs.items():
        for s, c in vec.items():
            by_out.setdefault(s, []).append((t, w, c))
    return by_out


def _lp_scatter_entry(
    a: tuple[int, ...],
    r: int,
    coeff: Rational,
    dim_l: int,
    bracket_by_out: Mapping[int, list[tuple[int, int, Rational]]],
    rho_l_cols: Sequence[Sequence[OutVec]],
    rho_r_cols: Sequence[Sequence[OutVec]],
    emit,
) -> None:
    """Scatter one source coefficient f(a) = coeff * e_r through the
    degree-raising formula; ``emit(y, s, c)`` receives the contributions."""
    k = len(a)
    # left actions: insert the acting element at any of the first k slots
    for i0 in range(k):
        sgn = coeff if i0 % 2 == 0 else -coeff
        for t in range(dim_l):
            y = a[:i0] + (t,) + a[i0:]
            for s, c in rho_l_cols[t][r].items():
                emit(y, s, sgn * c)
    # right action on the final slot
    sgn = coeff if (k + 1) % 2 == 0 else -coeff
    for t in range(dim_l):
        y = a + (t,)
        for s, c in rho_r_cols[t][r].items():
            emit(y, s, sgn * c)
    # bracket insertions: the b-th input becomes a product
    for b in range(k):
        rest = a[:b] + a[b + 1 :]
        for t, w, c in bracket_by_out.get(a[b], ()):
            for p in range(b + 1):
                y = rest[:p] + (t,) + rest[p:b] + (w,) + rest[b:]
                sgn = -1 if p % 2 == 0 else 1  # 1-based (-1)^(p+1)
                emit(y, r, sgn * c * coeff)


def _lp_matrix(
    dim_l: int,
    dim_coef: int,
    bracket: MultilinearMap,
    rho_l_cols: Sequence[Sequence[OutVec]],
    rho_r_cols: Sequence[Sequence[OutVec]],
    k: int,
) -> Matrix:
    """Coboundary Hom(tensor^k L, M) -> Hom(tensor^(k+1) L, M).

    ``rho_l_cols[t][r]`` / ``rho_r_cols[t][r]`` are the sparse columns of the
    left/right coefficient actions of the t-th basis element; ``bracket`` is
    the (not necessarily antisymmetric) product on L.
    """
    src = _Block(tensor_tuples((dim_l,) * k), dim_coef)
    dst = _Block(tensor_tuples((dim_l,) * (k + 1)), dim_coef)
    out = _MatBuilder(dst.dim, src.dim)
    by_out = _bracket_by_output(bracket)
    one = rat(1)
    for a in src.tuples:
        for r in range(dim_coef):
            col = src.index(a, r)
            _lp_scatter_entry(
                a,
                r,
                one,
                dim_l,
                by_out,
                rho_l_cols,
                rho_r_cols,
                lambda y, s, c: out.add(dst.index(y, s), col, c),
            )
    return out.build()


def _action_cols(mats: Sequence[Matrix]) -> list[list[OutVec]]:
    return [_mat_cols(m) for m in mats]


def _et_coefficient_actions(
    triple: LieLeibnizTriple,
) -> tuple[list[list[OutVec]], list[list[OutVec]]]:
    """Left/right actions of the induced module bracket on the algebra."""
    pair = triple.pair
    g, v = pair.dim_g, pair.dim_v
    bracket = pair.algebra.bracket
    t_cols = _mat_cols(triple.tensor.matrix)
    rho_cols = [_mat_cols(m) for m in pair.rep.matrices]
    left: list[list[OutVec]] = []
    right: list[list[OutVec]] = []
    for t in range(v):
        tu = t_cols[t]
        lcols: list[OutVec] = []
        rcols: list[OutVec] = []
        for r in range(g):
            lvec: OutVec = {}
            rvec: OutVec = {}
            for m, cm in tu.items():
                for s, c in bracket.value((m, r)).items():
                    lvec[s] = lvec.get(s, _ZERO) + cm * c
                for s, c in bracket.value((r, m)).items():
                    rvec[s] = rvec.get(s, _ZERO) + cm * c
            # subtract the operator applied to the acted module element
            acted = _apply_cols(rho_cols[r], {t: rat(1)})
            for m, cm in acted.items():
                for s, c in t_cols[m].items():
                    rvec[s] = rvec.get(s, _ZERO) - cm * c
            lcols.append({s: c for s, c in lvec.items() if c})
            rcols.append({s: c for s, c in rvec.items() if c})
        left.append(lcols)
        right.append(rcols)
    return left, right


def _coeff_operator_actions(
    triple: LieLeibnizTriple, rep: TwoTermRep
) -> tuple[list[list[OutVec]], list[list[OutVec]]]:
    """Left/right coefficient actions for the two-term representation."""
    pair = triple.pair
    v = pair.dim_v
    t_cols = _mat_cols(triple.tensor.matrix)
    left: list[list[OutVec]] = []
    right: list[list[OutVec]] = []
    for t in range(v):
        act_h = _lincomb(rep.phi_h, t_cols[t], rep.h.dim)
        tt_phi = rep.t_mat @ rep.varphi[t]
        lcols = _mat_cols(act_h)
        rcols = _mat_cols(tt_phi - act_h)
        left.append(lcols)
        right.append(rcols)
    return left, right


# --------------------------------------------------------------------------
# pair-type blocks (alternating algebra inputs)


def _delta_matrix(
    algebra: LieAlgebra,
    rho_mats: Sequence[Matrix],
    act1_cols: Sequence[Sequence[OutVec]],
    actw_mats: Sequence[Matrix],
    middle,
    n: int,
    out_g: int,
    out_v: int,
) -> Matrix:
    """Assemble the pair-block coboundary at degree n.

    ``act1_cols[x][r]`` is the coefficient action on the algebra-level block
    (sparse column); ``actw_mats[x]`` acts on the module-level block values;
    ``rho_mats[x]`` is always the module action used in the final-slot
    insertion; ``middle(r, w)`` gives the sign-included sparse column coupling
    the algebra-level block into the module-level block.
    """
    g = algebra.dim
    v = rho_mats[0].rows if rho_mats else 0
    bracket = algebra.bracket
    src1, src2 = _pair_blocks(g, v, n, out_g, out_v)
    dst1, dst2 = _pair_blocks(g, v, n + 1, out_g, out_v)
    out = _MatBuilder(dst1.dim + dst2.dim, src1.dim + src2.dim)

    # algebra-level rows, gathered per output tuple
    for y in dst1.tuples:
        for i0 in range(n + 1):
            restt = y[:i0] + y[i0 + 1 :]
            if restt not in src1.rank:
                continue
            sgn = 1 if i0 % 2 == 0 else -1
            for r in range(out_g):
                col = src1.index(restt, r)
                for s, c in act1_cols[y[i0]][r].items():
                    out.add(dst1.index(y, s), col, sgn * c)
        for i0 in range(n + 1):
            for j0 in range(i0 + 1, n + 1):
                restt = tuple(y[m] for m in range(n + 1) if m not in (i0, j0))
                sgn0 = 1 if (i0 + j0) % 2 == 0 else -1
                for s, c in bracket.value((y[i0], y[j0])).items():
                    srt, tau = sort_with_sign((s,) + restt)
                    if tau == 0 or srt not in src1.rank:
                        continue
                    for r in range(out_g):
                        out.add(
                            dst1.index(y, r), src1.index(srt, r), sgn0 * tau * c
                        )

    # module-level rows
    row_off = dst1.dim
    for zt in dst2.tuples:
        z, w = zt[:-1], zt[-1]
        # bracket insertions among the algebra slots
        for i0 in range(n):
            for j0 in range(i0 + 1, n):
                sgn0 = -1 if i0 % 2 == 0 else 1  # 1-based (-1)^i
                before = tuple(z[m] for m in range(j0) if m != i0)
                after = z[j0 + 1 :]
                for s, c in bracket.value((z[i0], z[j0])).items():
                    srt, tau = sort_with_sign(before + (s,) + after)
                    if tau == 0:
                        continue
                    key = srt + (w,)
                    if key not in src2.rank:
                        continue
                    for r in range(out_v):
                        out.add(
                            row_off + dst2.index(zt, r),
                            src1.dim + src2.index(key, r),
                            sgn0 * tau * c,
                        )
        # coupling from the algebra-level block
        if z in src1.rank:
            for r in range(out_g):
                col = src1.index(z, r)
                for s, c in middle(r, w).items():
                    out.add(row_off + dst2.index(zt, s), col, c)
        # action on the value and on the module slot
        for i0 in range(n):
            rest = z[:i0] + z[i0 + 1 :]
            sgn = 1 if i0 % 2 == 0 else -1  # 1-based (-1)^(i+1)
            key = rest + (w,)
            if key in src2.rank:
                mat = actw_mats[z[i0]]
                for r in range(out_v):
                    col = src1.dim + src2.index(key, r)
                    for s in range(out_v):
                        c = mat.at(s, r)
                        if c:
                            out.add(row_off + dst2.index(zt, s), col, sgn * c)
            rho = rho_mats[z[i0]]
            for m in range(v):
                c = rho.at(m, w)
                if not c:
                    continue
                key = rest + (m,)
                if key not in src2.rank:
                    continue
                for r in range(out_v):
                    out.add(
                        row_off + dst2.index(zt, r),
                        src1.dim + src2.index(key, r),
                        -sgn * c,
                    )
    return out.build()


def _pair_delta_matrix(pair: LieRepPair, n: int) -> Matrix:
    g = pair.dim_g
    bracket = pair.algebra.bracket
    act1 = [
        [dict(bracket.value((x, r))) for r in range(g)] for x in range(g)
    ]
    rho = pair.rep.matrices
    sgn_mid = 1 if (n - 1) % 2 == 0 else -1

    def middle(r: int, w: int) -> OutVec:
        col: OutVec = {}
        for s in range(pair.dim_v):
            c = rho[r].at(s, w)
            if c:
                col[s] = sgn_mid * c
        return col

    return _delta_matrix(pair.algebra, rho, act1, rho, middle, n, g, pair.dim_v)


def _coeff_delta_matrix(triple: LieLeibnizTriple, rep: TwoTermRep, n: int) -> Matrix:
    pair = triple.pair
    act1 = [_mat_cols(m) for m in rep.phi_h]
    sgn_mid = 1 if n % 2 == 0 else -1

    def middle(r: int, w: int) -> OutVec:
        return {
            s: sgn_mid * rep.varphi[w].at(s, r)
            for s in range(rep.w.dim)
            if rep.varphi[w].at(s, r)
        }

    return _delta_matrix(
        pair.algebra,
        pair.rep.matrices,
        act1,
        rep.phi_w,
        middle,
        n,
        rep.h.dim,
        rep.w.dim,
    )


# --------------------------------------------------------------------------
# connecting block


def _minor(t_mat: Matrix, rows: Sequence[int], cols: Sequence[int]) -> Rational:
    n = len(rows)
    if n == 0:
        return rat(1)
    total = _ZERO
    for perm in _permutations(n):
        sgn = _perm_parity(perm)
        prod = rat(1)
        for i in range(n):
            prod *= t_mat.at(rows[perm[i]], cols[i])
            if not prod:
                break
        if prod:
            total += sgn * prod
    return total


def _permutations(n: int) -> list[tuple[int, ...]]:
    import itertools

    return list(itertools.permutations(range(n)))


def _perm_parity(perm: Sequence[int]) -> int:
    inv = sum(
        1
        for i in range(len(perm))
        for j in range(i + 1, len(perm))
        if perm[i] > perm[j]
    )
    return -1 if inv % 2 else 1


def _omega_matrix(
    triple: LieLeibnizTriple, n: int, out_h: int, tt_mat: Matrix
) -> Matrix:
    """The block sending pair-type cochains into operator-type cochains."""
    pair = triple.pair
    g, v = pair.dim_g, pair.dim_v
    t_mat = triple.tensor.matrix
    src1, src2 = _pair_blocks(g, v, n, out_h, tt_mat.cols)
    dst = _Block(tensor_tuples((v,) * n), out_h)
    out = _MatBuilder(dst.dim, src1.dim + src2.dim)
    sgn = 1 if n % 2 == 0 else -1
    for u_tuple in dst.tuples:
        for a in src1.tuples:
            c = _minor(t_mat, a, u_tuple)
            if not c:
                continue
            for r in range(out_h):
                out.add(dst.index(u_tuple, r), src1.index(a, r), sgn * c)
        prefix_cols = u_tuple[:-1]
        last = u_tuple[-1]
        for b in src2.tuples:
            if b[-1] != last:
                continue
            c = _minor(t_mat, b[:-1], prefix_cols)
            if not c:
                continue
            for r in range(tt_mat.cols):
                col = src1.dim + src2.index(b, r)
                for s in range(out_h):
                    tc = tt_mat.at(s, r)
                    if tc:
                        out.add(dst.index(u_tuple, s), col, -sgn * c * tc)
    return out.build()


# --------------------------------------------------------------------------
# map-level flattening helpers (also used by the sampled cross-checks)


def _flatten_block(m: MultilinearMap, block: _Block) -> list[Rational]:
    vec = [_ZERO] * block.dim
    for key, outvec in m.coeffs.items():
        for s, c in outvec.items():
            vec[block.index(key, s)] = c
    return vec


def _unflatten_block(
    vec: Sequence[Rational], block: _Block, dims_in: tuple[int, ...], dim_out: int, wedge: int
) -> MultilinearMap:
    table: dict[tuple[int, ...], OutVec] = {}
    for key in block.tuples:
        outvec = {
            s: vec[block.index(key, s)]
            for s in range(dim_out)
            if vec[block.index(key, s)]
        }
        if outvec:
            table[key] = outvec
    return MultilinearMap(dims_in, dim_out, table, wedge)


def split_reg_cochain(
    triple: LieLeibnizTriple, vec: Sequence[Rational], n: int
) -> tuple[MultilinearMap, MultilinearMap, MultilinearMap]:
    """Unpack a flattened degree-n cochain of the full complex into its three
    component maps (algebra part, module part, operator part)."""
    g, v = triple.pair.dim_g, triple.pair.dim_v
    b1, b2 = _pair_blocks(g, v, n, g, v)
    b3 = _et_block(g, v, n)
    if len(vec) != b1.dim + b2.dim + b3.dim:
        raise DimensionMismatch(
            f"cochain vector has length {len(vec)}, expected {b1.dim + b2.dim + b3.dim}"
        )
    f_g = _unflatten_block(vec[: b1.dim], b1, (g,) * n, g, n)
    f_v = _unflatten_block(
        vec[b1.dim : b1.dim + b2.dim], b2, (g,) * (n - 1) + (v,), v, n - 1
    )
    theta = _unflatten_block(vec[b1.dim + b2.dim :], b3, (v,) * (n - 1), g, 0)
    return f_g, f_v, theta


def join_reg_cochain(
    triple: LieLeibnizTriple,
    f_g: MultilinearMap,
    f_v: MultilinearMap,
    theta: MultilinearMap,
    n: int,
) -> tuple[Rational, ...]:
    g, v = triple.pair.dim_g, triple.pair.dim_v
    b1, b2 = _pair_blocks(g, v, n, g, v)
    b3 = _et_block(g, v, n)
    return tuple(
        _flatten_block(f_g, b1) + _flatten_block(f_v, b2) + _flatten_block(theta, b3)
    )


# --------------------------------------------------------------------------
# sampled cross-checks against the bracket-defined routes


def _lift_cost(pair: LieRepPair, arity: int) -> int:
    return (pair.dim_g + pair.dim_v) ** (arity + 1)


def _random_map(
    rng: random.Random, dims_in: tuple[int, ...], dim_out: int, wedge: int
) -> MultilinearMap:
    if wedge:
        keys = [
            k + t
            for k in wedge_tuples(dims_in[0], wedge)
            for t in tensor_tuples(dims_in[wedge:])
        ]
    else:
        keys = tensor_tuples(dims_in)
    table: dict[tuple[int, ...], OutVec] = {}
    for key in keys:
        vec = {
            s: rat(rng.randint(-2, 2)) for s in range(dim_out)
        }
        vec = {s: c for s, c in vec.items() if c}
        if vec:
            table[key] = vec
    return MultilinearMap(dims_in, dim_out, table, wedge)


def _t_as_map(triple: LieLeibnizTriple) -> MultilinearMap:
    return MultilinearMap.from_matrix(triple.tensor.matrix.to_lists())


def _check_et_against_derived(
    triple: LieLeibnizTriple, mat: Matrix, n: int
) -> None:
    pair = triple.pair
    g, v = pair.dim_g, pair.dim_v
    if n < 2 or _lift_cost(pair, n) > 25000:
        return
    src = _et_block(g, v, n)
    dst = _et_block(g, v, n + 1)
    rng = random.Random(0xE70000 + n)
    sgn = 1 if n % 2 == 0 else -1  # (-1)^(arity-1), arity = n-1
    for _ in range(2):
        theta = _random_map(rng, (v,) * (n - 1), g, 0)
        got = mat.apply(_flatten_block(theta, src))
        want = derived_bracket(pair, _t_as_map(triple), theta).scale(rat(sgn))
        assert list(got) == _flatten_block(want.as_tensor(), dst), (
            "operator coboundary disagrees with the derived-bracket route"
        )


def _delta_via_bracket(
    pair: LieRepPair, f_g: MultilinearMap, f_v: MultilinearMap, n: int
) -> tuple[MultilinearMap, MultilinearMap]:
    from .structures import hemisemidirect_element

    g, v = pair.dim_g, pair.dim_v
    space = _sum_space(pair)
    q = hemisemidirect_element(pair)
    fhat = horizontal_lift(f_g, (0,) * n, 0, space) + horizontal_lift(
        f_v, (0,) * (n - 1) + (1,), 1, space
    )
    sgn = 1 if (n - 1) % 2 == 0 else -1
    b = balavoine(q, fhat).scale(rat(sgn))
    out_g: dict[tuple[int, ...], OutVec] = {}
    out_v: dict[tuple[int, ...], OutVec] = {}
    for key, vec in b.coeffs.items():
        comps = tuple(space.block_of(i)[0] for i in key)
        locs = tuple(space.block_of(i)[1] for i in key)
        for s, c in vec.items():
            sc, sl = space.block_of(s)
            if comps == (0,) * (n + 1) and sc == 0:
                out_g.setdefault(locs, {})[sl] = c
            elif comps == (0,) * n + (1,) and sc == 1:
                out_v.setdefault(locs, {})[sl] = c
            else:
                raise AssertionError(
                    "pair coboundary leaked outside its two blocks"
                )
    dg = MultilinearMap((g,) * (n + 1), g, out_g, 0)
    dv = MultilinearMap((g,) * n + (v,), v, out_v, 0)
    return dg, dv


def _check_pair_against_bracket(pair: LieRepPair, mat: Matrix, n: int) -> None:
    g, v = pair.dim_g, pair.dim_v
    if _lift_cost(pair, n) > 25000:
        return
    src1, src2 = _pair_blocks(g, v, n, g, v)
    dst1, dst2 = _pair_blocks(g, v, n + 1, g, v)
    rng = random.Random(0xBA1A + n)
    for _ in range(2):
        f_g = _random_map(rng, (g,) * n, g, n)
        f_v = _random_map(rng, (g,) * (n - 1) + (v,), v, n - 1)
        got = mat.apply(_flatten_block(f_g, src1) + _flatten_block(f_v, src2))
        dg, dv = _delta_via_bracket(pair, f_g, f_v, n)
        want = [
            dg.entry(key, s) for key in dst1.tuples for s in range(g)
        ] + [
            dv.entry(key, s) for key in dst2.tuples for s in range(v)
        ]
        assert list(got) == want, (
            "pair coboundary disagrees with the bracket route"
        )


def _omega_via_bracket(
    triple: LieLeibnizTriple, f_g: MultilinearMap, f_v: MultilinearMap, n: int
) -> MultilinearMap:
    pair = triple.pair
    g, v = pair.dim_g, pair.dim_v
    space = _sum_space(pair)
    t_lift = horizontal_lift(_t_as_map(triple), (1,), 0, space)
    fhat = horizontal_lift(f_g, (0,) * n, 0, space) + horizontal_lift(
        f_v, (0,) * (n - 1) + (1,), 1, space
    )
    cur = fhat
    for _ in range(n):
        cur = balavoine(cur, t_lift)
    cur = cur.scale(Fraction((-1) ** n, math.factorial(n)))
    out: dict[tuple[int, ...], OutVec] = {}
    for key, vec in cur.coeffs.items():
        comps = [space.block_of(i) for i in key]
        for s, c in vec.items():
            sc, sl = space.block_of(s)
            if all(b == 1 for b, _ in comps) and sc == 0:
                out.setdefault(tuple(l for _, l in comps), {})[sl] = c
            else:
                raise AssertionError(
                    "connecting block leaked outside module-inputs/algebra-output"
                )
    return MultilinearMap((v,) * n, g, out, 0)


def _check_omega_against_bracket(
    triple: LieLeibnizTriple, mat: Matrix, n: int
) -> None:
    pair = triple.pair
    g, v = pair.dim_g, pair.dim_v
    if _lift_cost(pair, n) > 25000:
        return
    src1, src2 = _pair_blocks(g, v, n, g, v)
    dst = _Block(tensor_tuples((v,) * n), g)
    rng = random.Random(0x0E6A + n)
    for _ in range(2):
        f_g = _random_map(rng, (g,) * n, g, n)
        f_v = _random_map(rng, (g,) * (n - 1) + (v,), v, n - 1)
        got = mat.apply(_flatten_block(f_g, src1) + _flatten_block(f_v, src2))
        want = _omega_via_bracket(triple, f_g, f_v, n)
        assert list(got) == _flatten_block(want, dst), (
            "connecting block disagrees with the iterated-bracket route"
        )


# --------------------------------------------------------------------------
# public coboundaries


def _require_valid_triple(triple: LieLeibnizTriple) -> None:
    report = triple.validate()
    if not report.ok:
        w = report.witnesses[0]
        raise InvalidInputData(f"triple fails {w.identity} at {w.at}")


def _require_valid_pair(pair: LieRepPair) -> None:
    report = pair.validate()
    if not report.ok:
        w = report.witnesses[0]
        raise InvalidInputData(f"pair fails {w.identity} at {w.at}")


def _as_pair(obj) -> LieRepPair:
    return obj.pair if isinstance(obj, LieLeibnizTriple) else obj


def coboundary_et(
    triple: LieLeibnizTriple, n: int, *, check: bool = True
) -> CochainComplexSlice:
    """Coboundary of the operator complex from degree n to n+1."""
    if n < 1:
        raise InvalidInputData("operator complex coboundaries start at degree 1")
    _guard_degree(n)
    if check:
        _require_valid_triple(triple)
    g, v = triple.pair.dim_g, triple.pair.dim_v
    _guard_dims(et_dim(triple, n), et_dim(triple, n + 1))
    left, right = _et_coefficient_actions(triple)
    bracket = induced_leibniz(triple).bracket
    mat = _lp_matrix(v, g, bracket, left, right, n - 1)
    if check:
        _check_et_against_derived(triple, mat, n)
    return CochainComplexSlice(ComplexKind.ET, n, mat)


def coboundary_et_apply(
    triple: LieLeibnizTriple, vec: Sequence[Rational], n: int
) -> tuple[Rational, ...]:
    """Apply the operator-complex coboundary to one degree-n cochain without
    assembling the matrix; only the target space size is capped, so this
    works where :func:`coboundary_et` refuses on matrix size."""
    if n < 1:
        raise InvalidInputData("operator complex coboundaries start at degree 1")
    _guard_degree(n)
    g, v = triple.pair.dim_g, triple.pair.dim_v
    src = _et_block(g, v, n)
    dst = _et_block(g, v, n + 1)
    if len(vec) != src.dim:
        raise DimensionMismatch(
            f"cochain vector has length {len(vec)}, expected {src.dim}"
        )
    cap = _max_cells()
    if dst.dim > cap:
        raise SizeLimit(
            f"target space with {dst.dim} coordinates exceeds the cap of {cap}"
        )
    left, right = _et_coefficient_actions(triple)
    by_out = _bracket_by_output(induced_leibniz(triple).bracket)
    acc: dict[int, Rational] = {}

    def emit(y: tuple[int, ...], s: int, c: Rational) -> None:
        idx = dst.index(y, s)
        cur = acc.get(idx, _ZERO) + c
        if cur:
            acc[idx] = cur
        else:
            acc.pop(idx, None)

    for a in src.tuples:
        base = src.rank[a] * g
        for r in range(g):
            coeff = vec[base + r]
            if coeff:
                _lp_scatter_entry(a, r, coeff, v, by_out, left, right, emit)
    out = [_ZERO] * dst.dim
    for idx, c in acc.items():
        out[idx] = c
    return tuple(out)


def coboundary_pair(
    obj, n: int, *, check: bool = True
) -> CochainComplexSlice:
    """Coboundary of the pair complex from degree n to n+1."""
    if n < 1:
        raise InvalidInputData("pair complex coboundaries start at degree 1")
    _guard_degree(n)
    pair = _as_pair(obj)
    if check:
        _require_valid_pair(pair)
    _guard_dims(pair_dim(pair, n), pair_dim(pair, n + 1))
    mat = _pair_delta_matrix(pair, n)
    if check:
        _check_pair_against_bracket(pair, mat, n)
    return CochainComplexSlice(ComplexKind.PAIR, n, mat)


def omega_t(triple: LieLeibnizTriple, n: int, *, check: bool = True) -> Matrix:
    """The connecting block: pair-type cochains to operator-type cochains."""
    if n < 0:
        raise InvalidInputData("degree must be nonnegative")
    _guard_degree(n)
    if check:
        _require_valid_triple(triple)
    pair = triple.pair
    if n == 0:
        return Matrix.zero(et_dim(triple, 1), 0)
    _guard_dims(pair_dim(pair, n), et_dim(triple, n + 1))
    mat = _omega_matrix(triple, n, pair.dim_g, triple.tensor.matrix)
    if check:
        _check_omega_against_bracket(triple, mat, n)
    return mat


def coboundary_reg(
    triple: LieLeibnizTriple, n: int, *, check: bool = True
) -> CochainComplexSlice:
    """Coboundary of the full complex: block triangular, pair block first."""
    if n < 1:
        raise InvalidInputData("full complex coboundaries start at degree 1")
    _guard_degree(n)
    if check:
        _require_valid_triple(triple)
    _guard_dims(reg_dim(triple, n), reg_dim(triple, n + 1))
    delta = coboundary_pair(triple, n, check=check).matrix
    deet = coboundary_et(triple, n, check=check).matrix
    omg = omega_t(triple, n, check=check)
    top = hstack([delta, Matrix.zero(delta.rows, deet.cols)])
    bottom = hstack([omg, deet])
    return CochainComplexSlice(ComplexKind.REG, n, vstack([top, bottom]))


def coboundary_coeff(
    triple: LieLeibnizTriple, rep: TwoTermRep, n: int, *, check: bool = True
) -> CochainComplexSlice:
    """Coboundary of the complex with values in a two-term representation."""
    if n < 1:
        raise InvalidInputData("coefficient complex coboundaries start at degree 1")
    _guard_degree(n)
    if check:
        _require_valid_triple(triple)
        report = rep.validate_against(triple)
        if not report.ok:
            w = report.witnesses[0]
            raise InvalidRepresentation(
                f"representation fails {w.identity} at {w.at}"
            )
    _guard_dims(coeff_dim(triple, rep, n), coeff_dim(triple, rep, n + 1))
    pair = triple.pair
    g, v = pair.dim_g, pair.dim_v
    delta = _coeff_delta_matrix(triple, rep, n)
    left, right = _coeff_operator_actions(triple, rep)
    bracket = induced_leibniz(triple).bracket
    deet = _lp_matrix(v, rep.h.dim, bracket, left, right, n - 1)
    omg = _omega_matrix(triple, n, rep.h.dim, rep.t_mat)
    top = hstack([delta, Matrix.zero(delta.rows, deet.cols)])
    bottom = hstack([omg, deet])
    return CochainComplexSlice(ComplexKind.COEFF, n, vstack([top, bottom]))


# --------------------------------------------------------------------------
# chain maps into the induced bracket's own complex


def leibniz_regular_coboundary(leibniz: LeibnizAlgebra, k: int) -> Matrix:
    """Coboundary of a bracket algebra on itself (left/right multiplications
    as coefficients), from k inputs to k+1 inputs."""
    if k < 0:
        raise InvalidInputData("degree must be nonnegative")
    _guard_degree(k + 1)
    d = leibniz.dim
    bracket = leibniz.bracket
    _guard_dims(d ** k * d, d ** (k + 1) * d)
    left = [
        [dict(bracket.value((x, r))) for r in range(d)] for x in range(d)
    ]
    right = [
        [dict(bracket.value((r, x))) for r in range(d)] for x in range(d)
    ]
    return _lp_matrix(d, d, bracket, left, right, k)


def phi_chain_matrix(triple: LieLeibnizTriple, n: int) -> Matrix:
    """Matrix of the push-down that turns an operator-type cochain into a
    module self-map by acting on one extra module argument (with a sign)."""
    if n < 1:
        raise InvalidInputData("the push-down starts at degree 1")
    _guard_degree(n)
    pair = triple.pair
    g, v = pair.dim_g, pair.dim_v
    src = _et_block(g, v, n)
    dst = _Block(tensor_tuples((v,) * n), v)
    out = _MatBuilder(dst.dim, src.dim)
    rho = pair.rep.matrices
    for a in src.tuples:
        for r in range(g):
            col = src.index(a, r)
            for w in range(v):
                for s in range(v):
                    c = rho[r].at(s, w)
                    if c:
                        out.add(dst.index(a + (w,), s), col, -c)
    return out.build()


# --------------------------------------------------------------------------
# canonical representations


def adjoint_representation(triple: LieLeibnizTriple) -> TwoTermRep:
    """The triple acting on its own two-term complex (module -> algebra).

    Valid only when the operator intertwines the module action with the
    adjoint action; validation is the caller's concern.
    """
    pair = triple.pair
    g, v = pair.dim_g, pair.dim_v
    ad = pair.algebra.ad()
    varphi = []
    for u in range(v):
        rows = [
            [-pair.rep.matrices[x].at(s, u) for x in range(g)] for s in range(v)
        ]
        varphi.append(Matrix.from_rows(rows) if v and g else Matrix.zero(v, g))
    return TwoTermRep(
        SpaceLabel("h", g),
        SpaceLabel("w", v),
        triple.tensor.matrix,
        tuple(ad),
        tuple(pair.rep.matrices),
        tuple(varphi),
    )


def trivial_representation(
    triple: LieLeibnizTriple, t_mat: Matrix
) -> TwoTermRep:
    """Zero actions on an arbitrary two-term complex; always valid."""
    pair = triple.pair
    h, w = t_mat.rows, t_mat.cols
    return TwoTermRep(
        SpaceLabel("h", h),
        SpaceLabel("w", w),
        t_mat,
        tuple(Matrix.zero(h, h) for _ in range(pair.dim_g)),
        tuple(Matrix.zero(w, w) for _ in range(pair.dim_g)),
        tuple(Matrix.zero(w, h) for _ in range(pair.dim_v)),
    )


def semidirect(
    triple: LieLeibnizTriple, rep: TwoTermRep, *, check: bool = True
) -> LieLeibnizTriple:
    """The triple extended by a two-term representation.

    The algebra gains the h-level as an abelian summand acted on by the
    original algebra; the module gains the W-level; the operator acts
    blockwise.
    """
    if check:
        _require_valid_triple(triple)
        report = rep.validate_against(triple)
        if not report.ok:
            w = report.witnesses[0]
            raise InvalidRepresentation(
                f"representation fails {w.identity} at {w.at}"
            )
    pair = triple.pair
    g, v = pair.dim_g, pair.dim_v
    h, w = rep.h.dim, rep.w.dim
    bracket = pair.algebra.bracket
    table: dict[tuple[int, ...], OutVec] = {}
    for (x, y), vec in bracket.as_tensor().coeffs.items():
        if x < y:
            table[(x, y)] = dict(vec)
    for x in range(g):
        for b in range(h):
            col = {g + s: rep.phi_h[x].at(s, b) for s in range(h) if rep.phi_h[x].at(s, b)}
            if col:
                table[(x, g + b)] = col
    big_alg = LieAlgebra(g + h, MultilinearMap((g + h,) * 2, g + h, table, 2))
    mats = []
    for x in range(g):
        rows = [[_ZERO] * (v + w) for _ in range(v + w)]
        for s in range(v):
            for u in range(v):
                rows[s][u] = pair.rep.matrices[x].at(s, u)
        for s in range(w):
            for t in range(w):
                rows[v + s][v + t] = rep.phi_w[x].at(s, t)
        mats.append(Matrix.from_rows(rows))
    for b in range(h):
        rows = [[_ZERO] * (v + w) for _ in range(v + w)]
        for s in range(w):
            for u in range(v):
                rows[v + s][u] = -rep.varphi[u].at(s, b)
        mats.append(Matrix.from_rows(rows))
    t_rows = [[_ZERO] * (v + w) for _ in range(g + h)]
    for i in range(g):
        for j in range(v):
            t_rows[i][j] = triple.tensor.matrix.at(i, j)
    for i in range(h):
        for j in range(w):
            t_rows[g + i][v + j] = rep.t_mat.at(i, j)
    big = LieLeibnizTriple(
        LieRepPair(big_alg, Representation(tuple(mats))),
        EmbeddingTensor(Matrix.from_rows(t_rows)),
    )
    if check:
        report = big.validate()
        assert report.ok, "semidirect construction failed to validate"
    return big


def coeff_embedding_matrix(
    triple: LieLeibnizTriple, rep: TwoTermRep, n: int
) -> Matrix:
    """Zero-extension of coefficient cochains into the full complex of the
    semidirect triple: inputs stay in the original summands, values land in
    the adjoined ones.  Intertwining the two coboundaries through this map is
    what makes the coefficient complex a subcomplex."""
    if n < 1:
        raise InvalidInputData("the embedding starts at degree 1")
    _guard_degree(n)
    g, v = triple.pair.dim_g, triple.pair.dim_v
    h, w = rep.h.dim, rep.w.dim
    big_g, big_v = g + h, v + w
    s1, s2 = _pair_blocks(g, v, n, h, w)
    s3 = _Block([()] if n == 1 else tensor_tuples((v,) * (n - 1)), h)
    b1, b2 = _pair_blocks(big_g, big_v, n, big_g, big_v)
    b3 = _et_block(big_g, big_v, n)
    out = _MatBuilder(b1.dim + b2.dim + b3.dim, s1.dim + s2.dim + s3.dim)
    one = rat(1)
    for key in s1.tuples:
        for s in range(h):
            out.add(b1.index(key, g + s), s1.index(key, s), one)
    for key in s2.tuples:
        for s in range(w):
            out.add(b1.dim + b2.index(key, v + s), s1.dim + s2.index(key, s), one)
    for key in s3.tuples:
        for s in range(h):
            out.add(
                b1.dim + b2.dim + b3.index(key, g + s),
                s1.dim + s2.dim + s3.index(key, s),
                one,
            )
    return out.build()


# --------------------------------------------------------------------------
# cohomology and the long exact sequence


def _slice_matrix(obj, kind: ComplexKind, n: int, rep: TwoTermRep | None, check: bool) -> Matrix:
    if n <= 0:
        return Matrix.zero(cochain_dim(obj, kind, max(n + 1, 0), rep), 0)
    if kind is ComplexKind.ET:
        return coboundary_et(obj, n, check=check).matrix
    if kind is ComplexKind.PAIR:
        return coboundary_pair(obj, n, check=check).matrix
    if kind is ComplexKind.REG:
        return coboundary_reg(obj, n, check=check).matrix
    if kind is ComplexKind.COEFF:
        return coboundary_coeff(obj, rep, n, check=check).matrix
    raise InvalidInputData(f"unknown complex kind: {kind!r}")


def _coset_representatives(
    d_out: Matrix, d_in: Matrix
) -> tuple[tuple[Rational, ...], ...]:
    kb = kernel_basis(d_out)
    image_rows = [list(d_in.col(j)) for j in range(d_in.cols)]
    if image_rows:
        image_rref, pivots = rref(Matrix.from_rows(image_rows))
        pivot_rows = [
            (p, image_rref.row(i)) for i, p in enumerate(pivots)
        ]
    else:
        pivot_rows = []
    reduced = []
    for vec in kb:
        red = list(vec)
        for p, row in pivot_rows:
            c = red[p]
            if c:
                for j in range(len(red)):
                    red[j] -= c * row[j]
        if any(red):
            reduced.append(red)
    if not reduced:
        return ()
    canon, _ = rref(Matrix.from_rows(reduced))
    reps = [
        tuple(canon.row(i))
        for i in range(canon.rows)
        if any(canon.row(i))
    ]
    return tuple(reps)


def cohomology(
    obj,
    kind: ComplexKind,
    n: int,
    rep: TwoTermRep | None = None,
    *,
    check: bool = True,
) -> CohomologyReport:
    """Kernel/image dimensions and canonical representatives at one degree."""
    if n < 0:
        raise InvalidInputData("degree must be nonnegative")
    _guard_degree(n)
    if kind is ComplexKind.COEFF and rep is None:
        raise InvalidInputData("coefficient complex needs a two-term representation")
    dim_n = cochain_dim(obj, kind, n, rep)
    if n == 0:
        return CohomologyReport(kind, 0, 0, 0, 0, 0, ())
    d_in = _slice_matrix(obj, kind, n - 1, rep, check)
    d_out = _slice_matrix(obj, kind, n, rep, check)
    betti = quotient_dim(d_out, d_in)
    dim_kernel = d_out.cols - rank(d_out)
    dim_image = rank(d_in)
    reps = _coset_representatives(d_out, d_in)
    assert len(reps) == betti, "representative count disagrees with the betti number"
    return CohomologyReport(kind, n, dim_n, dim_kernel, dim_image, betti, reps)


@dataclass(frozen=True)
class LesNode:
    degree: int
    at: str
    dim_image: int
    dim_kernel: int
    contained: bool

    @property
    def ok(self) -> bool:
        return self.contained and self.dim_image == self.dim_kernel


@dataclass(frozen=True)
class LesReport:
    nodes: tuple[LesNode, ...]

    @property
    def ok(self) -> bool:
        return all(node.ok for node in self.nodes)

    def to_json_dict(self) -> dict:
        return {
            "ok": self.ok,
            "nodes": [
                {
                    "degree": node.degree,
                    "at": node.at,
                    "dim_image": node.dim_image,
                    "dim_kernel": node.dim_kernel,
                    "ok": node.ok,
                }
                for node in self.nodes
            ],
        }


def _span_rank(vectors: list[tuple[Rational, ...]], length: int) -> int:
    if not vectors:
        return 0
    return rank(Matrix.from_rows([list(vec) for vec in vectors]))


def _exactness_node(
    f_mat: Matrix,
    dx_out: Matrix,
    dy_in: Matrix,
    dy_out: Matrix,
    g_mat: Matrix,
    dz_in: Matrix,
    degree: int,
    at: str,
) -> LesNode:
    image_gens = [f_mat.apply(k) for k in kernel_basis(dx_out)]
    image_gens += [dy_in.col(j) for j in range(dy_in.cols)]
    top = hstack([dy_out, Matrix.zero(dy_out.rows, dz_in.cols)])
    bottom = hstack([g_mat, dz_in.scale(-1)])
    kernel_gens = [
        k[: dy_out.cols] for k in kernel_basis(vstack([top, bottom]))
    ]
    dim_image = _span_rank(image_gens, dy_out.cols)
    dim_kernel = _span_rank(kernel_gens, dy_out.cols)
    contained = True
    if kernel_gens:
        basis_matrix = Matrix.from_rows(
            [list(vec) for vec in kernel_gens]
        ).transpose()
        for gen in image_gens:
            if any(gen) and solve(basis_matrix, gen) is None:
                contained = False
                break
    else:
        contained = all(not any(gen) for gen in image_gens)
    return LesNode(degree, at, dim_image, dim_kernel, contained)


def les_check(
    triple: LieLeibnizTriple, max_n: int, *, check: bool = True
) -> LesReport:
    """Exactness of the degreewise sequence operator-complex -> full complex
    -> pair complex -> operator complex (degree + 1), through ``max_n``."""
    if max_n < 1:
        raise InvalidInputData("need at least one degree")
    if max_n > _MAX_DEGREE - 1:
        raise SizeLimit(
            f"exactness checking caps at max_n = {_MAX_DEGREE - 1}; "
            "it needs one degree of headroom"
        )
    if check:
        _require_valid_triple(triple)
    pair = triple.pair

    def d_et(n: int) -> Matrix:
        if n <= 0:
            return Matrix.zero(et_dim(triple, max(n + 1, 1)), 0)
        return coboundary_et(triple, n, check=False).matrix

    def d_pair(n: int) -> Matrix:
        if n <= 0:
            return Matrix.zero(pair_dim(pair, max(n + 1, 1)), 0)
        return coboundary_pair(pair, n, check=False).matrix

    def d_reg(n: int) -> Matrix:
        if n <= 0:
            return Matrix.zero(reg_dim(triple, max(n + 1, 1)), 0)
        return coboundary_reg(triple, n, check=False).matrix

    def incl(n: int) -> Matrix:
        pd, ed = pair_dim(pair, n), et_dim(triple, n)
        return vstack([Matrix.zero(pd, ed), Matrix.identity(ed)])

    def proj(n: int) -> Matrix:
        pd, ed = pair_dim(pair, n), et_dim(triple, n)
        return hstack([Matrix.identity(pd), Matrix.zero(pd, ed)])

    nodes: list[LesNode] = []
    for n in range(1, max_n + 1):
        # injectivity side: image of the connecting map from degree n-1
        conn_prev = omega_t(triple, n - 1, check=False)
        nodes.append(
            _exactness_node(
                conn_prev,
                d_pair(n - 1),
                d_et(n - 1),
                d_et(n),
                incl(n),
                d_reg(n - 1),
                n,
                "operator",
            )
        )
        nodes.append(
            _exactness_node(
                incl(n),
                d_et(n),
                d_reg(n - 1),
                d_reg(n),
                proj(n),
                d_pair(n - 1),
                n,
                "full",
            )
        )
        conn = omega_t(triple, n, check=False)
        nodes.append(
            _exactness_node(
                proj(n),
                d_reg(n),
                d_pair(n - 1),
                d_pair(n),
                conn,
                d_et(n),
                n,
                "pair",
            )
        )
    return LesReport(tuple(nodes))
