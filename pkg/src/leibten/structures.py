"""Concrete algebraic objects: Lie algebras with representations, Leibniz
algebras, embedding tensors, the triples they form, and a library of example
generators.  Also the controlling bracket calculus for embedding tensors (the
derived bracket on cochains valued in the Lie algebra) and the comparison map
into the cochain calculus of the induced Leibniz bracket.

Validation never raises on a broken identity: it returns a report carrying the
first failing basis tuple per identity with both sides' values, so callers can
show exactly where an axiom dies.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import DimensionMismatch, InvalidInputData
from .exactlin import Matrix, Rational, kernel_basis, rat, rref, solve
from .multilinear import (
    MultilinearMap,
    OutVec,
    SumSpace,
    balavoine,
    horizontal_lift,
    hemisemidirect,
)
from .tensorbasis import shuffles

# --- sparse vector helpers ---------------------------------------------------


def _vadd(a: OutVec, b: Mapping[int, Rational], c: Rational = rat(1)) -> None:
    for i, x in b.items():
        a[i] = a.get(i, rat(0)) + c * x


def _clean(vec: OutVec) -> OutVec:
    return {i: c for i, c in vec.items() if c != 0}


def _col(m: Matrix, j: int) -> OutVec:
    return {i: m.at(i, j) for i in range(m.rows) if m.at(i, j) != 0}


def _mat_cols(m: Matrix) -> list[OutVec]:
    return [_col(m, j) for j in range(m.cols)]


def _apply_cols(cols: Sequence[OutVec], vec: Mapping[int, Rational]) -> OutVec:
    out: OutVec = {}
    for j, c in vec.items():
        _vadd(out, cols[j], c)
    return _clean(out)


# --- validation reports ------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    identity: str
    at: tuple[int, ...]
    lhs: OutVec
    rhs: OutVec


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    witnesses: tuple[Witness, ...] = ()

    @staticmethod
    def from_witnesses(ws: Sequence[Witness]) -> "ValidationReport":
        return ValidationReport(not ws, tuple(ws))


def _first_failure(
    identity: str, keys, lhs_fn, rhs_fn
) -> Witness | None:
    for key in keys:
        lhs = _clean(dict(lhs_fn(key)))
        rhs = _clean(dict(rhs_fn(key)))
        if lhs != rhs:
            return Witness(identity, tuple(key), lhs, rhs)
    return None


# --- domain types ------------------------------------------------------------


@dataclass(frozen=True)
class LieAlgebra:
    dim: int
    bracket: MultilinearMap  # binary; alternating once validated

    @staticmethod
    def from_brackets(
        dim: int, table: Mapping[tuple[int, int], Mapping[int, object]]
    ) -> "LieAlgebra":
        """Build from sparse structure constants {(i,j): {k: coeff}} meaning
        [e_i,e_j] = sum_k coeff e_k; antisymmetry is filled in, not assumed."""
        full: dict[tuple[int, ...], dict[int, Rational]] = {}
        for (i, j), vec in table.items():
            acc = full.setdefault((i, j), {})
            for k, c in vec.items():
                acc[k] = acc.get(k, rat(0)) + rat(c)
            if (j, i) not in table:
                mirror = full.setdefault((j, i), {})
                for k, c in vec.items():
                    mirror[k] = mirror.get(k, rat(0)) - rat(c)
        return LieAlgebra(dim, MultilinearMap((dim, dim), dim, full, 0))

    def ad(self) -> list[Matrix]:
        """Adjoint action matrices, one per basis element."""
        mats = []
        for i in range(self.dim):
            cols = []
            for j in range(self.dim):
                vec = self.bracket.value((i, j))
                cols.append([vec.get(k, rat(0)) for k in range(self.dim)])
            mats.append(Matrix.from_rows(list(map(list, zip(*cols)))))
        return mats

    def validate(self) -> ValidationReport:
        ws = []
        w = _first_failure(
            "antisymmetry",
            itertools.product(range(self.dim), repeat=2),
            lambda k: self.bracket.value(k),
            lambda k: {i: -c for i, c in self.bracket.value((k[1], k[0])).items()},
        )
        if w:
            ws.append(w)

        def jacobi_lhs(key):
            x, y, z = key
            out: OutVec = {}
            for a, b, c in ((x, y, z), (y, z, x), (z, x, y)):
                for mid, c0 in self.bracket.value((a, b)).items():
                    _vadd(out, self.bracket.value((mid, c)), c0)
            return out

        w = _first_failure(
            "jacobi",
            itertools.combinations(range(self.dim), 3),
            jacobi_lhs,
            lambda key: {},
        )
        if w:
            ws.append(w)
        return ValidationReport.from_witnesses(ws)


@dataclass(frozen=True)
class Representation:
    matrices: tuple[Matrix, ...]  # one square matrix per Lie algebra basis vector

    def __post_init__(self):
        dims = {(m.rows, m.cols) for m in self.matrices}
        if len(dims) > 1 or any(r != c for r, c in dims):
            raise DimensionMismatch("action matrices must be square and equal-sized")

    @property
    def dim_v(self) -> int:
        return self.matrices[0].rows if self.matrices else 0

    @property
    def dim_g(self) -> int:
        return len(self.matrices)

    def action(self) -> MultilinearMap:
        """The action as a bilinear map (algebra slot, module slot) -> module."""
        table: dict[tuple[int, ...], OutVec] = {}
        for i, m in enumerate(self.matrices):
            for j, vec in enumerate(_mat_cols(m)):
                if vec:
                    table[(i, j)] = vec
        return MultilinearMap((self.dim_g, self.dim_v), self.dim_v, table, 0)

    def validate_over(self, algebra: LieAlgebra) -> ValidationReport:
        if algebra.dim != self.dim_g:
            raise DimensionMismatch("one action matrix per algebra basis vector")
        cols = [_mat_cols(m) for m in self.matrices]

        def lhs(key):
            i, j = key
            out: OutVec = {}
            for k, c in algebra.bracket.value((i, j)).items():
                for col_idx, colvec in enumerate(cols[k]):
                    for r, x in colvec.items():
                        out[r * self.dim_v + col_idx] = (
                            out.get(r * self.dim_v + col_idx, rat(0)) + c * x
                        )
            return out

        def rhs(key):
            i, j = key
            out: OutVec = {}
            for a, b, sign in ((i, j, 1), (j, i, -1)):
                # entry-sparse product rho(e_a) rho(e_b), flattened row-major
                for col_idx, colvec in enumerate(cols[b]):
                    prod = _apply_cols(cols[a], colvec)
                    for r, x in prod.items():
                        key_out = r * self.dim_v + col_idx
                        out[key_out] = out.get(key_out, rat(0)) + sign * x
            return out

        w = _first_failure(
            "representation-homomorphism",
            itertools.combinations(range(self.dim_g), 2),
            lhs,
            rhs,
        )
        return ValidationReport.from_witnesses([w] if w else [])


@dataclass(frozen=True)
class LieRepPair:
    algebra: LieAlgebra
    rep: Representation

    @property
    def dim_g(self) -> int:
        return self.algebra.dim

    @property
    def dim_v(self) -> int:
        return self.rep.dim_v

    def validate(self) -> ValidationReport:
        ws = list(self.algebra.validate().witnesses)
        ws += list(self.rep.validate_over(self.algebra).witnesses)
        return ValidationReport.from_witnesses(ws)


@dataclass(frozen=True)
class LeibnizAlgebra:
    dim: int
    bracket: MultilinearMap  # binary, not necessarily alternating

    @staticmethod
    def from_brackets(
        dim: int, table: Mapping[tuple[int, int], Mapping[int, object]]
    ) -> "LeibnizAlgebra":
        full = {
            (i, j): {k: rat(c) for k, c in vec.items()}
            for (i, j), vec in table.items()
        }
        return LeibnizAlgebra(dim, MultilinearMap((dim, dim), dim, full, 0))

    def validate(self) -> ValidationReport:
        def lhs(key):
            x, y, z = key
            out: OutVec = {}
            for mid, c in self.bracket.value((y, z)).items():
                _vadd(out, self.bracket.value((x, mid)), c)
            return out

        def rhs(key):
            x, y, z = key
            out: OutVec = {}
            for mid, c in self.bracket.value((x, y)).items():
                _vadd(out, self.bracket.value((mid, z)), c)
            for mid, c in self.bracket.value((x, z)).items():
                _vadd(out, self.bracket.value((y, mid)), c)
            return out

        w = _first_failure(
            "leibniz", itertools.product(range(self.dim), repeat=3), lhs, rhs
        )
        return ValidationReport.from_witnesses([w] if w else [])


@dataclass(frozen=True)
class EmbeddingTensor:
    matrix: Matrix  # dim_g x dim_v

    def apply(self, vec: Mapping[int, Rational]) -> OutVec:
        return _apply_cols(_mat_cols(self.matrix), vec)


@dataclass(frozen=True)
class LieLeibnizTriple:
    pair: LieRepPair
    tensor: EmbeddingTensor

    def __post_init__(self):
        if self.tensor.matrix.rows != self.pair.dim_g or (
            self.tensor.matrix.cols != self.pair.dim_v
        ):
            raise DimensionMismatch("tensor must map the module into the algebra")

    def validate(self) -> ValidationReport:
        ws = list(self.pair.validate().witnesses)
        t_cols = _mat_cols(self.tensor.matrix)
        bracket = self.pair.algebra.bracket
        rho_cols = [_mat_cols(m) for m in self.pair.rep.matrices]

        def lhs(key):
            u, v = key
            out: OutVec = {}
            for a, ca in t_cols[u].items():
                for b, cb in t_cols[v].items():
                    _vadd(out, bracket.value((a, b)), ca * cb)
            return out

        def rhs(key):
            u, v = key
            acted: OutVec = {}
            for a, ca in t_cols[u].items():
                _vadd(acted, rho_cols[a][v], ca)
            out: OutVec = {}
            for w, cw in acted.items():
                _vadd(out, t_cols[w], cw)
            return out

        w = _first_failure(
            "quadratic-constraint",
            itertools.product(range(self.pair.dim_v), repeat=2),
            lhs,
            rhs,
        )
        if w:
            ws.append(w)
        return ValidationReport.from_witnesses(ws)


@dataclass(frozen=True)
class OmniLie:
    """The canonical Leibniz bracket and symmetric pairing on gl(V) + V.

    Basis layout: matrix units R_ab at index a*dim_v + b, then module vectors.
    The pairing is stored read-only; nothing downstream consumes it.
    """

    dim_v: int
    bracket: MultilinearMap
    pairing: MultilinearMap

    @staticmethod
    def build(dim_v: int) -> "OmniLie":
        n = dim_v
        gl = n * n
        total = gl + n

        def unit(a: int, b: int) -> int:
            return a * n + b

        br: dict[tuple[int, ...], OutVec] = {}
        for a, b, c, d in itertools.product(range(n), repeat=4):
            out: OutVec = {}
            if b == c:
                out[unit(a, d)] = out.get(unit(a, d), rat(0)) + 1
            if d == a:
                out[unit(c, b)] = out.get(unit(c, b), rat(0)) - 1
            out = _clean(out)
            if out:
                br[(unit(a, b), unit(c, d))] = out
        for a, b, c in itertools.product(range(n), repeat=3):
            if b == c:
                br[(unit(a, b), gl + c)] = {gl + a: rat(1)}
        pr: dict[tuple[int, ...], OutVec] = {}
        for a, b, c in itertools.product(range(n), repeat=3):
            if b == c:
                pr[(unit(a, b), gl + c)] = {a: rat(1)}
                pr[(gl + c, unit(a, b))] = {a: rat(1)}
        return OmniLie(
            n,
            MultilinearMap((total, total), total, br, 0),
            MultilinearMap((total, total), n, pr, 0),
        )

    def validate(self) -> ValidationReport:
        ref = OmniLie.build(self.dim_v)
        ws = []
        if self.bracket != ref.bracket:
            ws.append(Witness("bracket-table", (), {}, {}))
        if self.pairing != ref.pairing:
            ws.append(Witness("pairing-table", (), {}, {}))
        return ValidationReport.from_witnesses(ws)


@dataclass(frozen=True)
class TripleHomomorphism:
    """Structure-preserving pair of linear maps from a source triple into a
    target triple: phi on algebras, varphi on modules."""

    phi: Matrix
    varphi: Matrix

    def validate_between(
        self, source: LieLeibnizTriple, target: LieLeibnizTriple
    ) -> ValidationReport:
        if self.phi.cols != source.pair.dim_g or self.phi.rows != target.pair.dim_g:
            raise DimensionMismatch("phi shape mismatch")
        if (
            self.varphi.cols != source.pair.dim_v
            or self.varphi.rows != target.pair.dim_v
        ):
            raise DimensionMismatch("varphi shape mismatch")
        phi_cols = _mat_cols(self.phi)
        vphi_cols = _mat_cols(self.varphi)
        tgt_bracket = target.pair.algebra.bracket
        tgt_rho = [_mat_cols(m) for m in target.pair.rep.matrices]
        ws = []

        def hom_lhs(key):
            i, j = key
            out: OutVec = {}
            for k, c in source.pair.algebra.bracket.value((i, j)).items():
                _vadd(out, phi_cols[k], c)
            return out

        def hom_rhs(key):
            i, j = key
            out: OutVec = {}
            for a, ca in phi_cols[i].items():
                for b, cb in phi_cols[j].items():
                    _vadd(out, tgt_bracket.value((a, b)), ca * cb)
            return out

        w = _first_failure(
            "lie-homomorphism",
            itertools.product(range(source.pair.dim_g), repeat=2),
            hom_lhs,
            hom_rhs,
        )
        if w:
            ws.append(w)

        src_t = _mat_cols(source.tensor.matrix)
        tgt_t = _mat_cols(target.tensor.matrix)

        def tw_lhs(key):
            (u,) = key
            out: OutVec = {}
            for w_, c in vphi_cols[u].items():
                _vadd(out, tgt_t[w_], c)
            return out

        def tw_rhs(key):
            (u,) = key
            out: OutVec = {}
            for x, c in src_t[u].items():
                _vadd(out, phi_cols[x], c)
            return out

        w = _first_failure(
            "tensor-intertwine", [(u,) for u in range(source.pair.dim_v)], tw_lhs, tw_rhs
        )
        if w:
            ws.append(w)

        src_rho = [_mat_cols(m) for m in source.pair.rep.matrices]

        def act_lhs(key):
            x, u = key
            return _apply_cols(vphi_cols, src_rho[x][u])

        def act_rhs(key):
            x, u = key
            out: OutVec = {}
            for a, ca in phi_cols[x].items():
                moved = vphi_cols[u]
                inner: OutVec = {}
                for w_, cw in moved.items():
                    _vadd(inner, tgt_rho[a][w_], cw)
                _vadd(out, inner, ca)
            return out

        w = _first_failure(
            "action-intertwine",
            itertools.product(range(source.pair.dim_g), range(source.pair.dim_v)),
            act_lhs,
            act_rhs,
        )
        if w:
            ws.append(w)
        return ValidationReport.from_witnesses(ws)


def validate(obj) -> ValidationReport:
    """Dispatch to the object's own validator."""
    if isinstance(
        obj, (LieAlgebra, LieRepPair, LeibnizAlgebra, LieLeibnizTriple, OmniLie)
    ):
        return obj.validate()
    raise InvalidInputData(f"no validator for {type(obj).__name__}")


# --- induced structures ------------------------------------------------------


def induced_leibniz(triple: LieLeibnizTriple) -> LeibnizAlgebra:
    """The bracket  u . v = action(T u) v  on the module."""
    t_cols = _mat_cols(triple.tensor.matrix)
    rho_cols = [_mat_cols(m) for m in triple.pair.rep.matrices]
    dim_v = triple.pair.dim_v
    table: dict[tuple[int, ...], OutVec] = {}
    for u in range(dim_v):
        for v in range(dim_v):
            out: OutVec = {}
            for a, ca in t_cols[u].items():
                _vadd(out, rho_cols[a][v], ca)
            out = _clean(out)
            if out:
                table[(u, v)] = out
    return LeibnizAlgebra(dim_v, MultilinearMap((dim_v, dim_v), dim_v, table, 0))


def _sum_space(pair: LieRepPair) -> SumSpace:
    return SumSpace((pair.dim_g, pair.dim_v))


def lift_theta(pair: LieRepPair, theta: MultilinearMap) -> MultilinearMap:
    """Lift a module-powers-to-algebra map onto the sum space."""
    space = _sum_space(pair)
    return horizontal_lift(theta, (1,) * theta.arity, 0, space)


def hemisemidirect_element(pair: LieRepPair) -> MultilinearMap:
    mu_alt = MultilinearMap(
        pair.algebra.bracket.dims_in,
        pair.algebra.bracket.dim_out,
        {
            k: v
            for k, v in pair.algebra.bracket.as_tensor().coeffs.items()
            if k[0] < k[1]
        },
        2,
    )
    return hemisemidirect(mu_alt, pair.rep.action(), _sum_space(pair))


def _derived_via_lift(
    pair: LieRepPair, theta: MultilinearMap, phi: MultilinearMap
) -> MultilinearMap:
    m = theta.arity
    big = balavoine(
        balavoine(hemisemidirect_element(pair), lift_theta(pair, theta)),
        lift_theta(pair, phi),
    ).scale((-1) ** (m - 1))
    # restrict to module inputs / algebra output; everything else must vanish
    space = _sum_space(pair)
    off = space.offset(1)
    g, v = pair.dim_g, pair.dim_v
    table: dict[tuple[int, ...], OutVec] = {}
    for key, vec in big.coeffs.items():
        if all(i >= off for i in key):
            inner = {i: c for i, c in vec.items() if i < g}
            if inner:
                table[tuple(i - off for i in key)] = inner
            if any(i >= off for i in vec):
                raise InvalidInputData("derived bracket leaked into the module block")
        elif vec:
            raise InvalidInputData("derived bracket leaked off the module block")
    arity = theta.arity + phi.arity
    return MultilinearMap((v,) * arity, g, table, 0)


def _derived_explicit(
    pair: LieRepPair, theta: MultilinearMap, phi: MultilinearMap
) -> MultilinearMap:
    m, n = theta.arity, phi.arity
    g, v = pair.dim_g, pair.dim_v
    bracket = pair.algebra.bracket
    rho_cols = [_mat_cols(mx) for mx in pair.rep.matrices]

    def act(avec: OutVec, u_vec: OutVec) -> OutVec:
        out: OutVec = {}
        for a, ca in avec.items():
            for u, cu in u_vec.items():
                _vadd(out, rho_cols[a][u], ca * cu)
        return out

    def val(key: tuple[int, ...]) -> OutVec:
        out: OutVec = {}
        # theta( ..., action(phi(...)) anchor, tail ), inner map phi
        for k in range(1, m + 1):
            for sh in shuffles(k - 1, n):
                sign = sh.sign * (-1) ** ((k - 1) * n + 1)
                head = tuple(key[i] for i in sh.perm[: k - 1])
                inner_args = tuple(key[i] for i in sh.perm[k - 1 :])
                anchor = key[k + n - 1]
                inner = phi.value(inner_args)
                acted = act(inner, {anchor: rat(1)})
                tail = key[k + n :]
                for w_, cw in acted.items():
                    # theta is linear in its k-th slot; expand over basis
                    for i, c in theta.value(head + (w_,) + tail).items():
                        out[i] = out.get(i, rat(0)) + sign * cw * c
        # algebra bracket of the two values, all inputs shuffled
        for sh in shuffles(m, n):
            sign = sh.sign * (-1) ** (m * n + 1)
            left = theta.value(tuple(key[i] for i in sh.perm[:m]))
            right = phi.value(tuple(key[i] for i in sh.perm[m:]))
            for a, ca in left.items():
                for b, cb in right.items():
                    for i, c in bracket.value((a, b)).items():
                        out[i] = out.get(i, rat(0)) + sign * ca * cb * c
        # phi( ..., action(theta(...)) anchor, tail ), inner map theta
        for k in range(1, n + 1):
            for sh in shuffles(k - 1, m):
                sign = sh.sign * (-1) ** (m * (k + n - 1))
                head = tuple(key[i] for i in sh.perm[: k - 1])
                inner_args = tuple(key[i] for i in sh.perm[k - 1 :])
                anchor = key[k + m - 1]
                inner = theta.value(inner_args)
                acted = act(inner, {anchor: rat(1)})
                tail = key[k + m :]
                for w_, cw in acted.items():
                    for i, c in phi.value(head + (w_,) + tail).items():
                        out[i] = out.get(i, rat(0)) + sign * cw * c
        return out

    return MultilinearMap.from_function((v,) * (m + n), g, val, 0)


def derived_bracket(
    pair: LieRepPair, theta: MultilinearMap, phi: MultilinearMap
) -> MultilinearMap:
    """Graded Lie bracket on maps (module tensor powers) -> algebra.

    Computed two ways — through the double commutator with the hemisemidirect
    element on the sum space, and by the explicit three-sum formula — and the
    results are asserted identical.
    """
    if theta.dim_out != pair.dim_g or phi.dim_out != pair.dim_g:
        raise DimensionMismatch("values must land in the algebra")
    if any(d != pair.dim_v for d in theta.dims_in + phi.dims_in):
        raise DimensionMismatch("inputs must come from the module")
    explicit = _derived_explicit(pair, theta, phi)
    lifted = _derived_via_lift(pair, theta, phi)
    assert explicit == lifted, "derived bracket routes disagree"
    return explicit


def phi_rep_map(pair: LieRepPair, f: MultilinearMap) -> MultilinearMap:
    """Push a map valued in the algebra to one valued in the module by acting
    on one extra module argument (with a minus sign)."""
    if f.dim_out != pair.dim_g or any(d != pair.dim_v for d in f.dims_in):
        raise DimensionMismatch("expected a module-powers-to-algebra map")
    v = pair.dim_v
    rho_cols = [_mat_cols(m) for m in pair.rep.matrices]

    def val(key: tuple[int, ...]) -> OutVec:
        out: OutVec = {}
        last = key[-1]
        for a, ca in f.value(key[:-1]).items():
            _vadd(out, rho_cols[a][last], -ca)
        return out

    return MultilinearMap.from_function((v,) * (f.arity + 1), v, val, 0)


def graph_integrable(t: Matrix) -> bool:
    """Whether the graph of t : V -> gl(V) closes under the canonical bracket
    on gl(V) + V, i.e. t is an embedding tensor for the natural action."""
    v = t.cols
    if t.rows != v * v:
        raise DimensionMismatch("expected a (dim^2) x dim matrix")
    mats = []
    for u in range(v):
        rows = [[t.at(a * v + b, u) for b in range(v)] for a in range(v)]
        mats.append(Matrix.from_rows(rows))

    def t_of(vec: Mapping[int, Rational]) -> Matrix:
        acc = Matrix.zero(v, v)
        for a, c in vec.items():
            acc = acc + mats[a].scale(c)
        return acc

    for u in range(v):
        for w in range(v):
            lhs = mats[u] @ mats[w] - mats[w] @ mats[u]
            rhs = t_of(_col(mats[u], w))
            if lhs != rhs:
                return False
    return True


# --- example generators ------------------------------------------------------


def _checked(triple: LieLeibnizTriple, what: str) -> LieLeibnizTriple:
    report = triple.validate()
    if not report.ok:
        first = report.witnesses[0]
        raise InvalidInputData(
            f"{what}: {first.identity} fails at {first.at}: {first.lhs} != {first.rhs}"
        )
    return triple


def heisenberg_algebra() -> LieAlgebra:
    return LieAlgebra.from_brackets(3, {(0, 1): {2: 1}})


def adjoint_pair(algebra: LieAlgebra) -> LieRepPair:
    return LieRepPair(algebra, Representation(tuple(algebra.ad())))


def heisenberg_family(r: Sequence[Sequence[object]], check: bool = True) -> LieLeibnizTriple:
    """Candidate tensor on the 3-dimensional nilpotent algebra with its
    adjoint action; entries r[i][j] give the matrix of the tensor."""
    t = Matrix.from_rows([[rat(x) for x in row] for row in r])
    if t.rows != 3 or t.cols != 3:
        raise InvalidInputData("expected a 3x3 parameter matrix")
    triple = LieLeibnizTriple(adjoint_pair(heisenberg_algebra()), EmbeddingTensor(t))
    return _checked(triple, "heisenberg family") if check else triple


def differential_lie(algebra: LieAlgebra, d: Matrix) -> LieLeibnizTriple:
    """A square-zero derivation as a tensor for the adjoint action."""
    if d.rows != algebra.dim or d.cols != algebra.dim:
        raise InvalidInputData("derivation must be square of the algebra's size")
    if not (d @ d).is_zero():
        raise InvalidInputData("derivation does not square to zero")
    cols = _mat_cols(d)
    for i, j in itertools.product(range(algebra.dim), repeat=2):
        lhs: OutVec = {}
        for k, c in algebra.bracket.value((i, j)).items():
            _vadd(lhs, cols[k], c)
        rhs: OutVec = {}
        for a, ca in cols[i].items():
            _vadd(rhs, algebra.bracket.value((a, j)), ca)
        for b, cb in cols[j].items():
            _vadd(rhs, algebra.bracket.value((i, b)), cb)
        if _clean(lhs) != _clean(rhs):
            raise InvalidInputData(f"not a derivation at ({i},{j})")
    triple = LieLeibnizTriple(adjoint_pair(algebra), EmbeddingTensor(d))
    return _checked(triple, "differential structure")


def so8_56() -> LieLeibnizTriple:
    """Skew-symmetric 8x8 matrices acting on (degree-2 wedge of R^8) plus its
    dual, with the tensor sending a wedge basis vector to the matching
    elementary skew matrix and killing the dual half."""
    n = 8
    pairs = list(itertools.combinations(range(n), 2))
    g_index = {p: a for a, p in enumerate(pairs)}
    dim_g = len(pairs)  # 28
    dim_w = len(pairs)  # 28
    dim_v = 2 * dim_w  # 56

    def e_coeff(i: int, j: int) -> tuple[int, int]:
        """Index and sign of the skew basis element with slots (i,j)."""
        if i == j:
            return -1, 0
        if i < j:
            return g_index[(i, j)], 1
        return g_index[(j, i)], -1

    # Lie bracket
    br: dict[tuple[int, int], dict[int, Rational]] = {}
    for a, (i, j) in enumerate(pairs):
        for b, (k, l) in enumerate(pairs):
            out: dict[int, Rational] = {}
            for (p, q), s in (
                ((i, l), 1 if j == k else 0),
                ((j, l), -1 if i == k else 0),
                ((k, i), 1 if j == l else 0),
                ((k, j), -1 if i == l else 0),
            ):
                if s:
                    idx, sg = e_coeff(p, q)
                    if sg:
                        out[idx] = out.get(idx, rat(0)) + s * sg
            out = _clean(out)
            if out:
                br[(a, b)] = out
    algebra = LieAlgebra(dim_g, MultilinearMap((dim_g, dim_g), dim_g, br, 0))

    # wedge-square action on W, one sparse matrix per basis element
    def wedge_coeff(k: int, l: int) -> tuple[int, int]:
        if k == l:
            return -1, 0
        if k < l:
            return g_index[(k, l)], 1
        return g_index[(l, k)], -1

    w_mats = []
    for i, j in pairs:
        entries: dict[tuple[int, int], Rational] = {}
        for col, (k, l) in enumerate(pairs):
            for (p, q), s in (
                ((i, l), 1 if j == k else 0),
                ((j, l), -1 if i == k else 0),
                ((k, i), 1 if j == l else 0),
                ((k, j), -1 if i == l else 0),
            ):
                if s:
                    idx, sg = wedge_coeff(p, q)
                    if sg:
                        entries[(idx, col)] = entries.get((idx, col), rat(0)) + s * sg
        rows = [[entries.get((r, c), rat(0)) for c in range(dim_w)] for r in range(dim_w)]
        w_mats.append(Matrix.from_rows(rows))

    mats = []
    for m in w_mats:
        top = [[m.at(r, c) for c in range(dim_w)] + [rat(0)] * dim_w for r in range(dim_w)]
        mt = m.transpose().scale(-1)
        bottom = [
            [rat(0)] * dim_w + [mt.at(r, c) for c in range(dim_w)] for r in range(dim_w)
        ]
        mats.append(Matrix.from_rows(top + bottom))

    t_rows = [
        [rat(1) if r == c else rat(0) for c in range(dim_w)] + [rat(0)] * dim_w
        for r in range(dim_g)
    ]
    triple = LieLeibnizTriple(
        LieRepPair(algebra, Representation(tuple(mats))),
        EmbeddingTensor(Matrix.from_rows(t_rows)),
    )
    return _checked(triple, "so8 fundamental example")


def adjoint_coadjoint(algebra: LieAlgebra) -> LieLeibnizTriple:
    """Projection from (algebra + its dual) onto the algebra, acting by the
    adjoint action on the first half and its negative transpose on the dual."""
    g = algebra.dim
    ad = algebra.ad()
    mats = []
    for m in ad:
        mt = m.transpose().scale(-1)
        rows = [
            [m.at(r, c) for c in range(g)] + [rat(0)] * g for r in range(g)
        ] + [[rat(0)] * g + [mt.at(r, c) for c in range(g)] for r in range(g)]
        mats.append(Matrix.from_rows(rows))
    t = Matrix.from_rows(
        [[rat(1) if r == c else rat(0) for c in range(g)] + [rat(0)] * g for r in range(g)]
    )
    triple = LieLeibnizTriple(
        LieRepPair(algebra, Representation(tuple(mats))), EmbeddingTensor(t)
    )
    return _checked(triple, "adjoint-coadjoint projection")


def endomorphism_triple(t_map: Matrix) -> LieLeibnizTriple:
    """From a two-term complex W -> H: the algebra of endomorphism pairs
    commuting with the differential, acting on Hom(H, W); the tensor sends a
    map to the pair obtained by composing with the differential on each side.

    Flattening conventions: gl entries row-major; a pair (A0, A1) is the A0
    block then the A1 block; Hom(H, W) entries row-major (W rows).
    """
    h, w = t_map.rows, t_map.cols  # t_map : W -> H
    gl_h, gl_w = h * h, w * w

    # kernel of (A0, A1) |-> A0 T - T A1  inside gl(H) + gl(W)
    cols = []
    for a0_r, a0_c in itertools.product(range(h), repeat=2):
        m = [[rat(0)] * w for _ in range(h)]
        for c in range(w):
            m[a0_r][c] = t_map.at(a0_c, c)
        cols.append([m[r][c] for r in range(h) for c in range(w)])
    for a1_r, a1_c in itertools.product(range(w), repeat=2):
        m = [[rat(0)] * w for _ in range(h)]
        for r in range(h):
            m[r][a1_c] = -t_map.at(r, a1_r)
        cols.append([m[r][c] for r in range(h) for c in range(w)])
    constraint = Matrix.from_rows(list(map(list, zip(*cols)))) if cols else Matrix.zero(0, 0)
    basis = kernel_basis(constraint)
    dim_g = len(basis)
    basis_mat = Matrix.from_rows([[vec[i] for vec in basis] for i in range(gl_h + gl_w)])

    def unflatten(vec: Sequence[Rational]) -> tuple[Matrix, Matrix]:
        a0 = Matrix.from_rows([[vec[r * h + c] for c in range(h)] for r in range(h)])
        a1 = Matrix.from_rows(
            [[vec[gl_h + r * w + c] for c in range(w)] for r in range(w)]
        )
        return a0, a1

    def flatten(a0: Matrix, a1: Matrix) -> list[Rational]:
        return [a0.at(r, c) for r in range(h) for c in range(h)] + [
            a1.at(r, c) for r in range(w) for c in range(w)
        ]

    def coords(a0: Matrix, a1: Matrix) -> OutVec:
        sol = solve(basis_mat, flatten(a0, a1))
        if sol is None:
            raise InvalidInputData("value escapes the endomorphism algebra")
        return {i: c for i, c in enumerate(sol) if c != 0}

    members = [unflatten(vec) for vec in basis]
    br: dict[tuple[int, int], OutVec] = {}
    for a, (a0, a1) in enumerate(members):
        for b, (b0, b1) in enumerate(members):
            c0 = a0 @ b0 - b0 @ a0
            c1 = a1 @ b1 - b1 @ a1
            vec = coords(c0, c1)
            if vec:
                br[(a, b)] = vec
    algebra = LieAlgebra(dim_g, MultilinearMap((dim_g, dim_g), dim_g, br, 0))

    dim_v = w * h  # Hom(H, W), row-major over W rows

    def phi_matrix(idx: int) -> Matrix:
        rows = [[rat(0)] * h for _ in range(w)]
        rows[idx // h][idx % h] = rat(1)
        return Matrix.from_rows(rows)

    mats = []
    for a0, a1 in members:
        cols_out = []
        for idx in range(dim_v):
            phi = phi_matrix(idx)
            out = a1 @ phi - phi @ a0
            cols_out.append([out.at(r, c) for r in range(w) for c in range(h)])
        mats.append(Matrix.from_rows(list(map(list, zip(*cols_out)))))

    t_cols = []
    for idx in range(dim_v):
        phi = phi_matrix(idx)
        vec = coords(t_map @ phi, phi @ t_map) if h and w else {}
        t_cols.append([vec.get(i, rat(0)) for i in range(dim_g)])
    t = Matrix.from_rows(list(map(list, zip(*t_cols)))) if dim_v else Matrix.zero(dim_g, 0)

    triple = LieLeibnizTriple(
        LieRepPair(algebra, Representation(tuple(mats))), EmbeddingTensor(t)
    )
    return _checked(triple, "two-term complex endomorphisms")


def strict_lie2(
    dim0: int,
    dim1: int,
    d: Matrix,
    bracket00: Mapping[tuple[int, int], Mapping[int, object]],
    bracket01: Mapping[tuple[int, int], Mapping[int, object]],
) -> LieLeibnizTriple:
    """Two-term graded bracket data: degree-0 algebra, its action on degree 1,
    and the boundary map as the tensor."""
    algebra = LieAlgebra.from_brackets(dim0, bracket00)
    mats = []
    for i in range(dim0):
        rows = [[rat(0)] * dim1 for _ in range(dim1)]
        for (x, a), vec in bracket01.items():
            if x == i:
                for b, c in vec.items():
                    rows[b][a] = rows[b][a] + rat(c)
        mats.append(Matrix.from_rows(rows))
    triple = LieLeibnizTriple(
        LieRepPair(algebra, Representation(tuple(mats))), EmbeddingTensor(d)
    )
    return _checked(triple, "strict two-term algebra")


def crossed_module(
    g0: LieAlgebra, g1: LieAlgebra, d: Matrix, action_mats: Sequence[Matrix]
) -> LieLeibnizTriple:
    """Crossed module data (two algebras, a boundary, an action by derivations)
    packaged as a triple; the crossed-module identities are checked first."""
    d_cols = _mat_cols(d)
    cols1 = [_mat_cols(m) for m in action_mats]
    for x in range(g0.dim):
        for m_ in range(g1.dim):
            lhs: OutVec = {}
            for a, ca in cols1[x][m_].items():
                _vadd(lhs, d_cols[a], ca)
            rhs: OutVec = {}
            for b, cb in d_cols[m_].items():
                _vadd(rhs, g0.bracket.value((x, b)), cb)
            if _clean(lhs) != _clean(rhs):
                raise InvalidInputData(f"boundary fails equivariance at ({x},{m_})")
    for m_ in range(g1.dim):
        for n_ in range(g1.dim):
            lhs = {}
            for a, ca in d_cols[m_].items():
                _vadd(lhs, cols1[a][n_], ca)
            if _clean(lhs) != _clean(dict(g1.bracket.value((m_, n_)))):
                raise InvalidInputData(f"Peiffer identity fails at ({m_},{n_})")
    triple = LieLeibnizTriple(
        LieRepPair(g0, Representation(tuple(action_mats))), EmbeddingTensor(d)
    )
    return _checked(triple, "crossed module")


def equivariant_map(pair: LieRepPair, t: Matrix) -> LieLeibnizTriple:
    """An intertwiner from the module to the algebra is always a tensor."""
    t_cols = _mat_cols(t)
    rho_cols = [_mat_cols(m) for m in pair.rep.matrices]
    for x in range(pair.dim_g):
        for u in range(pair.dim_v):
            lhs: OutVec = {}
            for w_, cw in rho_cols[x][u].items():
                _vadd(lhs, t_cols[w_], cw)
            rhs: OutVec = {}
            for a, ca in t_cols[u].items():
                _vadd(rhs, pair.algebra.bracket.value((x, a)), ca)
            if _clean(lhs) != _clean(rhs):
                raise InvalidInputData(f"map is not equivariant at ({x},{u})")
    return _checked(
        LieLeibnizTriple(pair, EmbeddingTensor(t)), "equivariant map"
    )


def annihilator_ideal(leibniz: LeibnizAlgebra) -> list[list[Rational]]:
    """Basis (as row vectors) of the smallest two-sided ideal containing all
    squares; polarized squares are seeded explicitly so the span is right in
    characteristic zero."""
    n = leibniz.dim
    gens: list[list[Rational]] = []

    def add_vec(vec: OutVec):
        gens.append([vec.get(i, rat(0)) for i in range(n)])

    for i in range(n):
        add_vec(leibniz.bracket.value((i, i)))
    for i, j in itertools.combinations(range(n), 2):
        both: OutVec = {}
        _vadd(both, leibniz.bracket.value((i, j)))
        _vadd(both, leibniz.bracket.value((j, i)))
        add_vec(_clean(both))

    def reduce_basis(rows: list[list[Rational]]) -> list[list[Rational]]:
        if not rows:
            return []
        reduced, pivots = rref(Matrix.from_rows(rows))
        return [
            [reduced.at(r, c) for c in range(n)] for r in range(len(pivots))
        ]

    basis = reduce_basis(gens)
    while True:
        new_rows = list(basis)
        for vec in basis:
            sparse = {i: c for i, c in enumerate(vec) if c != 0}
            for j in range(n):
                left: OutVec = {}
                right: OutVec = {}
                for i, c in sparse.items():
                    _vadd(left, leibniz.bracket.value((j, i)), c)
                    _vadd(right, leibniz.bracket.value((i, j)), c)
                for out in (left, right):
                    out = _clean(out)
                    if out:
                        new_rows.append([out.get(i, rat(0)) for i in range(n)])
        new_basis = reduce_basis(new_rows)
        if len(new_basis) == len(basis):
            return new_basis
        basis = new_basis


def annihilator_projection(leibniz: LeibnizAlgebra) -> LieLeibnizTriple:
    """Quotient a Leibniz algebra by its square ideal; the projection onto the
    quotient (a Lie algebra) is a tensor for the left-multiplication action."""
    report = leibniz.validate()
    if not report.ok:
        raise InvalidInputData("not a Leibniz algebra")
    n = leibniz.dim
    ideal = annihilator_ideal(leibniz)
    if ideal:
        reduced, pivots = rref(Matrix.from_rows(ideal))
    else:
        reduced, pivots = Matrix.zero(0, n), []
    free = [c for c in range(n) if c not in pivots]
    dim_q = len(free)
    pos = {c: k for k, c in enumerate(free)}

    def project(vec: OutVec) -> OutVec:
        # subtract ideal rows to kill pivot coordinates, keep free ones
        dense = [vec.get(i, rat(0)) for i in range(n)]
        for r, p in enumerate(pivots):
            c = dense[p]
            if c != 0:
                for j in range(n):
                    dense[j] -= c * reduced.at(r, j)
        return {pos[c]: dense[c] for c in free if dense[c] != 0}

    br: dict[tuple[int, int], OutVec] = {}
    for a, b in itertools.product(range(dim_q), repeat=2):
        vec = project(dict(leibniz.bracket.value((free[a], free[b]))))
        if vec:
            br[(a, b)] = vec
    quotient = LieAlgebra(dim_q, MultilinearMap((dim_q, dim_q), dim_q, br, 0))

    mats = []
    for a in range(dim_q):
        rows = [[rat(0)] * n for _ in range(n)]
        for u in range(n):
            for i, c in leibniz.bracket.value((free[a], u)).items():
                rows[i][u] = rows[i][u] + c
        mats.append(Matrix.from_rows(rows))
    t_rows = [[rat(0)] * n for _ in range(dim_q)]
    for u in range(n):
        for i, c in project({u: rat(1)}).items():
            t_rows[i][u] = c
    triple = LieLeibnizTriple(
        LieRepPair(quotient, Representation(tuple(mats))),
        EmbeddingTensor(Matrix.from_rows(t_rows)),
    )
    return _checked(triple, "square-ideal quotient")


def left_mult(leibniz: LeibnizAlgebra) -> LieLeibnizTriple:
    """Left multiplication of a Leibniz algebra as a tensor into gl of the
    underlying space with its natural action."""
    report = leibniz.validate()
    if not report.ok:
        raise InvalidInputData("not a Leibniz algebra")
    n = leibniz.dim
    gl = n * n
    br: dict[tuple[int, int], OutVec] = {}
    for a, b, c, d_ in itertools.product(range(n), repeat=4):
        out: OutVec = {}
        if b == c:
            out[a * n + d_] = out.get(a * n + d_, rat(0)) + 1
        if d_ == a:
            out[c * n + b] = out.get(c * n + b, rat(0)) - 1
        out = _clean(out)
        if out:
            br[(a * n + b, c * n + d_)] = out
    algebra = LieAlgebra(gl, MultilinearMap((gl, gl), gl, br, 0))
    mats = []
    for a in range(n):
        for b in range(n):
            rows = [[rat(0)] * n for _ in range(n)]
            rows[a][b] = rat(1)
            mats.append(Matrix.from_rows(rows))
    t_rows = [[rat(0)] * n for _ in range(gl)]
    for x in range(n):
        for y in range(n):
            for i, c in leibniz.bracket.value((x, y)).items():
                t_rows[i * n + y][x] = t_rows[i * n + y][x] + c
    triple = LieLeibnizTriple(
        LieRepPair(algebra, Representation(tuple(mats))),
        EmbeddingTensor(Matrix.from_rows(t_rows)),
    )
    return _checked(triple, "left multiplication")


def omni_projection_triple(dim_v: int) -> LieLeibnizTriple:
    """gl(V) acting on gl(V) + V, with the first-factor projection as tensor;
    its induced bracket is the canonical bracket housed in OmniLie."""
    n = dim_v
    gl = n * n
    total = gl + n
    br: dict[tuple[int, int], OutVec] = {}
    for a, b, c, d_ in itertools.product(range(n), repeat=4):
        out: OutVec = {}
        if b == c:
            out[a * n + d_] = out.get(a * n + d_, rat(0)) + 1
        if d_ == a:
            out[c * n + b] = out.get(c * n + b, rat(0)) - 1
        out = _clean(out)
        if out:
            br[(a * n + b, c * n + d_)] = out
    algebra = LieAlgebra(gl, MultilinearMap((gl, gl), gl, br, 0))
    mats = []
    for a in range(n):
        for b in range(n):
            rows = [[rat(0)] * total for _ in range(total)]
            # commutator block on gl(V)
            u = a * n + b
            for c, d_ in itertools.product(range(n), repeat=2):
                vec = br.get((u, c * n + d_), {})
                for i, x in vec.items():
                    rows[i][c * n + d_] = rows[i][c * n + d_] + x
            # natural action block on V
            rows[gl + a][gl + b] = rat(1)
            mats.append(Matrix.from_rows(rows))
    t_rows = [
        [rat(1) if r == c else rat(0) for c in range(gl)] + [rat(0)] * n
        for r in range(gl)
    ]
    triple = LieLeibnizTriple(
        LieRepPair(algebra, Representation(tuple(mats))),
        EmbeddingTensor(Matrix.from_rows(t_rows)),
    )
    return _checked(triple, "first-factor projection")
