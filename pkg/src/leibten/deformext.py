"""First-order deformations and central extensions, driven by the degree-2
cohomology of :mod:`leibten.cohomology`.

A deformation datum perturbs all three structure maps at once (bracket,
action, operator); it extends to first order exactly when it is a 2-cocycle
of the full complex.  A central extension is a triple built on enlarged
spaces whose extra directions bracket and act by zero; with a choice of
section it is encoded by a 2-cocycle with trivial two-term coefficients, and
changing the section shifts the cocycle by a coboundary with vanishing
operator leg.

Everything here evaluates both the matrix route (flatten, multiply by the
assembled coboundary) and the display route (brute-force loops over basis
tuples) and asserts they agree entrywise, so the two derivations keep each
other honest.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .cohomology import (
    coboundary_coeff,
    coboundary_reg,
    reg_dim,
    trivial_representation,
)
from .errors import (
    DimensionMismatch,
    InvalidInputData,
    NotACocycle,
    NotASection,
    NotCentral,
)
from .exactlin import Matrix, Rational, hstack, rank, rat, solve, vstack
from .multilinear import MultilinearMap, OutVec
from .structures import (
    EmbeddingTensor,
    LieAlgebra,
    LieLeibnizTriple,
    LieRepPair,
    Representation,
    TripleHomomorphism,
    ValidationReport,
    Witness,
    _mat_cols,
    _vadd,
)
from .tensorbasis import wedge_tuples

_ZERO = rat(0)


def _two_form(triple: LieLeibnizTriple, dim_out: int) -> tuple[int, int]:
    return triple.pair.dim_g, dim_out


def _flatten_two_form(f: MultilinearMap, g: int, dim_out: int) -> list[Rational]:
    vec = [_ZERO] * (len(wedge_tuples(g, 2)) * dim_out)
    for i, key in enumerate(wedge_tuples(g, 2)):
        for s, c in f.value(key).items():
            vec[i * dim_out + s] = c
    return vec


def _flatten_mixed(f: MultilinearMap, g: int, v: int, dim_out: int) -> list[Rational]:
    vec = [_ZERO] * (g * v * dim_out)
    idx = 0
    for x in range(g):
        for u in range(v):
            val = f.value((x, u))
            for s in range(dim_out):
                vec[idx] = val.get(s, _ZERO)
                idx += 1
    return vec


def _flatten_map_matrix(m: Matrix) -> list[Rational]:
    # operator-leg layout: input index outermost, output index fastest
    return [m.at(s, u) for u in range(m.cols) for s in range(m.rows)]


def _unflatten_two_form(
    vec: Sequence[Rational], g: int, dim_out: int
) -> MultilinearMap:
    table: dict[tuple[int, ...], OutVec] = {}
    for i, key in enumerate(wedge_tuples(g, 2)):
        out = {
            s: vec[i * dim_out + s] for s in range(dim_out) if vec[i * dim_out + s]
        }
        if out:
            table[key] = out
    return MultilinearMap((g, g), dim_out, table, 2)


def _unflatten_mixed(
    vec: Sequence[Rational], g: int, v: int, dim_out: int
) -> MultilinearMap:
    table: dict[tuple[int, ...], OutVec] = {}
    idx = 0
    for x in range(g):
        for u in range(v):
            out = {s: vec[idx + s] for s in range(dim_out) if vec[idx + s]}
            if out:
                table[(x, u)] = out
            idx += dim_out
    return MultilinearMap((g, v), dim_out, table, 1)


def _unflatten_map_matrix(
    vec: Sequence[Rational], rows: int, cols: int
) -> Matrix:
    grid = [[_ZERO] * cols for _ in range(rows)]
    for u in range(cols):
        for s in range(rows):
            grid[s][u] = vec[u * rows + s]
    return Matrix.from_rows(grid) if rows and cols else Matrix.zero(rows, cols)


@dataclass(frozen=True)
class DeformationDatum:
    """A first-order perturbation (bracket two-form, action two-form, operator
    shift) of a triple's three structure maps."""

    omega: MultilinearMap  # alternating (g, g) -> g
    varrho: MultilinearMap  # (g, v) -> v
    cal_t: Matrix  # g x v

    @staticmethod
    def zero(triple: LieLeibnizTriple) -> "DeformationDatum":
        g, v = triple.pair.dim_g, triple.pair.dim_v
        return DeformationDatum(
            MultilinearMap((g, g), g, {}, 2),
            MultilinearMap((g, v), v, {}, 1),
            Matrix.zero(g, v),
        )

    def check_shapes(self, triple: LieLeibnizTriple) -> None:
        g, v = triple.pair.dim_g, triple.pair.dim_v
        if self.omega.dims_in != (g, g) or self.omega.dim_out != g:
            raise DimensionMismatch("bracket two-form has wrong shape")
        if self.varrho.dims_in != (g, v) or self.varrho.dim_out != v:
            raise DimensionMismatch("action two-form has wrong shape")
        if self.cal_t.rows != g or self.cal_t.cols != v:
            raise DimensionMismatch("operator shift has wrong shape")

    def to_cochain(self, triple: LieLeibnizTriple) -> tuple[Rational, ...]:
        self.check_shapes(triple)
        g, v = triple.pair.dim_g, triple.pair.dim_v
        return tuple(
            _flatten_two_form(self.omega, g, g)
            + _flatten_mixed(self.varrho, g, v, v)
            + _flatten_map_matrix(self.cal_t)
        )

    @staticmethod
    def from_cochain(
        triple: LieLeibnizTriple, vec: Sequence[Rational]
    ) -> "DeformationDatum":
        g, v = triple.pair.dim_g, triple.pair.dim_v
        if len(vec) != reg_dim(triple, 2):
            raise DimensionMismatch(
                f"expected a degree-2 cochain of length {reg_dim(triple, 2)}"
            )
        n1 = len(wedge_tuples(g, 2)) * g
        n2 = g * v * v
        return DeformationDatum(
            _unflatten_two_form(vec[:n1], g, g),
            _unflatten_mixed(vec[n1 : n1 + n2], g, v, v),
            _unflatten_map_matrix(vec[n1 + n2 :], g, v),
        )


def _deformation_residuals(
    triple: LieLeibnizTriple, d: DeformationDatum
) -> tuple[dict, dict, dict]:
    """Brute-force evaluation of the three first-order obstruction displays.

    Returns sparse residual tables keyed by input tuples: the Jacobi defect of
    the perturbed bracket, the representation defect, and the operator defect.
    """
    pair = triple.pair
    g, v = pair.dim_g, pair.dim_v
    bracket = pair.algebra.bracket
    rho = pair.rep.matrices
    t_cols = _mat_cols(triple.tensor.matrix)
    tc_cols = _mat_cols(d.cal_t)

    jac: dict[tuple[int, int, int], OutVec] = {}
    for key in wedge_tuples(g, 3):
        x, y, z = key
        out: OutVec = {}
        for i0, (a, rest) in enumerate(
            ((x, (y, z)), (y, (x, z)), (z, (x, y)))
        ):
            sgn = 1 if i0 % 2 == 0 else -1
            for m, c in d.omega.value(rest).items():
                _vadd(out, bracket.value((a, m)), sgn * c)
        pairs = (((x, y), (z,), 1), ((x, z), (y,), -1), ((y, z), (x,), 1))
        for br, rest, sgn in pairs:
            for m, c in bracket.value(br).items():
                _vadd(out, d.omega.value((m,) + rest), sgn * c)
        out = {s: c for s, c in out.items() if c}
        if out:
            jac[key] = out

    repdef: dict[tuple[int, int, int], OutVec] = {}
    for key in wedge_tuples(g, 2):
        x, y = key
        for u in range(v):
            out: OutVec = {}
            for m, c in d.omega.value((x, y)).items():
                for s in range(v):
                    cc = rho[m].at(s, u)
                    if cc:
                        _vadd(out, {s: cc}, c)
            for m, c in bracket.value((x, y)).items():
                _vadd(out, d.varrho.value((m, u)), c)
            # commutator of the action with the action two-form, both orders
            for s, c in d.varrho.value((y, u)).items():
                for s2 in range(v):
                    cc = rho[x].at(s2, s)
                    if cc:
                        _vadd(out, {s2: -cc}, c)
            for s in range(v):
                c = rho[x].at(s, u)
                if c:
                    _vadd(out, d.varrho.value((y, s)), c)
            for s in range(v):
                c = rho[y].at(s, u)
                if c:
                    _vadd(out, d.varrho.value((x, s)), -c)
            for s, c in d.varrho.value((x, u)).items():
                for s2 in range(v):
                    cc = rho[y].at(s2, s)
                    if cc:
                        _vadd(out, {s2: cc}, c)
            out = {s2: c for s2, c in out.items() if c}
            if out:
                repdef[(x, y, u)] = out

    opdef: dict[tuple[int, int], OutVec] = {}
    for u in range(v):
        for w in range(v):
            out: OutVec = {}
            for m, c in tc_cols[u].items():  # [calT u, T w]
                for a, ca in t_cols[w].items():
                    _vadd(out, bracket.value((m, a)), c * ca)
            for m, c in t_cols[u].items():  # [T u, calT w]
                for a, ca in tc_cols[w].items():
                    _vadd(out, bracket.value((m, a)), c * ca)
            for m, c in t_cols[u].items():  # omega(Tu, Tw)
                for a, ca in t_cols[w].items():
                    _vadd(out, d.omega.value((m, a)), c * ca)
            acted: OutVec = {}
            for m, c in tc_cols[u].items():  # rho(calT u) w
                for s in range(v):
                    cc = rho[m].at(s, w)
                    if cc:
                        acted[s] = acted.get(s, _ZERO) + c * cc
            for m, c in t_cols[u].items():  # varrho(Tu) w
                _vadd(acted, d.varrho.value((m, w)), c)
            for s, c in acted.items():  # minus T(...)
                _vadd(out, t_cols[s], -c)
            ind: OutVec = {}
            for m, c in t_cols[u].items():  # rho(Tu) w
                for s in range(v):
                    cc = rho[m].at(s, w)
                    if cc:
                        ind[s] = ind.get(s, _ZERO) + c * cc
            for s, c in ind.items():  # minus calT(...)
                _vadd(out, tc_cols[s], -c)
            out = {s: c for s, c in out.items() if c}
            if out:
                opdef[(u, w)] = out
    return jac, repdef, opdef


def is_deformation(triple: LieLeibnizTriple, d: DeformationDatum) -> bool:
    """Whether the datum extends the triple to first order.

    Computes the flattened image under the degree-2 coboundary of the full
    complex and, independently, the three obstruction displays; asserts the
    two routes agree entrywise before answering.
    """
    report = triple.validate()
    if not report.ok:
        w = report.witnesses[0]
        raise InvalidInputData(f"triple fails {w.identity} at {w.at}")
    vec = d.to_cochain(triple)
    image = coboundary_reg(triple, 2).matrix.apply(vec)
    jac, repdef, opdef = _deformation_residuals(triple, d)
    _assert_residuals_match(triple, image, jac, repdef, opdef)
    return not any(image)


def _assert_residuals_match(
    triple: LieLeibnizTriple,
    image: Sequence[Rational],
    jac: dict,
    repdef: dict,
    opdef: dict,
) -> None:
    g, v = triple.pair.dim_g, triple.pair.dim_v
    w3 = wedge_tuples(g, 3)
    rank3 = {t: i for i, t in enumerate(w3)}
    n1 = len(w3) * g
    for key, out in jac.items():
        for s in range(g):
            assert image[rank3[key] * g + s] == out.get(s, _ZERO), (
                "bracket-defect display disagrees with the matrix route"
            )
    covered = {rank3[key] * g + s for key in jac for s in range(g)}
    for i in range(n1):
        if i not in covered:
            assert image[i] == _ZERO

    w2 = wedge_tuples(g, 2)
    rank2 = {t: i for i, t in enumerate(w2)}
    n2 = len(w2) * v * v
    for i in range(len(w2)):
        for u in range(v):
            for s in range(v):
                idx = n1 + (i * v + u) * v + s
                res = repdef.get(w2[i] + (u,), {}).get(s, _ZERO)
                assert image[idx] == -res, (
                    "representation-defect display disagrees with the matrix route"
                )

    for u in range(v):
        for w_ in range(v):
            for s in range(g):
                idx = n1 + n2 + (u * v + w_) * g + s
                res = opdef.get((u, w_), {}).get(s, _ZERO)
                assert image[idx] == res, (
                    "operator-defect display disagrees with the matrix route"
                )


@dataclass(frozen=True)
class DeformationEquivalence:
    """First-order change of coordinates carrying one deformation to another:
    an algebra self-map, a module self-map, and an inner direction."""

    n_map: Matrix  # g x g
    s_map: Matrix  # v x v
    x_vec: tuple[Rational, ...]  # length g


def deformations_equivalent(
    triple: LieLeibnizTriple, d1: DeformationDatum, d2: DeformationDatum
) -> DeformationEquivalence | None:
    """Solve for a first-order equivalence carrying ``d2`` to ``d1``.

    The difference of two equivalent data is a degree-1 coboundary of the
    full complex, so this is one exact linear solve in the algebra self-map,
    the module self-map, and the inner direction.  Returns the witness, or
    None when no solution exists — the data then lie in different degree-2
    classes of the full complex.  (A witness is a first-order change of
    coordinates; whether every coboundary difference also integrates to a
    genuine equivalence of deformations is not claimed here.)
    """
    if not is_deformation(triple, d1):
        raise NotACocycle("first datum is not a deformation")
    if not is_deformation(triple, d2):
        raise NotACocycle("second datum is not a deformation")
    g, v = triple.pair.dim_g, triple.pair.dim_v
    rhs = [
        b - a for a, b in zip(d1.to_cochain(triple), d2.to_cochain(triple))
    ]
    mat = coboundary_reg(triple, 1).matrix
    sol = solve(mat, rhs)
    if sol is None:
        return None
    assert list(mat.apply(sol)) == rhs
    n_mat = Matrix.from_rows(
        [[sol[a * g + s] for a in range(g)] for s in range(g)]
    )
    s_mat = Matrix.from_rows(
        [[sol[g * g + u * v + s] for u in range(v)] for s in range(v)]
    )
    x_vec = tuple(sol[g * g + v * v :])
    witness = DeformationEquivalence(n_mat, s_mat, x_vec)
    _assert_equivalence_displays(triple, d1, d2, witness)
    return witness


def _assert_equivalence_displays(
    triple: LieLeibnizTriple,
    d1: DeformationDatum,
    d2: DeformationDatum,
    w: DeformationEquivalence,
) -> None:
    """Check the three first-order morphism displays directly: the differences
    of the data must match what the self-maps and the inner direction induce."""
    pair = triple.pair
    g, v = pair.dim_g, pair.dim_v
    bracket = pair.algebra.bracket
    rho = pair.rep.matrices
    ad = pair.algebra.ad()
    t = triple.tensor.matrix
    x_sparse = {i: c for i, c in enumerate(w.x_vec) if c}
    # total algebra self-map N + ad_x and module self-map S + rho(x)
    n_full = w.n_map + sum(
        (ad[i].scale(c) for i, c in x_sparse.items()), Matrix.zero(g, g)
    )
    s_full = w.s_map + sum(
        (rho[i].scale(c) for i, c in x_sparse.items()), Matrix.zero(v, v)
    )
    n_cols = _mat_cols(n_full)
    for key in wedge_tuples(g, 2):
        x, y = key
        want: OutVec = {}
        for m, c in n_cols[x].items():
            _vadd(want, bracket.value((m, y)), c)
        for m, c in n_cols[y].items():
            _vadd(want, bracket.value((x, m)), c)
        for m, c in bracket.value((x, y)).items():
            _vadd(want, n_cols[m], -c)
        got: OutVec = dict(d2.omega.value(key))
        _vadd(got, d1.omega.value(key), rat(-1))
        assert {k: c for k, c in want.items() if c} == {
            k: c for k, c in got.items() if c
        }
    for x in range(g):
        for u in range(v):
            lhs = {
                s: d2.varrho.entry((x, u), s) - d1.varrho.entry((x, u), s)
                for s in range(v)
            }
            rhs_m = (
                _col_action(rho, n_cols[x], v)
                + rho[x] @ s_full
                - s_full @ rho[x]
            )
            assert all(lhs[s] == rhs_m.at(s, u) for s in range(v))
    want_m = t @ s_full - n_full @ t
    assert d2.cal_t - d1.cal_t == want_m


def _col_action(mats: Sequence[Matrix], col: OutVec, dim: int) -> Matrix:
    out = Matrix.zero(dim, dim)
    for i, c in col.items():
        out = out + mats[i].scale(c)
    return out


# --------------------------------------------------------------------------
# central extensions


@dataclass(frozen=True)
class ExtensionCocycle:
    """Degree-2 data with trivial two-term coefficients: a bracket two-form
    into the adjoined algebra level, a mixed two-form into the adjoined module
    level, and an operator shift into the adjoined algebra level."""

    omega: MultilinearMap  # alternating (g, g) -> h
    varpi: MultilinearMap  # (g, v) -> w
    cal_t: Matrix  # h x v

    @staticmethod
    def zero(triple: LieLeibnizTriple, t_small: Matrix) -> "ExtensionCocycle":
        g, v = triple.pair.dim_g, triple.pair.dim_v
        h, w = t_small.rows, t_small.cols
        return ExtensionCocycle(
            MultilinearMap((g, g), h, {}, 2),
            MultilinearMap((g, v), w, {}, 1),
            Matrix.zero(h, v),
        )

    def dims(self) -> tuple[int, int]:
        return self.omega.dim_out, self.varpi.dim_out

    def check_shapes(self, triple: LieLeibnizTriple, t_small: Matrix) -> None:
        g, v = triple.pair.dim_g, triple.pair.dim_v
        h, w = t_small.rows, t_small.cols
        if self.omega.dims_in != (g, g) or self.omega.dim_out != h:
            raise DimensionMismatch("bracket two-form has wrong shape")
        if self.varpi.dims_in != (g, v) or self.varpi.dim_out != w:
            raise DimensionMismatch("mixed two-form has wrong shape")
        if self.cal_t.rows != h or self.cal_t.cols != v:
            raise DimensionMismatch("operator shift has wrong shape")

    def to_cochain(
        self, triple: LieLeibnizTriple, t_small: Matrix
    ) -> tuple[Rational, ...]:
        self.check_shapes(triple, t_small)
        g, v = triple.pair.dim_g, triple.pair.dim_v
        h, w = t_small.rows, t_small.cols
        return tuple(
            _flatten_two_form(self.omega, g, h)
            + _flatten_mixed(self.varpi, g, v, w)
            + _flatten_map_matrix(self.cal_t)
        )

    @staticmethod
    def from_cochain(
        triple: LieLeibnizTriple, t_small: Matrix, vec: Sequence[Rational]
    ) -> "ExtensionCocycle":
        g, v = triple.pair.dim_g, triple.pair.dim_v
        h, w = t_small.rows, t_small.cols
        n1 = len(wedge_tuples(g, 2)) * h
        n2 = g * v * w
        if len(vec) != n1 + n2 + v * h:
            raise DimensionMismatch("cochain has wrong length")
        return ExtensionCocycle(
            _unflatten_two_form(vec[:n1], g, h),
            _unflatten_mixed(vec[n1 : n1 + n2], g, v, w),
            _unflatten_map_matrix(vec[n1 + n2 :], h, v),
        )


@dataclass(frozen=True)
class Section:
    """Right inverses of the two projections of a central extension."""

    s_alg: Matrix  # ghat x g
    s_mod: Matrix  # vhat x v


@dataclass(frozen=True)
class CentralExtension:
    """A triple on enlarged spaces together with the exact-sequence maps that
    present it as an extension of ``base`` by an abelian pair with two-term
    map ``t_small``."""

    base: LieLeibnizTriple
    total: LieLeibnizTriple
    incl_alg: Matrix  # ghat x h
    proj_alg: Matrix  # g x ghat
    incl_mod: Matrix  # vhat x w
    proj_mod: Matrix  # v x vhat
    t_small: Matrix  # h x w

    def validate(self) -> ValidationReport:
        """Exactness of both rows and the homomorphism properties of the
        projection pair and the inclusion pair."""
        ws: list[Witness] = []
        g = self.base.pair.dim_g
        v = self.base.pair.dim_v
        h, w = self.t_small.rows, self.t_small.cols
        ghat = self.total.pair.dim_g
        vhat = self.total.pair.dim_v
        if ghat != g + h or vhat != v + w:
            raise DimensionMismatch("total dimensions must split")
        if (self.proj_alg @ self.incl_alg).is_zero() is False or rank(
            self.incl_alg
        ) != h or rank(self.proj_alg) != g:
            ws.append(Witness("algebra-row-exactness", (), {}, {}))
        if (self.proj_mod @ self.incl_mod).is_zero() is False or rank(
            self.incl_mod
        ) != w or rank(self.proj_mod) != v:
            ws.append(Witness("module-row-exactness", (), {}, {}))
        proj = TripleHomomorphism(self.proj_alg, self.proj_mod)
        report = proj.validate_between(self.total, self.base)
        ws.extend(report.witnesses)
        lhs = self.total.tensor.matrix @ self.incl_mod
        rhs = self.incl_alg @ self.t_small
        if lhs != rhs:
            ws.append(
                Witness(
                    "inclusion-intertwine",
                    (),
                    {i: c for i, c in enumerate(lhs.entries) if c},
                    {i: c for i, c in enumerate(rhs.entries) if c},
                )
            )
        return ValidationReport.from_witnesses(ws)

    def check_central(self) -> None:
        """Adjoined algebra directions bracket to zero with everything, kill
        the whole module, and nothing acts on the adjoined module level."""
        bracket = self.total.pair.algebra.bracket
        rho = self.total.pair.rep.matrices
        ghat = self.total.pair.dim_g
        incl_cols = _mat_cols(self.incl_alg)
        for a_col in incl_cols:
            for x in range(ghat):
                out: OutVec = {}
                for m, c in a_col.items():
                    _vadd(out, bracket.value((m, x)), c)
                if any(out.values()):
                    raise NotCentral(
                        "adjoined algebra direction has a nonzero bracket"
                    )
                acted = _col_action(rho, a_col, self.total.pair.dim_v)
                if not acted.is_zero():
                    raise NotCentral("adjoined algebra direction acts nontrivially")
        for x in range(ghat):
            if not (rho[x] @ self.incl_mod).is_zero():
                raise NotCentral("adjoined module level is acted on nontrivially")


def build_central_extension(
    triple: LieLeibnizTriple, t_small: Matrix, c: ExtensionCocycle
) -> CentralExtension:
    """Assemble the extension triple a cocycle encodes: block bracket with the
    two-form in the adjoined level, block action, block operator."""
    c.check_shapes(triple, t_small)
    rep = trivial_representation(triple, t_small)
    vec = c.to_cochain(triple, t_small)
    image = coboundary_coeff(triple, rep, 2).matrix.apply(vec)
    if any(image):
        raise NotACocycle(
            "datum is not closed for the trivial two-term coefficients"
        )
    pair = triple.pair
    g, v = pair.dim_g, pair.dim_v
    h, w = t_small.rows, t_small.cols
    ghat, vhat = g + h, v + w
    bracket = pair.algebra.bracket
    table: dict[tuple[int, ...], OutVec] = {}
    for key in wedge_tuples(g, 2):
        out: OutVec = dict(bracket.value(key))
        for s, cc in c.omega.value(key).items():
            out[g + s] = cc
        if out:
            table[key] = out
    big_alg = LieAlgebra(ghat, MultilinearMap((ghat, ghat), ghat, table, 2))
    mats = []
    for x in range(g):
        rows = [[_ZERO] * vhat for _ in range(vhat)]
        for s in range(v):
            for u in range(v):
                rows[s][u] = pair.rep.matrices[x].at(s, u)
        for u in range(v):
            for s, cc in c.varpi.value((x, u)).items():
                rows[v + s][u] = cc
        mats.append(Matrix.from_rows(rows))
    for _ in range(h):
        mats.append(Matrix.zero(vhat, vhat))
    t_rows = [[_ZERO] * vhat for _ in range(ghat)]
    for i in range(g):
        for j in range(v):
            t_rows[i][j] = triple.tensor.matrix.at(i, j)
    for i in range(h):
        for j in range(v):
            t_rows[g + i][j] = c.cal_t.at(i, j)
        for j in range(w):
            t_rows[g + i][v + j] = t_small.at(i, j)
    total = LieLeibnizTriple(
        LieRepPair(big_alg, Representation(tuple(mats))),
        EmbeddingTensor(Matrix.from_rows(t_rows)),
    )
    report = total.validate()
    assert report.ok, "closed datum must yield a valid extension triple"
    incl_alg = vstack([Matrix.zero(g, h), Matrix.identity(h)])
    proj_alg = hstack([Matrix.identity(g), Matrix.zero(g, h)])
    incl_mod = vstack([Matrix.zero(v, w), Matrix.identity(w)])
    proj_mod = hstack([Matrix.identity(v), Matrix.zero(v, w)])
    ext = CentralExtension(
        triple, total, incl_alg, proj_alg, incl_mod, proj_mod, t_small
    )
    ext.check_central()
    assert ext.validate().ok
    return ext


def canonical_section(ext: CentralExtension) -> Section:
    """The block inclusion; a section for extensions built here."""
    g = ext.base.pair.dim_g
    v = ext.base.pair.dim_v
    h, w = ext.t_small.rows, ext.t_small.cols
    return Section(
        vstack([Matrix.identity(g), Matrix.zero(h, g)]),
        vstack([Matrix.identity(v), Matrix.zero(w, v)]),
    )


def _kernel_coords(incl: Matrix, val: list[Rational]) -> tuple[Rational, ...]:
    coords = solve(incl, val)
    if coords is None:
        raise InvalidInputData(
            "value does not lie in the adjoined level; the extension data are inconsistent"
        )
    return coords


def extract_cocycle(ext: CentralExtension, section: Section) -> ExtensionCocycle:
    """The cocycle a section carves out of a central extension: the failure of
    the section to preserve the bracket, the action, and the operator."""
    report = ext.validate()
    if not report.ok:
        w0 = report.witnesses[0]
        raise InvalidInputData(f"extension fails {w0.identity}")
    ext.check_central()
    g = ext.base.pair.dim_g
    v = ext.base.pair.dim_v
    h, w = ext.t_small.rows, ext.t_small.cols
    if (ext.proj_alg @ section.s_alg) != Matrix.identity(g):
        raise NotASection("algebra map is not a right inverse of the projection")
    if (ext.proj_mod @ section.s_mod) != Matrix.identity(v):
        raise NotASection("module map is not a right inverse of the projection")
    bracket = ext.total.pair.algebra.bracket
    rho = ext.total.pair.rep.matrices
    s_alg_cols = _mat_cols(section.s_alg)
    ghat = ext.total.pair.dim_g
    vhat = ext.total.pair.dim_v

    omega_table: dict[tuple[int, ...], OutVec] = {}
    for key in wedge_tuples(g, 2):
        x, y = key
        val: OutVec = {}
        for m, cm in s_alg_cols[x].items():
            for n_, cn in s_alg_cols[y].items():
                _vadd(val, bracket.value((m, n_)), cm * cn)
        for m, cm in ext.base.pair.algebra.bracket.value((x, y)).items():
            _vadd(val, s_alg_cols[m], -cm)
        dense = [val.get(i, _ZERO) for i in range(ghat)]
        coords = _kernel_coords(ext.incl_alg, dense)
        out = {s: c for s, c in enumerate(coords) if c}
        if out:
            omega_table[key] = out

    varpi_table: dict[tuple[int, ...], OutVec] = {}
    for x in range(g):
        acting = _col_action(rho, s_alg_cols[x], vhat)
        for u in range(v):
            val_m = acting @ section.s_mod
            dense = [val_m.at(i, u) for i in range(vhat)]
            base_acted = [
                ext.base.pair.rep.matrices[x].at(s, u) for s in range(v)
            ]
            lifted = section.s_mod.apply(base_acted)
            dense = [a - b for a, b in zip(dense, lifted)]
            coords = _kernel_coords(ext.incl_mod, dense)
            out = {s: c for s, c in enumerate(coords) if c}
            if out:
                varpi_table[(x, u)] = out

    cal_rows = [[_ZERO] * v for _ in range(h)]
    t_hat = ext.total.tensor.matrix
    t_base = ext.base.tensor.matrix
    for u in range(v):
        lifted = section.s_mod.col(u)
        val = list(t_hat.apply(lifted))
        base_t = [t_base.at(s, u) for s in range(g)]
        lifted_t = section.s_alg.apply(base_t)
        dense = [a - b for a, b in zip(val, lifted_t)]
        coords = _kernel_coords(ext.incl_alg, dense)
        for s, c in enumerate(coords):
            cal_rows[s][u] = c
    cal_t = Matrix.from_rows(cal_rows) if h and v else Matrix.zero(h, v)
    return ExtensionCocycle(
        MultilinearMap((g, g), h, omega_table, 2),
        MultilinearMap((g, v), w, varpi_table, 1),
        cal_t,
    )


def extension_isomorphism(
    triple: LieLeibnizTriple,
    t_small: Matrix,
    c_from: ExtensionCocycle,
    c_to: ExtensionCocycle,
) -> TripleHomomorphism | None:
    """A block-unitriangular isomorphism between the extensions the two
    cocycles build, found by solving for a degree-1 coboundary with vanishing
    operator leg that carries one cocycle to the other.  Returns the map from
    the ``c_from`` extension to the ``c_to`` extension, or None."""
    rep = trivial_representation(triple, t_small)
    g, v = triple.pair.dim_g, triple.pair.dim_v
    h, w = t_small.rows, t_small.cols
    d1_mat = coboundary_coeff(triple, rep, 1).matrix
    keep = g * h + v * w  # drop the operator-leg columns
    restricted = Matrix(
        d1_mat.rows,
        keep,
        tuple(
            d1_mat.at(i, j) for i in range(d1_mat.rows) for j in range(keep)
        ),
    )
    rhs = [
        a - b
        for a, b in zip(
            c_from.to_cochain(triple, t_small), c_to.to_cochain(triple, t_small)
        )
    ]
    if keep == 0:
        sol: tuple[Rational, ...] | None = () if not any(rhs) else None
    else:
        sol = solve(restricted, rhs)
    if sol is None:
        return None
    n_mat = Matrix.from_rows(
        [[sol[a * h + s] for a in range(g)] for s in range(h)]
    ) if h and g else Matrix.zero(h, g)
    s_mat = Matrix.from_rows(
        [[sol[g * h + u * w + s] for u in range(v)] for s in range(w)]
    ) if w and v else Matrix.zero(w, v)
    kappa = vstack(
        [
            hstack([Matrix.identity(g), Matrix.zero(g, h)]),
            hstack([n_mat, Matrix.identity(h)]),
        ]
    )
    lam = vstack(
        [
            hstack([Matrix.identity(v), Matrix.zero(v, w)]),
            hstack([s_mat, Matrix.identity(w)]),
        ]
    )
    return TripleHomomorphism(kappa, lam)
