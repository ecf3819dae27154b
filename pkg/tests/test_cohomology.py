import random

import pytest

from helpers import (
    affine2_algebra,
    pair_pool,
    random_equivariant_triple,
    random_triples,
)
from leibten.cohomology import (
    CohomologyReport,
    ComplexKind,
    TwoTermRep,
    adjoint_representation,
    coboundary_coeff,
    coboundary_et,
    coboundary_et_apply,
    coboundary_pair,
    coboundary_reg,
    cochain_dim,
    coeff_embedding_matrix,
    cohomology,
    et_dim,
    join_reg_cochain,
    leibniz_regular_coboundary,
    les_check,
    omega_t,
    pair_dim,
    phi_chain_matrix,
    reg_dim,
    semidirect,
    split_reg_cochain,
    trivial_representation,
)
from leibten.errors import (
    ComplexNotComposable,
    InvalidInputData,
    InvalidRepresentation,
    SizeLimit,
)
from leibten.exactlin import Matrix, rank, rat
from leibten.structures import (
    EmbeddingTensor,
    LieLeibnizTriple,
    adjoint_pair,
    heisenberg_algebra,
    heisenberg_family,
    induced_leibniz,
    so8_56,
)
from leibten.tensorbasis import SpaceLabel


def identity_triple():
    pair = adjoint_pair(heisenberg_algebra())
    return LieLeibnizTriple(pair, EmbeddingTensor(Matrix.identity(3)))


def affine_identity_triple():
    pair = adjoint_pair(affine2_algebra())
    return LieLeibnizTriple(pair, EmbeddingTensor(Matrix.identity(2)))


# --- operator complex ---------------------------------------------------------


def test_et_degree1_formula():
    # d x (u) = -[x, T u] + T(rho(x) u), checked entrywise on a family member
    tri = heisenberg_family([[1, 1, 0], [1, 1, 0], [0, 0, 0]])
    pair = tri.pair
    d1 = coboundary_et(tri, 1).matrix
    t = tri.tensor.matrix
    for r in range(3):  # source basis vector e_r of the algebra
        for u in range(3):
            for s in range(3):
                tu = {m: t.at(m, u) for m in range(3)}
                lhs = rat(0)
                for m, c in tu.items():
                    lhs -= c * pair.algebra.bracket.entry((r, m), s)
                acted = {m: pair.rep.matrices[r].at(m, u) for m in range(3)}
                for m, c in acted.items():
                    lhs += c * t.at(s, m)
                assert d1.at(u * 3 + s, r) == lhs


def test_et_identity_tensor_is_equivariant():
    # with T = id on the adjoint module the degree-1 coboundary vanishes
    d1 = coboundary_et(identity_triple(), 1).matrix
    assert d1.is_zero()


def test_et_square_zero():
    for tri in [identity_triple(), heisenberg_family([[1, 0, 0], [0, 1, 0], [5, 7, 1]])]:
        for n in (1, 2):
            a = coboundary_et(tri, n).matrix
            b = coboundary_et(tri, n + 1).matrix
            assert (b @ a).is_zero()


def test_et_degree_errors():
    with pytest.raises(InvalidInputData):
        coboundary_et(identity_triple(), 0)
    with pytest.raises(SizeLimit):
        coboundary_et(identity_triple(), 5)


def test_et_apply_matches_matrix():
    tri = heisenberg_family([[1, 0, 0], [0, 1, 0], [5, 7, 1]])
    rng = random.Random(7)
    for n in (1, 2):
        mat = coboundary_et(tri, n).matrix
        vec = [rat(rng.randint(-4, 4)) for _ in range(mat.cols)]
        assert list(coboundary_et_apply(tri, vec, n)) == list(mat.apply(vec))


# --- pair complex -------------------------------------------------------------


def test_pair_degree1_identity_cochain():
    # f = (id, 0): (df)_alg(x, y) = [x, y] and (df)_mod(x, v) = rho(x) v
    tri = identity_triple()
    h = tri.pair.algebra
    dm = coboundary_pair(tri, 1).matrix
    vec = [rat(1) if x == s else rat(0) for x in range(3) for s in range(3)]
    vec += [rat(0)] * 9
    got = dm.apply(vec)
    from leibten.cohomology import _pair_blocks

    b1, b2 = _pair_blocks(3, 3, 2, 3, 3)
    for (x, y) in b1.tuples:
        for s in range(3):
            assert got[b1.index((x, y), s)] == h.bracket.entry((x, y), s)
    for (x, u) in b2.tuples:
        for s in range(3):
            assert got[b1.dim + b2.index((x, u), s)] == tri.pair.rep.matrices[x].at(s, u)


def test_pair_square_zero():
    for pair in pair_pool():
        for n in (1, 2):
            a = coboundary_pair(pair, n).matrix
            b = coboundary_pair(pair, n + 1).matrix
            assert (b @ a).is_zero()


def test_pair_accepts_triple_or_pair():
    tri = identity_triple()
    assert coboundary_pair(tri, 1).matrix == coboundary_pair(tri.pair, 1).matrix


# --- connecting block and the full complex ------------------------------------


def test_omega_degree1_formula():
    # degree 1: (connecting f)(v) = -(f_alg(T v) - T f_mod(v))
    tri = heisenberg_family([[1, 1, 0], [1, 1, 0], [0, 0, 0]])
    t = tri.tensor.matrix
    om = omega_t(tri, 1)
    # columns: block1 is Hom(alg, alg) then block2 is Hom(mod, mod)
    for u in range(3):
        for s in range(3):
            row = u * 3 + s
            for a in range(3):  # block1 column key (a,), output r
                for r in range(3):
                    want = -t.at(a, u) if s == r else rat(0)
                    assert om.at(row, a * 3 + r) == want
            for b in range(3):  # block2 column key (b,), output r
                for r in range(3):
                    want = t.at(s, r) if b == u else rat(0)
                    assert om.at(row, 9 + b * 3 + r) == want


def test_omega_anticommutes():
    for tri in [identity_triple(), heisenberg_family([[1, 0, 0], [0, 1, 0], [1, -2, 1]])]:
        for n in (1, 2):
            lhs = omega_t(tri, n + 1) @ coboundary_pair(tri, n).matrix
            rhs = coboundary_et(tri, n + 1).matrix @ omega_t(tri, n)
            assert (lhs + rhs).is_zero()


def test_reg_square_zero_random_triples():
    for tri in random_triples(20):
        for n in (1, 2, 3):
            a = coboundary_reg(tri, n).matrix
            b = coboundary_reg(tri, n + 1).matrix
            assert (b @ a).is_zero()


def test_reg_block_structure():
    tri = identity_triple()
    n = 1
    reg = coboundary_reg(tri, n).matrix
    pd_n, pd_n1 = pair_dim(tri.pair, n), pair_dim(tri.pair, n + 1)
    ed_n = et_dim(tri, n)
    delta = coboundary_pair(tri, n).matrix
    for i in range(pd_n1):
        for j in range(pd_n):
            assert reg.at(i, j) == delta.at(i, j)
        for j in range(ed_n):  # upper-right block vanishes
            assert reg.at(i, pd_n + j) == rat(0)


def test_split_join_roundtrip():
    tri = identity_triple()
    rng = random.Random(3)
    n = 2
    vec = tuple(rat(rng.randint(-3, 3)) for _ in range(reg_dim(tri, n)))
    f_g, f_v, theta = split_reg_cochain(tri, vec, n)
    assert join_reg_cochain(tri, f_g, f_v, theta, n) == vec


# --- push-down into the induced bracket's own complex --------------------------


def test_phi_chain_square():
    for tri in [identity_triple(), heisenberg_family([[1, 0, 0], [0, 1, 0], [5, 7, 1]])]:
        ind = induced_leibniz(tri)
        for n in (1, 2):
            lhs = phi_chain_matrix(tri, n + 1) @ coboundary_et(tri, n).matrix
            rhs = leibniz_regular_coboundary(ind, n) @ phi_chain_matrix(tri, n)
            assert lhs == rhs


def test_leibniz_regular_square_zero():
    ind = induced_leibniz(heisenberg_family([[1, 1, 0], [1, 1, 0], [0, 0, 0]]))
    for k in (0, 1, 2):
        a = leibniz_regular_coboundary(ind, k)
        b = leibniz_regular_coboundary(ind, k + 1)
        assert (b @ a).is_zero()


# --- coefficients in a two-term representation ---------------------------------


def test_adjoint_rep_reproduces_full_complex():
    for tri in [identity_triple(), affine_identity_triple()]:
        rep = adjoint_representation(tri)
        assert rep.validate_against(tri).ok
        for n in (1, 2):
            assert coboundary_coeff(tri, rep, n).matrix == coboundary_reg(tri, n).matrix


def test_trivial_rep_square_zero():
    tri = identity_triple()
    rep = trivial_representation(tri, Matrix.from_rows([[1], [0]]))
    assert rep.validate_against(tri).ok
    for n in (1, 2):
        a = coboundary_coeff(tri, rep, n).matrix
        b = coboundary_coeff(tri, rep, n + 1).matrix
        assert (b @ a).is_zero()


def test_invalid_representation_rejected():
    tri = identity_triple()
    rep = adjoint_representation(tri)
    bad = TwoTermRep(
        rep.h,
        rep.w,
        rep.t_mat,
        tuple(m.scale(2) for m in rep.phi_h),
        rep.phi_w,
        rep.varphi,
    )
    assert not bad.validate_against(tri).ok
    with pytest.raises(InvalidRepresentation):
        coboundary_coeff(tri, bad, 1)


def test_two_term_rep_shape_errors():
    from leibten.errors import DimensionMismatch

    with pytest.raises(DimensionMismatch):
        TwoTermRep(
            SpaceLabel("h", 2),
            SpaceLabel("w", 1),
            Matrix.zero(1, 2),  # wrong orientation
            (),
            (),
            (),
        )


def test_subcomplex_embedding_intertwines():
    tri = identity_triple()
    for rep in (
        trivial_representation(tri, Matrix.from_rows([[1], [0]])),
        adjoint_representation(tri),
    ):
        big = semidirect(tri, rep)
        assert big.validate().ok
        for n in (1, 2):
            lhs = coeff_embedding_matrix(tri, rep, n + 1) @ coboundary_coeff(tri, rep, n).matrix
            rhs = coboundary_reg(big, n).matrix @ coeff_embedding_matrix(tri, rep, n)
            assert lhs == rhs


def test_semidirect_trivial_rep_block_diagonal():
    tri = identity_triple()
    rep = trivial_representation(tri, Matrix.from_rows([[2], [0]]))
    big = semidirect(tri, rep)
    t = big.tensor.matrix
    assert t.at(3, 3) == rat(2)  # adjoined block
    for i in range(3):
        for j in range(3):
            assert t.at(i, j) == tri.tensor.matrix.at(i, j)
    # adjoined algebra directions are central for the trivial representation
    for b in (3, 4):
        for x in range(3):
            assert not big.pair.algebra.bracket.value((x, b))


# --- cohomology reports ---------------------------------------------------------


def test_h1_identity_tensor():
    rep = cohomology(identity_triple(), ComplexKind.ET, 1)
    assert rep.betti == 3
    assert rep.dim_kernel == 3 and rep.dim_image_in == 0
    assert len(rep.representatives) == 3


def test_degree_zero_is_zero():
    rep = cohomology(identity_triple(), ComplexKind.REG, 0)
    assert rep.dim_cochain == 0 and rep.betti == 0 and rep.representatives == ()


def test_report_json_shape():
    rep = cohomology(identity_triple(), ComplexKind.ET, 1)
    d = rep.to_json_dict()
    assert set(d) == {
        "kind",
        "degree",
        "dim_cochain",
        "dim_kernel",
        "dim_image",
        "betti",
        "representatives",
    }
    assert d["kind"] == "et"
    assert all(isinstance(c, str) for vec in d["representatives"] for c in vec)


def test_representatives_are_cocycles_and_independent_mod_image():
    tri = heisenberg_family([[1, 0, 0], [0, 1, 0], [5, 7, 1]])
    for kind in (ComplexKind.ET, ComplexKind.PAIR, ComplexKind.REG):
        rep = cohomology(tri, kind, 2)
        if not rep.representatives:
            continue
        d_out = (
            coboundary_et(tri, 2).matrix
            if kind is ComplexKind.ET
            else coboundary_pair(tri, 2).matrix
            if kind is ComplexKind.PAIR
            else coboundary_reg(tri, 2).matrix
        )
        for vec in rep.representatives:
            assert not any(d_out.apply(vec))
        assert rank(Matrix.from_rows([list(v) for v in rep.representatives])) == rep.betti


def test_not_composable_propagates():
    # skip validation on a map that is not a tensor: the slices no longer square to zero
    bad = heisenberg_family([[1, 0, 0], [0, 2, 0], [0, 0, 0]], check=False)
    assert not bad.validate().ok
    with pytest.raises(ComplexNotComposable):
        cohomology(bad, ComplexKind.REG, 2, check=False)


def test_cochain_dim_bookkeeping():
    tri = identity_triple()
    for n in range(4):
        assert cochain_dim(tri, ComplexKind.REG, n) == (
            pair_dim(tri.pair, n) + et_dim(tri, n)
        )
    assert cochain_dim(tri, ComplexKind.ET, 0) == 0
    assert cochain_dim(tri, ComplexKind.ET, 1) == 3
    assert cochain_dim(tri, ComplexKind.ET, 3) == 9 * 3


# --- long exact sequence ---------------------------------------------------------


def test_les_zero_tensor():
    pair = adjoint_pair(heisenberg_algebra())
    tri = LieLeibnizTriple(pair, EmbeddingTensor(Matrix.zero(3, 3)))
    report = les_check(tri, 2)
    assert report.ok


def test_les_identity_tensor_degree2():
    report = les_check(identity_triple(), 2)
    assert report.ok
    assert {node.at for node in report.nodes} == {"operator", "full", "pair"}
    d = report.to_json_dict()
    assert d["ok"] is True and len(d["nodes"]) == 6


def test_les_random_small_triple_degree3():
    rng = random.Random(0xA11CE)
    pair = pair_pool()[2]  # abelian algebra, 3-dim module
    tri = random_equivariant_triple(pair, rng)
    report = les_check(tri, 3)
    assert report.ok


def test_les_degree_cap():
    with pytest.raises(SizeLimit):
        les_check(identity_triple(), 4)


# --- size guards -----------------------------------------------------------------


def test_size_limit_large_pair_complex():
    so8 = so8_56()
    with pytest.raises(SizeLimit):
        coboundary_pair(so8, 1)


def test_size_limit_env_override(monkeypatch):
    monkeypatch.setenv("LEIBTEN_MAX_CELLS", "2")
    with pytest.raises(SizeLimit):
        coboundary_et(identity_triple(), 1)


def test_so8_degree1():
    so8 = so8_56()
    d1 = coboundary_et(so8, 1, check=False).matrix
    assert d1.rows == et_dim(so8, 2) and d1.cols == 28
    assert d1.is_zero()  # the spinor tensor is equivariant
    rep = cohomology(so8, ComplexKind.ET, 1, check=False)
    assert rep.betti == 28
    # functional composition: applying the next coboundary to every image column
    rng = random.Random(1)
    vec = [rat(rng.randint(-2, 2)) for _ in range(28)]
    img = d1.apply(vec)
    assert not any(coboundary_et_apply(so8, img, 2))
