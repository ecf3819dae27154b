"""Free graded Lie algebras and transport of homotopy structures.

Numeric expectations were derived by hand from the triangular Lyndon-word
expansions (leading coefficients, the symmetrised products of small words,
and the transported differential on two-letter alphabets) and frozen here.
"""

import itertools

import pytest

from leibten.errors import (
    InvalidInputData,
    NotAHomomorphism,
    NotSquareZero,
    TruncationOverflow,
)
from leibten.exactlin import rat
from leibten.freelie import (
    basis_descriptor,
    compose_leibniz_morphisms,
    compose_transferred_morphisms,
    cosh_iso,
    cosh_iso_inverse,
    ks_morphism,
    ks_transfer,
    lyndon_basis,
    pbw_psi,
    pbw_psi_inverse,
    sym_sort,
    sym_words,
    transferred_value,
    witt_dimension,
)
from leibten.graded import (
    GradedMap,
    GradedVectorSpace,
    LeibnizInfStructure,
    TruncationBounds,
    bar_coshuffle,
    encode_embedding_tensor,
    encode_leibniz_algebra,
    encode_lie_rep_pair,
    induced_leibniz_inf,
)
from leibten.structures import (
    LeibnizAlgebra,
    heisenberg_family,
    induced_leibniz,
)
from leibten.tensorbasis import koszul_sign, shuffles

A = (-1, 0)
B = (-1, 1)


def leibniz_aa_b():
    return LeibnizAlgebra.from_brackets(2, {(0, 0): {1: 1}})


def leibniz_broken():
    return LeibnizAlgebra.from_brackets(2, {(0, 0): {1: 1}, (1, 0): {0: 1}})


def heisenberg_leibniz():
    space = GradedVectorSpace.of({-1: 3})
    theta2 = GradedMap(
        2, 1, {((-1, 0), (-1, 1)): {2: 1}, ((-1, 1), (-1, 0)): {2: -1}}, 0
    )
    return LeibnizInfStructure(space, {2: theta2})


def combo_diff(left, right):
    out = dict(left)
    for k, c in right.items():
        out[k] = out.get(k, rat(0)) - c
    return {k: c for k, c in out.items() if c}


# --- Lyndon words and dimensions ---------------------------------------------


def test_witt_formula_and_even_dimensions():
    assert [witt_dimension(2, w) for w in (1, 2, 3, 4)] == [2, 1, 2, 3]
    assert [witt_dimension(3, w) for w in (1, 2, 3)] == [3, 3, 8]
    assert witt_dimension(1, 1) == 1 and witt_dimension(1, 2) == 0
    assert lyndon_basis(GradedVectorSpace.of({0: 2}), 4).dimensions() == (2, 1, 2, 3)
    assert lyndon_basis(GradedVectorSpace.of({0: 3}), 3).dimensions() == (3, 3, 8)


def test_two_generator_dimensions_and_parity_of_squares():
    assert lyndon_basis(GradedVectorSpace.of({0: 2}), 3).dimensions() == (2, 1, 2)
    # an even generator has no self-bracket, an odd one does
    assert lyndon_basis(GradedVectorSpace.of({0: 1}), 2).dimensions() == (1, 0)
    assert lyndon_basis(GradedVectorSpace.of({-1: 1}), 2).dimensions() == (1, 1)


def test_standard_bracketing_is_right_normed_on_two_letters():
    basis = lyndon_basis(GradedVectorSpace.of({0: 2}), 3)
    desc = basis_descriptor(basis)
    assert [d["word"] for d in desc] == [[0], [1], [0, 1], [0, 0, 1], [0, 1, 1]]
    assert [d["bracketing"] for d in desc] == [
        0,
        1,
        [0, 1],
        [0, [0, 1]],
        [[0, 1], 1],
    ]
    assert [d["weight"] for d in desc] == [1, 1, 2, 3, 3]


def test_odd_letters_add_squares_with_doubled_leading_term():
    basis = lyndon_basis(GradedVectorSpace.of({-1: 2}), 3)
    assert basis.dimensions() == (2, 3, 2)
    squares = [e for e in basis.elements if e.word in ((0, 0), (1, 1))]
    assert len(squares) == 2
    for e in squares:
        assert e.leading_coeff == 2
        assert e.degree == -2


def test_empty_letter_space_is_rejected():
    with pytest.raises(InvalidInputData):
        lyndon_basis(GradedVectorSpace.of({}), 2)


# --- rewriting and the free bracket -------------------------------------------


def test_rewrite_inverts_expansion():
    for space in (GradedVectorSpace.of({0: 2}), GradedVectorSpace.of({-1: 2})):
        basis = lyndon_basis(space, 3)
        for i, e in enumerate(basis.elements):
            assert basis.rewrite(dict(e.expansion)) == {i: 1}


def test_rewrite_rejects_vectors_outside_the_lie_part():
    basis = lyndon_basis(GradedVectorSpace.of({0: 2}), 3)
    a, b = basis.letters
    with pytest.raises(InvalidInputData):
        basis.rewrite({(a, b): rat(1)})  # ab alone is not a Lie element


def test_free_bracket_antisymmetry_and_jacobi():
    for space in (
        GradedVectorSpace.of({0: 2}),
        GradedVectorSpace.of({-1: 2}),
        GradedVectorSpace.of({-2: 1, -1: 1}),
    ):
        basis = lyndon_basis(space, 3)
        singles = [
            (i, e) for i, e in enumerate(basis.elements) if e.weight == 1
        ]
        for (i, x), (j, y) in itertools.product(singles, repeat=2):
            lhs = basis.bracket({i: rat(1)}, {j: rat(1)})
            rhs = basis.bracket({j: rat(1)}, {i: rat(1)})
            sign = -1 if (x.degree * y.degree) % 2 else 1
            assert lhs == {k: -sign * c for k, c in rhs.items()}
        for (i, x), (j, y), (k, z) in itertools.product(singles, repeat=3):
            left = basis.bracket({i: rat(1)}, basis.bracket({j: rat(1)}, {k: rat(1)}))
            right1 = basis.bracket(
                basis.bracket({i: rat(1)}, {j: rat(1)}), {k: rat(1)}
            )
            eps = -1 if (x.degree * y.degree) % 2 else 1
            right2 = basis.bracket({j: rat(1)}, basis.bracket({i: rat(1)}, {k: rat(1)}))
            want = dict(right1)
            for kk, c in right2.items():
                want[kk] = want.get(kk, rat(0)) + eps * c
            want = {kk: c for kk, c in want.items() if c}
            assert left == want


def test_free_bracket_overflow_past_the_weight_bound():
    basis = lyndon_basis(GradedVectorSpace.of({0: 2}), 3)
    ab = basis.rewrite(
        {
            (basis.letters[0], basis.letters[1]): rat(1),
            (basis.letters[1], basis.letters[0]): rat(-1),
        }
    )
    with pytest.raises(TruncationOverflow):
        basis.bracket(ab, ab)


# --- symmetric words and the two isomorphisms ---------------------------------


def test_sym_sort_signs_and_odd_repeats():
    basis = lyndon_basis(GradedVectorSpace.of({-1: 2}), 2)
    assert sym_sort(basis, (1, 0)) == ((0, 1), -1)  # two odd letters swap
    assert sym_sort(basis, (0, 0))[1] == 0  # repeated odd letter dies
    even = lyndon_basis(GradedVectorSpace.of({0: 2}), 2)
    assert sym_sort(even, (1, 0)) == ((0, 1), 1)
    assert sym_sort(even, (0, 0)) == ((0, 0), 1)


def test_symmetric_word_blocks_are_square():
    for space in (
        GradedVectorSpace.of({0: 2}),
        GradedVectorSpace.of({-1: 2}),
        GradedVectorSpace.of({-1: 3}),
        GradedVectorSpace.of({-2: 1, -1: 1}),
    ):
        basis = lyndon_basis(space, 3)
        g = len(basis.letters)
        for w in (1, 2, 3):
            assert len(sym_words(basis, w)) == g**w


def test_symmetrisation_examples_even_and_odd():
    even = lyndon_basis(GradedVectorSpace.of({0: 2}), 3)
    a, b = even.letters
    assert pbw_psi(even, {(0,): rat(1)}) == {(a,): rat(1)}
    assert pbw_psi(even, {(0, 1): rat(1)}) == {
        (a, b): rat("1/2"),
        (b, a): rat("1/2"),
    }
    odd = lyndon_basis(GradedVectorSpace.of({-1: 2}), 3)
    x, y = odd.letters
    assert pbw_psi(odd, {(0, 1): rat(1)}) == {
        (x, y): rat("1/2"),
        (y, x): rat("-1/2"),
    }


def test_symmetrisation_round_trips_on_all_words():
    for space in (GradedVectorSpace.of({0: 2}), GradedVectorSpace.of({-1: 2})):
        basis = lyndon_basis(space, 3)
        for w in (1, 2, 3):
            for ids in sym_words(basis, w):
                assert pbw_psi_inverse(basis, pbw_psi(basis, {ids: rat(1)})) == {
                    ids: rat(1)
                }
            for word in itertools.product(basis.letters, repeat=w):
                back = pbw_psi(basis, pbw_psi_inverse(basis, {word: rat(1)}))
                assert back == {word: rat(1)}


def test_ordered_monomial_rewriting_realises_the_bracket_relation():
    basis = lyndon_basis(GradedVectorSpace.of({0: 2}), 3)
    a, b = basis.letters
    assert cosh_iso(basis, {(a,): rat(1)}) == {(0,): rat(1)}
    assert cosh_iso(basis, {(a, b): rat(1)}) == {(0, 1): rat(1)}
    assert cosh_iso(basis, {(b, a): rat(1)}) == {(0, 1): rat(1), (2,): rat(-1)}
    # the product relation: a*b - b*a = [a,b]
    diff = combo_diff(
        cosh_iso(basis, {(a, b): rat(1)}), cosh_iso(basis, {(b, a): rat(1)})
    )
    assert diff == {(2,): rat(1)}
    assert cosh_iso_inverse(basis, {(0, 1): rat(1)}) == {(a, b): rat(1)}
    for w in (1, 2, 3):
        for word in itertools.product(basis.letters, repeat=w):
            back = cosh_iso_inverse(basis, cosh_iso(basis, {word: rat(1)}))
            assert back == {word: rat(1)}


def _coshuffle_of_combo(combo):
    out = {}
    for w, c in combo.items():
        for key, c2 in bar_coshuffle(w).items():
            out[key] = out.get(key, rat(0)) + c * c2
    return {k: c for k, c in out.items() if c}


def _tensor_pair(left, right, scale):
    out = {}
    for wl, cl in left.items():
        for wr, cr in right.items():
            out[(wl, wr)] = out.get((wl, wr), rat(0)) + scale * cl * cr
    return out


def test_basis_expansions_are_primitive():
    for space in (
        GradedVectorSpace.of({0: 2}),
        GradedVectorSpace.of({-1: 2}),
        GradedVectorSpace.of({-2: 1, -1: 1}),
    ):
        basis = lyndon_basis(space, 3)
        for e in basis.elements:
            assert _coshuffle_of_combo(dict(e.expansion)) == {}


def test_symmetrisation_is_a_coalgebra_map():
    for space in (GradedVectorSpace.of({0: 2}), GradedVectorSpace.of({-1: 2})):
        basis = lyndon_basis(space, 3)
        for w in (2, 3):
            for ids in sym_words(basis, w):
                n = len(ids)
                if n < 2:
                    continue
                lhs = _coshuffle_of_combo(pbw_psi(basis, {ids: rat(1)}))
                degs = [basis.elements[i].degree for i in ids]
                rhs = {}
                for k in range(1, n):
                    for sh in shuffles(k, n - k):
                        eps = koszul_sign(sh.perm, degs)
                        left = pbw_psi(
                            basis, {tuple(ids[p] for p in sh.perm[:k]): rat(1)}
                        )
                        right = pbw_psi(
                            basis, {tuple(ids[p] for p in sh.perm[k:]): rat(1)}
                        )
                        for key, c in _tensor_pair(left, right, rat(eps)).items():
                            rhs[key] = rhs.get(key, rat(0)) + c
                rhs = {k2: c for k2, c in rhs.items() if c}
                assert lhs == rhs


# --- transport of homotopy Leibniz structures ----------------------------------


def test_transfer_of_abelian_structure_is_zero():
    abelian = LeibnizInfStructure(GradedVectorSpace.of({-1: 2}), {})
    t = ks_transfer(abelian, TruncationBounds(arity=3, weight=3))
    assert dict(t.structure.brackets) == {}
    assert t.report.ok
    assert t.basis.dimensions() == (2, 3, 2)


def test_transfer_of_a_lie_algebra_restricts_to_its_bracket():
    t = ks_transfer(heisenberg_leibniz(), TruncationBounds(arity=3, weight=3))
    assert t.report.ok
    l2 = t.structure.brackets[2]
    weight_one = {
        key: dict(vec)
        for key, vec in l2.entries.items()
        if all(d == -1 for d, _ in key)
    }
    assert weight_one == {((-1, 0), (-1, 1)): {2: rat(1)}}
    # the unary part vanishes on weight-two elements: the bracket is a cycle
    l1 = t.structure.brackets[1]
    assert all(key[0][0] != -2 for key in l1.entries)
    # frozen ternary correction: l3(e0, e1, e2) = -1/6 [e2, e2]
    l3 = t.structure.brackets[3]
    assert l3.value(((-1, 0), (-1, 1), (-1, 2))) == {5: rat("-1/6")}
    sq = t.basis.id_of[(-2, 5)]
    assert t.basis.elements[sq].word == (2, 2)


def test_transfer_of_the_nonlie_example_hits_weight_two():
    s = encode_leibniz_algebra(leibniz_aa_b())
    t = ks_transfer(s, TruncationBounds(arity=3, weight=3))
    assert t.report.ok
    basis = t.basis
    aa = basis.id_of[(-2, 0)]
    ab = basis.id_of[(-2, 1)]
    bb = basis.id_of[(-2, 2)]
    assert basis.elements[aa].word == (0, 0)
    assert basis.elements[ab].word == (0, 1)
    assert basis.elements[bb].word == (1, 1)
    l1 = t.structure.brackets[1]
    # the square of a maps to twice the relation: d[a,a] = 2 b
    assert l1.value(((-2, 0),)) == {1: rat(2)}
    l2 = t.structure.brackets[2]
    # a bracket landing in weight two: l2([a,a], a) = [a, b]
    assert l2.value(((-2, 0), (-1, 0))) == {1: rat(1)}
    assert l2.value(((-2, 1), (-1, 0))) == {2: rat("1/2")}
    assert l1.value(((-3, 0),)) == {2: rat(1)}


def test_transferred_value_accessor_enforces_the_weight_bound():
    s = encode_leibniz_algebra(leibniz_aa_b())
    t = ks_transfer(s, TruncationBounds(arity=3, weight=3))
    assert transferred_value(t, ((-2, 0), (-1, 0))) == {1: rat(1)}
    assert transferred_value(t, ((-1, 0), (-1, 1))) == {}
    with pytest.raises(TruncationOverflow):
        transferred_value(t, ((-2, 0), (-2, 0)))
    with pytest.raises(InvalidInputData):
        transferred_value(t, ((-9, 0),))


def test_tight_weight_bound_truncates_loudly_but_checks_cleanly():
    s = encode_leibniz_algebra(leibniz_aa_b())
    t = ks_transfer(s, TruncationBounds(arity=2, weight=2))
    assert t.report.ok
    assert t.structure.brackets[1].value(((-2, 0),)) == {1: rat(2)}
    with pytest.raises(TruncationOverflow):
        transferred_value(t, ((-2, 0), (-1, 0)))


def test_transfer_gates():
    s = encode_leibniz_algebra(leibniz_aa_b())
    with pytest.raises(TruncationOverflow):
        ks_transfer(s, TruncationBounds(arity=4, weight=3))
    bad = encode_leibniz_algebra(leibniz_broken())
    with pytest.raises(NotSquareZero):
        ks_transfer(bad, TruncationBounds(arity=3, weight=3))


def test_transfer_after_induction_recovers_the_antisymmetrised_bracket():
    fam = heisenberg_family([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    _, _, l_fam, rho_fam = encode_lie_rep_pair(fam.pair)
    ind = induced_leibniz_inf(
        encode_embedding_tensor(fam), l_fam, rho_fam, TruncationBounds(arity=3)
    )
    t = ks_transfer(ind, TruncationBounds(arity=2, weight=2))
    assert t.report.ok
    classical = induced_leibniz(fam).bracket
    l2 = t.structure.brackets.get(2)
    for i, j in itertools.combinations(range(3), 2):
        want = {}
        for o, c in classical.value((i, j)).items():
            want[o] = want.get(o, rat(0)) + rat("1/2") * c
        for o, c in classical.value((j, i)).items():
            want[o] = want.get(o, rat(0)) - rat("1/2") * c
        want = {o: c for o, c in want.items() if c}
        got = l2.value(((-1, i), (-1, j))) if l2 else {}
        assert got == want


# --- transported homomorphisms --------------------------------------------------


def test_identity_transfers_to_the_identity():
    heis = heisenberg_leibniz()
    ident = GradedMap(
        1, 0, {((-1, i),): {i: 1} for i in range(3)}, 0
    )
    m = ks_morphism(heis, heis, {1: ident}, TruncationBounds(arity=2, weight=2))
    assert sorted(m.components) == [1]
    g1 = m.components[1]
    for key, vec in g1.entries.items():
        (d, i), = key
        assert dict(vec) == {i: rat(1)}
    labels = {m.source.basis.label_of[i] for i in range(len(m.source.basis.elements))}
    assert set(g1.entries) == {(lab,) for lab in labels}


def test_linear_iso_of_abelian_transfers_weightwise():
    abelian = LeibnizInfStructure(GradedVectorSpace.of({-1: 2}), {})
    f1 = GradedMap(1, 0, {((-1, 0),): {0: 1, 1: 1}, ((-1, 1),): {1: 1}}, 0)
    m = ks_morphism(abelian, abelian, {1: f1}, TruncationBounds(arity=2, weight=2))
    assert sorted(m.components) == [1]
    basis = m.source.basis
    images = {0: {0: rat(1), 1: rat(1)}, 1: {1: rat(1)}}
    g1 = m.components[1]
    for i in range(2):
        label = basis.label_of[i]
        want = {basis.label_of[k][1]: c for k, c in images[i].items()}
        assert g1.value((label,)) == want
    # weight two: the transported map is the functorial free Lie extension
    for i, e in enumerate(basis.elements):
        if e.weight != 2:
            continue
        left, right = e.tree
        want_ids = basis.bracket(images[left], images[right])
        want = {}
        for k, c in want_ids.items():
            want[basis.label_of[k][1]] = want.get(basis.label_of[k][1], rat(0)) + c
        want = {k: c for k, c in want.items() if c}
        assert g1.value((basis.label_of[i],)) == want


def test_morphism_gate_rejects_non_homomorphisms():
    source = encode_leibniz_algebra(leibniz_aa_b())
    doubled = encode_leibniz_algebra(
        LeibnizAlgebra.from_brackets(2, {(0, 0): {1: 2}})
    )
    ident = GradedMap(1, 0, {((-1, 0),): {0: 1}, ((-1, 1),): {1: 1}}, 0)
    with pytest.raises(NotAHomomorphism):
        ks_morphism(source, doubled, {1: ident}, TruncationBounds(arity=2, weight=2))


def test_quadratic_component_shows_up_in_the_transported_unary_part():
    mix = GradedVectorSpace.of({-2: 1, -1: 1})
    azero = LeibnizInfStructure(mix, {})
    ident = GradedMap(1, 0, {((-2, 0),): {0: 1}, ((-1, 0),): {0: 1}}, 0)
    f2 = GradedMap(2, 0, {(((-1, 0)), ((-1, 0))): {0: rat(3)}}, 0)
    bounds = TruncationBounds(arity=2, weight=2)
    m = ks_morphism(azero, azero, {1: ident, 2: f2}, bounds)
    basis = m.source.basis
    square = basis.id_of[(-2, 1)]
    assert basis.elements[square].word == (1, 1)
    # g([a,a]) = [a,a] + 2 f2(a,a): the quadratic part lands on the square
    assert m.components[1].value(((-2, 1),)) == {0: rat(6), 1: rat(1)}


def test_morphism_composition_law():
    mix = GradedVectorSpace.of({-2: 1, -1: 1})
    azero = LeibnizInfStructure(mix, {})
    ident = GradedMap(1, 0, {((-2, 0),): {0: 1}, ((-1, 0),): {0: 1}}, 0)
    f2 = GradedMap(2, 0, {(((-1, 0)), ((-1, 0))): {0: rat(3)}}, 0)
    g2 = GradedMap(2, 0, {(((-1, 0)), ((-1, 0))): {0: rat(5)}}, 0)
    bounds = TruncationBounds(arity=2, weight=2)
    mf = ks_morphism(azero, azero, {1: ident, 2: f2}, bounds)
    mg = ks_morphism(azero, azero, {1: ident, 2: g2}, bounds)
    composite = compose_leibniz_morphisms(
        azero, azero, azero, {1: ident, 2: f2}, {1: ident, 2: g2}, bounds
    )
    assert composite[2].value(((-1, 0), (-1, 0))) == {0: rat(8)}
    mc = ks_morphism(azero, azero, composite, bounds)
    both = compose_transferred_morphisms(mg, mf, bounds)
    assert {k: dict(v.entries) for k, v in mc.components.items()} == {
        k: dict(v.entries) for k, v in both.items()
    }
    assert mc.components[1].value(((-2, 1),)) == {0: rat(16), 1: rat(1)}
