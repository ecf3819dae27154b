"""Free graded Lie algebras on a letter space and transport of homotopy
structures along the word-coalgebra isomorphisms.

The free graded Lie algebra is realised inside the tensor algebra of the
letters: every basis element is stored together with its expansion as a
linear combination of tensor words, so the universal envelope *is* the tensor
algebra and the letter-word isomorphism is the identity on words.  The
Poincare-Birkhoff-Witt symmetrisation and the ordered-monomial rewriting are
then concrete invertible matrices on each weight block, and the transported
codifferential of a homotopy Leibniz structure becomes an explicit
computation: symmetrise, apply the word differential, rewrite back.

Basis of the free graded Lie algebra: Lyndon words with their standard
bracketing, extended by the squares of odd-degree Lyndon elements (the
graded analogue needs them: an odd generator has a nonzero self-bracket).
Expansions are triangular with respect to the lexicographic order on words,
which makes rewriting into the basis a greedy elimination.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import (
    InvalidInputData,
    NotAHomomorphism,
    NotSquareZero,
    TruncationOverflow,
)
from .exactlin import Matrix, Rational, hstack, rat, rref
from .graded import (
    GradedMap,
    GradedVectorSpace,
    LeibnizInfStructure,
    LinfStructure,
    TruncationBounds,
    bar_construction,
    check_leibniz_inf_morphism,
)
from .structures import ValidationReport, Witness
from .tensorbasis import e_shuffles, koszul_sign, shuffles

BasisElt = tuple[int, int]
Word = tuple[BasisElt, ...]
Combo = dict[Word, Rational]
SymIds = tuple[int, ...]
SymCombo = dict[SymIds, Rational]

_ZERO = rat(0)
_ONE = rat(1)


def _clean(combo: Mapping) -> dict:
    return {k: c for k, c in combo.items() if c}


def _add_into(acc: dict, key, c: Rational) -> None:
    acc[key] = acc.get(key, _ZERO) + c


def _concat(a: Combo, b: Combo, sign: int = 1, scale: Rational = _ONE) -> Combo:
    out: Combo = {}
    for wa, ca in a.items():
        for wb, cb in b.items():
            _add_into(out, wa + wb, sign * scale * ca * cb)
    return _clean(out)


def _apply_table(table: Mapping[Word, Mapping[Word, Rational]], combo: Combo) -> Combo:
    out: Combo = {}
    for w, c in combo.items():
        for w2, c2 in table.get(w, {}).items():
            _add_into(out, w2, c * c2)
    return _clean(out)


# --------------------------------------------------------------------------
# Lyndon words and the free graded Lie algebra


def _lyndon_words(alphabet_size: int, max_length: int) -> list[tuple[int, ...]]:
    """All Lyndon words over 0..alphabet_size-1 up to the length bound (Duval)."""
    words: list[tuple[int, ...]] = []
    w = [-1]
    while w:
        w[-1] += 1
        if len(w) <= max_length:
            words.append(tuple(w))
        m = len(w)
        while len(w) < max_length:
            w.append(w[-m])
        while w and w[-1] == alphabet_size - 1:
            w.pop()
    return sorted(words, key=lambda t: (len(t), t))


def _standard_split(word: tuple[int, ...]) -> int:
    """Cut position of the standard factorization: the right factor is the
    lexicographically least proper suffix."""
    n = len(word)
    best = 1
    for i in range(1, n):
        if word[i:] < word[best:]:
            best = i
    return best


def witt_dimension(generators: int, weight: int) -> int:
    """Number of Lyndon words of the given length over the given alphabet."""
    total = 0
    for d in range(1, weight + 1):
        if weight % d:
            continue
        total += _mobius(d) * generators ** (weight // d)
    return total // weight


def _mobius(n: int) -> int:
    result = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    if n > 1:
        result = -result
    return result


@dataclass(frozen=True)
class LieBasisElement:
    """One basis element of the free graded Lie algebra.

    ``word`` lists letter positions; ``tree`` is the bracketing (a letter
    position at the leaves, pairs at the nodes); ``expansion`` is the element
    written in the tensor-word basis, with the word itself as the
    lexicographically least term.
    """

    word: tuple[int, ...]
    tree: object
    degree: int
    weight: int
    expansion: Mapping[Word, Rational]
    leading_coeff: Rational


@dataclass(frozen=True)
class LyndonBasis:
    """Basis of the free graded Lie algebra on a letter space, by weight."""

    space: GradedVectorSpace
    weight_bound: int
    elements: tuple[LieBasisElement, ...]
    letters: tuple[BasisElt, ...] = field(default=(), compare=False)
    _by_leading: Mapping[Word, int] = field(default_factory=dict, compare=False)
    lie_space: GradedVectorSpace = field(default=None, compare=False)
    label_of: Mapping[int, BasisElt] = field(default_factory=dict, compare=False)
    id_of: Mapping[BasisElt, int] = field(default_factory=dict, compare=False)

    def by_weight(self, weight: int) -> tuple[int, ...]:
        return tuple(
            i for i, e in enumerate(self.elements) if e.weight == weight
        )

    def dimensions(self) -> tuple[int, ...]:
        counts = [0] * self.weight_bound
        for e in self.elements:
            counts[e.weight - 1] += 1
        return tuple(counts)

    def rewrite(self, combo: Mapping[Word, Rational]) -> dict[int, Rational]:
        """Express a tensor combination lying in the Lie part in the basis.

        Greedy triangular elimination on the lexicographically least word;
        raises ``InvalidInputData`` when the input is not in the span.
        """
        rest = dict(_clean(combo))
        out: dict[int, Rational] = {}
        while rest:
            w = min(rest)
            idx = self._by_leading.get(w)
            if idx is None:
                raise InvalidInputData(
                    f"tensor combination is not in the free Lie algebra "
                    f"(unmatched word {w})"
                )
            elt = self.elements[idx]
            c = rest[w] / elt.leading_coeff
            _add_into(out, idx, c)
            for w2, c2 in elt.expansion.items():
                _add_into(rest, w2, -c * c2)
            rest = _clean(rest)
        return _clean(out)

    def bracket(
        self, a: Mapping[int, Rational], b: Mapping[int, Rational]
    ) -> dict[int, Rational]:
        """Free Lie bracket of two basis combinations, rewritten in the basis."""
        out: Combo = {}
        for i, ca in a.items():
            for j, cb in b.items():
                x, y = self.elements[i], self.elements[j]
                if x.weight + y.weight > self.weight_bound:
                    raise TruncationOverflow(
                        f"bracket of weights {x.weight} and {y.weight} exceeds "
                        f"bound {self.weight_bound}"
                    )
                sign = -1 if (x.degree * y.degree) % 2 else 1
                term = _concat(dict(x.expansion), dict(y.expansion), 1, ca * cb)
                swap = _concat(dict(y.expansion), dict(x.expansion), -sign, ca * cb)
                for w, c in itertools.chain(term.items(), swap.items()):
                    _add_into(out, w, c)
        return self.rewrite(_clean(out))


def lyndon_basis(space: GradedVectorSpace, weight_bound: int) -> LyndonBasis:
    """Lyndon-word basis of the free graded Lie algebra on the letter space.

    Standard bracketing via the least-proper-suffix factorization; squares of
    odd-degree elements are appended for even weights where they fit.
    """
    if weight_bound < 1:
        raise InvalidInputData("weight bound must be at least 1")
    letters = space.basis()
    if not letters:
        raise InvalidInputData("the letter space has no basis elements")
    g = len(letters)
    degrees = [d for d, _ in letters]

    def expand(tree) -> tuple[Combo, int]:
        if isinstance(tree, int):
            return {(letters[tree],): _ONE}, degrees[tree]
        left, right = tree
        lc, ld = expand(left)
        rc, rd = expand(right)
        sign = -1 if (ld * rd) % 2 else 1
        out = _concat(lc, rc, 1)
        for w, c in _concat(rc, lc, -sign).items():
            _add_into(out, w, c)
        return _clean(out), ld + rd

    trees: dict[tuple[int, ...], object] = {}

    def tree_of(word: tuple[int, ...]):
        if word in trees:
            return trees[word]
        if len(word) == 1:
            trees[word] = word[0]
        else:
            cut = _standard_split(word)
            trees[word] = (tree_of(word[:cut]), tree_of(word[cut:]))
        return trees[word]

    elements: list[LieBasisElement] = []
    for w in _lyndon_words(g, weight_bound):
        tree = tree_of(w)
        expansion, degree = expand(tree)
        elements.append(_checked_element(w, tree, degree, expansion, letters))
    for e in list(elements):
        if e.degree % 2 and 2 * e.weight <= weight_bound:
            tree = (e.tree, e.tree)
            expansion, degree = expand(tree)
            elements.append(
                _checked_element(e.word + e.word, tree, degree, expansion, letters)
            )
    elements.sort(key=lambda e: (e.weight, e.word))
    by_leading = {}
    for i, e in enumerate(elements):
        lead = tuple(letters[p] for p in e.word)
        by_leading[lead] = i
    degree_counts: dict[int, int] = {}
    label_of: dict[int, BasisElt] = {}
    for i, e in enumerate(elements):
        j = degree_counts.get(e.degree, 0)
        degree_counts[e.degree] = j + 1
        label_of[i] = (e.degree, j)
    lie_space = GradedVectorSpace.of(degree_counts)
    return LyndonBasis(
        space,
        weight_bound,
        tuple(elements),
        letters,
        by_leading,
        lie_space,
        label_of,
        {v: k for k, v in label_of.items()},
    )


def _checked_element(
    word: tuple[int, ...],
    tree,
    degree: int,
    expansion: Combo,
    letters: Sequence[BasisElt],
) -> LieBasisElement:
    lead_word = tuple(letters[p] for p in word)
    lead = min(expansion)
    assert lead == lead_word, (word, lead)
    return LieBasisElement(
        word, tree, degree, len(word), expansion, expansion[lead_word]
    )


def basis_descriptor(basis: LyndonBasis) -> list[dict]:
    """JSON-able summary of the basis: word, bracketing, degree, weight."""

    def tree_json(tree):
        if isinstance(tree, int):
            return tree
        return [tree_json(tree[0]), tree_json(tree[1])]

    return [
        {
            "word": list(e.word),
            "bracketing": tree_json(e.tree),
            "degree": e.degree,
            "weight": e.weight,
        }
        for e in basis.elements
    ]


# --------------------------------------------------------------------------
# symmetric words over the basis and the two word-space isomorphisms


def sym_sort(basis: LyndonBasis, ids: Sequence[int]) -> tuple[SymIds, int]:
    """Canonical weakly-increasing form of a symmetric word, with its sign.

    Basis ids are already in the monomial order (weight, then word); odd-odd
    swaps contribute signs and a repeated odd-degree element forces zero.
    """
    elts = list(ids)
    sign = 1
    for i in range(1, len(elts)):
        j = i
        while j > 0 and elts[j - 1] > elts[j]:
            if (
                basis.elements[elts[j - 1]].degree % 2
                and basis.elements[elts[j]].degree % 2
            ):
                sign = -sign
            elts[j - 1], elts[j] = elts[j], elts[j - 1]
            j -= 1
    for a, b in zip(elts, elts[1:]):
        if a == b and basis.elements[a].degree % 2:
            return tuple(elts), 0
    return tuple(elts), sign


def sym_words(basis: LyndonBasis, total_weight: int) -> list[SymIds]:
    """All canonical symmetric words of exactly the given total weight."""
    out: list[SymIds] = []

    def rec(start: int, left: int, acc: list[int]) -> None:
        if left == 0:
            if acc:
                out.append(tuple(acc))
            return
        for i in range(start, len(basis.elements)):
            e = basis.elements[i]
            if e.weight > left:
                continue
            if acc and acc[-1] == i and e.degree % 2:
                continue
            acc.append(i)
            rec(i, left - e.weight, acc)
            acc.pop()

    rec(0, total_weight, [])
    return sorted(out)


def sym_weight(basis: LyndonBasis, ids: Sequence[int]) -> int:
    return sum(basis.elements[i].weight for i in ids)


def sym_degree(basis: LyndonBasis, ids: Sequence[int]) -> int:
    return sum(basis.elements[i].degree for i in ids)


def _symmetrized_expansion(basis: LyndonBasis, ids: SymIds) -> Combo:
    """The symmetrisation map on one canonical symmetric word."""
    m = len(ids)
    degrees = [basis.elements[i].degree for i in ids]
    inv = _ONE / rat(math.factorial(m))
    out: Combo = {}
    for perm in itertools.permutations(range(m)):
        eps = koszul_sign(perm, degrees)
        if eps == 0:
            continue
        term: Combo = {(): inv * eps}
        for t in perm:
            term = _concat(term, dict(basis.elements[ids[t]].expansion))
        for w, c in term.items():
            _add_into(out, w, c)
    return _clean(out)


def _monomial_expansion(basis: LyndonBasis, ids: SymIds) -> Combo:
    """The ordered product of the basis elements, as a tensor combination."""
    out: Combo = {(): _ONE}
    for i in ids:
        out = _concat(out, dict(basis.elements[i].expansion))
    return out


class _WordBlocks:
    """Per-weight matrices of a symmetric-word-to-tensor-word expansion."""

    def __init__(self, basis: LyndonBasis, expander) -> None:
        self.basis = basis
        self.expander = expander
        self.columns: dict[int, list[SymIds]] = {}
        self.words: dict[int, list[Word]] = {}
        self.inverse: dict[int, Matrix] = {}
        for w in range(1, basis.weight_bound + 1):
            cols = sym_words(basis, w)
            words = [
                tuple(word)
                for word in itertools.product(basis.letters, repeat=w)
            ]
            if len(cols) != len(words):
                raise AssertionError(
                    f"weight-{w} block is not square: {len(cols)} symmetric "
                    f"words vs {len(words)} tensor words"
                )
            index = {word: r for r, word in enumerate(words)}
            entries: list[Rational] = []
            columns_values = [self.expander(basis, ids) for ids in cols]
            for r in range(len(words)):
                for vals in columns_values:
                    entries.append(vals.get(words[r], _ZERO))
            m = Matrix(len(words), len(cols), tuple(entries))
            reduced, pivots = rref(hstack([m, Matrix.identity(len(words))]))
            if pivots != tuple(range(len(words))):
                raise AssertionError(f"weight-{w} block is singular")
            inv_entries = tuple(
                reduced.at(i, len(words) + j)
                for i in range(len(words))
                for j in range(len(words))
            )
            self.columns[w] = cols
            self.words[w] = words
            self.inverse[w] = Matrix(len(words), len(words), inv_entries)

    def apply(self, combo: SymCombo) -> Combo:
        out: Combo = {}
        for ids, c in combo.items():
            for word, c2 in self.expander(self.basis, ids).items():
                _add_into(out, word, c * c2)
        return _clean(out)

    def invert(self, combo: Combo) -> SymCombo:
        by_weight: dict[int, Combo] = {}
        for word, c in _clean(combo).items():
            if not word:
                raise InvalidInputData("the empty word has no preimage here")
            by_weight.setdefault(len(word), {})[word] = c
        out: SymCombo = {}
        for w, part in by_weight.items():
            if w not in self.words:
                raise TruncationOverflow(
                    f"weight-{w} words exceed the stored bound "
                    f"{self.basis.weight_bound}"
                )
            words = self.words[w]
            vec = [part.get(word, _ZERO) for word in words]
            sol = self.inverse[w].apply(vec)
            for ids, c in zip(self.columns[w], sol):
                if c:
                    _add_into(out, ids, c)
        return _clean(out)


def pbw_psi(basis: LyndonBasis, combo: Mapping[SymIds, Rational]) -> Combo:
    """Symmetrisation of symmetric words into the tensor-word envelope."""
    return _psi_blocks(basis).apply(dict(combo))


def pbw_psi_inverse(basis: LyndonBasis, combo: Mapping[Word, Rational]) -> SymCombo:
    """Inverse symmetrisation, block-triangular in the weight."""
    return _psi_blocks(basis).invert(dict(combo))


def cosh_iso(basis: LyndonBasis, combo: Mapping[Word, Rational]) -> SymCombo:
    """Express a tensor combination in ordered basis monomials of the envelope."""
    return _mono_blocks(basis).invert(dict(combo))


def cosh_iso_inverse(basis: LyndonBasis, combo: Mapping[SymIds, Rational]) -> Combo:
    """Expand ordered basis monomials back into tensor words."""
    return _mono_blocks(basis).apply(dict(combo))


_PSI_CACHE: dict[int, tuple[LyndonBasis, _WordBlocks]] = {}
_MONO_CACHE: dict[int, tuple[LyndonBasis, _WordBlocks]] = {}


def _cached_blocks(
    cache: dict, basis: LyndonBasis, expander
) -> _WordBlocks:
    key = id(basis)
    hit = cache.get(key)
    if hit is None or hit[0] is not basis:
        cache[key] = (basis, _WordBlocks(basis, expander))
    return cache[key][1]


def _psi_blocks(basis: LyndonBasis) -> _WordBlocks:
    return _cached_blocks(_PSI_CACHE, basis, _symmetrized_expansion)


def _mono_blocks(basis: LyndonBasis) -> _WordBlocks:
    return _cached_blocks(_MONO_CACHE, basis, _monomial_expansion)


# --------------------------------------------------------------------------
# transport of a homotopy Leibniz structure


@dataclass(frozen=True)
class KSTransfer:
    """A homotopy Lie structure transported onto the free Lie algebra.

    ``structure`` stores the brackets on all tuples whose total weight fits
    the bound; heavier tuples are not silently zero — ``transferred_value``
    refuses them.  ``report`` is the weight-aware homotopy-Lie check.
    """

    structure: LinfStructure
    basis: LyndonBasis
    bounds: TruncationBounds
    report: ValidationReport
    on_sym: Mapping[SymIds, Mapping[SymIds, Rational]] = field(compare=False, default_factory=dict)


def _letter_structure_guard(s: LeibnizInfStructure, bounds: TruncationBounds) -> None:
    if bounds.arity > bounds.weight:
        raise TruncationOverflow(
            f"arity bound {bounds.arity} exceeds weight bound {bounds.weight}: "
            "every bracket of that arity would leak past the truncation"
        )


def _transfer_data(s: LeibnizInfStructure, bounds: TruncationBounds):
    _letter_structure_guard(s, bounds)
    bc = bar_construction(
        s, TruncationBounds(arity=bounds.arity, weight=bounds.weight)
    )
    if not bc.square_is_zero:
        raise NotSquareZero(
            "the letter brackets are not homotopy Leibniz at this truncation"
        )
    basis = lyndon_basis(s.space, bounds.weight)
    psi = _psi_blocks(basis)
    dtilde: dict[SymIds, SymCombo] = {}
    for w in range(1, bounds.weight + 1):
        for ids in sym_words(basis, w):
            image = _apply_table(bc.diff, psi.apply({ids: _ONE}))
            dtilde[ids] = psi.invert(image)
    return basis, psi, dtilde


def ks_transfer(s: LeibnizInfStructure, bounds: TruncationBounds) -> KSTransfer:
    """Transport the word codifferential onto the free Lie algebra.

    The brackets are the corestrictions (single-element output parts) of the
    transported codifferential on canonical symmetric words; the full values
    are retained and checked against the coderivation they generate, and the
    transported map is verified to square to zero on the truncation.
    """
    basis, psi, dtilde = _transfer_data(s, bounds)
    brackets_tables: dict[int, dict] = {}
    for ids, value in dtilde.items():
        if len(ids) > bounds.arity:
            continue
        line = {t[0]: c for t, c in value.items() if len(t) == 1}
        if len(ids) == 1:
            assert all(len(t) == 1 for t in value), (
                "the transported differential must preserve the Lie part"
            )
        if not line:
            continue
        key = tuple(basis.label_of[i] for i in ids)
        in_degree = sum(d for d, _ in key)
        vec: dict[int, Rational] = {}
        for eid, c in line.items():
            d, j = basis.label_of[eid]
            assert d == in_degree + 1, "transported bracket is not degree-one"
            _add_into(vec, j, c)
        vec = _clean(vec)
        if vec:
            brackets_tables.setdefault(len(ids), {})[key] = vec
    brackets = {
        k: GradedMap(k, 1, table, k) for k, table in brackets_tables.items()
    }
    brackets = {k: m for k, m in brackets.items() if not m.is_zero()}
    structure = LinfStructure(basis.lie_space, brackets)
    _assert_square_zero(basis, dtilde)
    _assert_coderivation(basis, structure, dtilde, bounds)
    report = check_linf_weighted(structure, basis, bounds)
    return KSTransfer(structure, basis, bounds, report, dtilde)


def _assert_square_zero(basis: LyndonBasis, dtilde: Mapping[SymIds, SymCombo]) -> None:
    for ids, value in dtilde.items():
        total: SymCombo = {}
        for mid, c in value.items():
            for out, c2 in dtilde.get(mid, {}).items():
                _add_into(total, out, c * c2)
        assert not _clean(total), f"transported differential fails to square to zero at {ids}"


def _assert_coderivation(
    basis: LyndonBasis,
    structure: LinfStructure,
    dtilde: Mapping[SymIds, SymCombo],
    bounds: TruncationBounds,
) -> None:
    """The stored full values must be the coderivation of the corestrictions."""
    fam = dict(structure.brackets)
    for ids, value in dtilde.items():
        n = len(ids)
        if n > bounds.arity:
            continue
        degrees = [basis.elements[i].degree for i in ids]
        expect: SymCombo = {}
        for k in range(1, n + 1):
            l_k = fam.get(k)
            if l_k is None:
                continue
            for sh in shuffles(k, n - k):
                eps = koszul_sign(sh.perm, degrees)
                if eps == 0:
                    continue
                inner = tuple(ids[p] for p in sh.perm[:k])
                tail = tuple(ids[p] for p in sh.perm[k:])
                inner_key = tuple(basis.label_of[i] for i in inner)
                out_deg = sum(d for d, _ in inner_key) + 1
                for j, c in l_k.value(inner_key).items():
                    out_id = basis.id_of[(out_deg, j)]
                    canon, sign = sym_sort(basis, (out_id,) + tail)
                    if sign == 0:
                        continue
                    _add_into(expect, canon, eps * sign * c)
        assert _clean(expect) == _clean(dict(value)), (
            f"corestriction does not regenerate the transported value at {ids}"
        )


def check_linf_weighted(
    structure: LinfStructure, basis: LyndonBasis, bounds: TruncationBounds
) -> ValidationReport:
    """Homotopy Lie check restricted to tuples whose total weight fits.

    Identities on heavier tuples involve brackets past the truncation and are
    excluded; everything inside the bound must hold exactly.
    """
    fam = dict(structure.brackets)
    witnesses: list[Witness] = []
    labels = [basis.label_of[i] for i in range(len(basis.elements))]
    weights = {basis.label_of[i]: e.weight for i, e in enumerate(basis.elements)}
    for n in range(1, bounds.arity + 1):
        for w in itertools.combinations_with_replacement(labels, n):
            if sum(weights[x] for x in w) > bounds.weight:
                continue
            degs = [d for d, _ in w]
            total: dict[int, Rational] = {}
            for i in range(1, n + 1):
                inner = fam.get(i)
                outer = fam.get(n - i + 1)
                if inner is None or outer is None:
                    continue
                for sh in shuffles(i, n - i):
                    eps = koszul_sign(sh.perm, degs)
                    if eps == 0:
                        continue
                    inner_key = tuple(w[p] for p in sh.perm[:i])
                    mid_deg = sum(d for d, _ in inner_key) + 1
                    tail = tuple(w[p] for p in sh.perm[i:])
                    for o, c in inner.value(inner_key).items():
                        outer_key = ((mid_deg, o),) + tail
                        for oo, cc in outer.value(outer_key).items():
                            _add_into(total, oo, eps * c * cc)
            total = _clean(total)
            if total:
                flat: list[int] = [n]
                for d, i in w:
                    flat.extend((d, i))
                witnesses.append(
                    Witness("generalized-jacobi", tuple(flat), total, {})
                )
    return ValidationReport.from_witnesses(witnesses)


def transferred_value(
    transfer: KSTransfer, elts: Sequence[BasisElt]
) -> dict[int, Rational]:
    """Evaluate a transferred bracket, refusing tuples past the weight bound."""
    basis = transfer.basis
    for e in elts:
        if e not in basis.id_of:
            raise InvalidInputData(f"{e} is not a basis label of the free Lie algebra")
    total = sum(basis.elements[basis.id_of[e]].weight for e in elts)
    if total > transfer.bounds.weight:
        raise TruncationOverflow(
            f"bracket at total weight {total} exceeds bound "
            f"{transfer.bounds.weight}; the transfer does not store it"
        )
    m = transfer.structure.brackets.get(len(elts))
    if m is None:
        return {}
    return m.value(tuple(elts))


# --------------------------------------------------------------------------
# transport of homotopy Leibniz homomorphisms


def _morphism_word_table(
    source: LeibnizInfStructure,
    components: Mapping[int, GradedMap],
    weight_bound: int,
) -> dict[Word, Combo]:
    """The word-coalgebra homomorphism generated by the component family."""
    fam = {k: m for k, m in components.items() if not m.is_zero()}
    letters = source.space.basis()
    table: dict[Word, Combo] = {}
    for n in range(1, weight_bound + 1):
        for word in itertools.product(letters, repeat=n):
            degs = [d for d, _ in word]
            acc: Combo = {}
            for p in range(1, n + 1):
                for sizes in _compositions(n, p):
                    if any(k not in fam for k in sizes):
                        continue
                    for sh in e_shuffles(sizes):
                        eps = koszul_sign(sh.perm, degs)
                        if eps == 0:
                            continue
                        pos = 0
                        blocks: list[tuple[BasisElt, ...]] = []
                        for ksize in sizes:
                            blocks.append(
                                tuple(word[sh.perm[pos + t]] for t in range(ksize))
                            )
                            pos += ksize
                        _scatter_blocks(acc, fam, blocks, rat(eps))
            acc = _clean(acc)
            if acc:
                table[word] = acc
    return table


def _scatter_blocks(
    acc: Combo,
    fam: Mapping[int, GradedMap],
    blocks: Sequence[tuple[BasisElt, ...]],
    coeff: Rational,
) -> None:
    def rec(idx: int, letters: tuple[BasisElt, ...], c: Rational) -> None:
        if idx == len(blocks):
            _add_into(acc, letters, c)
            return
        block = blocks[idx]
        f_k = fam[len(block)]
        out_deg = f_k.out_degree(block)
        for o, c2 in f_k.value(block).items():
            rec(idx + 1, letters + ((out_deg, o),), c * c2)

    rec(0, (), coeff)


def _compositions(n: int, parts: int) -> Iterable[tuple[int, ...]]:
    if parts == 1:
        yield (n,)
        return
    for head in range(1, n - parts + 2):
        for rest in _compositions(n - head, parts - 1):
            yield (head,) + rest


@dataclass(frozen=True)
class KSMorphism:
    """Transported homomorphism: components plus the full symmetric-word map."""

    components: Mapping[int, GradedMap]
    source: KSTransfer
    target: KSTransfer
    on_sym: Mapping[SymIds, Mapping[SymIds, Rational]] = field(compare=False, default_factory=dict)


def ks_morphism(
    source: LeibnizInfStructure,
    target: LeibnizInfStructure,
    components: Mapping[int, GradedMap],
    bounds: TruncationBounds,
) -> KSMorphism:
    """Transport a homotopy Leibniz homomorphism to the free Lie algebras.

    The component family is validated first; the generated word map is
    checked to intertwine the word differentials, and the transported map to
    intertwine the transported ones, both on the stored truncation.
    """
    gate = TruncationBounds(
        arity=max(bounds.arity, bounds.weight), weight=bounds.weight
    )
    rep = check_leibniz_inf_morphism(source, target, components, gate)
    if not rep.ok:
        raise NotAHomomorphism(
            "the component family fails the homotopy Leibniz homomorphism "
            f"identities ({len(rep.witnesses)} witnesses)"
        )
    src = ks_transfer(source, bounds)
    tgt = ks_transfer(target, bounds)
    f_table = _morphism_word_table(source, components, bounds.weight)
    bc_src = bar_construction(source, bounds)
    bc_tgt = bar_construction(target, bounds)
    for word, image in f_table.items():
        lhs = _apply_table(bc_tgt.diff, image)
        rhs = _apply_table(f_table, dict(bc_src.diff.get(word, {})))
        assert _clean(lhs) == _clean(rhs), (
            f"word map fails to intertwine the differentials at {word}"
        )
    psi_src = _psi_blocks(src.basis)
    psi_tgt = _psi_blocks(tgt.basis)
    on_sym: dict[SymIds, SymCombo] = {}
    for w in range(1, bounds.weight + 1):
        for ids in sym_words(src.basis, w):
            image = _apply_table(f_table, psi_src.apply({ids: _ONE}))
            on_sym[ids] = psi_tgt.invert(image)
    for ids, value in on_sym.items():
        lhs_c: SymCombo = {}
        for mid, c in src.on_sym.get(ids, {}).items():
            for out, c2 in on_sym.get(mid, {}).items():
                _add_into(lhs_c, out, c * c2)
        rhs_c: SymCombo = {}
        for mid, c in value.items():
            for out, c2 in tgt.on_sym.get(mid, {}).items():
                _add_into(rhs_c, out, c * c2)
        assert _clean(lhs_c) == _clean(rhs_c), (
            f"transported map fails to intertwine the codifferentials at {ids}"
        )
    return KSMorphism(
        _extract_morphism_components(src, tgt, on_sym, bounds), src, tgt, on_sym
    )


def _extract_morphism_components(
    src: KSTransfer,
    tgt: KSTransfer,
    on_sym: Mapping[SymIds, Mapping[SymIds, Rational]],
    bounds: TruncationBounds,
) -> dict[int, GradedMap]:
    tables: dict[int, dict] = {}
    for ids, value in on_sym.items():
        if len(ids) > bounds.arity:
            continue
        line = {t[0]: c for t, c in value.items() if len(t) == 1}
        if not line:
            continue
        key = tuple(src.basis.label_of[i] for i in ids)
        in_degree = sum(d for d, _ in key)
        vec: dict[int, Rational] = {}
        for eid, c in line.items():
            d, j = tgt.basis.label_of[eid]
            assert d == in_degree, "transported component is not degree-zero"
            _add_into(vec, j, c)
        vec = _clean(vec)
        if vec:
            tables.setdefault(len(ids), {})[key] = vec
    out = {k: GradedMap(k, 0, table, k) for k, table in tables.items()}
    return {k: m for k, m in out.items() if not m.is_zero()}


def compose_leibniz_morphisms(
    source: LeibnizInfStructure,
    middle: LeibnizInfStructure,
    target: LeibnizInfStructure,
    inner: Mapping[int, GradedMap],
    outer: Mapping[int, GradedMap],
    bounds: TruncationBounds,
) -> dict[int, GradedMap]:
    """Components of the composite homomorphism, by word corestriction."""
    f_table = _morphism_word_table(source, inner, bounds.weight)
    g_table = _morphism_word_table(middle, outer, bounds.weight)
    letters = source.space.basis()
    tables: dict[int, dict] = {}
    for k in range(1, bounds.arity + 1):
        for word in itertools.product(letters, repeat=k):
            image = _apply_table(g_table, dict(f_table.get(word, {})))
            vec: dict[int, Rational] = {}
            out_deg = sum(d for d, _ in word)
            for w2, c in image.items():
                if len(w2) != 1:
                    continue
                d, j = w2[0]
                assert d == out_deg
                _add_into(vec, j, c)
            vec = _clean(vec)
            if vec:
                tables.setdefault(k, {})[word] = vec
    out = {k: GradedMap(k, 0, table, 0) for k, table in tables.items()}
    return {k: m for k, m in out.items() if not m.is_zero()}


def compose_transferred_morphisms(
    outer: KSMorphism, inner: KSMorphism, bounds: TruncationBounds
) -> dict[int, GradedMap]:
    """Corestriction of the composite of two transported morphisms."""
    composite: dict[SymIds, SymCombo] = {}
    for ids, value in inner.on_sym.items():
        acc: SymCombo = {}
        for mid, c in value.items():
            for out, c2 in outer.on_sym.get(mid, {}).items():
                _add_into(acc, out, c * c2)
        composite[ids] = _clean(acc)
    return _extract_morphism_components(
        inner.source, outer.target, composite, bounds
    )
