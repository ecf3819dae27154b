import itertools
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from leibten.errors import SignatureMismatch
from leibten.exactlin import rat
from leibten.multilinear import (
    MultilinearMap,
    SumSpace,
    apply_to_vectors,
    balavoine,
    circ_bar,
    compose_at,
    hemisemidirect,
    horizontal_lift,
    leibnizator,
    mc_check_leibniz,
    mc_check_lierep,
)
from leibten.tensorbasis import shuffles


def naive_compose_at(p, q, k):
    """Dense reference: evaluate the insertion formula literally."""
    dim = p.dim_out
    m = k - 1
    n = q.arity - 1
    arity = p.arity + q.arity - 1
    table = {}
    for key in itertools.product(range(dim), repeat=arity):
        out = {}
        head, anchor, tail = key[: m + n], key[m + n], key[m + n + 1 :]
        for sh in shuffles(m, n):
            sign = sh.sign * (-1 if (m * n) % 2 else 1)
            front = tuple(head[i] for i in sh.perm[:m])
            q_args = tuple(head[i] for i in sh.perm[m:]) + (anchor,)
            for mid, c0 in q.value(q_args).items():
                for i, c in p.value(front + (mid,) + tail).items():
                    out[i] = out.get(i, 0) + sign * c0 * c
        out = {i: c for i, c in out.items() if c != 0}
        if out:
            table[key] = out
    return MultilinearMap((dim,) * arity, dim, table, 0)


@st.composite
def sparse_maps(draw, dim, arity):
    n_entries = draw(st.integers(0, 3))
    table = {}
    for _ in range(n_entries):
        key = tuple(draw(st.integers(0, dim - 1)) for _ in range(arity))
        out = draw(st.integers(0, dim - 1))
        c = draw(st.fractions(min_value=-3, max_value=3, max_denominator=4))
        table.setdefault(key, {})[out] = c
    return MultilinearMap((dim,) * arity, dim, table, 0)


@st.composite
def map_pairs(draw):
    dim = draw(st.integers(2, 3))
    p = draw(sparse_maps(dim, draw(st.integers(1, 3))))
    q = draw(sparse_maps(dim, draw(st.integers(1, 3))))
    return p, q


@settings(max_examples=60, deadline=None)
@given(map_pairs(), st.data())
def test_compose_at_matches_dense_oracle(pq, data):
    p, q = pq
    k = data.draw(st.integers(1, p.arity))
    assert compose_at(p, k, q) == naive_compose_at(p, q, k)


@settings(max_examples=60, deadline=None)
@given(map_pairs())
def test_bracket_graded_antisymmetry(pq):
    p, q = pq
    dp, dq = p.arity - 1, q.arity - 1
    lhs = balavoine(p, q)
    rhs = balavoine(q, p).scale((-1) ** (dp * dq + 1))
    assert lhs == rhs


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_bracket_graded_leibniz_rule(data):
    dim = data.draw(st.integers(2, 3))
    p = data.draw(sparse_maps(dim, data.draw(st.integers(1, 3))))
    q = data.draw(sparse_maps(dim, data.draw(st.integers(1, 3))))
    r = data.draw(sparse_maps(dim, data.draw(st.integers(1, 3))))
    dp, dq = p.arity - 1, q.arity - 1
    lhs = balavoine(p, balavoine(q, r))
    rhs = balavoine(balavoine(p, q), r) + balavoine(
        q, balavoine(p, r)
    ).scale((-1) ** (dp * dq))
    assert lhs == rhs


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_self_bracket_is_twice_leibnizator(data):
    dim = data.draw(st.integers(2, 3))
    omega = data.draw(sparse_maps(dim, 2))
    assert balavoine(omega, omega) == leibnizator(omega).scale(2)


def heisenberg_mu():
    # [e1,e2] = e3 on basis 0,1,2; alternating storage
    return MultilinearMap((3, 3), 3, {(0, 1): {2: rat(1)}}, wedge=2)


def adjoint_rho():
    table = {(0, 1): {2: rat(1)}, (1, 0): {2: rat(-1)}}
    return MultilinearMap((3, 3), 3, table, 0)


def test_alternating_storage():
    mu = heisenberg_mu()
    assert mu.value((0, 1)) == {2: rat(1)}
    assert mu.value((1, 0)) == {2: rat(-1)}
    assert mu.value((0, 0)) == {}
    assert mu == mu.as_tensor()  # equality across storage conventions
    assert (mu - mu).is_zero()


def test_hemisemidirect_heisenberg_adjoint():
    space = SumSpace((3, 3))
    total = hemisemidirect(heisenberg_mu(), adjoint_rho(), space)
    # bracket block: (e1,0).(e2,0) = (e3,0)
    assert total.value((0, 1)) == {2: rat(1)}
    # action block: (e1,0).(0,e2) = (0, [e1,e2]) = (0,e3)
    assert total.value((0, 4)) == {5: rat(1)}
    # second argument's first component never acts
    assert total.value((3, 1)) == {}
    assert total.value((3, 4)) == {}


def test_horizontal_lift_vanishes_off_signature():
    space = SumSpace((3, 3))
    lifted = horizontal_lift(adjoint_rho(), (0, 1), 1, space)
    for key in itertools.product(range(6), repeat=2):
        comp = (0 if key[0] < 3 else 1, 0 if key[1] < 3 else 1)
        if comp != (0, 1):
            assert lifted.value(key) == {}


def test_mc_characterizations():
    space = SumSpace((3, 3))
    assert mc_check_lierep(heisenberg_mu(), adjoint_rho(), space)
    # perturb the action so it is no longer a homomorphism into derivations
    bad = adjoint_rho() + MultilinearMap((3, 3), 3, {(2, 0): {0: rat(1)}}, 0)
    assert not mc_check_lierep(heisenberg_mu(), bad, space)

    # [a,a] = b : Leibniz but not Lie
    sq = MultilinearMap((2, 2), 2, {(0, 0): {1: rat(1)}}, 0)
    assert mc_check_leibniz(sq)
    assert leibnizator(sq).is_zero()
    bad_sq = MultilinearMap((2, 2), 2, {(0, 0): {1: rat(1)}, (1, 1): {0: rat(1)}}, 0)
    assert not mc_check_leibniz(bad_sq)


def test_mc_lierep_requires_alternating():
    space = SumSpace((3, 3))
    mu_tensor = heisenberg_mu().as_tensor()
    try:
        mc_check_lierep(mu_tensor, adjoint_rho(), space)
    except SignatureMismatch:
        pass
    else:
        raise AssertionError("expected SignatureMismatch")


def test_apply_to_vectors_and_from_matrix():
    f = MultilinearMap.from_matrix([[1, 2], [0, "1/2"]])
    assert f.value((1,)) == {0: rat(2), 1: Fraction(1, 2)}
    mu = heisenberg_mu()
    # bilinearity: mu(e0 + 2 e1, e1) = mu(e0,e1) = e2
    out = apply_to_vectors(mu, [{0: rat(1), 1: rat(2)}, {1: rat(1)}])
    assert out == {2: rat(1)}


def test_sum_space_bookkeeping():
    space = SumSpace((2, 3))
    assert space.total == 5
    assert space.offset(1) == 2
    assert space.block_of(0) == (0, 0)
    assert space.block_of(4) == (1, 2)
    assert space.include(1, {0: rat(7)}) == {2: rat(7)}
