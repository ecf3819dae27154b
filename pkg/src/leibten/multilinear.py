"""Sparse multilinear maps on fixed bases, insertion composition, and the
graded commutator bracket on the tower of multilinear cochains.

A map of arity n is stored as a table from input basis tuples (0-based) to
sparse output vectors.  Maps may declare an alternating prefix: entries are
stored only on strictly increasing prefix tuples, and evaluation expands the
sign / kills repeats.  All arithmetic is exact (fractions).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .errors import DimensionMismatch, SignatureMismatch, SlotOutOfRange
from .exactlin import ONE, Rational, rat
from .tensorbasis import perm_sign, shuffles, sort_with_sign

OutVec = dict[int, Rational]
Table = dict[tuple[int, ...], OutVec]


def _clean(vec: Mapping[int, Rational]) -> OutVec:
    return {i: rat(c) for i, c in vec.items() if c != 0}


@dataclass
class MultilinearMap:
    """Multilinear map  (slot_0 x ... x slot_{n-1}) -> out  by structure constants.

    dims_in lists each input slot's dimension; dim_out the target's.  `wedge`
    is the length of the alternating prefix (those slots must share a
    dimension and keys are stored with strictly increasing prefix).
    """

    dims_in: tuple[int, ...]
    dim_out: int
    coeffs: Table = field(default_factory=dict)
    wedge: int = 0

    def __post_init__(self) -> None:
        self.dims_in = tuple(self.dims_in)
        if self.wedge < 0 or self.wedge > len(self.dims_in):
            raise SlotOutOfRange(f"wedge prefix {self.wedge} out of range")
        if self.wedge and len(set(self.dims_in[: self.wedge])) > 1:
            raise SignatureMismatch("alternating slots must share a dimension")
        canonical: Table = {}
        for key, vec in self.coeffs.items():
            key = tuple(key)
            if len(key) != self.arity:
                raise SignatureMismatch(f"key {key} has wrong arity")
            for slot, idx in enumerate(key):
                if not 0 <= idx < self.dims_in[slot]:
                    raise SlotOutOfRange(f"index {idx} in slot {slot}")
            ckey, sign = self._canonical_key(key)
            if sign == 0:
                continue
            acc = canonical.setdefault(ckey, {})
            for i, c in vec.items():
                if not 0 <= i < self.dim_out:
                    raise SlotOutOfRange(f"output index {i}")
                acc[i] = acc.get(i, rat(0)) + sign * rat(c)
        self.coeffs = {k: _clean(v) for k, v in canonical.items()}
        self.coeffs = {k: v for k, v in self.coeffs.items() if v}

    @property
    def arity(self) -> int:
        return len(self.dims_in)

    def _canonical_key(self, key: tuple[int, ...]) -> tuple[tuple[int, ...], int]:
        if not self.wedge:
            return key, 1
        prefix, sign = sort_with_sign(key[: self.wedge])
        return prefix + key[self.wedge :], sign

    def value(self, key: Sequence[int]) -> OutVec:
        """Sparse output vector on a basis input tuple (sign-expanding the prefix)."""
        ckey, sign = self._canonical_key(tuple(key))
        if sign == 0:
            return {}
        vec = self.coeffs.get(ckey, {})
        if sign == 1:
            return dict(vec)
        return {i: -c for i, c in vec.items()}

    def entry(self, key: Sequence[int], out: int) -> Rational:
        return self.value(key).get(out, rat(0))

    # --- linear structure -------------------------------------------------

    def _check_same_shape(self, other: "MultilinearMap") -> None:
        if self.dims_in != other.dims_in or self.dim_out != other.dim_out:
            raise DimensionMismatch("map shapes differ")

    def __add__(self, other: "MultilinearMap") -> "MultilinearMap":
        self._check_same_shape(other)
        if self.wedge == other.wedge:
            table: Table = {k: dict(v) for k, v in self.coeffs.items()}
            for k, vec in other.coeffs.items():
                acc = table.setdefault(k, {})
                for i, c in vec.items():
                    acc[i] = acc.get(i, rat(0)) + c
            return MultilinearMap(self.dims_in, self.dim_out, table, self.wedge)
        # differing alternation: expand both to plain tensor tables
        return self.as_tensor() + other.as_tensor()

    def __sub__(self, other: "MultilinearMap") -> "MultilinearMap":
        return self + other.scale(-1)

    def scale(self, c) -> "MultilinearMap":
        c = rat(c)
        table = {k: {i: c * x for i, x in v.items()} for k, v in self.coeffs.items()}
        return MultilinearMap(self.dims_in, self.dim_out, table, self.wedge)

    def __neg__(self) -> "MultilinearMap":
        return self.scale(-1)

    def as_tensor(self) -> "MultilinearMap":
        """Forget the alternating storage: same map, plain tensor table."""
        if not self.wedge:
            return MultilinearMap(self.dims_in, self.dim_out, self.coeffs, 0)
        table: Table = {}
        for key in itertools.product(*(range(d) for d in self.dims_in)):
            vec = self.value(key)
            if vec:
                table[key] = vec
        return MultilinearMap(self.dims_in, self.dim_out, table, 0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultilinearMap):
            return NotImplemented
        if self.dims_in != other.dims_in or self.dim_out != other.dim_out:
            return False
        if self.wedge == other.wedge:
            return self.coeffs == other.coeffs
        return self.as_tensor().coeffs == other.as_tensor().coeffs

    # --- construction helpers ---------------------------------------------

    @staticmethod
    def zero(dims_in: Sequence[int], dim_out: int, wedge: int = 0) -> "MultilinearMap":
        return MultilinearMap(tuple(dims_in), dim_out, {}, wedge)

    @staticmethod
    def from_function(
        dims_in: Sequence[int],
        dim_out: int,
        fn: Callable[[tuple[int, ...]], Mapping[int, Rational]],
        wedge: int = 0,
    ) -> "MultilinearMap":
        """Tabulate fn over canonical basis tuples (increasing alternating prefix)."""
        dims_in = tuple(dims_in)
        table: Table = {}
        prefix_dim = dims_in[0] if wedge else 0
        prefixes = (
            itertools.combinations(range(prefix_dim), wedge) if wedge else [()]
        )
        tails = list(itertools.product(*(range(d) for d in dims_in[wedge:])))
        for p in prefixes:
            for t in tails:
                key = p + t
                vec = _clean(fn(key))
                if vec:
                    table[key] = vec
        return MultilinearMap(dims_in, dim_out, table, wedge)

    @staticmethod
    def from_matrix(rows: Sequence[Sequence[object]]) -> "MultilinearMap":
        """Arity-1 map from a dense matrix (rows = output coordinates)."""
        dim_out = len(rows)
        dim_in = len(rows[0]) if rows else 0
        table: Table = {}
        for j in range(dim_in):
            vec = {i: rat(rows[i][j]) for i in range(dim_out) if rat(rows[i][j]) != 0}
            if vec:
                table[(j,)] = vec
        return MultilinearMap((dim_in,), dim_out, table, 0)


def apply_to_vectors(
    f: MultilinearMap, vectors: Sequence[Mapping[int, Rational]]
) -> OutVec:
    """Evaluate on sparse coordinate vectors (multilinear expansion)."""
    if len(vectors) != f.arity:
        raise SignatureMismatch("wrong number of arguments")
    out: OutVec = {}
    for combo in itertools.product(*(v.items() for v in vectors)):
        key = tuple(i for i, _ in combo)
        weight = ONE
        for _, c in combo:
            weight *= c
        if weight == 0:
            continue
        for i, c in f.value(key).items():
            out[i] = out.get(i, rat(0)) + weight * c
    return _clean(out)


# --- sum spaces -------------------------------------------------------------


@dataclass(frozen=True)
class SumSpace:
    """A direct sum with block offsets; component 0 first."""

    dims: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.dims)

    def offset(self, component: int) -> int:
        return sum(self.dims[:component])

    def block_of(self, index: int) -> tuple[int, int]:
        """(component, local index) of a global basis index."""
        for c, d in enumerate(self.dims):
            if index < d:
                return c, index
            index -= d
        raise SlotOutOfRange(f"index {index} beyond sum space")

    def include(self, component: int, vec: Mapping[int, Rational]) -> OutVec:
        off = self.offset(component)
        return {off + i: c for i, c in vec.items()}


def horizontal_lift(
    f: MultilinearMap,
    in_components: Sequence[int],
    out_component: int,
    space: SumSpace,
) -> MultilinearMap:
    """Extend a block map to the whole sum by zero off its block signature.

    The lifted map eats global basis indices; a slot whose index falls outside
    the declared component annihilates the whole value.
    """
    if len(in_components) != f.arity:
        raise SignatureMismatch("component signature has wrong arity")
    for slot, comp in enumerate(in_components):
        if space.dims[comp] != f.dims_in[slot]:
            raise DimensionMismatch(
                f"slot {slot}: component dim {space.dims[comp]} != {f.dims_in[slot]}"
            )
    if space.dims[out_component] != f.dim_out:
        raise DimensionMismatch("output component dimension mismatch")

    total = space.total

    def lifted(key: tuple[int, ...]) -> OutVec:
        local = []
        for idx, comp in zip(key, in_components):
            c, loc = space.block_of(idx)
            if c != comp:
                return {}
            local.append(loc)
        return space.include(out_component, f.value(tuple(local)))

    return MultilinearMap.from_function((total,) * f.arity, total, lifted, 0)


def hemisemidirect(
    mu: MultilinearMap, rho: MultilinearMap, space: SumSpace
) -> MultilinearMap:
    """Bracket on the sum:  (x,u) . (y,v) = (mu(x,y), rho(x)v)."""
    if mu.arity != 2 or rho.arity != 2:
        raise SignatureMismatch("binary structure maps expected")
    return horizontal_lift(mu, (0, 0), 0, space) + horizontal_lift(
        rho, (0, 1), 1, space
    )


# --- insertion composition and the commutator bracket -----------------------


def _require_uniform(f: MultilinearMap) -> int:
    dims = set(f.dims_in) | {f.dim_out}
    if len(dims) != 1:
        raise SignatureMismatch("bracket calculus needs one underlying space")
    return f.dim_out


def compose_at(p: MultilinearMap, k: int, q: MultilinearMap) -> MultilinearMap:
    """Insert q at slot k (1-based) of p, shuffling q's leading inputs left.

    With p of arity m+1 and q of arity n+1 the result has arity m+n+1 and value

        sum over (k-1,n)-shuffles s of
          (-1)^((k-1) n) sgn(s) p(z_{s(1)},...,z_{s(k-1)},
                                  q(z_{s(k)},...,z_{s(k+n-1)}, z_{k+n}),
                                  z_{k+n+1},...,z_{m+n+1}).
    """
    dim = _require_uniform(p)
    if dim != _require_uniform(q):
        raise DimensionMismatch("maps live on different spaces")
    if not 1 <= k <= p.arity:
        raise SlotOutOfRange(f"slot {k} of arity-{p.arity} map")
    m = k - 1  # inputs of p before the insertion slot
    n = q.arity - 1  # shuffled inputs of q
    arity = p.arity + q.arity - 1
    block_sign = -1 if (m * n) % 2 else 1
    if q.arity == 0:
        # inserting a constant: feed q's value into slot k, no shuffle sum
        base = q.value(())
        table0: Table = {}
        for p_key, p_vec in p.as_tensor().coeffs.items():
            c0 = base.get(p_key[m])
            if not c0:
                continue
            z0 = p_key[:m] + p_key[m + 1 :]
            acc = table0.setdefault(z0, {})
            for i, c in p_vec.items():
                acc[i] = acc.get(i, rat(0)) + c0 * c
        return MultilinearMap((dim,) * arity, dim, table0, 0)
    shs = shuffles(m, n)

    # scatter over stored entries: for each pair of table entries whose middle
    # index matches, un-shuffle the arguments back into result positions
    p_tensor = p.as_tensor()
    q_tensor = q.as_tensor()
    by_mid: dict[int, list[tuple[tuple[int, ...], OutVec]]] = {}
    for p_key, p_vec in p_tensor.coeffs.items():
        by_mid.setdefault(p_key[m], []).append((p_key, p_vec))

    table: Table = {}
    for q_key, q_vec in q_tensor.coeffs.items():
        for mid, c0 in q_vec.items():
            for p_key, p_vec in by_mid.get(mid, ()):
                for sh in shs:
                    z = [0] * arity
                    for i in range(m):
                        z[sh.perm[i]] = p_key[i]
                    for j in range(n):
                        z[sh.perm[m + j]] = q_key[j]
                    z[m + n] = q_key[n]
                    z[m + n + 1 :] = p_key[m + 1 :]
                    sign = block_sign * sh.sign
                    acc = table.setdefault(tuple(z), {})
                    for i, c in p_vec.items():
                        acc[i] = acc.get(i, rat(0)) + sign * c0 * c
    return MultilinearMap((dim,) * arity, dim, table, 0)


def circ_bar(p: MultilinearMap, q: MultilinearMap) -> MultilinearMap:
    """Sum of insertions of q over every slot of p."""
    if p.arity == 0:
        if q.arity == 0:
            raise SignatureMismatch("cannot insert a constant into a constant")
        dim = _require_uniform(p)
        return MultilinearMap.zero((dim,) * (q.arity - 1), dim)
    if q.arity == 0:
        # a constant feeds through the first slot only; summing over every
        # slot would double-count under antisymmetry of the host bracket
        return compose_at(p, 1, q)
    total = compose_at(p, 1, q)
    for k in range(2, p.arity + 1):
        total = total + compose_at(p, k, q)
    return total


def balavoine(p: MultilinearMap, q: MultilinearMap) -> MultilinearMap:
    """Graded commutator  [p,q] = p circbar q - (-1)^(deg p deg q) q circbar p,
    where an arity-(n+1) map has degree n."""
    dp, dq = p.arity - 1, q.arity - 1
    second = circ_bar(q, p)
    if (dp * dq) % 2:
        return circ_bar(p, q) + second
    return circ_bar(p, q) - second


def mc_check_leibniz(omega: MultilinearMap) -> bool:
    """A binary map is a Leibniz bracket iff its self-bracket vanishes."""
    if omega.arity != 2:
        raise SignatureMismatch("binary map expected")
    return balavoine(omega, omega).is_zero()


def leibnizator(omega: MultilinearMap) -> MultilinearMap:
    """om(om(x1,x2),x3) - om(x1,om(x2,x3)) + om(x2,om(x1,x3)); equals half the
    self-bracket of a binary map."""
    if omega.arity != 2:
        raise SignatureMismatch("binary map expected")
    dim = _require_uniform(omega)

    def val(key: tuple[int, ...]) -> OutVec:
        x1, x2, x3 = key
        out: OutVec = {}

        def acc(sign: int, outer_first: dict, last: int, flip: bool):
            for mid, c0 in outer_first.items():
                args = (mid, last) if not flip else (last, mid)
                for i, c in omega.value(args).items():
                    out[i] = out.get(i, rat(0)) + sign * c0 * c

        acc(1, omega.value((x1, x2)), x3, False)
        acc(-1, omega.value((x2, x3)), x1, True)
        acc(1, omega.value((x1, x3)), x2, True)
        return out

    return MultilinearMap.from_function((dim,) * 3, dim, val, 0)


def mc_check_lierep(
    mu: MultilinearMap, rho: MultilinearMap, space: SumSpace
) -> bool:
    """The lifted sum of an alternating binary map and an action candidate is
    square-zero iff the pair is a Lie algebra acting by a representation."""
    if mu.wedge != 2:
        raise SignatureMismatch("the binary map must be alternating")
    total = hemisemidirect(mu, rho, space)
    return mc_check_leibniz(total)
