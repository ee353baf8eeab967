"""Validated factorizations of a finite set, chimera splicing, enumeration.

A factorization of a set is a collection of nontrivial partitions such that
picking one block from each partition pins down exactly one element, which
makes the set a product of its factors.  The chimera function splices two
elements along a subset of factors and is the O(dim) inner loop behind every
generation, history, and orthogonality check, so coordinate and inverse
tables are precomputed at validation time.

Factor subsets are integer bitmasks over the canonical (sorted) factor
order; bit ``j`` stands for ``factors[j]``.
"""

from __future__ import annotations

import itertools
import math
from typing import Iterable, Iterator, Mapping, Sequence

from .partitions import GroundSet, Partition, ValidationError, format_partition


def iter_bits(mask: int) -> Iterator[int]:
    """Indices of the set bits, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class FactoredSet:
    """A ground set together with a validated factorization.

    Construction performs the full validation: every factor is a nontrivial
    partition of the whole ground set, the block counts multiply to the set
    size, and the coordinate map (element to its block in each factor) is
    injective.  Injectivity plus the cardinality product makes it a
    bijection, which is exactly the factorization property.

    Instances are immutable after construction and safe to share; the two
    internal caches are keyed by their query values and idempotent.
    """

    __slots__ = (
        "ground",
        "factors",
        "coords",
        "_strides",
        "_codes",
        "_contribs",
        "_inverse",
        "_mask_bits",
        "_hash",
        "_history_cache",
        "_irr_cache",
    )

    def __init__(self, ground: GroundSet, factors: Iterable[Partition]):
        facs = sorted(set(factors), key=lambda p: p.key)
        full = tuple(range(ground.n))
        for p in facs:
            if p.ground != ground or p.domain != full:
                raise ValidationError(
                    "factors must be partitions of the full ground set"
                )
            if p.block_count == 1:
                raise ValidationError(f"trivial factor {format_partition(p)}")
        sizes = [p.block_count for p in facs]
        total = math.prod(sizes)
        if total != ground.n:
            raise ValidationError(
                f"factor block counts {sizes} multiply to {total}, "
                f"not the set size {ground.n}"
            )
        self.ground = ground
        self.factors = tuple(facs)
        d = len(facs)
        strides = [0] * d
        acc = 1
        for j in reversed(range(d)):
            strides[j] = acc
            acc *= sizes[j]
        coords = []
        codes = []
        contribs = []
        inverse = [-1] * total
        for s in range(ground.n):
            cs = tuple(p.block_ids[s] for p in facs)
            contrib = tuple(cs[j] * strides[j] for j in range(d))
            code = sum(contrib)
            if inverse[code] != -1:
                raise ValidationError(
                    f"elements {ground.label(inverse[code])} and {ground.label(s)} "
                    "agree on every factor"
                )
            inverse[code] = s
            coords.append(cs)
            codes.append(code)
            contribs.append(contrib)
        self.coords = tuple(coords)
        self._strides = tuple(strides)
        self._codes = tuple(codes)
        self._contribs = tuple(contribs)
        self._inverse = inverse
        self._mask_bits: dict[int, tuple[int, ...]] = {}
        self._hash: int | None = None
        self._history_cache: dict[Partition, int] = {}
        self._irr_cache: dict[frozenset[int], tuple[int, ...]] = {}

    # -- basics -------------------------------------------------------------

    @property
    def size(self) -> int:
        return self.ground.n

    @property
    def dim(self) -> int:
        return len(self.factors)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.factors)) - 1

    def mask_indices(self, mask: int) -> tuple[int, ...]:
        got = self._mask_bits.get(mask)
        if got is None:
            got = self._mask_bits[mask] = tuple(iter_bits(mask))
        return got

    def mask_of(self, factors: Iterable[Partition]) -> int:
        """Bitmask for a collection of factor partitions."""
        index = {p: j for j, p in enumerate(self.factors)}
        mask = 0
        for p in factors:
            try:
                mask |= 1 << index[p]
            except KeyError:
                raise ValidationError(f"{format_partition(p)} is not a factor") from None
        return mask

    def factors_of_mask(self, mask: int) -> tuple[Partition, ...]:
        return tuple(self.factors[j] for j in self.mask_indices(mask))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, FactoredSet)
            and self.ground == other.ground
            and self.factors == other.factors
        )

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = self._hash = hash((self.ground, self.factors))
        return h

    def __repr__(self) -> str:
        facs = ", ".join(format_partition(p) for p in self.factors)
        return f"FactoredSet(n={self.size}, factors=[{facs}])"

    # -- chimera ------------------------------------------------------------

    def chimera(self, assignment: Sequence[int] | Mapping[Partition, int]) -> int:
        """The unique element agreeing with the assignment on every factor.

        ``assignment`` gives one (representative) element per factor, either
        positionally or keyed by the factor partitions; totality of the
        result is the factorization property itself.
        """
        if isinstance(assignment, Mapping):
            assignment = [assignment[p] for p in self.factors]
        if len(assignment) != self.dim:
            raise ValidationError("assignment must name one element per factor")
        code = 0
        for j, s in enumerate(assignment):
            code += self._contribs[s][j]
        return self._inverse[code]

    def chimera_pair(self, mask: int, s: int, t: int) -> int:
        """Element taking its blocks from ``s`` inside ``mask`` and from ``t`` outside."""
        code = self._codes[t]
        cs = self._contribs[s]
        ct = self._contribs[t]
        for j in self.mask_indices(mask):
            code += cs[j] - ct[j]
        return self._inverse[code]

    def chimera_set(
        self, mask: int, left: Iterable[int], right: Iterable[int]
    ) -> frozenset[int]:
        """Set lift: all splices of an element of ``left`` with one of ``right``."""
        right = list(right)
        return frozenset(
            self.chimera_pair(mask, s, t) for s in left for t in right
        )


def trivial_factorization(ground: GroundSet) -> FactoredSet:
    """The unique factorization every set has.

    One-element sets get the empty basis; everything else (including the
    empty set) gets the discrete partition as the single factor.
    """
    if ground.n == 1:
        return FactoredSet(ground, [])
    return FactoredSet(ground, [Partition.discrete(ground)])


def factor_size_multisets(n: int) -> list[tuple[int, ...]]:
    """Nondecreasing tuples of integers >= 2 with product ``n`` (``n >= 2``)."""
    out: list[tuple[int, ...]] = []

    def rec(remaining: int, minimum: int, acc: list[int]) -> None:
        for k in range(minimum, remaining + 1):
            if remaining % k:
                continue
            if k == remaining:
                out.append(tuple(acc + [k]))
            else:
                rec(remaining // k, k, acc + [k])

    rec(n, 2, [])
    return out


def _iter_grids(n: int, ks: tuple[int, ...]) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Canonical coordinate grids: one per factorization with block counts ``ks``.

    A grid assigns each element ``s`` a coordinate row over the columns
    ``ks``; column ``j`` then partitions the elements by their ``j``-th
    coordinate.  Rows are filled in element order under three constraints:

    * each column is a restricted-growth string (quotients out relabeling
      of the blocks within a factor),
    * adjacent columns with equal block counts are lexicographically
      increasing (quotients out reordering of same-size factors; ties may
      persist in a prefix and are resolved by the first differing row),
    * rows are pairwise distinct (the coordinate map must be injective; with
      all labels in range and the product equal to ``n``, distinct rows make
      it a bijection).

    Pruning keeps the walk near-linear in the output: a column label may
    appear at most ``n / k`` times, and every column must still be able to
    reach all of its labels in the remaining rows.
    """
    d = len(ks)
    caps = [n // k for k in ks]
    strides = [0] * d
    acc = 1
    for j in reversed(range(d)):
        strides[j] = acc
        acc *= ks[j]
    first = (0,) * d
    rows: list[tuple[int, ...]] = [first]
    used = {0}
    maxlab = [0] * d
    counts = [[0] * k for k in ks]
    for j in range(d):
        counts[j][0] = 1
    tie0 = tuple(ks[i] == ks[i + 1] for i in range(d - 1))

    def rec(r: int, tie: tuple[bool, ...]) -> Iterator[tuple[tuple[int, ...], ...]]:
        if r == n:
            yield tuple(rows)
            return
        left_after = n - r - 1
        ranges = [range(min(maxlab[j] + 1, ks[j] - 1) + 1) for j in range(d)]
        for vec in itertools.product(*ranges):
            ok = True
            for i in range(d - 1):
                if tie[i] and vec[i] > vec[i + 1]:
                    ok = False
                    break
            if not ok:
                continue
            code = 0
            for j in range(d):
                v = vec[j]
                if counts[j][v] >= caps[j]:
                    ok = False
                    break
                code += v * strides[j]
            if not ok or code in used:
                continue
            newmax = [maxlab[j] if vec[j] <= maxlab[j] else vec[j] for j in range(d)]
            for j in range(d):
                if ks[j] - 1 - newmax[j] > left_after:
                    ok = False
                    break
            if not ok:
                continue
            oldmax = maxlab[:]
            for j in range(d):
                counts[j][vec[j]] += 1
                maxlab[j] = newmax[j]
            used.add(code)
            rows.append(vec)
            newtie = tuple(
                tie[i] and vec[i] == vec[i + 1] for i in range(d - 1)
            )
            yield from rec(r + 1, newtie)
            rows.pop()
            used.discard(code)
            for j in range(d):
                counts[j][vec[j]] -= 1
            maxlab[:] = oldmax

    yield from rec(1, tie0)


def grid_factored_set(n: int, ks: Sequence[int], labels=None) -> FactoredSet:
    """The mixed-radix reference factorization with block counts ``ks``.

    Element ``s`` has coordinate ``(s // stride_j) % ks[j]`` in factor ``j``.
    Every factorization with the same block-count multiset is a ground-set
    relabeling of this one.
    """
    ground = GroundSet(n, labels)
    if not ks:
        return FactoredSet(ground, [])
    d = len(ks)
    strides = [0] * d
    acc = 1
    for j in reversed(range(d)):
        strides[j] = acc
        acc *= ks[j]
    full = tuple(range(n))
    factors = [
        Partition(ground, full, tuple((s // strides[j]) % ks[j] for s in full))
        for j in range(d)
    ]
    return FactoredSet(ground, factors)


def enumerate_factorizations(n: int) -> Iterator[FactoredSet]:
    """Every factorization of ``{0..n-1}``, each exactly once, fixed order."""
    ground = GroundSet(n)
    if n == 0:
        yield FactoredSet(ground, [Partition.empty(ground)])
        return
    if n == 1:
        yield FactoredSet(ground, [])
        return
    full = tuple(range(n))
    for ks in factor_size_multisets(n):
        d = len(ks)
        for rows in _iter_grids(n, ks):
            factors = [
                Partition(ground, full, tuple(row[j] for row in rows))
                for j in range(d)
            ]
            yield FactoredSet(ground, factors)


def count_factorizations(n: int) -> int:
    """Number of factorizations of an n-element set, counted by enumeration."""
    if n < 2:
        return 1
    return sum(
        sum(1 for _ in _iter_grids(n, ks)) for ks in factor_size_multisets(n)
    )
