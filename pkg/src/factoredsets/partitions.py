"""Ground sets, partitions, and the refinement order.

Elements are dense integer indices ``0..n-1``; display labels are purely
cosmetic and never affect equality.  A partition carries an explicit
``domain``, so the same type covers partitions of the whole ground set and
partitions of a subset ("subpartitions"); a plain partition is the
domain-equals-ground special case.

Canonical form is the restricted-growth labeling: the block of the smallest
domain element is block 0, and each further block id first appears in order
of its smallest member.  Two partitions are equal exactly when their domains
and block-id sequences are equal, which makes values hashable and cheap to
deduplicate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping


class ValidationError(ValueError):
    """A value failed its structural invariants."""


@dataclass(frozen=True)
class GroundSet:
    """A finite set of elements ``0..n-1`` with optional distinct labels."""

    n: int
    labels: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValidationError(f"ground set size must be >= 0, got {self.n}")
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))
            if len(self.labels) != self.n:
                raise ValidationError(
                    f"expected {self.n} labels, got {len(self.labels)}"
                )
            if len(set(self.labels)) != self.n:
                raise ValidationError("labels must be distinct")

    @cached_property
    def _label_index(self) -> dict[str, int]:
        return {lab: i for i, lab in enumerate(self.labels or ())}

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels is not None else str(i)

    def index_of(self, token: str) -> int:
        """Resolve a display token, a label if declared, else a decimal index."""
        if self.labels is not None:
            try:
                return self._label_index[token]
            except KeyError:
                raise ValidationError(f"unknown element {token!r}") from None
        try:
            i = int(token)
        except ValueError:
            raise ValidationError(f"unknown element {token!r}") from None
        if not 0 <= i < self.n:
            raise ValidationError(f"element index {i} out of range 0..{self.n - 1}")
        return i

    def elements(self) -> range:
        return range(self.n)


@dataclass(frozen=True)
class Partition:
    """A partition of a subset of a ground set, in canonical form.

    ``domain`` is strictly increasing, ``block_ids[i]`` is the block id of
    ``domain[i]``, and ids follow the restricted-growth convention.  Use the
    classmethod constructors; the raw constructor only checks that the
    canonical-form invariants hold.
    """

    ground: GroundSet
    domain: tuple[int, ...]
    block_ids: tuple[int, ...]

    def __post_init__(self) -> None:
        dom, ids = self.domain, self.block_ids
        if len(dom) != len(ids):
            raise ValidationError("domain and block ids differ in length")
        prev = -1
        seen = 0
        for e, b in zip(dom, ids):
            if e <= prev or not 0 <= e < self.ground.n:
                raise ValidationError("domain must be strictly increasing and in range")
            prev = e
            if b > seen or b < 0:
                raise ValidationError("block ids must be in restricted-growth order")
            if b == seen:
                seen += 1

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_blocks(
        cls, ground: GroundSet, blocks: Iterable[Iterable[int]]
    ) -> "Partition":
        """Canonicalize explicit blocks; the domain is their union.

        Rejects empty blocks, out-of-range elements, and overlaps, naming the
        offending block.
        """
        owner: dict[int, int] = {}
        for bi, block in enumerate(blocks):
            block = list(block)
            if not block:
                raise ValidationError(f"block #{bi} is empty")
            for e in block:
                if not 0 <= e < ground.n:
                    raise ValidationError(
                        f"block #{bi} contains out-of-range element {e!r}"
                    )
                if e in owner:
                    raise ValidationError(
                        f"blocks #{owner[e]} and #{bi} overlap at element "
                        f"{ground.label(e)}"
                    )
                owner[e] = bi
        return cls.from_block_of(ground, owner)

    @classmethod
    def from_block_of(cls, ground: GroundSet, owner: Mapping[int, int]) -> "Partition":
        """Canonicalize an element-to-block-key map (keys may be anything hashable)."""
        domain = tuple(sorted(owner))
        relabel: dict[object, int] = {}
        ids = [relabel.setdefault(owner[e], len(relabel)) for e in domain]
        return cls(ground, domain, tuple(ids))

    @classmethod
    def discrete(cls, ground: GroundSet) -> "Partition":
        """All-singletons partition of the full ground set."""
        n = ground.n
        return cls(ground, tuple(range(n)), tuple(range(n)))

    @classmethod
    def indiscrete(cls, ground: GroundSet) -> "Partition":
        """One-block partition of the full ground set (no blocks when empty)."""
        n = ground.n
        return cls(ground, tuple(range(n)), (0,) * n)

    @classmethod
    def empty(cls, ground: GroundSet) -> "Partition":
        """The unique partition of the empty subset."""
        return cls(ground, (), ())

    # -- views ------------------------------------------------------------

    @cached_property
    def block_of(self) -> dict[int, int]:
        return dict(zip(self.domain, self.block_ids))

    @cached_property
    def block_count(self) -> int:
        return max(self.block_ids, default=-1) + 1

    @cached_property
    def blocks(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.block_count)]
        for e, b in zip(self.domain, self.block_ids):
            out[b].append(e)
        return tuple(tuple(b) for b in out)

    @cached_property
    def block_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(b) for b in self.blocks)

    @cached_property
    def domain_set(self) -> frozenset[int]:
        return frozenset(self.domain)

    @property
    def is_full(self) -> bool:
        return len(self.domain) == self.ground.n

    @property
    def is_trivial(self) -> bool:
        return self.block_count == 1

    def same_block(self, a: int, b: int) -> bool:
        return self.block_of[a] == self.block_of[b]

    def block_containing(self, e: int) -> frozenset[int]:
        return self.block_sets[self.block_of[e]]

    @property
    def key(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Total-order key among partitions of one ground set."""
        return (self.domain, self.block_ids)

    # -- operations ---------------------------------------------------------

    def refines(self, other: "Partition") -> bool:
        """True when being together in ``self`` implies together in ``other``."""
        if self.ground != other.ground or self.domain != other.domain:
            raise ValidationError("refinement compares partitions of one domain")
        image: dict[int, int] = {}
        for mine, theirs in zip(self.block_ids, other.block_ids):
            known = image.setdefault(mine, theirs)
            if known != theirs:
                return False
        return True

    def restrict(self, elements: Iterable[int]) -> "Partition":
        """Partition of a subset: intersect blocks, drop empty intersections."""
        sub = sorted(set(elements))
        block_of = self.block_of
        try:
            owner = {e: block_of[e] for e in sub}
        except KeyError as exc:
            raise ValidationError(
                f"element {exc.args[0]!r} is outside the partition domain"
            ) from None
        return Partition.from_block_of(self.ground, owner)

    def __str__(self) -> str:
        return format_partition(self)


def common_refinement(
    parts: Iterable[Partition],
    *,
    ground: GroundSet | None = None,
    domain: Iterable[int] | None = None,
) -> Partition:
    """Coarsest partition finer than every input.

    The empty collection yields the indiscrete partition, which is why
    ``ground`` (and optionally ``domain``) must be supplied in that case.
    """
    parts = list(parts)
    if not parts:
        if ground is None:
            raise ValidationError("empty collection needs an explicit ground set")
        dom = tuple(ground.elements()) if domain is None else tuple(sorted(set(domain)))
        return Partition(ground, dom, (0,) * len(dom))
    first = parts[0]
    for p in parts[1:]:
        if p.ground != first.ground or p.domain != first.domain:
            raise ValidationError("common refinement requires matching domains")
    if len(parts) == 1:
        return first
    maps = [p.block_of for p in parts]
    owner = {e: tuple(m[e] for m in maps) for e in first.domain}
    return Partition.from_block_of(first.ground, owner)


def iter_partitions(
    ground: GroundSet, domain: Iterable[int] | None = None
) -> Iterator[Partition]:
    """All partitions of a domain, in restricted-growth (lexicographic) order."""
    dom = tuple(ground.elements()) if domain is None else tuple(sorted(set(domain)))
    k = len(dom)
    if k == 0:
        yield Partition(ground, (), ())
        return
    ids = [0] * k

    def rec(i: int, used: int) -> Iterator[Partition]:
        if i == k:
            yield Partition(ground, dom, tuple(ids))
            return
        for b in range(used + 1):
            ids[i] = b
            yield from rec(i + 1, used + (1 if b == used else 0))

    yield from rec(1, 1)


def iter_coarsenings(part: Partition) -> Iterator[Partition]:
    """All partitions coarser than ``part`` (by merging its blocks)."""
    k = part.block_count
    dummy = GroundSet(k)
    for grouping in iter_partitions(dummy):
        group_of = grouping.block_of
        owner = {e: group_of[b] for e, b in zip(part.domain, part.block_ids)}
        yield Partition.from_block_of(part.ground, owner)


def bell_number(n: int) -> int:
    """Number of partitions of an n-element set."""
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
    return row[0]


# -- text syntax -----------------------------------------------------------
#
# ``{ a b | c d | e }`` with whitespace-separated element tokens, ``_`` for
# the indiscrete partition and ``!`` for the discrete one.


def parse_partition(
    text: str, ground: GroundSet, *, domain: Iterable[int] | None = None
) -> Partition:
    """Parse the block syntax against a ground set's labels or indices."""
    stripped = text.strip()
    if stripped == "_":
        if domain is None:
            return Partition.indiscrete(ground)
        dom = tuple(sorted(set(domain)))
        return Partition(ground, dom, (0,) * len(dom))
    if stripped == "!":
        if domain is None:
            return Partition.discrete(ground)
        dom = tuple(sorted(set(domain)))
        return Partition(ground, dom, tuple(range(len(dom))))
    if not (stripped.startswith("{") and stripped.endswith("}")):
        raise ValidationError(f"expected '{{ ... }}', '_' or '!', got {text!r}")
    inner = stripped[1:-1]
    blocks: list[list[int]] = []
    for chunk in inner.split("|"):
        tokens = chunk.split()
        if not tokens:
            if inner.strip():
                raise ValidationError(f"empty block in {text!r}")
            continue
        blocks.append([ground.index_of(tok) for tok in tokens])
    return Partition.from_blocks(ground, blocks)


def format_partition(part: Partition) -> str:
    """Canonical text form; full-domain indiscrete and discrete shrink to _ / !."""
    if part.is_full:
        n = part.ground.n
        if part.block_count <= 1:
            return "_"
        if part.block_count == n:
            return "!"
    label = part.ground.label
    body = " | ".join(" ".join(label(e) for e in block) for block in part.blocks)
    return "{ " + body + " }" if body else "{ }"
