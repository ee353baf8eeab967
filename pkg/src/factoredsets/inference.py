"""Orthogonality databases, factored-set models, and bounded temporal inference.

A database records asserted conditional orthogonalities and asserted
non-orthogonalities between named partitions of an observation space.  A
model explains the observation space by a factored set together with a
labeling map into it; latent structure lives in elements that share a label.

Temporal inference quantifies over all models consistent with the database,
which is only tractable up to a size bound.  Every verdict therefore carries
its bound: a relation that held in every model found is reported as holding
up to the bound, never as holding outright.

Search space reduction: every factorization with a given multiset of factor
block counts is a ground-set relabeling of the mixed-radix reference grid
with those counts, so the search walks one reference factorization per
multiset and enumerates labelings up to the grid's automorphisms (block
relabelings within a factor composed with swaps of equal-size factors).
Each isomorphism orbit of models is visited exactly once, and every verdict
checked is invariant under relabeling.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Mapping, Sequence

from .factored import FactoredSet, factor_size_multisets, grid_factored_set
from .partitions import (
    GroundSet,
    Partition,
    ValidationError,
    bell_number,
    iter_partitions,
)
from .structure import history, orthogonal

SPECIAL_NAMES = ("_", "!")


@dataclass(frozen=True)
class OrthogonalityDatabase:
    """Named partitions of an observation space plus asserted (non-)orthogonality.

    Triples are ordered name triples ``(x, y, z)`` read as "x and y are
    (not) orthogonal given z"; the special names ``_`` and ``!`` denote the
    indiscrete and discrete partitions without declaration.
    """

    omega: GroundSet
    partitions: Mapping[str, Partition]
    orthogonal_triples: frozenset[tuple[str, str, str]]
    dependent_triples: frozenset[tuple[str, str, str]]

    def __post_init__(self) -> None:
        object.__setattr__(self, "partitions", dict(self.partitions))
        object.__setattr__(
            self, "orthogonal_triples", frozenset(self.orthogonal_triples)
        )
        object.__setattr__(
            self, "dependent_triples", frozenset(self.dependent_triples)
        )
        full = tuple(range(self.omega.n))
        for name, part in self.partitions.items():
            if name in SPECIAL_NAMES:
                raise ValidationError(f"{name!r} is reserved")
            if part.ground != self.omega or part.domain != full:
                raise ValidationError(
                    f"partition {name!r} must cover the whole observation space"
                )
        for triple in self.orthogonal_triples | self.dependent_triples:
            for name in triple:
                self.resolve(name)

    def resolve(self, name: str) -> Partition:
        if name == "_":
            return Partition.indiscrete(self.omega)
        if name == "!":
            return Partition.discrete(self.omega)
        try:
            return self.partitions[name]
        except KeyError:
            raise ValidationError(f"unknown partition name {name!r}") from None

    def resolved_triples(self) -> list[tuple[bool, tuple[str, str, str], tuple[Partition, Partition, Partition]]]:
        """All assertions as (expected-orthogonal, names, partitions)."""
        out = []
        for names in sorted(self.orthogonal_triples):
            out.append((True, names, tuple(self.resolve(n) for n in names)))
        for names in sorted(self.dependent_triples):
            out.append((False, names, tuple(self.resolve(n) for n in names)))
        return out


@dataclass(frozen=True)
class Model:
    """A factored set explaining the observation space through a total labeling."""

    factored: FactoredSet
    labeling: tuple[int, ...]
    omega: GroundSet

    def __post_init__(self) -> None:
        object.__setattr__(self, "labeling", tuple(self.labeling))
        if len(self.labeling) != self.factored.size:
            raise ValidationError("labeling must cover every element")
        if any(not 0 <= w < self.omega.n for w in self.labeling):
            raise ValidationError("labeling target out of range")


def pullback(model: Model, part: Partition) -> Partition:
    """Preimage partition on the model's elements; empty preimages vanish."""
    if part.ground != model.omega or not part.is_full:
        raise ValidationError("pullback needs a full partition of the observation space")
    block_of = part.block_of
    labeling = model.labeling
    owner = {s: block_of[labeling[s]] for s in range(model.factored.size)}
    return Partition.from_block_of(model.factored.ground, owner)


def _satisfies(
    model: Model,
    triples: Sequence[tuple[bool, tuple[str, str, str], tuple[Partition, Partition, Partition]]],
) -> bool:
    fs = model.factored
    pulled: dict[str, Partition] = {}

    def pull(name: str, part: Partition) -> Partition:
        got = pulled.get(name)
        if got is None:
            got = pulled[name] = pullback(model, part)
        return got

    for expected, names, parts in triples:
        x, y, z = (pull(n, p) for n, p in zip(names, parts))
        actual = all(
            orthogonal(fs, x.restrict(zb), y.restrict(zb)) for zb in z.blocks
        )
        if actual != expected:
            return False
    return True


@dataclass(frozen=True)
class TripleVerdict:
    kind: str
    names: tuple[str, str, str]
    expected: bool
    actual: bool

    @property
    def ok(self) -> bool:
        return self.expected == self.actual


@dataclass(frozen=True)
class ModelCheckReport:
    ok: bool
    entries: tuple[TripleVerdict, ...]


def models_database(model: Model, db: OrthogonalityDatabase) -> ModelCheckReport:
    """Check every database assertion against the model, with a per-triple report."""
    if model.omega != db.omega:
        raise ValidationError("model and database observe different spaces")
    fs = model.factored
    pulled: dict[str, Partition] = {}

    def pull(name: str) -> Partition:
        got = pulled.get(name)
        if got is None:
            got = pulled[name] = pullback(model, db.resolve(name))
        return got

    entries = []
    for expected, names, _ in db.resolved_triples():
        x, y, z = (pull(n) for n in names)
        actual = all(
            orthogonal(fs, x.restrict(zb), y.restrict(zb)) for zb in z.blocks
        )
        entries.append(
            TripleVerdict(
                kind="orthogonal" if expected else "dependent",
                names=names,
                expected=expected,
                actual=actual,
            )
        )
    return ModelCheckReport(all(e.ok for e in entries), tuple(entries))


@dataclass(frozen=True)
class SearchBounds:
    """Limits for model search; the wall-clock budget is in seconds."""

    max_size: int
    max_dim: int | None = None
    surjective_only: bool = False
    time_budget: float | None = None

    def __post_init__(self) -> None:
        if self.max_size < 1:
            raise ValidationError("max_size must be at least 1")

    def describe(self) -> str:
        parts = [f"size <= {self.max_size}"]
        if self.max_dim is not None:
            parts.append(f"dim <= {self.max_dim}")
        if self.surjective_only:
            parts.append("surjective labelings only")
        return ", ".join(parts)


@dataclass(frozen=True)
class Truncation:
    """In-stream marker: the search stopped before covering its bounds."""

    reason: str


@lru_cache(maxsize=None)
def _grid_automorphisms(n: int, ks: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    """Ground permutations preserving the reference grid factorization.

    Generated as all combinations of per-factor block relabelings with
    permutations of equal-block-count factor positions.
    """
    d = len(ks)
    strides = [0] * d
    acc = 1
    for j in reversed(range(d)):
        strides[j] = acc
        acc *= ks[j]

    runs: list[list[int]] = []
    for j in range(d):
        if runs and ks[runs[-1][0]] == ks[j]:
            runs[-1].append(j)
        else:
            runs.append([j])

    digits = [
        tuple((s // strides[j]) % ks[j] for j in range(d)) for s in range(n)
    ]
    perms = []
    position_choices = [itertools.permutations(run) for run in runs]
    for placed_runs in itertools.product(*position_choices):
        sigma = [0] * d
        for run, placed in zip(runs, placed_runs):
            for j, target in zip(run, placed):
                sigma[j] = target
        for rhos in itertools.product(
            *(itertools.permutations(range(k)) for k in ks)
        ):
            perm = []
            for s in range(n):
                code = 0
                ds = digits[s]
                for j in range(d):
                    code += rhos[j][ds[j]] * strides[sigma[j]]
                perm.append(code)
            perms.append(tuple(perm))
    return tuple(perms)


def _iter_canonical_labelings(
    n: int, ks: tuple[int, ...], omega_n: int, surjective_only: bool
) -> Iterator[tuple[int, ...]]:
    """Labelings of the reference grid, one per automorphism orbit, lex order."""
    if ks == (n,):
        # Single discrete factor: every ground permutation is an automorphism,
        # so orbits are multisets of labels.
        for f in itertools.combinations_with_replacement(range(omega_n), n):
            if surjective_only and len(set(f)) != omega_n:
                continue
            yield f
        return
    auts = [p for p in _grid_automorphisms(n, ks) if p != tuple(range(n))]
    for f in itertools.product(range(omega_n), repeat=n):
        if surjective_only and len(set(f)) != omega_n:
            continue
        if all(f <= tuple(f[p[s]] for s in range(n)) for p in auts):
            yield f


def search_models(
    db: OrthogonalityDatabase, bounds: SearchBounds
) -> Iterator[Model | Truncation]:
    """All models of the database within bounds, one per relabeling orbit.

    The stream is deterministic: sizes ascend, block-count multisets follow
    the divisor enumeration, labelings are lexicographic.  A trailing
    ``Truncation`` item signals an exhausted time budget.
    """
    deadline = (
        None if bounds.time_budget is None else time.monotonic() + bounds.time_budget
    )
    triples = db.resolved_triples()
    omega_n = db.omega.n
    for n in range(1, bounds.max_size + 1):
        classes: list[tuple[int, ...]] = (
            [()] if n == 1 else factor_size_multisets(n)
        )
        for ks in classes:
            if bounds.max_dim is not None and len(ks) > bounds.max_dim:
                continue
            fs = grid_factored_set(n, ks)
            for f in _iter_canonical_labelings(
                n, ks, omega_n, bounds.surjective_only
            ):
                if deadline is not None and time.monotonic() > deadline:
                    yield Truncation("time budget exceeded")
                    return
                model = Model(fs, f, db.omega)
                if _satisfies(model, triples):
                    yield model


@dataclass(frozen=True)
class InferenceVerdict:
    """Bounded answer to "is X before Y in every model of the database?".

    ``holds-up-to-bound`` never claims unbounded validity; larger models
    could still refute the relation.
    """

    kind: str  # "holds-up-to-bound" | "refuted" | "vacuous"
    strict: bool
    bounds: SearchBounds
    models_checked: int
    counterexample: Model | None = None
    truncated: bool = False

    @property
    def qualifier(self) -> str:
        scope = f"models with {self.bounds.describe()}"
        if self.truncated:
            scope += ", search truncated by time budget"
        return scope


def infer_before(
    db: OrthogonalityDatabase,
    first: str,
    second: str,
    bounds: SearchBounds,
    *,
    strict: bool = True,
) -> InferenceVerdict:
    """Quantify the (strict) before-relation over every model within bounds."""
    x = db.resolve(first)
    y = db.resolve(second)
    checked = 0
    truncated = False
    for item in search_models(db, bounds):
        if isinstance(item, Truncation):
            truncated = True
            break
        checked += 1
        fs = item.factored
        hx = history(fs, pullback(item, x))
        hy = history(fs, pullback(item, y))
        holds = (hx & hy == hx) and (not strict or hx != hy)
        if not holds:
            return InferenceVerdict(
                kind="refuted",
                strict=strict,
                bounds=bounds,
                models_checked=checked,
                counterexample=item,
                truncated=truncated,
            )
    if checked == 0:
        return InferenceVerdict(
            kind="vacuous",
            strict=strict,
            bounds=bounds,
            models_checked=0,
            truncated=truncated,
        )
    return InferenceVerdict(
        kind="holds-up-to-bound",
        strict=strict,
        bounds=bounds,
        models_checked=checked,
        truncated=truncated,
    )


@dataclass(frozen=True)
class ConsistencyVerdict:
    consistent: bool
    bounds: SearchBounds
    witness: Model | None = None
    truncated: bool = False


def is_consistent_up_to_bound(
    db: OrthogonalityDatabase, bounds: SearchBounds
) -> ConsistencyVerdict:
    """Find any model within bounds; a negative answer only rules out the bounds."""
    for item in search_models(db, bounds):
        if isinstance(item, Truncation):
            return ConsistencyVerdict(False, bounds, None, truncated=True)
        return ConsistencyVerdict(True, bounds, witness=item)
    return ConsistencyVerdict(False, bounds)


def is_complete(db: OrthogonalityDatabase, *, max_partitions: int = 52) -> bool:
    """Whether every partition triple of the observation space is asserted.

    Guarded: refuses when the observation space has more partitions than
    ``max_partitions``, since the check enumerates all of them.
    """
    n = db.omega.n
    if bell_number(n) > max_partitions:
        raise ValidationError(
            f"{n} elements have {bell_number(n)} partitions, over the cap "
            f"{max_partitions}"
        )
    asserted = {
        tuple(db.resolve(name) for name in names)
        for names in db.orthogonal_triples | db.dependent_triples
    }
    parts = list(iter_partitions(db.omega))
    return all(
        triple in asserted for triple in itertools.product(parts, repeat=3)
    )
