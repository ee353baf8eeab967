"""Exact product distributions and the orthogonality/independence bridge.

A distribution on a factored set assigns each factor a rational weight
vector; the mass of an element is the product of the weights of its blocks.
Everything is computed in exact rational arithmetic, so conditional
independence is a hard equality, never a tolerance check.

``fundamental_theorem_check`` cross-examines one triple of partitions three
ways: the splice-based orthogonality verdict, the exact polynomial identity,
and sampled product distributions.  Orthogonal triples must be independent
under every sampled distribution; non-orthogonal triples must fail the
polynomial identity, with a sampled witness distribution violating
independence as corroboration.  The polynomial verdict is authoritative for
the negative direction since a finite sample can miss a witness.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .factored import FactoredSet
from .partitions import Partition, ValidationError
from .polynomial import VarId, cond_orth_by_divisibility
from .structure import cond_orthogonal

DEFAULT_SEED = 1729
_WEIGHT_RANGE = 97


@dataclass(frozen=True)
class FactoredDistribution:
    """Per-factor block weights, nonnegative rationals summing to one."""

    fs: FactoredSet
    weights: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        fs = self.fs
        coerced = tuple(
            tuple(Fraction(w) for w in row) for row in self.weights
        )
        object.__setattr__(self, "weights", coerced)
        if len(coerced) != fs.dim:
            raise ValidationError("one weight vector per factor is required")
        for j, row in enumerate(coerced):
            if len(row) != fs.factors[j].block_count:
                raise ValidationError(f"factor {j} needs one weight per block")
            if any(w < 0 for w in row):
                raise ValidationError(f"factor {j} has a negative weight")
            if sum(row, Fraction(0)) != 1:
                raise ValidationError(f"factor {j} weights must sum to 1")

    @classmethod
    def uniform(cls, fs: FactoredSet) -> "FactoredDistribution":
        return cls(
            fs,
            tuple(
                (Fraction(1, p.block_count),) * p.block_count for p in fs.factors
            ),
        )

    def point_mass(self, s: int) -> Fraction:
        mass = Fraction(1)
        for j, b in enumerate(self.fs.coords[s]):
            mass *= self.weights[j][b]
        return mass

    def as_assignment(self) -> dict[VarId, Fraction]:
        """Weights keyed by polynomial variable id."""
        return {
            (j, b): w
            for j, row in enumerate(self.weights)
            for b, w in enumerate(row)
        }

    def as_table(self) -> tuple[Fraction, ...]:
        return tuple(self.point_mass(s) for s in range(self.fs.size))


def prob(fs: FactoredSet, dist: FactoredDistribution, elements: Iterable[int]) -> Fraction:
    """Probability of an event: the sum of its point masses."""
    if dist.fs != fs:
        raise ValidationError("distribution belongs to a different factored set")
    return sum((dist.point_mass(s) for s in set(elements)), Fraction(0))


def is_distribution_on_factored_set(
    fs: FactoredSet, table: Sequence[Fraction] | Mapping[int, Fraction]
) -> bool:
    """Whether raw point masses come from some product of factor distributions.

    Checks nonnegativity, total mass one, and that every point mass equals
    the product of its factor-block probabilities (block probability being
    the sum of the masses in the block).
    """
    masses = [Fraction(table[s]) for s in range(fs.size)]
    if any(m < 0 for m in masses):
        return False
    if sum(masses, Fraction(0)) != 1:
        return False
    block_prob = [
        [sum((masses[e] for e in blk), Fraction(0)) for blk in p.block_sets]
        for p in fs.factors
    ]
    for s in range(fs.size):
        product = Fraction(1)
        for j, b in enumerate(fs.coords[s]):
            product *= block_prob[j][b]
        if product != masses[s]:
            return False
    return True


def conditional_independence_holds(
    fs: FactoredSet,
    dist: FactoredDistribution,
    x: Partition,
    y: Partition,
    z: Partition,
) -> bool:
    """Exact check of P(x&z) P(y&z) == P(x&y&z) P(z) over all block triples."""
    for part in (x, y, z):
        if part.ground != fs.ground or not part.is_full:
            raise ValidationError("full-domain partitions over this set are required")
    cache: dict[frozenset[int], Fraction] = {}

    def p(event: frozenset[int]) -> Fraction:
        got = cache.get(event)
        if got is None:
            got = cache[event] = sum(
                (dist.point_mass(s) for s in event), Fraction(0)
            )
        return got

    for zb in z.block_sets:
        pz = p(zb)
        for xb in x.block_sets:
            xz = xb & zb
            pxz = p(xz)
            for yb in y.block_sets:
                if pxz * p(yb & zb) != p(xz & yb) * pz:
                    return False
    return True


def random_distribution(
    fs: FactoredSet, rng: random.Random, max_weight: int = _WEIGHT_RANGE
) -> FactoredDistribution:
    """Strictly positive weights: normalized uniform integers in ``[1, max_weight]``.

    Strict positivity avoids the measure-zero degeneracies where a dependent
    pair happens to look independent.
    """
    rows = []
    for p in fs.factors:
        raw = [rng.randint(1, max_weight) for _ in range(p.block_count)]
        total = sum(raw)
        rows.append(tuple(Fraction(w, total) for w in raw))
    return FactoredDistribution(fs, tuple(rows))


@dataclass(frozen=True)
class FundamentalTheoremReport:
    """Three-way comparison of one partition triple, with sampling evidence."""

    orthogonal: bool
    polynomial_identity: bool
    trials: int
    independent_trials: int
    witness: FactoredDistribution | None
    seed: int

    @property
    def verdicts_agree(self) -> bool:
        if self.orthogonal:
            return self.polynomial_identity and self.independent_trials == self.trials
        return not self.polynomial_identity

    @property
    def witness_found(self) -> bool:
        return self.witness is not None


def fundamental_theorem_check(
    fs: FactoredSet,
    x: Partition,
    y: Partition,
    z: Partition,
    trials: int = 20,
    seed: int = DEFAULT_SEED,
) -> FundamentalTheoremReport:
    """Confront orthogonality, the polynomial identity, and sampled distributions."""
    if trials < 1:
        raise ValidationError("at least one trial is required")
    orth = cond_orthogonal(fs, x, y, z)
    poly_ok = cond_orth_by_divisibility(fs, x, y, z)
    rng = random.Random(seed)
    independent = 0
    witness = None
    for _ in range(trials):
        dist = random_distribution(fs, rng)
        if conditional_independence_holds(fs, dist, x, y, z):
            independent += 1
        elif witness is None:
            witness = dist
    return FundamentalTheoremReport(
        orthogonal=orth,
        polynomial_identity=poly_ok,
        trials=trials,
        independent_trials=independent,
        witness=witness,
        seed=seed,
    )
