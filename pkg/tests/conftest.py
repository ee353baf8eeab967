"""Shared fixtures and random generators for the test suite.

Random factored sets are produced by relabeling the mixed-radix reference
grid of a random block-count multiset with a random permutation, which
reaches every factorization shape.  All randomness is seeded per test for
reproducibility.
"""

from __future__ import annotations

import random

import pytest

from factoredsets import (
    FactoredSet,
    GroundSet,
    Partition,
    common_refinement,
    data_path,
    factor_size_multisets,
    grid_factored_set,
    load_database_file,
    load_factored_set_file,
    resolve_model,
)


def brute_history(fs: FactoredSet, part: Partition) -> int:
    """Intersection of all generating factor subsets, by full enumeration.

    Generation is decided through the refinement route (the restricted
    factor join refines the partition, and the domain is closed under the
    splice), so this shares no code path with the library's per-factor
    shortcut and serves as its independent oracle.
    """
    h = fs.full_mask
    dom = part.domain
    for mask in range(1 << fs.dim):
        join = common_refinement(fs.factors_of_mask(mask), ground=fs.ground)
        stable = all(
            fs.chimera_pair(mask, s, t) in part.domain_set
            for s in dom
            for t in dom
        )
        if stable and join.restrict(dom).refines(part):
            h &= mask
    return h


def random_factored_set(
    rng: random.Random, max_n: int = 8, min_n: int = 1
) -> FactoredSet:
    n = rng.randint(min_n, max_n)
    ground = GroundSet(n)
    if n == 0:
        return FactoredSet(ground, [Partition.empty(ground)])
    if n == 1:
        return FactoredSet(ground, [])
    ks = rng.choice(factor_size_multisets(n))
    ref = grid_factored_set(n, ks)
    perm = list(range(n))
    rng.shuffle(perm)
    factors = [
        Partition.from_block_of(
            ground, {perm[s]: p.block_ids[s] for s in range(n)}
        )
        for p in ref.factors
    ]
    return FactoredSet(ground, factors)


def random_partition(
    rng: random.Random, ground: GroundSet, domain=None
) -> Partition:
    dom = tuple(ground.elements()) if domain is None else tuple(sorted(domain))
    if not dom:
        return Partition.empty(ground)
    buckets = rng.randint(1, len(dom))
    owner = {e: rng.randrange(buckets) for e in dom}
    return Partition.from_block_of(ground, owner)


def random_subset(rng: random.Random, n: int, nonempty: bool = False) -> frozenset[int]:
    out = frozenset(e for e in range(n) if rng.random() < 0.5)
    if nonempty and not out and n:
        out = frozenset({rng.randrange(n)})
    return out


def random_generated_partition(rng: random.Random, fs: FactoredSet) -> Partition:
    """A coarsening of the join of a random factor subset.

    These carry the structure the factorization induces, so orthogonality
    and generation premises actually fire under random sampling.
    """
    mask = rng.randrange(1 << fs.dim)
    join = common_refinement(fs.factors_of_mask(mask), ground=fs.ground)
    k = join.block_count
    if k == 0:
        return join
    buckets = rng.randint(1, k)
    grouping = {b: rng.randrange(buckets) for b in range(k)}
    owner = {e: grouping[join.block_of[e]] for e in join.domain}
    return Partition.from_block_of(fs.ground, owner)


def mixed_random_partition(rng: random.Random, fs: FactoredSet) -> Partition:
    if rng.random() < 0.5:
        return random_generated_partition(rng, fs)
    return random_partition(rng, fs.ground)


class Ex1:
    """The two-bit ground example used all over the tests."""

    def __init__(self):
        self.file = load_factored_set_file(data_path("ex1.ffs"))
        self.fs = self.file.fs
        self.X = self.file.resolve("X")
        self.V = self.file.resolve("V")
        self.Y = self.file.resolve("Y")
        self.db = load_database_file(data_path("ex1.db"))


@pytest.fixture(scope="session")
def ex1() -> Ex1:
    return Ex1()


class Ex2:
    def __init__(self):
        self.db = load_database_file(data_path("ex2.db"))
        self.model_file = load_factored_set_file(data_path("ex2-model.ffs"))
        self.model = resolve_model(self.model_file, self.db.omega)


@pytest.fixture(scope="session")
def ex2() -> Ex2:
    return Ex2()
