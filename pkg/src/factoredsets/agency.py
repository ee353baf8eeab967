"""Observation and counterfactability predicates on factored sets.

An agent partition observes an event when its own history is disjoint from
the event's two-sided partition and, conditioned on the event failing, from
the world model: the agent's choice neither influences the event nor, in the
worlds where the event fails, anything the world model distinguishes.

Observing a partition splits the agent into one subagent per block.  The
subagents must jointly refine back to the agent, which pins every candidate
subagent into the agent's coarsening lattice: a common refinement equal to
the agent forces each piece to be coarser than the agent.  The search is
therefore bounded in principle, but its size is a product of coarsening
counts, so a budget caps it and exhaustion is an explicit third verdict
rather than a guess.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from .factored import FactoredSet
from .partitions import (
    Partition,
    ValidationError,
    bell_number,
    common_refinement,
    iter_coarsenings,
)
from .structure import (
    cond_orthogonal,
    cond_orthogonal_given_subset,
    history,
    orthogonal,
)


def event_partition(fs: FactoredSet, elements: Iterable[int]) -> Partition:
    """Two-block partition event / non-event; degenerate events collapse to one block."""
    event = frozenset(elements)
    n = fs.size
    if any(not 0 <= e < n for e in event):
        raise ValidationError("event contains out-of-range elements")
    if not event or len(event) == n:
        return Partition.indiscrete(fs.ground)
    rest = frozenset(range(n)) - event
    return Partition.from_blocks(fs.ground, [sorted(event), sorted(rest)])


def observes_event(
    fs: FactoredSet, agent: Partition, elements: Iterable[int], world: Partition
) -> bool:
    """Whether the agent may safely assume the event when optimizing the world."""
    event = frozenset(elements)
    if not orthogonal(fs, agent, event_partition(fs, event)):
        return False
    complement = frozenset(range(fs.size)) - event
    return cond_orthogonal_given_subset(fs, agent, world, complement)


@dataclass(frozen=True)
class ObservesVerdict:
    outcome: str  # "yes" | "no" | "inconclusive"
    witness: tuple[Partition, ...] | None = None
    tuples_tried: int = 0

    def __bool__(self) -> bool:
        return self.outcome == "yes"


def observes_partition(
    fs: FactoredSet,
    agent: Partition,
    x: Partition,
    world: Partition,
    budget: int = 1_000_000,
) -> ObservesVerdict:
    """Split the agent into per-block subagents, each observing its block.

    Searches tuples of coarsenings of the agent in lexicographic order; the
    witness returned is the first tuple whose common refinement restores the
    agent and whose members each pass the conditioned-orthogonality test for
    their block.  ``inconclusive`` means the budget ran out before the
    candidate space was covered.
    """
    for part in (agent, x, world):
        if part.ground != fs.ground or not part.is_full:
            raise ValidationError("full-domain partitions over this set are required")
    if not orthogonal(fs, agent, x):
        return ObservesVerdict("no")
    blocks = x.block_sets
    if not blocks:
        # Empty ground set: the empty common refinement is the (empty)
        # indiscrete partition, which the agent already equals.
        return ObservesVerdict("yes", witness=())
    if bell_number(agent.block_count) > budget:
        return ObservesVerdict("inconclusive")
    coarsenings = sorted(iter_coarsenings(agent), key=lambda p: p.key)
    everything = frozenset(range(fs.size))
    valid: list[list[Partition]] = []
    for xb in blocks:
        rest = everything - xb
        valid.append(
            [c for c in coarsenings if cond_orthogonal_given_subset(fs, c, world, rest)]
        )
        if not valid[-1]:
            return ObservesVerdict("no")

    tried = 0
    chosen: list[Partition] = []

    def rec(i: int, joined: Partition | None) -> Iterator[tuple[Partition, ...]]:
        nonlocal tried
        if joined == agent:
            # Further members only refine the join, and coarsenings of the
            # agent cannot push it past the agent: lex-first completion wins.
            tried += 1
            yield tuple(chosen) + tuple(options[0] for options in valid[i:])
            return
        if i == len(valid):
            tried += 1
            return
        for cand in valid[i]:
            if tried >= budget:
                return
            chosen.append(cand)
            nxt = cand if joined is None else common_refinement([joined, cand])
            yield from rec(i + 1, nxt)
            chosen.pop()

    for witness in rec(0, None):
        return ObservesVerdict("yes", witness=witness, tuples_tried=tried)
    if tried >= budget:
        return ObservesVerdict("inconclusive", tuples_tried=tried)
    return ObservesVerdict("no", tuples_tried=tried)


def history_join(fs: FactoredSet, x: Partition) -> Partition:
    """Common refinement of the factors in the partition's history."""
    return common_refinement(
        fs.factors_of_mask(history(fs, x)), ground=fs.ground
    )


def counterfactable(fs: FactoredSet, x: Partition) -> bool:
    """Whether splicing along the history moves exactly the partition's value.

    Holds when the partition equals the common refinement of its own history,
    so a chimera along those factors changes nothing beyond the partition.
    """
    if x.ground != fs.ground or not x.is_full:
        raise ValidationError("a full-domain partition over this set is required")
    return history_join(fs, x) == x


def relatively_counterfactable(fs: FactoredSet, x: Partition, world: Partition) -> bool:
    """Counterfactable up to the world model: the partition screens off its history."""
    if x.ground != fs.ground or not x.is_full:
        raise ValidationError("a full-domain partition over this set is required")
    return cond_orthogonal(fs, history_join(fs, x), world, x)
