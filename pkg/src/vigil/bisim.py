"""Behavioural equivalence of detector states and of output-system states.

Two detector states are bisimilar exactly when they have the same
violation language; two output-system states exactly when they emit the
same stream.  Both are decided by partition refinement on the disjoint
union of the two carriers: split by the immediately observable data (fault
profile, output token), then refine by successor blocks until stable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .detector import FiniteDetector
from .sequences import _require_same_alphabet
from .systems import FAULT, SSystem


@dataclass(frozen=True)
class StatePairRelation:
    """A set of (left-system state, right-system state) pairs."""

    pairs: frozenset

    def __contains__(self, pair) -> bool:
        return pair in self.pairs

    def __iter__(self) -> Iterator[tuple]:
        return iter(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)


def _refine(items, observe, successors) -> dict:
    """Generic Moore refinement: ``observe`` gives the initial class of an
    item, ``successors`` its tuple of follow-up items (None marks a missing
    successor).  Returns the stable block assignment."""
    block = {}
    renumber: dict = {}
    for it in items:
        key = observe(it)
        renumber.setdefault(key, len(renumber))
        block[it] = renumber[key]
    while True:
        signature = {
            it: (block[it], tuple(None if s is None else block[s] for s in successors(it)))
            for it in items
        }
        renumber = {}
        fresh = {}
        for it in items:
            renumber.setdefault(signature[it], len(renumber))
            fresh[it] = renumber[signature[it]]
        if fresh == block:
            return block
        block = fresh


def largest_detector_bisimulation(a: FiniteDetector, b: FiniteDetector) -> StatePairRelation:
    """All pairs of states of ``a`` and ``b`` with equal violation
    languages — the greatest relation closed under matching faults and
    related successors."""
    _require_same_alphabet(a.alphabet, b.alphabet)
    systems = (a, b)
    items = [(0, x) for x in a.states] + [(1, y) for y in b.states]

    def observe(item):
        tag, x = item
        return frozenset(n for n in a.alphabet if systems[tag].step(x, n) is FAULT)

    def successors(item):
        tag, x = item
        out = []
        for n in a.alphabet:
            target = systems[tag].step(x, n)
            out.append(None if target is FAULT else (tag, target))
        return tuple(out)

    block = _refine(items, observe, successors)
    pairs = frozenset(
        (x, y) for x in a.states for y in b.states if block[(0, x)] == block[(1, y)]
    )
    return StatePairRelation(pairs)


def bisimilar(a: FiniteDetector, x, b: FiniteDetector, y) -> bool:
    """Whether states ``x`` of ``a`` and ``y`` of ``b`` have the same
    violation language."""
    a.require_state(x)
    b.require_state(y)
    return (x, y) in largest_detector_bisimulation(a, b)


def largest_s_bisimulation(sigma: SSystem, tau: SSystem) -> StatePairRelation:
    """All pairs of states of two output systems that emit the same
    stream."""
    _require_same_alphabet(sigma.alphabet, tau.alphabet)
    systems = (sigma, tau)
    items = [(0, x) for x in sigma.states] + [(1, y) for y in tau.states]

    def observe(item):
        tag, x = item
        return systems[tag].out(x)

    def successors(item):
        tag, x = item
        return ((tag, systems[tag].tr(x)),)

    block = _refine(items, observe, successors)
    pairs = frozenset(
        (x, y) for x in sigma.states for y in tau.states if block[(0, x)] == block[(1, y)]
    )
    return StatePairRelation(pairs)
