"""Violation detectors and their observable violation languages.

A detector watches a stream of notifications and, for each state and each
incoming symbol, either faults (the violation marker) or moves to a
successor state.  The observable behaviour of a detector state is its
*violation language*: the prefix-free set of minimal words that drive it
into the fault.

This module provides the finite, table-driven detector, a generic stepping
handle for detectors whose state spaces are not finite tables, the
automaton representation of a violation language, and the language-level
step (fault on membership, otherwise take the symbol derivative) that makes
prefix-free sets themselves behave as detector states.
"""

from __future__ import annotations

from typing import Hashable, Iterable, Mapping

from .sequences import (
    Alphabet,
    EpsilonViolation,
    FiniteWordSet,
    Word,
    _require_same_alphabet,
    derivative_set,
    require_prefix_free,
)
from .systems import FAULT


class _Unknown:
    """Singleton marker: a budgeted detector could not decide this step."""

    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNKNOWN"


UNKNOWN = _Unknown()


class BudgetExhausted(RuntimeError):
    """An exact answer was requested from a budgeted detector, but the
    search budget ran out before the step could be decided."""


class FiniteDetector:
    """A detector with an explicit finite state table.

    ``step_table`` must be total: one entry per (state, symbol) pair, each
    either :data:`FAULT` or a member state.  "Nothing is ever a violation
    from here" is expressed by an explicit safe state looping to itself.
    """

    __slots__ = ("alphabet", "states", "step_table")

    def __init__(self, alphabet: Alphabet, states: Iterable[Hashable], step_table: Mapping):
        self.alphabet = alphabet
        self.states = tuple(states)
        if not self.states:
            raise ValueError("a detector needs at least one state")
        if len(set(self.states)) != len(self.states):
            raise ValueError("duplicate state identifiers")
        members = set(self.states)
        table = dict(step_table)
        self.step_table = {}
        for x in self.states:
            for n in alphabet:
                if (x, n) not in table:
                    raise ValueError(f"step undefined for state {x!r} on symbol {n!r}")
                target = table[(x, n)]
                if target is not FAULT and target not in members:
                    raise ValueError(f"step target {target!r} of ({x!r}, {n!r}) is not a state")
                self.step_table[(x, n)] = target

    def step(self, x, n: str):
        try:
            return self.step_table[(x, n)]
        except KeyError:
            if n not in self.alphabet:
                raise ValueError(f"symbol {n!r} is not in alphabet {self.alphabet.symbols}") from None
            raise ValueError(f"unknown state {x!r}") from None

    def require_state(self, x) -> None:
        if (x, self.alphabet.symbols[0]) not in self.step_table:
            raise ValueError(f"unknown state {x!r}")


def extend(a: FiniteDetector, x, u: Word):
    """Run the detector over a whole nonempty word: the final state, or
    :data:`FAULT` as soon as any step faults."""
    _require_same_alphabet(a.alphabet, u.alphabet)
    a.require_state(x)
    if len(u) == 0:
        raise ValueError("extend is defined on nonempty words only")
    cur = x
    for n in u:
        cur = a.step(cur, n)
        if cur is FAULT:
            return FAULT
    return cur


class DetectorHandle:
    """Deterministic stepping interface over an opaque detector state.

    ``step`` returns the next handle, :data:`FAULT`, or — for detectors
    backed by a bounded search — :data:`UNKNOWN`.  Handles are values:
    stepping never mutates, so a handle that answered UNKNOWN may be
    stepped again (typically after its backing search gained budget).
    """

    alphabet: Alphabet

    def step(self, symbol: str):
        raise NotImplementedError


class FiniteDetectorHandle(DetectorHandle):
    """Handle view of a finite detector state."""

    __slots__ = ("detector", "state", "alphabet")

    def __init__(self, detector: FiniteDetector, state):
        detector.require_state(state)
        self.detector = detector
        self.state = state
        self.alphabet = detector.alphabet

    def step(self, symbol: str):
        target = self.detector.step(self.state, symbol)
        if target is FAULT:
            return FAULT
        return FiniteDetectorHandle(self.detector, target)


class SetHandle(DetectorHandle):
    """Handle whose state is a violation language itself, stepped by
    :func:`final_step`."""

    __slots__ = ("language", "alphabet")

    def __init__(self, language):
        self.language = language
        self.alphabet = language.alphabet

    def step(self, symbol: str):
        nxt = final_step(self.language, symbol)
        if nxt is FAULT or nxt is UNKNOWN:
            return nxt
        return SetHandle(nxt)


class RegularPrefixFreeSet:
    """A prefix-free violation language carried by a complete automaton.

    The automaton has a single absorbing accepting state; a word belongs to
    the language iff its run enters the accepting state exactly at its last
    symbol (runs that faulted earlier do not count, so the language is
    prefix-free by construction).  The empty word is never accepted: the
    initial state may not be the accepting state.

    Equality is language equality, decided by a product walk — two
    structurally different automata for the same language compare equal.
    Consequently these values are not hashable.
    """

    __slots__ = ("alphabet", "states", "initial", "accept", "transitions")

    def __init__(
        self,
        alphabet: Alphabet,
        states: Iterable[Hashable],
        initial,
        accept,
        transitions: Mapping,
    ):
        self.alphabet = alphabet
        self.states = tuple(states)
        if len(set(self.states)) != len(self.states):
            raise ValueError("duplicate automaton states")
        members = set(self.states)
        if initial not in members or accept not in members:
            raise ValueError("initial and accepting states must be automaton states")
        if initial == accept:
            raise EpsilonViolation("the empty word may not belong to a violation language")
        table = dict(transitions)
        self.transitions = {}
        for q in self.states:
            for n in alphabet:
                if (q, n) not in table:
                    raise ValueError(f"transition undefined for ({q!r}, {n!r})")
                target = table[(q, n)]
                if target not in members:
                    raise ValueError(f"transition target {target!r} is not a state")
                if q == accept and target != accept:
                    raise ValueError("the accepting state must be absorbing")
                self.transitions[(q, n)] = target
        self.initial = initial
        self.accept = accept

    def contains(self, u: Word) -> bool:
        """Membership: the run reaches the accepting state exactly at the
        end of ``u`` and not earlier."""
        _require_same_alphabet(self.alphabet, u.alphabet)
        if len(u) == 0:
            return False
        cur = self.initial
        for i, n in enumerate(u):
            cur = self.transitions[(cur, n)]
            if cur == self.accept:
                return i == len(u) - 1
        return False

    def advance(self, n: str):
        """Language-level step by one symbol: :data:`FAULT` if ``n`` itself
        belongs, otherwise the derivative language (same automaton, moved
        initial state)."""
        if n not in self.alphabet:
            raise ValueError(f"symbol {n!r} is not in alphabet {self.alphabet.symbols}")
        target = self.transitions[(self.initial, n)]
        if target == self.accept:
            return FAULT
        return RegularPrefixFreeSet(self.alphabet, self.states, target, self.accept, self.transitions)

    def words_up_to(self, depth: int) -> FiniteWordSet:
        """All members of length <= depth."""
        if depth < 0:
            raise ValueError("depth must be nonnegative")
        found = []
        frontier = [(self.initial, ())]
        for _ in range(depth):
            nxt = []
            for q, syms in frontier:
                for n in self.alphabet:
                    target = self.transitions[(q, n)]
                    if target == self.accept:
                        found.append(Word(self.alphabet, syms + (n,)))
                    else:
                        nxt.append((target, syms + (n,)))
            frontier = nxt
        return FiniteWordSet(self.alphabet, found)

    def is_empty(self) -> bool:
        seen = {self.initial}
        stack = [self.initial]
        while stack:
            q = stack.pop()
            for n in self.alphabet:
                target = self.transitions[(q, n)]
                if target == self.accept:
                    return False
                if target not in seen:
                    seen.add(target)
                    stack.append(target)
        return True

    def equivalent(self, other: "RegularPrefixFreeSet") -> bool:
        """Language equality via a synchronous product walk."""
        if not isinstance(other, RegularPrefixFreeSet):
            return NotImplemented
        if self.alphabet != other.alphabet:
            return False
        start = (self.initial, other.initial)
        seen = {start}
        stack = [start]
        while stack:
            p, q = stack.pop()
            if (p == self.accept) != (q == other.accept):
                return False
            if p == self.accept:
                continue  # both absorbed; every continuation agrees
            for n in self.alphabet:
                pair = (self.transitions[(p, n)], other.transitions[(q, n)])
                if pair not in seen:
                    seen.add(pair)
                    stack.append(pair)
        return True

    __eq__ = equivalent
    __hash__ = None  # language equality is not hash-compatible

    def minimized(self) -> "RegularPrefixFreeSet":
        """Language-equal automaton with merged states and canonical names
        (breadth-first from the initial state)."""
        reachable = [self.initial]
        seen = {self.initial}
        i = 0
        while i < len(reachable):
            q = reachable[i]
            i += 1
            for n in self.alphabet:
                t = self.transitions[(q, n)]
                if t not in seen:
                    seen.add(t)
                    reachable.append(t)
        if self.accept not in seen:
            reachable.append(self.accept)  # keep the automaton well formed
        block = {q: (q == self.accept) for q in reachable}
        while True:
            sig = {
                q: (block[q], tuple(block[self.transitions[(q, n)]] for n in self.alphabet))
                if q != self.accept
                else (True,)
                for q in reachable
            }
            fresh = {}
            renumber = {}
            for q in reachable:
                renumber.setdefault(sig[q], len(renumber))
                fresh[q] = renumber[sig[q]]
            if fresh == block:
                break
            block = fresh
        names = {}
        order = [self.initial]
        names[block[self.initial]] = "r0"
        i = 0
        while i < len(order):
            q = order[i]
            i += 1
            for n in self.alphabet:
                t = self.transitions[(q, n)]
                if block[t] not in names:
                    names[block[t]] = f"r{len(names)}"
                    order.append(t)
        if block[self.accept] not in names:
            names[block[self.accept]] = f"r{len(names)}"
        new_states = sorted(set(names.values()), key=lambda s: int(s[1:]))
        table = {}
        for q in reachable:
            for n in self.alphabet:
                table[(names[block[q]], n)] = names[block[self.transitions[(q, n)]]]
        return RegularPrefixFreeSet(
            self.alphabet, new_states, names[block[self.initial]], names[block[self.accept]], table
        )

    def __repr__(self) -> str:
        return f"RegularPrefixFreeSet({len(self.states)} states over {list(self.alphabet.symbols)})"


def minimal_violation_words(a, x, depth: int) -> FiniteWordSet:
    """The violation language of a detector state, truncated to ``depth``.

    Words are grown breadth first and never past a fault, so the result is
    the set of minimal faulting words of length <= depth and is prefix-free
    at every depth.  For a :class:`DetectorHandle` pass ``x=None``; a handle
    that answers :data:`UNKNOWN` makes the truncation undecidable and raises
    :class:`BudgetExhausted` instead of returning a wrong set.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    if isinstance(a, FiniteDetector):
        a.require_state(x)
        alphabet = a.alphabet
        frontier = [(x, ())]
        stepper = a.step
    elif isinstance(a, DetectorHandle):
        if x is not None:
            raise ValueError("handles carry their own state; pass x=None")
        alphabet = a.alphabet
        frontier = [(a, ())]
        stepper = lambda h, n: h.step(n)
    else:
        raise TypeError(f"expected a FiniteDetector or DetectorHandle, got {type(a).__name__}")
    found = []
    for _ in range(depth):
        nxt = []
        for cur, syms in frontier:
            for n in alphabet:
                target = stepper(cur, n)
                if target is FAULT:
                    found.append(Word(alphabet, syms + (n,)))
                elif target is UNKNOWN:
                    raise BudgetExhausted(
                        f"cannot decide the step on {Word(alphabet, syms + (n,)).text()!r}"
                    )
                else:
                    nxt.append((target, syms + (n,)))
        frontier = nxt
    return FiniteWordSet(alphabet, found)


def anamorphism_regular(a: FiniteDetector, x) -> RegularPrefixFreeSet:
    """The violation language of state ``x`` as an automaton.

    Reachable detector states become automaton states; the fault becomes
    the unique absorbing accepting state.
    """
    a.require_state(x)
    order = [x]
    index = {x: "d0"}
    i = 0
    while i < len(order):
        q = order[i]
        i += 1
        for n in a.alphabet:
            t = a.step(q, n)
            if t is not FAULT and t not in index:
                index[t] = f"d{len(index)}"
                order.append(t)
    accept = "acc"
    states = [index[q] for q in order] + [accept]
    table = {}
    for q in order:
        for n in a.alphabet:
            t = a.step(q, n)
            table[(index[q], n)] = accept if t is FAULT else index[t]
    for n in a.alphabet:
        table[(accept, n)] = accept
    return RegularPrefixFreeSet(a.alphabet, states, index[x], accept, table)


def final_step(p, n: str):
    """One step of the violation-language detector: fault if the one-letter
    word ``n`` belongs to ``p``, otherwise the derivative of ``p`` by ``n``.

    Dispatches on the representation: explicit word sets take a literal
    derivative, automaton-backed sets move their initial state, and any
    object exposing its own ``final_step`` (predicate- or search-backed
    languages) is deferred to.  Search-backed languages may answer
    :data:`UNKNOWN`.
    """
    if isinstance(p, FiniteWordSet):
        if Word(p.alphabet) in p:
            raise EpsilonViolation("violation languages may not contain the empty word")
        if n not in p.alphabet:
            raise ValueError(f"symbol {n!r} is not in alphabet {p.alphabet.symbols}")
        if Word(p.alphabet, (n,)) in p:
            return FAULT
        return derivative_set(n, p)
    if isinstance(p, RegularPrefixFreeSet):
        return p.advance(n)
    hook = getattr(p, "final_step", None)
    if hook is not None:
        return hook(n)
    raise TypeError(f"{type(p).__name__} is not a prefix-free set representation")


def check_detector_morphism(f: Mapping, a: FiniteDetector, b: FiniteDetector) -> bool:
    """Whether ``f`` preserves detector behaviour at every state and
    symbol: faults match exactly, and surviving steps commute with ``f``."""
    _require_same_alphabet(a.alphabet, b.alphabet)
    b_members = set(b.states)
    for x in a.states:
        if x not in f:
            raise ValueError(f"state map undefined for {x!r}")
        if f[x] not in b_members:
            raise ValueError(f"state map target {f[x]!r} is not a state of the codomain detector")
    for x in a.states:
        for n in a.alphabet:
            ax = a.step(x, n)
            bfx = b.step(f[x], n)
            if ax is FAULT:
                if bfx is not FAULT:
                    return False
            else:
                if bfx is FAULT or f[ax] != bfx:
                    return False
    return True


def detector_from_explicit_set(p: FiniteWordSet) -> tuple[FiniteDetector, FiniteWordSet]:
    """The derivative-closure detector of a finite prefix-free set.

    States are the distinct iterated derivatives of ``p`` (the empty set
    acts as the safe sink); stepping takes the derivative and faults on
    one-letter membership.  The violation language of the initial state is
    exactly ``p``.
    """
    require_prefix_free(p)
    order = [p]
    seen = {p}
    table = {}
    i = 0
    while i < len(order):
        q = order[i]
        i += 1
        for n in p.alphabet:
            if Word(p.alphabet, (n,)) in q:
                table[(q, n)] = FAULT
            else:
                d = derivative_set(n, q)
                table[(q, n)] = d
                if d not in seen:
                    seen.add(d)
                    order.append(d)
    return FiniteDetector(p.alphabet, order, table), p


def canonical_form(a: FiniteDetector, init) -> tuple[FiniteDetector, str]:
    """Reachable, behaviour-minimal copy of a detector with states renamed
    ``s0, s1, ...`` breadth first from the initial state.

    States with equal violation languages are merged (refinement over fault
    profiles), so two detectors describe the same constraint iff their
    canonical forms have identical tables.
    """
    a.require_state(init)
    reachable = [init]
    seen = {init}
    i = 0
    while i < len(reachable):
        q = reachable[i]
        i += 1
        for n in a.alphabet:
            t = a.step(q, n)
            if t is not FAULT and t not in seen:
                seen.add(t)
                reachable.append(t)
    block = {q: frozenset(n for n in a.alphabet if a.step(q, n) is FAULT) for q in reachable}
    while True:
        sig = {}
        for q in reachable:
            succ = tuple(
                None if a.step(q, n) is FAULT else block[a.step(q, n)] for n in a.alphabet
            )
            sig[q] = (block[q], succ)
        renumber = {}
        fresh = {}
        for q in reachable:
            renumber.setdefault(sig[q], len(renumber))
            fresh[q] = renumber[sig[q]]
        if fresh == block:
            break
        block = fresh
    names = {block[init]: "s0"}
    order = [init]
    i = 0
    while i < len(order):
        q = order[i]
        i += 1
        for n in a.alphabet:
            t = a.step(q, n)
            if t is not FAULT and block[t] not in names:
                names[block[t]] = f"s{len(names)}"
                order.append(t)
    states = sorted(set(names.values()), key=lambda s: int(s[1:]))
    table = {}
    for q in reachable:
        for n in a.alphabet:
            t = a.step(q, n)
            table[(names[block[q]], n)] = FAULT if t is FAULT else names[block[t]]
    return FiniteDetector(a.alphabet, states, table), "s0"


def detector_to_text(a: FiniteDetector) -> str:
    """Serialize a detector as a text table (see :func:`detector_from_text`).

    States must already be token-shaped strings; detectors with structured
    state identifiers should go through :func:`canonical_form` first.
    """
    for x in a.states:
        if not isinstance(x, str) or not x or any(c.isspace() for c in x) \
                or set(x) & {":", ";", "#"} or "->" in x:
            raise ValueError(f"state {x!r} is not serializable; canonicalize the detector first")
    lines = [
        "states: " + " ".join(a.states),
        "alphabet: " + " ".join(a.alphabet.symbols),
    ]
    for x in a.states:
        cells = []
        for n in a.alphabet:
            t = a.step(x, n)
            cells.append(f"{n}->{'FAULT' if t is FAULT else t}")
        lines.append(f"{x}: " + " ".join(cells))
    return "\n".join(lines) + "\n"


def detector_from_text(text: str) -> FiniteDetector:
    """Parse the text-table serialization produced by :func:`detector_to_text`."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if len(lines) < 2 or not lines[0].startswith("states:") or not lines[1].startswith("alphabet:"):
        raise ValueError("detector table must start with 'states:' and 'alphabet:' lines")
    states = lines[0].split(":", 1)[1].split()
    alphabet = Alphabet(lines[1].split(":", 1)[1].split())
    table = {}
    rows = {}
    for ln in lines[2:]:
        if ":" not in ln:
            raise ValueError(f"bad detector row: {ln!r}")
        name, cells = ln.split(":", 1)
        name = name.strip()
        if name in rows:
            raise ValueError(f"duplicate row for state {name!r}")
        rows[name] = cells.split()
    if set(rows) != set(states):
        raise ValueError("detector rows do not match the declared states")
    for x in states:
        for cell in rows[x]:
            if "->" not in cell:
                raise ValueError(f"bad transition cell {cell!r}")
            n, target = cell.split("->", 1)
            table[(x, n)] = FAULT if target == "FAULT" else target
    return FiniteDetector(alphabet, states, table)
