"""Distributions and asynchronous automata with on-the-fly global semantics."""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .automata import Automaton
from .errors import CapExceeded, ValidationError
from .traces import ActionSet, IndependenceAlphabet

LocalTuple = tuple
GlobalState = tuple


@dataclass(frozen=True)
class Distribution:
    """Processes ``1..K`` with one action set each (a clique cover of D)."""

    alphabet: IndependenceAlphabet
    alphabets: tuple[ActionSet, ...]

    @property
    def processes(self) -> range:
        return range(1, len(self.alphabets) + 1)

    def actions_of(self, k: int) -> ActionSet:
        return self.alphabets[k - 1]

    @cached_property
    def _loc(self) -> dict:
        return {
            a: tuple(k for k in self.processes if a in self.alphabets[k - 1])
            for a in self.alphabet.actions
        }

    def loc(self, a) -> tuple[int, ...]:
        """Processes taking part in ``a``, in increasing order."""
        return self._loc[a]

    def as_lists(self) -> list[list]:
        return [self.alphabet.ordered(s) for s in self.alphabets]

    def __len__(self) -> int:
        return len(self.alphabets)


def validate_distribution(alphabet: IndependenceAlphabet, sets: Iterable[Iterable]) -> Distribution:
    alphabets = tuple(frozenset(s) for s in sets)
    known = set(alphabet.actions)
    for k, s in enumerate(alphabets, 1):
        unknown = s - known
        if unknown:
            raise ValidationError(f"process {k} mentions unknown actions {sorted(map(str, unknown))}")
    for a in alphabet.actions:
        if not any(a in s for s in alphabets):
            raise ValidationError(f"action {a} belongs to no process")
    for a, b in itertools.combinations(alphabet.actions, 2):
        shared = [k for k, s in enumerate(alphabets, 1) if a in s and b in s]
        if alphabet.dependent(a, b) and not shared:
            raise ValidationError(f"dependent actions {a} and {b} share no process")
        if alphabet.independent(a, b) and shared:
            raise ValidationError(
                f"independent actions {a} and {b} share process {shared[0]}"
            )
    return Distribution(alphabet, alphabets)


def default_distribution(alphabet: IndependenceAlphabet) -> Distribution:
    """One process per dependent pair, plus a singleton process for each
    action dependent on nothing else."""
    acts = alphabet.actions
    sets = []
    paired = set()
    for a, b in itertools.combinations(acts, 2):
        if alphabet.dependent(a, b):
            sets.append(frozenset((a, b)))
            paired.update((a, b))
    sets += [frozenset((a,)) for a in acts if a not in paired]
    # keep processes in order of their least action, then the second one
    sets.sort(key=lambda s: [alphabet.position[x] for x in alphabet.ordered(s)])
    return validate_distribution(alphabet, sets)


class AsyncAutomaton:
    """Asynchronous automaton given intensionally.

    ``successors(a, t)`` yields the tuples ``r`` with ``(t, r)`` in the
    local relation of ``a``, where ``t`` and ``r`` are indexed by
    ``distribution.loc(a)``; ``contains(a, t, r)`` is the membership test
    and ``is_final`` the predicate on global states.
    """

    def __init__(
        self,
        distribution: Distribution,
        local_states: Sequence[Sequence[Hashable]],
        local_initials: Sequence[Hashable],
        successors: Callable[[Hashable, LocalTuple], Iterable[LocalTuple]],
        contains: Callable[[Hashable, LocalTuple, LocalTuple], bool],
        is_final: Callable[[GlobalState], bool],
    ):
        if len(local_states) != len(distribution) or len(local_initials) != len(distribution):
            raise ValidationError("one local state set and initial state per process expected")
        self.distribution = distribution
        self.local_states = tuple(tuple(s) for s in local_states)
        self.local_initials = tuple(local_initials)
        for k, (states, init) in enumerate(zip(self.local_states, self.local_initials), 1):
            if init not in set(states):
                raise ValidationError(f"initial state of process {k} is not one of its states")
        self.successors = successors
        self.contains = contains
        self.is_final = is_final

    @property
    def initial(self) -> GlobalState:
        return self.local_initials

    @classmethod
    def from_tables(
        cls,
        distribution: Distribution,
        local_states: Sequence[Sequence[Hashable]],
        local_initials: Sequence[Hashable],
        relations: Mapping[Hashable, Iterable[tuple[LocalTuple, LocalTuple]]],
        finals: Iterable[GlobalState],
    ) -> "AsyncAutomaton":
        """Explicit automaton from materialised relations and final states."""
        tables: dict = {}
        for a, pairs in relations.items():
            if a not in distribution.alphabet.position:
                raise ValidationError(f"relation for unknown action {a!r}")
            table = tables.setdefault(a, {})
            loc = distribution.loc(a)
            for src, dst in pairs:
                src, dst = tuple(src), tuple(dst)
                if len(src) != len(loc) or len(dst) != len(loc):
                    raise ValidationError(f"relation of {a} must act on {len(loc)} processes")
                for k, x, y in zip(loc, src, dst):
                    if x not in local_states[k - 1] or y not in local_states[k - 1]:
                        raise ValidationError(f"relation of {a} leaves the states of process {k}")
                targets = table.setdefault(src, [])
                if dst not in targets:
                    targets.append(dst)
        final_set = frozenset(tuple(g) for g in finals)
        return cls(
            distribution,
            local_states,
            local_initials,
            lambda a, t: tables.get(a, {}).get(t, ()),
            lambda a, t, r: r in tables.get(a, {}).get(t, ()),
            final_set.__contains__,
        )


def global_successors(AA: AsyncAutomaton, g: GlobalState) -> list[tuple]:
    """``(a, r)`` with ``g -a-> r``; actions in alphabet order."""
    out = []
    dist = AA.distribution
    for a in dist.alphabet.actions:
        loc = dist.loc(a)
        local = tuple(g[k - 1] for k in loc)
        seen = set()
        for r_loc in AA.successors(a, local):
            if r_loc in seen:
                continue
            seen.add(r_loc)
            r = list(g)
            for k, x in zip(loc, r_loc):
                r[k - 1] = x
            out.append((a, tuple(r)))
    return out


def global_automaton_bounded(AA: AsyncAutomaton, cap: int = 100_000) -> Automaton:
    """Reachable part of the global automaton, in BFS order.

    Raises :class:`CapExceeded` once more than ``cap`` global states are
    discovered.
    """
    if cap < 1:
        raise ValueError("cap must be at least 1")
    init = AA.initial
    order = [init]
    seen = {init}
    transitions = []
    queue = deque(order)
    while queue:
        g = queue.popleft()
        for a, r in global_successors(AA, g):
            transitions.append((g, a, r))
            if r not in seen:
                if len(seen) >= cap:
                    raise CapExceeded(cap)
                seen.add(r)
                order.append(r)
                queue.append(r)
    finals = frozenset(g for g in order if AA.is_final(g))
    return Automaton(order, init, frozenset(AA.distribution.alphabet.actions), transitions, finals)


def is_deterministic(AA: AsyncAutomaton, domain: Callable[[Hashable], Iterable[LocalTuple]] | None = None) -> bool:
    """Whether every local relation is a partial function.

    By default every tuple over the participating processes is tried;
    ``domain(a)`` can narrow that down.
    """
    dist = AA.distribution
    for a in dist.alphabet.actions:
        loc = dist.loc(a)
        tuples = (
            domain(a)
            if domain is not None
            else itertools.product(*(AA.local_states[k - 1] for k in loc))
        )
        for t in tuples:
            images = set(AA.successors(a, tuple(t)))
            if len(images) > 1:
                return False
    return True


class _GlobalView:
    """Memoised global successor function with a cap on discovered states."""

    def __init__(self, AA: AsyncAutomaton, cap: int):
        self.AA = AA
        self.cap = cap
        self.seen = {AA.initial}
        self._succ: dict = {}

    def successors(self, g) -> list[tuple]:
        out = self._succ.get(g)
        if out is None:
            out = global_successors(self.AA, g)
            for _, r in out:
                if r not in self.seen:
                    if len(self.seen) >= self.cap:
                        raise CapExceeded(self.cap)
                    self.seen.add(r)
            self._succ[g] = out
        return out


def bounded_language(
    AA: AsyncAutomaton,
    maxlen: int,
    cap: int = 100_000,
    silent: Callable[[Hashable], bool] | None = None,
) -> set[tuple]:
    """Words of length at most ``maxlen`` accepted by the global automaton.

    Without ``silent`` the global automaton is explored on the fly, only
    as deep as ``maxlen``.  Actions for which ``silent`` holds act as
    empty moves and never appear in the words, which gives the exact
    projection of the language onto the other actions; that needs the
    whole reachable global automaton, so it is expanded first (under
    ``cap``).
    """
    if silent is not None:
        from .automata import enumerate_projected

        G = global_automaton_bounded(AA, cap)
        hidden = [a for a in AA.distribution.alphabet.actions if silent(a)]
        return enumerate_projected(G, maxlen, hidden)

    view = _GlobalView(AA, cap)
    finals: dict = {}

    def accepting(states) -> bool:
        for g in states:
            f = finals.get(g)
            if f is None:
                f = finals[g] = bool(AA.is_final(g))
            if f:
                return True
        return False

    words: set[tuple] = set()
    layer = {(): frozenset([AA.initial])}
    for depth in range(maxlen + 1):
        nxt: dict = {}
        for word, states in layer.items():
            if accepting(states):
                words.add(word)
            if depth == maxlen:
                continue
            step: dict = {}
            for g in states:
                for a, r in view.successors(g):
                    step.setdefault(a, set()).add(r)
            for a, targets in step.items():
                nxt[word + (a,)] = frozenset(targets)
        layer = nxt
    return words
