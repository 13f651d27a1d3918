"""Finite, possibly non-deterministic automata over sub-alphabets."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Mapping

from . import kernels
from .errors import ValidationError
from .traces import ActionSet, IndependenceAlphabet, Word

State = Hashable
Transition = tuple[State, str, State]


@dataclass(frozen=True, eq=False)
class Automaton:
    """``(Q, i, T, ->, F)``.  States keep their input order, which fixes
    the dense index used internally by every exploration."""

    states: tuple
    initial: State
    actions: ActionSet
    transitions: tuple[Transition, ...]
    finals: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "actions", frozenset(self.actions))
        object.__setattr__(self, "transitions", tuple(tuple(t) for t in self.transitions))
        object.__setattr__(self, "finals", frozenset(self.finals))
        index = self.index
        if len(index) != len(self.states):
            raise ValidationError("duplicate state identifiers")
        if self.initial not in index:
            raise ValidationError(f"initial state {self.initial!r} is not a state")
        for q in self.finals:
            if q not in index:
                raise ValidationError(f"final state {q!r} is not a state")
        for q, a, r in self.transitions:
            if q not in index or r not in index:
                raise ValidationError(f"transition ({q!r}, {a!r}, {r!r}) leaves the state set")
            if a not in self.actions:
                raise ValidationError(f"transition ({q!r}, {a!r}, {r!r}) uses an action outside T")

    @cached_property
    def index(self) -> dict:
        return {q: i for i, q in enumerate(self.states)}

    @cached_property
    def graph(self) -> kernels.Graph:
        idx = self.index
        return kernels.Graph.from_edges(
            len(self.states), ((idx[q], a, idx[r]) for q, a, r in self.transitions)
        )

    @cached_property
    def successors(self) -> dict:
        """``successors[q][a]`` lists the a-successors of q, deduplicated."""
        out: dict = {q: {} for q in self.states}
        for q, a, r in self.transitions:
            targets = out[q].setdefault(a, [])
            if r not in targets:
                targets.append(r)
        return out

    @cached_property
    def transition_set(self) -> frozenset:
        return frozenset(self.transitions)

    def __len__(self) -> int:
        return len(self.states)

    def __eq__(self, other):
        if not isinstance(other, Automaton):
            return NotImplemented
        return (
            set(self.states) == set(other.states)
            and self.initial == other.initial
            and self.actions == other.actions
            and self.transition_set == other.transition_set
            and self.finals == other.finals
        )

    __hash__ = None


def restrict(A: Automaton, T: Iterable[str], q: State) -> Automaton:
    """``A_{T,q}``: same states and finals, initial ``q``, only T-labelled moves."""
    if q not in A.index:
        raise ValidationError(f"unknown state {q!r}")
    T = frozenset(T)
    return Automaton(
        A.states, q, T, tuple(t for t in A.transitions if t[1] in T), A.finals
    )


def check_id(A: Automaton, alphabet: IndependenceAlphabet) -> list[tuple]:
    """Witnesses ``(q1, a, q2, b, q3)`` of failures of the independent diamond."""
    succ = A.successors
    violations = []
    for q1 in A.states:
        for a, mids in succ[q1].items():
            for q2 in mids:
                for b, ends in succ[q2].items():
                    if not alphabet.independent(a, b):
                        continue
                    for q3 in ends:
                        if not any(q3 in succ[q4].get(a, ()) for q4 in succ[q1].get(b, ())):
                            violations.append((q1, a, q2, b, q3))
    return violations


def accepts(A: Automaton, u: Iterable[str]) -> bool:
    g = A.graph
    current = {A.index[A.initial]}
    for a in u:
        if a not in A.actions:
            raise ValidationError(f"unknown letter {a!r}")
        current = g.image(current, a)
        if not current:
            return False
    return any(A.states[i] in A.finals for i in current)


def enumerate_language(A: Automaton, maxlen: int) -> set[Word]:
    """All accepted words of length at most ``maxlen``.

    Breadth-first over prefixes, carrying the set of states each prefix
    can reach; dead prefixes are dropped.
    """
    if maxlen < 0:
        raise ValueError("maxlen must be non-negative")
    g = A.graph
    final_idx = frozenset(A.index[q] for q in A.finals)
    out: set[Word] = set()
    words: list[Word] = [()]
    sets: list[tuple[int, ...]] = [(A.index[A.initial],)]
    for depth in range(maxlen + 1):
        for word, states in zip(words, sets):
            if not final_idx.isdisjoint(states):
                out.add(word)
        if depth == maxlen or not words:
            break
        next_words, next_sets = [], []
        for word, images in zip(words, g.layer(sets)):
            for a, image in images.items():
                next_words.append(word + (a,))
                next_sets.append(image)
        words, sets = next_words, next_sets
    return out


def enumerate_projected(A: Automaton, maxlen: int, hidden: Iterable) -> set[Word]:
    """Accepted words with the ``hidden`` actions erased, up to length
    ``maxlen`` after erasure.

    Hidden moves act as empty moves: every state set is closed under them
    before and after each visible letter, so the result is exact for any
    number of hidden moves.
    """
    if maxlen < 0:
        raise ValueError("maxlen must be non-negative")
    hidden = frozenset(hidden)
    g = A.graph
    final_idx = frozenset(A.index[q] for q in A.finals)

    def close(states) -> tuple[int, ...]:
        return tuple(sorted(g.reach(states, hidden))) if hidden else tuple(states)

    out: set[Word] = set()
    words: list[Word] = [()]
    sets = [close([A.index[A.initial]])]
    for depth in range(maxlen + 1):
        for word, states in zip(words, sets):
            if not final_idx.isdisjoint(states):
                out.add(word)
        if depth == maxlen or not words:
            break
        next_words, next_sets = [], []
        for word, images in zip(words, g.layer(sets)):
            for a, image in images.items():
                if a not in hidden:
                    next_words.append(word + (a,))
                    next_sets.append(close(image))
        words, sets = next_words, next_sets
    return out


def reach_avoiding(A: Automaton, start: State, forbidden: Iterable[str]) -> frozenset:
    """States reachable from ``start`` along moves labelled outside ``forbidden``."""
    if start not in A.index:
        raise ValidationError(f"unknown state {start!r}")
    forbidden = frozenset(forbidden)
    allowed = [a for a in A.actions if a not in forbidden]
    seen = A.graph.reach([A.index[start]], allowed)
    return frozenset(A.states[i] for i in seen)


def reachable_states(A: Automaton) -> frozenset:
    return reach_avoiding(A, A.initial, ())


def check_morphism(sigma: Mapping, A1: Automaton, A2: Automaton) -> bool:
    """Whether ``sigma`` maps initial to initial, finals into finals and
    every labelled move of ``A1`` onto a move of ``A2``."""
    try:
        if sigma[A1.initial] != A2.initial:
            return False
        if any(sigma[q] not in A2.finals for q in A1.finals):
            return False
        moves = A2.transition_set
        return all((sigma[q], a, sigma[r]) in moves for q, a, r in A1.transitions)
    except KeyError:
        return False


def _dot_id(state) -> str:
    text = state if isinstance(state, str) else repr(state)
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(A: Automaton, name: str = "A", labels: Mapping | None = None) -> str:
    """DOT text; nodes and edges in state index order, so output is stable.

    String states are their own node names; other states are named by
    index.
    """
    idx = A.index

    def node(q) -> str:
        return _dot_id(q if isinstance(q, str) else f"s{idx[q]}")

    lines = [f"digraph {name} {{", "  rankdir=LR;", '  __start [shape=point, label=""];']
    for q in A.states:
        shape = "doublecircle" if q in A.finals else "circle"
        label = labels[q] if labels is not None else (q if isinstance(q, str) else str(idx[q]))
        lines.append(f"  {node(q)} [shape={shape}, label={_dot_id(label)}];")
    lines.append(f"  __start -> {node(A.initial)};")
    for q, a, r in sorted(set(A.transitions), key=lambda t: (idx[t[0]], t[1], idx[t[2]])):
        lines.append(f"  {node(q)} -> {node(r)} [label={_dot_id(a)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
