"""Independence alphabets and Mazurkiewicz trace equivalence.

Words are tuples of action names.  A plain string is accepted wherever a
word is expected and is read letter by letter, so ``"ab"`` means
``("a", "b")``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import AbstractSet, Iterable, Sequence

from .errors import ValidationError

Word = tuple[str, ...]
ActionSet = frozenset[str]


def as_word(u: Iterable[str]) -> Word:
    return tuple(u)


@dataclass(frozen=True)
class IndependenceAlphabet:
    """Totally ordered actions with an irreflexive, symmetric independence.

    The order of ``actions`` is the total order used to break ties: the
    first action is the least one.  Use :func:`validate_alphabet` to build
    one from raw data.
    """

    actions: tuple[str, ...]
    independence: frozenset[frozenset[str]] = field(default_factory=frozenset)

    @cached_property
    def position(self) -> dict[str, int]:
        return {a: i for i, a in enumerate(self.actions)}

    @cached_property
    def _dependent_on(self) -> dict[str, frozenset[str]]:
        out = {}
        for a in self.actions:
            out[a] = frozenset(
                b for b in self.actions if frozenset((a, b)) not in self.independence
            )
        return out

    def independent(self, a: str, b: str) -> bool:
        return a != b and frozenset((a, b)) in self.independence

    def dependent(self, a: str, b: str) -> bool:
        # the diagonal is dependent since independence is irreflexive
        return not self.independent(a, b)

    def dependents(self, a: str) -> frozenset[str]:
        return self._dependent_on[a]

    def ordered(self, actions: AbstractSet[str]) -> list[str]:
        return sorted(actions, key=self.position.__getitem__)

    def check_word(self, u: Iterable[str]) -> Word:
        w = tuple(u)
        for a in w:
            if a not in self.position:
                raise ValidationError(f"unknown action {a!r}")
        return w

    def check_actions(self, T: Iterable[str]) -> ActionSet:
        T = frozenset(T)
        unknown = T - set(self.actions)
        if unknown:
            raise ValidationError(f"unknown actions {sorted(unknown)}")
        return T

    def __len__(self) -> int:
        return len(self.actions)


def validate_alphabet(
    actions: Sequence[str], independence: Iterable[Sequence[str]] = ()
) -> IndependenceAlphabet:
    acts = tuple(actions)
    seen: set[str] = set()
    for a in acts:
        if not isinstance(a, str) or not a:
            raise ValidationError(f"action names must be non-empty strings, got {a!r}")
        if a in seen:
            raise ValidationError(f"duplicate action {a!r}")
        seen.add(a)
    pairs = set()
    for pair in independence:
        pair = tuple(pair)
        if len(pair) != 2:
            raise ValidationError(f"independence entry {pair!r} is not a pair")
        a, b = pair
        if a == b:
            raise ValidationError(f"reflexive independence pair ({a}, {b})")
        for x in pair:
            if x not in seen:
                raise ValidationError(f"independence pair mentions unknown action {x!r}")
        pairs.add(frozenset(pair))
    return IndependenceAlphabet(acts, frozenset(pairs))


def connected_components(alphabet: IndependenceAlphabet, T: Iterable[str]) -> list[ActionSet]:
    """Components of the dependence graph restricted to ``T``, by least action."""
    remaining = alphabet.ordered(alphabet.check_actions(T))
    unseen = set(remaining)
    components = []
    for start in remaining:
        if start not in unseen:
            continue
        unseen.discard(start)
        comp = {start}
        stack = [start]
        while stack:
            a = stack.pop()
            for b in alphabet.dependents(a) & unseen:
                unseen.discard(b)
                comp.add(b)
                stack.append(b)
        components.append(frozenset(comp))
    return components


def is_connected(alphabet: IndependenceAlphabet, T: Iterable[str]) -> bool:
    return len(connected_components(alphabet, T)) <= 1


def decomposition(alphabet: IndependenceAlphabet, T: Iterable[str]) -> ActionSet:
    """The dependence component of ``T`` holding its least action."""
    T = alphabet.check_actions(T)
    if not T:
        raise ValidationError("decomposition of an empty action set")
    return connected_components(alphabet, T)[0]


def _minimal_positions(alphabet: IndependenceAlphabet, u: Word) -> list[int]:
    """Positions of letters that can be commuted to the front of ``u``.

    Only the first occurrence of each letter qualifies, so each returned
    position carries a distinct letter.
    """
    out = []
    blocked: set[str] = set()
    for i, a in enumerate(u):
        if a not in blocked:
            out.append(i)
        blocked |= alphabet.dependents(a)
    return out


def normal_form(alphabet: IndependenceAlphabet, u: Iterable[str]) -> Word:
    """Lexicographically least word equivalent to ``u``.

    Greedy: the least letter among those commutable to the front always
    starts the least representative, since every representative has the
    same length.
    """
    rest = list(alphabet.check_word(u))
    pos = alphabet.position
    out = []
    while rest:
        best = min(_minimal_positions(alphabet, tuple(rest)), key=lambda i: pos[rest[i]])
        out.append(rest.pop(best))
    return tuple(out)


def equivalent(alphabet: IndependenceAlphabet, u: Iterable[str], v: Iterable[str]) -> bool:
    u = alphabet.check_word(u)
    v = alphabet.check_word(v)
    if len(u) != len(v) or sorted(u) != sorted(v):
        return False
    return normal_form(alphabet, u) == normal_form(alphabet, v)


def trace_of(alphabet: IndependenceAlphabet, u: Iterable[str]) -> set[Word]:
    """Every word equivalent to ``u`` (the linear extensions of its trace)."""
    u = alphabet.check_word(u)
    out: set[Word] = set()

    def walk(prefix: Word, rest: Word) -> None:
        if not rest:
            out.add(prefix)
            return
        for i in _minimal_positions(alphabet, rest):
            walk(prefix + (rest[i],), rest[:i] + rest[i + 1:])

    walk((), u)
    return out


def trace_closure_bounded(alphabet: IndependenceAlphabet, L: Iterable[Iterable[str]]) -> set[Word]:
    out: set[Word] = set()
    for u in L:
        u = tuple(u)
        if u in out:
            continue
        out |= trace_of(alphabet, u)
    return out


def is_trace_closed(alphabet: IndependenceAlphabet, L: Iterable[Iterable[str]]) -> bool:
    words = {tuple(u) for u in L}
    return trace_closure_bounded(alphabet, words) == words
