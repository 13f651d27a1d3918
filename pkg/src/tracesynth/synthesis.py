"""Asynchronous automata built on the unfolding.

:func:`synthesize` gives the automaton whose processes all run on copies
of the unfolding and let a process lag behind along moves it does not
take part in.  :func:`build_extended` gives the variant over the
extended alphabet where lagging is made explicit by internal actions
``Internal(a, k)``, erased again by :func:`project_rho`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from .asyncauto import AsyncAutomaton, Distribution, validate_distribution
from .errors import ValidationError
from .traces import IndependenceAlphabet, Word
from .unfold import UnfoldingPiece


class Internal(NamedTuple):
    """Internal action letting process ``process`` replay a move on ``action``."""

    action: str
    process: int

    def __str__(self) -> str:
        return f"({self.action},{self.process})"


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class _UnfoldingIndex:
    """Dense view of an unfolding used by both constructions.

    Local states of the synthesized automata are unfolding state indices;
    ``labels`` turns them back into marked states.
    """

    def __init__(self, unf: UnfoldingPiece):
        self.unf = unf
        self.n = len(unf)
        self.labels = unf.labels
        self.id = {lab: i for i, lab in enumerate(unf.labels)}
        self.final_mask = 0
        for i in unf.final_indices:
            self.final_mask |= 1 << i
        # moves[a][q] = targets of q under a; sources[a] = bitmask of q with an a-move
        self.moves: dict[str, dict[int, list[int]]] = {}
        self.sources: dict[str, int] = {}
        for s, a, t in unf.edges:
            targets = self.moves.setdefault(a, {}).setdefault(s, [])
            if t not in targets:
                targets.append(t)
            self.sources[a] = self.sources.get(a, 0) | (1 << s)

    def index(self, q) -> int:
        try:
            return self.id[q]
        except KeyError:
            raise ValidationError(f"{q!r} is not a state of the unfolding") from None


@dataclass(eq=False)
class SynthesisBundle:
    unfolding: UnfoldingPiece
    distribution: Distribution
    index: _UnfoldingIndex
    _reach: dict[int, list] = field(default_factory=dict)
    async_automaton: AsyncAutomaton | None = None

    def reach_mask(self, k: int, x: int) -> int:
        """Bitmask of unfolding states reachable from ``x`` by moves outside
        the alphabet of process ``k``."""
        row = self._reach.get(k)
        if row is None:
            row = self._reach[k] = [None] * self.index.n
        mask = row[x]
        if mask is None:
            avoid = self.distribution.actions_of(k)
            allowed = [a for a in self.index.moves if a not in avoid]
            mask = 0
            for q in self.unfolding.graph.reach([x], allowed):
                mask |= 1 << q
            row[x] = mask
        return mask

    def process_reach(self, k: int) -> set[tuple]:
        """The relation as pairs of unfolding states."""
        labels = self.index.labels
        return {
            (labels[x], labels[q])
            for x in range(self.index.n)
            for q in _bits(self.reach_mask(k, x))
        }

    @property
    def local_state_counts(self) -> dict[int, int]:
        return {k: len(self.async_automaton.local_states[k - 1]) for k in self.distribution.processes}


def _check_alphabets(unf: UnfoldingPiece, dist: Distribution) -> None:
    if unf.over != frozenset(dist.alphabet.actions):
        raise ValidationError("unfolding and distribution are over different alphabets")


def synthesize(unf: UnfoldingPiece, dist: Distribution) -> SynthesisBundle:
    _check_alphabets(unf, dist)
    idx = _UnfoldingIndex(unf)
    bundle = SynthesisBundle(unf, dist, idx)
    K = list(dist.processes)

    def common_sources(a, t) -> int:
        cand = idx.sources.get(a, 0)
        for k, x in zip(dist.loc(a), t):
            cand &= bundle.reach_mask(k, x)
            if not cand:
                break
        return cand

    def successors(a, t):
        moves = idx.moves.get(a)
        if not moves:
            return []
        width = len(t)
        out: list = []
        seen = set()
        for q in _bits(common_sources(a, t)):
            for r in moves[q]:
                if r not in seen:
                    seen.add(r)
                    out.append((r,) * width)
        return out

    def contains(a, t, r) -> bool:
        if len(set(r)) != 1 or len(r) != len(t):
            return False
        target = r[0]
        moves = idx.moves.get(a, {})
        return any(target in moves[q] for q in _bits(common_sources(a, t)))

    def is_final(g) -> bool:
        cand = idx.final_mask
        for k in K:
            cand &= bundle.reach_mask(k, g[k - 1])
            if not cand:
                return False
        return True

    states = range(idx.n)
    bundle.async_automaton = AsyncAutomaton(
        dist,
        [states] * len(K),
        [0] * len(K),
        successors,
        contains,
        is_final,
    )
    return bundle


def process_reach(unf: UnfoldingPiece, dist: Distribution, k: int) -> set[tuple]:
    if k not in dist.processes:
        raise ValidationError(f"unknown process {k}")
    return synthesize(unf, dist).process_reach(k)


@dataclass(frozen=True)
class ExtendedAlphabet:
    base: IndependenceAlphabet
    alphabet: IndependenceAlphabet
    internal: tuple[Internal, ...]
    distribution: Distribution

    def is_internal(self, x) -> bool:
        return isinstance(x, Internal)


def extend_alphabet(alphabet: IndependenceAlphabet, dist: Distribution) -> ExtendedAlphabet:
    K = list(dist.processes)
    internal = tuple(
        Internal(a, k) for k in K for a in alphabet.actions if a not in dist.actions_of(k)
    )
    actions = tuple(alphabet.actions) + internal

    def dependent(x, y) -> bool:
        if isinstance(x, Internal) and isinstance(y, Internal):
            return x.process == y.process
        if isinstance(x, Internal):
            x, y = y, x
        if isinstance(y, Internal):
            return x in dist.actions_of(y.process)
        return alphabet.dependent(x, y)

    independence = frozenset(
        frozenset((x, y))
        for i, x in enumerate(actions)
        for y in actions[i + 1:]
        if not dependent(x, y)
    )
    ext = IndependenceAlphabet(actions, independence)
    sets = [
        dist.actions_of(k) | {x for x in internal if x.process == k} for k in K
    ]
    return ExtendedAlphabet(alphabet, ext, internal, validate_distribution(ext, sets))


def build_extended(unf: UnfoldingPiece, dist: Distribution) -> AsyncAutomaton:
    _check_alphabets(unf, dist)
    ext = extend_alphabet(dist.alphabet, dist)
    idx = _UnfoldingIndex(unf)

    def successors(x, t):
        a = x.action if isinstance(x, Internal) else x
        moves = idx.moves.get(a)
        if not moves:
            return []
        q = t[0]
        if any(y != q for y in t):
            return []
        return [(r,) * len(t) for r in moves.get(q, ())]

    def contains(x, t, r) -> bool:
        return r in successors(x, tuple(t))

    def is_final(g) -> bool:
        q = g[0]
        return all(y == q for y in g) and (idx.final_mask >> q) & 1 == 1

    K = len(dist)
    states = range(idx.n)
    return AsyncAutomaton(
        ext.distribution, [states] * K, [0] * K, successors, contains, is_final
    )


def project_rho(ext: ExtendedAlphabet, u: Iterable) -> Word:
    """Erase internal actions."""
    out = []
    for x in u:
        if x not in ext.alphabet.position:
            raise ValidationError(f"unknown letter {x!r}")
        if not isinstance(x, Internal):
            out.append(x)
    return tuple(out)


def projected_extended_language(ext: AsyncAutomaton, maxlen: int) -> set[Word]:
    """``ρ(L)`` of an extended automaton, words up to length ``maxlen``.

    Internal actions each move a single process, so closing a product of
    local state sets under them closes every factor separately, and a base
    action maps a product to a union of products.  Sets of global states
    are kept as such unions, which avoids expanding the global automaton.
    Accepting global states are the diagonal ones built by
    :func:`build_extended`.
    """
    dist = ext.distribution
    K = len(dist)
    internal = {k: [x for x in dist.actions_of(k) if isinstance(x, Internal)] for k in dist.processes}
    base = [x for x in dist.alphabet.actions if not isinstance(x, Internal)]
    closures: dict = {}

    def close(k: int, x) -> frozenset:
        key = (k, x)
        out = closures.get(key)
        if out is None:
            seen = {x}
            stack = [x]
            while stack:
                y = stack.pop()
                for a in internal[k]:
                    for (z,) in ext.successors(a, (y,)):
                        if z not in seen:
                            seen.add(z)
                            stack.append(z)
            out = closures[key] = frozenset(seen)
        return out

    def close_product(point) -> tuple:
        return tuple(close(k, x) for k, x in zip(dist.processes, point))

    def step(products, a) -> frozenset:
        loc = dist.loc(a)
        out = set()
        for prod in products:
            common = frozenset.intersection(*(prod[k - 1] for k in loc))
            for q in common:
                for r in ext.successors(a, (q,) * len(loc)):
                    factors = list(prod)
                    for k, y in zip(loc, r):
                        factors[k - 1] = close(k, y)
                    out.add(tuple(factors))
        return frozenset(out)

    def accepting(products) -> bool:
        return any(
            ext.is_final((q,) * K)
            for prod in products
            for q in frozenset.intersection(*prod)
        )

    words: set[Word] = set()
    layer = {(): frozenset([close_product(ext.initial)])}
    for depth in range(maxlen + 1):
        nxt: dict = {}
        for word, products in layer.items():
            if accepting(products):
                words.add(word)
            if depth == maxlen:
                continue
            for a in base:
                image = step(products, a)
                if image:
                    nxt[word + (a,)] = image
        layer = nxt
    return words
