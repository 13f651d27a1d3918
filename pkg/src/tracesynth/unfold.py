"""Boxes, triangles and the unfolding of an automaton.

A state of a box or triangle is a :data:`MarkedState`: either
``Base(q)`` for the lone state of a height-0 box, or
``Marked(inner, actions, anchor, rank)`` for a state ``inner`` of the
piece over ``actions`` anchored at ``anchor``, inserted as the
``rank``-th copy.  Its image in the source automaton is always the image
of ``inner``, down to the ``Base`` at the bottom.

Every piece is built once per :class:`Unfolder` and cached, so the
triangles scanned for missing transitions are exactly the ones copied
into boxes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import chain
from typing import Hashable, NamedTuple, Union

from .automata import Automaton
from .errors import CapExceeded, ValidationError
from .kernels import Graph
from .traces import ActionSet, IndependenceAlphabet, decomposition, is_connected


class Base(NamedTuple):
    state: Hashable


class Marked(NamedTuple):
    inner: "MarkedState"
    actions: ActionSet
    anchor: Hashable
    rank: int


MarkedState = Union[Base, Marked]

BOX = "box"
TRIANGLE = "triangle"


@dataclass(eq=False)
class UnfoldingPiece:
    """A box or triangle with its morphism into the source automaton.

    States are dense indices; ``labels[i]`` is the marked state of index
    ``i`` and ``image[i]`` its source state index.  Index 0 is initial.
    """

    kind: str
    over: ActionSet
    anchor: Hashable
    source: Automaton
    labels: list
    image: list[int]
    edges: list[tuple[int, str, int]]
    # connected boxes only: copies per triangle, the ranks given to the
    # copies of each anchor before Clean, and the transitions added between
    # copies as (source label, action, target label)
    copies: int = 0
    ranks: dict = field(default_factory=dict)
    added: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def initial(self) -> MarkedState:
        return self.labels[0]

    @cached_property
    def graph(self) -> Graph:
        return Graph.from_edges(len(self.labels), self.edges)

    @cached_property
    def final_indices(self) -> frozenset[int]:
        src_finals = self.source.finals
        states = self.source.states
        return frozenset(i for i, p in enumerate(self.image) if states[p] in src_finals)

    @cached_property
    def automaton(self) -> Automaton:
        labels = self.labels
        return Automaton(
            labels,
            labels[0],
            self.over,
            tuple((labels[s], a, labels[t]) for s, a, t in self.edges),
            frozenset(labels[i] for i in self.final_indices),
        )

    @cached_property
    def morphism(self) -> dict:
        states = self.source.states
        return {lab: states[p] for lab, p in zip(self.labels, self.image)}


class _Builder:
    """Mutable piece under construction (Insert / Add / Mark)."""

    def __init__(self, cap: int | None = None):
        self.cap = cap
        self.labels: list = []
        self.image: list[int] = []
        self.edges: list[tuple[int, str, int]] = []

    def insert(self, piece: UnfoldingPiece, actions: ActionSet, anchor, rank: int) -> int:
        """Insert a copy of ``piece`` marked with ``(actions, anchor, rank)``;
        return the index offset of the copy."""
        offset = len(self.labels)
        if self.cap is not None and offset + len(piece.labels) > self.cap:
            raise CapExceeded(self.cap, "states in one box or triangle")
        self.labels.extend(Marked(w, actions, anchor, rank) for w in piece.labels)
        self.image.extend(piece.image)
        self.edges.extend((s + offset, a, t + offset) for s, a, t in piece.edges)
        return offset

    def add(self, s: int, a: str, t: int) -> None:
        self.edges.append((s, a, t))


def marked_image(label: MarkedState):
    """Source state a marked state stands for."""
    while isinstance(label, Marked):
        label = label.inner
    return label.state


def min_rank(actions: ActionSet, anchor, piece_labels, k: int) -> int:
    """Least rank of a copy of the triangle over ``actions`` at ``anchor``
    among ``piece_labels``; ``k + 1`` when there is none."""
    f = k + 1
    for v in piece_labels:
        if isinstance(v, Marked) and v.anchor == anchor and v.actions == actions and v.rank < f:
            f = v.rank
    return f


class Unfolder:
    """Builds and caches every box and triangle of one source automaton.

    ``cap`` bounds the size of any single piece under construction
    (:class:`CapExceeded` beyond it); ``None`` means unbounded.
    """

    def __init__(self, alphabet: IndependenceAlphabet, source: Automaton, cap: int | None = None):
        unknown = source.actions - set(alphabet.actions)
        if unknown:
            raise ValidationError(f"automaton uses actions outside the alphabet: {sorted(unknown)}")
        self.alphabet = alphabet
        self.source = source
        self.cap = cap
        n = len(source.states)
        idx = source.index
        # moves[p][a] = set of target indices
        self._moves: list[dict[str, set[int]]] = [{} for _ in range(n)]
        for q, a, r in source.transitions:
            self._moves[idx[q]].setdefault(a, set()).add(idx[r])
        self._boxes: dict[tuple[ActionSet, int], UnfoldingPiece] = {}
        self._triangles: dict[tuple[ActionSet, int], UnfoldingPiece] = {}
        self._top: dict[tuple[ActionSet, int], list[tuple[int, str, int]]] = {}
        self._mod: dict[ActionSet, int] = {}

    def _state_index(self, q) -> int:
        try:
            return self.source.index[q]
        except KeyError:
            raise ValidationError(f"unknown state {q!r}") from None

    def _actions(self, T) -> ActionSet:
        return self.alphabet.check_actions(T)

    def _fires(self, p: int, actions: list[str]):
        """``(q', a)`` with ``p -a-> q'``, states in input order, actions in
        the order given."""
        moves = self._moves[p]
        for q2 in range(len(self.source.states)):
            for a in actions:
                if q2 in moves.get(a, ()):
                    yield q2, a

    # -- height 0 ---------------------------------------------------------

    def base_box(self, q) -> UnfoldingPiece:
        return self._base_box(self._state_index(q))

    def _base_box(self, p: int) -> UnfoldingPiece:
        key = (frozenset(), p)
        piece = self._boxes.get(key)
        if piece is None:
            q = self.source.states[p]
            piece = UnfoldingPiece(BOX, frozenset(), q, self.source, [Base(q)], [p], [])
            self._boxes[key] = piece
        return piece

    # -- triangles ----------------------------------------------------------

    def build_triangle(self, T, q) -> UnfoldingPiece:
        T = self._actions(T)
        if not T:
            raise ValidationError("triangles need a non-empty action set")
        return self._triangle(T, self._state_index(q))

    def _triangle(self, T0: ActionSet, p0: int) -> UnfoldingPiece:
        key = (T0, p0)
        piece = self._triangles.get(key)
        if piece is not None:
            return piece
        states = self.source.states
        q0 = states[p0]
        tri = _Builder(self.cap)
        tri.insert(self._base_box(p0), frozenset(), q0, 1)
        k = 1
        for h in range(1, len(T0)):
            for v in range(len(tri.labels)):
                label = tri.labels[v]
                T = label.actions
                if len(T) != h - 1:
                    continue
                for q2, a in self._fires(tri.image[v], self.alphabet.ordered(T0 - T)):
                    T2 = T | {a}
                    box = self._box(T2, q2)
                    k += 1
                    offset = tri.insert(box, T2, states[q2], k)
                    tri.add(v, a, offset)
        piece = UnfoldingPiece(TRIANGLE, T0, q0, self.source, tri.labels, tri.image, tri.edges)
        self._triangles[key] = piece
        return piece

    # -- missing transitions ------------------------------------------------

    def _top_states(self, T0: ActionSet, p: int) -> list[tuple[int, str, int]]:
        """``(w, a, image)`` for triangle states inserted at the top height;
        ``a`` is the one action of ``T0`` their box does not cover."""
        key = (T0, p)
        top = self._top.get(key)
        if top is None:
            tri = self._triangle(T0, p)
            top = []
            for w, label in enumerate(tri.labels):
                if len(label.actions) == len(T0) - 1:
                    (a,) = T0 - label.actions
                    top.append((w, a, tri.image[w]))
            self._top[key] = top
        return top

    def _missing(self, T0: ActionSet, p: int, p2: int) -> list[tuple[int, str]]:
        moves = self._moves
        return [(w, a) for w, a, img in self._top_states(T0, p) if p2 in moves[img].get(a, ())]

    def missing(self, T, q, q2) -> list[tuple[MarkedState, str]]:
        """Missing transitions from the triangle over ``T`` at ``q`` towards
        source state ``q2``, as ``(triangle state, action)`` in state order."""
        T0 = self._actions(T)
        if not T0:
            raise ValidationError("missing transitions need a non-empty action set")
        p, p2 = self._state_index(q), self._state_index(q2)
        labels = self._triangle(T0, p).labels
        return [(labels[w], a) for w, a in self._missing(T0, p, p2)]

    def max_out_degree(self, T) -> int:
        T0 = self._actions(T)
        if not T0:
            raise ValidationError("max_out_degree needs a non-empty action set")
        return self._max_out_degree(T0)

    def _max_out_degree(self, T0: ActionSet) -> int:
        m = self._mod.get(T0)
        if m is None:
            n = len(self.source.states)
            m = 0
            for p in range(n):
                for p2 in range(n):
                    m = max(m, len(self._missing(T0, p, p2)))
            self._mod[T0] = m
        return m

    # -- boxes --------------------------------------------------------------

    def build_box(self, T, q) -> UnfoldingPiece:
        return self._box(self._actions(T), self._state_index(q))

    def _box(self, T0: ActionSet, p0: int) -> UnfoldingPiece:
        if not T0:
            return self._base_box(p0)
        key = (T0, p0)
        piece = self._boxes.get(key)
        if piece is None:
            if is_connected(self.alphabet, T0):
                piece = self._connected_box(T0, p0)
            else:
                piece = self._unconnected_box(T0, p0)
            self._boxes[key] = piece
        return piece

    def _connected_box(self, T0: ActionSet, p0: int) -> UnfoldingPiece:
        states = self.source.states
        n = len(states)
        box = _Builder(self.cap)
        m = self._max_out_degree(T0) + 1
        k = 0
        offsets: dict[tuple[int, int], int] = {}
        first_rank: dict[int, int] = {}
        ranks: dict = {}
        for p in chain((p0,), (p for p in range(n) if p != p0)):
            tri = self._triangle(T0, p)
            first_rank[p] = k + 1
            for _ in range(m):
                k += 1
                offsets[p, k] = box.insert(tri, T0, states[p], k)
                ranks.setdefault(states[p], []).append(k)
        added = []
        for p in range(n):
            for p2 in range(n):
                M = self._missing(T0, p, p2)
                if not M:
                    continue
                f = first_rank[p] - 1
                f2 = first_rank[p2] - 1
                for j in range(1, m + 1):
                    c = 0
                    for w, a in M:
                        c += 1
                        if f + j == f2 + c:
                            c += 1
                        assert c <= m, "copy counter overran the copies of a triangle"
                        s = offsets[p, f + j] + w
                        t = offsets[p2, f2 + c]
                        box.add(s, a, t)
                        added.append((box.labels[s], a, box.labels[t]))
        piece = _clean(box)
        return UnfoldingPiece(
            BOX, T0, states[p0], self.source, piece.labels, piece.image, piece.edges,
            copies=m, ranks=ranks, added=added,
        )

    def _unconnected_box(self, T0: ActionSet, p0: int) -> UnfoldingPiece:
        states = self.source.states
        T1 = decomposition(self.alphabet, T0)
        T2 = T0 - T1
        inner = self._box(T2, p0)
        box = _Builder(self.cap)
        box.insert(inner, T2, states[p0], 1)
        k = 1
        order = self.alphabet.ordered(T1)
        for w in range(len(inner.labels)):
            for q2, a in self._fires(inner.image[w], order):
                k += 1
                offset = box.insert(self._box(T1, q2), T1, states[q2], k)
                box.add(w, a, offset)
        return UnfoldingPiece(BOX, T0, states[p0], self.source, box.labels, box.image, box.edges)

    def unfolding(self) -> UnfoldingPiece:
        return self._box(frozenset(self.alphabet.actions), self.source.index[self.source.initial])

    # -- introspection ------------------------------------------------------

    def triangles(self) -> dict[tuple[ActionSet, Hashable], UnfoldingPiece]:
        states = self.source.states
        return {(T, states[p]): t for (T, p), t in self._triangles.items()}

    def boxes(self) -> dict[tuple[ActionSet, Hashable], UnfoldingPiece]:
        states = self.source.states
        return {(T, states[p]): b for (T, p), b in self._boxes.items()}


def _clean(box: _Builder) -> _Builder:
    """Drop states unreachable from index 0, keeping the relative order."""
    g = Graph.from_edges(len(box.labels), box.edges)
    keep = sorted(g.reach([0]))
    if len(keep) == len(box.labels):
        return box
    new_index = {old: new for new, old in enumerate(keep)}
    out = _Builder()
    out.labels = [box.labels[i] for i in keep]
    out.image = [box.image[i] for i in keep]
    out.edges = [
        (new_index[s], a, new_index[t]) for s, a, t in box.edges if s in new_index
    ]
    return out


def unfolding(alphabet: IndependenceAlphabet, A: Automaton, cap: int | None = None) -> UnfoldingPiece:
    """The box over the whole alphabet anchored at the initial state."""
    return Unfolder(alphabet, A, cap).unfolding()
