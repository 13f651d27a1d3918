"""Backend selection for the exploration kernels.

The compiled extension ``tracesynth._kernels`` is used when it was built;
otherwise the pure-Python twins are used.  Set ``TRACESYNTH_PURE=1`` to
force the fallback.
"""

from __future__ import annotations

import os
from array import array
from typing import Iterable

from . import _kernels_py

try:
    if os.environ.get("TRACESYNTH_PURE"):
        raise ImportError("pure backend requested")
    from . import _kernels as _backend  # type: ignore[attr-defined]

    BACKEND = "cython"
except ImportError:
    _backend = _kernels_py
    BACKEND = "python"

reach = _backend.reach
reach_masks = _backend.reach_masks
layer_images = _backend.layer_images


class Graph:
    """Edge-labelled digraph over ``range(n)`` in CSR form.

    Edge order inside a source row follows insertion order.
    """

    __slots__ = ("n", "actions", "action_id", "indptr", "labels", "targets", "_succ")

    def __init__(self, n: int, actions: list[str], indptr, labels, targets):
        self.n = n
        self.actions = actions
        self.action_id = {a: i for i, a in enumerate(actions)}
        self.indptr = indptr
        self.labels = labels
        self.targets = targets
        self._succ = None

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, str, int]]) -> "Graph":
        rows: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        action_id: dict[str, int] = {}
        for s, a, t in edges:
            aid = action_id.setdefault(a, len(action_id))
            rows[s].append((aid, t))
        indptr = array("q", [0])
        labels = array("q")
        targets = array("q")
        for row in rows:
            for aid, t in row:
                labels.append(aid)
                targets.append(t)
            indptr.append(len(labels))
        return cls(n, list(action_id), indptr, labels, targets)

    def allowed(self, actions: Iterable[str]) -> bytes:
        mask = bytearray(len(self.actions))
        for a in actions:
            i = self.action_id.get(a)
            if i is not None:
                mask[i] = 1
        return bytes(mask)

    def reach(self, starts: Iterable[int], actions: Iterable[str] | None = None) -> list[int]:
        allowed = b"\x01" * len(self.actions) if actions is None else self.allowed(actions)
        return reach(self.indptr, self.labels, self.targets, allowed, list(starts))

    def reach_masks(self, actions: Iterable[str]) -> list[int]:
        return reach_masks(self.indptr, self.labels, self.targets, self.allowed(actions))

    @property
    def succ(self) -> list[dict[str, tuple[int, ...]]]:
        if self._succ is None:
            succ = []
            ip, lab, tgt, acts = self.indptr, self.labels, self.targets, self.actions
            for s in range(self.n):
                row: dict[str, list[int]] = {}
                for e in range(ip[s], ip[s + 1]):
                    row.setdefault(acts[lab[e]], []).append(tgt[e])
                succ.append({a: tuple(v) for a, v in row.items()})
            self._succ = succ
        return self._succ

    def image(self, states: Iterable[int], a: str) -> set[int]:
        succ = self.succ
        out: set[int] = set()
        for s in states:
            out.update(succ[s].get(a, ()))
        return out

    def layer(self, frontier: list[tuple[int, ...]]) -> list[dict[str, tuple[int, ...]]]:
        rows = layer_images(self.indptr, self.labels, self.targets, frontier, len(self.actions))
        acts = self.actions
        return [{acts[i]: img for i, img in enumerate(row) if img} for row in rows]
