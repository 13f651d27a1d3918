"""Literal re-execution of the box and triangle pseudocode.

Deliberately naive: pieces are (states, initial, transitions, image) with
states as nested tuples ``(w, T, q, k)``, nothing is indexed and nothing is
shared with the library beyond plain data.  Only for tiny instances.
"""

from functools import lru_cache
from itertools import combinations


class Oracle:
    def __init__(self, actions, independence, states, initial, transitions, finals):
        self.actions = list(actions)
        self.indep = {frozenset(p) for p in independence}
        self.Q = list(states)
        self.initial = initial
        self.delta = set(map(tuple, transitions))
        self.finals = set(finals)
        self.box = lru_cache(maxsize=None)(self._box)
        self.triangle = lru_cache(maxsize=None)(self._triangle)

    def dep(self, a, b):
        return a == b or frozenset((a, b)) not in self.indep

    def connected(self, T):
        T = set(T)
        if not T:
            return False
        start = min(T, key=self.actions.index)
        seen, todo = {start}, [start]
        while todo:
            x = todo.pop()
            for y in T:
                if y not in seen and self.dep(x, y):
                    seen.add(y)
                    todo.append(y)
        return seen == T

    def decomposition(self, T):
        # component containing the least action
        T = set(T)
        start = min(T, key=self.actions.index)
        seen, todo = {start}, [start]
        while todo:
            x = todo.pop()
            for y in T:
                if y not in seen and self.dep(x, y):
                    seen.add(y)
                    todo.append(y)
        return frozenset(seen)

    @staticmethod
    def mark(piece, T, q, k):
        states, init, trans, image = piece
        m = lambda w: (w, T, q, k)
        return ([m(w) for w in states], m(init), {(m(s), a, m(t)) for s, a, t in trans},
                {m(w): image[w] for w in states})

    @staticmethod
    def insert(target, piece):
        target[0].extend(piece[0])
        target[2].update(piece[2])
        target[3].update(piece[3])

    def _box(self, T, q):
        if not T:
            return ([q], q, set(), {q: q})
        if self.connected(T):
            return self._connected(T, q)
        T1 = self.decomposition(T)
        T2 = T - T1
        B0 = self.box(T2, q)
        B = self.mark(B0, T2, q, 1)
        B = (list(B[0]), B[1], set(B[2]), dict(B[3]))
        k = 1
        for w in B0[0]:
            for q2 in self.Q:
                for a in [x for x in self.actions if x in T1]:
                    if (B0[3][w], a, q2) in self.delta:
                        k += 1
                        Bp = self.mark(self.box(T1, q2), T1, q2, k)
                        self.insert(B, Bp)
                        B[2].add(((w, T2, q, 1), a, Bp[1]))
        return B

    def _triangle(self, T0, q0):
        base = self.box(frozenset(), q0)
        T = self.mark(base, frozenset(), q0, 1)
        T = (list(T[0]), T[1], set(T[2]), dict(T[3]))
        k = 1
        for h in range(1, len(T0)):
            for v in [v for v in T[0] if len(v[1]) == h - 1]:
                w, Tv, qv, _ = v
                for q2 in self.Q:
                    for a in [x for x in self.actions if x in T0 - Tv]:
                        if (T[3][v], a, q2) in self.delta:
                            T2 = Tv | {a}
                            k += 1
                            Bp = self.mark(self.box(frozenset(T2), q2), frozenset(T2), q2, k)
                            self.insert(T, Bp)
                            T[2].add((v, a, Bp[1]))
        return T

    def missing(self, T0, q, q2):
        states, _, _, image = self.triangle(T0, q)
        M = []
        for w in states:
            if len(w[1]) == len(T0) - 1:
                for a in T0 - w[1]:
                    if (image[w], a, q2) in self.delta:
                        M.append((w, a))
        return M

    def max_out_degree(self, T0):
        return max(len(self.missing(T0, q, q2)) for q in self.Q for q2 in self.Q)

    def _connected(self, T0, q0):
        B = ([], None, set(), {})
        k = 0
        m = self.max_out_degree(T0) + 1
        for q in [q0] + [p for p in self.Q if p != q0]:
            tri = self.triangle(T0, q)
            for _ in range(m):
                k += 1
                self.insert(B, self.mark(tri, T0, q, k))
        init = (self.triangle(T0, q0)[1], T0, q0, 1)

        def min_rank(q):
            f = k + 1
            for v in B[0]:
                if v[2] == q and v[1] == T0 and v[3] < f:
                    f = v[3]
            return f

        for q in self.Q:
            for q2 in self.Q:
                M = self.missing(T0, q, q2)
                f = min_rank(q) - 1
                f2 = min_rank(q2) - 1
                for j in range(1, m + 1):
                    c = 0
                    for w, a in M:
                        c += 1
                        if f + j == f2 + c:
                            c += 1
                        B[2].add(((w, T0, q, f + j), a, (self.triangle(T0, q2)[1], T0, q2, f2 + c)))
        # Clean
        reach, todo = {init}, [init]
        while todo:
            s = todo.pop()
            for x, a, t in B[2]:
                if x == s and t not in reach:
                    reach.add(t)
                    todo.append(t)
        return ([v for v in B[0] if v in reach], init,
                {t for t in B[2] if t[0] in reach}, {v: B[3][v] for v in reach})

    def unfolding(self):
        return self.box(frozenset(self.actions), self.initial)

    def all_subsets(self):
        for n in range(len(self.actions) + 1):
            for T in combinations(self.actions, n):
                yield frozenset(T)
