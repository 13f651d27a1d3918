"""Pure-Python versions of the exploration kernels.

Every function here has a twin in ``_kernels.pyx`` with the same
signature and the same result; ``kernels`` picks one at import.
Graphs are passed in CSR form: the outgoing edges of state ``s`` are
``labels[indptr[s]:indptr[s + 1]]`` / ``targets[...]``.
"""

from collections import deque


def reach(indptr, labels, targets, allowed, starts):
    """States reachable from ``starts`` along edges whose label id has a
    non-zero entry in ``allowed``; returned in BFS discovery order."""
    n = len(indptr) - 1
    seen = bytearray(n)
    order = []
    queue = deque()
    for s in starts:
        if not seen[s]:
            seen[s] = 1
            order.append(s)
            queue.append(s)
    while queue:
        s = queue.popleft()
        for e in range(indptr[s], indptr[s + 1]):
            if allowed[labels[e]]:
                t = targets[e]
                if not seen[t]:
                    seen[t] = 1
                    order.append(t)
                    queue.append(t)
    return order


def reach_masks(indptr, labels, targets, allowed):
    """For every state x, the set of states reachable from x along allowed
    edges, as an int bitmask (bit q set iff q is reachable)."""
    n = len(indptr) - 1
    out = []
    for x in range(n):
        mask = 0
        for q in reach(indptr, labels, targets, allowed, (x,)):
            mask |= 1 << q
        out.append(mask)
    return out


def layer_images(indptr, labels, targets, frontier, n_actions):
    """One step of subset simulation for a batch of state sets.

    ``frontier`` is a list of tuples of states; the result holds, for each
    input set and each label id, the sorted tuple of successor states.
    """
    out = []
    for states in frontier:
        row = [set() for _ in range(n_actions)]
        for s in states:
            for e in range(indptr[s], indptr[s + 1]):
                row[labels[e]].add(targets[e])
        out.append([tuple(sorted(r)) for r in row])
    return out
