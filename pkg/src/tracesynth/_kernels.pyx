# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled exploration kernels; see ``_kernels_py`` for the reference
semantics of every function."""

from libc.stdlib cimport malloc, free
from libc.string cimport memset


cdef list _reach(const long long[:] indptr, const long long[:] labels,
                 const long long[:] targets, const unsigned char[:] allowed,
                 starts, unsigned char* seen, long long* queue):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t head = 0, tail = 0, e
    cdef long long s, t
    for s in starts:
        if s < 0 or s >= n:
            raise IndexError(s)
        if not seen[s]:
            seen[s] = 1
            queue[tail] = s
            tail += 1
    while head < tail:
        s = queue[head]
        head += 1
        for e in range(indptr[s], indptr[s + 1]):
            if allowed[labels[e]]:
                t = targets[e]
                if not seen[t]:
                    seen[t] = 1
                    queue[tail] = t
                    tail += 1
    return [queue[e] for e in range(tail)]


def reach(indptr, labels, targets, allowed, starts):
    cdef Py_ssize_t n = len(indptr) - 1
    cdef unsigned char* seen = <unsigned char*> malloc(n + 1)
    cdef long long* queue = <long long*> malloc((n + 1) * sizeof(long long))
    if seen == NULL or queue == NULL:
        free(seen)
        free(queue)
        raise MemoryError()
    memset(seen, 0, n + 1)
    try:
        return _reach(indptr, labels, targets, allowed, starts, seen, queue)
    finally:
        free(seen)
        free(queue)


def reach_masks(indptr, labels, targets, allowed):
    cdef const long long[:] ip = indptr
    cdef const long long[:] lab = labels
    cdef const long long[:] tgt = targets
    cdef const unsigned char[:] ok = allowed
    cdef Py_ssize_t n = ip.shape[0] - 1
    cdef Py_ssize_t nbytes = (n + 7) // 8
    cdef Py_ssize_t x, head, tail, e
    cdef long long s, t
    cdef unsigned char* seen = <unsigned char*> malloc(n + 1)
    cdef long long* queue = <long long*> malloc((n + 1) * sizeof(long long))
    cdef bytearray buf = bytearray(nbytes)
    cdef unsigned char* bits = buf
    out = []
    if seen == NULL or queue == NULL:
        free(seen)
        free(queue)
        raise MemoryError()
    try:
        for x in range(n):
            memset(seen, 0, n + 1)
            memset(bits, 0, nbytes)
            seen[x] = 1
            queue[0] = x
            head = 0
            tail = 1
            while head < tail:
                s = queue[head]
                head += 1
                bits[s >> 3] |= 1 << (s & 7)
                for e in range(ip[s], ip[s + 1]):
                    if ok[lab[e]]:
                        t = tgt[e]
                        if not seen[t]:
                            seen[t] = 1
                            queue[tail] = t
                            tail += 1
            out.append(int.from_bytes(buf, "little"))
    finally:
        free(seen)
        free(queue)
    return out


def layer_images(indptr, labels, targets, frontier, Py_ssize_t n_actions):
    cdef const long long[:] ip = indptr
    cdef const long long[:] lab = labels
    cdef const long long[:] tgt = targets
    cdef Py_ssize_t n = ip.shape[0] - 1
    cdef Py_ssize_t e, i, a
    cdef long long s, t
    # mark[a * n + t] holds the stamp of the last set that reached t under a
    cdef Py_ssize_t size = n * n_actions + 1
    cdef long long* mark = <long long*> malloc(size * sizeof(long long))
    cdef long long stamp = 0
    cdef list row, bucket
    if mark == NULL:
        raise MemoryError()
    memset(mark, 0, size * sizeof(long long))
    out = []
    try:
        for states in frontier:
            stamp += 1
            row = [[] for _ in range(n_actions)]
            for s in states:
                for e in range(ip[s], ip[s + 1]):
                    a = lab[e]
                    t = tgt[e]
                    i = a * n + t
                    if mark[i] != stamp:
                        mark[i] = stamp
                        bucket = <list> row[a]
                        bucket.append(t)
            out.append([tuple(sorted(r)) for r in row])
    finally:
        free(mark)
    return out
