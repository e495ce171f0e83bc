# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled hot loop: fold a stream of arrivals into a final buffer.

Mirrors ebmatch._kernel_py exactly; ebmatch.kernel picks one at import.
"""

from libc.stdlib cimport free, malloc


cdef int _choose(int *word, int n, unsigned long long mask, int policy, row):
    cdef int k, count, best_count, best_cls, cls
    if policy == 0:
        for k in range(n):
            if (mask >> (word[k] - 1)) & 1:
                return k
        return -1
    if policy == 1:
        for k in range(n - 1, -1, -1):
            if (mask >> (word[k] - 1)) & 1:
                return k
        return -1
    if policy == 2:
        for cls_obj in row:
            cls = cls_obj
            for k in range(n):
                if word[k] == cls:
                    return k
        return -1
    best_cls = 0
    best_count = -1
    for cls_obj in row:
        cls = cls_obj
        count = 0
        for k in range(n):
            if word[k] == cls:
                count += 1
        if count == 0:
            continue
        if best_count < 0 or (policy == 3 and count > best_count) or (
            policy == 4 and count < best_count
        ):
            best_cls = cls
            best_count = count
    if best_count < 0:
        return -1
    for k in range(n):
        if word[k] == best_cls:
            return k
    return -1


cdef inline void _delete(int *word, int *length, int pos):
    cdef int k
    for k in range(pos, length[0] - 1):
        word[k] = word[k + 1]
    length[0] -= 1


def final_buffer(int policy, s_masks, c_masks, cs, ss, sigs, gams, init_w, init_z):
    """Final buffer words after feeding all arrivals from ``init``."""
    cdef int n = len(cs)
    cdef int cap = len(init_w) + len(init_z) + n + 1
    cdef int *w = <int *> malloc(cap * sizeof(int))
    cdef int *z = <int *> malloc(cap * sizeof(int))
    cdef int nw = 0, nz = 0
    cdef int t, c, s, pos_s, pos_c
    cdef unsigned long long cmask, smask
    if w == NULL or z == NULL:
        if w != NULL:
            free(w)
        if z != NULL:
            free(z)
        raise MemoryError()
    try:
        for item in init_w:
            w[nw] = item
            nw += 1
        for item in init_z:
            z[nz] = item
            nz += 1
        for t in range(n):
            c = cs[t]
            s = ss[t]
            pos_s = -1
            pos_c = -1
            if c:
                smask = s_masks[c]
                pos_s = _choose(z, nz, smask, policy, sigs[t])
            if s:
                cmask = c_masks[s]
                pos_c = _choose(w, nw, cmask, policy, gams[t])
            if c and s:
                if pos_s >= 0 and pos_c >= 0:
                    _delete(z, &nz, pos_s)
                    _delete(w, &nw, pos_c)
                elif pos_s >= 0:
                    _delete(z, &nz, pos_s)
                    z[nz] = s
                    nz += 1
                elif pos_c >= 0:
                    _delete(w, &nw, pos_c)
                    w[nw] = c
                    nw += 1
                elif not ((smask >> (s - 1)) & 1):
                    w[nw] = c
                    nw += 1
                    z[nz] = s
                    nz += 1
            elif c:
                if pos_s >= 0:
                    _delete(z, &nz, pos_s)
                else:
                    w[nw] = c
                    nw += 1
            elif s:
                if pos_c >= 0:
                    _delete(w, &nw, pos_c)
                else:
                    z[nz] = s
                    nz += 1
        return [w[k] for k in range(nw)], [z[k] for k in range(nz)]
    finally:
        free(w)
        free(z)
