"""Pure-Python hot loop: fold a stream of arrivals into a final buffer.

Mirrors ebmatch._ckernel exactly; ebmatch.kernel picks one at import.
Adjacency is passed as bitmasks (bit k-1 set when class k is compatible),
policies as codes: 0 fcfs, 1 lcfs, 2 rand, 3 ml, 4 ms.  Entries of 0 in
the class streams mean no arrival on that side at that step.
"""


def _choose(word, mask, policy, row):
    n = len(word)
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
        for cls in row:
            for k in range(n):
                if word[k] == cls:
                    return k
        return -1
    # ml / ms: extreme count, ties broken by row order, oldest of the class
    best_cls = 0
    best_count = -1
    for cls in row:
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


def final_buffer(policy, s_masks, c_masks, cs, ss, sigs, gams, init_w, init_z):
    """Final buffer words after feeding all arrivals from ``init``.

    ``s_masks[c]`` is the server bitmask of customer class c, ``c_masks[s]``
    the customer bitmask of server class s.  ``sigs``/``gams`` hold one
    preference row per step (ignored for policies 0 and 1).
    """
    w = list(init_w)
    z = list(init_z)
    n = len(cs)
    for t in range(n):
        c = cs[t]
        s = ss[t]
        pos_s = _choose(z, s_masks[c], policy, sigs[t]) if c else -1
        pos_c = _choose(w, c_masks[s], policy, gams[t]) if s else -1
        if c and s:
            if pos_s >= 0 and pos_c >= 0:
                del z[pos_s]
                del w[pos_c]
            elif pos_s >= 0:
                del z[pos_s]
                z.append(s)
            elif pos_c >= 0:
                del w[pos_c]
                w.append(c)
            elif not ((s_masks[c] >> (s - 1)) & 1):
                w.append(c)
                z.append(s)
        elif c:
            if pos_s >= 0:
                del z[pos_s]
            else:
                w.append(c)
        elif s:
            if pos_c >= 0:
                del w[pos_c]
            else:
                z.append(s)
    return w, z
