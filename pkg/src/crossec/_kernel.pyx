# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twins of the hot solver kernels (see _kernel_py for the spec)."""

BACKEND = "cython"

SLOT_COMP = 0
SLOT_CONST = 1


def shuffle_image(sh, values):
    cdef bint out_tuple = sh[0]
    slots = sh[1]
    cdef Py_ssize_t nslots = len(slots)
    cdef Py_ssize_t i
    cdef long mode, src, shift
    out = []
    if out_tuple:
        modes = [0] * nslots
        srcs = [0] * nslots
        shifts = [0] * nslots
        consts = [None] * nslots
        for i in range(nslots):
            slot = slots[i]
            if slot[0] == SLOT_CONST:
                modes[i] = 1
                consts[i] = slot[1]
            else:
                modes[i] = 0
                srcs[i] = slot[1]
                shifts[i] = slot[2]
        for v in values:
            row = []
            for i in range(nslots):
                if modes[i] == 1:
                    row.append(consts[i])
                else:
                    src = srcs[i]
                    base = v if src == -1 else v[src]
                    shift = shifts[i]
                    row.append(base + shift if shift else base)
            out.append(tuple(row))
        return out
    slot = slots[0]
    if slot[0] == SLOT_CONST:
        c = slot[1]
        return [c for _ in values]
    src = slot[1]
    shift = slot[2]
    if src == -1:
        if shift:
            return [v + shift for v in values]
        return list(values)
    if shift:
        return [v[src] + shift for v in values]
    return [v[src] for v in values]


def close_forced(kind, rhs_counts, watchers, seeds, budget):
    cdef Py_ssize_t n = len(kind)
    cdef long steps = 0
    cdef long cap = budget
    cdef Py_ssize_t qi = 0
    cdef Py_ssize_t j, i
    forced = bytearray(n)
    remaining = list(rhs_counts)
    queue = []
    for s in seeds:
        j = s
        if not forced[j]:
            forced[j] = 1
            queue.append(j)
    while qi < len(queue):
        j = queue[qi]
        qi += 1
        for ii in watchers[j]:
            i = ii
            if forced[i]:
                continue
            steps += 1
            if steps > cap:
                return forced, cap, True
            if kind[i] == 0:
                forced[i] = 1
                queue.append(i)
            else:
                remaining[i] -= 1
                if remaining[i] <= 0:
                    forced[i] = 1
                    queue.append(i)
    return forced, steps, False
