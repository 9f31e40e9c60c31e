"""Pure-Python implementation of the hot solver kernels.

Mirrors the compiled extension ``crossec._kernel`` exactly; the dispatcher
in :mod:`crossec.kernel` picks whichever is available.
"""

from __future__ import annotations

BACKEND = "python"

SLOT_COMP = 0
SLOT_CONST = 1


def shuffle_image(sh, values):
    """Apply a shuffle program to every value in ``values``."""
    out_tuple, slots = sh
    if out_tuple:
        out = []
        append = out.append
        for v in values:
            row = []
            for slot in slots:
                if slot[0] == SLOT_CONST:
                    row.append(slot[1])
                else:
                    _, src, shift = slot
                    base = v if src == -1 else v[src]
                    row.append(base + shift if shift else base)
            append(tuple(row))
        return out
    slot = slots[0]
    if slot[0] == SLOT_CONST:
        c = slot[1]
        return [c for _ in values]
    _, src, shift = slot
    if src == -1:
        return [v + shift for v in values] if shift else list(values)
    return [v[src] + shift for v in values] if shift else [v[src] for v in values]


def close_forced(kind, rhs_counts, watchers, seeds, budget):
    """Monotone Boolean forcing closure over an indexed constraint table.

    ``kind[i]`` is 0 for disjunction, 1 for conjunction; ``rhs_counts[i]``
    is the number of RHS variables of constraint ``i``; ``watchers[j]``
    lists the constraint indices with variable ``j`` on their RHS.
    ``seeds`` are the initially forced variables.

    One elementary step is one evaluation of a constraint against the
    current forced set.  Returns ``(forced_flags, steps, exhausted)``.
    """
    n = len(kind)
    forced = bytearray(n)
    remaining = list(rhs_counts)
    queue = []
    for s in seeds:
        if not forced[s]:
            forced[s] = 1
            queue.append(s)
    steps = 0
    qi = 0
    while qi < len(queue):
        j = queue[qi]
        qi += 1
        for i in watchers[j]:
            if forced[i]:
                continue
            steps += 1
            if steps > budget:
                return forced, budget, True
            if kind[i] == 0:
                forced[i] = 1
                queue.append(i)
            else:
                remaining[i] -= 1
                if remaining[i] <= 0:
                    forced[i] = 1
                    queue.append(i)
    return forced, steps, False
