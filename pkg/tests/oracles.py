"""Independent reference implementations the diagram pipeline is tested
against: a direct step simulator, row-by-row history reconstruction, and
the string-termination map applied to raw tapes.

Nothing here goes near the diagram machinery; keep it that way.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Set, Tuple


@dataclass
class SimRun:
    status: str  # accept | reject | running
    final_state: int
    steps: int  # step index at halt (meaningless when running)
    cells: Dict[int, int]
    alloc: int  # number of allocated cells; marker sits at this index
    head: int


def simulate(spec, s: str, max_steps: int) -> SimRun:
    """Plain configuration stepping with the same end-of-tape allocation the
    compiled diagram performs: reaching the marker blanks it and pushes it
    right before the read."""
    cells = {i: int(c) for i, c in enumerate(s)}
    alloc = len(s) if s else 1  # empty input still allocates one blank cell
    if not s:
        cells[0] = spec.blank
    pos, q = 0, spec.q0
    for step in range(max_steps + 1):
        if q == spec.qa:
            return SimRun("accept", q, step, cells, alloc, pos)
        if q == spec.qr:
            return SimRun("reject", q, step, cells, alloc, pos)
        if step == max_steps:
            break
        if pos == alloc:
            cells[pos] = spec.blank
            alloc += 1
        x = cells.get(pos, spec.blank)
        x2, q2, v = spec.delta[(x, q)]
        cells[pos] = x2
        pos = max(0, pos + (1 if v == 1 else -1))
        q = q2
    return SimRun("running", q, max_steps, cells, alloc, pos)


def simulate_nd(spec, s: str, max_steps: int) -> bool:
    """Breadth-first acceptance for a nondeterministic table."""
    start = (tuple(int(c) for c in s), spec.q0, 0)
    seen = {start}
    frontier = [start]
    for _ in range(max_steps):
        nxt = []
        for tape, q, pos in frontier:
            if q == spec.qa:
                return True
            x = tape[pos] if pos < len(tape) else spec.blank
            for (x2, q2, v) in spec.delta_n.get((x, q), ()):  # noqa: B905
                t = list(tape)
                while len(t) <= pos:
                    t.append(spec.blank)
                t[pos] = x2
                cfg = (tuple(t), q2, max(0, pos + (1 if v == 1 else -1)))
                if cfg not in seen:
                    seen.add(cfg)
                    nxt.append(cfg)
        frontier = nxt
    return any(q == spec.qa for _, q, _ in seen)


def emulated_tape(run: SimRun, blank: int) -> List[int]:
    """Cell values 0..alloc-1 as the history rows carry them."""
    return [run.cells.get(i, blank) for i in range(run.alloc)]


def theta_oracle(tape: List[int], box: int, blank: int) -> FrozenSet[Tuple[int, int]]:
    """The termination map on the pairs {(i, tape[i])} | {(len, box)}:
    adjacent binary cells pass through, a binary-to-filler boundary emits
    the position-and-both-bits terminator, an immediate filler emits the
    empty-string terminator."""
    entries = {i: x for i, x in enumerate(tape)}
    entries[len(tape)] = box
    fillers = {blank, box}
    out: Set[Tuple[int, int]] = set()
    for i, x in entries.items():
        y = entries.get(i + 1)
        if y is None:
            continue
        if x in (0, 1) and y in (0, 1):
            out.add((i, x))
        if x in (0, 1) and y in fillers:
            out.update({(i, x), (i + 1, 0), (i + 1, 1)})
    if entries[0] in fillers:
        out.update({(0, 0), (0, 1)})
    return frozenset(out)


def history_rows(spec, s: str, k_max: int):
    """Reconstruct every history row 0..k_max directly from simulation:
    resting-marked tape cells plus the end marker, one live head entry for
    pre-halt rows, the spreading accept band or the leftward-walking reject
    head afterwards."""
    qe = spec.n_states
    box = spec.n_symbols
    rows = []
    cells: Dict[int, int] = {i: int(c) for i, c in enumerate(s)}
    alloc = len(s) if s else 1
    if not s:
        cells[0] = spec.blank
    pos, q = 0, spec.q0
    halt_step = None
    halt_pos = None
    frozen = None
    frozen_alloc = None
    for k in range(k_max + 1):
        # the end-of-tape repair fires for every state but the two markers;
        # the old marker cell's resting copy survives this one row (the head
        # sits on it, so the next copy pass excludes it)
        stale = None
        if pos == alloc and q != spec.qa:
            stale = (pos, box, qe, k)
            cells[pos] = spec.blank
            alloc += 1
        if halt_step is None and q in (spec.qa, spec.qr):
            halt_step = k
            halt_pos = pos
            frozen = dict(cells)
            frozen_alloc = alloc
        if halt_step is not None and q == spec.qa:
            j = k - halt_step
            lo, hi = max(0, halt_pos - j), min(frozen_alloc, halt_pos + j)
            tape = [frozen.get(i, spec.blank) for i in range(frozen_alloc)] + [box]
            row = {(i, x, qe, k) for i, x in enumerate(tape)}
            row |= {
                (i, tape[i], spec.qa, k)
                for i in range(lo, hi + 1)
            }
            rows.append(row)
            continue
        tape = [cells.get(i, spec.blank) for i in range(alloc)] + [box]
        if stale is not None:
            # resting copies predate the repair: old marker at the head's
            # cell, fresh marker past it, the blank only under the head
            row = {(i, tape[i], qe, k) for i in range(pos)}
            row |= {stale, (pos + 1, box, qe, k), (pos, spec.blank, q, k)}
        else:
            row = {(i, x, qe, k) for i, x in enumerate(tape)}
            row.add((pos, tape[pos], q, k))
        rows.append(row)
        if halt_step is not None:  # reject: walk left without writing
            pos = max(0, pos - 1)
            continue
        x = cells.get(pos, spec.blank)
        x2, q2, v = spec.delta[(x, q)]
        cells[pos] = x2
        pos = max(0, pos + (1 if v == 1 else -1))
        q = q2
    return rows
