"""Cross-section production: worklist fixed points, graded row iteration,
finite section enumeration and minimization.

Cycle policy: a cyclic strongly-connected component is solved by a
semi-naive worklist when it consists solely of union-marked nodes and
image/preimage arrows; when every node on it carries a grading it is
solved row by row up to the grade cap.  Anything else is rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iter_product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .bounds import SolverBounds, in_window
from .diagram import CheckReport, CrossSection, Diagram, check_section, constraint_value
from .maps import Proj, apply_arrow, apply_point, compile_point
from .subsets import Ext, FunCond, Int, PinCond, Subset, combine, materialize
from .values import DomainError, Prod, Universe, value_key, value_to_text


class SolverError(Exception):
    pass


class Underdetermined(SolverError):
    pass


class NonMonotoneCycle(SolverError):
    pass


class MissingGrading(SolverError):
    pass


class GradingViolated(SolverError):
    def __init__(self, node, value, level):
        self.node, self.value, self.level = node, value, level
        super().__init__(
            f"grading violated at {node}: element {value_to_text(value)} "
            f"generated at row {level} has a smaller grade"
        )


@dataclass(frozen=True)
class FreeSpec:
    """Finite candidate assignments for the nodes not pinned or solvable."""

    candidates: Dict[str, Tuple[Subset, ...]]


@dataclass
class TraceLog:
    steps: List[dict] = field(default_factory=list)

    def add(self, node: str, value, arrow: Optional[int]) -> None:
        self.steps.append({"node": node, "value": value_to_text(value), "arrow": arrow})


# ---------------------------------------------------------------------------
# condensation


def _sccs(d: Diagram, pinned) -> List[List[str]]:
    """Tarjan SCCs of the node dependency graph, in topological order.

    Edges into pinned (anchored) nodes are dropped: an anchored value never
    depends on its inputs, so anchors cut cycles.
    """
    succ: Dict[str, List[str]] = {nid: [] for nid in d.nodes}
    for a in d.arrows:
        if a.dst not in pinned:
            succ[a.src].append(a.dst)
    index: Dict[str, int] = {}
    low: Dict[str, int] = {}
    onstack: Dict[str, bool] = {}
    stack: List[str] = []
    out: List[List[str]] = []
    counter = [0]

    def strongconnect(v: str):
        work = [(v, 0)]
        while work:
            node, pi = work.pop()
            if pi == 0:
                index[node] = low[node] = counter[0]
                counter[0] += 1
                stack.append(node)
                onstack[node] = True
            recurse = False
            kids = succ[node]
            while pi < len(kids):
                w = kids[pi]
                pi += 1
                if w not in index:
                    work.append((node, pi))
                    work.append((w, 0))
                    recurse = True
                    break
                if onstack.get(w):
                    low[node] = min(low[node], index[w])
            if recurse:
                continue
            if low[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    onstack[w] = False
                    comp.append(w)
                    if w == node:
                        break
                out.append(sorted(comp))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])

    for nid in d.nodes:
        if nid not in index:
            strongconnect(nid)
    return out  # Tarjan emits in reverse topological order; callers reverse


def _has_cycle(d: Diagram, comp: List[str], pinned) -> bool:
    if len(comp) > 1:
        return True
    nid = comp[0]
    if nid in pinned:
        return False
    return any(a.src == a.dst == nid for a in d.arrows)


# ---------------------------------------------------------------------------
# entry points


def solve_least(d: Diagram, anchors: Dict[str, Subset], bounds: SolverBounds, trace=None) -> CrossSection:
    """Least section: cycles must be union-only (Kleene worklist)."""
    return _solve(d, anchors, bounds, mode="least", trace=trace)


def solve_graded(d: Diagram, anchors: Dict[str, Subset], bounds: SolverBounds, trace=None) -> CrossSection:
    """Row-by-row section up to the grade cap (graded cycles only)."""
    return _solve(d, anchors, bounds, mode="graded", trace=trace)


def solve_auto(d: Diagram, anchors: Dict[str, Subset], bounds: SolverBounds, trace=None) -> CrossSection:
    """Per-component dispatch: graded rows where declared, else worklist."""
    return _solve(d, anchors, bounds, mode="auto", trace=trace)


def _solve(d: Diagram, anchors: Dict[str, Subset], bounds: SolverBounds, mode: str, trace) -> CrossSection:
    assignment: Dict[str, Subset] = {}
    for nid, sub in anchors.items():
        node = d.node(nid)
        if sub.universe != node.universe:
            raise SolverError(f"anchor for {nid} lives over {sub.universe}, node has {node.universe}")
        assignment[nid] = sub
    pinned = set(anchors)

    for nid in d.source_nodes():
        if nid not in pinned:
            raise Underdetermined(f"source node {nid} is not anchored")

    truncated = False
    comps = list(reversed(_sccs(d, pinned)))
    for comp in comps:
        live = [nid for nid in comp if nid not in pinned]
        if not live:
            continue
        if not _has_cycle(d, comp, pinned):
            nid = live[0]
            assignment[nid] = constraint_value(d, assignment, nid, bounds)
            continue
        graded = all(d.node(nid).grading is not None for nid in live)
        union_only = all(d.node(nid).union_marked for nid in live) and all(
            a.kind != "cmpl" for a in d.arrows if a.src in comp and a.dst in comp
        )
        if mode == "least" or (mode == "auto" and not graded):
            if not union_only:
                raise NonMonotoneCycle(
                    f"cycle through {comp} has an intersection node or complement arrow "
                    "and no grading"
                )
            truncated |= _worklist_scc(d, assignment, comp, live, bounds, trace)
        elif mode == "graded" or (mode == "auto" and graded):
            if not graded:
                raise MissingGrading(f"cycle through {comp} lacks grading declarations")
            truncated |= _graded_scc(d, assignment, comp, live, bounds, trace)
    section = CrossSection(assignment, provenance="solved", truncated=truncated)
    return section


# ---------------------------------------------------------------------------
# union-only worklist


def _apply(d: Diagram, a, src_sub: Subset, bounds: SolverBounds) -> Subset:
    """Arrow application with intensional sources normalized for images."""
    if a.kind == "fwd" and isinstance(src_sub, Int):
        src_sub = materialize(src_sub, bounds)
    return apply_arrow(a, src_sub, d.node(a.src).universe, d.node(a.dst).universe, d.maps, bounds)


def _outside_seed(d: Diagram, assignment, live_set, nid, bounds) -> List:
    node = d.node(nid)
    vals = set()
    for aid in d.in_arrows(nid):
        a = d.arrows[aid]
        if a.src in live_set:
            continue
        img = _apply(d, a, assignment[a.src], bounds)
        vals.update(materialize(img, bounds).values)
    return [v for v in vals if in_window(node.universe, v, bounds)]


def _worklist_scc(d, assignment, comp, live, bounds, trace) -> bool:
    values: Dict[str, set] = {nid: set() for nid in live}
    queue: List[Tuple[str, object]] = []
    truncated = False
    for nid in live:
        for v in sorted(_outside_seed(d, assignment, set(live), nid, bounds), key=value_key):
            if v not in values[nid]:
                values[nid].add(v)
                queue.append((nid, v))
                if trace is not None:
                    trace.add(nid, v, None)
    steps = 0
    qi = 0
    while qi < len(queue):
        nid, v = queue[qi]
        qi += 1
        node_u = d.node(nid).universe
        for aid in d.out_arrows(nid):
            a = d.arrows[aid]
            if a.dst not in values:
                continue
            steps += 1
            if steps > bounds.step_cap:
                return True
            dst_u = d.node(a.dst).universe
            img = apply_arrow(a, Ext(node_u, frozenset((v,))), node_u, dst_u, d.maps, bounds)
            for w in materialize(img, bounds).values:
                if w in values[a.dst] or not in_window(dst_u, w, bounds):
                    continue
                if len(values[a.dst]) >= bounds.node_card_cap:
                    truncated = True
                    continue
                values[a.dst].add(w)
                queue.append((a.dst, w))
                if trace is not None:
                    trace.add(a.dst, w, aid)
    for nid in live:
        assignment[nid] = Ext(d.node(nid).universe, frozenset(values[nid]), truncated)
    return truncated


# ---------------------------------------------------------------------------
# graded row iteration


def _grade_restrictor(node, maps):
    """(pin-or-None, filter) restricting a subset to one grade row."""
    g = node.grading
    if isinstance(g, Proj) and isinstance(node.universe, Prod):
        comp = g.i
        return comp, None
    fn = compile_point(g, maps)
    return None, fn


def _graded_scc(d, assignment, comp, live, bounds, trace) -> bool:
    caps = [d.node(nid).grade_cap for nid in live if d.node(nid).grade_cap is not None]
    cap = min(caps + [bounds.cap])
    grade_fn = {nid: compile_point(d.node(nid).grading, d.maps) for nid in live}
    acc: Dict[str, set] = {nid: set() for nid in live}
    truncated = False

    outside_cache: Dict[int, Ext] = {}

    def outside_image(aid: int) -> Ext:
        if aid not in outside_cache:
            outside_cache[aid] = _apply(d, d.arrows[aid], assignment[d.arrows[aid].src], bounds)
        return outside_cache[aid]

    def restricted(sub: Subset, node, lvl: int) -> Ext:
        pin_comp, filt = _grade_restrictor(node, d.maps)
        extra = []
        if pin_comp is not None:
            extra.append(PinCond((pin_comp,), frozenset(((lvl,),))))
        else:
            extra.append(FunCond(lambda v, f=filt, k=lvl: f(v) == k, "grade"))
        return materialize(sub, bounds, extra_conds=tuple(extra))

    steps = 0
    for lvl in range(cap + 1):
        slices: Dict[str, set] = {nid: set() for nid in live}
        slice_list: Dict[str, list] = {nid: [] for nid in live}
        ptr: Dict[int, int] = {}
        seen_sizes: Dict[str, int] = {}

        def arrow_image_of(aid: int, src_vals) -> Subset:
            a = d.arrows[aid]
            src_u = d.node(a.src).universe
            dst_u = d.node(a.dst).universe
            return apply_arrow(a, Ext(src_u, frozenset(src_vals)), src_u, dst_u, d.maps, bounds)

        def push(nid: str, vals) -> bool:
            new = [w for w in vals if w not in slices[nid]]
            if not new:
                return False
            slices[nid].update(new)
            slice_list[nid].extend(new)
            if trace is not None:
                for w in sorted(new, key=value_key):
                    trace.add(nid, w, None)
            return True

        def union_pull(nid: str, node, gfn, aid: int, src_vals, windowed: bool):
            img = materialize(arrow_image_of(aid, src_vals), bounds)
            out = []
            for w in img.values:
                g = gfn(w)
                if g == lvl:
                    if not windowed or in_window(node.universe, w, bounds):
                        out.append(w)
                elif (
                    g < lvl
                    and w not in acc[nid]
                    and w not in slices[nid]
                    and in_window(node.universe, w, bounds)
                ):
                    raise GradingViolated(nid, w, lvl)
            return out

        # per-level seeds: outside arrows and the cross-level accumulator
        for nid in live:
            node = d.node(nid)
            if not node.union_marked:
                continue
            gfn = grade_fn[nid]
            for aid in d.in_arrows(nid):
                a = d.arrows[aid]
                if a.src not in acc:
                    img = restricted(outside_image(aid), node, lvl)
                    truncated |= img.truncated
                    push(nid, img.values)
                else:
                    push(nid, union_pull(nid, node, gfn, aid, acc[a.src], windowed=False))
                    ptr[aid] = 0

        changed = True
        while changed:
            changed = False
            steps += 1
            if steps > bounds.step_cap:
                return True
            for nid in live:
                node = d.node(nid)
                gfn = grade_fn[nid]
                if node.union_marked:
                    for aid in d.in_arrows(nid):
                        a = d.arrows[aid]
                        if a.src not in acc:
                            continue
                        lst = slice_list[a.src]
                        start = ptr.get(aid, 0)
                        if start >= len(lst):
                            continue
                        ptr[aid] = len(lst)
                        if push(nid, union_pull(nid, node, gfn, aid, lst[start:], windowed=True)):
                            changed = True
                else:
                    key = tuple(
                        len(slices.get(d.arrows[aid].src, ()))
                        for aid in d.in_arrows(nid)
                        if d.arrows[aid].src in acc
                    )
                    if seen_sizes.get(nid) == key:
                        continue
                    seen_sizes[nid] = key
                    operands: List[Subset] = []
                    for aid in d.in_arrows(nid):
                        a = d.arrows[aid]
                        if a.src in acc:
                            src_vals = acc[a.src] | slices[a.src]
                            operands.append(arrow_image_of(aid, src_vals))
                        else:
                            operands.append(outside_image(aid))
                    operands.sort(key=lambda s: isinstance(s, Int))
                    cur = operands[0]
                    for op in operands[1:]:
                        cur = combine("intersect", cur, op)
                    img = restricted(cur, node, lvl)
                    truncated |= img.truncated
                    if push(nid, img.values):
                        changed = True
                if len(slices[nid]) > bounds.node_card_cap:
                    truncated = True
        for nid in live:
            acc[nid] |= slices[nid]
    for nid in live:
        assignment[nid] = Ext(d.node(nid).universe, frozenset(acc[nid]), truncated)
    return truncated


# ---------------------------------------------------------------------------
# enumeration and minimization


def enumerate_sections(
    d: Diagram, anchors: Dict[str, Subset], free: FreeSpec, bounds: SolverBounds
) -> List[CrossSection]:
    """Cartesian product of candidate pins, each completed by solving and
    filtered by the section check; deterministic order."""
    names = sorted(free.candidates)
    pools = [free.candidates[n] for n in names]
    total = 1
    for p in pools:
        total *= len(p)
    if total > bounds.step_cap:
        raise SolverError(f"candidate explosion: {total} combinations exceed the step cap")
    out: List[CrossSection] = []
    for combo in iter_product(*pools):
        t = dict(anchors)
        t.update(dict(zip(names, combo)))
        try:
            section = solve_auto(d, t, bounds)
        except SolverError:
            continue
        report = check_section(d, section, bounds)
        if report.valid:
            out.append(section)
    return out


def _proper_subset(a: Subset, b: Subset) -> bool:
    """a strictly below b on the chosen node; only decidable shapes."""
    if isinstance(a, Ext) and isinstance(b, Ext):
        return a.values < b.values
    if (
        isinstance(a, Int)
        and isinstance(b, Int)
        and a.down_threshold is not None
        and b.down_threshold is not None
    ):
        return a.down_threshold < b.down_threshold
    raise SolverError("incomparable intensional shapes in minimize")


def minimize(sections: Sequence[CrossSection], seq: Sequence[str]) -> List[CrossSection]:
    """Definition-5 minimality applied left-to-right over the node sequence:
    keep sections whose assignment is not a strict superset of a survivor's."""
    survivors = list(sections)
    for nid in seq:
        kept = []
        for s in survivors:
            if not any(_proper_subset(t[nid], s[nid]) for t in survivors if t is not s):
                kept.append(s)
        survivors = kept
    return survivors
