"""Diagrams, cross sections, constraint checking and representation checking.

A diagram is an indexed family of carrier universes, a union-marked
subfamily, and powerset-level arrows between family members.  A cross
section assigns every node a subset; at each node with incoming arrows the
assignment must equal the intersection (union, if the node is union-marked)
of the incoming arrow images.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .bounds import SolverBounds
from .maps import Arrow, MapExpr, StructureMapSet, apply_arrow, expr_text, infer_cod
from .subsets import Ext, Int, Subset, combine, equal_within, materialize
from .values import DomainError, UnitSet, Universe, value_to_text


@dataclass(frozen=True)
class Node:
    nid: str
    universe: Universe
    union_marked: bool = False
    grading: Optional[MapExpr] = None
    grade_cap: Optional[int] = None


class Diagram:
    """Immutable after construction; arrows are validated against node types."""

    def __init__(self, nodes: Sequence[Node], arrows: Sequence[Arrow], maps: StructureMapSet):
        self.nodes: Dict[str, Node] = {}
        for n in nodes:
            if n.nid in self.nodes:
                raise DomainError(f"duplicate node id {n.nid}")
            self.nodes[n.nid] = n
        self.arrows: Tuple[Arrow, ...] = tuple(arrows)
        self.maps = maps
        self._in: Dict[str, List[int]] = {nid: [] for nid in self.nodes}
        self._out: Dict[str, List[int]] = {nid: [] for nid in self.nodes}
        for aid, a in enumerate(self.arrows):
            if a.src not in self.nodes or a.dst not in self.nodes:
                raise DomainError(f"arrow {aid} references unknown node")
            self._check_arrow_types(a)
            self._in[a.dst].append(aid)
            self._out[a.src].append(aid)

    def _check_arrow_types(self, a: Arrow) -> None:
        su = self.nodes[a.src].universe
        du = self.nodes[a.dst].universe
        if a.kind == "cmpl":
            if su != du:
                raise DomainError("cmpl arrow needs equal universes")
            return
        if a.kind == "fwd":
            cod = infer_cod(a.expr, su, self.maps)
            if cod != du:
                raise DomainError(
                    f"forward arrow {expr_text(a.expr)}: {a.src}->{a.dst} lands in {cod}, node has {du}"
                )
        else:
            cod = infer_cod(a.expr, du, self.maps)
            if cod != su:
                raise DomainError(
                    f"inverse arrow {expr_text(a.expr)}: {a.src}->{a.dst} pulls back from {cod}, node has {su}"
                )

    def node(self, nid: str) -> Node:
        try:
            return self.nodes[nid]
        except KeyError:
            raise DomainError(f"unknown node id {nid}")

    def in_arrows(self, nid: str) -> List[int]:
        return self._in[nid]

    def out_arrows(self, nid: str) -> List[int]:
        return self._out[nid]

    def source_nodes(self) -> List[str]:
        return [nid for nid in self.nodes if not self._in[nid]]

    def one_nodes(self) -> List[str]:
        return [nid for nid, n in self.nodes.items() if isinstance(n.universe, UnitSet)]


@dataclass
class CrossSection:
    assignment: Dict[str, Subset]
    provenance: str = "user"
    truncated: bool = False

    def __getitem__(self, nid: str) -> Subset:
        return self.assignment[nid]

    def is_truncated(self) -> bool:
        return self.truncated or any(s.truncated for s in self.assignment.values())


@dataclass(frozen=True)
class RepresentationData:
    """Diagram plus anchor data and the distinguished output node."""

    diagram: Diagram
    anchors: Dict[str, Subset]  # the partial section t over the subfamily T
    target: str  # the distinguished node X
    min_seq: Tuple[str, ...] = ()

    def __post_init__(self):
        for nid in self.anchors:
            self.diagram.node(nid)
        self.diagram.node(self.target)
        for nid in self.min_seq:
            self.diagram.node(nid)


@dataclass
class CheckReport:
    valid: bool
    node: Optional[str] = None
    witness: Optional[object] = None
    window_limited: bool = False

    def __bool__(self):
        return self.valid

    def describe(self) -> str:
        if self.valid:
            return "valid-within-window" if self.window_limited else "valid"
        return f"violation at {self.node} (witness {value_to_text(self.witness)})"


def constraint_value(d: Diagram, assignment: Dict[str, Subset], nid: str, bounds: SolverBounds) -> Subset:
    """The right-hand side of the node's section constraint."""
    node = d.node(nid)
    images = []
    for aid in d.in_arrows(nid):
        a = d.arrows[aid]
        src = assignment[a.src]
        if isinstance(src, Int) and a.kind == "fwd":
            src = materialize(src, bounds)
        images.append(apply_arrow(a, src, d.node(a.src).universe, node.universe, d.maps, bounds))
    if not images:
        raise DomainError(f"node {nid} has no incoming arrows")
    if node.union_marked:
        exts = [materialize(img, bounds) for img in images]
        out = exts[0]
        for e in exts[1:]:
            out = combine("union", out, e)
        return out
    images.sort(key=lambda s: isinstance(s, Int))  # extensional operands first
    out = images[0]
    for img in images[1:]:
        out = combine("intersect", out, img)
    return out


def _node_window_pred(d: Diagram, nid: str, bounds: SolverBounds):
    """Restriction under which a node's constraint is compared: the grade
    cap for graded nodes, the componentwise window for other infinite
    carriers, nothing for finite ones."""
    from .bounds import in_window
    from .maps import compile_point

    node = d.node(nid)
    if node.grading is not None:
        gfn = compile_point(node.grading, d.maps)
        cap = min(c for c in (node.grade_cap, bounds.cap) if c is not None)
        return lambda v: gfn(v) <= cap
    if node.universe.is_finite():
        return None
    return lambda v: in_window(node.universe, v, bounds)


def check_section(d: Diagram, s: CrossSection, bounds: SolverBounds) -> CheckReport:
    """Definition-3 check: every constrained node equals its incoming
    intersection/union, compared within the node's window."""
    missing = [nid for nid in d.nodes if nid not in s.assignment]
    if missing:
        raise DomainError(f"section does not assign nodes {missing}")
    limited = False
    for nid in d.nodes:
        if not d.in_arrows(nid):
            continue
        want = constraint_value(d, s.assignment, nid, bounds)
        pred = _node_window_pred(d, nid, bounds)
        have_e = materialize(s.assignment[nid], bounds)
        want_e = materialize(want, bounds)
        if pred is None:
            have_vals, want_vals = have_e.values, want_e.values
        else:
            limited = True
            have_vals = frozenset(v for v in have_e.values if pred(v))
            want_vals = frozenset(v for v in want_e.values if pred(v))
        diff = have_vals ^ want_vals
        if diff:
            from .values import value_key

            witness = min(diff, key=value_key)
            return CheckReport(False, nid, witness, limited)
    return CheckReport(True, window_limited=limited)


def restrict(s: CrossSection, node_ids: Sequence[str]) -> Dict[str, Subset]:
    """The restriction of a section to a subfamily."""
    out = {}
    for nid in node_ids:
        if nid not in s.assignment:
            raise DomainError(f"unknown node id {nid}")
        out[nid] = s.assignment[nid]
    return out


@dataclass
class RepresentsReport:
    holds: bool
    reason: str = ""
    window_limited: bool = False
    vacuous: bool = False

    def __bool__(self):
        return self.holds


def check_represents(
    r: RepresentationData,
    target_subset: Subset,
    bounds: SolverBounds,
    family=None,
) -> RepresentsReport:
    """Does every (minimized) section through the anchors hit the target?

    Without a minimization sequence the unique solved section is compared.
    With one, a finite candidate family (from ``family``: either a list of
    sections or a solver FreeSpec) is minimized left-to-right; when no
    family is supplied the least solved section stands in for it.
    """
    from . import solver

    if r.min_seq and family is not None:
        if isinstance(family, list):
            sections = family
        else:
            sections = solver.enumerate_sections(r.diagram, r.anchors, family, bounds)
        if not sections:
            return RepresentsReport(False, "vacuous: no sections", vacuous=True)
        kept = solver.minimize(sections, list(r.min_seq))
        limited = False
        for s in kept:
            eq, lim, witness = equal_within(s[r.target], target_subset, bounds)
            limited = limited or lim
            if not eq:
                return RepresentsReport(
                    False, f"minimized section misses target at {value_to_text(witness)}", limited
                )
        return RepresentsReport(True, "all minimized sections agree", limited)

    try:
        solved = solver.solve_auto(r.diagram, r.anchors, bounds)
    except solver.SolverError as e:
        return RepresentsReport(False, f"solver: {e}")
    report = check_section(r.diagram, solved, bounds)
    if not report.valid:
        if report.node in r.anchors:
            return RepresentsReport(False, "vacuous: no sections", vacuous=True)
        return RepresentsReport(False, report.describe())
    eq, lim, witness = equal_within(solved[r.target], target_subset, bounds)
    if not eq:
        return RepresentsReport(False, f"target differs at {value_to_text(witness)}", lim)
    return RepresentsReport(True, "solved section hits target", lim or report.window_limited)


# ---------------------------------------------------------------------------
# JSON export


def diagram_to_json(d: Diagram) -> dict:
    return {
        "nodes": [
            {
                "id": n.nid,
                "universe": str(n.universe),
                "union": n.union_marked,
                **({"grade": expr_text(n.grading)} if n.grading is not None else {}),
                **({"cap": n.grade_cap} if n.grade_cap is not None else {}),
            }
            for n in d.nodes.values()
        ],
        "arrows": [
            {
                "kind": a.kind,
                **({"map": expr_text(a.expr)} if a.expr is not None else {}),
                "src": a.src,
                "dst": a.dst,
            }
            for a in d.arrows
        ],
    }


def section_to_json(d: Diagram, s: CrossSection, bounds: SolverBounds) -> dict:
    sections = {}
    for nid, sub in s.assignment.items():
        e = sub if isinstance(sub, Ext) else materialize(sub, bounds)
        sections[nid] = [value_to_text(v) for v in e.sorted_values()]
    out = {**diagram_to_json(d), "sections": sections}
    if s.is_truncated():
        out["truncated"] = True
    return out
