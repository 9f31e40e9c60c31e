"""Generated-by checking and structural-information upper bounds.

A diagram is generated by a structure-map set when every arrow is the
image or preimage of an expression in its closure (complement arrows only
when allowed).  The information report totals the per-arrow sizes of one
explicit representing diagram; it certifies an upper bound on the minimum
over all representations, never the minimum itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional

from .bounds import SolverBounds
from .diagram import Diagram, RepresentationData, check_represents
from .maps import StructureMapSet, in_generated, map_size
from .subsets import Subset
from .values import DomainError, UnitSet


@dataclass
class MeasureReport:
    total: int
    ledger: Dict[int, int]  # arrow id -> size
    generated: bool
    complement_used: bool
    window_note: str = ""

    def __post_init__(self):
        assert self.total == sum(self.ledger.values())

    def table(self, d: Optional[Diagram] = None) -> str:
        from .maps import expr_text

        lines = []
        for aid, size in sorted(self.ledger.items()):
            label = str(aid)
            if d is not None:
                a = d.arrows[aid]
                what = "cmpl" if a.kind == "cmpl" else expr_text(a.expr)
                label = f"{a.kind} {what}: {a.src}->{a.dst}"
            lines.append(f"{label:<48} {size:>4}")
        lines.append(f"{'total (candidate bound)':<48} {self.total:>4}")
        return "\n".join(lines)


def generated_by(d: Diagram, msl: StructureMapSet, allow_cmpl: bool = False) -> bool:
    """True iff every arrow is an image/preimage of an expression generated
    by the structure maps, with complement arrows admitted only on request."""
    for a in d.arrows:
        if a.kind == "cmpl":
            if not allow_cmpl:
                return False
            continue
        if not in_generated(a.expr, msl):
            return False
    return True


def info_upper_bound(
    r: RepresentationData,
    target_subset: Subset,
    msl: StructureMapSet,
    allow_cmpl: bool = False,
    bounds: Optional[SolverBounds] = None,
    verify: bool = True,
) -> MeasureReport:
    """Size ledger of a candidate representation of the target subset.

    The anchor subfamily must be the one-point node alone; the candidate
    must be generated by the structure maps and must actually represent the
    target (within the window) before a bound is emitted.
    """
    d = r.diagram
    anchored = list(r.anchors)
    if verify:
        if len(anchored) != 1 or not isinstance(d.node(anchored[0]).universe, UnitSet):
            raise DomainError("information bounds need the one-point anchor alone")
        if not generated_by(d, msl, allow_cmpl):
            raise DomainError(f"diagram is not generated by {msl.name}")
        rep = check_represents(r, target_subset, bounds or SolverBounds())
        if not rep.holds:
            raise DomainError(f"candidate does not represent the target: {rep.reason}")
        note = "valid-within-window" if rep.window_limited else "exact"
    else:
        note = "unverified"
    ledger = {}
    complement_used = False
    for aid, a in enumerate(d.arrows):
        if a.kind == "cmpl":
            complement_used = True
            ledger[aid] = 1
        else:
            ledger[aid] = map_size(a.expr, msl)
    return MeasureReport(
        total=sum(ledger.values()),
        ledger=ledger,
        generated=True,
        complement_used=complement_used,
        window_note=note,
    )
