"""crossec: a diagram-calculus engine for cross sections of powerset diagrams.

Objects live as subsets of carrier sets; a diagram of image/preimage/
complement arrows constrains an assignment of subsets to its nodes.  The
package solves those constraints (least fixed points and graded rows),
checks sections and representations, compiles finite automata and Turing
machines into diagrams over {0, succ}, decodes represented strings by
Boolean forcing, certifies structural-information upper bounds, and
evaluates an exact-rational geometric pattern corpus.
"""

from .bounds import BoundsError, CapExceeded, SolverBounds
from .values import (
    Alphabet,
    BOOL,
    DomainError,
    FinRange,
    Inj,
    IntSet,
    Mask,
    NatSet,
    PowFin,
    Prod,
    RatSet,
    StrSet,
    Sum,
    UNIT,
    UnitSet,
    Universe,
    Word,
)
from .subsets import Ext, Int, Subset, combine, empty, ext, member, normalize
from .maps import (
    Arrow,
    Compose,
    Const,
    Gen,
    Generator,
    ID,
    Id,
    InjMap,
    MapExpr,
    MapUnion,
    OMEGA,
    Omega,
    ProdMap,
    Proj,
    ProjMulti,
    StructureMapSet,
    apply_arrow,
    apply_point,
    cmpl,
    compose,
    fwd,
    in_generated,
    inv,
    map_size,
    nat_const_expr,
    prodmap,
    proj,
    structure_maps,
)
from .diagram import (
    CheckReport,
    CrossSection,
    Diagram,
    Node,
    RepresentationData,
    check_represents,
    check_section,
    restrict,
)
from .solver import (
    FreeSpec,
    GradingViolated,
    MissingGrading,
    NonMonotoneCycle,
    SolverError,
    TraceLog,
    Underdetermined,
    enumerate_sections,
    minimize,
    solve_auto,
    solve_graded,
    solve_least,
)

__version__ = "0.1.0"
