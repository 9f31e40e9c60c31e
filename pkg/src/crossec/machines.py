"""String encoding, automaton and Turing-machine compilers, program attachment.

A binary string is housed as the subset {(i, s[i])} plus the double entry
{(n,0),(n,1)} marking position n = len(s).  ``compile_tm`` emits a
complement-free diagram over the structure maps {0, succ} whose graded
history node replays the machine row by row; anchoring the input node to an
encoded string and solving reproduces the run.  ``attach_program`` pins the
input with a successor chain, one arrow pair per program symbol.

All machine universes are naturals: states are 0..n with n the resting
marker, symbols 0..m with m the end-of-tape marker, and the blank strictly
between the binary symbols and the marker.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

from .bounds import SolverBounds
from .diagram import Diagram, Node, RepresentationData
from .maps import (
    Arrow,
    Gen,
    Generator,
    ID,
    OMEGA,
    StructureMapSet,
    cmpl,
    compose,
    fwd,
    inv,
    map_size,
    nat_const_expr,
    prodmap,
    proj,
    structure_maps,
)
from .solver import solve_graded
from .subsets import Ext, Subset, ext
from .values import Alphabet, DomainError, NatSet, Prod, StrSet, UnitSet, Word

N = NatSet()
NN = Prod((N, N))
N3 = Prod((N, N, N))
N4 = Prod((N, N, N, N))
N5 = Prod((N, N, N, N, N))
N7 = Prod((N, N, N, N, N, N, N))


def nat_machine_maps() -> StructureMapSet:
    """The structure maps the machine diagrams are generated by: the zero
    constant and the successor."""
    return structure_maps(
        "M_N",
        [
            Generator("zero", UnitSet(), N, lambda v: 0, const_value=0),
            Generator("succ", N, N, lambda v: v + 1, nat_shift=1),
        ],
    )


# ---------------------------------------------------------------------------
# string encoding


def encode_string(s: str) -> Ext:
    """The subset {(i, s[i])} | {(n,0),(n,1)} of N x N for a binary string."""
    if any(c not in "01" for c in s):
        raise DomainError(f"not a binary string: {s!r}")
    n = len(s)
    vals = {(i, int(c)) for i, c in enumerate(s)}
    vals |= {(n, 0), (n, 1)}
    return ext(NN, vals)


def parse_string_subset(a: Subset):
    """Inverse of the encoding: the string when the subset is exactly an
    encoded string, else None."""
    if not isinstance(a, Ext):
        return None
    pairs = a.values
    if not pairs:
        return None
    n = max(i for i, _ in pairs)
    if (n, 0) not in pairs or (n, 1) not in pairs:
        return None
    out = []
    for i in range(n):
        b0, b1 = (i, 0) in pairs, (i, 1) in pairs
        if b0 == b1:
            return None
        out.append("0" if b0 else "1")
    if len(pairs) != n + 2:
        return None
    return "".join(out)


# ---------------------------------------------------------------------------
# machine description


@dataclass(frozen=True)
class TMSpec:
    """Numeric-normalized machine: states 0..n_states-1, symbols 0..n_symbols-1
    with 0,1 the input alphabet and ``blank`` in between.

    The reject state always steps left without writing; the constructor
    normalizes the table accordingly.
    """

    n_states: int
    n_symbols: int
    blank: int
    q0: int
    qa: int
    qr: int
    delta: Mapping[Tuple[int, int], Tuple[int, int, int]]  # (x,q) -> (x',q',v)
    deterministic: bool = True
    delta_n: Mapping[Tuple[int, int], FrozenSet[Tuple[int, int, int]]] = field(default_factory=dict)

    def __post_init__(self):
        if self.n_symbols < 3 or not (2 <= self.blank < self.n_symbols):
            raise DomainError("need binary symbols plus a blank")
        for q in (self.q0, self.qa, self.qr):
            if not 0 <= q < self.n_states:
                raise DomainError("state index out of range")
        if self.qa == self.qr:
            raise DomainError("accept and reject states must differ")
        table = dict(self.delta)
        for x in range(self.n_symbols):
            table[(x, self.qr)] = (x, self.qr, 0)
            for q in range(self.n_states):
                if (x, q) not in table and self.deterministic and q != self.qa:
                    raise DomainError(f"transition table not total: missing {(x, q)}")
        object.__setattr__(self, "delta", table)
        if not self.deterministic:
            dn = {k: frozenset(v) for k, v in self.delta_n.items()}
            for x in range(self.n_symbols):
                dn[(x, self.qr)] = frozenset({(x, self.qr, 0)})
            object.__setattr__(self, "delta_n", dn)

    def step_targets(self, x: int, q: int) -> FrozenSet[Tuple[int, int, int]]:
        if self.deterministic:
            if q == self.qa:
                return frozenset()
            return frozenset({self.delta[(x, q)]})
        return self.delta_n.get((x, q), frozenset())


# ---------------------------------------------------------------------------
# compiled artifact


@dataclass
class CompiledMachine:
    diagram: Diagram
    one_node: Optional[str]
    input_node: str
    output_node: str
    state_node: str
    spec: TMSpec
    attached: Optional[str] = None

    def size_ledger(self) -> Dict[int, int]:
        msl = self.diagram.maps
        out = {}
        for aid, a in enumerate(self.diagram.arrows):
            out[aid] = 1 if a.kind == "cmpl" else map_size(a.expr, msl)
        return out

    def total_size(self) -> int:
        return sum(self.size_ledger().values())


def _num(k: int):
    return nat_const_expr(k)


def _numw(k: int):
    """Numeral precomposed with the terminal map: a constant on any domain."""
    return compose(_num(k), OMEGA)


def compile_tm(spec: TMSpec) -> CompiledMachine:
    """The history-replay diagram over {0, succ} for a deterministic machine.

    Nondeterministic specifications compile through the configuration-level
    pipeline instead (their cell-level rows would mix branch tapes); see
    :func:`compile_config_tm`.
    """
    if not spec.deterministic:
        return compile_config_tm(spec)
    maps = nat_machine_maps()
    m, n, blank = spec.n_symbols, spec.n_states, spec.blank
    qe = n  # resting marker state
    box = m  # end-of-tape marker symbol
    numerals = max(m, n) + 1

    nodes: List[Node] = [Node("one", UnitSet())]
    arrows: List[Arrow] = []

    def add(node: Node):
        nodes.append(node)

    # numeral chain
    add(Node("A0", N))
    arrows.append(fwd(Gen("zero"), "one", "A0"))
    for i in range(1, numerals + 1):
        add(Node(f"A{i}", N))
        arrows.append(fwd(Gen("succ"), f"A{i-1}", f"A{i}"))

    def pool(name: str, members: Sequence[int]):
        add(Node(name, N, union_marked=True))
        for q in members:
            arrows.append(fwd(ID, f"A{q}", name))

    pool("QactP", [q for q in range(n) if q != spec.qa])  # live head states
    pool("QhaltP", [qe, spec.qa])  # resting marker and accept
    pool("QobsP", [spec.qa, spec.qr])
    pool("ThnotboxP", list(range(m)))

    def pairpool(name: str, pairs_: Sequence[Tuple[int, int]]):
        add(Node(name, NN, union_marked=True))
        for a, b in pairs_:
            arrows.append(fwd(prodmap(_num(a), _num(b)), "one", name))

    pairpool("BoxActP", [(box, q) for q in range(n) if q != spec.qa])

    # input and history
    add(Node("S1", NN))
    hist_grade = proj(4)

    def gnode(name, universe, gcomp, union=False):
        add(Node(name, universe, union_marked=union, grading=proj(gcomp)))

    gnode("S2", N4, 4, union=True)

    # --- init: set up row zero from the encoded input ----------------------
    add(Node("J1", N))
    add(Node("J2", N))
    add(Node("I2", NN))
    add(Node("I3", NN, union_marked=True))
    add(Node("I4", N))
    add(Node("I5", NN, union_marked=True))
    add(Node("I6", N4))
    arrows += [
        fwd(proj(1), "S1", "J1"),
        inv(Gen("succ"), "J1", "J2"),
        fwd(ID, "S1", "I2"),
        inv(proj(1), "J2", "I2"),
        fwd(prodmap(proj(1), _numw(qe)), "S1", "I3"),
        fwd(prodmap(_num(0), _num(spec.q0)), "one", "I3"),
        inv(prodmap(ID, _numw(0)), "S1", "I4"),
        inv(prodmap(ID, _numw(1)), "S1", "I4"),
        fwd(prodmap(ID, _numw(box)), "I4", "I5"),
        fwd(ID, "I2", "I5"),
        inv(proj(1, 2), "I5", "I6"),
        inv(proj(1, 3), "I3", "I6"),
        inv(proj(4), "A0", "I6"),
    ]

    def eta_fragment(prefix: str, src: str, dst_name: str, graded: bool):
        """End-of-tape repair: a live head on the marker blanks it and pushes
        the marker right; everything else passes through."""
        g = dict(grading=proj(4)) if graded else {}
        add(Node(f"{prefix}r1", N4, **g))
        add(Node(f"{prefix}r2", N4, **g))
        add(Node(f"{prefix}r3", N4, **g))
        add(Node(dst_name, N4, union_marked=True, **g))
        arrows.extend(
            [
                fwd(ID, src, f"{prefix}r1"),
                inv(proj(2, 3), "BoxActP", f"{prefix}r1"),
                fwd(ID, src, f"{prefix}r2"),
                inv(proj(2), "ThnotboxP", f"{prefix}r2"),
                fwd(ID, src, f"{prefix}r3"),
                inv(proj(3), "QhaltP", f"{prefix}r3"),
                fwd(prodmap(proj(1), _numw(blank), proj(3), proj(4)), f"{prefix}r1", dst_name),
                fwd(
                    prodmap(compose(Gen("succ"), proj(1)), _numw(box), _numw(qe), proj(4)),
                    f"{prefix}r1",
                    dst_name,
                ),
                fwd(ID, f"{prefix}r2", dst_name),
                fwd(ID, f"{prefix}r3", dst_name),
            ]
        )

    eta_fragment("ie_", "I6", "ie_out", graded=False)
    arrows.append(fwd(ID, "ie_out", "S2"))

    # --- one step of the machine ------------------------------------------
    bump = prodmap(proj(1), proj(2), proj(3), compose(Gen("succ"), proj(4)))
    gnode("d2", N4, 4)
    gnode("d4", N4, 4)
    arrows += [
        fwd(bump, "S2", "d2"),
        inv(proj(3), "QactP", "d2"),
        fwd(bump, "S2", "d4"),
        inv(proj(3), "QhaltP", "d4"),
    ]

    # transition table, threaded with position and step number
    gnode("d3", N5, 5, union=True)
    for x in range(m):
        for q in range(n):
            if q == spec.qa:
                continue
            x2, q2, v = spec.delta[(x, q)]
            b = f"B_{x}_{q}"
            gnode(b, N7, 7)
            arrows += [
                inv(proj(1, 2, 3, 7), "d2", b),
                inv(proj(2), f"A{x}", b),
                inv(proj(3), f"A{q}", b),
                inv(proj(4), f"A{x2}", b),
                inv(proj(5), f"A{q2}", b),
                inv(proj(6), f"A{v}", b),
                fwd(proj(1, 4, 5, 6, 7), b, "d3"),
            ]

    # positions other than the live head (or all of them on halt rows)
    shift2 = prodmap(compose(Gen("succ"), proj(1)), proj(2))
    gnode("chiE", NN, 2, union=True)
    gnode("chiF", NN, 2, union=True)
    gnode("chiG", NN, 2, union=True)
    gnode("d5", NN, 2, union=True)
    arrows += [
        fwd(proj(1, 4), "d2", "chiE"),
        fwd(shift2, "chiE", "chiF"),
        fwd(shift2, "chiF", "chiF"),
        inv(shift2, "chiE", "chiG"),
        inv(shift2, "chiG", "chiG"),
        fwd(ID, "chiF", "d5"),
        fwd(ID, "chiG", "d5"),
    ]
    # on an accept row there is no live head to exclude, which would starve
    # the tape copy; a marker position shifted past the tape end re-enables
    # the full copy, gated on an accept entry existing at that step
    gnode("dBoxK", NN, 2)
    add(Node("accK", N, grading=ID))
    gnode("gate", NN, 2)
    gnode("dBox", N4, 4)
    arrows += [
        fwd(ID, "d4", "dBox"),
        inv(proj(2), f"A{box}", "dBox"),
        fwd(prodmap(compose(Gen("succ"), proj(1)), proj(4)), "dBox", "dBoxK"),
        fwd(proj(3), "d7", "accK"),
        fwd(ID, "dBoxK", "gate"),
        inv(proj(2), "accK", "gate"),
        fwd(ID, "gate", "chiE"),
    ]

    gnode("d8", N3, 3)
    gnode("d6", N3, 3, union=True)
    arrows += [
        fwd(proj(1, 2, 4), "d4", "d8"),
        inv(proj(1, 3), "d5", "d8"),
        fwd(proj(1, 2, 5), "d3", "d6"),
        fwd(ID, "d8", "d6"),
    ]

    # head movement
    gnode("p2", N4, 4)
    gnode("p3", N3, 3)
    gnode("p5", NN, 2)
    gnode("p4", N3, 3, union=True)
    arrows += [
        fwd(proj(1, 3, 4, 5), "d3", "p2"),
        inv(prodmap(proj(1), proj(2), _numw(1), proj(3)), "p2", "p3"),
        inv(prodmap(_numw(0), proj(1), _numw(0), proj(2)), "p2", "p5"),
        fwd(prodmap(compose(Gen("succ"), proj(1)), proj(2), proj(3)), "p3", "p4"),
        inv(prodmap(compose(Gen("succ"), proj(1)), proj(2), _numw(0), proj(3)), "p2", "p4"),
        fwd(prodmap(_numw(0), proj(1), proj(2)), "p5", "p4"),
    ]

    # accept-band spread
    shift3 = prodmap(compose(Gen("succ"), proj(1)), proj(2), proj(3))
    gnode("d7", N3, 3)
    gnode("d10", N3, 3, union=True)
    arrows += [
        fwd(proj(1, 3, 4), "d4", "d7"),
        inv(proj(2), f"A{spec.qa}", "d7"),
        fwd(ID, "d7", "d10"),
        fwd(shift3, "d7", "d10"),
        inv(shift3, "d7", "d10"),
    ]

    # states row, then join with symbols and repair the tape end
    gnode("d11", N3, 3, union=True)
    gnode("d9", N4, 4)
    arrows += [
        fwd(ID, "p4", "d11"),
        fwd(ID, "d10", "d11"),
        inv(proj(2), f"A{qe}", "d11"),
        inv(proj(1, 2, 4), "d6", "d9"),
        inv(proj(1, 3, 4), "d11", "d9"),
    ]
    eta_fragment("e_", "d9", "d12", graded=True)
    arrows.append(fwd(ID, "d12", "S2"))

    # --- observations -------------------------------------------------------
    add(Node("S3", N4))
    arrows += [
        fwd(ID, "S2", "S3"),
        inv(proj(3), f"A{spec.qa}", "S3"),
    ]
    add(Node("Sobs", N))
    arrows += [
        fwd(proj(3), "S2", "Sobs"),
        fwd(ID, "QobsP", "Sobs"),
    ]

    # --- string termination -------------------------------------------------
    add(Node("TT1", NN))
    add(Node("T5", NN, union_marked=True))
    add(Node("T2", N3))
    pairpool("T4P", [(x, y) for x in (0, 1) for y in (blank, box)])
    pairpool("T6P", [(x, y) for x in (0, 1) for y in (0, 1)])
    add(Node("T3", N3))
    add(Node("T7", N3))
    add(Node("T3b", NN))
    add(Node("T7b", NN))
    add(Node("S4", NN, union_marked=True))
    arrows += [
        fwd(proj(1, 2), "S3", "TT1"),
        fwd(shift2, "TT1", "T5"),
        fwd(prodmap(_num(0), _num(0)), "one", "T5"),
        inv(proj(1, 2), "T5", "T2"),
        inv(proj(1, 3), "TT1", "T2"),
        fwd(ID, "T2", "T3"),
        inv(proj(2, 3), "T4P", "T3"),
        fwd(ID, "T2", "T7"),
        inv(proj(2, 3), "T6P", "T7"),
        fwd(proj(1, 2), "T3", "T3b"),
        fwd(proj(1, 2), "T7", "T7b"),
        inv(shift2, "T3b", "S4"),
        inv(shift2, "T7b", "S4"),
        fwd(prodmap(proj(1), _numw(0)), "T3", "S4"),
        fwd(prodmap(proj(1), _numw(1)), "T3", "S4"),
    ]

    d = Diagram(nodes, arrows, maps)
    return CompiledMachine(d, "one", "S1", "S4", "Sobs", spec)


@dataclass
class RunResult:
    state: FrozenSet[int]
    output: Ext
    output_string: Optional[str]
    truncated: bool

    def status(self, spec: TMSpec) -> str:
        if spec.qa in self.state:
            return "accept"
        if spec.qr in self.state:
            return "reject"
        return "running"


def run_tm(c: CompiledMachine, s: Optional[str], k: int, bounds: Optional[SolverBounds] = None):
    """Solve the compiled diagram on an input for ``k`` steps.

    Passing ``s=None`` runs an attached machine (the program chain pins the
    input).  A machine still running at the cap reports an empty state set
    with the truncation flag.
    """
    if bounds is None:
        base = len(s) if s is not None else 16
        bounds = SolverBounds(nat_max=base + k + 4, grade_cap=k)
    anchors = {c.one_node: ext(UnitSet(), {()})}
    if s is not None:
        anchors[c.input_node] = encode_string(s)
    elif c.attached is None:
        raise DomainError("input required for a machine without an attached program")
    section = solve_graded(c.diagram, anchors, bounds)
    state = frozenset(section[c.state_node].values)
    out = section[c.output_node]
    return (
        RunResult(state, out, parse_string_subset(out), not state),
        section,
    )


# ---------------------------------------------------------------------------
# program attachment


def attach_program(c: CompiledMachine, p: str) -> Tuple[CompiledMachine, int]:
    """Pin the input node with a successor chain carrying the program bits.

    Returns the new machine and the total size of everything added: the
    zero arrow, one successor per position, one pair arrow per symbol
    (cost 3 for '0', 5 for '1'), and the terminal double entry.
    """
    if any(ch not in "01" for ch in p):
        raise DomainError(f"not a binary program: {p!r}")
    if c.attached is not None:
        raise DomainError("machine already carries a program")
    d = c.diagram
    nodes = list(d.nodes.values())
    arrows = list(d.arrows)
    added: List[Arrow] = []
    for i in range(len(p) + 1):
        nodes.append(Node(f"P{i}", N))
    added.append(fwd(Gen("zero"), "one", "P0"))
    for i in range(1, len(p) + 1):
        added.append(fwd(Gen("succ"), f"P{i-1}", f"P{i}"))
    for i, ch in enumerate(p):
        sym = prodmap(ID, Gen("zero") if ch == "0" else compose(Gen("succ"), Gen("zero")))
        added.append(fwd(sym, f"P{i}", c.input_node))
    last = f"P{len(p)}"
    added.append(fwd(prodmap(ID, Gen("zero")), last, c.input_node))
    added.append(fwd(prodmap(ID, compose(Gen("succ"), Gen("zero"))), last, c.input_node))
    # the input node now takes the union of the chain entries
    new_nodes = [
        replace(nd, union_marked=True) if nd.nid == c.input_node else nd for nd in nodes
    ]
    nd = Diagram(new_nodes, arrows + added, d.maps)
    added_size = sum(map_size(a.expr, d.maps) for a in added)
    return (
        CompiledMachine(nd, c.one_node, c.input_node, c.output_node, c.state_node, c.spec, attached=p),
        added_size,
    )


# ---------------------------------------------------------------------------
# the transition-table fragment on its own


def build_fun_table(f: Mapping[Tuple[int, int], Tuple[int, int, int]], m: int, n: int):
    """A fragment computing a finite function m x n -> m x n x 2 elementwise:
    a numeral chain, one keyed node per table row, and a union collector.

    Returns ``(diagram, input_node, output_node)``; anchoring the input and
    solving yields the image at the collector.
    """
    maps = nat_machine_maps()
    k = max(m, n)
    nodes: List[Node] = [Node("one", UnitSet()), Node("A0", N)]
    arrows: List[Arrow] = [fwd(Gen("zero"), "one", "A0")]
    for i in range(1, k):
        nodes.append(Node(f"A{i}", N))
        arrows.append(fwd(Gen("succ"), f"A{i-1}", f"A{i}"))
    nodes.append(Node("C0", NN))
    nodes.append(Node("C1", N3, union_marked=True))
    quint = Prod((N, N, N, N, N))
    for (i, j), (a, b, v) in sorted(f.items()):
        bname = f"B_{i}_{j}"
        nodes.append(Node(bname, quint))
        arrows += [
            inv(proj(1, 2), "C0", bname),
            inv(proj(1), f"A{i}", bname),
            inv(proj(2), f"A{j}", bname),
            inv(proj(3), f"A{a}", bname),
            inv(proj(4), f"A{b}", bname),
            inv(proj(5), f"A{v}", bname),
            fwd(proj(3, 4, 5), bname, "C1"),
        ]
    return Diagram(nodes, arrows, maps), "C0", "C1"


# ---------------------------------------------------------------------------
# finite automaton (configuration-level, graded history)


def compile_dfa(n_states: int, n_symbols: int, delta: Mapping[Tuple[int, int], int], q0: int, accepting: Sequence[int]):
    """The automaton diagram: a graded history of (rest-of-input, state, step)
    triples; the accept node is nonempty exactly on accepted inputs."""
    sigma = Alphabet("Sig", tuple(str(i) for i in range(n_symbols)))
    S = StrSet(sigma)
    Q = NatSet()
    SQN = Prod((S, Q, N))
    SQ = Prod((S, Q))

    def step(v):
        w, q, k = v
        if not w.syms:
            return (w, q, k + 1)
        return (Word(w.syms[1:]), delta[(w.syms[0], q)], k + 1)

    maps = structure_maps(
        "M_dfa",
        [
            Generator("dstep", SQN, SQN, step),
            Generator("succ", N, N, lambda v: v + 1, nat_shift=1),
        ],
    )
    nodes = [
        Node("S1", S),
        Node("S2", SQN, union_marked=True, grading=proj(3)),
        Node("S3", SQ),
        Node("S4", Q),
        Node("S5", Prod((Q, N))),
        Node("S6", SQN),
        Node("S7", S),
        Node("S8", Q, union_marked=True),
    ]
    arrows = [
        inv(proj(1), "S1", "S6"),
        inv(proj(2, 3), "S5", "S6"),
        fwd(ID, "S6", "S2"),
        fwd(Gen("dstep"), "S2", "S2"),
        fwd(proj(1, 2), "S2", "S3"),
        inv(proj(1), "S7", "S3"),
        inv(proj(2), "S4", "S3"),
        fwd(proj(2), "S3", "S8"),
    ]
    d = Diagram(nodes, arrows, maps)
    anchors = {
        "S4": ext(Q, set(accepting)),
        "S5": ext(Prod((Q, N)), {(q0, 0)}),
        "S7": ext(S, {Word(())}),
    }
    return RepresentationData(d, anchors, "S8"), "S1"


def run_dfa(rep: RepresentationData, input_node: str, word: Sequence[int], k: Optional[int] = None):
    sigma_node = rep.diagram.node(input_node)
    w = Word(tuple(word))
    if k is None:
        k = len(word) + 1
    anchors = dict(rep.anchors)
    anchors[input_node] = ext(sigma_node.universe, {w})
    b = SolverBounds(nat_max=k + 2, grade_cap=k, str_max_len=len(word))
    s = solve_graded(rep.diagram, anchors, b)
    return s[rep.target].values, s


# ---------------------------------------------------------------------------
# configuration-level Turing machine (deterministic or not)


def compile_config_tm(spec: TMSpec) -> CompiledMachine:
    """The configuration-as-element variant: whole-tape words step atomically,
    so nondeterministic branches never interfere."""
    theta = Alphabet("Theta", tuple(str(i) for i in range(spec.n_symbols)))
    S = StrSet(theta)
    CFG = Prod((S, N, N, N))  # (tape, state, head, step)
    Q = NatSet()

    def targets(w: Word, q: int, pos: int):
        x = w.syms[pos] if pos < len(w.syms) else spec.blank
        return spec.step_targets(x, q)

    def step_set(v):
        w, q, pos, k = v
        if q in (spec.qa, spec.qr) and spec.deterministic:
            return [(w, q, pos, k + 1)]
        outs = []
        for (x2, q2, mv) in sorted(targets(w, q, pos)):
            syms = list(w.syms)
            while len(syms) <= pos:
                syms.append(spec.blank)
            syms[pos] = x2
            np = max(0, pos + (1 if mv == 1 else -1))
            outs.append((Word(tuple(syms)), q2, np, k + 1))
        if not outs:
            outs = [(w, q, pos, k + 1)]
        return outs

    # the set-valued table is realized as one total arrow per branch index
    branch_count = 1
    if not spec.deterministic and spec.delta_n:
        branch_count = max(1, max(len(v) for v in spec.delta_n.values()))

    def make_branch(i):
        def f(v):
            outs = step_set(v)
            return outs[i] if i < len(outs) else outs[-1]

        return Generator(f"tstep{i}", CFG, CFG, f)

    gens = [Generator("succ", N, N, lambda v: v + 1, nat_shift=1)]
    gens += [make_branch(i) for i in range(branch_count)]
    maps = structure_maps("M_cfg", gens)

    nodes = [
        Node("S1", S),
        Node("S2", CFG, union_marked=True, grading=proj(4)),
        Node("S5", Prod((Q, N, N))),
        Node("S6", CFG),
        Node("S3", Q, union_marked=True),
        Node("SobsP", Q, union_marked=True),
        Node("Sobs", Q),
    ]
    arrows = [
        inv(proj(1), "S1", "S6"),
        inv(proj(2, 3, 4), "S5", "S6"),
        fwd(ID, "S6", "S2"),
    ]
    for i in range(branch_count):
        arrows.append(fwd(Gen(f"tstep{i}"), "S2", "S2"))
    arrows += [
        fwd(proj(2), "S2", "S3"),
        fwd(ID, "S3", "Sobs"),
        fwd(ID, "SobsP", "Sobs"),
    ]
    d = Diagram(nodes, arrows, maps)
    c = CompiledMachine(d, None, "S1", "S3", "Sobs", spec)
    c.anchors = {
        "S5": ext(Prod((Q, N, N)), {(spec.q0, 0, 0)}),
        "SobsP": ext(Q, {spec.qa, spec.qr}),
    }
    return c


def run_config_tm(c: CompiledMachine, s: str, k: int):
    theta = c.diagram.node(c.input_node).universe
    w = Word(tuple(int(ch) for ch in s))
    anchors = dict(getattr(c, "anchors", {}))
    anchors[c.input_node] = ext(theta, {w})
    b = SolverBounds(nat_max=len(s) + k + 4, grade_cap=k, str_max_len=len(s) + k + 2)
    section = solve_graded(c.diagram, anchors, b)
    return section[c.state_node].values, section
