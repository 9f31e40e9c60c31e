import random

import pytest

from crossec import DomainError, SolverBounds, ext
from crossec.machines import (
    CompiledMachine,
    TMSpec,
    attach_program,
    build_fun_table,
    compile_config_tm,
    compile_dfa,
    compile_tm,
    encode_string,
    nat_machine_maps,
    parse_string_subset,
    run_config_tm,
    run_dfa,
    run_tm,
)
from crossec.measure import generated_by
from crossec.solver import solve_auto
from crossec.values import UnitSet

from oracles import SimRun, emulated_tape, history_rows, simulate, simulate_nd, theta_oracle


def test_encode_string():
    assert encode_string("01").values == {(0, 0), (1, 1), (2, 0), (2, 1)}
    assert encode_string("").values == {(0, 0), (0, 1)}
    assert encode_string("1").values == {(0, 1), (1, 0), (1, 1)}


def test_parse_string_subset():
    from crossec import NatSet, Prod

    NN = Prod((NatSet(), NatSet()))
    assert parse_string_subset(ext(NN, {(0, 0), (0, 1)})) == ""
    assert parse_string_subset(ext(NN, {(0, 1), (1, 0), (1, 1)})) == "1"
    assert parse_string_subset(ext(NN, {(0, 0)})) is None


def test_encode_parse_round_trip():
    for n in range(13):
        for _ in range(4):
            s = "".join(random.Random(n * 7 + _).choice("01") for _ in range(n))
            assert parse_string_subset(encode_string(s)) == s


def immediate_accept_spec():
    # any symbol in the start state accepts and moves right
    delta = {}
    for x in range(3):
        delta[(x, 0)] = (x, 1, 1)
        delta[(x, 1)] = (x, 1, 1)  # unused (accept)
        delta[(x, 2)] = (x, 2, 0)  # reject normalization fills this anyway
    return TMSpec(n_states=3, n_symbols=3, blank=2, q0=0, qa=1, qr=2, delta=delta)


def immediate_reject_spec():
    delta = {}
    for x in range(3):
        delta[(x, 0)] = (x, 2, 1)
        delta[(x, 1)] = (x, 1, 1)
        delta[(x, 2)] = (x, 2, 0)
    return TMSpec(n_states=3, n_symbols=3, blank=2, q0=0, qa=1, qr=2, delta=delta)


def left_loop_spec():
    # never halts: always move left in the start state
    delta = {}
    for x in range(3):
        delta[(x, 0)] = (x, 0, 0)
        delta[(x, 1)] = (x, 1, 1)
        delta[(x, 2)] = (x, 2, 0)
    return TMSpec(n_states=3, n_symbols=3, blank=2, q0=0, qa=1, qr=2, delta=delta)


def flipper_spec():
    # flip every bit, accept on reaching the blank
    delta = {
        (0, 0): (1, 0, 1),
        (1, 0): (0, 0, 1),
        (2, 0): (2, 1, 1),
    }
    for x in range(3):
        delta[(x, 1)] = (x, 1, 1)
        delta[(x, 2)] = (x, 2, 0)
    return TMSpec(n_states=3, n_symbols=3, blank=2, q0=0, qa=1, qr=2, delta=delta)


def run_and_compare(spec, s, k, nat_pad=4):
    c = compile_tm(spec)
    res, section = run_tm(c, s, k)
    sim = simulate(spec, s, k)
    if sim.status == "accept":
        assert res.state == {spec.qa}
        expect = theta_oracle(emulated_tape(sim, spec.blank), spec.n_symbols, spec.blank)
        # the band needs time to sweep the tape before the readout is total
        if sim.steps + sim.alloc + 1 <= k:
            assert res.output.values == expect
    elif sim.status == "reject":
        assert res.state == {spec.qr}
        assert res.output.values == set()
    else:
        assert res.state == set()
        assert res.truncated
    return c, res, section


def test_immediate_accept():
    spec = immediate_accept_spec()
    c, res, _ = run_and_compare(spec, "0", 4)
    assert res.output_string == "0"


def test_immediate_reject():
    spec = immediate_reject_spec()
    c, res, _ = run_and_compare(spec, "0", 4)
    assert res.output_string is None


def test_left_loop_never_halts():
    spec = left_loop_spec()
    run_and_compare(spec, "0", 6)


def test_flipper_output():
    spec = flipper_spec()
    c, res, _ = run_and_compare(spec, "0110", 16)
    assert res.output_string == "1001"


def test_empty_input():
    spec = immediate_accept_spec()
    c, res, _ = run_and_compare(spec, "", 6)
    assert res.output_string == ""


def test_compiled_diagram_generated_by_nat_maps():
    spec = immediate_accept_spec()
    c = compile_tm(spec)
    assert generated_by(c.diagram, nat_machine_maps(), allow_cmpl=False)


def test_history_rows_match_oracle():
    spec = flipper_spec()
    s, k = "01", 10
    c = compile_tm(spec)
    res, section = run_tm(c, s, k)
    rows = history_rows(spec, s, k)
    expect = set().union(*rows)
    assert section["S2"].values == expect


def test_history_rows_match_oracle_reject():
    spec = immediate_reject_spec()
    s, k = "10", 8
    c = compile_tm(spec)
    res, section = run_tm(c, s, k)
    rows = history_rows(spec, s, k)
    assert section["S2"].values == set().union(*rows)


def test_row_properness_structural():
    spec = flipper_spec()
    s, k = "011", 12
    c = compile_tm(spec)
    _, section = run_tm(c, s, k)
    qe, box = spec.n_states, spec.n_symbols
    by_row = {}
    for (i, x, q, kk) in section["S2"].values:
        by_row.setdefault(kk, set()).add((i, x, q))
    sim = simulate(spec, s, k)
    for kk, row in sorted(by_row.items()):
        rest = {(i, x) for (i, x, q) in row if q == qe}
        live = {(i, x, q) for (i, x, q) in row if q not in (qe,)}
        positions = sorted(i for i, _ in rest)
        # contiguous resting row, terminal marker at the end (a stale second
        # marker survives exactly one row after an end-of-tape extension)
        assert sorted(set(positions)) == list(range(len(set(positions))))
        boxes = sorted(i for (i, x) in rest if x == box)
        assert boxes and boxes[-1] == positions[-1]
        assert len(boxes) <= 2
        if len(boxes) == 2:
            assert boxes[1] == boxes[0] + 1
            assert any(i == boxes[0] for (i, _, q) in live)
        states = {q for (_, _, q) in live}
        if sim.status == "accept" and kk >= sim.steps:
            assert states == {spec.qa}
        else:
            assert len(live) == 1


def test_random_corpus_against_simulator():
    rng = random.Random(20260810)
    done = 0
    tried = 0
    while done < 12 and tried < 120:
        tried += 1
        n = rng.choice([2, 3])
        qa = rng.randrange(n)
        qr = (qa + 1 + rng.randrange(n - 1)) % n if n > 1 else 0
        if qa == qr:
            continue
        q0 = rng.randrange(n)
        delta = {}
        for x in range(3):
            for q in range(n):
                delta[(x, q)] = (rng.randrange(3), rng.randrange(n), rng.choice([0, 1]))
        try:
            spec = TMSpec(n_states=n, n_symbols=3, blank=2, q0=q0, qa=qa, qr=qr, delta=delta)
        except DomainError:
            continue
        s = "".join(rng.choice("01") for _ in range(rng.randrange(5)))
        k = 16
        sim = simulate(spec, s, k)
        if sim.status == "accept" and sim.steps + sim.alloc + 1 > k:
            continue  # band cannot finish sweeping before the cap
        run_and_compare(spec, s, k)
        done += 1
    assert done == 12


# ---------------------------------------------------------------------------
# program attachment


def test_attach_program_sizes():
    spec = immediate_accept_spec()
    c = compile_tm(spec)
    _, c0 = attach_program(c, "")
    assert c0 == 9  # zero arrow plus the terminal pair (3 + 5)
    _, s1 = attach_program(c, "1")
    assert s1 == 15
    _, s0 = attach_program(c, "0")
    assert s0 == 13
    for p in ("", "0", "1", "01", "110", "010101", "111111111111"):
        _, sz = attach_program(c, p)
        assert sz <= 6 * len(p) + c0


def test_attach_program_pins_input():
    spec = flipper_spec()
    c = compile_tm(spec)
    attached, _ = attach_program(c, "10")
    res, section = run_tm(attached, None, 14)
    assert section[attached.input_node].values == encode_string("10").values
    assert res.output_string == "01"


def test_attach_twice_rejected():
    spec = immediate_accept_spec()
    c, _ = attach_program(compile_tm(spec), "0")
    with pytest.raises(DomainError):
        attach_program(c, "1")


# ---------------------------------------------------------------------------
# the table fragment on its own


def test_fun_table_single_lookup():
    f = {(i, j): (i, j, 1) for i in range(2) for j in range(2)}
    d, c0, c1 = build_fun_table(f, 2, 2)
    s = solve_auto(
        d,
        {"one": ext(UnitSet(), {()}), c0: ext(d.node(c0).universe, {(0, 1)})},
        SolverBounds(nat_max=8),
    )
    assert s[c1].values == {(0, 1, 1)}


def test_fun_table_empty_and_full():
    f = {(0, 0): (1, 1, 0), (0, 1): (0, 0, 1), (1, 0): (1, 0, 1), (1, 1): (0, 1, 0)}
    d, c0, c1 = build_fun_table(f, 2, 2)
    one = ext(UnitSet(), {()})
    s = solve_auto(d, {"one": one, c0: ext(d.node(c0).universe, set())}, SolverBounds(nat_max=8))
    assert s[c1].values == set()
    full = {(i, j) for i in range(2) for j in range(2)}
    s = solve_auto(d, {"one": one, c0: ext(d.node(c0).universe, full)}, SolverBounds(nat_max=8))
    assert s[c1].values == {f[k] for k in full}


# ---------------------------------------------------------------------------
# finite automaton


def even_parity_dfa():
    # accept words with an even count of 1s
    delta = {(0, 0): 0, (1, 0): 1, (0, 1): 1, (1, 1): 0}
    return compile_dfa(2, 2, delta, q0=0, accepting=[0])


def dfa_oracle(delta, q0, accepting, word):
    q = q0
    for c in word:
        q = delta[(c, q)]
    return q if q in accepting else None


def test_dfa_parity():
    rep, input_node = even_parity_dfa()
    acc, _ = run_dfa(rep, input_node, [1, 1])
    assert acc == {0}
    acc, _ = run_dfa(rep, input_node, [1])
    assert acc == set()
    acc, _ = run_dfa(rep, input_node, [])
    assert acc == {0}


def test_dfa_random_words_against_oracle():
    delta = {(0, 0): 1, (1, 0): 0, (0, 1): 1, (1, 1): 1}
    rep, input_node = compile_dfa(2, 2, delta, q0=0, accepting=[1])
    rng = random.Random(5)
    for _ in range(12):
        w = [rng.randrange(2) for _ in range(rng.randrange(5))]
        acc, _ = run_dfa(rep, input_node, w)
        want = dfa_oracle(delta, 0, {1}, w)
        assert acc == ({want} if want is not None else set())


# ---------------------------------------------------------------------------
# nondeterministic machines (configuration-level pipeline)


def test_ntm_accepts_iff_some_branch_accepts():
    # guess a bit: branch to accept only if the first symbol is 1
    dn = {
        (1, 0): frozenset({(1, 1, 1), (1, 2, 1)}),
        (0, 0): frozenset({(0, 2, 1)}),
        (2, 0): frozenset({(2, 2, 1)}),
        (1, 1): frozenset(),
        (0, 1): frozenset(),
        (2, 1): frozenset(),
    }
    spec = TMSpec(
        n_states=3,
        n_symbols=3,
        blank=2,
        q0=0,
        qa=1,
        qr=2,
        delta={},
        deterministic=False,
        delta_n=dn,
    )
    c = compile_config_tm(spec)
    states, _ = run_config_tm(c, "1", 4)
    assert spec.qa in states
    assert simulate_nd(spec, "1", 4)
    states, _ = run_config_tm(c, "0", 4)
    assert spec.qa not in states
    assert not simulate_nd(spec, "0", 4)
