"""Acceptance suite: one test per criterion, each reported as a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py`` (the lines appear in the terminal
summary) or ``python tests/test_acceptance.py``.
"""

import functools
import itertools
import random
import sys
import time
from fractions import Fraction as F

import pytest

from conftest import EX1, EX2, pc
from test_sperner import closed_form, purification_property, sorting_property, staircase
from purecircuit.bimatrix import (
    BETA,
    EPS_TARGET,
    LAMBDA,
    decode_bimatrix,
    grid_search_relative_wsne,
    mass_interval,
    node_masses,
    reduce_polymatrix_to_bimatrix,
    verify_relative_wsne,
)
from purecircuit.core import (
    BOT,
    ONE,
    VALUES,
    ZERO,
    GateType as G,
    Semantics,
    is_solution,
    verify_assignment,
)
from purecircuit.gcircuit import gc_gadget_case_check, purify_bot_witness
from purecircuit.generators import random_digraph, random_pc_instance, random_polymatrix_game
from purecircuit.polymatrix import (
    algo_third_wsne,
    chain_gaps,
    choose_delta,
    decode_wsne_profile,
    gadget_case_check,
    gap_step,
    is_bipartite,
    iter_grid_equilibria,
    reduce_pc_to_winlose,
    reduce_pc_to_wsne,
    verify_wsne,
    win_lose_values,
)
from purecircuit.solvers import MONOTONE, enumerate_solutions, solve_monotone, solve_no_purify, solve_non_robust
from purecircuit.sperner import expected_counts, reduce_to_pure_circuit, selection_indices
from purecircuit.threshold import (
    ThresholdGame,
    algo_sixth,
    decode_threshold,
    encode_pc_witness_threshold,
    reduce_pc_to_threshold,
    threshold_case_check,
    verify_threshold_eq,
)

RESULTS: dict[int, str] = {}


def criterion(number: int, title: str, limit: float):
    """Time the body; a pass over the time limit counts as a failure."""

    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            start = time.perf_counter()
            verdict, err = "FAIL", None
            try:
                fn(*args, **kwargs)
                took = time.perf_counter() - start
                if took > limit:
                    err = AssertionError(f"took {took:.1f}s, limit {limit:g}s")
                else:
                    verdict = "PASS"
            except Exception as e:
                err = e
            took = time.perf_counter() - start
            RESULTS[number] = f"{verdict} criterion {number:2d}: {title} ({took:.2f}s, limit {limit:g}s)"
            print(RESULTS[number])
            if err is not None:
                raise err

        return run

    return wrap


# 1 ---------------------------------------------------------------------------

def _kleene(fn, ins):
    """Output forced by every resolution of the bot inputs, else None."""
    outs = {fn(*bits) for bits in itertools.product(*[[v] if v is not BOT else [ZERO, ONE] for v in ins])}
    return outs.pop() if len(outs) == 1 else None


BOOL = {
    G.NOT: lambda a: ONE if a is ZERO else ZERO,
    G.COPY: lambda a: a,
    G.AND: lambda a, b: ONE if (a, b) == (ONE, ONE) else ZERO,
    G.OR: lambda a, b: ZERO if (a, b) == (ZERO, ZERO) else ONE,
    G.NAND: lambda a, b: ZERO if (a, b) == (ONE, ONE) else ONE,
    G.NOR: lambda a, b: ONE if (a, b) == (ZERO, ZERO) else ZERO,
}


def table_ok(gate, x, semantics) -> bool:
    ins = [x[u] for u in gate.inputs]
    outs = [x[v] for v in gate.outputs]
    if gate.type is G.PURIFY:
        if ins[0] is BOT:
            return outs.count(BOT) < 2
        return outs == [ins[0], ins[0]]
    if semantics is Semantics.NONROBUST and BOT in ins:
        return True
    forced = _kleene(BOOL[gate.type], ins)
    return forced is None or outs[0] is forced


@criterion(1, "verifier agrees with a truth-table evaluator", 5)
def test_c01_verifier_oracle_equivalence():
    rng = random.Random(1)
    for i in range(100):
        sem = Semantics.ROBUST if i % 2 == 0 else Semantics.NONROBUST
        inst = random_pc_instance(rng, rng.randint(3, 6), semantics=sem)
        for other in (sem, Semantics.ROBUST if sem is Semantics.NONROBUST else Semantics.NONROBUST):
            inst = type(inst)(inst.nodes, inst.gates, other)
            for vals in itertools.product(VALUES, repeat=len(inst.nodes)):
                x = dict(zip(inst.nodes, vals))
                want = tuple(table_ok(g, x, other) for g in inst.gates)
                assert verify_assignment(inst, x).satisfied == want


# 2 ---------------------------------------------------------------------------

@criterion(2, "enumerated solution sets of the two 3-node instances", 1)
def test_c02_enumerated_ground_truth():
    def triples(text):
        return {tuple(s[v] for v in "uvw") for s in enumerate_solutions(pc(text))}

    assert triples(EX1) == {(BOT, BOT, ZERO), (BOT, BOT, ONE)}
    assert triples(EX2) == {(BOT, ZERO, BOT), (BOT, BOT, ZERO)}


# 3 ---------------------------------------------------------------------------

@criterion(3, "polynomial-time solvers on 100 instances per class", 10)
def test_c03_special_case_solvers():
    rng = random.Random(3)
    no_purify = tuple(t for t in G if t is not G.PURIFY)
    for _ in range(100):
        a = random_pc_instance(rng, rng.randint(3, 30), no_purify)
        assert verify_assignment(a, solve_no_purify(a)).ok
        b = random_pc_instance(rng, rng.randint(3, 30), tuple(MONOTONE))
        assert verify_assignment(b, solve_monotone(b)).ok
        c = random_pc_instance(rng, rng.randint(3, 30), semantics=Semantics.NONROBUST)
        assert verify_assignment(c, solve_non_robust(c)).ok


# 4 ---------------------------------------------------------------------------

@criterion(4, "purification, sorting and structural properties of the Sperner stage", 30)
def test_c04_sperner_stage():
    assert purification_property(16)
    for k in range(1, 9):
        assert sorting_property(k, itertools.product(VALUES, repeat=k))
    rng = random.Random(4)
    assert sorting_property(24, [[rng.choice(VALUES) for _ in range(24)] for _ in range(1000)])
    for n, m in [(1, 2), (2, 2), (2, 3)]:
        inst = staircase(n, m)
        circ, emap = reduce_to_pure_circuit(inst)
        g = sum(1 for w in inst.circuit.wires if w.op != "INPUT")
        k, nodes, gates = closed_form(n, m, g)
        assert emap.k == k == 3 * n * m * m
        assert (len(circ.nodes), len(circ.gates)) == (nodes, gates) == expected_counts(inst)
        assert emap.selection == selection_indices(n, m) == tuple(j * 2 * n * m for j in range(1, m + 1))


# 5 ---------------------------------------------------------------------------

@criterion(5, "GCircuit gadgets at 9/100 and the PURIFY boundary witness at 1/10", 60)
def test_c05_gcircuit_gadgets():
    for kind in ("nor", "purify"):
        rep = gc_gadget_case_check(kind, F(9, 100), F(1, 100))
        assert rep.ok, rep.counterexamples[:3]
    assert purify_bot_witness(F(1, 10)) is not None


# 6 ---------------------------------------------------------------------------

@criterion(6, "1/3-WSNE algorithm on 200 normalized games", 30)
def test_c06_algo_third():
    rng = random.Random(6)
    for _ in range(200):
        g = random_polymatrix_game(rng, rng.randint(1, 40), rng.choice([0.05, 0.1, 0.3]))
        assert verify_wsne(g, algo_third_wsne(g), F(1, 3)).ok


# 7 ---------------------------------------------------------------------------

@criterion(7, "WSNE reduction, grid search at 3/10 and decoding", 60)
def test_c07_wsne_end_to_end():
    inst = pc(EX1)
    game, rmap = reduce_pc_to_wsne(inst)
    found = 0
    for prof in iter_grid_equilibria(game, F(3, 10), F(1, 100)):
        assert verify_wsne(game, prof, F(3, 10)).ok
        assert is_solution(inst, decode_wsne_profile(rmap, prof))
        found += 1
    assert found > 0


# 8 ---------------------------------------------------------------------------

@criterion(8, "AND gadget holds at 33/100 and breaks at 34/100", 10)
def test_c08_wsne_tightness():
    assert gadget_case_check("wsne-and", F(33, 100), F(1, 100)).ok
    rep = gadget_case_check("wsne-and", F(34, 100), F(1, 100))
    assert "inputs (1, 1): action zero is within 17/50 of the best response (gap 1/3)" in rep.counterexamples


# 9 ---------------------------------------------------------------------------

@criterion(9, "NE cutoff, chain length and gap recurrence at 8/100", 5)
def test_c09_ne_chain():
    eps = F(8, 100)
    p = choose_delta(eps)
    d = p.delta
    assert eps < d * (1 - 2 * d) and d < F(1, 4)
    assert p.chain_length % 2 == 0 and p.chain_length >= (1 - 4 * d) / p.C
    gaps = chain_gaps(eps, d, p.chain_length)
    assert gaps[-1] >= 1 - 2 * d
    floor = 1 - 2 * d
    assert gap_step(floor, eps) >= floor
    for t in range(0, 101):
        g = floor + (1 - floor) * F(t, 100)
        assert gap_step(g, eps) >= floor


# 10 --------------------------------------------------------------------------

@criterion(10, "win-lose structure on 20 instances and copy forcing at 33/100", 30)
def test_c10_winlose():
    rng = random.Random(10)
    for _ in range(20):
        game, _ = reduce_pc_to_winlose(random_pc_instance(rng, rng.randint(3, 12)), prepare=True)
        assert win_lose_values(game) is not None
        assert is_bipartite(game)
        assert max(game.degree(p) for p in game.players) <= 7
        assert game.two_action
    assert gadget_case_check("winlose-copy", F(33, 100), F(1, 100)).ok


# 11 --------------------------------------------------------------------------

@criterion(11, "threshold algorithm, gadget suite and witness round trip", 60)
def test_c11_threshold():
    rng = random.Random(11)
    for _ in range(500):
        nodes, edges = random_digraph(rng, rng.randint(1, 100), rng.choice([0.01, 0.03, 0.1]))
        g = ThresholdGame(tuple(nodes), tuple(edges))
        assert verify_threshold_eq(g, algo_sixth(g), F(1, 6)).ok
    near = F(1, 6) - F(1, 100)
    for kind in ("not", "nor", "purify"):
        assert threshold_case_check(kind, near, F(1, 200)).ok
    rep = threshold_case_check("nor", F(1, 6), F(1, 200))
    assert "inputs (1/6, 1/6): sum 1/3 lies in the band, output is free" in rep.counterexamples
    inst = pc(EX1)
    game, rmap = reduce_pc_to_threshold(inst)
    a = {"u": BOT, "v": BOT, "w": ZERO}
    x = encode_pc_witness_threshold(game, rmap, a, near)
    assert x is not None and verify_threshold_eq(game, x, near).ok
    back = decode_threshold(rmap, x, near)
    assert back == a and is_solution(inst, back)


# 12 --------------------------------------------------------------------------

@criterion(12, "bimatrix shape, node masses and the constant chain", 120)
def test_c12_bimatrix():
    rng = random.Random(12)
    for _ in range(20):
        game, _ = reduce_pc_to_wsne(random_pc_instance(rng, rng.randint(3, 10)), prepare=True)
        bm, bmap = reduce_polymatrix_to_bimatrix(game)
        assert bm.shape == (2 * bmap.n, 2 * bmap.n)
        for m in (bm.R, bm.C):
            assert all(0 <= z <= 1 + LAMBDA for row in m for z in row)
    game, _ = reduce_pc_to_wsne(pc(EX1))
    bm, bmap = reduce_polymatrix_to_bimatrix(game)
    assert bmap.n == 2
    s = grid_search_relative_wsne(bm, F(1, 10), F(1, 20))
    assert s is not None and verify_relative_wsne(bm, s, F(1, 10)).ok
    lo, hi = mass_interval(bmap.n, F(1, 10), LAMBDA)
    assert all(lo <= m <= hi for side in node_masses(bmap, s) for m in side)
    marg = decode_bimatrix(bmap, s)
    assert set(marg) == set(game.players) and all(sum(v) == 1 for v in marg.values())
    assert BETA * EPS_TARGET < F(1, 3)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
