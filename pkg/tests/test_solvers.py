import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import EX1, EX2, pc
from purecircuit.core import BOT, ONE, ZERO, GateType, PureCircuitError, Semantics, verify_assignment
from purecircuit.generators import random_pc_instance
from purecircuit.solvers import (
    MONOTONE,
    Inconclusive,
    SolveBudget,
    brute_force_solve,
    enumerate_solutions,
    relaxation_iterate,
    solve_monotone,
    solve_no_purify,
    solve_non_robust,
)

G = GateType
NOT3 = "gate NOT a -> b\ngate NOT b -> c\ngate NOT c -> a\n"


def triples(sols, names="uvw"):
    return [tuple(str(s[n]) for n in names) for s in sols]


def test_ground_truth_solution_sets():
    # Frozen from a full enumeration of the 27 assignments of each instance.
    assert triples(enumerate_solutions(pc(EX1))) == [("bot", "bot", "0"), ("bot", "bot", "1")]
    assert triples(enumerate_solutions(pc(EX2))) == [("bot", "0", "bot"), ("bot", "bot", "0")]
    assert triples(enumerate_solutions(pc("gate NOT u -> v\ngate NOT v -> u\n")), "uv") == [
        ("0", "1"), ("1", "0"), ("bot", "bot"),
    ]


def test_brute_force_examples():
    x = brute_force_solve(pc(NOT3))
    assert set(x.values()) == {BOT}
    assert triples([brute_force_solve(pc(EX1))]) == [("bot", "bot", "0")]


def test_brute_force_budget_is_inconclusive():
    with pytest.raises(Inconclusive):
        brute_force_solve(pc(EX1), SolveBudget(max_assignments=3))


def test_enumeration_cap():
    inst = random_pc_instance(random.Random(1), 13)
    with pytest.raises(PureCircuitError, match="cap"):
        enumerate_solutions(inst)


def test_no_purify():
    inst = pc("gate NOR a b -> c\ngate NOT c -> a\ngate NOT c -> b\n")
    assert set(solve_no_purify(inst).values()) == {BOT}
    assert solve_no_purify(pc("")) == {}
    with pytest.raises(PureCircuitError):
        solve_no_purify(pc(EX1))


def test_monotone():
    inst = pc("gate PURIFY a -> b c\ngate AND b c -> d\ngate COPY d -> a\n")
    x = solve_monotone(inst)
    assert set(x.values()) == {ONE} and verify_assignment(inst, x).ok
    assert verify_assignment(inst, solve_monotone(inst, ZERO)).ok
    with pytest.raises(PureCircuitError):
        solve_monotone(pc(EX2))


def test_non_robust_examples():
    cyc = pc("semantics nonrobust\n" + NOT3)
    assert set(solve_non_robust(cyc).values()) == {BOT}
    tail = pc("semantics nonrobust\ngate PURIFY u -> v w\ngate NOT v -> u\n")
    x = solve_non_robust(tail)
    assert x["u"] is BOT and x["v"] is BOT and x["w"].pure
    with pytest.raises(PureCircuitError):
        solve_non_robust(pc(EX1))


def test_relaxation_examples():
    x = relaxation_iterate(pc("gate NOT u -> v\ngate NOT v -> u\n"))
    assert (x["u"], x["v"]) == (BOT, BOT)
    assert set(relaxation_iterate(pc(NOT3)).values()) == {BOT}
    x = relaxation_iterate(pc(EX1))
    assert x is None or verify_assignment(pc(EX1), x).ok


seeds = st.integers(min_value=0, max_value=10**6)


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(min_value=3, max_value=6))
def test_robust_instances_always_solvable(seed, n):
    inst = random_pc_instance(random.Random(seed), n)
    sols = enumerate_solutions(inst)
    assert sols, "a robust instance without solutions"
    assert brute_force_solve(inst) == sols[0]


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(min_value=3, max_value=6))
def test_non_robust_output_is_enumerated(seed, n):
    inst = random_pc_instance(random.Random(seed), n, semantics=Semantics.NONROBUST)
    x = solve_non_robust(inst)
    assert x in enumerate_solutions(inst)


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(min_value=3, max_value=12))
def test_relaxation_output_verifies(seed, n):
    inst = random_pc_instance(random.Random(seed), n)
    x = relaxation_iterate(inst, SolveBudget(max_iterations=500, seed=seed))
    assert x is None or verify_assignment(inst, x).ok


def test_solver_classes_on_seeded_instances():
    rng = random.Random(3)
    for _ in range(100):
        n = rng.randint(3, 30)
        a = random_pc_instance(rng, n, (G.NOT, G.NOR, G.OR, G.AND, G.NAND, G.COPY))
        assert verify_assignment(a, solve_no_purify(a)).ok
        b = random_pc_instance(rng, n, tuple(MONOTONE))
        assert verify_assignment(b, solve_monotone(b)).ok
        c = random_pc_instance(rng, n, semantics=Semantics.NONROBUST)
        assert verify_assignment(c, solve_non_robust(c)).ok
