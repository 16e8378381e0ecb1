import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from purecircuit.core import (
    BOT,
    ONE,
    VALUES,
    ZERO,
    GateType,
    PCInstance,
    PureCircuitError,
    Value,
    kleene_eval,
    purify_tree,
    validate_instance,
    verify_assignment,
)
from purecircuit.solvers import relaxation_iterate
from purecircuit.sperner import (
    BooleanCircuit,
    ExtractionMap,
    SpernerInstance,
    Wire,
    brute_force_sperner,
    build_sorting_network,
    check_boundary,
    comparator_count,
    eval_labeling,
    expected_counts,
    extract_solution,
    labeling_circuit,
    reduce_to_pure_circuit,
    selection_indices,
    sorting_instance,
    unary_bits,
    verify_sperner_solution,
)


def not_bit2() -> SpernerInstance:
    c = BooleanCircuit(1, 2, (Wire("b", "INPUT", (1, 2)), Wire("o", "NOT", ("b",))), ("o",))
    return SpernerInstance(1, 2, c)


def constant_plus(m: int) -> SpernerInstance:
    w = (Wire("a", "INPUT", (1, 1)), Wire("n", "NOT", ("a",)), Wire("o", "OR", ("a", "n")))
    return SpernerInstance(1, m, BooleanCircuit(1, m, w, ("o",)))


def staircase(n: int, m: int, cut: int = 2) -> SpernerInstance:
    """+1 below ``cut`` in each coordinate, -1 from ``cut`` on."""
    return SpernerInstance(n, m, labeling_circuit(n, m, lambda p: [1 if x < cut else -1 for x in p]))


def test_eval_labeling_examples():
    inst = not_bit2()
    assert eval_labeling(inst, (1,)) == (1,)
    assert eval_labeling(inst, (2,)) == (-1,)
    assert {eval_labeling(constant_plus(3), (c,)) for c in (1, 2, 3)} == {(1,)}
    with pytest.raises(PureCircuitError):
        eval_labeling(inst, (3,))


def test_unary_convention():
    assert unary_bits(1, 3) == (False, False, False)
    assert unary_bits(3, 3) == (True, True, True)


def test_boundary_examples():
    assert check_boundary(not_bit2()).ok
    rep = check_boundary(constant_plus(2))
    assert not rep.ok and rep.violations[0][0] == (2,)
    assert check_boundary(staircase(2, 4), mode="sampled", samples=1000).ok


def test_verify_sperner_examples():
    inst = not_bit2()
    assert verify_sperner_solution(inst, [(1,), (2,)])
    assert not verify_sperner_solution(inst, [(1,), (1,)])
    far = staircase(1, 3)
    assert not verify_sperner_solution(far, [(1,), (3,)])


def test_verify_trims_covering_sets():
    inst = staircase(2, 3)
    v = verify_sperner_solution(inst, [(1, 1), (1, 2), (2, 1), (2, 2)])
    assert v and len(v.trimmed) == 3
    assert verify_sperner_solution(inst, v.trimmed)


def test_brute_force_sperner_examples():
    assert brute_force_sperner(not_bit2()) == ((1,), (2,))
    assert brute_force_sperner(staircase(1, 3, cut=3)) == ((2,), (3,))
    assert brute_force_sperner(constant_plus(2)) is None


def test_sorting_network_sizes():
    assert comparator_count(2) == 1
    assert comparator_count(3) == 3 and len(build_sorting_network(3)) == 3
    rng = random.Random(0)
    for _ in range(50):
        xs = [rng.random() for _ in range(12)]
        for layer in build_sorting_network(12):
            for a, b in layer:
                xs[a], xs[b] = min(xs[a], xs[b]), max(xs[a], xs[b])
        assert xs == sorted(xs)


def run_tree(k: int, root: Value):
    fresh = iter(f"t{i}" for i in itertools.count())
    gates, leaves = purify_tree("r", k, lambda: next(fresh))
    inst = PCInstance.from_gates(gates, extra_nodes=["r"])
    x = kleene_eval(inst, {"r": root})
    return [x[v] for v in leaves]


def purification_property(max_leaves: int = 16) -> bool:
    for k in range(1, max_leaves + 1):
        for b in (ZERO, ONE):
            if run_tree(k, b) != [b] * k:
                return False
        if sum(v is BOT for v in run_tree(k, BOT)) > 1:
            return False
    return True


def sorted_like(inputs, outputs) -> bool:
    k0 = sum(v is ZERO for v in inputs)
    k1 = sum(v is ONE for v in inputs)
    k = len(inputs)
    return all(v is ZERO for v in outputs[:k0]) and all(v is ONE for v in outputs[k - k1:])


def sorting_property(k: int, vectors) -> bool:
    inst, ins, outs = sorting_instance(k)
    for vec in vectors:
        x = kleene_eval(inst, dict(zip(ins, vec)))
        if not sorted_like(vec, [x[o] for o in outs]):
            return False
    return True


def test_purification_forward_property():
    assert purification_property(16)


@pytest.mark.parametrize("k", range(1, 7))
def test_sorting_property_exhaustive_small(k):
    assert sorting_property(k, itertools.product(VALUES, repeat=k))


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([12, 24]), st.integers(min_value=0, max_value=10**6))
def test_sorting_property_sampled(k, seed):
    rng = random.Random(seed)
    assert sorting_property(k, [[rng.choice(VALUES) for _ in range(k)]])


def closed_form(n: int, m: int, g: int) -> tuple[int, int, int]:
    k = 3 * n * m * m
    comps = sum(len(range(r % 2, k - 1, 2)) for r in range(k))
    nodes = n * m + 2 * n * m * (k - 1) + k * g + 2 * n * comps
    gates = n * m + n * m * (k - 1) + k * g + 2 * n * comps
    return k, nodes, gates


@pytest.mark.parametrize("n,m", [(1, 2), (2, 2), (2, 3)])
def test_structural_counts(n, m):
    inst = staircase(n, m)
    pc, emap = reduce_to_pure_circuit(inst)
    g = sum(1 for w in inst.circuit.wires if w.op != "INPUT")
    k, nodes, gates = closed_form(n, m, g)
    assert emap.k == k == 3 * n * m * m
    assert (len(pc.nodes), len(pc.gates)) == (nodes, gates) == expected_counts(inst)
    assert emap.selection == tuple(j * 2 * n * m for j in range(1, m + 1)) == selection_indices(n, m)
    assert sum(1 for x in pc.gates if x.type is GateType.PURIFY) == n * m * (k - 1)
    assert validate_instance(pc).valid
    assert all(v in set(pc.nodes) for v in emap.leaves.values())


def test_k_and_selection_examples():
    assert reduce_to_pure_circuit(not_bit2())[1].k == 12
    assert selection_indices(1, 2) == (4, 8)
    assert reduce_to_pure_circuit(staircase(2, 2))[1].k == 24


def synthetic_map(n: int, m: int, k: int) -> ExtractionMap:
    leaves = {(i, j, c): f"l/{i}/{j}/{c}" for i in range(1, n + 1) for j in range(1, m + 1) for c in range(1, k + 1)}
    return ExtractionMap(n, m, k, leaves, {}, selection_indices(n, m))


def test_extract_synthetic():
    emap = synthetic_map(2, 3, 4)
    point = (3, 1)
    bits = {1: unary_bits(3, 3), 2: unary_bits(1, 3)}
    x = {v: (ONE if bits[i][j - 1] else ZERO) for (i, j, c), v in emap.leaves.items()}
    assert extract_solution(emap, x) == (point,)
    x[emap.leaves[(1, 1, 1)]] = BOT
    x[emap.leaves[(1, 1, 2)]] = ZERO
    x[emap.leaves[(1, 2, 2)]] = ZERO
    x[emap.leaves[(1, 3, 2)]] = ZERO
    # Copy 1 is dropped; copy 2 now encodes (1, 1) and is listed first.
    assert extract_solution(emap, x) == ((1, 1), point)


def test_extract_rejects_non_solutions():
    pc, emap = reduce_to_pure_circuit(not_bit2())
    with pytest.raises(PureCircuitError):
        extract_solution(emap, {v: ZERO for v in pc.nodes})


def test_end_to_end_with_relaxation():
    inst = staircase(1, 2)
    pc, emap = reduce_to_pure_circuit(inst)
    x = relaxation_iterate(pc)
    assert x is not None and verify_assignment(pc, x).ok
    assert verify_sperner_solution(inst, extract_solution(emap, x))
