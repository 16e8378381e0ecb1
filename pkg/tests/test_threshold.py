import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from conftest import pc
from purecircuit.core import PureCircuitError, Value, is_solution
from purecircuit.generators import random_digraph
from purecircuit.threshold import (
    THRESHOLD_KINDS,
    ThresholdGame,
    algo_sixth,
    allowed,
    decode_threshold,
    decode_value,
    encode_pc_witness_threshold,
    reduce_pc_to_threshold,
    threshold_case_check,
    verify_threshold_eq,
)

B, Z, O = Value.BOT, Value.ZERO, Value.ONE
SIXTH = F(1, 6)
NEAR = SIXTH - F(1, 100)


def test_allowed_bands():
    e = F(1, 10)
    assert allowed(F(0), e) == (F(9, 10), 1)
    assert allowed(F(3, 5), e) == (0, 1)
    assert allowed(F(2, 5), e) == (0, 1)
    assert allowed(F(61, 100), e) == (0, e)


def test_verify_examples():
    g = ThresholdGame(("a", "b"), (("a", "b"), ("b", "a")))
    assert verify_threshold_eq(g, {"a": F(1, 2), "b": F(1, 2)}, 0).ok
    v = verify_threshold_eq(g, {"a": F(1), "b": F(1)}, SIXTH)
    assert v.violated == ["a", "b"]
    lone = ThresholdGame(("x",), ())
    assert verify_threshold_eq(lone, {"x": F(5, 6)}, SIXTH).ok
    assert not verify_threshold_eq(lone, {"x": F(4, 5)}, SIXTH).ok


def test_verify_rejects_bad_input():
    g = ThresholdGame(("a",), ())
    with pytest.raises(PureCircuitError):
        verify_threshold_eq(g, {}, 0)
    with pytest.raises(PureCircuitError):
        verify_threshold_eq(g, {"a": F(3, 2)}, 0)
    with pytest.raises(PureCircuitError):
        ThresholdGame(("a",), (("a", "a"),))


def test_algo_sixth_examples():
    # one in-edge cycle gets 1/2, a node fed by two gets 1/6, a root gets 1
    g = ThresholdGame(
        ("r", "p", "q", "s", "t"),
        (("p", "q"), ("q", "p"), ("r", "s"), ("p", "s"), ("s", "t")),
    )
    x = algo_sixth(g)
    assert x == {"r": 1, "p": F(1, 2), "q": F(1, 2), "s": SIXTH, "t": 1}
    assert verify_threshold_eq(g, x, SIXTH).ok


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 40), st.sampled_from([0.02, 0.05, 0.1, 0.3]))
def test_algo_sixth_property(seed, n, p):
    nodes, edges = random_digraph(random.Random(seed), n, p)
    g = ThresholdGame(tuple(nodes), tuple(edges))
    assert verify_threshold_eq(g, algo_sixth(g), SIXTH).ok


def test_reduction_shape(ex1):
    g, rmap = reduce_pc_to_threshold(ex1)
    fresh = [v for v in g.nodes if v.startswith("th/")]
    assert fresh == ["th/v/a", "th/v/b", "th/v/c", "th/v/d"]
    assert len(g.edges) == 7 + 1
    assert all(i <= 2 for i, _ in g.degrees().values())
    assert rmap.gadgets[0].internals == tuple(fresh)


def test_reduction_rejects_and(ex1):
    with pytest.raises(PureCircuitError):
        reduce_pc_to_threshold(pc("gate AND u v -> w\ngate PURIFY w -> u v\n"))


def test_decode_examples(ex1):
    _, rmap = reduce_pc_to_threshold(ex1)
    x = {"u": F(1, 2), "v": F(1, 10), "w": F(9, 10)}
    assert decode_threshold(rmap, x, F(1, 10)) == {"u": B, "v": Z, "w": O}
    assert decode_value(F(1, 10), F(1, 20)) is B
    with pytest.raises(PureCircuitError):
        decode_threshold(rmap, x, SIXTH)


def test_encode_witness_ex1(ex1):
    g, rmap = reduce_pc_to_threshold(ex1)
    x = encode_pc_witness_threshold(g, rmap, {"u": B, "v": B, "w": Z}, NEAR)
    want = {"u": F(1, 2), "v": F(1, 2), "w": 0}
    want.update({"th/v/a": 1, "th/v/b": 0, "th/v/c": F(1, 2), "th/v/d": 1})
    assert x == want
    assert verify_threshold_eq(g, x, NEAR).ok
    assert decode_threshold(rmap, x, NEAR) == {"u": B, "v": B, "w": Z}


def test_encode_unreachable_solution(ex1):
    g, rmap = reduce_pc_to_threshold(ex1)
    assert is_solution(ex1, {"u": B, "v": B, "w": O})
    assert encode_pc_witness_threshold(g, rmap, {"u": B, "v": B, "w": O}, NEAR) is None


@pytest.mark.parametrize("kind", THRESHOLD_KINDS)
def test_gadget_cases_pass(kind):
    rep = threshold_case_check(kind, NEAR, F(1, 200))
    assert rep.ok, rep.counterexamples[:3]


def test_nor_breaks_at_a_sixth():
    rep = threshold_case_check("nor", SIXTH, F(1, 200))
    assert "inputs (1/6, 1/6): sum 1/3 lies in the band, output is free" in rep.counterexamples
