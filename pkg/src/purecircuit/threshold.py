"""Threshold games on digraphs.

Every node picks x_v in [0, 1] and looks at the sum s of its in-neighbours'
values.  At tolerance eps: s > 1/2 + eps forces x_v <= eps, s < 1/2 - eps
forces x_v >= 1 - eps, and inside the band [1/2 - eps, 1/2 + eps] any value
is fine.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Mapping, Sequence

from . import witness
from .core import BOT, ONE, ZERO, GateType, PCInstance, PureCircuitError, Value, verify_assignment
from .gcircuit import CaseReport, grid
from .reduction import Gadget, ReductionMap

F = Fraction
G = GateType
HALF = F(1, 2)
SIXTH = F(1, 6)
BASIS = frozenset({G.NOT, G.NOR, G.PURIFY})


@dataclass(frozen=True)
class ThresholdGame:
    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    _pred: dict[str, tuple[str, ...]] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(set(self.nodes)) != len(self.nodes):
            raise PureCircuitError("duplicate node id")
        pred: dict[str, list[str]] = {v: [] for v in self.nodes}
        seen = set()
        for u, v in self.edges:
            if u not in pred or v not in pred:
                raise PureCircuitError(f"edge {u} {v} names an unknown node")
            if u == v or (u, v) in seen:
                raise PureCircuitError(f"bad edge {u} {v}: self-loop or duplicate")
            seen.add((u, v))
            pred[v].append(u)
        object.__setattr__(self, "_pred", {v: tuple(ps) for v, ps in pred.items()})

    def in_neighbors(self, v: str) -> tuple[str, ...]:
        return self._pred[v]

    def degrees(self) -> dict[str, tuple[int, int]]:
        out = {v: 0 for v in self.nodes}
        for u, _ in self.edges:
            out[u] += 1
        return {v: (len(self._pred[v]), out[v]) for v in self.nodes}


@dataclass(frozen=True)
class NodeVerdicts:
    satisfied: dict[str, bool]

    @property
    def ok(self) -> bool:
        return all(self.satisfied.values())

    @property
    def violated(self) -> list[str]:
        return [v for v, s in self.satisfied.items() if not s]


def allowed(total: Fraction, eps: Fraction) -> tuple[Fraction, Fraction]:
    """Interval of values a node may take given its in-sum."""
    if total > HALF + eps:
        return F(0), eps
    if total < HALF - eps:
        return 1 - eps, F(1)
    return F(0), F(1)


def node_ok(g: ThresholdGame, x: Mapping[str, Fraction], v: str, eps: Fraction) -> bool:
    lo, hi = allowed(sum((x[u] for u in g.in_neighbors(v)), F(0)), eps)
    return lo <= x[v] <= hi


def verify_threshold_eq(g: ThresholdGame, x: Mapping[str, Fraction], eps) -> NodeVerdicts:
    eps = F(eps)
    if not 0 <= eps < HALF:
        raise PureCircuitError("eps must lie in [0, 1/2)")
    missing = [v for v in g.nodes if v not in x]
    if missing:
        raise PureCircuitError("assignment is missing nodes: " + ", ".join(missing))
    for v in g.nodes:
        if not 0 <= x[v] <= 1:
            raise PureCircuitError(f"value of {v} lies outside [0, 1]")
    return NodeVerdicts({v: node_ok(g, x, v, eps) for v in g.nodes})


def algo_sixth(g: ThresholdGame) -> dict[str, Fraction]:
    """1/6-approximate equilibrium of any threshold game."""
    x: dict[str, Fraction] = {}
    pred: dict[str, str | None] = {}
    for v in g.nodes:
        ns = g.in_neighbors(v)
        if len(ns) >= 2:
            x[v] = SIXTH
        else:
            pred[v] = ns[0] if ns else None
    # Every remaining node has at most one in-edge, so each weak component
    # holds at most one cycle; walking predecessors finds it.
    for start in g.nodes:
        if start in x:
            continue
        walk, pos = [], {}
        v = start
        while v is not None and v not in x and v not in pos:
            pos[v] = len(walk)
            walk.append(v)
            v = pred.get(v)
        if v is not None and v in pos:
            for c in walk[pos[v]:]:
                x[c] = HALF
    # What remains is a forest hanging off assigned nodes.
    pending = [v for v in g.nodes if v not in x]
    while pending:
        rest = []
        for v in pending:
            p = pred[v]
            if p is not None and p not in x:
                rest.append(v)
                continue
            total = sum((x[u] for u in g.in_neighbors(v)), F(0))
            x[v] = SIXTH if total > HALF + SIXTH else F(1)
        if len(rest) == len(pending):
            raise PureCircuitError("internal error: unresolved predecessor chain")
        pending = rest
    return {v: x[v] for v in g.nodes}


def reduce_pc_to_threshold(inst: PCInstance) -> tuple[ThresholdGame, ReductionMap]:
    bad = inst.gate_types - BASIS
    if bad:
        raise PureCircuitError(
            "unsupported gate types " + ", ".join(sorted(t.value for t in bad)) + "; rewrite to NOT/NOR/PURIFY first"
        )
    nodes = list(inst.nodes)
    taken = set(nodes)
    edges: list[tuple[str, str]] = []
    gadgets = []
    for gi, g in enumerate(inst.gates):
        if g.type is not G.PURIFY:
            edges += [(u, g.outputs[0]) for u in g.inputs]
            gadgets.append(Gadget(gi, ()))
            continue
        (u,), (v, w) = g.inputs, g.outputs
        a, b, c, d = (f"th/{v}/{t}" for t in "abcd")
        for t in (a, b, c, d):
            if t in taken:
                raise PureCircuitError(f"gadget node {t} clashes with an existing node")
            taken.add(t)
        nodes += [a, b, c, d]
        edges += [(u, a), (a, b), (b, d), (d, w), (u, c), (b, c), (c, v)]
        gadgets.append(Gadget(gi, (a, b, c, d)))
    rmap = ReductionMap("threshold", {v: v for v in inst.nodes}, {}, tuple(gadgets), inst)
    return ThresholdGame(tuple(nodes), tuple(edges)), rmap


def decode_value(t: Fraction, eps: Fraction) -> Value:
    if t <= eps:
        return ZERO
    if t >= 1 - eps:
        return ONE
    return BOT


def decode_threshold(rmap: ReductionMap, x: Mapping[str, Fraction], eps) -> dict[str, Value]:
    eps = F(eps)
    if not 0 <= eps < SIXTH:
        raise PureCircuitError("decoding needs eps in [0, 1/6)")
    return {v: decode_value(F(x[t]), eps) for v, t in rmap.nodes.items()}


def encode_pc_witness_threshold(
    g: ThresholdGame, rmap: ReductionMap, a: Mapping[str, Value], eps, budget: int = 200_000
) -> dict[str, Fraction] | None:
    """Threshold values that decode to ``a`` and verify, or None.

    The first pass uses the palette {0, 1/2, 1} with bot at 1/2; the second
    also lets pure nodes sit at eps or 1 - eps and internals use both.
    Internal nodes try values from high to low.
    """
    eps = F(eps)
    if not 0 <= eps < SIXTH:
        raise PureCircuitError("encoding needs eps in [0, 1/6)")
    src = rmap.source
    if src is None:
        raise PureCircuitError("reduction map carries no source instance")
    if not verify_assignment(src, a).ok:
        raise PureCircuitError("assignment does not satisfy the source instance")
    passes = [
        ({ZERO: [F(0)], ONE: [F(1)], BOT: [HALF]}, [F(1), HALF, F(0)]),
        ({ZERO: [F(0), eps], ONE: [F(1), 1 - eps], BOT: [HALF]}, [F(1), 1 - eps, HALF, eps, F(0)]),
    ]
    for pure, internal in passes:
        x = _encode_pass(g, rmap, a, eps, pure, internal, budget)
        if x is not None:
            return x
    return None


def _encode_pass(g, rmap, a, eps, pure, internal, budget):
    src = rmap.source
    cands = {v: pure[a[v]] for v in src.nodes}
    units = []
    for gd in rmap.gadgets:
        sg = src.gates[gd.source_gate]
        scope = list(dict.fromkeys(sg.inputs + sg.outputs))
        checked = list(gd.internals) + list(sg.outputs)

        def solve(values, scope=scope, checked=checked, internals=gd.internals):
            fixed = {v: values[v] for v in scope}
            return witness.local_search(
                fixed,
                internals,
                lambda node, vals: internal,
                lambda vals: all(node_ok(g, vals, v, eps) for v in checked),
            )

        units.append((scope, solve))
    found = witness.search(sorted(src.nodes), cands, units, budget)
    if found is None:
        return None
    x = {v: found[v] for v in g.nodes}
    if not verify_threshold_eq(g, x, eps).ok:
        raise PureCircuitError("internal error: encoded witness does not verify")
    return x


# Gadget case checks.  Value sets are unions of closed intervals.

Intervals = list[tuple[Fraction, Fraction]]


def _reach(sums: Intervals, eps: Fraction) -> Intervals:
    """Values allowed for a node whose in-sum ranges over ``sums``."""
    lo_band, hi_band = HALF - eps, HALF + eps
    out: Intervals = []
    for a, b in sums:
        if b > hi_band:
            out.append((F(0), eps))
        if a < lo_band:
            out.append((1 - eps, F(1)))
        if b >= lo_band and a <= hi_band:
            out.append((F(0), F(1)))
    return out


def _inside(s: Intervals, lo: Fraction, hi: Fraction) -> bool:
    return all(lo <= a and b <= hi for a, b in s)


def _meets_open(s: Intervals, lo: Fraction, hi: Fraction) -> bool:
    return any(a < hi and b > lo for a, b in s)


def _shift(s: Intervals, c: Fraction) -> Intervals:
    return [(a + c, b + c) for a, b in s]


def _purify_chain(u: Fraction, b_set: Intervals | None, eps: Fraction):
    """Reachable sets of (w, v) given u, with b restricted to ``b_set``."""
    a_set = _reach([(u, u)], eps)
    b_all = _reach(a_set, eps)
    bs = b_all if b_set is None else b_set
    w = _reach(_reach(bs, eps), eps)
    v = _reach(_reach(_shift(bs, u), eps), eps)
    return b_all, w, v


def _b_points(b_all: Intervals, u: Fraction, eps: Fraction, pts: Sequence[Fraction]) -> list[Fraction]:
    """Representative b values: every region boundary that matters for d and
    c, midpoints between them, and the grid, restricted to reachable b."""
    cuts = sorted({F(0), F(1), HALF - eps, HALF + eps, HALF - eps - u, HALF + eps - u} | set(pts))
    cuts = [t for t in cuts if 0 <= t <= 1]
    cand = cuts + [(x + y) / 2 for x, y in zip(cuts, cuts[1:])]
    return sorted(t for t in set(cand) if any(a <= t <= b for a, b in b_all))


THRESHOLD_KINDS = ("not", "nor", "purify")


def threshold_case_check(kind: str, eps, step) -> CaseReport:
    """Check the forced responses of one gadget over a grid of inputs (the
    grid includes eps and 1 - eps); reachable internal values are tracked
    exactly as interval unions."""
    eps, step = F(eps), F(step)
    if kind not in THRESHOLD_KINDS:
        raise PureCircuitError(f"unknown gadget kind {kind!r}; expected one of {THRESHOLD_KINDS}")
    pts = grid(step, (eps, 1 - eps))
    low, high = (F(0), eps), (1 - eps, F(1))
    bad: list[str] = []
    cells = 0
    if kind == "not":
        for u in pts:
            cells += 1
            out = _reach([(u, u)], eps)
            if u <= eps and not _inside(out, *high):
                bad.append(f"input {u}: output may leave [1-eps, 1]")
            if u >= 1 - eps and not _inside(out, *low):
                bad.append(f"input {u}: output may leave [0, eps]")
    elif kind == "nor":
        for u, v in product(pts, pts):
            cells += 1
            out = _reach([(u + v, u + v)], eps)
            if u <= eps and v <= eps and not _inside(out, *high):
                bad.append(f"inputs ({u}, {v}): sum {u + v} lies in the band, output is free")
            if (u >= 1 - eps or v >= 1 - eps) and not _inside(out, *low):
                bad.append(f"inputs ({u}, {v}): output may leave [0, eps]")
    else:
        for u in pts:
            cells += 1
            b_all, w, v = _purify_chain(u, None, eps)
            if u <= eps and not (_inside(w, *low) and _inside(v, *low)):
                bad.append(f"input {u}: an output may leave [0, eps]")
            if u >= 1 - eps and not (_inside(w, *high) and _inside(v, *high)):
                bad.append(f"input {u}: an output may leave [1-eps, 1]")
            for b in _b_points(b_all, u, eps, pts):
                _, wb, vb = _purify_chain(u, [(b, b)], eps)
                if _meets_open(wb, eps, 1 - eps) and _meets_open(vb, eps, 1 - eps):
                    bad.append(f"input {u}, b = {b}: both outputs may be non-pure")
                    break
    return CaseReport(f"threshold-{kind}", eps, step, cells, tuple(bad))

