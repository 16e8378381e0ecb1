"""Generalized arithmetic circuits with additive error, and the gadget
compilation of NOR/PURIFY circuits into them."""

from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping

from . import witness
from .core import (
    BOT,
    ONE,
    ZERO,
    FreshNames,
    Gate,
    GateType,
    GateVerdicts,
    PCInstance,
    PureCircuitError,
    Semantics,
    Value,
    verify_assignment,
)
from .reduction import Gadget, ReductionMap

F = Fraction


class GCType(Enum):
    CONST = "Gc"
    SCALE = "Gxc"
    EQ = "G="
    ADD = "G+"
    SUB = "G-"
    LESS = "G<"
    OR = "Gor"
    AND = "Gand"
    NOT = "Gnot"

    @property
    def n_inputs(self) -> int:
        return {GCType.CONST: 0, GCType.SCALE: 1, GCType.EQ: 1, GCType.NOT: 1}.get(self, 2)

    @property
    def uses_constant(self) -> bool:
        return self in (GCType.CONST, GCType.SCALE)


@dataclass(frozen=True)
class GCGate:
    type: GCType
    inputs: tuple[str, ...]
    output: str
    const: Fraction | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "inputs", tuple(self.inputs))
        if len(self.inputs) != self.type.n_inputs:
            raise PureCircuitError(f"{self.type.value} takes {self.type.n_inputs} input(s)")
        if self.type.uses_constant:
            if self.const is None or not 0 <= self.const <= 1:
                raise PureCircuitError(f"{self.type.value} needs a constant in [0, 1]")
        elif self.const is not None:
            raise PureCircuitError(f"{self.type.value} takes no constant")


@dataclass(frozen=True)
class GCInstance:
    nodes: tuple[str, ...]
    gates: tuple[GCGate, ...]

    @classmethod
    def from_gates(cls, gates: Iterable[GCGate], extra_nodes: Iterable[str] = ()) -> "GCInstance":
        gates = tuple(gates)
        seen = dict.fromkeys(extra_nodes)
        for g in gates:
            seen.update(dict.fromkeys(g.inputs + (g.output,)))
        return cls(tuple(seen), gates)

    def output_counts(self) -> dict[str, int]:
        counts = {v: 0 for v in self.nodes}
        for g in self.gates:
            counts[g.output] = counts.get(g.output, 0) + 1
        return counts

    @property
    def valid(self) -> bool:
        return all(c == 1 for c in self.output_counts().values())


def _band(value, eps):
    return value - eps, value + eps


def allowed_interval(kind: GCType, ins: tuple, const, eps, one=1):
    """Interval the output must lie in, or None when unconstrained.

    Works on Fractions, or on integers scaled so that ``one`` stands for 1.
    """
    if kind is GCType.CONST:
        return _band(const, eps)
    if kind is GCType.SCALE:
        return _band(ins[0] * const / one, eps)
    if kind is GCType.EQ:
        return _band(ins[0], eps)
    if kind is GCType.ADD:
        return _band(min(ins[0] + ins[1], one), eps)
    if kind is GCType.SUB:
        return _band(max(ins[0] - ins[1], 0), eps)
    hi_band, lo_band = _band(one, eps), _band(0, eps)
    rules: list[tuple[Fraction, Fraction]] = []
    if kind is GCType.LESS:
        u, v = ins
        if u < v - eps:
            rules.append(hi_band)
        if u > v + eps:
            rules.append(lo_band)
    elif kind is GCType.OR:
        u, v = ins
        if u >= one - eps or v >= one - eps:
            rules.append(hi_band)
        if u <= eps and v <= eps:
            rules.append(lo_band)
    elif kind is GCType.AND:
        u, v = ins
        if u >= one - eps and v >= one - eps:
            rules.append(hi_band)
        if u <= eps or v <= eps:
            rules.append(lo_band)
    else:
        (u,) = ins
        if u <= eps:
            rules.append(hi_band)
        if u >= one - eps:
            rules.append(lo_band)
    if not rules:
        return None
    return max(r[0] for r in rules), min(r[1] for r in rules)


def _check_eps(eps: Fraction) -> None:
    if not 0 <= eps < 1:
        raise PureCircuitError("epsilon must lie in [0, 1)")


def verify_gcircuit(inst: GCInstance, x: Mapping[str, Fraction], eps: Fraction) -> GateVerdicts:
    _check_eps(eps)
    missing = [v for v in inst.nodes if v not in x]
    if missing:
        raise PureCircuitError("assignment is missing nodes: " + ", ".join(missing))
    for v in inst.nodes:
        if not 0 <= x[v] <= 1:
            raise PureCircuitError(f"value of {v} lies outside [0, 1]")
    verdicts = []
    for g in inst.gates:
        iv = allowed_interval(g.type, tuple(x[u] for u in g.inputs), g.const, eps)
        verdicts.append(iv is None or iv[0] <= x[g.output] <= iv[1])
    return GateVerdicts(tuple(verdicts))


NOR_THRESHOLD = F(5, 9)
PURIFY_LOW = F(3, 10)
PURIFY_HIGH = F(7, 10)


def _greater(u: str, c: Fraction, out: str, fresh) -> tuple[list[GCGate], list[str]]:
    """out := [u > c], as a comparison followed by a negation."""
    t, y = fresh(out), fresh(out)
    return [
        GCGate(GCType.CONST, (), t, c),
        GCGate(GCType.LESS, (u, t), y),
        GCGate(GCType.NOT, (y,), out),
    ], [t, y]


def reduce_pc_to_gcircuit(inst: PCInstance) -> tuple[GCInstance, ReductionMap]:
    if inst.semantics is not Semantics.ROBUST:
        raise PureCircuitError("the reduction expects robust semantics")
    bad = inst.gate_types - {GateType.NOR, GateType.PURIFY}
    if bad:
        raise PureCircuitError(
            "unsupported gate types " + ", ".join(sorted(t.value for t in bad)) + "; rewrite to PURIFY/NOR first"
        )
    fresh = FreshNames("gc", inst.nodes)
    gates: list[GCGate] = []
    gadgets = []
    for gi, g in enumerate(inst.gates):
        start = len(gates)
        if g.type is GateType.NOR:
            (w,) = g.outputs
            s, t = fresh(w), fresh(w)
            gates += [
                GCGate(GCType.ADD, g.inputs, s),
                GCGate(GCType.CONST, (), t, NOR_THRESHOLD),
                GCGate(GCType.LESS, (s, t), w),
            ]
            internals = [s, t]
        else:
            (u,), (v, w) = g.inputs, g.outputs
            gv, iv = _greater(u, PURIFY_LOW, v, fresh)
            gw, iw = _greater(u, PURIFY_HIGH, w, fresh)
            gates += gv + gw
            internals = iv + iw
        gadgets.append(Gadget(gi, tuple(internals), tuple(range(start, len(gates)))))
    gc = GCInstance.from_gates(gates, extra_nodes=inst.nodes)
    rmap = ReductionMap("gcircuit", {v: v for v in inst.nodes}, {}, tuple(gadgets), inst)
    return gc, rmap


def decode_value(t: Fraction, eps: Fraction) -> Value:
    if t <= eps:
        return ZERO
    if t >= 1 - eps:
        return ONE
    return BOT


def decode_gc_solution(rmap: ReductionMap, x: Mapping[str, Fraction], eps: Fraction) -> dict[str, Value]:
    if not 0 <= eps < F(1, 10):
        raise PureCircuitError("decoding needs epsilon below 1/10")
    return {v: decode_value(x[t], eps) for v, t in rmap.nodes.items()}


def _palette(eps: Fraction) -> list[Fraction]:
    return sorted({F(0), eps, F(1, 2), 1 - eps, F(1)})


def encode_pc_witness_gc(
    gc: GCInstance,
    rmap: ReductionMap,
    a: Mapping[str, Value],
    eps: Fraction,
    budget: int = 200_000,
) -> dict[str, Fraction] | None:
    """Search a circuit assignment that decodes to ``a`` and verifies."""
    if not 0 <= eps <= F(1, 10):
        raise PureCircuitError("encoding needs epsilon at most 1/10")
    src = rmap.source
    if src is None:
        raise PureCircuitError("reduction map carries no source instance")
    if not verify_assignment(src, a).ok:
        raise PureCircuitError("assignment does not satisfy the source instance")
    palette = _palette(eps)
    # Bot nodes try the midpoint and the gadget thresholds before the rest.
    bot = list(dict.fromkeys([F(1, 2), PURIFY_LOW, PURIFY_HIGH, NOR_THRESHOLD] + palette))
    cands = {v: [F(0)] if a[v] is ZERO else [F(1)] if a[v] is ONE else bot for v in src.nodes}
    producer = {g.output: g for g in gc.gates}

    def options(node: str, values: dict) -> list[Fraction]:
        g = producer[node]
        iv = allowed_interval(g.type, tuple(values[u] for u in g.inputs), g.const, eps)
        if iv is None:
            return palette
        lo, hi = max(iv[0], F(0)), min(iv[1], F(1))
        if lo > hi:
            return []
        # Centre first, then the interval ends, then palette points inside.
        picks = [min(max((iv[0] + iv[1]) / 2, lo), hi), lo, hi]
        picks += [t for t in palette if lo <= t <= hi]
        return list(dict.fromkeys(picks))

    units = []
    for gd in rmap.gadgets:
        sg = src.gates[gd.source_gate]
        scope = [rmap.nodes[v] for v in sg.nodes]
        tgates = [gc.gates[i] for i in gd.target_gates]

        def solve(values, gd=gd, scope=scope, tgates=tgates):
            fixed = {v: values[v] for v in scope}

            def check(vals):
                return all(
                    (iv := allowed_interval(g.type, tuple(vals[u] for u in g.inputs), g.const, eps)) is None
                    or iv[0] <= vals[g.output] <= iv[1]
                    for g in tgates
                )

            return witness.local_search(fixed, gd.internals, options, check)

        units.append((scope, solve))
    order = sorted(src.nodes)
    found = witness.search(order, cands, units, budget)
    if found is None:
        return None
    x = {v: found[v] for v in gc.nodes}
    if not verify_gcircuit(gc, x, eps).ok:
        raise PureCircuitError("internal error: encoded witness does not verify")
    return x


# Case analysis of single gadgets over a rational grid.


@dataclass(frozen=True)
class CaseReport:
    kind: str
    eps: Fraction
    step: Fraction
    cells: int
    counterexamples: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.counterexamples


def grid(step: Fraction, extra: Iterable[Fraction] = ()) -> list[Fraction]:
    """Multiples of ``step`` in [0, 1] plus any ``extra`` points inside."""
    if step <= 0 or (1 / step).denominator != 1:
        raise PureCircuitError("grid step must be 1/k for a positive integer k")
    n = int(1 / step)
    pts = {step * i for i in range(n + 1)}
    pts.update(p for p in extra if 0 <= p <= 1)
    return sorted(pts)


class ScaledGrid:
    """Grid points as integers over a common denominator, with the decoded
    class of each point; intervals are looked up by bisection."""

    def __init__(self, step: Fraction, eps: Fraction, constants: Iterable[Fraction] = ()):
        pts = grid(step, (eps, 1 - eps))
        dens = [p.denominator for p in pts] + [eps.denominator] + [c.denominator for c in constants]
        self.one = math.lcm(*dens)
        self.eps = int(eps * self.one)
        self.points = [int(p * self.one) for p in pts]
        self.cls = [decode_value(F(p, self.one), eps) for p in self.points]

    def scale(self, t: Fraction) -> int:
        v = t * self.one
        if v.denominator != 1:
            raise PureCircuitError(f"{t} is not representable on the grid")
        return int(v)

    def span(self, iv) -> range:
        if iv is None:
            return range(len(self.points))
        lo = bisect.bisect_left(self.points, iv[0])
        hi = bisect.bisect_right(self.points, iv[1])
        return range(lo, hi)

    def values(self, iv) -> list[int]:
        r = self.span(iv)
        return self.points[r.start : r.stop]

    def classes(self, iv) -> set[Value]:
        r = self.span(iv)
        return set(self.cls[r.start : r.stop])

    def show(self, t: int) -> str:
        return str(F(t, self.one))


def gc_gadget_case_check(kind: str, eps: Fraction, step: Fraction) -> CaseReport:
    """Every grid valuation consistent with a gadget's constraints must decode
    to something the source gate allows.  ``kind`` is ``nor`` or ``purify``.

    Inputs and internal values range over multiples of ``step`` together
    with the decoding thresholds eps and 1-eps."""
    _check_eps(eps)
    g = ScaledGrid(step, eps, (NOR_THRESHOLD, PURIFY_LOW, PURIFY_HIGH))
    one, e = g.one, g.eps
    bad: list[str] = []
    cells = 0
    if kind == "nor":
        t_vals = g.values(_band(g.scale(NOR_THRESHOLD), e))
        for iu, u in enumerate(g.points):
            for iv_, v in enumerate(g.points):
                du, dv = g.cls[iu], g.cls[iv_]
                if ONE in (du, dv):
                    want = ZERO
                elif du is ZERO and dv is ZERO:
                    want = ONE
                else:
                    continue
                cells += 1
                hit = _nor_counterexample(g, u, v, t_vals, want)
                if hit:
                    bad.append(hit)
    elif kind == "purify":
        for iu, u in enumerate(g.points):
            cells += 1
            branch = [_branch_outputs(g, u, g.scale(c)) for c in (PURIFY_LOW, PURIFY_HIGH)]
            du = g.cls[iu]
            if du.pure:
                for name, outs in zip("vw", branch):
                    if outs - {du}:
                        wrong = ",".join(sorted(map(str, outs - {du})))
                        bad.append(f"u={g.show(u)}: {name} may decode to {wrong}")
            if BOT in branch[0] and BOT in branch[1]:
                bad.append(f"u={g.show(u)}: both outputs may decode to bot")
    else:
        raise PureCircuitError(f"unknown gadget kind {kind!r}")
    return CaseReport(f"gc-{kind}", eps, step, cells, tuple(bad))


def _nor_counterexample(g: ScaledGrid, u: int, v: int, t_vals: list[int], want: Value) -> str | None:
    one, e = g.one, g.eps
    for s in g.values(allowed_interval(GCType.ADD, (u, v), None, e, one)):
        for t in t_vals:
            outs = g.classes(allowed_interval(GCType.LESS, (s, t), None, e, one))
            if outs - {want}:
                wrong = ",".join(sorted(map(str, outs - {want})))
                return f"u={g.show(u)} v={g.show(v)} s={g.show(s)} t={g.show(t)}: output may decode to {wrong}"
    return None


def _branch_outputs(g: ScaledGrid, u: int, c: int) -> set[Value]:
    one, e = g.one, g.eps
    outs: set[Value] = set()
    for t in g.values(_band(c, e)):
        for y in g.values(allowed_interval(GCType.LESS, (u, t), None, e, one)):
            outs |= g.classes(allowed_interval(GCType.NOT, (y,), None, e, one))
    return outs


def purify_bot_witness(eps: Fraction, u: Fraction = F(1, 2)) -> dict[str, Fraction] | None:
    """A PURIFY-gadget valuation at input ``u`` satisfying every gadget gate
    with both outputs decoding to bot, or None if the candidate values
    (decoding thresholds, comparison constants and their eps-shifts) have
    none.  The two branches are independent, so each is searched alone."""
    src = PCInstance.from_gates([Gate(GateType.PURIFY, ("u",), ("v", "w"))])
    gc, rmap = reduce_pc_to_gcircuit(src)
    marks = {F(0), F(1, 2), F(1), eps, 1 - eps}
    for c in (PURIFY_LOW, PURIFY_HIGH):
        marks |= {c - eps, c, c + eps}
    palette = sorted(p for p in marks if 0 <= p <= 1)
    x: dict[str, Fraction] = {"u": u}
    (gd,) = rmap.gadgets
    for out, lo in (("v", 0), ("w", 3)):
        gates = [gc.gates[i] for i in gd.target_gates[lo : lo + 3]]
        names = [g.output for g in gates]
        for vals in itertools.product(palette, repeat=3):
            trial = {**x, **dict(zip(names, vals))}
            if decode_value(trial[out], eps) is BOT and all(
                (iv := allowed_interval(g.type, tuple(trial[a] for a in g.inputs), g.const, eps)) is None
                or iv[0] <= trial[g.output] <= iv[1]
                for g in gates
            ):
                x = trial
                break
        else:
            return None
    return x
