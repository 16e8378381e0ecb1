"""High-dimensional Sperner labelings and their compilation into circuits.

A labeling assigns to every point of the grid [M]^N a sign vector in
{-1,+1}^N, computed by a Boolean circuit that reads each coordinate in
unary (M bits per coordinate, value = number of ones, all zeros = 1).

Reduction layout, with K = 3*N*M**2 copies:

* one PURIFY tree per input node v(i,j), fanning out to K leaves;
* K verbatim copies of the labeling circuit, copy k reading leaves (., ., k);
* per coordinate an odd-even transposition network over the K copy
  outputs, each comparator one AND (min) and one OR (max);
* COPY gates feeding sorted position j*2*N*M (1-based) back into v(i,j).

With g non-input wires in the circuit and c(K) comparators per network:

    nodes = N*M + 2*N*M*(K-1) + K*g + 2*N*c(K)
    gates = N*M + N*M*(K-1) + K*g + 2*N*c(K)
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Callable, Sequence

from .core import (
    BOT,
    ONE,
    ZERO,
    Gate,
    GateType,
    PCInstance,
    PureCircuitError,
    Semantics,
    Value,
    purify_tree,
    verify_assignment,
)

G = GateType
Point = tuple[int, ...]


@dataclass(frozen=True)
class Wire:
    name: str
    op: str  # INPUT, AND, OR, NOT
    args: tuple


@dataclass(frozen=True)
class BooleanCircuit:
    n: int
    m: int
    wires: tuple[Wire, ...]
    outputs: tuple[str, ...]  # wire name for each coordinate, in order

    def __post_init__(self) -> None:
        defined: set[str] = set()
        for w in self.wires:
            if w.name in defined:
                raise PureCircuitError(f"wire {w.name} defined twice")
            if w.op == "INPUT":
                i, j = w.args
                if not (1 <= i <= self.n and 1 <= j <= self.m):
                    raise PureCircuitError(f"wire {w.name} reads bit ({i},{j}) outside {self.n}x{self.m}")
            elif w.op in ("AND", "OR", "NOT"):
                need = 1 if w.op == "NOT" else 2
                if len(w.args) != need:
                    raise PureCircuitError(f"{w.op} wire {w.name} needs {need} operand(s)")
                for a in w.args:
                    if a not in defined:
                        raise PureCircuitError(f"wire {w.name} uses {a} before it is defined")
            else:
                raise PureCircuitError(f"unknown wire operation {w.op}")
            defined.add(w.name)
        if len(self.outputs) != self.n:
            raise PureCircuitError(f"circuit has {len(self.outputs)} outputs, expected {self.n}")
        for o in self.outputs:
            if o not in defined:
                raise PureCircuitError(f"output wire {o} is not defined")

    def evaluate(self, bits: Callable[[int, int], bool]) -> tuple[bool, ...]:
        val: dict[str, bool] = {}
        for w in self.wires:
            if w.op == "INPUT":
                val[w.name] = bool(bits(*w.args))
            elif w.op == "NOT":
                val[w.name] = not val[w.args[0]]
            elif w.op == "AND":
                val[w.name] = val[w.args[0]] and val[w.args[1]]
            else:
                val[w.name] = val[w.args[0]] or val[w.args[1]]
        return tuple(val[o] for o in self.outputs)


@dataclass(frozen=True)
class SpernerInstance:
    n: int
    m: int
    circuit: BooleanCircuit

    def __post_init__(self) -> None:
        if self.n < 1 or self.m < 1:
            raise PureCircuitError("dimensions must be positive")
        if (self.circuit.n, self.circuit.m) != (self.n, self.m):
            raise PureCircuitError("circuit widths do not match the instance dimensions")


def unary_bits(value: int, m: int) -> tuple[bool, ...]:
    """Unary code of ``value`` in [1, m]: ``value`` leading ones, except 1 -> all zeros."""
    ones = 0 if value == 1 else value
    return tuple(j < ones for j in range(m))


def unary_value(bits: Sequence[bool]) -> int:
    return max(1, sum(1 for b in bits if b))


def _check_point(inst: SpernerInstance, point: Sequence[int]) -> None:
    if len(point) != inst.n:
        raise PureCircuitError(f"point {tuple(point)} does not have {inst.n} coordinates")
    for c in point:
        if not 1 <= c <= inst.m:
            raise PureCircuitError(f"coordinate {c} of {tuple(point)} is outside [1, {inst.m}]")


def eval_labeling(inst: SpernerInstance, point: Sequence[int]) -> tuple[int, ...]:
    _check_point(inst, point)
    codes = [unary_bits(c, inst.m) for c in point]
    out = inst.circuit.evaluate(lambda i, j: codes[i - 1][j - 1])
    return tuple(1 if b else -1 for b in out)


@dataclass(frozen=True)
class BoundaryReport:
    checked: int
    violations: tuple[tuple[Point, int, int], ...]  # (point, coordinate, label)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_boundary(
    inst: SpernerInstance,
    mode: str = "exhaustive",
    cap: int = 100_000,
    samples: int = 1000,
    seed: int = 0,
) -> BoundaryReport:
    if mode == "exhaustive":
        if inst.m**inst.n > cap:
            raise PureCircuitError(f"grid of {inst.m}^{inst.n} points exceeds the cap of {cap}")
        points = itertools.product(range(1, inst.m + 1), repeat=inst.n)
    elif mode == "sampled":
        rng = random.Random(seed)
        points = (tuple(rng.randint(1, inst.m) for _ in range(inst.n)) for _ in range(samples))
    else:
        raise PureCircuitError(f"unknown boundary mode {mode!r}")
    bad = []
    count = 0
    for p in points:
        count += 1
        lab = eval_labeling(inst, p)
        for i, (c, l) in enumerate(zip(p, lab), start=1):
            if (c == 1 and l == -1) or (c == inst.m and l == 1):
                bad.append((tuple(p), i, l))
    return BoundaryReport(count, tuple(bad))


@dataclass(frozen=True)
class SpernerVerdict:
    ok: bool
    reason: str = ""
    trimmed: tuple[Point, ...] | None = None

    def __bool__(self) -> bool:
        return self.ok


def verify_sperner_solution(inst: SpernerInstance, points: Sequence[Sequence[int]]) -> SpernerVerdict:
    """Check adjacency and label coverage.

    When more than N+1 points cover, also return N+1 of them (with
    repetition if needed) that still cover every label.
    """
    pts = [tuple(p) for p in points]
    if not pts:
        return SpernerVerdict(False, "empty point set")
    for p in pts:
        _check_point(inst, p)
    for p, q in itertools.combinations(pts, 2):
        if max(abs(a - b) for a, b in zip(p, q)) > 1:
            return SpernerVerdict(False, f"points {p} and {q} are more than 1 apart")
    labels = [eval_labeling(inst, p) for p in pts]
    for i in range(inst.n):
        for sign in (1, -1):
            if not any(lab[i] == sign for lab in labels):
                return SpernerVerdict(False, f"label {sign:+d} of coordinate {i + 1} is not covered")
    trimmed = None
    if len(pts) > inst.n + 1:
        # One anchor, plus for each coordinate a point showing the opposite sign.
        chosen = [0]
        for i in range(inst.n):
            want = -labels[0][i]
            chosen.append(next(k for k, lab in enumerate(labels) if lab[i] == want))
        trimmed = tuple(pts[k] for k in chosen)
    return SpernerVerdict(True, "", trimmed)


def brute_force_sperner(inst: SpernerInstance, cap: int = 100_000) -> tuple[Point, ...] | None:
    """Corners of the first unit cell whose labels cover everything, or None."""
    if inst.m**inst.n > cap:
        raise PureCircuitError(f"grid of {inst.m}^{inst.n} points exceeds the cap of {cap}")
    if inst.m < 2:
        return None
    cache: dict[Point, tuple[int, ...]] = {}

    def label(p: Point) -> tuple[int, ...]:
        if p not in cache:
            cache[p] = eval_labeling(inst, p)
        return cache[p]

    offsets = list(itertools.product((0, 1), repeat=inst.n))
    for base in itertools.product(range(1, inst.m), repeat=inst.n):
        corners = [tuple(b + o for b, o in zip(base, off)) for off in offsets]
        labs = [label(c) for c in corners]
        if all(any(l[i] == s for l in labs) for i in range(inst.n) for s in (1, -1)):
            return tuple(corners)
    return None


def build_sorting_network(k: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    """Odd-even transposition schedule: ``k`` rounds of adjacent comparators."""
    if k < 1:
        raise PureCircuitError("a sorting network needs at least one input")
    return tuple(tuple((p, p + 1) for p in range(r % 2, k - 1, 2)) for r in range(k))


def comparator_count(k: int) -> int:
    return sum(len(r) for r in build_sorting_network(k))


def sorting_instance(k: int, prefix: str = "s") -> tuple[PCInstance, list[str], list[str]]:
    """Comparator network as a circuit; returns (instance, input ids, output ids)."""
    inputs = [f"{prefix}/in/{p}" for p in range(k)]
    gates, outputs = _emit_network(inputs, prefix)
    return PCInstance.from_gates(gates, extra_nodes=inputs), inputs, outputs


def _emit_network(inputs: list[str], prefix: str) -> tuple[list[Gate], list[str]]:
    pos = list(inputs)
    gates = []
    for r, layer in enumerate(build_sorting_network(len(inputs))):
        for a, b in layer:
            lo, hi = f"{prefix}/{r}/{a}/min", f"{prefix}/{r}/{a}/max"
            gates.append(Gate(G.AND, (pos[a], pos[b]), (lo,)))
            gates.append(Gate(G.OR, (pos[a], pos[b]), (hi,)))
            pos[a], pos[b] = lo, hi
    return gates, pos


@dataclass(frozen=True)
class ExtractionMap:
    n: int
    m: int
    k: int
    leaves: dict[tuple[int, int, int], str]  # (i, j, copy) -> node id
    roots: dict[tuple[int, int], str]
    selection: tuple[int, ...]  # 1-based sorted positions, one per j
    instance: PCInstance | None = None
    source: SpernerInstance | None = None


def selection_indices(n: int, m: int) -> tuple[int, ...]:
    return tuple(j * 2 * n * m for j in range(1, m + 1))


def reduce_to_pure_circuit(inst: SpernerInstance) -> tuple[PCInstance, ExtractionMap]:
    n, m = inst.n, inst.m
    k = 3 * n * m * m
    gates: list[Gate] = []
    roots = {(i, j): f"v/{i}/{j}" for i in range(1, n + 1) for j in range(1, m + 1)}
    leaves: dict[tuple[int, int, int], str] = {}

    for (i, j), root in roots.items():
        counter = itertools.count(1)
        tg, lv = purify_tree(root, k, lambda: f"tree/{i}/{j}/{next(counter)}")
        gates += tg
        for c, leaf in enumerate(lv, start=1):
            leaves[(i, j, c)] = leaf

    copy_outputs: dict[int, list[str]] = {i: [] for i in range(1, n + 1)}
    for c in range(1, k + 1):
        node: dict[str, str] = {}
        for w in inst.circuit.wires:
            if w.op == "INPUT":
                node[w.name] = leaves[(w.args[0], w.args[1], c)]
                continue
            out = f"copy/{c}/{w.name}"
            ins = tuple(node[a] for a in w.args)
            if w.op == "NOT":
                gates.append(Gate(G.NOT, ins, (out,)))
            elif ins[0] == ins[1]:
                # AND/OR of a signal with itself is that signal.
                gates.append(Gate(G.COPY, ins[:1], (out,)))
            else:
                gates.append(Gate(G[w.op], ins, (out,)))
            node[w.name] = out
        for i, o in enumerate(inst.circuit.outputs, start=1):
            copy_outputs[i].append(node[o])

    selection = selection_indices(n, m)
    for i in range(1, n + 1):
        net, ordered = _emit_network(copy_outputs[i], f"sort/{i}")
        gates += net
        for j, s in enumerate(selection, start=1):
            gates.append(Gate(G.COPY, (ordered[s - 1],), (roots[(i, j)],)))

    pc = PCInstance.from_gates(gates, Semantics.ROBUST)
    return pc, ExtractionMap(n, m, k, leaves, roots, selection, pc, inst)


def expected_counts(inst: SpernerInstance) -> tuple[int, int]:
    """Closed-form (nodes, gates) of the reduced instance."""
    n, m = inst.n, inst.m
    k = 3 * n * m * m
    g = sum(1 for w in inst.circuit.wires if w.op != "INPUT")
    c = comparator_count(k)
    nodes = n * m + 2 * n * m * (k - 1) + k * g + 2 * n * c
    gates = n * m + n * m * (k - 1) + k * g + 2 * n * c
    return nodes, gates


def extract_solution(emap: ExtractionMap, x: dict[str, Value]) -> tuple[Point, ...]:
    """Points encoded by the copies whose leaves are all pure."""
    if emap.instance is not None and not verify_assignment(emap.instance, x).ok:
        raise PureCircuitError("assignment does not satisfy the reduced instance")
    points: dict[Point, None] = {}
    for c in range(1, emap.k + 1):
        vals = [[x[emap.leaves[(i, j, c)]] for j in range(1, emap.m + 1)] for i in range(1, emap.n + 1)]
        if any(v is BOT for row in vals for v in row):
            continue
        points[tuple(unary_value([v is ONE for v in row]) for row in vals)] = None
    return tuple(points)


def labeling_circuit(n: int, m: int, label: Callable[[Point], Sequence[int]]) -> BooleanCircuit:
    """Circuit computing ``label`` on every bitstring through its count of ones.

    Each coordinate's bits are sorted by a comparator network, which exposes
    the indicators [count >= t]; each output is an OR over points of
    AND-ed coordinate equalities.
    """
    wires: list[Wire] = []
    names = itertools.count()

    def new(op: str, *args) -> str:
        name = f"w{next(names)}"
        wires.append(Wire(name, op, tuple(args)))
        return name

    eq: dict[tuple[int, int], str] = {}
    for i in range(1, n + 1):
        pos = [new("INPUT", i, j) for j in range(1, m + 1)]
        for layer in build_sorting_network(m):
            for a, b in layer:
                pos[a], pos[b] = new("AND", pos[a], pos[b]), new("OR", pos[a], pos[b])
        # Ascending order: pos[m - t] is the indicator [count >= t].
        at_least = {t: pos[m - t] for t in range(1, m + 1)}
        for c in range(1, m + 1):
            if c == 1:
                eq[(i, c)] = new("NOT", at_least[2]) if m >= 2 else new("OR", pos[0], new("NOT", pos[0]))
            elif c == m:
                eq[(i, c)] = at_least[m]
            else:
                eq[(i, c)] = new("AND", at_least[c], new("NOT", at_least[c + 1]))

    outputs = []
    grid = list(itertools.product(range(1, m + 1), repeat=n))
    for i in range(n):
        terms = []
        for p in grid:
            if label(p)[i] == 1:
                t = eq[(1, p[0])]
                for d in range(1, n):
                    t = new("AND", t, eq[(d + 1, p[d])])
                terms.append(t)
        if not terms:
            raise PureCircuitError(f"coordinate {i + 1} is never labelled +1")
        acc = terms[0]
        for t in terms[1:]:
            acc = new("OR", acc, t)
        outputs.append(acc)
    return BooleanCircuit(n, m, tuple(wires), tuple(outputs))
