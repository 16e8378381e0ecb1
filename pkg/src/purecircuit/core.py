"""Three-valued circuits: values, gates, instances, and their checks.

A node carries one of three values: a pure bit (0 or 1) or the garbage
symbol ``bot``.  Every gate constrains its outputs given its inputs; an
instance is solved by an assignment satisfying every gate at once.
"""

from __future__ import annotations

import graphlib
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping


class PureCircuitError(ValueError):
    """Raised on malformed inputs to circuit operations."""


class Value(Enum):
    ZERO = "0"
    ONE = "1"
    BOT = "bot"

    @property
    def pure(self) -> bool:
        return self is not Value.BOT

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, token: str) -> "Value":
        try:
            return cls(token)
        except ValueError:
            raise PureCircuitError(f"unknown value {token!r}") from None

    @classmethod
    def of_bit(cls, bit: bool | int) -> "Value":
        return cls.ONE if bit else cls.ZERO


# Enumeration order used for every lexicographic search: 0 < 1 < bot.
VALUES = (Value.ZERO, Value.ONE, Value.BOT)
ZERO, ONE, BOT = VALUES


class Semantics(Enum):
    ROBUST = "robust"
    NONROBUST = "nonrobust"


class GateType(Enum):
    NOR = "NOR"
    PURIFY = "PURIFY"
    COPY = "COPY"
    NOT = "NOT"
    OR = "OR"
    AND = "AND"
    NAND = "NAND"

    @property
    def arity(self) -> tuple[int, int]:
        return _ARITY[self]

    @property
    def binary(self) -> bool:
        return self.arity[0] == 2


_ARITY = {
    GateType.NOR: (2, 1),
    GateType.OR: (2, 1),
    GateType.AND: (2, 1),
    GateType.NAND: (2, 1),
    GateType.NOT: (1, 1),
    GateType.COPY: (1, 1),
    GateType.PURIFY: (1, 2),
}

_BOOL_FN = {
    GateType.NOR: lambda a, b: not (a or b),
    GateType.OR: lambda a, b: a or b,
    GateType.AND: lambda a, b: a and b,
    GateType.NAND: lambda a, b: not (a and b),
}


@dataclass(frozen=True)
class Gate:
    type: GateType
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        n_in, n_out = self.type.arity
        if len(self.inputs) != n_in or len(self.outputs) != n_out:
            raise PureCircuitError(
                f"{self.type.value} takes {n_in} input(s) and {n_out} output(s), "
                f"got {len(self.inputs)} and {len(self.outputs)}"
            )

    @property
    def nodes(self) -> tuple[str, ...]:
        return self.inputs + self.outputs

    def __str__(self) -> str:
        return f"{self.type.value} {' '.join(self.inputs)} -> {' '.join(self.outputs)}"


def make_gate(kind: GateType | str, inputs: Iterable[str], outputs: Iterable[str]) -> Gate:
    if isinstance(kind, str):
        kind = GateType(kind)
    return Gate(kind, tuple(inputs), tuple(outputs))


@dataclass(frozen=True)
class PCInstance:
    """Nodes, gates and semantics.  Well-formedness is checked separately."""

    nodes: tuple[str, ...]
    gates: tuple[Gate, ...]
    semantics: Semantics = Semantics.ROBUST

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "gates", tuple(self.gates))

    @classmethod
    def from_gates(
        cls,
        gates: Iterable[Gate],
        semantics: Semantics = Semantics.ROBUST,
        extra_nodes: Iterable[str] = (),
    ) -> "PCInstance":
        gates = tuple(gates)
        seen: dict[str, None] = dict.fromkeys(extra_nodes)
        for g in gates:
            seen.update(dict.fromkeys(g.nodes))
        return cls(tuple(seen), gates, semantics)

    @property
    def gate_types(self) -> frozenset[GateType]:
        return frozenset(g.type for g in self.gates)

    def producer(self) -> dict[str, int]:
        """Map each node to the index of the gate that outputs it."""
        out: dict[str, int] = {}
        for idx, g in enumerate(self.gates):
            for v in g.outputs:
                out.setdefault(v, idx)
        return out

    def consumers(self) -> dict[str, list[int]]:
        out: dict[str, list[int]] = {v: [] for v in self.nodes}
        for idx, g in enumerate(self.gates):
            for u in g.inputs:
                out.setdefault(u, []).append(idx)
        return out

    def with_semantics(self, semantics: Semantics) -> "PCInstance":
        return PCInstance(self.nodes, self.gates, semantics)


Assignment = Mapping[str, Value]


@dataclass(frozen=True)
class StructuralReport:
    output_counts: dict[str, int]
    unresolved: tuple[tuple[int, str], ...] = ()
    repeated: tuple[int, ...] = ()

    @property
    def valid(self) -> bool:
        return (
            not self.unresolved
            and not self.repeated
            and all(c == 1 for c in self.output_counts.values())
        )

    def problems(self) -> list[str]:
        lines = []
        for v, c in self.output_counts.items():
            if c != 1:
                lines.append(f"node {v} is the output of {c} gates")
        for idx, v in self.unresolved:
            lines.append(f"gate {idx} references undeclared node {v}")
        for idx in self.repeated:
            lines.append(f"gate {idx} repeats a node")
        return lines


def validate_instance(inst: PCInstance) -> StructuralReport:
    declared = set(inst.nodes)
    counts = Counter({v: 0 for v in inst.nodes})
    unresolved = []
    repeated = []
    for idx, g in enumerate(inst.gates):
        if len(set(g.nodes)) != len(g.nodes):
            repeated.append(idx)
        for v in g.nodes:
            if v not in declared:
                unresolved.append((idx, v))
        for v in g.outputs:
            if v in declared:
                counts[v] += 1
    return StructuralReport(dict(counts), tuple(unresolved), tuple(repeated))


def gate_satisfied(
    kind: GateType,
    ins: tuple[Value, ...],
    outs: tuple[Value, ...],
    semantics: Semantics = Semantics.ROBUST,
) -> bool:
    if kind is GateType.PURIFY:
        (u,) = ins
        v, w = outs
        if not (v.pure or w.pure):
            return False
        return not u.pure or (v is u and w is u)
    if kind in (GateType.NOT, GateType.COPY):
        (u,), (v,) = ins, outs
        if not u.pure:
            return True
        want = u if kind is GateType.COPY else Value.of_bit(u is ZERO)
        return v is want
    a, b = ins
    (w,) = outs
    if a.pure and b.pure:
        return w is Value.of_bit(_BOOL_FN[kind](a is ONE, b is ONE))
    if semantics is Semantics.NONROBUST:
        return True
    # One pure input may already decide the gate.
    pure = a if a.pure else b
    if not pure.pure:
        return True
    dominant = {GateType.OR: ONE, GateType.NOR: ONE, GateType.AND: ZERO, GateType.NAND: ZERO}[kind]
    if pure is not dominant:
        return True
    forced = _BOOL_FN[kind](pure is ONE, pure is ONE)
    return w is Value.of_bit(forced)


@dataclass(frozen=True)
class GateVerdicts:
    satisfied: tuple[bool, ...]

    @property
    def ok(self) -> bool:
        return all(self.satisfied)

    @property
    def violated(self) -> list[int]:
        return [i for i, s in enumerate(self.satisfied) if not s]


def missing_nodes(inst: PCInstance, x: Assignment) -> list[str]:
    return [v for v in inst.nodes if v not in x]


def verify_assignment(inst: PCInstance, x: Assignment) -> GateVerdicts:
    missing = missing_nodes(inst, x)
    if missing:
        raise PureCircuitError("assignment is missing nodes: " + ", ".join(missing))
    return GateVerdicts(
        tuple(
            gate_satisfied(
                g.type,
                tuple(x[u] for u in g.inputs),
                tuple(x[v] for v in g.outputs),
                inst.semantics,
            )
            for g in inst.gates
        )
    )


def is_solution(inst: PCInstance, x: Assignment) -> bool:
    return verify_assignment(inst, x).ok


@dataclass(frozen=True)
class InteractionGraph:
    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    succ: dict[str, tuple[str, ...]] = field(repr=False, compare=False)
    pred: dict[str, tuple[str, ...]] = field(repr=False, compare=False)

    def degree(self, v: str) -> tuple[int, int]:
        return len(self.pred[v]), len(self.succ[v])

    def undirected(self) -> dict[str, set[str]]:
        adj: dict[str, set[str]] = {v: set() for v in self.nodes}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj


def interaction_graph(inst: PCInstance) -> InteractionGraph:
    edges: dict[tuple[str, str], None] = {}
    for g in inst.gates:
        for u in g.inputs:
            for v in g.outputs:
                edges[(u, v)] = None
    succ: dict[str, list[str]] = {v: [] for v in inst.nodes}
    pred: dict[str, list[str]] = {v: [] for v in inst.nodes}
    for u, v in edges:
        succ.setdefault(u, []).append(v)
        pred.setdefault(v, []).append(u)
    return InteractionGraph(
        tuple(inst.nodes),
        tuple(edges),
        {k: tuple(s) for k, s in succ.items()},
        {k: tuple(p) for k, p in pred.items()},
    )


@dataclass(frozen=True)
class RestrictionFlags:
    single_use: bool
    degree_profile: bool
    bipartite: bool

    @property
    def all(self) -> bool:
        return self.single_use and self.degree_profile and self.bipartite


ALLOWED_DEGREES = frozenset({(1, 1), (2, 1), (1, 2)})


def two_coloring(nodes: Iterable[str], adj: Mapping[str, Iterable[str]]) -> dict[str, int] | None:
    """Colour an undirected graph with 0/1, lowest ids first; None if odd cycle."""
    color: dict[str, int] = {}
    for start in sorted(nodes):
        if start in color:
            continue
        color[start] = 0
        stack = [start]
        while stack:
            u = stack.pop()
            for v in sorted(adj.get(u, ())):
                if v not in color:
                    color[v] = 1 - color[u]
                    stack.append(v)
                elif color[v] == color[u]:
                    return None
    return color


def check_restrictions(inst: PCInstance) -> RestrictionFlags:
    use = Counter(u for g in inst.gates for u in g.inputs)
    single_use = all(use[v] == 1 for v in inst.nodes)
    graph = interaction_graph(inst)
    degree_ok = all(graph.degree(v) in ALLOWED_DEGREES for v in inst.nodes)
    bipartite = two_coloring(inst.nodes, graph.undirected()) is not None
    return RestrictionFlags(single_use, degree_ok, bipartite)


def kleene_gate(kind: GateType, ins: tuple[Value, ...]) -> tuple[Value, ...]:
    """Canonical output of a gate; PURIFY sends bot to (0, 1)."""
    if kind is GateType.PURIFY:
        (u,) = ins
        return (u, u) if u.pure else (ZERO, ONE)
    if kind is GateType.COPY:
        return ins
    if kind is GateType.NOT:
        (u,) = ins
        return (Value.of_bit(u is ZERO) if u.pure else BOT,)
    a, b = ins
    if a.pure and b.pure:
        return (Value.of_bit(_BOOL_FN[kind](a is ONE, b is ONE)),)
    # A single dominant pure input fixes the result.
    for p in (a, b):
        if p.pure:
            r = _BOOL_FN[kind](p is ONE, p is ONE)
            other = _BOOL_FN[kind](p is ONE, p is not ONE)
            if r == other:
                return (Value.of_bit(r),)
    return (BOT,)


def kleene_eval(inst: PCInstance, sources: Assignment) -> dict[str, Value]:
    """Evaluate every gate not fully pinned by ``sources`` in dependency order."""
    producer = inst.producer()
    todo = [
        idx for idx, g in enumerate(inst.gates) if not all(v in sources for v in g.outputs)
    ]
    sorter: graphlib.TopologicalSorter = graphlib.TopologicalSorter()
    for idx in todo:
        deps = []
        for u in inst.gates[idx].inputs:
            if u in sources:
                continue
            if u not in producer:
                raise PureCircuitError(f"node {u} has no source value and no producing gate")
            deps.append(producer[u])
        sorter.add(idx, *deps)
    try:
        order = list(sorter.static_order())
    except graphlib.CycleError as exc:
        cycle = exc.args[1]
        nodes = [inst.gates[i].outputs[0] for i in cycle]
        raise PureCircuitError("evaluation region contains a cycle through " + " -> ".join(nodes)) from None
    x = dict(sources)
    for idx in order:
        g = inst.gates[idx]
        outs = kleene_gate(g.type, tuple(x[u] for u in g.inputs))
        for v, val in zip(g.outputs, outs):
            x.setdefault(v, val)
    for v in inst.nodes:
        if v not in x:
            raise PureCircuitError(f"node {v} has no source value and no producing gate")
    return x


def purify_tree(root: str, leaves: int, fresh) -> tuple[list[Gate], list[str]]:
    """PURIFY fan-out tree from ``root`` with ``leaves`` leaves, left to right.

    The tree is balanced and leans left: the left subtree is complete and
    any shortfall is taken from the right.  ``fresh()`` names new nodes.
    """
    if leaves < 1:
        raise PureCircuitError("a tree needs at least one leaf")
    gates: list[Gate] = []

    def build(node: str, k: int) -> list[str]:
        if k == 1:
            return [node]
        depth = (k - 1).bit_length()
        left_k = min(1 << (depth - 1), k)
        right_k = k - left_k
        left, right = fresh(), fresh()
        gates.append(Gate(GateType.PURIFY, (node,), (left, right)))
        return build(left, left_k) + build(right, right_k)

    return gates, build(root, leaves)


class FreshNames:
    """Deterministic ``<pass>/<original>/<k>`` identifiers."""

    def __init__(self, prefix: str, taken: Iterable[str] = ()):
        self.prefix = prefix
        self.taken = set(taken)
        self.counters: Counter = Counter()

    def __call__(self, origin: str) -> str:
        while True:
            self.counters[origin] += 1
            name = f"{self.prefix}/{origin}/{self.counters[origin]}"
            if name not in self.taken:
                self.taken.add(name)
                return name
