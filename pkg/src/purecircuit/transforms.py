"""Gate-set rewriting and normalization to the restricted form.

Both passes keep every original node id, so a solution of the output
restricts to a solution of the input by dropping the added nodes.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable

from .core import (
    Assignment,
    FreshNames,
    Gate,
    GateType,
    PCInstance,
    PureCircuitError,
    Semantics,
    Value,
    interaction_graph,
    purify_tree,
    two_coloring,
    validate_instance,
)

G = GateType

TARGET_BASES = {
    "purify-nor": frozenset({G.PURIFY, G.NOR}),
    "purify-nand": frozenset({G.PURIFY, G.NAND}),
    "purify-not-or": frozenset({G.PURIFY, G.NOT, G.OR}),
    "purify-not-and": frozenset({G.PURIFY, G.NOT, G.AND}),
}


@dataclass(frozen=True)
class SolutionBackMap:
    """Restriction of an assignment to the nodes of the source instance."""

    nodes: tuple[str, ...]

    def __call__(self, x: Assignment) -> dict[str, Value]:
        return {v: x[v] for v in self.nodes}


def _basis(target: Iterable[GateType] | str) -> frozenset[GateType]:
    if isinstance(target, str):
        try:
            return TARGET_BASES[target]
        except KeyError:
            raise PureCircuitError(f"unknown target basis {target!r}") from None
    basis = frozenset(target)
    if basis not in TARGET_BASES.values():
        names = ", ".join(sorted(t.value for t in basis))
        raise PureCircuitError(f"unsupported target basis {{{names}}}")
    return basis


class _Emitter:
    """Emits gates of one target basis, simulating the rest."""

    def __init__(self, basis: frozenset[GateType], fresh: FreshNames):
        self.basis = basis
        self.fresh = fresh
        self.gates: list[Gate] = []
        self.origin = ""

    def _new(self) -> str:
        return self.fresh(self.origin)

    def emit(self, kind: GateType, ins: tuple[str, ...], outs: tuple[str, ...]) -> None:
        if kind in self.basis:
            self.gates.append(Gate(kind, ins, outs))
            return
        getattr(self, "_" + kind.value.lower())(ins, outs)

    def _not(self, ins, outs):
        (u,), (v,) = ins, outs
        a, b = self._new(), self._new()
        self.emit(G.PURIFY, (u,), (a, b))
        binary = G.NOR if G.NOR in self.basis else G.NAND
        self.emit(binary, (a, b), (v,))

    def _copy(self, ins, outs):
        t = self._new()
        self.emit(G.NOT, ins, (t,))
        self.emit(G.NOT, (t,), outs)

    def _negated(self, ins, outs, kind):
        t = self._new()
        self.emit(kind, ins, (t,))
        self.emit(G.NOT, (t,), outs)

    def _dual(self, ins, outs, kind):
        a, b = self._new(), self._new()
        self.emit(G.NOT, (ins[0],), (a,))
        self.emit(G.NOT, (ins[1],), (b,))
        self.emit(kind, (a, b), outs)

    # Each binary gate is either a negation of another one or a De Morgan dual.
    def _or(self, ins, outs):
        if G.NOR in self.basis:
            self._negated(ins, outs, G.NOR)
        else:
            self._dual(ins, outs, G.NAND)

    def _nor(self, ins, outs):
        if G.OR in self.basis:
            self._negated(ins, outs, G.OR)
        else:
            self._dual(ins, outs, G.AND)

    def _and(self, ins, outs):
        if G.NAND in self.basis:
            self._negated(ins, outs, G.NAND)
        else:
            self._dual(ins, outs, G.NOR)

    def _nand(self, ins, outs):
        if G.AND in self.basis:
            self._negated(ins, outs, G.AND)
        else:
            self._dual(ins, outs, G.OR)


def rewrite_gateset(
    inst: PCInstance, target: Iterable[GateType] | str
) -> tuple[PCInstance, SolutionBackMap]:
    """Re-express ``inst`` over one of the four complete gate bases."""
    basis = _basis(target)
    if inst.semantics is not Semantics.ROBUST:
        raise PureCircuitError("gate rewriting is defined for robust semantics only")
    back = SolutionBackMap(tuple(inst.nodes))
    if inst.gate_types <= basis:
        return inst, back
    fresh = FreshNames("rewrite", inst.nodes)
    em = _Emitter(basis, fresh)
    for g in inst.gates:
        em.origin = g.outputs[0]
        em.emit(g.type, g.inputs, g.outputs)
    out = PCInstance.from_gates(em.gates, inst.semantics, extra_nodes=inst.nodes)
    return out, back


NORMALIZE_PAIRS = {
    (G.NOT, G.OR),
    (G.NOT, G.AND),
    (G.NOT, G.NOR),
    (G.NOT, G.NAND),
    (G.COPY, G.NOR),
    (G.COPY, G.NAND),
}


def _pick_pair(inst: PCInstance, x: GateType | None, y: GateType | None) -> tuple[GateType, GateType]:
    present = inst.gate_types - {G.PURIFY}
    unary = present & {G.NOT, G.COPY}
    binary = present - unary
    if x is None:
        if len(unary) > 1:
            raise PureCircuitError("instance mixes NOT and COPY")
        x = next(iter(unary), G.NOT)
    if y is None:
        if len(binary) > 1:
            raise PureCircuitError("instance uses more than one binary gate type")
        y = next(iter(binary), G.NOR if x is G.COPY else G.AND)
    if (x, y) not in NORMALIZE_PAIRS:
        raise PureCircuitError(f"unsupported gate pair {x.value}/{y.value}")
    if not present <= {x, y}:
        extra = ", ".join(sorted(t.value for t in present - {x, y}))
        raise PureCircuitError(f"instance uses gates outside PURIFY/{x.value}/{y.value}: {extra}")
    return x, y


def normalize(
    inst: PCInstance, x: GateType | None = None, y: GateType | None = None
) -> tuple[PCInstance, SolutionBackMap]:
    """Make every node the input of exactly one gate, with bipartite
    interactions and degree profile (1,1), (2,1) or (1,2).

    ``x`` is the unary gate (NOT or COPY) and ``y`` the binary gate used by
    the added gadgets; both default to what the instance already uses.
    """
    if not validate_instance(inst).valid:
        raise PureCircuitError("normalize expects a structurally valid instance")
    x, y = _pick_pair(inst, x, y)
    back = SolutionBackMap(tuple(inst.nodes))

    # Fan-out: a node read by k > 1 gates feeds a PURIFY tree, one leaf per reader.
    fresh = FreshNames("fan", inst.nodes)
    gates = [list(g.inputs) for g in inst.gates]
    readers: dict[str, list[tuple[int, int]]] = {}
    for gi, g in enumerate(inst.gates):
        for pos, u in enumerate(g.inputs):
            readers.setdefault(u, []).append((gi, pos))
    tree_gates: list[Gate] = []
    for u in inst.nodes:
        uses = readers.get(u, [])
        if len(uses) < 2:
            continue
        tg, leaves = purify_tree(u, len(uses), lambda: fresh(u))
        tree_gates.extend(tg)
        for (gi, pos), leaf in zip(uses, leaves):
            gates[gi][pos] = leaf
    stage1 = [Gate(g.type, tuple(ins), g.outputs) for g, ins in zip(inst.gates, gates)] + tree_gates
    stage1_nodes = list(inst.nodes) + [v for g in tree_gates for v in g.outputs if v not in inst.nodes]

    # Split: every node u becomes u -> gadget -> u_in; readers switch to u_in.
    fresh = FreshNames("split", stage1_nodes)
    renamed: dict[str, str] = {}
    split_gates: list[Gate] = []
    for u in stage1_nodes:
        u_in = fresh(u)
        renamed[u] = u_in
        if x is G.COPY:
            split_gates.append(Gate(G.COPY, (u,), (u_in,)))
        else:
            v, w, w2 = fresh(u), fresh(u), fresh(u)
            split_gates += [
                Gate(G.NOT, (u,), (v,)),
                Gate(G.PURIFY, (v,), (w, w2)),
                Gate(G.NOT, (w,), (u_in,)),
            ]
    stage2 = [Gate(g.type, tuple(renamed[u] for u in g.inputs), g.outputs) for g in stage1]
    stage2 += split_gates
    stage2_inst = PCInstance.from_gates(stage2, inst.semantics, extra_nodes=inst.nodes)

    # Sinks: collect unread nodes into a tree of y gates closing on a new node.
    used = {u for g in stage2 for u in g.inputs}
    sinks = [v for v in stage2_inst.nodes if v not in used]
    if not sinks:
        return stage2_inst, back
    side = two_coloring(stage2_inst.nodes, interaction_graph(stage2_inst).undirected())
    if side is None:
        raise PureCircuitError("internal error: split instance is not bipartite")
    fresh = FreshNames("sink", stage2_inst.nodes)
    star = fresh("star")
    leaves = sinks + [star]
    sink_gates, root_side, star_side = _sink_tree(leaves, side, star, x, y, fresh)
    root = sink_gates[-1].outputs[0]
    if root_side != star_side:
        sink_gates.append(Gate(x, (root,), (star,)))
    else:
        mid = fresh("star")
        sink_gates += [Gate(x, (root,), (mid,)), Gate(x, (mid,), (star,))]
    final = PCInstance.from_gates(stage2 + sink_gates, inst.semantics, extra_nodes=inst.nodes)
    return final, back


def _sink_tree(leaves, side, star, x, y, fresh):
    """Binary tree of ``y`` gates over ``leaves``; leaves whose colour clashes
    with their depth are routed through an ``x`` gate first.

    Returns (gates, root side, side chosen for ``star``).
    """
    depth: dict[int, int] = {}

    def shape(lo: int, hi: int, d: int):
        k = hi - lo
        if k == 1:
            depth[lo] = d
            return lo
        left_k = min(1 << ((k - 1).bit_length() - 1), k)
        return (shape(lo, lo + left_k, d + 1), shape(lo + left_k, hi, d + 1))

    tree = shape(0, len(leaves), 0)
    root_side = 0
    gates: list[Gate] = []
    star_side = root_side ^ (depth[len(leaves) - 1] & 1)
    entry: dict[int, str] = {}
    for i, leaf in enumerate(leaves):
        want = root_side ^ (depth[i] & 1)
        have = star_side if leaf == star else side[leaf]
        if have == want:
            entry[i] = leaf
        else:
            t = fresh("leaf")
            gates.append(Gate(x, (leaf,), (t,)))
            entry[i] = t

    def emit(node) -> str:
        if isinstance(node, int):
            return entry[node]
        a, b = emit(node[0]), emit(node[1])
        out = fresh("node")
        gates.append(Gate(y, (a, b), (out,)))
        return out

    emit(tree)
    return gates, root_side, star_side


def fanout_counts(inst: PCInstance) -> Counter:
    return Counter(u for g in inst.gates for u in g.inputs)
