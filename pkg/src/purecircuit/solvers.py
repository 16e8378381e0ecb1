"""Exact and heuristic solvers for small or special-form instances."""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping

import numpy as np

from .core import (
    BOT,
    ONE,
    VALUES,
    ZERO,
    GateType,
    PCInstance,
    PureCircuitError,
    Semantics,
    Value,
    gate_satisfied,
    interaction_graph,
    verify_assignment,
)

G = GateType


class Inconclusive(RuntimeError):
    """The search budget ran out before the question was settled."""


@dataclass(frozen=True)
class SolveBudget:
    max_assignments: int = 10**7
    max_iterations: int = 10_000
    damping: Fraction = Fraction(1, 2)
    sweep_damping: Fraction = Fraction(1, 50)
    tau: Fraction = Fraction(1, 10)
    restarts: int = 4
    seed: int = 0

    def __post_init__(self) -> None:
        if self.max_assignments < 1 or self.max_iterations < 1 or self.restarts < 0:
            raise ValueError("budget limits must be positive")
        if not (0 < self.damping <= 1 and 0 < self.sweep_damping <= 1):
            raise ValueError("damping must lie in (0, 1]")
        if not 0 < self.tau < Fraction(1, 2):
            raise ValueError("rounding band must lie in (0, 1/2)")


def _search(
    inst: PCInstance,
    order: list[str],
    fixed: Mapping[str, Value] | None,
    budget: int | None,
) -> Iterator[dict[str, Value]]:
    """Depth-first search over ``order`` yielding every satisfying assignment
    in lexicographic order (0 < 1 < bot).  A gate is checked as soon as all
    of its nodes are assigned.  ``budget`` caps the number of complete
    assignments covered, counting pruned subtrees at full size."""
    fixed = dict(fixed or {})
    pos = {v: i for i, v in enumerate(order)}
    due: list[list] = [[] for _ in order]
    for g in inst.gates:
        last = max(pos[v] for v in g.nodes)
        due[last].append(g)
    n = len(order)
    sizes = [3 ** (n - i - 1) for i in range(n)]
    x: dict[str, Value] = {}
    covered = 0

    def rec(i: int):
        nonlocal covered
        if i == n:
            covered += 1
            yield dict(fixed) | x
            return
        v = order[i]
        choices = (fixed[v],) if v in fixed else VALUES
        for val in choices:
            x[v] = val
            if all(
                gate_satisfied(g.type, tuple(x[u] for u in g.inputs), tuple(x[w] for w in g.outputs), inst.semantics)
                for g in due[i]
            ):
                yield from rec(i + 1)
            else:
                covered += sizes[i]
            if budget is not None and covered > budget:
                raise Inconclusive(f"search budget of {budget} assignments exhausted")
        del x[v]

    yield from rec(0)


def brute_force_solve(inst: PCInstance, budget: SolveBudget = SolveBudget()) -> dict[str, Value] | None:
    """Lexicographically first solution, or None when none exists.

    Raises Inconclusive if the budget is spent before the search settles.
    """
    order = sorted(inst.nodes)
    for sol in _search(inst, order, None, budget.max_assignments):
        return sol
    return None


def enumerate_solutions(
    inst: PCInstance,
    cap: int = 12,
    fixed: Mapping[str, Value] | None = None,
    order: list[str] | None = None,
) -> list[dict[str, Value]]:
    """All solutions of an instance with at most ``cap`` free nodes."""
    order = order if order is not None else sorted(inst.nodes)
    free = [v for v in order if not fixed or v not in fixed]
    if len(free) > cap:
        raise PureCircuitError(f"{len(free)} free nodes exceed the enumeration cap of {cap}")
    return list(_search(inst, order, fixed, None))


def solve_no_purify(inst: PCInstance) -> dict[str, Value]:
    if G.PURIFY in inst.gate_types:
        raise PureCircuitError("instance contains PURIFY gates")
    return {v: BOT for v in inst.nodes}


MONOTONE = frozenset({G.PURIFY, G.COPY, G.OR, G.AND})


def solve_monotone(inst: PCInstance, bit: Value = ONE) -> dict[str, Value]:
    """Constant pure assignment; valid when no gate negates."""
    if not inst.gate_types <= MONOTONE:
        raise PureCircuitError("instance uses a negating gate")
    if not bit.pure:
        raise PureCircuitError("a constant solution must be pure")
    return {v: bit for v in inst.nodes}


def shortest_cycle(succ: Mapping[str, set[str]]) -> list[str] | None:
    """Shortest directed cycle through the lowest node id that lies on one."""
    for start in sorted(succ):
        parent = {start: None}
        frontier = deque([start])
        found = None
        while frontier and found is None:
            u = frontier.popleft()
            for v in sorted(succ[u]):
                if v == start:
                    found = u
                    break
                if v not in parent:
                    parent[v] = u
                    frontier.append(v)
        if found is not None:
            path = []
            u = found
            while u is not None:
                path.append(u)
                u = parent[u]
            return path[::-1]
    return None


def solve_non_robust(inst: PCInstance) -> dict[str, Value]:
    """Polynomial-time solver for the non-robust semantics.

    Cycles are broken by setting their nodes to bot; the remaining acyclic
    part is then evaluated from its sources, preferring 0 whenever free.
    """
    if inst.semantics is not Semantics.NONROBUST:
        raise PureCircuitError("solve_non_robust needs non-robust semantics")
    graph = interaction_graph(inst)
    succ = {v: set(graph.succ[v]) for v in inst.nodes}
    x: dict[str, Value] = {}
    while True:
        cycle = shortest_cycle(succ)
        if cycle is None:
            break
        for v in cycle:
            x[v] = BOT
        gone = set(cycle)
        succ = {u: vs - gone for u, vs in succ.items() if u not in gone}

    producer = inst.producer()
    indeg = {v: 0 for v in succ}
    for u, vs in succ.items():
        for v in vs:
            indeg[v] += 1
    ready = sorted(v for v, d in indeg.items() if d == 0)
    while ready:
        u = ready.pop(0)
        if u not in x:
            if u not in producer:
                raise PureCircuitError(f"node {u} is not the output of any gate")
            g = inst.gates[producer[u]]
            ins = tuple(x[w] for w in g.inputs)
            if g.type is G.PURIFY:
                (a,) = ins
                for out in g.outputs:
                    if out not in x:
                        x[out] = a if a.pure else ZERO
            else:
                x[u] = _forced_or_zero(g.type, ins)
        for v in sorted(succ[u]):
            indeg[v] -= 1
            if indeg[v] == 0:
                ready.append(v)
        ready.sort()
    missing = [v for v in inst.nodes if v not in x]
    if missing:
        raise PureCircuitError("could not assign nodes: " + ", ".join(missing))
    return x


def _forced_or_zero(kind: GateType, ins: tuple[Value, ...]) -> Value:
    for cand in (ZERO, ONE):
        if gate_satisfied(kind, ins, (cand,), Semantics.NONROBUST):
            return cand
    return BOT


def _relax_kernel(inst: PCInstance, tau: float):
    idx = {v: i for i, v in enumerate(inst.nodes)}
    groups: dict[GateType, list] = {}
    for g in inst.gates:
        groups.setdefault(g.type, []).append(g)
    arrays = {
        k: (
            np.array([[idx[u] for u in g.inputs] for g in gs], dtype=np.intp),
            np.array([[idx[v] for v in g.outputs] for g in gs], dtype=np.intp),
        )
        for k, gs in groups.items()
    }
    slope = 1.0 / (0.5 - tau)

    def step(x: np.ndarray) -> np.ndarray:
        f = x.copy()
        for k, (ins, outs) in arrays.items():
            a = x[ins[:, 0]]
            if k is G.PURIFY:
                f[outs[:, 0]] = np.clip((a - tau) * slope, 0.0, 1.0)
                f[outs[:, 1]] = np.clip((a - 0.5) * slope, 0.0, 1.0)
                continue
            if k is G.COPY:
                r = a
            elif k is G.NOT:
                r = 1.0 - a
            else:
                b = x[ins[:, 1]]
                r = {
                    G.OR: lambda: np.maximum(a, b),
                    G.AND: lambda: np.minimum(a, b),
                    G.NOR: lambda: 1.0 - np.maximum(a, b),
                    G.NAND: lambda: 1.0 - np.minimum(a, b),
                }[k]()
            f[outs[:, 0]] = r
        return f

    return step


def round_values(inst: PCInstance, x, tau: float) -> dict[str, Value]:
    out = {}
    for v, t in zip(inst.nodes, x):
        out[v] = ZERO if t <= tau else ONE if t >= 1 - tau else BOT
    return out


def _sweep_plan(inst: PCInstance) -> tuple[list[int], set[str]]:
    """Gate order from a depth-first walk, plus the nodes that close cycles."""
    producer = inst.producer()
    order: list[int] = []
    seen: set[int] = set()
    for v in sorted(inst.nodes):
        if v not in producer or producer[v] in seen:
            continue
        stack = [(producer[v], 0)]
        seen.add(producer[v])
        while stack:
            gi, k = stack.pop()
            ins = inst.gates[gi].inputs
            if k < len(ins):
                stack.append((gi, k + 1))
                pj = producer.get(ins[k])
                if pj is not None and pj not in seen:
                    seen.add(pj)
                    stack.append((pj, 0))
            else:
                order.append(gi)
    pos = {g: i for i, g in enumerate(order)}
    feedback = {
        u
        for gi in order
        for u in inst.gates[gi].inputs
        if u in producer and pos[producer[u]] >= pos[gi]
    }
    return order, feedback


def _sweep_kernel(inst: PCInstance, tau: float, alpha: float):
    """In-place pass in dependency order; only cycle-closing nodes are damped."""
    order, feedback = _sweep_plan(inst)
    idx = {v: i for i, v in enumerate(inst.nodes)}
    slope = 1.0 / (0.5 - tau)
    plan = [
        (
            inst.gates[gi].type,
            [idx[u] for u in inst.gates[gi].inputs],
            [(idx[v], inst.gates[gi].outputs[k] in feedback) for k, v in enumerate(inst.gates[gi].outputs)],
        )
        for gi in order
    ]
    clip = lambda t: 0.0 if t < 0.0 else 1.0 if t > 1.0 else t

    def sweep(x: list[float]) -> float:
        moved = 0.0
        for kind, ins, outs in plan:
            a = x[ins[0]]
            if kind is G.PURIFY:
                vals = (clip((a - tau) * slope), clip((a - 0.5) * slope))
            elif kind is G.COPY:
                vals = (a,)
            elif kind is G.NOT:
                vals = (1.0 - a,)
            else:
                b = x[ins[1]]
                vals = ({
                    G.OR: max(a, b),
                    G.AND: min(a, b),
                    G.NOR: 1.0 - max(a, b),
                    G.NAND: 1.0 - min(a, b),
                }[kind],)
            for (o, damped), val in zip(outs, vals):
                new = (1 - alpha) * x[o] + alpha * val if damped else val
                moved = max(moved, abs(new - x[o]))
                x[o] = new
        return moved

    return sweep


RELAX_SCHEDULES = ("auto", "jacobi", "sweep")


def relaxation_iterate(
    inst: PCInstance,
    budget: SolveBudget = SolveBudget(),
    start: Mapping[str, float] | None = None,
    schedule: str = "auto",
) -> dict[str, Value] | None:
    """Damped fixed-point iteration of a piecewise-linear relaxation.

    Every gate is replaced by a continuous map that respects the rounding
    band; the iterate is rounded and returned only once it verifies.  The
    first run starts from ``start`` (default: every node at 1/2); further
    restarts draw seeded uniform starting points.

    ``jacobi`` updates all nodes at once, x <- (1-a)x + aF(x).  ``sweep``
    updates gates in dependency order and damps only the nodes that close a
    cycle (with the smaller ``sweep_damping``), which settles deep
    feed-forward circuits far better.  ``auto``
    runs jacobi and falls back to sweep.
    """
    if schedule not in RELAX_SCHEDULES:
        raise PureCircuitError(f"unknown relaxation schedule {schedule!r}")
    if inst.semantics is not Semantics.ROBUST:
        inst = inst.with_semantics(Semantics.ROBUST)
    tau = float(budget.tau)
    modes = ("jacobi", "sweep") if schedule == "auto" else (schedule,)
    for mode in modes:
        alpha = float(budget.damping if mode == "jacobi" else budget.sweep_damping)
        found = _relax_runs(inst, budget, start, tau, alpha, mode)
        if found is not None:
            return found
    return None


def _relax_runs(inst, budget, start, tau, alpha, mode):
    rng = random.Random(budget.seed)
    n = len(inst.nodes)
    if mode == "jacobi":
        step = _relax_kernel(inst, tau)
    else:
        sweep = _sweep_kernel(inst, tau, alpha)
    for attempt in range(budget.restarts + 1):
        if attempt == 0:
            base = dict(start or {})
            init = [float(base.get(v, 0.5)) for v in inst.nodes]
        else:
            init = [rng.random() for _ in range(n)]
        x = np.array(init) if mode == "jacobi" else init
        for it in range(budget.max_iterations):
            if mode == "jacobi":
                nxt = (1 - alpha) * x + alpha * step(x)
                moved = float(np.max(np.abs(nxt - x), initial=0.0))
                x = nxt
            else:
                moved = sweep(x)
            converged = moved < 1e-12
            if converged or it % 16 == 15 or it == budget.max_iterations - 1:
                cand = round_values(inst, x, tau)
                if verify_assignment(inst, cand).ok:
                    return cand
                if converged:
                    break
    return None
