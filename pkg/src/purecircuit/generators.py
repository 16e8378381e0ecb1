"""Seeded random instances for property tests and benchmarks."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .core import Gate, GateType, PCInstance, Semantics

G = GateType


def random_pc_instance(
    rng: random.Random,
    n_nodes: int,
    gate_types: Sequence[GateType] = tuple(GateType),
    semantics: Semantics = Semantics.ROBUST,
    prefix: str = "n",
) -> PCInstance:
    """Valid instance on ``n_nodes`` nodes: draw gates until their outputs
    cover the nodes exactly, then wire outputs to a random node permutation
    and draw distinct inputs for each gate."""
    single = [t for t in gate_types if t.arity[1] == 1]
    if not single and n_nodes % 2:
        raise ValueError("an odd node count needs a single-output gate type")
    min_nodes = max(sum(t.arity) for t in gate_types)
    if n_nodes < min_nodes:
        raise ValueError(f"need at least {min_nodes} nodes for these gate types")
    kinds: list[GateType] = []
    left = n_nodes
    while left:
        pool = [t for t in gate_types if t.arity[1] <= left]
        t = rng.choice(pool)
        kinds.append(t)
        left -= t.arity[1]
    width = len(str(n_nodes - 1))
    nodes = [f"{prefix}{i:0{width}d}" for i in range(n_nodes)]
    slots = nodes[:]
    rng.shuffle(slots)
    gates = []
    for t in kinds:
        outs = [slots.pop() for _ in range(t.arity[1])]
        pool = [v for v in nodes if v not in outs]
        ins = rng.sample(pool, t.arity[0])
        gates.append(Gate(t, tuple(ins), tuple(outs)))
    return PCInstance(tuple(nodes), tuple(gates), semantics)


def random_digraph(rng: random.Random, n: int, p: float) -> tuple[list[str], list[tuple[str, str]]]:
    width = len(str(max(n - 1, 0)))
    nodes = [f"t{i:0{width}d}" for i in range(n)]
    edges = [(u, v) for u in nodes for v in nodes if u != v and rng.random() < p]
    return nodes, edges


def random_fraction(rng: random.Random, denominator: int = 12) -> Fraction:
    return Fraction(rng.randint(0, denominator), denominator)


def random_polymatrix_game(rng: random.Random, n_players: int, p_edge: float = 0.3, denominator: int = 6, actions: int = 2):
    """Random game with payoffs in {0, 1/d, ..., 1}, normalized."""
    from .polymatrix.game import PolymatrixGame, normalize_game

    width = len(str(max(n_players - 1, 0)))
    players = [f"p{i:0{width}d}" for i in range(n_players)]
    mats = {}
    for i, a in enumerate(players):
        for b in players[i + 1:]:
            if rng.random() < p_edge:
                for x, y in ((a, b), (b, a)):
                    mats[x, y] = tuple(
                        tuple(random_fraction(rng, denominator) for _ in range(actions)) for _ in range(actions)
                    )
    game = PolymatrixGame(tuple(players), {p: actions for p in players}, mats)
    return normalize_game(game)[0]
