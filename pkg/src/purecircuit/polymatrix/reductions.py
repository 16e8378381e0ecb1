"""Circuit-to-game reductions over the NOT/AND/PURIFY basis.

Every player has actions ``zero`` (index 0) and ``one`` (index 1).  Each
gate's output players get payoffs only from that gate's inputs; all reverse
matrices are zero, so gadgets can be analysed one at a time.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil
from typing import Mapping, Sequence

from ..core import BOT, ONE, ZERO, Gate, GateType, PCInstance, Value, check_restrictions
from ..reduction import Gadget, ReductionMap
from ..transforms import normalize, rewrite_gateset
from .game import GameError, Matrix, PolymatrixGame, as_matrix, zeros

F = Fraction
G = GateType
BASIS = frozenset({G.NOT, G.AND, G.PURIFY})

NOT_MATRIX = as_matrix([[0, 1], [1, 0]])
COPY_MATRIX = as_matrix([[1, 0], [0, 1]])


def diag(a, b) -> Matrix:
    return as_matrix([[a, 0], [0, b]])


WSNE_AND = diag(F(1, 2), F(1, 6))
WSNE_PURIFY_V = diag(F(1, 3), 1)
WSNE_PURIFY_W = diag(1, F(1, 3))


def prepare_instance(inst: PCInstance) -> PCInstance:
    """Rewrite to NOT/AND/PURIFY and normalize into the restricted form."""
    rewritten, _ = rewrite_gateset(inst, "purify-not-and")
    flags = check_restrictions(rewritten)
    if flags.all:
        return rewritten
    out, _ = normalize(rewritten, G.NOT, G.AND)
    return out


class _Builder:
    def __init__(self, nodes: Sequence[str]):
        self.players: list[str] = list(nodes)
        self.known = set(nodes)
        self.mats: dict[tuple[str, str], Matrix] = {}

    def player(self, p: str) -> str:
        if p in self.known:
            raise GameError(f"generated player id {p} clashes with an existing node")
        self.players.append(p)
        self.known.add(p)
        return p

    def pay(self, i: str, j: str, a: Matrix) -> None:
        old = self.mats.get((i, j))
        if old is not None:
            a = tuple(tuple(x + y for x, y in zip(r, s)) for r, s in zip(old, a))
        self.mats[i, j] = a
        self.mats.setdefault((j, i), zeros(2, 2))

    def game(self) -> PolymatrixGame:
        return PolymatrixGame(tuple(self.players), {p: 2 for p in self.players}, self.mats)


def _source(inst: PCInstance, prepare: bool) -> tuple[PCInstance, PCInstance | None]:
    if prepare:
        src = prepare_instance(inst)
        return src, (inst if src is not inst else None)
    bad = inst.gate_types - BASIS
    if bad:
        raise GameError(
            "unsupported gate types " + ", ".join(sorted(t.value for t in bad)) + "; rewrite to NOT/AND/PURIFY first"
        )
    return inst, None


def reduce_pc_to_wsne(inst: PCInstance, prepare: bool = False) -> tuple[PolymatrixGame, ReductionMap]:
    """One player per node; ``prepare`` first rewrites and normalizes."""
    src, original = _source(inst, prepare)
    b = _Builder(src.nodes)
    for g in src.gates:
        if g.type is G.NOT:
            b.pay(g.outputs[0], g.inputs[0], NOT_MATRIX)
        elif g.type is G.AND:
            for u in g.inputs:
                b.pay(g.outputs[0], u, WSNE_AND)
        else:
            (u,), (v, w) = g.inputs, g.outputs
            b.pay(v, u, WSNE_PURIFY_V)
            b.pay(w, u, WSNE_PURIFY_W)
    gadgets = tuple(Gadget(gi, ()) for gi in range(len(src.gates)))
    rmap = ReductionMap("wsne", {v: v for v in src.nodes}, {}, gadgets, src, original)
    return b.game(), rmap


def _restrict(rmap: ReductionMap, a: dict[str, Value]) -> dict[str, Value]:
    if rmap.original is None:
        return a
    return {v: a[v] for v in rmap.original.nodes}


def decode_support(s: Sequence[Fraction]) -> Value:
    if s[1] == 0:
        return ZERO
    if s[0] == 0:
        return ONE
    return BOT


def decode_wsne_profile(rmap: ReductionMap, profile: Mapping[str, Sequence[Fraction]]) -> dict[str, Value]:
    return _restrict(rmap, {v: decode_support(profile[p]) for v, p in rmap.nodes.items()})


# The right end of the admissible range, 2*sqrt(73) - 17, is irrational;
# for x >= 0, x < 2*sqrt(73) - 17 iff (x + 17)^2 < 292.
def below_ne_bound(x: Fraction) -> bool:
    return x >= 0 and (x + 17) ** 2 < 292


DELTA_GRID = 1000
DELTA_STRATEGIES = ("smallest", "shortest-chain")


@dataclass(frozen=True)
class NEGadgetParams:
    eps: Fraction
    delta: Fraction
    k: int
    C: Fraction

    @property
    def chain_length(self) -> int:
        return 2 * self.k


def gap_constant(eps: Fraction, delta: Fraction) -> Fraction:
    return 2 * (delta * (1 - 2 * delta) - eps) / (1 - 2 * delta)


def ne_params(eps, delta) -> NEGadgetParams:
    """Parameters for an explicit cutoff; raises if the pair is not admissible."""
    eps, delta = F(eps), F(delta)
    if not 0 < delta < F(1, 4):
        raise GameError("delta must lie in (0, 1/4)")
    width = delta * (1 - 2 * delta)
    if not (eps < width and below_ne_bound(width)):
        raise GameError(f"delta={delta} violates eps < delta(1-2delta) < 2*sqrt(73)-17 for eps={eps}")
    c = gap_constant(eps, delta)
    half = ceil((1 - 4 * delta) / c / 2)
    return NEGadgetParams(eps, delta, max(half, 1), c)


def choose_delta(eps, strategy: str = "smallest", grid: int = DELTA_GRID) -> NEGadgetParams:
    """Pick delta = j/grid in (0, 1/4).

    ``smallest`` takes the least admissible j; ``shortest-chain`` takes the
    j with the fewest chain players (least j on ties).
    """
    eps = F(eps)
    if strategy not in DELTA_STRATEGIES:
        raise GameError(f"unknown strategy {strategy!r}")
    if eps < 0 or not below_ne_bound(eps):
        raise GameError("eps must lie in [0, 2*sqrt(73) - 17)")
    found = []
    for j in range(1, ceil(F(grid, 4))):
        try:
            p = ne_params(eps, F(j, grid))
        except GameError:
            continue
        if strategy == "smallest":
            return p
        found.append(p)
    if not found:
        raise GameError(f"no delta on the 1/{grid} grid fits eps={eps}; use a finer grid")
    return min(found, key=lambda p: (p.k, p.delta))


def gap_step(gamma: Fraction, eps: Fraction) -> Fraction:
    """Worst-case gap at the next NOT player given gap ``gamma`` here."""
    return 1 - 2 * eps / gamma


def chain_gaps(eps, delta, steps: int) -> list[Fraction]:
    eps, delta = F(eps), F(delta)
    gaps = [2 * delta]
    for _ in range(steps):
        gaps.append(gap_step(gaps[-1], eps))
    return gaps


def reduce_pc_to_ne(
    inst: PCInstance, eps, params: NEGadgetParams | None = None, prepare: bool = False
) -> tuple[PolymatrixGame, ReductionMap]:
    """AND and PURIFY outputs are produced at an internal player and passed
    through an even NOT chain that ends at the node's own player."""
    p = params or choose_delta(eps)
    if params is not None and p.eps != F(eps):
        raise GameError("params were chosen for a different eps")
    src, original = _source(inst, prepare)
    d = p.delta
    and_m = diag(F(1, 2), (1 + d) / (6 - 2 * d))
    pur = (1 + 2 * d) / (3 - 2 * d)
    b = _Builder(src.nodes)

    def chain(out: str) -> tuple[str, list[str]]:
        ids = [b.player(f"ne/{out}/{t}") for t in range(p.chain_length)]
        for x, y in zip(ids, ids[1:] + [out]):
            b.pay(y, x, NOT_MATRIX)
        return ids[0], ids

    gadgets = []
    for gi, g in enumerate(src.gates):
        internals: list[str] = []
        if g.type is G.NOT:
            b.pay(g.outputs[0], g.inputs[0], NOT_MATRIX)
        elif g.type is G.AND:
            head, internals = chain(g.outputs[0])
            for u in g.inputs:
                b.pay(head, u, and_m)
        else:
            (u,), (v, w) = g.inputs, g.outputs
            hv, iv = chain(v)
            hw, iw = chain(w)
            b.pay(hv, u, diag(pur, 1))
            b.pay(hw, u, diag(1, pur))
            internals = iv + iw
        gadgets.append(Gadget(gi, tuple(internals)))
    params_out = {"eps": p.eps, "delta": d, "k": F(p.k), "C": p.C}
    rmap = ReductionMap("ne", {v: v for v in src.nodes}, params_out, tuple(gadgets), src, original)
    return b.game(), rmap


def decode_cutoff(s: Sequence[Fraction], delta: Fraction) -> Value:
    if s[0] >= 1 - delta:
        return ZERO
    if s[1] >= 1 - delta:
        return ONE
    return BOT


def decode_ne_profile(rmap: ReductionMap, profile: Mapping[str, Sequence[Fraction]], delta=None) -> dict[str, Value]:
    d = F(delta) if delta is not None else rmap.params["delta"]
    return _restrict(rmap, {v: decode_cutoff(profile[p], d) for v, p in rmap.nodes.items()})


WL_AND_DIAG = diag(F(1, 6), F(1, 6))
WL_AND_ZERO = as_matrix([[F(1, 6), 0], [0, 0]])
WL_PUR_V = as_matrix([[0, 0], [0, F(1, 3)]])
WL_PUR_W = as_matrix([[F(1, 3), 0], [0, 0]])
WL_PUR_BOTH = diag(F(1, 3), F(1, 3))


def split_nodes(inst: PCInstance) -> tuple[PCInstance, dict[str, str]]:
    """Each node v gains NOT(v -> wl/v/2), NOT(wl/v/2 -> wl/v/3); readers of
    v read wl/v/3 instead.  Returns the new instance and v -> wl/v/3."""
    tail = {v: f"wl/{v}/3" for v in inst.nodes}
    taken = set(inst.nodes)
    for v in inst.nodes:
        for x in (f"wl/{v}/2", tail[v]):
            if x in taken:
                raise GameError(f"split node {x} clashes with an existing node")
            taken.add(x)
    gates = [Gate(g.type, tuple(tail[u] for u in g.inputs), g.outputs) for g in inst.gates]
    for v in inst.nodes:
        gates.append(Gate(G.NOT, (v,), (f"wl/{v}/2",)))
        gates.append(Gate(G.NOT, (f"wl/{v}/2",), (tail[v],)))
    nodes = list(inst.nodes) + [x for v in inst.nodes for x in (f"wl/{v}/2", tail[v])]
    return PCInstance(tuple(nodes), tuple(gates), inst.semantics), tail


def copy_ids(g_type: GateType, outputs: Sequence[str]) -> list[str]:
    """Auxiliary copy players of one gate, keyed by its first output."""
    base = outputs[0]
    if g_type is G.NOT:
        return [f"wl/{base}/c"]
    if g_type is G.AND:
        return [f"wl/{base}/{s}{t}" for s in "ab" for t in (1, 2, 3)]
    return [f"wl/{base}/p{t}" for t in (1, 2, 3)]


def reduce_pc_to_winlose(inst: PCInstance, prepare: bool = False) -> tuple[PolymatrixGame, ReductionMap]:
    """Win-lose game: copy players stand between every gate input and its
    output player, after the double-NOT split of every node."""
    src, original = _source(inst, prepare)
    split, _ = split_nodes(src)
    b = _Builder(split.nodes)
    n_orig = len(src.gates)
    gadgets = []
    for gi, g in enumerate(split.gates):
        if gi < n_orig:
            ids = copy_ids(g.type, g.outputs)
        else:
            # Split gates come in pairs per node, in node order.
            v = src.nodes[(gi - n_orig) // 2]
            ids = [f"wl/{v}/c{2 + (gi - n_orig) % 2}"]
        cs = [b.player(c) for c in ids]
        if g.type is G.NOT:
            (u,), (v,) = g.inputs, g.outputs
            b.pay(cs[0], u, COPY_MATRIX)
            b.pay(v, cs[0], NOT_MATRIX)
        elif g.type is G.AND:
            (w,) = g.outputs
            for idx, u in enumerate(g.inputs):
                trio = cs[3 * idx: 3 * idx + 3]
                for c in trio:
                    b.pay(c, u, COPY_MATRIX)
                b.pay(w, trio[0], WL_AND_DIAG)
                b.pay(w, trio[1], WL_AND_ZERO)
                b.pay(w, trio[2], WL_AND_ZERO)
        else:
            (u,), (v, w) = g.inputs, g.outputs
            for c in cs:
                b.pay(c, u, COPY_MATRIX)
            for c in cs[:2]:
                b.pay(v, c, WL_PUR_V)
                b.pay(w, c, WL_PUR_W)
            b.pay(v, cs[2], WL_PUR_BOTH)
            b.pay(w, cs[2], WL_PUR_BOTH)
        gadgets.append(Gadget(gi, tuple(cs)))
    rmap = ReductionMap("winlose", {v: v for v in src.nodes}, {}, tuple(gadgets), src, original)
    return b.game(), rmap


def decode_winlose_profile(rmap: ReductionMap, profile: Mapping[str, Sequence[Fraction]]) -> dict[str, Value]:
    return decode_wsne_profile(rmap, profile)


def win_lose_values(g: PolymatrixGame) -> dict[str, Fraction] | None:
    """Each player's single nonzero payoff a_i, or None if some player has two."""
    out = {}
    for p in g.players:
        nz = {z for z in g.entries(p) if z != 0}
        if len(nz) > 1 or any(z < 0 or z > 1 for z in nz):
            return None
        out[p] = next(iter(nz), F(0))
    return out
