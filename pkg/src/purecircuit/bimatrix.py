"""Bimatrix games with non-negative payoffs and relative approximate
equilibria, plus the embedding of bipartite two-action polymatrix games.

Each side of the bipartite game becomes one super-player.  Node ``i`` on a
side owns actions ``2i`` and ``2i + 1``.  The row player also earns 1 for
matching the column player's node, and the column player earns 1 for being
one node ahead (cyclically).  This keeps every node's mass close to ``1/n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .core import PureCircuitError, two_coloring
from .polymatrix.game import PolymatrixGame
from .solvers import Inconclusive

F = Fraction
Matrix = tuple[tuple[Fraction, ...], ...]
BiProfile = tuple[tuple[Fraction, ...], tuple[Fraction, ...]]

LAMBDA = F(1383, 10000)
BETA = F(189, 10)
EPS_TARGET = F(1, 57)


@dataclass(frozen=True)
class BimatrixGame:
    R: Matrix
    C: Matrix

    def __post_init__(self) -> None:
        rows = len(self.R)
        cols = len(self.R[0]) if rows else 0
        if rows == 0 or cols == 0:
            raise PureCircuitError("payoff matrices must be non-empty")
        for name, m in (("R", self.R), ("C", self.C)):
            if len(m) != rows or any(len(r) != cols for r in m):
                raise PureCircuitError(f"{name} must be {rows}x{cols} like R")
            if any(z < 0 for r in m for z in r):
                raise PureCircuitError(f"{name} has a negative entry")

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.R), len(self.R[0])


@dataclass(frozen=True)
class BimatrixReductionParams:
    lam: Fraction = LAMBDA
    eps: Fraction = EPS_TARGET
    beta: Fraction = BETA

    def __post_init__(self) -> None:
        if not 0 < self.lam < (1 - self.eps) / 2:
            raise PureCircuitError("lambda must lie in (0, (1 - eps)/2)")


def params_chain_ok(p: BimatrixReductionParams) -> bool:
    """beta * eps < 1/3 and the relative gain beats 1/(1 - eps)."""
    e, lam, b = p.eps, p.lam, p.beta
    gain = 1 + b * e * lam / (1 + 2 * lam) * (1 - e - 2 * lam) ** 2
    return b * e < F(1, 3) and gain > 1 / (1 - e)


@dataclass(frozen=True)
class BimatrixMap:
    """Node order per side; ``dummies`` are padding nodes with no payoffs."""

    rows: tuple[str, ...]
    cols: tuple[str, ...]
    dummies: frozenset[str]
    lam: Fraction

    @property
    def n(self) -> int:
        return len(self.rows)


def _check_profile(g: BimatrixGame, s: BiProfile) -> BiProfile:
    x, y = (tuple(F(z) for z in v) for v in s)
    m, k = g.shape
    if len(x) != m or len(y) != k:
        raise PureCircuitError(f"profile must have {m} row and {k} column probabilities")
    for v in (x, y):
        if any(z < 0 for z in v) or sum(v) != 1:
            raise PureCircuitError("profile entries must be a probability vector per player")
    return x, y


def utilities(g: BimatrixGame, s: BiProfile) -> tuple[list[Fraction], list[Fraction]]:
    x, y = s
    m, k = g.shape
    ur = [sum(g.R[a][b] * y[b] for b in range(k)) for a in range(m)]
    uc = [sum(g.C[a][b] * x[a] for a in range(m)) for b in range(k)]
    return ur, uc


@dataclass(frozen=True)
class RelativeVerdict:
    row_ok: bool
    col_ok: bool

    @property
    def ok(self) -> bool:
        return self.row_ok and self.col_ok


def _support_ok(u: Sequence[Fraction], p: Sequence[Fraction], eps: Fraction) -> bool:
    floor = (1 - eps) * max(u)
    return all(x >= floor for x, q in zip(u, p) if q > 0)


def verify_relative_wsne(g: BimatrixGame, s: BiProfile, eps) -> RelativeVerdict:
    eps = F(eps)
    if not 0 <= eps < 1:
        raise PureCircuitError("eps must lie in [0, 1)")
    x, y = _check_profile(g, s)
    ur, uc = utilities(g, (x, y))
    return RelativeVerdict(_support_ok(ur, x, eps), _support_ok(uc, y, eps))


def reduce_polymatrix_to_bimatrix(
    g: PolymatrixGame, lam: Fraction = LAMBDA
) -> tuple[BimatrixGame, BimatrixMap]:
    if not g.two_action:
        raise PureCircuitError("the embedding needs two actions per node")
    side = two_coloring(g.players, {p: g.neighbors(p) for p in g.players})
    if side is None:
        raise PureCircuitError("the embedding needs a bipartite game")
    for (i, j), a in g.matrices.items():
        if any(not 0 <= z <= 1 for r in a for z in r):
            raise PureCircuitError(f"payoffs of {i} against {j} leave [0, 1]")
    rows = [p for p in g.players if side[p] == 0]
    cols = [p for p in g.players if side[p] == 1]
    n = max(len(rows), len(cols))
    taken = set(g.players)
    dummies = set()
    for name, lst in (("R", rows), ("C", cols)):
        while len(lst) < n:
            d = f"dummy/{name}/{len(lst)}"
            if d in taken:
                raise PureCircuitError(f"dummy id {d} clashes with a player")
            lst.append(d)
            dummies.add(d)
    ri = {p: k for k, p in enumerate(rows)}
    ci = {p: k for k, p in enumerate(cols)}
    size = 2 * n
    R = [[F(0)] * size for _ in range(size)]
    C = [[F(0)] * size for _ in range(size)]
    for (i, j), a in g.matrices.items():
        if i in ri:
            for s in (0, 1):
                for t in (0, 1):
                    R[2 * ri[i] + s][2 * ci[j] + t] += lam * a[s][t]
        else:
            for s in (0, 1):
                for t in (0, 1):
                    C[2 * ri[j] + t][2 * ci[i] + s] += lam * a[s][t]
    for k in range(n):
        nxt = (k + 1) % n
        for s in (0, 1):
            for t in (0, 1):
                R[2 * k + s][2 * k + t] += 1
                C[2 * k + s][2 * nxt + t] += 1
    game = BimatrixGame(tuple(map(tuple, R)), tuple(map(tuple, C)))
    return game, BimatrixMap(tuple(rows), tuple(cols), frozenset(dummies), F(lam))


def node_masses(bmap: BimatrixMap, s: BiProfile) -> tuple[list[Fraction], list[Fraction]]:
    x, y = s
    return (
        [x[2 * k] + x[2 * k + 1] for k in range(bmap.n)],
        [y[2 * k] + y[2 * k + 1] for k in range(bmap.n)],
    )


def decode_bimatrix(bmap: BimatrixMap, s: BiProfile, keep_dummies: bool = False) -> dict[str, tuple[Fraction, Fraction]]:
    """Per-node marginals, normalized by node mass."""
    x, y = (tuple(F(z) for z in v) for v in s)
    out = {}
    for vec, names in ((x, bmap.rows), (y, bmap.cols)):
        for k, p in enumerate(names):
            mass = vec[2 * k] + vec[2 * k + 1]
            if mass == 0:
                raise PureCircuitError(f"node {p} has zero mass; not a relative WSNE of the embedding")
            if p in bmap.dummies and not keep_dummies:
                continue
            out[p] = (vec[2 * k] / mass, vec[2 * k + 1] / mass)
    return out


def mass_interval(n: int, eps: Fraction, lam: Fraction) -> tuple[Fraction, Fraction]:
    c = 1 - eps - 2 * lam
    return c / n, 1 / c / n


def utility_interval(n: int, eps: Fraction, lam: Fraction) -> tuple[Fraction, Fraction]:
    c = 1 - eps - 2 * lam
    return c / n, (1 + 2 * lam) / c / n


def simplex_grid(m: int, steps: int) -> Iterator[tuple[int, ...]]:
    """Compositions of ``steps`` into ``m`` parts, first part descending."""
    if m == 1:
        yield (steps,)
        return
    for first in range(steps, -1, -1):
        for rest in simplex_grid(m - 1, steps - first):
            yield (first,) + rest


GRID_BUDGET = 2_000_000
MAX_ACTIONS = 6


def grid_search_relative_wsne(g: BimatrixGame, eps, step, budget: int = GRID_BUDGET) -> BiProfile | None:
    """First grid profile (row strategy outermost) that is a relative
    eps-WSNE.  Column strategies are only drawn on the actions that are
    acceptable against the current row strategy."""
    eps, step = F(eps), F(step)
    m, k = g.shape
    if max(m, k) > MAX_ACTIONS:
        raise PureCircuitError(f"grid search supports at most {MAX_ACTIONS} actions per player")
    if step <= 0 or (1 / step).denominator != 1:
        raise PureCircuitError("grid step must be 1/k for a positive integer k")
    steps = int(1 / step)
    visited = 0
    for xs in simplex_grid(m, steps):
        x = tuple(F(c, steps) for c in xs)
        uc = [sum(g.C[a][b] * x[a] for a in range(m)) for b in range(k)]
        floor = (1 - eps) * max(uc)
        ok_cols = [b for b in range(k) if uc[b] >= floor]
        for ys in simplex_grid(len(ok_cols), steps):
            visited += 1
            if visited > budget:
                raise Inconclusive(f"grid search exceeded {budget} profiles")
            y = [F(0)] * k
            for b, c in zip(ok_cols, ys):
                y[b] = F(c, steps)
            ur = [sum(g.R[a][b] * y[b] for b in range(k)) for a in range(m)]
            if _support_ok(ur, x, eps):
                return x, tuple(y)
    return None
