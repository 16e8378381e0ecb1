"""Polymatrix games with exact rational payoffs.

Player ``i`` with ``m_i`` actions plays a bimatrix game with each neighbour
``j``; ``A[i, j]`` is the ``m_i x m_j`` matrix of payoffs to ``i``.  A
player's utility for an action is the sum over neighbours of the matching
row of ``A[i, j]`` against the neighbour's mixed strategy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from ..core import PureCircuitError, two_coloring

F = Fraction
Matrix = tuple[tuple[Fraction, ...], ...]
Profile = dict[str, tuple[Fraction, ...]]


class GameError(PureCircuitError):
    """Raised on malformed games or strategy profiles."""


def as_matrix(rows: Iterable[Iterable]) -> Matrix:
    return tuple(tuple(F(z) for z in row) for row in rows)


def zeros(m: int, n: int) -> Matrix:
    return tuple((F(0),) * n for _ in range(m))


@dataclass(frozen=True)
class PolymatrixGame:
    players: tuple[str, ...]
    actions: dict[str, int]
    matrices: dict[tuple[str, str], Matrix]
    _nbrs: dict[str, tuple[str, ...]] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(set(self.players)) != len(self.players):
            raise GameError("duplicate player id")
        if set(self.actions) != set(self.players):
            raise GameError("action counts must cover exactly the players")
        for p, m in self.actions.items():
            if m < 1:
                raise GameError(f"player {p} needs at least one action")
        nbrs: dict[str, list[str]] = {p: [] for p in self.players}
        for (i, j), a in self.matrices.items():
            if i not in self.actions or j not in self.actions:
                raise GameError(f"matrix {i} {j} names an unknown player")
            if i == j:
                raise GameError(f"self-loop on {i}")
            if (j, i) not in self.matrices:
                raise GameError(f"edge {i} {j} lacks the reverse matrix")
            if len(a) != self.actions[i] or any(len(r) != self.actions[j] for r in a):
                raise GameError(f"matrix {i} {j} must be {self.actions[i]}x{self.actions[j]}")
            nbrs[i].append(j)
        order = {p: k for k, p in enumerate(self.players)}
        object.__setattr__(
            self, "_nbrs", {p: tuple(sorted(ns, key=order.__getitem__)) for p, ns in nbrs.items()}
        )

    @classmethod
    def build(cls, actions: Mapping[str, int], matrices: Mapping[tuple[str, str], Iterable]) -> "PolymatrixGame":
        """Fill missing reverse orientations with zero matrices."""
        mats = {k: as_matrix(v) for k, v in matrices.items()}
        for (i, j) in list(mats):
            if (j, i) not in mats:
                mats[j, i] = zeros(actions[j], actions[i])
        return cls(tuple(actions), dict(actions), mats)

    def neighbors(self, p: str) -> tuple[str, ...]:
        return self._nbrs[p]

    def degree(self, p: str) -> int:
        return len(self._nbrs[p])

    def edges(self) -> list[tuple[str, str]]:
        order = {p: k for k, p in enumerate(self.players)}
        return [(i, j) for (i, j) in self.matrices if order[i] < order[j]]

    @property
    def two_action(self) -> bool:
        return all(m == 2 for m in self.actions.values())

    def entries(self, p: str) -> set[Fraction]:
        return {z for j in self._nbrs[p] for row in self.matrices[p, j] for z in row}


@dataclass(frozen=True)
class NormalizationData:
    upper: dict[str, Fraction]
    lower: dict[str, Fraction]
    degree: dict[str, int]


def payoff_bounds(g: PolymatrixGame, p: str) -> tuple[Fraction, Fraction]:
    """(U, L): best and worst total payoff the player can see."""
    nbrs = g.neighbors(p)
    if not nbrs:
        return F(0), F(0)
    rows = range(g.actions[p])
    up = max(sum(max(g.matrices[p, j][r]) for j in nbrs) for r in rows)
    lo = min(sum(min(g.matrices[p, j][r]) for j in nbrs) for r in rows)
    return up, lo


def normalize_game(g: PolymatrixGame) -> tuple[PolymatrixGame, NormalizationData]:
    upper, lower, deg = {}, {}, {}
    mats = dict(g.matrices)
    for p in g.players:
        up, lo = payoff_bounds(g, p)
        d = g.degree(p)
        upper[p], lower[p], deg[p] = up, lo, d
        for j in g.neighbors(p):
            a = g.matrices[p, j]
            if up == lo:
                mats[p, j] = zeros(len(a), len(a[0]))
            else:
                shift = lo / d
                mats[p, j] = tuple(tuple((z - shift) / (up - lo) for z in row) for row in a)
    return PolymatrixGame(g.players, dict(g.actions), mats), NormalizationData(upper, lower, deg)


def is_normalized(g: PolymatrixGame) -> bool:
    for p in g.players:
        up, lo = payoff_bounds(g, p)
        if (up, lo) not in ((1, 0), (0, 0)):
            return False
        if up == 0 and any(z != 0 for z in g.entries(p)):
            return False
    return True


def is_bipartite(g: PolymatrixGame) -> bool:
    return two_coloring(g.players, {p: g.neighbors(p) for p in g.players}) is not None


def max_degree(g: PolymatrixGame) -> int:
    return max((g.degree(p) for p in g.players), default=0)


def check_profile(g: PolymatrixGame, s: Mapping[str, Sequence]) -> Profile:
    """Return the profile as exact tuples; raise if it is not a valid one."""
    out: Profile = {}
    for p in g.players:
        if p not in s:
            raise GameError(f"profile misses player {p}")
        vec = tuple(F(z) for z in s[p])
        if len(vec) != g.actions[p]:
            raise GameError(f"player {p}: expected {g.actions[p]} probabilities, got {len(vec)}")
        if any(z < 0 for z in vec) or sum(vec) != 1:
            raise GameError(f"player {p}: not a probability vector")
        out[p] = vec
    extra = set(s) - set(g.players)
    if extra:
        raise GameError(f"profile names unknown players {sorted(extra)}")
    return out


def payoff_vector(g: PolymatrixGame, s: Mapping[str, Sequence[Fraction]], p: str) -> tuple[Fraction, ...]:
    """Utility of each of ``p``'s actions against the others' strategies."""
    m = g.actions[p]
    out = [F(0)] * m
    for j in g.neighbors(p):
        sj = s[j]
        if len(sj) != g.actions[j]:
            raise GameError(f"player {j}: expected {g.actions[j]} probabilities, got {len(sj)}")
        a = g.matrices[p, j]
        for r in range(m):
            out[r] += sum(z * q for z, q in zip(a[r], sj))
    return tuple(out)


@dataclass(frozen=True)
class EquilibriumVerdict:
    """Per-player regret; a player violates the notion when regret > eps."""

    eps: Fraction
    regrets: dict[str, Fraction]

    @property
    def violated(self) -> tuple[str, ...]:
        return tuple(p for p, r in self.regrets.items() if r > self.eps)

    @property
    def ok(self) -> bool:
        return not self.violated


def _check_eps(eps) -> Fraction:
    eps = F(eps)
    if eps < 0:
        raise GameError("eps must be non-negative")
    return eps


def wsne_regret(u: Sequence[Fraction], sp: Sequence[Fraction]) -> Fraction:
    return max(u) - min(x for x, q in zip(u, sp) if q > 0)


def ne_regret(u: Sequence[Fraction], sp: Sequence[Fraction]) -> Fraction:
    return max(u) - sum(x * q for x, q in zip(u, sp))


def verify_wsne(g: PolymatrixGame, s: Mapping[str, Sequence], eps) -> EquilibriumVerdict:
    eps = _check_eps(eps)
    prof = check_profile(g, s)
    return EquilibriumVerdict(eps, {p: wsne_regret(payoff_vector(g, prof, p), prof[p]) for p in g.players})


def verify_ne(g: PolymatrixGame, s: Mapping[str, Sequence], eps) -> EquilibriumVerdict:
    eps = _check_eps(eps)
    prof = check_profile(g, s)
    return EquilibriumVerdict(eps, {p: ne_regret(payoff_vector(g, prof, p), prof[p]) for p in g.players})


THIRD = F(1, 3)
PURE = ((F(1), F(0)), (F(0), F(1)))
UNIFORM = (F(1, 2), F(1, 2))


def algo_third_wsne(g: PolymatrixGame) -> Profile:
    """1/3-WSNE of a normalized two-action game.

    Players whose action is a 1/3-best response against every corner of
    the others are fixed one by one (earliest player in ``g.players``
    first, action 0 before action 1); their fixed rows are folded into
    the neighbours as constant offsets.  Everyone left mixes uniformly.
    """
    if not g.two_action:
        raise GameError("algorithm needs exactly two actions per player")
    fixed: dict[str, int] = {}
    offset = {p: [F(0), F(0)] for p in g.players}

    def removable(p: str) -> int | None:
        hi = lo = offset[p][0] - offset[p][1]
        for j in g.neighbors(p):
            if j in fixed:
                continue
            a = g.matrices[p, j]
            diffs = [a[0][q] - a[1][q] for q in (0, 1)]
            hi += max(diffs)
            lo += min(diffs)
        # hi/lo: extreme values of u(0) - u(1) over the corners.
        if lo >= -THIRD:
            return 0
        if hi <= THIRD:
            return 1
        return None

    progress = True
    while progress:
        progress = False
        for p in g.players:
            if p in fixed:
                continue
            k = removable(p)
            if k is None:
                continue
            fixed[p] = k
            for j in g.neighbors(p):
                a = g.matrices[j, p]
                offset[j][0] += a[0][k]
                offset[j][1] += a[1][k]
            progress = True
            break
    return {p: PURE[fixed[p]] if p in fixed else UNIFORM for p in g.players}
