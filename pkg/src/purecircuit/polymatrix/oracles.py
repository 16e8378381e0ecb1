"""Desk-scale oracles: exhaustive grid search for approximate equilibria and
per-gadget case checks of the game reductions."""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import lcm
from typing import Iterator

from ..core import Gate, GateType, PCInstance
from ..gcircuit import CaseReport, grid
from ..solvers import Inconclusive
from .game import GameError, PolymatrixGame, payoff_vector
from .reductions import (
    NEGadgetParams,
    choose_delta,
    reduce_pc_to_ne,
    reduce_pc_to_winlose,
    reduce_pc_to_wsne,
)

F = Fraction
G = GateType
MODES = ("NE", "WSNE")
GRID_BUDGET = 5_000_000


def iter_grid_equilibria(
    g: PolymatrixGame, eps, step, mode: str = "WSNE", budget: int = GRID_BUDGET
) -> Iterator[dict[str, tuple[Fraction, Fraction]]]:
    """All profiles on the probability grid passing the chosen test, in
    lexicographic order of each player's probability on action one."""
    eps, step = F(eps), F(step)
    if mode not in MODES:
        raise GameError(f"mode must be one of {MODES}")
    if not g.two_action:
        raise GameError("grid search needs two actions per player")
    if step <= 0 or (1 / step).denominator != 1:
        raise GameError("grid step must be 1/k for a positive integer k")
    n = int(1 / step)
    order = list(g.players)
    pos = {p: i for i, p in enumerate(order)}
    # Integer payoffs per player: scale[p] * A[p, j] has integer entries.
    scale, rows = {}, {}
    for p in order:
        dens = [z.denominator for z in g.entries(p)] or [1]
        scale[p] = lcm(*dens)
        rows[p] = [
            (pos[j], [(int(a[r][0] * scale[p]), int(a[r][1] * scale[p])) for r in (0, 1)])
            for j in g.neighbors(p)
            for a in (g.matrices[p, j],)
        ]
    due: list[list[str]] = [[] for _ in order]
    for p in order:
        due[max([pos[p]] + [pos[j] for j in g.neighbors(p)])].append(p)
    t = [0] * len(order)
    wsne = mode == "WSNE"

    def fine(p: str) -> bool:
        u = [0, 0]
        for j, ab in rows[p]:
            tj = t[j]
            for r in (0, 1):
                a0, a1 = ab[r]
                u[r] += a0 * (n - tj) + a1 * tj
        # u is n * scale * utility; tolerances scale the same way.
        ti = t[pos[p]]
        best = max(u)
        tol = eps * n * scale[p]
        if wsne:
            worst = min(u[r] for r in (0, 1) if (ti if r else n - ti) > 0)
            return best - worst <= tol
        return n * best - ((n - ti) * u[0] + ti * u[1]) <= tol * n

    visited = 0

    def rec(i: int) -> Iterator[None]:
        nonlocal visited
        if i == len(order):
            yield None
            return
        for ti in range(n + 1):
            visited += 1
            if visited > budget:
                raise Inconclusive(f"grid search exceeded {budget} partial profiles")
            t[i] = ti
            if all(fine(p) for p in due[i]):
                yield from rec(i + 1)
        t[i] = 0

    for _ in rec(0):
        yield {p: (1 - F(t[k], n), F(t[k], n)) for k, p in enumerate(order)}


def grid_search_equilibrium(g: PolymatrixGame, eps, step, mode: str = "WSNE", budget: int = GRID_BUDGET):
    return next(iter_grid_equilibria(g, eps, step, mode, budget), None)


def eps_best(u, eps) -> set[int]:
    return {k for k, x in enumerate(u) if x >= max(u) - eps}


def _fmt(qs) -> str:
    return " ".join(str(q) for q in qs)


def _mix(q: Fraction) -> tuple[Fraction, Fraction]:
    return (1 - q, q)


def _vec(g: PolymatrixGame, p: str, strategies: dict) -> tuple[Fraction, ...]:
    full = {j: strategies.get(j, (F(1, 2), F(1, 2))) for j in g.neighbors(p)}
    return payoff_vector(g, full, p)


CASE_KINDS = (
    "wsne-not", "wsne-and", "wsne-purify",
    "ne-not", "ne-and", "ne-purify",
    "winlose-copy", "winlose-and", "winlose-purify",
)


def _gate_instance(kind: GateType) -> PCInstance:
    if kind is G.NOT:
        g = Gate(G.NOT, ("u",), ("v",))
        return PCInstance(("u", "v"), (g,))
    if kind is G.AND:
        g = Gate(G.AND, ("u", "v"), ("w",))
        return PCInstance(("u", "v", "w"), (g,))
    g = Gate(G.PURIFY, ("u",), ("v", "w"))
    return PCInstance(("u", "v", "w"), (g,))


def gadget_case_check(kind: str, eps, step, params: NEGadgetParams | None = None) -> CaseReport:
    """Grid over the gadget's input strategies; every cell is checked against
    the forced responses the gadget is built to produce."""
    eps, step = F(eps), F(step)
    if kind not in CASE_KINDS:
        raise GameError(f"unknown gadget kind {kind!r}; expected one of {CASE_KINDS}")
    family, gate = kind.split("-")
    if family == "wsne":
        cells, bad = _wsne_cases(gate, eps, step)
    elif family == "ne":
        p = params or choose_delta(eps)
        cells, bad = _ne_cases(gate, eps, step, p)
    else:
        cells, bad = _winlose_cases(gate, eps, step)
    return CaseReport(kind, eps, step, cells, tuple(bad))


def _expect(bad: list, where: str, who: str, got: set[int], want: set[int]) -> None:
    if got != want:
        names = lambda s: "/".join("zero" if k == 0 else "one" for k in sorted(s))
        bad.append(f"{where}: eps-best responses of {who} are {names(got)}, expected {names(want)}")


def _wsne_cases(gate: str, eps, step) -> tuple[int, list[str]]:
    inst = _gate_instance({"not": G.NOT, "and": G.AND, "purify": G.PURIFY}[gate])
    game, _ = reduce_pc_to_wsne(inst)
    pts = grid(step)
    bad: list[str] = []
    cells = 0
    if gate == "not":
        for q in pts:
            cells += 1
            got = eps_best(_vec(game, "v", {"u": _mix(q)}), eps)
            if q in (0, 1):
                _expect(bad, f"u plays one w.p. {q}", "v", got, {1 - int(q)})
    elif gate == "and":
        for q1, q2 in product(pts, pts):
            cells += 1
            u = _vec(game, "w", {"u": _mix(q1), "v": _mix(q2)})
            got = eps_best(u, eps)
            where = f"inputs ({q1}, {q2})"
            if q1 == 1 and q2 == 1:
                if got != {1}:
                    bad.append(f"{where}: action zero is within {eps} of the best response (gap {u[1] - u[0]})")
            elif q1 == 0 or q2 == 0:
                _expect(bad, where, "w", got, {0})
    else:
        for q in pts:
            cells += 1
            s = {"u": _mix(q)}
            bv = eps_best(_vec(game, "v", s), eps)
            bw = eps_best(_vec(game, "w", s), eps)
            where = f"u plays one w.p. {q}"
            if q == 0:
                _expect(bad, where, "v", bv, {0})
            if q >= F(1, 2):
                _expect(bad, where, "v", bv, {1})
            if q <= F(1, 2):
                _expect(bad, where, "w", bw, {0})
            if q == 1:
                _expect(bad, where, "w", bw, {1})
    return cells, bad


def ne_interval(u, eps) -> tuple[Fraction, Fraction]:
    """Probabilities on action one that meet the eps-NE condition."""
    d = u[1] - u[0]
    lo = max(F(0), 1 - eps / d) if d > 0 else F(0)
    hi = min(F(1), eps / -d) if d < 0 else F(1)
    return lo, hi


def _ne_cases(gate: str, eps, step, p: NEGadgetParams) -> tuple[int, list[str]]:
    d = p.delta
    inst = _gate_instance({"not": G.NOT, "and": G.AND, "purify": G.PURIFY}[gate])
    game, _ = reduce_pc_to_ne(inst, eps, p)
    pts = grid(step, (d, 1 - d, F(1, 2)))
    bad: list[str] = []
    cells = 0
    if gate == "not":
        for q in pts:
            cells += 1
            lo, hi = ne_interval(_vec(game, "v", {"u": _mix(q)}), eps)
            if q <= d and lo < 1 - d:
                bad.append(f"u plays one w.p. {q}: v may put {lo} on one")
            if q >= 1 - d and hi > d:
                bad.append(f"u plays one w.p. {q}: v may put {hi} on one")
        return cells, bad
    if gate == "and":
        head = "ne/w/0"
        for q1, q2 in product(pts, pts):
            cells += 1
            u = _vec(game, head, {"u": _mix(q1), "v": _mix(q2)})
            where = f"inputs ({q1}, {q2})"
            if (q1 <= d or q2 <= d) and u[0] - u[1] < 2 * d:
                bad.append(f"{where}: zero leads by only {u[0] - u[1]}")
            if q1 >= 1 - d and q2 >= 1 - d and u[1] - u[0] < 2 * d:
                bad.append(f"{where}: one leads by only {u[1] - u[0]}")
        return cells, bad
    for q in pts:
        cells += 1
        s = {"u": _mix(q)}
        uv, uw = _vec(game, "ne/v/0", s), _vec(game, "ne/w/0", s)
        gv, gw = uv[0] - uv[1], uw[0] - uw[1]
        where = f"u plays one w.p. {q}"
        if q <= d and (gv < 2 * d or gw < 2 * d):
            bad.append(f"{where}: zero gaps {gv}, {gw} below {2 * d}")
        if q >= 1 - d and (-gv < 2 * d or -gw < 2 * d):
            bad.append(f"{where}: one gaps {-gv}, {-gw} below {2 * d}")
        if d < q < 1 - d and abs(gv) < 2 * d and abs(gw) < 2 * d:
            bad.append(f"{where}: both output gaps below {2 * d}")
    return cells, bad


def _winlose_cases(gate: str, eps, step) -> tuple[int, list[str]]:
    pts = grid(step)
    bad: list[str] = []
    cells = 0
    if gate == "copy":
        game, _ = reduce_pc_to_winlose(_gate_instance(G.NOT))
        # After the split the NOT reads wl/u/3; its copy player sits before v.
        for q in pts:
            cells += 1
            got = eps_best(_vec(game, "wl/v/c", {"wl/u/3": _mix(q)}), eps)
            if q in (0, 1):
                _expect(bad, f"source plays one w.p. {q}", "copy", got, {int(q)})
        return cells, bad

    pure = {"zero": [F(0)], "one": [F(1)]}
    mixed = [q for q in pts if 0 < q < 1]

    if gate == "and":
        game, _ = reduce_pc_to_winlose(_gate_instance(G.AND))
        a = [f"wl/w/a{t}" for t in (1, 2, 3)]
        b = [f"wl/w/b{t}" for t in (1, 2, 3)]
        states = ("zero", "one", "mixed")
        for su, sv in product(states, states):
            if "zero" not in (su, sv) and (su, sv) != ("one", "one"):
                continue  # no forced response to check
            ua = pure.get(su, mixed)
            vb = pure.get(sv, mixed)
            for qa in product(ua, repeat=3) if su == "mixed" else [tuple(ua * 3)]:
                for qb in product(vb, repeat=3) if sv == "mixed" else [tuple(vb * 3)]:
                    cells += 1
                    s = {c: _mix(x) for c, x in zip(a + b, qa + qb)}
                    got = eps_best(_vec(game, "w", s), eps)
                    where = f"u {su}, v {sv}, copies {_fmt(qa)} | {_fmt(qb)}"
                    if su == sv == "one":
                        _expect(bad, where, "w", got, {1})
                    elif "zero" in (su, sv):
                        _expect(bad, where, "w", got, {0})
        return cells, bad

    game, _ = reduce_pc_to_winlose(_gate_instance(G.PURIFY))
    cs = [f"wl/v/p{t}" for t in (1, 2, 3)]
    for su in ("zero", "one", "mixed"):
        opts = pure.get(su, mixed)
        for qs in product(opts, repeat=3) if su == "mixed" else [tuple(opts * 3)]:
            cells += 1
            s = {c: _mix(x) for c, x in zip(cs, qs)}
            bv = eps_best(_vec(game, "v", s), eps)
            bw = eps_best(_vec(game, "w", s), eps)
            where = f"u {su}, copies {_fmt(qs)}"
            if su != "mixed":
                want = {0 if su == "zero" else 1}
                _expect(bad, where, "v", bv, want)
                _expect(bad, where, "w", bw, want)
                continue
            if len(bv) == 2:
                _expect(bad, where + " (v mixes)", "w", bw, {0})
            if len(bw) == 2:
                _expect(bad, where + " (w mixes)", "v", bv, {1})
    return cells, bad
