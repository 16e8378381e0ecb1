"""Backtracking search for target-side witnesses of circuit solutions.

Source nodes take values from per-node candidate lists.  Each gadget is
checked as soon as all of its source nodes are fixed; its own internal
values are searched locally.
"""

from __future__ import annotations

from typing import Callable, Mapping, Sequence


class _Exhausted(Exception):
    pass


def search(
    order: Sequence[str],
    candidates: Mapping[str, Sequence],
    units: Sequence[tuple[Sequence[str], Callable[[dict], dict | None]]],
    budget: int = 200_000,
) -> dict | None:
    """First assignment of ``order`` under which every unit succeeds.

    A unit is ``(scope, solve)``; ``solve`` receives the current values and
    returns the unit's internal values, or None if it cannot be completed.
    Returns None when no witness exists or the budget of visited partial
    assignments runs out.
    """
    pos = {v: i for i, v in enumerate(order)}
    due: list[list] = [[] for _ in order]
    free_units = []
    for scope, solve in units:
        if scope:
            due[max(pos[v] for v in scope)].append(solve)
        else:
            free_units.append(solve)
    values: dict = {}
    internals: list[dict] = []
    visited = 0

    def rec(i: int) -> bool:
        nonlocal visited
        if i == len(order):
            return True
        v = order[i]
        for cand in candidates[v]:
            visited += 1
            if visited > budget:
                raise _Exhausted
            values[v] = cand
            mark = len(internals)
            ok = True
            for solve in due[i]:
                got = solve(values)
                if got is None:
                    ok = False
                    break
                internals.append(got)
            if ok and rec(i + 1):
                return True
            del internals[mark:]
        values.pop(v, None)
        return False

    for solve in free_units:
        got = solve({})
        if got is None:
            return None
        internals.append(got)
    try:
        if not rec(0):
            return None
    except _Exhausted:
        return None
    out = dict(values)
    for part in internals:
        out.update(part)
    return out


def local_search(
    fixed: Mapping[str, object],
    internals: Sequence[str],
    options: Callable[[str, dict], Sequence],
    check: Callable[[dict], bool],
    ready: Callable[[int, dict], bool] | None = None,
) -> dict | None:
    """Assign ``internals`` in order from ``options(node, values)``.

    ``check(values)`` is called once everything is assigned; ``ready`` may
    prune earlier by testing a prefix (it gets the count of assigned
    internals).
    """
    values = dict(fixed)

    def rec(i: int) -> bool:
        if i == len(internals):
            return check(values)
        node = internals[i]
        for cand in options(node, values):
            values[node] = cand
            if ready is None or ready(i + 1, values):
                if rec(i + 1):
                    return True
        values.pop(node, None)
        return False

    if not rec(0):
        return None
    return {k: values[k] for k in internals}
