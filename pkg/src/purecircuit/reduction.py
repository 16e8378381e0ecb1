"""Bookkeeping shared by every circuit-to-target reduction."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .core import PCInstance


@dataclass(frozen=True)
class Gadget:
    """Target objects introduced for one source gate."""

    source_gate: int
    internals: tuple[str, ...]
    target_gates: tuple[int, ...] = ()


@dataclass(frozen=True)
class ReductionMap:
    """Links source nodes to target objects.

    ``nodes`` maps every source node to the id of the target object that
    carries its value.  ``source`` is the instance that was reduced; when a
    gate-set rewrite or normalization ran first, ``original`` is the
    instance before it and decoded assignments are restricted to its nodes.
    """

    kind: str
    nodes: dict[str, str]
    params: dict[str, Fraction] = field(default_factory=dict)
    gadgets: tuple[Gadget, ...] = ()
    source: PCInstance | None = None
    original: PCInstance | None = None
