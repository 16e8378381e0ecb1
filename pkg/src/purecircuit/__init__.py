"""Pure-Circuit: three-valued circuits, solvers and reductions to games."""

from .core import (
    BOT,
    ONE,
    VALUES,
    ZERO,
    Gate,
    GateType,
    GateVerdicts,
    PCInstance,
    PureCircuitError,
    Semantics,
    Value,
    check_restrictions,
    interaction_graph,
    kleene_eval,
    validate_instance,
    verify_assignment,
)
from .transforms import normalize, rewrite_gateset

__all__ = [
    "BOT",
    "ONE",
    "VALUES",
    "ZERO",
    "Gate",
    "GateType",
    "GateVerdicts",
    "PCInstance",
    "PureCircuitError",
    "Semantics",
    "Value",
    "check_restrictions",
    "interaction_graph",
    "kleene_eval",
    "normalize",
    "rewrite_gateset",
    "validate_instance",
    "verify_assignment",
]
