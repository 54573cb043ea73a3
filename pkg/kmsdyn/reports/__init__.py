"""
Command implementations, JSON/CSV serialization and PNG rendering.
"""

from .commands import (
    CommandResult,
    cmd_census,
    cmd_classify,
    cmd_julia,
    cmd_measure,
    cmd_phase_diagram,
    cmd_pressure,
    emit,
)

__all__ = [
    "CommandResult",
    "cmd_census",
    "cmd_classify",
    "cmd_julia",
    "cmd_measure",
    "cmd_phase_diagram",
    "cmd_pressure",
    "emit",
]
