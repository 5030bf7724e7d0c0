"""Numerical and circuit-level toolkit for the dilation method of simulating
``x' = (-i H + K) x`` with ``K`` negative semidefinite."""

from . import blockenc, circuit_io, circuits, dilation, experiments, numerics, qsvt

__all__ = ["blockenc", "circuit_io", "circuits", "dilation", "experiments", "numerics", "qsvt"]
__version__ = "0.1.0"
