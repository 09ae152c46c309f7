"""Simulation and diagnostics for m-th order area-preserving curvature flows of closed planar curves."""

from .curve import ClosedCurve, GeometricSummary, summarize
from .flow import FlowParams, FlowState, Status, Stepper, run

__all__ = ["ClosedCurve", "GeometricSummary", "summarize", "FlowParams", "FlowState", "Status",
           "Stepper", "run"]
__version__ = "0.1.0"
