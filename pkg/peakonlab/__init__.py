"""peakonlab - numerical laboratory for the mCH-Novikov-CH family"""
from peakonlab.state import (
    ModelParams, GridSpec, Field, PeakonState, IntegratorOptions, TestFunction,
    PeakonTrajectory, FieldTrajectory, DiagnosticsSeries, BreakingCertificate,
)

__version__ = "0.1.0"

__all__ = [
    "ModelParams",
    "GridSpec",
    "Field",
    "PeakonState",
    "IntegratorOptions",
    "TestFunction",
    "PeakonTrajectory",
    "FieldTrajectory",
    "DiagnosticsSeries",
    "BreakingCertificate",
]
