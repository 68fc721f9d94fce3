"""Surgery pipeline: stage curves, the unrolling homotopy and its eigenvalue trace."""

from .homotopy import (
    BoundReport,
    DiniResult,
    Homotopy,
    HomotopyParams,
    HomotopyTrace,
    dini_derivative,
    efes_bound_check,
    frozen_quotient,
    largest_root,
    smoothstep,
    trace_eigenvalue,
    unroll_homotopy,
)
from .pipeline import TRACE_COLUMNS, PipelineReport, SurgeryContext, run_pipeline
from .stages import find_A, project_beta, reflect_chi, reparam_zeta, stage_lambda, sunrise_gamma

__all__ = [
    "BoundReport", "DiniResult", "Homotopy", "HomotopyParams", "HomotopyTrace",
    "dini_derivative", "efes_bound_check", "frozen_quotient", "largest_root", "smoothstep",
    "trace_eigenvalue", "unroll_homotopy", "TRACE_COLUMNS", "PipelineReport",
    "SurgeryContext", "run_pipeline", "find_A", "project_beta", "reflect_chi",
    "reparam_zeta", "stage_lambda", "sunrise_gamma",
]
