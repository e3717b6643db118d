from tensorbridge.conformance.generator import ConformanceCase, ShapeBudget, edge_cases, generate_cases
from tensorbridge.conformance.oracle import finite_diff_grad, max_abs_err
from tensorbridge.conformance.report import CaseRecord, emit_report, read_report
from tensorbridge.conformance.runner import run_check, run_differential, run_gradient_case

__all__ = [
    "CaseRecord",
    "ConformanceCase",
    "ShapeBudget",
    "edge_cases",
    "emit_report",
    "finite_diff_grad",
    "generate_cases",
    "max_abs_err",
    "read_report",
    "run_check",
    "run_differential",
    "run_gradient_case",
]
