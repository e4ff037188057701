"""Exact formal power-series solutions of singular Pfaffian systems.

The systems have the form ``x_i^p_i dy/dx_i = f_i(x, y)`` for ``i = 1..m``
with polynomial right-hand sides over the rationals.
"""

from .criteria import CriteriaReport, charpoly, integer_eigs, run_all
from .diagnostics import InsufficientData, degree_profile, gevrey_fit, radius_estimate
from .expr import ParseError, parse_expression
from .integrability import Status, Verdict, compat_defect, defect_on_solution, defects, is_completely_integrable
from .series import NonUnitMatrix, Series
from .solver import (FormalSolution, Provenance, SolveReport, SolveStatus, layered_solve_axis1,
                     residual, solve_formal, verify)
from .system import PfaffianSystem, Poly, validate

__all__ = [
    "CriteriaReport", "FormalSolution", "InsufficientData", "NonUnitMatrix", "ParseError",
    "PfaffianSystem", "Poly", "Provenance", "Series", "SolveReport", "SolveStatus", "Status",
    "Verdict", "charpoly", "compat_defect", "defect_on_solution", "defects", "degree_profile",
    "gevrey_fit", "integer_eigs", "is_completely_integrable", "layered_solve_axis1",
    "parse_expression", "radius_estimate", "residual", "run_all", "solve_formal", "validate",
    "verify",
]
