"""Solver-agnostic conic program carrier and solver adapters.

A :class:`ConicProgram` is a linear objective over named scalar variables
subject to linear equalities, PSD constraints on affine matrices, second-
order-cone constraints, and scalar boxes.  Adapters translate the carrier
for a concrete solver; the active adapter is chosen by name or through the
``MOMENT_SUPPORT_SOLVER`` environment variable.

Adapter contract: ``submit(program, options) -> SolverResult`` with primal
values for every named variable, a normalized status, and feasibility
residuals recomputed from the carrier data (not taken from the solver).
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import ParameterError
from .matrices import AffineMatrix

STATUS_OPTIMAL = "optimal"
STATUS_NEAR_OPTIMAL = "near-optimal"
STATUS_INFEASIBLE = "infeasible"
STATUS_UNBOUNDED = "unbounded"
STATUS_FAILURE = "numerical-failure"


@dataclass
class LinearEquality:
    """sum_v coefficients[v] * value(v) = rhs"""

    coefficients: dict[str, float]
    rhs: float


@dataclass
class SecondOrderCone:
    """|| matrix @ x_vars + offset ||_2 <= value(bound)"""

    variables: list[str]
    matrix: np.ndarray
    offset: np.ndarray
    bound: str


@dataclass
class ScalarBox:
    variable: str
    lower: float
    upper: float


@dataclass
class ConicProgram:
    variables: list[str]
    objective: dict[str, float]
    equalities: list[LinearEquality] = field(default_factory=list)
    psd_blocks: list[AffineMatrix] = field(default_factory=list)
    soc_constraints: list[SecondOrderCone] = field(default_factory=list)
    boxes: list[ScalarBox] = field(default_factory=list)

    def __post_init__(self):
        declared = set(self.variables)
        if len(declared) != len(self.variables):
            raise ParameterError("duplicate variable names in program")

        def check(names, where):
            for name in names:
                if name not in declared:
                    raise ParameterError(f"{where} references undeclared variable {name!r}")

        check(self.objective, "objective")
        for eq in self.equalities:
            check(eq.coefficients, "equality")
        for block in self.psd_blocks:
            check(block.coefficients, "PSD block")
        for soc in self.soc_constraints:
            check(soc.variables + [soc.bound], "SOC constraint")
        for box in self.boxes:
            check([box.variable], "box constraint")

    def index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.variables)}


@dataclass
class SolverResult:
    """Raw solver outcome: normalized status, primal values, residuals."""

    status: str
    values: dict[str, float]
    objective: float | None
    residuals: dict
    solver_name: str
    solve_time: float


def feasibility_residuals(program: ConicProgram, values: dict[str, float]) -> dict:
    """Residuals of every constraint class at a primal point.

    Computed from the carrier alone so they stay meaningful whichever solver
    produced the point.
    """
    x = np.array([values[name] for name in program.variables])
    idx = program.index()

    eq_res = 0.0
    for eq in program.equalities:
        lhs = sum(c * x[idx[v]] for v, c in eq.coefficients.items())
        eq_res = max(eq_res, abs(lhs - eq.rhs))

    psd_eigs = []
    for block in program.psd_blocks:
        mat = block.evaluate({name: x[idx[name]] for name in block.variables})
        sym = 0.5 * (mat + mat.T)
        psd_eigs.append(float(np.linalg.eigvalsh(sym).min()))

    soc_slacks = []
    for soc in program.soc_constraints:
        vec = soc.matrix @ np.array([x[idx[v]] for v in soc.variables]) + soc.offset
        soc_slacks.append(float(x[idx[soc.bound]] - np.linalg.norm(vec)))

    box_violation = 0.0
    for box in program.boxes:
        v = x[idx[box.variable]]
        box_violation = max(box_violation, max(box.lower - v, v - box.upper, 0.0))

    return {
        "equality_max_abs": float(eq_res),
        "psd_block_min_eigs": psd_eigs,
        "soc_slacks": soc_slacks,
        "box_violation": float(box_violation),
    }


class CvxpySolver:
    """Adapter backed by cvxpy; ``backend`` names the underlying conic solver."""

    def __init__(self, backend: str):
        self.backend = backend

    @property
    def name(self) -> str:
        return self.backend.lower()

    def submit(self, program: ConicProgram, options: dict | None = None) -> SolverResult:
        import cvxpy as cp

        options = dict(options or {})
        nvars = len(program.variables)
        idx = program.index()
        x = cp.Variable(nvars, name="x")
        constraints = []

        if program.equalities:
            rows, cols, vals, rhs = [], [], [], []
            for i, eq in enumerate(program.equalities):
                for name, c in eq.coefficients.items():
                    rows.append(i)
                    cols.append(idx[name])
                    vals.append(c)
                rhs.append(eq.rhs)
            a_eq = sp.coo_matrix((vals, (rows, cols)), shape=(len(program.equalities), nvars))
            constraints.append(a_eq.tocsr() @ x == np.array(rhs))

        for block in program.psd_blocks:
            side = block.side
            if side == 1:
                expr = block.constant[0, 0]
                for name, grid in block.coefficients.items():
                    expr = expr + grid[0, 0] * x[idx[name]]
                constraints.append(expr >= 0)
                continue
            # tie the upper triangle of a PSD matrix variable to the affine entries
            upper = [(i, j) for i in range(side) for j in range(i, side)]
            rows, cols, vals = [], [], []
            for name, grid in block.coefficients.items():
                col = idx[name]
                for k, (i, j) in enumerate(upper):
                    if grid[i, j] != 0.0:
                        rows.append(k)
                        cols.append(col)
                        vals.append(grid[i, j])
            gmat = sp.coo_matrix((vals, (rows, cols)), shape=(len(upper), nvars)).tocsr()
            offset = np.array([block.constant[i, j] for i, j in upper])
            z = cp.Variable((side, side), PSD=True)
            flat = [i * side + j for i, j in upper]
            z_upper = cp.reshape(z, (side * side,), order="C")[flat]
            constraints.append(z_upper == gmat @ x + offset)

        for soc in program.soc_constraints:
            sel = [idx[v] for v in soc.variables]
            constraints.append(cp.SOC(x[idx[soc.bound]], soc.matrix @ x[sel] + soc.offset))

        for box in program.boxes:
            v = x[idx[box.variable]]
            if np.isfinite(box.lower):
                constraints.append(v >= box.lower)
            if np.isfinite(box.upper):
                constraints.append(v <= box.upper)

        cvec = np.zeros(nvars)
        for name, c in program.objective.items():
            cvec[idx[name]] = c
        problem = cp.Problem(cp.Minimize(cvec @ x), constraints)

        solver_map = {"clarabel": cp.CLARABEL, "scs": cp.SCS}
        if self.name not in solver_map:
            raise ParameterError(f"unknown solver backend {self.backend!r}")
        t0 = time.perf_counter()
        try:
            problem.solve(solver=solver_map[self.name], **options)
        except cp.error.SolverError as exc:
            return SolverResult(
                status=STATUS_FAILURE,
                values={},
                objective=None,
                residuals={"error": str(exc)},
                solver_name=self.name,
                solve_time=time.perf_counter() - t0,
            )
        elapsed = time.perf_counter() - t0

        status = _normalize_status(problem.status)
        if status in (STATUS_OPTIMAL, STATUS_NEAR_OPTIMAL) and x.value is not None:
            values = {name: float(x.value[idx[name]]) for name in program.variables}
            residuals = feasibility_residuals(program, values)
        else:
            values = {}
            residuals = {}
        return SolverResult(
            status=status,
            values=values,
            objective=None if problem.value is None else float(problem.value),
            residuals=residuals,
            solver_name=self.name,
            solve_time=elapsed,
        )


def _normalize_status(cvxpy_status: str | None) -> str:
    mapping = {
        "optimal": STATUS_OPTIMAL,
        "optimal_inaccurate": STATUS_NEAR_OPTIMAL,
        "infeasible": STATUS_INFEASIBLE,
        "infeasible_inaccurate": STATUS_INFEASIBLE,
        "unbounded": STATUS_UNBOUNDED,
        "unbounded_inaccurate": STATUS_UNBOUNDED,
    }
    return mapping.get(cvxpy_status or "", STATUS_FAILURE)


SOLVER_ENV_VAR = "MOMENT_SUPPORT_SOLVER"
DEFAULT_SOLVER = "clarabel"


def get_solver(name: str | None = None) -> CvxpySolver:
    """Adapter registry: explicit name wins, then the environment, then the default."""
    chosen = name or os.environ.get(SOLVER_ENV_VAR) or DEFAULT_SOLVER
    chosen = chosen.lower()
    if chosen in ("clarabel", "scs"):
        return CvxpySolver(chosen)
    raise ParameterError(f"unknown solver {chosen!r}; expected 'clarabel' or 'scs'")
