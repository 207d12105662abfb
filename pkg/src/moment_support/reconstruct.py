"""Assembly of the support-reconstruction conic programs and result extraction.

Three variants share a core:

* P4: minimize the polynomial's mass over the bounding set subject to the
  SOS certificate on B and the PSD localizing constraint with shift fixed
  at 1.
* P5: adds a shift variable h in [1, 1 + delta_h], rewarded in the
  objective with weight omega_h, so the polynomial is pushed above 1
  inside the support.
* P6: adds a second-order-cone penalty omega_M * ||Mbar_d (p - e0)||_2
  that pulls the coefficients of P - 1 toward the null space of the
  boundary matrix; for uniform measures this pins the level-1 set to the
  support boundary.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .basis import enumerate_basis, multi_index_str, parse_multi_index
from .certificates import box_quadratics, gram_blocks, match_constraints
from .conic import (
    STATUS_NEAR_OPTIMAL,
    STATUS_OPTIMAL,
    ConicProgram,
    LinearEquality,
    ScalarBox,
    SecondOrderCone,
    SolverResult,
    get_solver,
)
from .errors import OrderError, ParameterError
from .matrices import AffineMatrix, boundary_matrix, localizing_matrix, localizing_matrix_affine
from .moments import MomentSequence
from .polynomials import Polynomial

VARIANTS = ("P4", "P5", "P6")

SHIFT_VAR = "h"
NORM_VAR = "t"

# Re-verification tolerance for solved PSD blocks, scaled by entry magnitude.
FEASIBILITY_TOL = 1e-6


@dataclass
class ReconstructionConfig:
    """Everything needed to assemble one reconstruction program."""

    variant: str
    d: int
    measure_moments: MomentSequence
    objective_moments: MomentSequence
    bounding_box: tuple = ()
    bounding_polys: list[Polynomial] | None = None
    r: int | None = None
    omega_h: float = 1.2
    delta_h: float = 0.2
    omega_m: float = 10.0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ParameterError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.d < 0:
            raise ParameterError(f"degree must be >= 0, got {self.d}")
        n = self.measure_moments.n
        if self.objective_moments.n != n:
            raise ParameterError(
                f"measure moments have dimension {n}, objective moments {self.objective_moments.n}"
            )
        if self.bounding_polys is None:
            if not self.bounding_box:
                raise ParameterError("either bounding_box or bounding_polys must be given")
            self.bounding_polys = box_quadratics(self.bounding_box)
        for g in self.bounding_polys:
            if g.n != n:
                raise ParameterError(f"bounding polynomial dimension {g.n} does not match n={n}")
        if self.objective_moments.max_order < self.d:
            raise OrderError(
                f"objective moments go up to order {self.objective_moments.max_order}, "
                f"need {self.d}",
                required_order=self.d,
            )
        if self.r is None:
            self.r = (self.measure_moments.max_order - self.d) // 2
        if self.r < 1:
            raise OrderError(
                f"variant {self.variant} with d={self.d}, r=1 requires moments up to order "
                f"2r+d={self.d + 2}, sequence has max_order={self.measure_moments.max_order}",
                required_order=self.d + 2,
            )
        if self.measure_moments.max_order < 2 * self.r + self.d:
            raise OrderError(
                f"r={self.r} requires moments up to order 2r+d={2 * self.r + self.d}, "
                f"sequence has max_order={self.measure_moments.max_order}",
                required_order=2 * self.r + self.d,
            )
        if self.variant in ("P5", "P6"):
            if self.omega_h <= 0 or self.delta_h < 0:
                raise ParameterError(
                    f"{self.variant} needs omega_h > 0 and delta_h >= 0, "
                    f"got omega_h={self.omega_h}, delta_h={self.delta_h}"
                )
        if self.variant == "P6":
            if self.omega_m <= 0:
                raise ParameterError(f"P6 needs omega_m > 0, got {self.omega_m}")
            if self.measure_moments.max_order < 2 * self.d:
                raise OrderError(
                    f"P6 boundary matrix requires moments up to order 2d={2 * self.d}, "
                    f"sequence has max_order={self.measure_moments.max_order}",
                    required_order=2 * self.d,
                )

    @property
    def n(self) -> int:
        return self.measure_moments.n

    def summary(self) -> dict:
        return {
            "variant": self.variant,
            "degree": self.d,
            "relax_order": self.r,
            "omega_h": self.omega_h,
            "delta_h": self.delta_h,
            "omega_m": self.omega_m,
            "bounding_box": [list(axis) for axis in self.bounding_box],
            "measure_max_order": self.measure_moments.max_order,
            "measure_provenance": self.measure_moments.provenance,
            "objective_max_order": self.objective_moments.max_order,
        }


def _p_names(config: ReconstructionConfig) -> list[str]:
    return [f"p{multi_index_str(alpha)}" for alpha in enumerate_basis(config.n, config.d)]


def _localizing_diagonal(y: MomentSequence, r: int) -> np.ndarray:
    # congruence scaling 1/sqrt(diagonal moment) keeps the PSD cone identical
    # while evening out the entry magnitudes at high orders
    diag = []
    for alpha in enumerate_basis(y.n, r):
        v = y.value(tuple(2 * a for a in alpha))
        diag.append(1.0 / np.sqrt(np.clip(abs(v), 1e-16, 1e16)))
    return np.array(diag)


def _assemble(config: ReconstructionConfig, with_shift: bool, with_norm: bool) -> ConicProgram:
    n, d = config.n, config.d
    basis_d = enumerate_basis(n, d)
    p_names = _p_names(config)

    blocks = gram_blocks(n, d, config.bounding_polys)
    match = match_constraints(blocks, config.bounding_polys, d=d)

    variables = list(p_names)
    for blk in blocks:
        variables.extend(blk.variable_names())
    if with_shift:
        variables.append(SHIFT_VAR)
    if with_norm:
        variables.append(NORM_VAR)

    equalities = []
    for p_name, eq in zip(p_names, match.equations):
        coeffs = {p_name: 1.0}
        for (pos, k, l), w in eq.items():
            coeffs[f"Q{blocks[pos].multiplier_index}[{k},{l}]"] = -w
        equalities.append(LinearEquality(coefficients=coeffs, rhs=0.0))

    psd_blocks = []
    for blk in blocks:
        side = blk.side
        coefficients = {}
        for k in range(side):
            for l in range(k, side):
                grid = np.zeros((side, side))
                grid[k, l] = 1.0
                grid[l, k] = 1.0
                coefficients[f"Q{blk.multiplier_index}[{k},{l}]"] = grid
        psd_blocks.append(
            AffineMatrix(
                side=side,
                variables=list(coefficients),
                constant=np.zeros((side, side)),
                coefficients=coefficients,
            )
        )

    loc = localizing_matrix_affine(
        config.measure_moments,
        d,
        config.r,
        shift_variable=SHIFT_VAR if with_shift else None,
    )
    psd_blocks.append(loc.scaled_by_diagonal(_localizing_diagonal(config.measure_moments, config.r)))

    objective = {
        name: config.objective_moments.value(alpha)
        for name, alpha in zip(p_names, basis_d)
    }

    boxes = []
    soc = []
    if with_shift:
        objective[SHIFT_VAR] = -config.omega_h
        boxes.append(ScalarBox(SHIFT_VAR, 1.0, 1.0 + config.delta_h))
    if with_norm:
        mbar = boundary_matrix(config.measure_moments, d)
        offset = -mbar[:, 0].copy()
        soc.append(SecondOrderCone(variables=p_names, matrix=mbar, offset=offset, bound=NORM_VAR))
        objective[NORM_VAR] = config.omega_m

    return ConicProgram(
        variables=variables,
        objective=objective,
        equalities=equalities,
        psd_blocks=psd_blocks,
        soc_constraints=soc,
        boxes=boxes,
    )


def assemble_p4(config: ReconstructionConfig) -> ConicProgram:
    return _assemble(config, with_shift=False, with_norm=False)


def assemble_p5(config: ReconstructionConfig) -> ConicProgram:
    return _assemble(config, with_shift=True, with_norm=False)


def assemble_p6(config: ReconstructionConfig) -> ConicProgram:
    return _assemble(config, with_shift=True, with_norm=True)


def assemble(config: ReconstructionConfig) -> ConicProgram:
    builder = {"P4": assemble_p4, "P5": assemble_p5, "P6": assemble_p6}[config.variant]
    return builder(config)


def solve(program: ConicProgram, solver_options: dict | None = None,
          solver_name: str | None = None) -> SolverResult:
    """Run the program through the configured solver adapter."""
    return get_solver(solver_name).submit(program, solver_options)


def default_solver_options(d: int) -> dict:
    """Loosened tolerances for high-degree runs, where the monomial-basis
    moment matrices are badly conditioned."""
    if d >= 12:
        return {"tol_gap_abs": 1e-6, "tol_gap_rel": 1e-6, "tol_feas": 1e-6}
    return {}


@dataclass
class SupportEstimate:
    """Recovered polynomial plus solver outcome and re-verified diagnostics.

    The superlevel set {x : polynomial(x) >= 1} is the support estimate.
    """

    polynomial: Polynomial
    h_star: float
    objective_value: float | None
    solver_status: str
    diagnostics: dict = field(default_factory=dict)

    @property
    def reliable(self) -> bool:
        return self.solver_status in (STATUS_OPTIMAL, STATUS_NEAR_OPTIMAL)


def extract_estimate(config: ReconstructionConfig, result: SolverResult) -> SupportEstimate:
    """Build the estimate and re-verify feasibility independently of the solver.

    The localizing block is rebuilt numerically from the recovered
    polynomial via :func:`matrices.localizing_matrix`, the Gram blocks are
    eigen-checked, and for P6 the boundary-norm residual is recomputed.
    """
    n, d = config.n, config.d
    basis_d = enumerate_basis(n, d)
    if not result.values:
        return SupportEstimate(
            polynomial=Polynomial(n, {}),
            h_star=float("nan"),
            objective_value=result.objective,
            solver_status=result.status,
            diagnostics={"note": "no primal point returned"},
        )

    coeffs = {alpha: result.values[f"p{multi_index_str(alpha)}"] for alpha in basis_d}
    poly = Polynomial(n, coeffs)
    h_star = result.values.get(SHIFT_VAR, 1.0)

    diagnostics: dict = {"solver": result.solver_name, "solve_time": result.solve_time}

    blocks = gram_blocks(n, d, config.bounding_polys)
    gram_eigs = []
    for blk in blocks:
        side = blk.side
        gram = np.empty((side, side))
        for k in range(side):
            for l in range(k, side):
                v = result.values[f"Q{blk.multiplier_index}[{k},{l}]"]
                gram[k, l] = v
                gram[l, k] = v
        gram_eigs.append(float(np.linalg.eigvalsh(gram).min()))
    diagnostics["gram_min_eigs"] = gram_eigs

    shifted = poly.plus_constant(-h_star)
    loc = localizing_matrix(config.measure_moments, shifted, config.r)
    loc_scale = float(np.abs(loc).max()) or 1.0
    diagnostics["localizing_min_eig"] = float(np.linalg.eigvalsh(0.5 * (loc + loc.T)).min())
    diagnostics["localizing_scale"] = loc_scale

    if config.variant in ("P5", "P6"):
        diagnostics["h_bounds_ok"] = bool(
            1.0 - 1e-9 <= h_star <= 1.0 + config.delta_h + 1e-9
        )
    if config.variant == "P6":
        mbar = boundary_matrix(config.measure_moments, d)
        pvec = np.array([coeffs[alpha] for alpha in basis_d])
        pvec[0] -= 1.0
        diagnostics["boundary_residual"] = float(np.linalg.norm(mbar @ pvec))
        diagnostics["boundary_scale"] = float(np.linalg.norm(mbar, 2))

    gram_ok = all(e >= -FEASIBILITY_TOL * max(1.0, abs(e)) for e in gram_eigs)
    loc_ok = diagnostics["localizing_min_eig"] >= -FEASIBILITY_TOL * loc_scale
    diagnostics["feasible"] = bool(gram_ok and loc_ok)

    return SupportEstimate(
        polynomial=poly,
        h_star=float(h_star),
        objective_value=result.objective,
        solver_status=result.status,
        diagnostics=diagnostics,
    )


def reconstruct(config: ReconstructionConfig, solver_options: dict | None = None,
                solver_name: str | None = None) -> SupportEstimate:
    """assemble -> solve -> extract in one call."""
    program = assemble(config)
    options = solver_options if solver_options is not None else default_solver_options(config.d)
    result = solve(program, options, solver_name)
    return extract_estimate(config, result)


def write_estimate(estimate: SupportEstimate, config: ReconstructionConfig, path) -> None:
    basis_d = enumerate_basis(config.n, config.d)
    doc = {
        "config": config.summary(),
        "status": estimate.solver_status,
        "objective": estimate.objective_value,
        "h_star": estimate.h_star,
        "coefficients": {
            multi_index_str(alpha): estimate.polynomial.coefficient(alpha) for alpha in basis_d
        },
        "diagnostics": estimate.diagnostics,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, allow_nan=True)
        fh.write("\n")


def read_estimate(path) -> tuple[Polynomial, dict]:
    """Load an estimate file; returns the polynomial and the full document."""
    with open(path) as fh:
        doc = json.load(fh)
    coeffs = {parse_multi_index(key): float(v) for key, v in doc["coefficients"].items()}
    n = len(next(iter(coeffs))) if coeffs else 1
    return Polynomial(n, coeffs), doc
