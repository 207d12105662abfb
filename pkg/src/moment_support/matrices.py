"""Structured matrices built from a moment sequence.

All builders lay out rows and columns along the graded basis from
:mod:`moment_support.basis`, so the (i, j) entry always refers to the
multi-index sum of the i-th and j-th basis monomials.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import MonomialBasis, add, degree, enumerate_basis, multi_index_str
from .errors import OrderError, ParameterError
from .moments import MomentSequence
from .polynomials import Polynomial


@dataclass
class AffineMatrix:
    """Square matrix whose entries are affine in a declared set of scalars.

    Entry (i, j) is ``constant[i, j] + sum_v coefficients[v][i, j] * value(v)``.
    """

    side: int
    variables: list[str]
    constant: np.ndarray
    coefficients: dict[str, np.ndarray]

    def __post_init__(self):
        declared = set(self.variables)
        for name in self.coefficients:
            if name not in declared:
                raise ParameterError(f"coefficient grid references undeclared variable {name!r}")

    def evaluate(self, assignment: dict[str, float]) -> np.ndarray:
        """Numeric matrix at a full assignment of the declared variables."""
        out = self.constant.copy()
        for name, grid in self.coefficients.items():
            out += assignment[name] * grid
        return out

    def scaled_by_diagonal(self, diag) -> "AffineMatrix":
        """Congruence transform D A D for a positive diagonal D; preserves PSD-ness."""
        d = np.asarray(diag, dtype=float)
        outer = np.outer(d, d)
        return AffineMatrix(
            side=self.side,
            variables=list(self.variables),
            constant=self.constant * outer,
            coefficients={name: grid * outer for name, grid in self.coefficients.items()},
        )


def _require_order(y: MomentSequence, needed: int, what: str) -> None:
    if y.max_order < needed:
        raise OrderError(
            f"{what} requires moments up to order {needed}, sequence has max_order={y.max_order}",
            required_order=needed,
        )


def moment_matrix(y: MomentSequence, r: int) -> np.ndarray:
    """Symmetric S_{n,r} x S_{n,r} matrix with entries y_{alpha_i + alpha_j}."""
    _require_order(y, 2 * r, f"moment matrix of order r={r}")
    b = enumerate_basis(y.n, r)
    side = len(b)
    out = np.empty((side, side))
    for i in range(side):
        for j in range(i, side):
            v = y.value(add(b[i], b[j]))
            out[i, j] = v
            out[j, i] = v
    return out


def localizing_matrix(y: MomentSequence, p: Polynomial, r: int) -> np.ndarray:
    """Moment matrix shifted by a polynomial: entries sum_g p_g y_{g+alpha_i+alpha_j}."""
    _require_order(y, 2 * r + p.degree, f"localizing matrix of order r={r} for degree-{p.degree} polynomial")
    b = enumerate_basis(y.n, r)
    side = len(b)
    out = np.zeros((side, side))
    for i in range(side):
        for j in range(i, side):
            base = add(b[i], b[j])
            v = sum(c * y.value(add(base, gamma)) for gamma, c in p.coeffs.items() if c != 0.0)
            out[i, j] = v
            out[j, i] = v
    return out


def localizing_matrix_affine(
    y: MomentSequence, d: int, r: int, shift_variable: str | None = None
) -> AffineMatrix:
    """Localizing matrix of the unknown degree-d polynomial minus a shift.

    Entry (i, j) is ``sum_g p_g y_{g+alpha_i+alpha_j} - h y_{alpha_i+alpha_j}``
    where the p_g are decision variables named after their multi-index.  When
    ``shift_variable`` is None the shift h is fixed at 1 and folded into the
    constant grid; otherwise it becomes an extra decision variable with the
    given name.
    """
    _require_order(y, 2 * r + d, f"affine localizing matrix of order r={r}, degree d={d}")
    row_basis = enumerate_basis(y.n, r)
    coeff_basis = enumerate_basis(y.n, d)
    side = len(row_basis)

    shift_grid = np.empty((side, side))
    for i in range(side):
        for j in range(i, side):
            v = y.value(add(row_basis[i], row_basis[j]))
            shift_grid[i, j] = v
            shift_grid[j, i] = v

    names = [f"p{multi_index_str(gamma)}" for gamma in coeff_basis]
    coefficients = {}
    for name, gamma in zip(names, coeff_basis):
        grid = np.empty((side, side))
        for i in range(side):
            for j in range(i, side):
                v = y.value(add(add(row_basis[i], row_basis[j]), gamma))
                grid[i, j] = v
                grid[j, i] = v
        coefficients[name] = grid

    if shift_variable is None:
        constant = -shift_grid
    else:
        constant = np.zeros((side, side))
        names = names + [shift_variable]
        coefficients[shift_variable] = -shift_grid
    return AffineMatrix(side=side, variables=names, constant=constant, coefficients=coefficients)


def boundary_matrix(y: MomentSequence, r: int) -> np.ndarray:
    """Degree-weighted moment matrix whose null vectors give polynomials that
    vanish on the boundary of a uniform measure's support.

    Entry (i, j) is ``(n + deg_i + deg_j) / (n + deg_i) * y_{alpha_i+alpha_j}``
    where deg_i is the total degree of the i-th basis monomial (not the flat
    matrix index).  The row-dependent weight makes the matrix non-symmetric
    in general.
    """
    _require_order(y, 2 * r, f"boundary matrix of order r={r}")
    b = enumerate_basis(y.n, r)
    side = len(b)
    n = y.n
    out = np.empty((side, side))
    for i in range(side):
        di = degree(b[i])
        for j in range(side):
            dj = degree(b[j])
            out[i, j] = (n + di + dj) / (n + di) * y.value(add(b[i], b[j]))
    return out


def write_matrix_csv(matrix: np.ndarray, path) -> None:
    """Debug dump: plain CSV grid."""
    np.savetxt(path, np.asarray(matrix), delimiter=",")
