"""Sum-of-squares certificate machinery.

The nonnegativity certificate writes the unknown polynomial as

    P(x) = sigma_0(x) + sum_j sigma_j(x) * g_j(x)

with each multiplier sigma_j = v_j(x)' Q_j v_j(x) for a PSD Gram matrix Q_j
over a half-degree monomial basis.  This module sizes the Gram blocks and
generates the linear equations that tie the Gram entries to the polynomial
coefficients.  Only upper-triangle Gram entries are independent; the (k, l)
entry with k < l therefore carries weight 2 in every expansion.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .basis import MonomialBasis, MultiIndex, add, enumerate_basis
from .errors import DimensionError, ParameterError
from .polynomials import Polynomial


@dataclass(frozen=True)
class GramBlock:
    """Gram parameterization of one SOS multiplier.

    ``multiplier_index`` is 0 for sigma_0 and j >= 1 for the multiplier of
    the j-th bounding polynomial.  ``half_basis`` spans the monomials v so
    that v' Q v stays within the certificate's degree budget.
    """

    multiplier_index: int
    half_basis: MonomialBasis

    @property
    def side(self) -> int:
        return len(self.half_basis)

    def variable_names(self) -> list[str]:
        j = self.multiplier_index
        return [f"Q{j}[{k},{l}]" for k in range(self.side) for l in range(k, self.side)]


def gram_blocks(n: int, d: int, bounding_polys: list[Polynomial]) -> list[GramBlock]:
    """One block for sigma_0 plus one per bounding polynomial.

    A multiplier whose bounding polynomial already exceeds degree d is
    omitted with a warning: its degree budget would force it to zero anyway.
    """
    if d < 0:
        raise ParameterError(f"certificate degree must be >= 0, got d={d}")
    blocks = [GramBlock(0, enumerate_basis(n, d // 2))]
    for j, g in enumerate(bounding_polys, start=1):
        if g.n != n:
            raise DimensionError(f"bounding polynomial {j} has dimension {g.n}, expected {n}")
        if g.degree > d:
            warnings.warn(
                f"bounding polynomial {j} has degree {g.degree} > d={d}; its multiplier is omitted"
            )
            continue
        blocks.append(GramBlock(j, enumerate_basis(n, (d - g.degree) // 2)))
    return blocks


@dataclass
class CoefficientMatch:
    """Linear equations p_alpha = sum of weighted Gram entries.

    ``equations[i]`` maps (block position, k, l) with k <= l to the weight of
    Gram entry Q[k, l] in the coefficient of the i-th basis monomial.
    """

    n: int
    d: int
    basis: MonomialBasis
    equations: list[dict[tuple[int, int, int], float]]


def match_constraints(
    blocks: list[GramBlock], bounding_polys: list[Polynomial], d: int | None = None
) -> CoefficientMatch:
    """Expand sigma_0 + sum_j sigma_j g_j over the monomial basis of degree d.

    ``d`` defaults to the largest degree the blocks can reach; pass it
    explicitly for odd certificate degrees, where the reachable degree is
    d - 1 but the equation set must still cover all of degree d.
    """
    n = blocks[0].half_basis.n
    if d is None:
        d = max(
            2 * blocks[0].half_basis.r,
            max(
                (2 * blk.half_basis.r + bounding_polys[blk.multiplier_index - 1].degree
                 for blk in blocks[1:]),
                default=0,
            ),
        )
    basis_d = enumerate_basis(n, d)
    equations: list[dict[tuple[int, int, int], float]] = [dict() for _ in basis_d]

    for pos, blk in enumerate(blocks):
        if blk.multiplier_index == 0:
            g_coeffs: dict[MultiIndex, float] = {(0,) * n: 1.0}
        else:
            g_coeffs = bounding_polys[blk.multiplier_index - 1].coeffs
        half = blk.half_basis
        for k in range(len(half)):
            for l in range(k, len(half)):
                weight = 1.0 if k == l else 2.0
                mono = add(half[k], half[l])
                for gamma, gc in g_coeffs.items():
                    if gc == 0.0:
                        continue
                    target = basis_d.index_of(add(mono, gamma))
                    eq = equations[target]
                    key = (pos, k, l)
                    eq[key] = eq.get(key, 0.0) + weight * gc
    return CoefficientMatch(n=n, d=d, basis=basis_d, equations=equations)


def matched_polynomial(
    match: CoefficientMatch, grams: list[np.ndarray]
) -> Polynomial:
    """Polynomial produced by a numeric Gram assignment under the matching equations."""
    coeffs: dict[MultiIndex, float] = {}
    for alpha, eq in zip(match.basis, match.equations):
        value = sum(w * grams[pos][k, l] for (pos, k, l), w in eq.items())
        if value != 0.0:
            coeffs[alpha] = value
    return Polynomial(match.n, coeffs)


def certify_value(
    blocks: list[GramBlock],
    grams: list[np.ndarray],
    bounding_polys: list[Polynomial],
    x,
) -> float:
    """Evaluate sigma_0(x) + sum_j sigma_j(x) g_j(x) directly from the Grams.

    Cross-validates a solved certificate against evaluating the matched
    polynomial: both paths must agree.
    """
    n = blocks[0].half_basis.n
    if len(x) != n:
        raise DimensionError(f"point has dimension {len(x)}, certificate has {n}")
    total = 0.0
    for blk, gram in zip(blocks, grams):
        v = np.array([
            np.prod([xi**ai for xi, ai in zip(x, alpha)])
            for alpha in blk.half_basis
        ])
        sigma = float(v @ np.asarray(gram) @ v)
        if blk.multiplier_index == 0:
            total += sigma
        else:
            total += sigma * bounding_polys[blk.multiplier_index - 1].evaluate(x)
    return total


def box_quadratics(box) -> list[Polynomial]:
    """Default bounding polynomials for a box: one (b_i - x_i)(x_i - a_i) per axis."""
    box = [tuple(axis) for axis in box]
    n = len(box)
    polys = []
    for i, (a, b) in enumerate(box):
        if not a < b:
            raise ParameterError(f"degenerate axis [{a}, {b}] in bounding box")
        e1 = tuple(1 if k == i else 0 for k in range(n))
        e2 = tuple(2 if k == i else 0 for k in range(n))
        polys.append(Polynomial(n, {(0,) * n: -a * b, e1: a + b, e2: -1.0}))
    return polys
