"""Sparse polynomials over the monomial basis."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

from .basis import MultiIndex, degree as index_degree
from .errors import DimensionError


@dataclass(frozen=True)
class Polynomial:
    """Polynomial represented by a coefficient map multi-index -> value.

    Absent multi-indices have coefficient zero.  Keys must all have length
    ``n``.
    """

    n: int
    coeffs: dict[MultiIndex, float] = field(default_factory=dict)

    def __post_init__(self):
        for alpha in self.coeffs:
            if len(alpha) != self.n:
                raise DimensionError(f"coefficient key {alpha} has length {len(alpha)}, expected {self.n}")

    @property
    def degree(self) -> int:
        nonzero = [index_degree(a) for a, c in self.coeffs.items() if c != 0.0]
        return max(nonzero, default=0)

    def coefficient(self, alpha: MultiIndex) -> float:
        return self.coeffs.get(tuple(alpha), 0.0)

    def evaluate(self, x) -> float:
        """Evaluate at the point x, accumulating terms in degree order."""
        if len(x) != self.n:
            raise DimensionError(f"point has dimension {len(x)}, polynomial has {self.n}")
        total = 0.0
        for alpha, c in sorted(self.coeffs.items(), key=lambda item: (index_degree(item[0]), item[0])):
            term = c
            for xi, ai in zip(x, alpha):
                term *= xi**ai
            total += term
        return total

    def __call__(self, x) -> float:
        return self.evaluate(x)

    def plus_constant(self, delta: float) -> Polynomial:
        zero = (0,) * self.n
        coeffs = dict(self.coeffs)
        coeffs[zero] = coeffs.get(zero, 0.0) + delta
        return Polynomial(self.n, coeffs)

    def scaled(self, factor: float) -> Polynomial:
        return Polynomial(self.n, {a: factor * c for a, c in self.coeffs.items()})


def constant(n: int, value: float) -> Polynomial:
    return Polynomial(n, {(0,) * n: value})


def poly_add(p: Polynomial, q: Polynomial) -> Polynomial:
    if p.n != q.n:
        raise DimensionError(f"cannot add polynomials in {p.n} and {q.n} variables")
    coeffs = dict(p.coeffs)
    for alpha, c in q.coeffs.items():
        coeffs[alpha] = coeffs.get(alpha, 0.0) + c
    return Polynomial(p.n, coeffs)


def poly_mul(p: Polynomial, q: Polynomial) -> Polynomial:
    if p.n != q.n:
        raise DimensionError(f"cannot multiply polynomials in {p.n} and {q.n} variables")
    coeffs: dict[MultiIndex, float] = {}
    for a, ca in p.coeffs.items():
        for b, cb in q.coeffs.items():
            key = tuple(x + y for x, y in zip(a, b))
            coeffs[key] = coeffs.get(key, 0.0) + ca * cb
    return Polynomial(p.n, coeffs)


def compose_affine(p: Polynomial, centers, scales) -> Polynomial:
    """Polynomial q with q(x) = p((x - centers) / scales), expanded per axis.

    Used to map a polynomial recovered in rescaled coordinates back to the
    original ones.
    """
    if len(centers) != p.n or len(scales) != p.n:
        raise DimensionError("centers/scales must have one entry per variable")
    result: dict[MultiIndex, float] = {}
    for alpha, c in p.coeffs.items():
        # expand prod_i ((x_i - c_i)/s_i)^{a_i} one axis at a time
        terms = {(): c}
        for ci, si, ai in zip(centers, scales, alpha):
            new_terms: dict[tuple[int, ...], float] = {}
            for prefix, w in terms.items():
                for k in range(ai + 1):
                    coef = w * comb(ai, k) * (-ci) ** (ai - k) / si**ai
                    key = prefix + (k,)
                    new_terms[key] = new_terms.get(key, 0.0) + coef
            terms = new_terms
        for key, w in terms.items():
            result[key] = result.get(key, 0.0) + w
    return Polynomial(p.n, result)
