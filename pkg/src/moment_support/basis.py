"""Multi-index arithmetic and graded monomial basis enumeration.

A multi-index is a plain tuple of non-negative integer exponents, one per
variable.  Bases are graded: entries are sorted by total degree, and inside
each degree by descending lexicographic order of the exponent tuple.  For
n=2, r=2 this yields

    1, x1, x2, x1^2, x1*x2, x2^2

which is the layout every matrix builder in this package assumes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Iterator

from .errors import DimensionError, ParameterError, SizingError

MultiIndex = tuple[int, ...]

# Largest basis we are willing to enumerate; C(r+n, n) above this would not
# fit a 64-bit index and is far beyond anything the solvers can handle.
_MAX_BASIS_SIZE = 2**63 - 1


def basis_size(n: int, r: int) -> int:
    """Number of monomials in n variables of total degree <= r, C(r+n, n)."""
    if n < 1:
        raise ParameterError(f"dimension must be >= 1, got n={n}")
    if r < 0:
        raise ParameterError(f"max degree must be >= 0, got r={r}")
    size = comb(r + n, n)
    if size > _MAX_BASIS_SIZE:
        raise SizingError(f"basis size C({r + n},{n}) overflows a 64-bit index (n={n}, r={r})")
    return size


def degree(alpha: MultiIndex) -> int:
    """Total degree |alpha| of a multi-index."""
    return sum(alpha)


def multi_index_str(alpha: MultiIndex) -> str:
    """Text form used in all file formats, e.g. (2, 0) -> "[2,0]"."""
    return "[" + ",".join(str(a) for a in alpha) + "]"


def parse_multi_index(text: str) -> MultiIndex:
    """Inverse of :func:`multi_index_str`."""
    body = text.strip()
    if not (body.startswith("[") and body.endswith("]")):
        raise ValueError(f"malformed multi-index {text!r}")
    return tuple(int(part) for part in body[1:-1].split(","))


def _exponents_of_degree(n: int, total: int) -> Iterator[MultiIndex]:
    """All exponent tuples of length n summing to total, leading exponent descending."""
    if n == 1:
        yield (total,)
        return
    for head in range(total, -1, -1):
        for tail in _exponents_of_degree(n - 1, total - head):
            yield (head,) + tail


@dataclass(frozen=True)
class MonomialBasis:
    """Ordered monomial basis of all multi-indices with |alpha| <= r."""

    n: int
    r: int
    entries: tuple[MultiIndex, ...]
    _positions: dict[MultiIndex, int] = field(repr=False, compare=False, default_factory=dict)

    def __post_init__(self):
        if not self._positions:
            self._positions.update({alpha: i for i, alpha in enumerate(self.entries)})

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[MultiIndex]:
        return iter(self.entries)

    def __getitem__(self, position: int) -> MultiIndex:
        return self.entries[position]

    def index_of(self, alpha: MultiIndex) -> int | None:
        """Position of alpha in the basis, or None when |alpha| > r."""
        if len(alpha) != self.n:
            raise DimensionError(f"multi-index {alpha} has length {len(alpha)}, basis dimension is {self.n}")
        return self._positions.get(tuple(alpha))


def enumerate_basis(n: int, r: int) -> MonomialBasis:
    """Graded basis of the S_{n,r} monomials of degree <= r (see module docstring)."""
    size = basis_size(n, r)
    entries = []
    for total in range(r + 1):
        entries.extend(_exponents_of_degree(n, total))
    assert len(entries) == size
    return MonomialBasis(n=n, r=r, entries=tuple(entries))


def index_of(basis: MonomialBasis, alpha: MultiIndex) -> int | None:
    """Functional alias for :meth:`MonomialBasis.index_of`."""
    return basis.index_of(alpha)


def add(alpha: MultiIndex, beta: MultiIndex) -> MultiIndex:
    """Exponent-wise sum (monomial product)."""
    if len(alpha) != len(beta):
        raise DimensionError(f"cannot add multi-indices of lengths {len(alpha)} and {len(beta)}")
    return tuple(a + b for a, b in zip(alpha, beta))
