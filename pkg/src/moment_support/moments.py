"""Truncated moment sequences for the supported measure families.

Measure moments are probability-normalized (``y_0 = 1``); moments of the
bounding set come from the raw Lebesgue measure, so their zeroth entry is the
volume of the set.  Both kinds share the same container and file format.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .basis import MultiIndex, basis_size, enumerate_basis, multi_index_str, parse_multi_index
from .errors import OrderError, ParameterError, UnsupportedError

PROBABILITY = "probability"
LEBESGUE = "lebesgue"

# Above this order the closed forms hit double-precision under/overflow.
MAX_SUPPORTED_ORDER = 60


@dataclass(frozen=True)
class MomentSequence:
    """Moments y_alpha of a measure for every |alpha| <= max_order."""

    n: int
    max_order: int
    values: dict[MultiIndex, float]
    normalization: str = PROBABILITY
    provenance: str = ""

    def __post_init__(self):
        expected = basis_size(self.n, self.max_order)
        if len(self.values) != expected:
            raise ParameterError(
                f"moment sequence must hold {expected} values for n={self.n}, "
                f"max_order={self.max_order}, got {len(self.values)}"
            )
        if self.normalization not in (PROBABILITY, LEBESGUE):
            raise ParameterError(f"unknown normalization {self.normalization!r}")

    def value(self, alpha: MultiIndex) -> float:
        alpha = tuple(alpha)
        try:
            return self.values[alpha]
        except KeyError:
            raise OrderError(
                f"moment y_{alpha} of order {sum(alpha)} not available (max_order={self.max_order})",
                required_order=sum(alpha),
            ) from None


def _check_order(max_order: int) -> None:
    if max_order < 0:
        raise ParameterError(f"max_order must be >= 0, got {max_order}")
    if max_order > MAX_SUPPORTED_ORDER:
        raise ParameterError(
            f"max_order={max_order} exceeds the supported limit of {MAX_SUPPORTED_ORDER}"
        )


def _uniform_1d(a: float, b: float, k: int) -> float:
    return (b ** (k + 1) - a ** (k + 1)) / ((b - a) * (k + 1))


def _lebesgue_1d(a: float, b: float, k: int) -> float:
    return (b ** (k + 1) - a ** (k + 1)) / (k + 1)


def uniform_interval_moments(a: float, b: float, max_order: int) -> MomentSequence:
    """Moments of the uniform probability measure on [a, b]."""
    _check_order(max_order)
    if not a < b:
        raise ParameterError(f"interval requires a < b, got [{a}, {b}]")
    values = {(k,): _uniform_1d(a, b, k) for k in range(max_order + 1)}
    return MomentSequence(1, max_order, values, PROBABILITY, f"uniform-interval[{a},{b}]")


def uniform_box_moments(bounds, max_order: int) -> MomentSequence:
    """Moments of the uniform probability measure on a product of intervals."""
    _check_order(max_order)
    bounds = [tuple(axis) for axis in bounds]
    for a, b in bounds:
        if not a < b:
            raise ParameterError(f"degenerate axis [{a}, {b}] in box")
    n = len(bounds)
    values = {}
    for alpha in enumerate_basis(n, max_order):
        v = 1.0
        for (a, b), k in zip(bounds, alpha):
            v *= _uniform_1d(a, b, k)
        values[alpha] = v
    return MomentSequence(n, max_order, values, PROBABILITY, f"uniform-box{bounds}")


def beta_moments(shape_a: float, shape_b: float, max_order: int) -> MomentSequence:
    """Moments of the Beta(shape_a, shape_b) measure on [0, 1].

    Computed by the recurrence y_k = (shape_a + k - 1) / (shape_a + shape_b
    + k - 1) * y_{k-1} with y_0 = 1, which reproduces e.g. the Beta(4, 4)
    mean 1/2 and second moment 5/18.
    """
    _check_order(max_order)
    if shape_a <= 0 or shape_b <= 0:
        raise ParameterError(f"beta shapes must be positive, got ({shape_a}, {shape_b})")
    values = {(0,): 1.0}
    for k in range(1, max_order + 1):
        values[(k,)] = values[(k - 1,)] * (shape_a + k - 1) / (shape_a + shape_b + k - 1)
    return MomentSequence(1, max_order, values, PROBABILITY, f"beta({shape_a},{shape_b})")


def _sorted_disjoint(intervals):
    ivs = sorted((tuple(iv) for iv in intervals), key=lambda iv: iv[0])
    for a, b in ivs:
        if not a < b:
            raise ParameterError(f"degenerate interval [{a}, {b}] in union")
    for (_, b_prev), (a_next, _) in zip(ivs, ivs[1:]):
        if a_next < b_prev:
            raise ParameterError(f"union intervals overlap near {a_next}")
    return ivs


def uniform_union_moments(intervals, max_order: int) -> MomentSequence:
    """Moments of the uniform probability measure on a disjoint union of intervals."""
    _check_order(max_order)
    ivs = _sorted_disjoint(intervals)
    total = sum(b - a for a, b in ivs)
    values = {}
    for k in range(max_order + 1):
        values[(k,)] = sum(_lebesgue_1d(a, b, k) for a, b in ivs) / total
    return MomentSequence(1, max_order, values, PROBABILITY, f"uniform-union{ivs}")


def lebesgue_box_moments(bounds, max_order: int) -> MomentSequence:
    """Raw Lebesgue moments of a box; the zeroth moment is the box volume."""
    _check_order(max_order)
    bounds = [tuple(axis) for axis in bounds]
    for a, b in bounds:
        if not a < b:
            raise ParameterError(f"degenerate axis [{a}, {b}] in box")
    n = len(bounds)
    values = {}
    for alpha in enumerate_basis(n, max_order):
        v = 1.0
        for (a, b), k in zip(bounds, alpha):
            v *= _lebesgue_1d(a, b, k)
        values[alpha] = v
    return MomentSequence(n, max_order, values, LEBESGUE, f"lebesgue-box{bounds}")


def empirical_moments(samples, max_order: int) -> MomentSequence:
    """Sample-average moments y_alpha = mean_k x_k^alpha."""
    _check_order(max_order)
    arr = np.atleast_2d(np.asarray(samples, dtype=float))
    if arr.shape[0] == 0 or arr.size == 0:
        raise ParameterError("empirical moments require at least one sample")
    n = arr.shape[1]
    # per-axis power table: powers[i][k] = x_i^k over all samples
    powers = [np.vander(arr[:, i], max_order + 1, increasing=True) for i in range(n)]
    values = {}
    for alpha in enumerate_basis(n, max_order):
        prod = powers[0][:, alpha[0]].copy()
        for i in range(1, n):
            prod *= powers[i][:, alpha[i]]
        values[alpha] = float(prod.mean())
    return MomentSequence(n, max_order, values, PROBABILITY, f"empirical({arr.shape[0]} samples)")


def affine_pushforward_moments(seq: MomentSequence, centers, scales) -> MomentSequence:
    """Moments of z = (x - centers) / scales when x is distributed per ``seq``.

    Expanded by the binomial theorem axis by axis; exact up to floating-point
    rounding, no truncation is introduced.
    """
    if len(centers) != seq.n or len(scales) != seq.n:
        raise ParameterError("centers/scales must have one entry per variable")
    values = {}
    for alpha in enumerate_basis(seq.n, seq.max_order):
        # E[prod_i (x_i - c_i)^{a_i}] via binomial expansion, then 1/s^alpha
        terms = {(): 1.0}
        for axis, ai in enumerate(alpha):
            ci = centers[axis]
            new_terms: dict[tuple[int, ...], float] = {}
            for prefix, w in terms.items():
                for k in range(ai + 1):
                    key = prefix + (k,)
                    new_terms[key] = new_terms.get(key, 0.0) + w * comb(ai, k) * (-ci) ** (ai - k)
            terms = new_terms
        total = sum(w * seq.value(beta) for beta, w in terms.items())
        scale = 1.0
        for si, ai in zip(scales, alpha):
            scale *= si**ai
        values[alpha] = total / scale
    return MomentSequence(
        seq.n, seq.max_order, values, seq.normalization, seq.provenance + " (rescaled)"
    )


@dataclass(frozen=True)
class MeasureSpec:
    """Declarative description of a measure with known support.

    Families: ``uniform-interval`` (params a, b), ``uniform-box`` (param
    bounds), ``uniform-union`` (param intervals), ``beta`` (params a, b),
    ``empirical`` (param samples).
    """

    family: str
    params: dict = field(default_factory=dict)

    _FAMILIES = ("uniform-interval", "uniform-box", "uniform-union", "beta", "empirical")

    def __post_init__(self):
        if self.family not in self._FAMILIES:
            raise ParameterError(f"unknown measure family {self.family!r}")

    @property
    def dimension(self) -> int:
        if self.family == "uniform-box":
            return len(self.params["bounds"])
        if self.family == "empirical":
            return len(self.params["samples"][0])
        return 1

    def moments(self, max_order: int) -> MomentSequence:
        if self.family == "uniform-interval":
            return uniform_interval_moments(self.params["a"], self.params["b"], max_order)
        if self.family == "uniform-box":
            return uniform_box_moments(self.params["bounds"], max_order)
        if self.family == "uniform-union":
            return uniform_union_moments(self.params["intervals"], max_order)
        if self.family == "beta":
            return beta_moments(self.params["a"], self.params["b"], max_order)
        return empirical_moments(self.params["samples"], max_order)

    def support_intervals(self):
        """True support as a sorted list of intervals; 1D families only."""
        if self.family == "uniform-interval":
            return [(self.params["a"], self.params["b"])]
        if self.family == "uniform-union":
            return _sorted_disjoint(self.params["intervals"])
        if self.family == "beta":
            return [(0.0, 1.0)]
        if self.family == "uniform-box" and self.dimension == 1:
            return [tuple(self.params["bounds"][0])]
        raise UnsupportedError(f"no 1D support description for family {self.family!r}")

    def support_contains(self, x) -> bool:
        """Membership test for the true support; used by the metrics code."""
        if self.family == "uniform-box":
            return all(a <= xi <= b for xi, (a, b) in zip(x, self.params["bounds"]))
        if self.family == "empirical":
            raise UnsupportedError("empirical measures carry no ground-truth support")
        (x0,) = tuple(x) if hasattr(x, "__len__") else (x,)
        return any(a <= x0 <= b for a, b in self.support_intervals())

    def to_config(self) -> dict:
        return {"family": self.family, **self.params}

    @staticmethod
    def from_config(data: dict) -> "MeasureSpec":
        data = dict(data)
        family = data.pop("family", None)
        if family is None:
            raise ParameterError("measure config needs a 'family' field")
        return MeasureSpec(family, data)


def write_moments(seq: MomentSequence, path) -> None:
    """Write the text moment-file format (JSON with one record per multi-index)."""
    records = {
        multi_index_str(alpha): seq.values[alpha]
        for alpha in enumerate_basis(seq.n, seq.max_order)
    }
    doc = {
        "n": seq.n,
        "max_order": seq.max_order,
        "normalization": seq.normalization,
        "provenance": seq.provenance,
        "values": records,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def read_moments(path) -> MomentSequence:
    with open(path) as fh:
        doc = json.load(fh)
    values = {parse_multi_index(key): float(v) for key, v in doc["values"].items()}
    return MomentSequence(
        n=int(doc["n"]),
        max_order=int(doc["max_order"]),
        values=values,
        normalization=doc.get("normalization", PROBABILITY),
        provenance=doc.get("provenance", ""),
    )
