"""Superlevel-set extraction and support-approximation metrics.

The recovered support is the set {x : P(x) >= threshold}.  In one dimension
the set is resolved into exact intervals by scanning a grid for sign
changes of P - threshold and refining each bracketed crossing by bisection.
In higher dimensions set sizes are estimated by Monte Carlo against a known
ground-truth support.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, UnsupportedError
from .moments import MeasureSpec
from .polynomials import Polynomial

BISECTION_TOL = 1e-10
DEFAULT_RESOLUTION_1D = 1001
DEFAULT_RESOLUTION_2D = 201
DEFAULT_SAMPLE_COUNT = 1_000_000
DEFAULT_SEED = 42


@dataclass(frozen=True)
class GridSpec:
    """Evaluation grid: per-axis intervals and points per axis."""

    box: tuple
    resolution: int

    def __post_init__(self):
        if self.resolution < 2:
            raise ParameterError(f"grid resolution must be >= 2, got {self.resolution}")
        for a, b in self.box:
            if not a < b:
                raise ParameterError(f"degenerate grid axis [{a}, {b}]")

    @property
    def n(self) -> int:
        return len(self.box)

    def axes(self) -> list[np.ndarray]:
        return [np.linspace(a, b, self.resolution) for a, b in self.box]


@dataclass
class LevelSetReport:
    """Volume comparison of the estimated set against the true support."""

    threshold: float
    covered_volume: float
    excess: float
    deficit: float
    intervals: list | None = None
    std_error: float | None = None
    sample_count: int | None = None


def evaluate_on_points(p: Polynomial, points: np.ndarray) -> np.ndarray:
    """Vectorized evaluation at an (N, n) array of points."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    max_exp = [0] * p.n
    for alpha in p.coeffs:
        for i, a in enumerate(alpha):
            max_exp[i] = max(max_exp[i], a)
    powers = [np.vander(pts[:, i], max_exp[i] + 1, increasing=True) for i in range(p.n)]
    out = np.zeros(pts.shape[0])
    for alpha, c in sorted(p.coeffs.items(), key=lambda item: (sum(item[0]), item[0])):
        if c == 0.0:
            continue
        term = np.full(pts.shape[0], c)
        for i, a in enumerate(alpha):
            if a:
                term = term * powers[i][:, a]
        out += term
    return out


def _bisect_crossing(p: Polynomial, threshold: float, lo: float, hi: float) -> float:
    f_lo = p.evaluate([lo]) - threshold
    while hi - lo > BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        f_mid = p.evaluate([mid]) - threshold
        if (f_lo <= 0) == (f_mid <= 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def extract_intervals_1d(
    p: Polynomial, threshold: float, box, resolution: int = DEFAULT_RESOLUTION_1D
) -> list[tuple[float, float]]:
    """Maximal intervals of {x in box : P(x) >= threshold}.

    Features narrower than one grid cell can be missed; the default
    resolution keeps cells small relative to every workload in this package.
    """
    if p.n != 1:
        raise UnsupportedError(f"interval extraction needs a univariate polynomial, got n={p.n}")
    (lo, hi) = tuple(box[0]) if hasattr(box[0], "__len__") else tuple(box)
    xs = np.linspace(lo, hi, resolution)
    above = evaluate_on_points(p, xs.reshape(-1, 1)) >= threshold

    intervals = []
    start = None
    for i in range(resolution):
        if above[i] and start is None:
            start = xs[i] if i == 0 else _bisect_crossing(p, threshold, xs[i - 1], xs[i])
        elif not above[i] and start is not None:
            end = _bisect_crossing(p, threshold, xs[i - 1], xs[i])
            intervals.append((start, end))
            start = None
    if start is not None:
        intervals.append((start, xs[-1]))
    return intervals


def _interval_intersection_length(ivs_a, ivs_b) -> float:
    total = 0.0
    for a0, a1 in ivs_a:
        for b0, b1 in ivs_b:
            total += max(0.0, min(a1, b1) - max(a0, b0))
    return total


def volume_metrics(
    p: Polynomial,
    threshold: float,
    truth: MeasureSpec,
    box,
    resolution: int = DEFAULT_RESOLUTION_1D,
    sample_count: int = DEFAULT_SAMPLE_COUNT,
    seed: int = DEFAULT_SEED,
) -> LevelSetReport:
    """Excess and deficit of {P >= threshold} against the true support.

    One-dimensional supports are compared by exact interval arithmetic; in
    higher dimensions a seeded uniform Monte Carlo draw over the box is used
    and a standard-error estimate is reported.
    """
    if p.n == 1:
        estimated = extract_intervals_1d(p, threshold, box, resolution)
        true_ivs = [tuple(iv) for iv in truth.support_intervals()]
        est_len = sum(b - a for a, b in estimated)
        true_len = sum(b - a for a, b in true_ivs)
        overlap = _interval_intersection_length(estimated, true_ivs)
        return LevelSetReport(
            threshold=threshold,
            covered_volume=est_len,
            excess=est_len - overlap,
            deficit=true_len - overlap,
            intervals=[list(iv) for iv in estimated],
        )

    bounds = [tuple(axis) for axis in box]
    if len(bounds) != p.n:
        raise ParameterError(f"box has {len(bounds)} axes, polynomial has {p.n}")
    rng = np.random.default_rng(seed)
    lows = np.array([a for a, _ in bounds])
    highs = np.array([b for _, b in bounds])
    pts = rng.uniform(lows, highs, size=(sample_count, p.n))
    in_estimate = evaluate_on_points(p, pts) >= threshold
    if truth.family == "uniform-box":
        tb = np.asarray(truth.params["bounds"], dtype=float)
        in_truth = np.all((pts >= tb[:, 0]) & (pts <= tb[:, 1]), axis=1)
    else:
        in_truth = np.array([truth.support_contains(pt) for pt in pts])
    volume = float(np.prod(highs - lows))
    frac_excess = float(np.mean(in_estimate & ~in_truth))
    frac_deficit = float(np.mean(~in_estimate & in_truth))
    # binomial standard error of the symmetric-difference fraction
    frac_sym = frac_excess + frac_deficit
    std_error = volume * float(np.sqrt(max(frac_sym * (1 - frac_sym), 0.0) / sample_count))
    return LevelSetReport(
        threshold=threshold,
        covered_volume=volume * float(np.mean(in_estimate)),
        excess=volume * frac_excess,
        deficit=volume * frac_deficit,
        std_error=std_error,
        sample_count=sample_count,
    )


def export_grid(p: Polynomial, grid: GridSpec, threshold: float = 1.0) -> list[tuple]:
    """Rows of (coordinates..., P, threshold) in lexicographic grid order."""
    if p.n > 2:
        raise UnsupportedError(f"grid export supports n <= 2, got n={p.n}")
    if grid.n != p.n:
        raise ParameterError(f"grid has {grid.n} axes, polynomial has {p.n}")
    axes = grid.axes()
    if p.n == 1:
        pts = axes[0].reshape(-1, 1)
    else:
        x1, x2 = np.meshgrid(axes[0], axes[1], indexing="ij")
        pts = np.column_stack([x1.ravel(), x2.ravel()])
    vals = evaluate_on_points(p, pts)
    return [tuple(pt) + (float(v), threshold) for pt, v in zip(pts, vals)]


def write_grid_csv(p: Polynomial, grid: GridSpec, path, threshold: float = 1.0) -> None:
    rows = export_grid(p, grid, threshold)
    header = ["x1", "P", "threshold"] if p.n == 1 else ["x1", "x2", "P", "threshold"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _round_floats(obj, digits=9):
    if isinstance(obj, float):
        return round(obj, digits)
    if isinstance(obj, dict):
        return {k: _round_floats(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v, digits) for v in obj]
    return obj


def write_metrics(report: LevelSetReport, path, extra: dict | None = None) -> None:
    """Metrics report; float fields are rounded to 1e-9 so reruns under a
    deterministic solver produce byte-identical files."""
    doc = {
        "threshold": report.threshold,
        "covered_volume": report.covered_volume,
        "excess": report.excess,
        "deficit": report.deficit,
        "symmetric_difference": report.excess + report.deficit,
        "intervals": report.intervals,
        "std_error": report.std_error,
        "sample_count": report.sample_count,
    }
    if extra:
        doc.update(extra)
    with open(path, "w") as fh:
        json.dump(_round_floats(doc), fh, indent=1)
        fh.write("\n")
