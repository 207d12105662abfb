"""Support-set reconstruction from truncated moment sequences.

Given finitely many moments of a measure, the package assembles conic
programs whose solution is a polynomial P whose superlevel set
{x : P(x) >= 1} approximates the measure's support.
"""

from .basis import MonomialBasis, basis_size, enumerate_basis, index_of
from .certificates import CoefficientMatch, GramBlock, box_quadratics, certify_value, gram_blocks, match_constraints
from .conic import ConicProgram, SolverResult, get_solver
from .errors import DimensionError, OrderError, ParameterError, SizingError, UnsupportedError
from .levelset import GridSpec, LevelSetReport, extract_intervals_1d, volume_metrics
from .matrices import AffineMatrix, boundary_matrix, localizing_matrix, localizing_matrix_affine, moment_matrix
from .moments import (
    MeasureSpec,
    MomentSequence,
    beta_moments,
    empirical_moments,
    lebesgue_box_moments,
    read_moments,
    uniform_box_moments,
    uniform_interval_moments,
    uniform_union_moments,
    write_moments,
)
from .polynomials import Polynomial
from .reconstruct import (
    ReconstructionConfig,
    SupportEstimate,
    assemble,
    assemble_p4,
    assemble_p5,
    assemble_p6,
    extract_estimate,
    reconstruct,
    solve,
)

__version__ = "0.1.0"
