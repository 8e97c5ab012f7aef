"""Weighted simplicial complexes, Hodge Laplacians, intrinsic metrics and
numerical checks of Gaussian-type off-diagonal heat-kernel bounds."""

from .complex import EMPTY, ComplexError, Face, WeightedComplex, as_face, build_complex, face_label, sign
from .dgg import (
    DggContext,
    DggReport,
    dgg_functional_check,
    dgg_pairing_check,
    gaussian_constant,
    gaussian_corollary_check,
    pointwise_kernel_check,
    zeta_closed,
    zeta_variational,
)
from .generators import generate
from .heat import (
    HeatSemigroup,
    HeatState,
    SpectralData,
    apply_semigroup,
    energy_functional,
    heat_kernel_column,
    spectral_bottom,
)
from .homology import betti_numbers, kernel_dimension
from .metrics import MetricTable, metric_table, mu_weight, set_distance, verify_intrinsic
from .operators import (
    SparseOperator,
    adjoint_coboundary,
    bound_b,
    coboundary,
    greens_formula_check,
    hodge_down,
    hodge_full,
    hodge_up,
    pair_weights,
)

__version__ = "0.1.0"
