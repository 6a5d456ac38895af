"""Bounds on the effective conductivity of composites in a magnetic field.

The package covers elementary and strong-field bounds on the Hall
coefficient, rank-one and rank-two laminates (including a laminate whose
effective Hall coefficient has the opposite sign to every phase), the
Hashin-Shtrikman type bounds through the Y-transform, and numerical checks
of the Gamma-operator algebra those bounds rest on.
"""

from .bounds_elem import (
    BoundsVerdict,
    CircleParams,
    b_interval,
    b_interval_check,
    circle_check,
    circle_params,
    elementary_verdicts,
    optimal_shift_bound,
    optimal_shift_check,
    partial_iso_check,
    partial_iso_cstar_bound,
    superfluous_check,
    superfluous_cstar_bound,
)
from .bounds_hs import (
    AlphaRoots,
    DiskGeometry,
    HSCoefficients,
    HSReport,
    VerticalLine,
    YTensorTI,
    alpha_pm,
    b_hs_check,
    g_fun,
    g_quadrature,
    hs_bounds,
    hs_coefficients,
    hs_disk_check,
    hs_geometry,
    order_phases,
    phase_circle_residual,
    t1_s1,
    y_tensor_matrix,
    y_tensor_ti,
)
from .exceptions import (
    DegenerateLaminationError,
    DegeneratePhasesError,
    HallBoundsError,
    InvalidConductivityError,
    YTransformPoleError,
)
from .gamma_verify import (
    GammaAverage,
    L0Params,
    gamma_avg_adaptive,
    gamma_avg_closed,
    gamma_avg_closed_inverse,
    gamma_avg_numeric,
    gamma_of_xi,
    gamma_relation_residual,
    hs_inequality_check,
    hs_matrix_ti_check,
    hs_matrix_verdicts,
    reference_l0,
    y_block_tensor,
)
from .laminate import (
    CounterexampleVariant,
    LaminateFields,
    LaminateSpec,
    SweepResult,
    convergence_order,
    counterexample_spec,
    counterexample_sweep,
    partial_isotropy_residual,
    rank_one_effective,
    rank_one_fields,
    rank_two_effective,
    richardson_limit,
)
from .tensor_core import (
    DEFAULT_TOL,
    J,
    PhaseDistribution,
    TIConductivity,
    average_block_L,
    block_L_to_conductivity,
    build_block_L,
    delta12,
    matrix_to_ti,
    psd_margin,
    psd_order_check,
    sym_antisym_split,
    ti_to_matrix,
)

__version__ = "0.1.0"
