"""Critical fugacity of spread-out lattice trees and lattice animals.

Exact random-walk return probabilities, continuum constants, exhaustive
polymer enumeration and the fixed-point / decomposition machinery around
``p_c = 1/e + C L^{-d} + O(L^{-d-1})``.
"""

from .census import (
    CensusBudgetError,
    PolymerCensus,
    PowerSeries,
    TnTable,
    chi_from_census,
    chi_series,
    enumerate_polymers,
    growth_pc_estimate,
    one_point_series,
    read_census,
    tn_table,
    two_point_series,
    two_point_table,
    write_census,
)
from .continuum import ConstantsReport, c_la, c_lt, irwin_hall_center, predict_pc, ustar_origin
from .critical import (
    DecompositionReport,
    P1Solution,
    g0_closed,
    g_leading,
    gh_decompose,
    h_leading,
    hath_ub,
    i_leading,
    pc_ratio_estimate,
    predict_p1_lattice,
    solve_p1,
    triangle_lb,
)
from .exact import EPoly
from .kernels import (
    ConvolutionTable,
    KernelError,
    StepKernel,
    TailSum,
    build_kernel,
    conv_table,
    dhat,
    dstar_origin,
    s_geq,
    scaling_gap,
)

__version__ = "0.1.0"
