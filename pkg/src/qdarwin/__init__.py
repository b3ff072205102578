"""Simulation and analysis of redundant environmental records of a decohering qubit."""

from qdarwin.analytic import (
    TwoBranchSummary,
    analytic_mutual_information,
    analytic_pip,
    two_branch_entropy,
)
from qdarwin.darwin import (
    Fragment,
    PipCurve,
    RedundancyReport,
    SamplingPolicy,
    antisymmetry_residual,
    classical_classical_check,
    mutual_information,
    pip_curve,
    redundancy,
)
from qdarwin.errors import CapacityError, InputError
from qdarwin.models import (
    BranchSpec,
    HazySpec,
    ImprintSchedule,
    build_branching_state,
    build_hazy_environment,
    haar_random_state,
    imprint_overlaps,
)
from qdarwin.qcore import (
    DensityOperator,
    PureState,
    QubitRegister,
    Spectrum,
    embed_product,
    hermitian_spectrum,
    partial_trace,
    von_neumann_entropy,
)

__version__ = "0.1.0"
