"""Certified lower bounds for the constants of the real Hardy--Littlewood inequalities."""

from .certify import BoundReport, ReportOptions, build_report, quotient_lower_bound, verify_theorem_pop
from .closed_forms import (
    HLParams,
    dual_exponent,
    gamma,
    hl_exponent,
    lower_bound_001,
    lower_bound_step4,
    upper_const_known,
)
from .errors import CapExceededError, CertificationError, DomainError
from .forms import SparseMultilinearForm, VectorP, backward_shift, evaluate, hl_sum, make_T2, make_Tm
from .norm_engine import (
    NormEstimate,
    norm_exact_linf,
    norm_lower_alternating,
    norm_upper_interpolation,
    norm_upper_recursion,
    norm_upper_T2p_certified,
)

__version__ = "0.1.0"
