"""Lower bounds for the real Hardy--Littlewood constants ``C_{m,p}``.

The main route divides the HL sum of ``T_m`` by a certified upper bound on
``||T_m||``; since the inequality must hold for ``T_m``, the quotient is a
lower bound on the optimal constant. Closed-form bounds and the known upper
bound are reported alongside it.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import asdict, dataclass

from .closed_forms import (
    STEP2_CONSTANT,
    HLParams,
    hl_exponent,
    lower_bound_001,
    lower_bound_step4,
    upper_const_known,
)
from .errors import CertificationError, DomainError
from .forms import SparseMultilinearForm, hl_sum, make_T2, tm_hl_sum
from .norm_engine import (
    DEFAULT_MAX_GRID_POINTS,
    NormEstimate,
    norm_exact_linf,
    norm_upper_interpolation,
    norm_upper_recursion,
    norm_upper_T2p_certified,
)

__all__ = [
    "Bound",
    "BoundReport",
    "ReportOptions",
    "quotient_lower_bound",
    "certified_t2_estimate",
    "build_report",
    "verify_theorem_pop",
    "fmt",
    "report_to_dict",
    "report_from_dict",
    "reports_to_json",
    "reports_from_json",
    "report_to_text",
    "reports_to_csv",
    "reports_to_table",
    "CSV_COLUMNS",
]

logger = logging.getLogger(__name__)


def fmt(x) -> str:
    """Numbers are emitted with 15 significant digits."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    return format(float(x), ".15g")


def _round15(x: float) -> float:
    return float(fmt(x))


@dataclass(frozen=True)
class Bound:
    value: float
    method: str
    certified: bool
    conditional: bool = False


@dataclass(frozen=True)
class ReportOptions:
    """Knobs for :func:`build_report`.

    ``gap`` is the starting bracket width for the ``T_2`` enclosure; it is
    halved up to ``max_halvings`` times until the certified upper bound is
    below 2.
    """

    gap: float = 1e-4
    max_halvings: int = 16
    max_points: int = DEFAULT_MAX_GRID_POINTS


@dataclass(frozen=True)
class BoundReport:
    m: int
    p: float
    rho: float
    dual_rho: float
    norm_t2: NormEstimate
    norm_tm: NormEstimate
    lower_001: Bound
    lower_step4: Bound | None
    quotient: Bound
    quotient_interpolation: Bound | None
    upper_known: float
    best_lower: float
    best_method: str
    theorem_pop_holds: bool

    @property
    def params(self) -> HLParams:
        return HLParams(self.m, self.p)

    def lower_bounds(self) -> dict:
        named = {
            "lower_001": self.lower_001,
            "lower_step4": self.lower_step4,
            "quotient": self.quotient,
            "quotient_interpolation": self.quotient_interpolation,
        }
        return {k: v for k, v in named.items() if v is not None}


def quotient_lower_bound(
    form: SparseMultilinearForm, params: HLParams, norm_upper: NormEstimate
) -> float:
    """``hl_sum(form, rho) / norm_upper.upper``, a lower bound on ``C_{m,p}``.

    Valid whenever ``norm_upper.upper`` really bounds ``||form||``; whether it
    is certified or conditional follows ``norm_upper``.
    """
    if form.nnz == 0:
        raise DomainError("the zero form gives no information")
    if form.arity != params.m:
        raise DomainError(f"form arity {form.arity} does not match m={params.m}")
    if not norm_upper.upper > 0:
        raise DomainError("norm upper bound must be positive")
    return hl_sum(form, hl_exponent(params).rho) / norm_upper.upper


def certified_t2_estimate(
    p: float,
    gap: float = 1e-4,
    accept=None,
    max_halvings: int = 16,
    max_points: int = DEFAULT_MAX_GRID_POINTS,
    strict: bool = False,
) -> NormEstimate:
    """Certified bracket for ``||T_2||`` on l_p, refined until ``accept(est)`` holds.

    ``p = inf`` is exact by extreme points. For finite ``p`` the enclosure gap
    is halved until ``accept`` passes; with ``strict`` a
    :class:`CertificationError` is raised if it never does, otherwise the
    last estimate is returned.
    """
    if math.isinf(p):
        v = norm_exact_linf(make_T2())
        return NormEstimate(v, v, "extreme-points", "extreme-points", certified_upper=True)
    accept = accept or (lambda est: True)
    est = None
    for _ in range(max_halvings + 1):
        try:
            est = norm_upper_T2p_certified(p, gap, max_points=max_points)
        except CertificationError:
            if strict or est is None:
                raise
            break
        if accept(est):
            return est
        gap /= 2
    if strict:
        raise CertificationError(f"could not certify the T_2 bound at p={p:g} down to gap {gap:g}")
    logger.warning("T_2 bracket at p=%g did not meet its target; using upper=%.15g", p, est.upper)
    return est


def _assemble(params: HLParams, t2: NormEstimate) -> BoundReport:
    m, p = params.m, params.p
    exp = hl_exponent(params)
    tm = norm_upper_recursion(m, t2)
    hl = tm_hl_sum(m, exp.rho)
    quotient = Bound(hl / tm.upper, f"hl-sum/{tm.method_upper}", tm.certified_upper, tm.conditional)
    lower_001 = Bound(lower_bound_001(params), "closed-form-001", certified=True)

    lower_step4 = None
    quotient_interp = None
    if not params.is_infinite:
        # at p = 4 the step-4 value is 2/1.74 and needs only ||T_2|| < 1.74
        at_seed = p == 4.0
        lower_step4 = Bound(
            lower_bound_step4(params),
            "closed-form-step4",
            certified=at_seed and t2.certified_upper and t2.upper < float(STEP2_CONSTANT),
            conditional=not at_seed,
        )
        if p > 4:
            interp = norm_upper_recursion(m, norm_upper_interpolation(p))
            quotient_interp = Bound(hl / interp.upper, f"hl-sum/{interp.method_upper}", False, True)

    candidates = [("lower_001", lower_001), ("quotient", quotient)]
    if lower_step4 is not None:
        candidates.append(("lower_step4", lower_step4))
    usable = [(b.value, name) for name, b in candidates if b.certified and not b.conditional]
    best_value, best_name = max(usable)
    return BoundReport(
        m=m,
        p=p,
        rho=exp.rho,
        dual_rho=exp.dual_rho,
        norm_t2=t2,
        norm_tm=tm,
        lower_001=lower_001,
        lower_step4=lower_step4,
        quotient=quotient,
        quotient_interpolation=quotient_interp,
        upper_known=upper_const_known(params, "real"),
        best_lower=best_value,
        best_method=best_name,
        theorem_pop_holds=best_value > 1.0,
    )


def build_report(params: HLParams, options: ReportOptions | None = None) -> BoundReport:
    """Every applicable bound for ``C_{m,p}``, with the best certified lower bound.

    Conditional (interpolation-based) values are reported but never chosen
    as ``best_lower``.
    """
    options = options or ReportOptions()
    t2 = certified_t2_estimate(
        params.p,
        options.gap,
        accept=lambda est: est.upper < 2.0,
        max_halvings=options.max_halvings,
        max_points=options.max_points,
    )
    return _assemble(params, t2)


def verify_theorem_pop(m: int, gap: float = 1e-4, max_halvings: int = 16) -> BoundReport:
    """Certify ``C_{m,2m} > 1`` through the quotient route.

    The ``T_2`` bracket at ``p = 2m`` is refined until the quotient exceeds 1
    by more than twice the bracket width.
    """
    params = HLParams(m, 2 * m)

    def enough(est):
        q = tm_hl_sum(m, 2.0) / (2.0 ** (m - 2) * est.upper)
        return q - 1.0 > 2.0 * est.width

    t2 = certified_t2_estimate(params.p, gap, accept=enough, max_halvings=max_halvings, strict=True)
    report = _assemble(params, t2)
    if not report.quotient.value > 1.0:
        raise CertificationError(f"quotient {report.quotient.value!r} does not exceed 1 at m={m}")
    return report


# ---------------------------------------------------------------------------
# Serialization


def _p_out(p: float):
    return "inf" if math.isinf(p) else _round15(p)


def _p_in(p) -> float:
    return math.inf if p == "inf" else float(p)


def _estimate_dict(est: NormEstimate) -> dict:
    d = asdict(est)
    d["lower"] = _round15(est.lower)
    d["upper"] = _round15(est.upper)
    return d


def _bound_dict(b: Bound | None):
    if b is None:
        return None
    d = asdict(b)
    d["value"] = _round15(b.value)
    return d


def report_to_dict(report: BoundReport) -> dict:
    return {
        "m": report.m,
        "p": _p_out(report.p),
        "rho": _round15(report.rho),
        "dual_rho": _round15(report.dual_rho),
        "norm_t2": _estimate_dict(report.norm_t2),
        "norm_tm": _estimate_dict(report.norm_tm),
        "bounds": {
            "lower_001": _bound_dict(report.lower_001),
            "lower_step4": _bound_dict(report.lower_step4),
            "quotient": _bound_dict(report.quotient),
            "quotient_interpolation": _bound_dict(report.quotient_interpolation),
        },
        "upper_known": _round15(report.upper_known),
        "best_lower": _round15(report.best_lower),
        "best_method": report.best_method,
        "theorem_pop_holds": report.theorem_pop_holds,
    }


def report_from_dict(d: dict) -> BoundReport:
    bounds = d["bounds"]

    def bound(key):
        return Bound(**bounds[key]) if bounds.get(key) is not None else None

    return BoundReport(
        m=int(d["m"]),
        p=_p_in(d["p"]),
        rho=float(d["rho"]),
        dual_rho=float(d["dual_rho"]),
        norm_t2=NormEstimate(**d["norm_t2"]),
        norm_tm=NormEstimate(**d["norm_tm"]),
        lower_001=bound("lower_001"),
        lower_step4=bound("lower_step4"),
        quotient=bound("quotient"),
        quotient_interpolation=bound("quotient_interpolation"),
        upper_known=float(d["upper_known"]),
        best_lower=float(d["best_lower"]),
        best_method=d["best_method"],
        theorem_pop_holds=bool(d["theorem_pop_holds"]),
    )


def reports_to_json(reports) -> str:
    return json.dumps([report_to_dict(r) for r in reports], indent=2) + "\n"


def reports_from_json(text: str) -> list:
    return [report_from_dict(d) for d in json.loads(text)]


def report_to_text(report: BoundReport) -> str:
    """Key-value listing, one bound per line with method and certification tags."""
    lines = [
        f"m={report.m}",
        f"p={fmt(report.p)}",
        f"rho={fmt(report.rho)}",
        f"dual_rho={fmt(report.dual_rho)}",
        f"norm_t2=[{fmt(report.norm_t2.lower)}, {fmt(report.norm_t2.upper)}]"
        f" method={report.norm_t2.method_upper} certified={fmt(report.norm_t2.certified_upper)}",
    ]
    for name, b in report.lower_bounds().items():
        lines.append(
            f"{name}={fmt(b.value)}, method={b.method}, certified={fmt(b.certified)},"
            f" conditional={fmt(b.conditional)}"
        )
    lines += [
        f"upper_known={fmt(report.upper_known)}",
        f"best_lower={fmt(report.best_lower)} ({report.best_method})",
        f"pop={fmt(report.theorem_pop_holds)}",
    ]
    return "\n".join(lines) + "\n"


CSV_COLUMNS = (
    "m",
    "p",
    "rho",
    "lower_001",
    "lower_step4",
    "quotient",
    "quotient_certified",
    "quotient_interpolation",
    "norm_t2_upper",
    "upper_known",
    "best_lower",
    "best_method",
    "pop",
)


def _csv_row(r: BoundReport) -> list:
    return [
        str(r.m),
        fmt(r.p),
        fmt(r.rho),
        fmt(r.lower_001.value),
        fmt(r.lower_step4.value if r.lower_step4 else None),
        fmt(r.quotient.value),
        fmt(r.quotient.certified),
        fmt(r.quotient_interpolation.value if r.quotient_interpolation else None),
        fmt(r.norm_t2.upper),
        fmt(r.upper_known),
        fmt(r.best_lower),
        r.best_method,
        fmt(r.theorem_pop_holds),
    ]


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in reports:
        w.writerow(_csv_row(r))
    return buf.getvalue()


def reports_to_table(reports) -> str:
    rows = [list(CSV_COLUMNS)] + [_csv_row(r) for r in reports]
    widths = [max(len(row[i]) for row in rows) for i in range(len(CSV_COLUMNS))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(row, widths)).rstrip() for row in rows) + "\n"
