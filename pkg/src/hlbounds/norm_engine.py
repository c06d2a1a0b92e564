"""Operator norms of multilinear forms on products of l_p unit spheres.

Three kinds of result come out of here:

* certified upper bounds for the bilinear seed ``T_2`` at finite ``p >= 4``,
  from a Lipschitz-margin grid enclosure over two charts of the unit sphere;
* exact norms at ``p = inf`` by enumerating extreme points;
* lower bounds for arbitrary forms by alternating (block-coordinate) ascent.

The interpolation and recursion combiners lift ``T_2`` bounds to other
exponents and arities.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .closed_forms import STEP2_CONSTANT, dual_exponent
from .errors import CapExceededError, CertificationError, DomainError
from .forms import SparseMultilinearForm, evaluate, partial_coefficients, pnorm

__all__ = [
    "NormEstimate",
    "PlotSeries",
    "AscentResult",
    "LIPSCHITZ_T2",
    "eval_f",
    "eval_g",
    "eval_fg_p",
    "plot_series",
    "chart_objective",
    "norm_upper_T2p_certified",
    "norm_exact_linf",
    "alternating_ascent",
    "norm_lower_alternating",
    "norm_upper_interpolation",
    "norm_upper_recursion",
]

logger = logging.getLogger(__name__)

# |F(z) - F(z')| <= ||M(z - z')||_1 <= 2||z - z'||_1 <= 4|dx| on either chart.
LIPSCHITZ_T2 = 4.0
# Absolute allowance for floating-point error in one objective evaluation (F <= 2).
ROUNDING_SLACK = 1e-12
DEFAULT_MAX_GRID_POINTS = 2**25
_CHUNK = 2**20


@dataclass(frozen=True)
class NormEstimate:
    """A bracket ``lower <= ||A|| <= upper`` with provenance tags.

    ``certified_upper`` means the upper bound comes from an enclosure,
    extreme-point enumeration, or a proven combiner over certified inputs.
    ``conditional`` means it assumes real-scalar interpolation with constant 1.
    """

    lower: float
    upper: float
    method_lower: str
    method_upper: str
    certified_upper: bool
    conditional: bool = False

    def __post_init__(self):
        if not self.lower <= self.upper:
            raise ValueError(f"lower {self.lower!r} exceeds upper {self.upper!r}")

    @property
    def width(self) -> float:
        return self.upper - self.lower

    @property
    def center(self) -> float:
        return 0.5 * (self.lower + self.upper)


# ---------------------------------------------------------------------------
# The dualized objective for T_2 and its chart functions


def _check_unit(x):
    x = np.asarray(x, dtype=float)
    if np.any((x < 0) | (x > 1)) or np.any(np.isnan(x)):
        raise DomainError("x must lie in [0, 1]")
    return x


def _rpow(t, e):
    # real power of a possibly negative base, as in t^(4/3) = (t^(1/3))^4
    return np.abs(t) ** e


def eval_fg_p(x, p: float):
    """Return ``(f(x), g(x))`` for exponent ``p`` (dual exponent ``p*``).

    With ``y = (1 - x^p)^(1/p)``::

        f(x) = ((x + y)^p* + (y - x)^p*)^(1/p*)
        g(x) = ((x + y)^p* + (x - y)^p*)^(1/p*)

    ``f`` is the objective on ``[0, 2^(-1/p)]`` and ``g`` on ``[2^(-1/p), 1]``;
    both are evaluated on the whole interval.
    """
    x = _check_unit(x)
    q = dual_exponent(p)
    y = (1.0 - x**p) ** (1.0 / p)
    s = _rpow(x + y, q)
    f = (s + _rpow(y - x, q)) ** (1.0 / q)
    g = (s + _rpow(x - y, q)) ** (1.0 / q)
    if f.ndim == 0:
        return float(f), float(g)
    return f, g


def eval_f(x):
    """``f`` at ``p = 4``."""
    return eval_fg_p(x, 4.0)[0]


def eval_g(x):
    """``g`` at ``p = 4``."""
    return eval_fg_p(x, 4.0)[1]


@dataclass
class PlotSeries:
    p: float
    split: float
    x: np.ndarray
    f: np.ndarray
    g: np.ndarray
    domain: list = field(default_factory=list)

    def to_csv(self) -> str:
        rows = ["x,f,g,domain"]
        for xi, fi, gi, d in zip(self.x, self.f, self.g, self.domain):
            rows.append(f"{xi:.15g},{fi:.15g},{gi:.15g},{d}")
        return "\n".join(rows) + "\n"


def plot_series(p: float = 4.0, samples: int = 200) -> PlotSeries:
    """Sample ``f`` and ``g`` at ``samples + 1`` equispaced points plus the split point."""
    if samples < 1:
        raise DomainError("samples must be >= 1")
    split = 2.0 ** (-1.0 / p)
    x = np.linspace(0.0, 1.0, samples + 1)
    if not np.any(x == split):
        x = np.sort(np.append(x, split))
    f, g = eval_fg_p(x, p)
    domain = ["split" if xi == split else ("f" if xi < split else "g") for xi in x]
    return PlotSeries(p=p, split=split, x=x, f=f, g=g, domain=domain)


def chart_objective(x, p: float, chart: int = 1):
    """``||(a + b, a - b)||_p*`` at the sphere point given by chart coordinate ``x``.

    Chart 1 is ``(x, y(x))`` and chart 2 is ``(y(x), x)`` with
    ``y(x) = (1 - x^p)^(1/p)``, both for ``x`` in ``[0, 2^(-1/p)]`` where
    ``|y'| <= 1``.
    """
    x = np.asarray(x, dtype=float)
    q = dual_exponent(p)
    y = (1.0 - x**p) ** (1.0 / p)
    a, b = (x, y) if chart == 1 else (y, x)
    return (np.abs(a + b) ** q + np.abs(a - b) ** q) ** (1.0 / q)


def _dyadic_level_maxima(p, chart, levels, split):
    """Max of the chart objective on nested dyadic grids ``i * split / 2^k``, ``k <= levels``."""
    n = 2**levels
    best = np.full(levels + 1, -np.inf)
    for start in range(0, n + 1, _CHUNK):
        i = np.arange(start, min(start + _CHUNK, n + 1))
        vals = chart_objective((i * split) / n, p, chart)
        for k in range(levels + 1):
            stride = 2 ** (levels - k)
            sub = vals[(-start) % stride :: stride]
            if sub.size:
                best[k] = max(best[k], sub.max())
    return best


def norm_upper_T2p_certified(
    p: float, target_gap: float = 1e-4, max_points: int = DEFAULT_MAX_GRID_POINTS
) -> NormEstimate:
    """Certified bracket for ``||T_2||`` on ``l_p^2 x l_p^2``, finite ``p >= 4``.

    Dualizing the second slot reduces the norm to the supremum of
    ``||(a + b, a - b)||_p*`` over the nonnegative quadrant of the unit
    ``p``-sphere. Each of the two charts is swept on nested dyadic grids of
    step ``h``; a point of the chart is within ``h/2`` of a grid node, so
    ``grid max + 4 * h/2`` bounds the chart supremum. The upper bound is the
    least such value over all levels, which makes it nonincreasing in the
    requested gap. The lower bound is the best grid value.
    """
    p = float(p)
    if math.isinf(p) or not p >= 4:
        raise DomainError(f"certified T_2 bound needs finite p >= 4, got {p!r}")
    if not target_gap > 2 * ROUNDING_SLACK:
        raise DomainError(f"target_gap must exceed {2 * ROUNDING_SLACK:g}, got {target_gap!r}")
    split = 2.0 ** (-1.0 / p)

    def margin(k):
        return LIPSCHITZ_T2 * (split / 2**k) / 2 + ROUNDING_SLACK

    levels = 0
    while margin(levels) > target_gap:
        levels += 1
    if 2 * (2**levels + 1) > max_points:
        raise CertificationError(
            f"gap {target_gap:g} at p={p:g} needs {2 * (2**levels + 1)} grid points (cap {max_points})"
        )
    best = np.maximum(
        _dyadic_level_maxima(p, 1, levels, split), _dyadic_level_maxima(p, 2, levels, split)
    )
    uppers = best + np.array([margin(k) for k in range(levels + 1)])
    lower = float(best[-1])
    upper = float(uppers.min())
    logger.debug("T_2 enclosure p=%g levels=%d lower=%.15g upper=%.15g", p, levels, lower, upper)
    return NormEstimate(
        lower=lower,
        upper=upper,
        method_lower="chart-grid",
        method_upper="chart-grid+lipschitz",
        certified_upper=True,
    )


# ---------------------------------------------------------------------------
# p = infinity: extreme points


def norm_exact_linf(form: SparseMultilinearForm, cap: int = 2**24) -> float:
    """Exact norm on ``l_inf`` spheres by enumerating sign vectors.

    The slot with the largest dimension is dualized (its optimum given the
    others is the l_1 norm of the coefficient vector). One sign is fixed
    because flipping a whole slot only flips the sign of the form.
    """
    free = int(np.argmax(form.dims))
    others = [k for k in range(form.arity) if k != free]
    n_bits = sum(form.dims[k] for k in others)
    count = 2 ** max(n_bits - 1, 0)
    if count > cap:
        raise CapExceededError(f"{count} sign patterns exceed the enumeration cap {cap}")
    if form.nnz == 0:
        return 0.0
    offsets = np.cumsum([0] + [form.dims[k] for k in others])[:-1]
    # column of the packed sign vector used by each entry in each enumerated slot
    cols = [offsets[i] + form.indices[:, k] for i, k in enumerate(others)]
    onehot = np.zeros((form.nnz, form.dims[free]))
    onehot[np.arange(form.nnz), form.indices[:, free]] = 1.0
    vals = form.values.astype(float)
    chunk = max(1, min(count, 2**22 // max(form.nnz, n_bits, 1)))
    best = 0.0
    for start in range(0, count, chunk):
        codes = np.arange(start, min(start + chunk, count), dtype=np.int64)
        if n_bits:
            # bit 0 of the packed vector is pinned to +1
            bits = (codes[:, None] >> np.arange(n_bits - 1, dtype=np.int64)) & 1
            signs = np.concatenate([np.ones((len(codes), 1)), 1.0 - 2.0 * bits], axis=1)
        else:
            signs = np.ones((len(codes), 0))
        terms = np.broadcast_to(vals, (len(codes), form.nnz)).copy()
        for c in cols:
            terms *= signs[:, c]
        coeff = terms @ onehot
        best = max(best, float(np.abs(coeff).sum(axis=1).max()))
    return best


# ---------------------------------------------------------------------------
# Alternating ascent


@dataclass
class AscentResult:
    value: float
    point: list
    history: list
    run_values: list


def _norming_vector(c: np.ndarray, p: float, previous: np.ndarray) -> np.ndarray:
    """Unit vector ``x`` in l_p with ``<c, x> = ||c||_p*``."""
    if not np.any(c):
        return previous
    if math.isinf(p):
        return np.where(c >= 0, 1.0, -1.0)
    if p == 1:
        x = np.zeros_like(c)
        j = int(np.argmax(np.abs(c)))
        x[j] = math.copysign(1.0, c[j])
        return x
    q = dual_exponent(p)
    a = np.abs(c) / np.abs(c).max()
    x = np.sign(c) * a ** (q - 1.0)
    return x / pnorm(x, p)


def _random_unit(rng, d, p):
    x = rng.standard_normal(d)
    if math.isinf(p):
        return x / np.abs(x).max()
    return x / pnorm(x, p)


def _feasible_value(form, xs, p):
    scale = math.prod(pnorm(x, p) for x in xs)
    return abs(evaluate(form, xs)) / scale if scale > 0 else 0.0


def alternating_ascent(
    form: SparseMultilinearForm,
    p: float,
    restarts: int = 32,
    tol: float = 1e-10,
    seed: int = 0,
    max_iter: int = 1000,
) -> AscentResult:
    """Multistart block-coordinate ascent for ``sup |A(x1, ..., xm)|`` on l_p spheres.

    Restart ``r`` draws from ``numpy.random.default_rng([seed, r])``, so each
    run is reproducible on its own. ``history`` is the per-sweep objective of
    the best run.
    """
    p = float(p)
    if not p >= 1:
        raise DomainError(f"p must be >= 1, got {p!r}")
    if restarts < 1:
        raise DomainError("restarts must be >= 1")
    best = None
    run_values = []
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        xs = [_random_unit(rng, d, p) for d in form.dims]
        value = _feasible_value(form, xs, p)
        history = [value]
        for _ in range(max_iter):
            for k in range(form.arity):
                c = partial_coefficients(form, xs, k)
                xs[k] = _norming_vector(c, p, xs[k])
            new = _feasible_value(form, xs, p)
            history.append(new)
            done = new - value <= tol * max(new, 1e-300)
            value = max(value, new)
            if done:
                break
        run_values.append(value)
        if best is None or value > best.value:
            best = AscentResult(value=value, point=[x.copy() for x in xs], history=history, run_values=run_values)
    best.run_values = run_values
    return best


def norm_lower_alternating(
    form: SparseMultilinearForm, p: float, restarts: int = 32, tol: float = 1e-10, seed: int = 0
) -> float:
    """Lower bound on ``||form||`` on l_p spheres: the best value found by alternating ascent."""
    return alternating_ascent(form, p, restarts=restarts, tol=tol, seed=seed).value


# ---------------------------------------------------------------------------
# Combiners


def norm_upper_interpolation(p: float) -> NormEstimate:
    """``1.74^(4/p) * 2^((p-4)/p)``: interpolate between ``p = 4`` and ``p = inf``.

    Valid only if real-scalar interpolation holds with constant 1, so the
    result is flagged conditional and never certified. The lower end is the
    value at the basis vector ``e_1``, ``2^(1 - 1/p)``.
    """
    p = float(p)
    if math.isinf(p) or not p > 4:
        raise DomainError(f"interpolation needs finite p > 4, got {p!r}")
    theta = (p - 4.0) / p
    upper = float(STEP2_CONSTANT) ** (1.0 - theta) * 2.0**theta
    return NormEstimate(
        lower=2.0 ** (1.0 - 1.0 / p),
        upper=upper,
        method_lower="basis-point",
        method_upper="interpolation",
        certified_upper=False,
        conditional=True,
    )


def norm_upper_recursion(m: int, t2_upper: NormEstimate) -> NormEstimate:
    """Lift a ``T_2`` bracket to ``T_m``: ``||T_m|| <= 2^(m-2) ||T_2||``.

    The lower end carries over unchanged since ``T_{m-1}`` embeds in ``T_m``.
    """
    if m < 2:
        raise DomainError(f"m must be >= 2, got {m}")
    if m == 2:
        return t2_upper
    return NormEstimate(
        lower=t2_upper.lower,
        upper=2.0 ** (m - 2) * t2_upper.upper,
        method_lower=f"{t2_upper.method_lower}+embedding",
        method_upper=f"{t2_upper.method_upper}+recursion",
        certified_upper=t2_upper.certified_upper,
        conditional=t2_upper.conditional,
    )
