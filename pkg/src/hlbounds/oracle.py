"""Brute-force reference computations used to validate the fast paths.

Nothing here is on the CLI's default path; the test suite runs these
against :mod:`hlbounds.forms` and :mod:`hlbounds.norm_engine`.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
import sympy

from .errors import CapExceededError, DomainError
from .forms import SparseMultilinearForm, pnorm

__all__ = ["sphere_grid", "brute_norm_grid", "expand_Tm_reference"]

DEFAULT_GRID_CAP = 10**8


def sphere_grid(d: int, p: float, resolution: float) -> np.ndarray:
    """Points of the unit l_p sphere in R^d from the surface of a cube grid.

    Cube grid nodes ``-1 + i * resolution`` with sup-norm 1 are radially
    projected onto the sphere. Halving ``resolution`` gives a superset.
    """
    n = 2.0 / resolution
    steps = round(n)
    if steps < 1 or abs(n - steps) > 1e-9 * n:
        raise DomainError(f"2 / resolution must be a positive integer, got {n!r}")
    ticks = -1.0 + 2.0 * np.arange(steps + 1) / steps
    pts = np.array(list(itertools.product(ticks, repeat=d)))
    pts = pts[np.abs(pts).max(axis=1) == 1.0]
    if math.isinf(p):
        return pts
    return pts / np.array([pnorm(x, p) for x in pts])[:, None]


def brute_norm_grid(
    form: SparseMultilinearForm, p: float, resolution: float, cap: int = DEFAULT_GRID_CAP
) -> float:
    """Max of ``|form|`` over the product of per-slot sphere grids.

    A lower bound on the norm that increases to it as ``resolution -> 0``.
    """
    for d in form.dims:
        if (2.0 / resolution + 1) ** d > 50 * cap:
            raise CapExceededError("per-slot grid too large")
    grids = [sphere_grid(d, p, resolution) for d in form.dims]
    total = math.prod(len(g) for g in grids)
    if total > cap:
        raise CapExceededError(f"{total} grid points exceed the cap {cap}")
    dense = form.to_dense()
    rest = math.prod(len(g) for g in grids[1:])
    chunk = max(1, 2**22 // max(rest, 1))
    best = 0.0
    for start in range(0, len(grids[0]), chunk):
        t = np.tensordot(grids[0][start : start + chunk], dense, axes=(1, 0))
        # contract slot k's coordinate axis (axis k of t) with its grid
        for k, g in enumerate(grids[1:], start=1):
            t = np.moveaxis(np.tensordot(t, g, axes=(k, 1)), -1, k)
        best = max(best, float(np.abs(t).max()))
    return best


def _shift(v: list, k: int) -> list:
    return v[k:] + [0] * min(k, len(v))


def _t_symbolic(m: int, xs: list):
    if m == 2:
        x, y = xs
        return x[0] * y[0] + x[0] * y[1] + x[1] * y[0] - x[1] * y[1]
    last = xs[m - 1]
    head = xs[: m - 1]
    shifted = [_shift(v, 2 ** (m - 2)) for v in head]
    return (last[0] + last[1]) * _t_symbolic(m - 1, head) + (last[0] - last[1]) * _t_symbolic(m - 1, shifted)


def expand_Tm_reference(m: int) -> SparseMultilinearForm:
    """Build ``T_m`` by symbolic expansion of the defining recursion.

    Each slot is a vector of ``2^(m-1)`` symbols; the lower-arity form reads
    only the leading coordinates it needs, and the second copy sees the
    slots backward-shifted by ``2^(m-2)``.
    """
    if not 2 <= m <= 6:
        raise CapExceededError(f"symbolic expansion supports 2 <= m <= 6, got {m}")
    n = 2 ** (m - 1)
    syms = [[sympy.Symbol(f"x_{k}_{j}") for j in range(1, n + 1)] for k in range(1, m + 1)]
    where = {s: (k, j) for k, row in enumerate(syms) for j, s in enumerate(row, 1)}
    expr = sympy.expand(_t_symbolic(m, syms))
    coeffs = {}
    for mono, c in expr.as_coefficients_dict().items():
        key = [0] * m
        for s in mono.free_symbols:
            k, j = where[s]
            key[k] = j
        coeffs[tuple(key)] = int(c)
    return SparseMultilinearForm((n,) * m, coeffs)
