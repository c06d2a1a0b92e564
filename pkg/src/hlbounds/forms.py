"""Sparse m-linear forms on products of finite-dimensional l_p spaces.

Indices are 1-based in the public API (``coeffs`` keys, text dumps) and
0-based in the packed numpy arrays used for evaluation.
"""

from __future__ import annotations

import math
from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from .errors import CapExceededError, DomainError

__all__ = [
    "SparseMultilinearForm",
    "VectorP",
    "DEFAULT_TM_CAP",
    "make_T2",
    "make_Tm",
    "backward_shift",
    "evaluate",
    "hl_sum",
    "tm_hl_sum",
    "dumps",
    "loads",
]

DEFAULT_TM_CAP = 12


class SparseMultilinearForm:
    """Immutable coefficient tensor of an m-linear form, stored sparsely.

    Parameters
    ----------
    dims : sequence of int
        Dimension of each argument slot; its length is the arity.
    coeffs : mapping from index tuple to float, optional
        1-based index tuples. Zero coefficients are dropped.
    """

    __slots__ = ("_dims", "_idx", "_vals")

    def __init__(self, dims: Sequence[int], coeffs: Mapping[tuple, float] | None = None):
        dims = tuple(int(d) for d in dims)
        if not dims or any(d < 1 for d in dims):
            raise DomainError(f"dims must be a non-empty sequence of positive ints, got {dims}")
        coeffs = coeffs or {}
        keys = []
        vals = []
        for key, v in coeffs.items():
            key = tuple(int(j) for j in key)
            if len(key) != len(dims):
                raise DomainError(f"index {key} does not match arity {len(dims)}")
            if any(not 1 <= j <= d for j, d in zip(key, dims)):
                raise DomainError(f"index {key} out of range for dims {dims}")
            v = float(v)
            if v != 0.0:
                keys.append(key)
                vals.append(v)
        idx = np.array(keys, dtype=np.int64).reshape(len(keys), len(dims)) - 1
        self._init_packed(dims, idx, np.array(vals, dtype=float))

    def _init_packed(self, dims, idx, vals):
        keep = vals != 0.0
        idx, vals = idx[keep], vals[keep]
        order = np.lexsort(idx.T[::-1]) if len(vals) else np.arange(0)
        idx = np.ascontiguousarray(idx[order])
        vals = np.ascontiguousarray(vals[order])
        if len(vals) > 1 and not np.any(np.diff(idx, axis=0), axis=1).all():
            raise DomainError("duplicate index tuples")
        idx.setflags(write=False)
        vals.setflags(write=False)
        self._dims = dims
        self._idx = idx
        self._vals = vals

    @classmethod
    def from_arrays(cls, dims, indices, values) -> "SparseMultilinearForm":
        """Build from 0-based index rows ``indices`` (nnz x arity) and ``values``."""
        self = cls.__new__(cls)
        dims = tuple(int(d) for d in dims)
        indices = np.asarray(indices, dtype=np.int64).reshape(-1, len(dims))
        values = np.asarray(values, dtype=float).ravel()
        if len(values) != len(indices):
            raise DomainError("indices and values differ in length")
        if len(values) and ((indices < 0).any() or (indices >= np.array(dims)).any()):
            raise DomainError(f"indices out of range for dims {dims}")
        self._init_packed(dims, indices, values)
        return self

    @property
    def arity(self) -> int:
        return len(self._dims)

    @property
    def dims(self) -> tuple:
        return self._dims

    @property
    def nnz(self) -> int:
        return len(self._vals)

    @property
    def indices(self) -> np.ndarray:
        """0-based index rows, lexicographically sorted (read-only)."""
        return self._idx

    @property
    def values(self) -> np.ndarray:
        return self._vals

    @property
    def coeffs(self) -> dict:
        """Coefficients keyed by 1-based index tuples, in sorted order."""
        return dict(self.items())

    def items(self) -> Iterator[tuple[tuple, float]]:
        for row, v in zip(self._idx.tolist(), self._vals.tolist()):
            yield tuple(j + 1 for j in row), v

    def __eq__(self, other):
        if not isinstance(other, SparseMultilinearForm):
            return NotImplemented
        return (
            self._dims == other._dims
            and np.array_equal(self._idx, other._idx)
            and np.array_equal(self._vals, other._vals)
        )

    __hash__ = None

    def __repr__(self):
        return f"SparseMultilinearForm(dims={self._dims}, nnz={self.nnz})"

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self._dims)
        out[tuple(self._idx.T)] = self._vals
        return out


@dataclass(frozen=True)
class VectorP:
    """A coordinate vector together with the exponent of the norm it is measured in."""

    coords: tuple
    p: float = math.inf

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(float(c) for c in self.coords))
        if not float(self.p) >= 1:
            raise DomainError(f"p must be >= 1, got {self.p!r}")
        object.__setattr__(self, "p", float(self.p))

    def __len__(self):
        return len(self.coords)

    def __getitem__(self, j):
        return self.coords[j]

    def norm(self) -> float:
        return pnorm(self.coords, self.p)

    def as_array(self) -> np.ndarray:
        return np.array(self.coords, dtype=float)


def pnorm(x, p: float) -> float:
    x = np.abs(np.asarray(x, dtype=float))
    if x.size == 0:
        return 0.0
    if math.isinf(p):
        return float(x.max())
    scale = x.max()
    if scale == 0.0:
        return 0.0
    return float(scale * np.sum((x / scale) ** p) ** (1.0 / p))


def backward_shift(v: VectorP, k: int) -> VectorP:
    """Shift coordinates ``k`` places toward the front, padding with zeros."""
    if k < 0:
        raise DomainError(f"shift must be nonnegative, got {k}")
    n = len(v)
    tail = v.coords[k:] if k < n else ()
    return VectorP(tail + (0.0,) * (n - len(tail)), v.p)


def make_T2() -> SparseMultilinearForm:
    """The bilinear seed ``x1 y1 + x1 y2 + x2 y1 - x2 y2`` on 2 x 2."""
    return SparseMultilinearForm((2, 2), {(1, 1): 1, (1, 2): 1, (2, 1): 1, (2, 2): -1})


def make_Tm(m: int, cap: int = DEFAULT_TM_CAP) -> SparseMultilinearForm:
    """Recursive extremal form of arity ``m`` on ``(2^(m-1))^m``.

    ``T_m(x1..xm) = (xm_1 + xm_2) T_{m-1}(head) + (xm_1 - xm_2) T_{m-1}(shifted)``,
    where ``head`` keeps the first ``2^(m-2)`` coordinates of slots ``1..m-1``
    and ``shifted`` takes the next ``2^(m-2)``. The two copies have disjoint
    support, so ``T_m`` has exactly ``4^(m-1)`` coefficients, all ``+-1``.
    """
    if m < 2:
        raise DomainError(f"m must be >= 2, got {m}")
    if m > cap:
        raise CapExceededError(f"make_Tm({m}) exceeds cap {cap} ({4 ** (m - 1)} nonzeros)")
    seed = make_T2()
    idx = seed.indices.astype(np.int32)
    vals = seed.values.astype(np.int8)
    for k in range(3, m + 1):
        half = 2 ** (k - 2)
        nnz = len(vals)
        new_idx = np.empty((4 * nnz, k), dtype=np.int32)
        new_vals = np.empty(4 * nnz, dtype=np.int8)
        # blocks: (head, last=1) +, (head, last=2) +, (shift, last=1) +, (shift, last=2) -
        for b, (offset, last, sign) in enumerate(((0, 0, 1), (0, 1, 1), (half, 0, 1), (half, 1, -1))):
            sl = slice(b * nnz, (b + 1) * nnz)
            new_idx[sl, :-1] = idx + offset
            new_idx[sl, -1] = last
            new_vals[sl] = sign * vals
        idx, vals = new_idx, new_vals
    dim = 2 ** (m - 1)
    return SparseMultilinearForm.from_arrays((dim,) * m, idx, vals)


def _as_arrays(form: SparseMultilinearForm, args) -> list:
    if len(args) != form.arity:
        raise DomainError(f"expected {form.arity} arguments, got {len(args)}")
    out = []
    for k, a in enumerate(args):
        a = a.as_array() if isinstance(a, VectorP) else np.asarray(a, dtype=float)
        if a.shape != (form.dims[k],):
            raise DomainError(f"argument {k + 1} has shape {a.shape}, expected ({form.dims[k]},)")
        out.append(a)
    return out


def evaluate(form: SparseMultilinearForm, args: Sequence) -> float:
    """Value of the form at the given argument vectors."""
    xs = _as_arrays(form, args)
    if form.nnz == 0:
        return 0.0
    terms = form.values.astype(float)
    for k, x in enumerate(xs):
        terms = terms * x[form.indices[:, k]]
    return float(terms.sum())


def partial_coefficients(form: SparseMultilinearForm, args: Sequence, slot: int) -> np.ndarray:
    """Coefficient vector of the linear map left after fixing every slot but ``slot``.

    The entry ``args[slot]`` is ignored.
    """
    terms = form.values.astype(float)
    for k in range(form.arity):
        if k != slot:
            x = np.asarray(args[k], dtype=float)
            terms = terms * x[form.indices[:, k]]
    return np.bincount(form.indices[:, slot], weights=terms, minlength=form.dims[slot])


def hl_sum(form: SparseMultilinearForm, rho: float) -> float:
    """``(sum |a_j|^rho)^(1/rho)`` over the stored coefficients."""
    if not rho >= 1:
        raise DomainError(f"rho must be >= 1, got {rho!r}")
    return pnorm(form.values, rho)


def tm_hl_sum(m: int, rho: float) -> float:
    """HL sum of ``make_Tm(m)`` without building it: ``4^(m-1)`` unit entries."""
    return 4.0 ** ((m - 1) / rho)


def _fmt_coeff(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else format(v, ".17g")


def dumps(form: SparseMultilinearForm) -> str:
    """Canonical text: a ``# dims`` header, then ``j_1 ... j_m coefficient`` lines, sorted."""
    lines = ["# dims " + " ".join(str(d) for d in form.dims)]
    for key, v in form.items():
        lines.append(" ".join(str(j) for j in key) + " " + _fmt_coeff(v))
    return "\n".join(lines) + "\n"


def loads(text: str) -> SparseMultilinearForm:
    """Parse :func:`dumps` output. Without a ``# dims`` header, dims are the max index per slot."""
    dims = None
    coeffs = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if parts and parts[0] == "dims":
                dims = tuple(int(t) for t in parts[1:])
            continue
        parts = line.split()
        if len(parts) < 2:
            raise DomainError(f"line {lineno}: expected indices and a coefficient")
        try:
            key = tuple(int(t) for t in parts[:-1])
            coeffs[key] = coeffs.get(key, 0.0) + float(parts[-1])
        except ValueError as exc:
            raise DomainError(f"line {lineno}: {exc}") from None
    if dims is None:
        if not coeffs:
            raise DomainError("empty form without a dims header")
        arity = len(next(iter(coeffs)))
        dims = tuple(max(k[s] for k in coeffs) for s in range(arity))
    return SparseMultilinearForm(dims, coeffs)
