"""Concrete realizations of a unital operator algebra.

Three realizations back the metric catalog: real 2x2 matrices, real-valued
functions sampled on a fixed grid, and plain scalars.  Elements are immutable
and every operation is a pure function, so values can be shared freely across
threads.  Positivity, the cone partial order, square roots, and the
``(I - a)^-1`` resolvent are computed in closed form (2x2 eigenvalues from
trace and determinant); nothing here needs an iterative eigensolver.

Two norms are available because the matrix examples this library reproduces
use the entry-sum-of-squares (Frobenius) norm, which is *not* a C*-norm
(``||I|| = sqrt(2)``).  Operations that rely on the C*-identity always take
the operator norm; callers choose the display norm explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any

import numpy as np

MAT2 = "mat2"
SAMPLED = "sampled"
SCALAR = "scalar"

#: Absolute tolerance on eigenvalues/samples when deciding positivity.
#: Eigensolvers routinely report -1e-16-scale noise on PSD inputs.
DEFAULT_TOL = 1e-9


class AlgebraError(Exception):
    """Base class for errors raised by algebra operations."""


class RealizationMismatch(AlgebraError):
    """Operands live in different realizations or on different grids."""


class NotSelfAdjoint(AlgebraError):
    """Operation requires a self-adjoint element."""


class NotPositive(AlgebraError):
    """Operation requires a positive element."""


class PreconditionNormTooLarge(AlgebraError):
    """Norm precondition of the resolvent inverse is violated."""


class NormKind(Enum):
    """Norm selector.

    OPERATOR is the C*-norm: largest singular value for matrices, sup of
    absolute samples for sampled functions, absolute value for scalars.
    ENTRY_SUM_SQUARES is the Frobenius-style root of summed squared entries.
    """

    OPERATOR = "operator"
    ENTRY_SUM_SQUARES = "entry-sum-squares"


class OrderKind(Enum):
    """Partial order selector.

    POSITIVE_CONE compares through the positive cone: ``a <= b`` iff ``b - a``
    has all eigenvalues (matrices) or samples (functions, scalars) above
    ``-tol``.  ENTRYWISE is the matrix-entry order ``b_i >= a_i >= 0`` and is
    defined for 2x2 matrices only.
    """

    POSITIVE_CONE = "cone"
    ENTRYWISE = "entrywise"


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """One element of a concrete realization.

    ``data`` holds the payload: shape (2, 2) for matrices, a 1-D sample
    vector for sampled functions (with ``grid`` giving the sample sites),
    and a 0-d array for scalars.  Arrays are copied and frozen on
    construction; all entries must be finite and grids strictly increasing
    with at least two points.
    """

    realization: str
    data: np.ndarray
    grid: np.ndarray | None = None

    def __post_init__(self) -> None:
        data = np.array(self.data, dtype=float)
        if self.realization == MAT2:
            if data.shape != (2, 2):
                raise ValueError(f"mat2 payload must be 2x2, got {data.shape}")
            if self.grid is not None:
                raise ValueError("mat2 elements carry no grid")
        elif self.realization == SAMPLED:
            if self.grid is None:
                raise ValueError("sampled elements need a grid")
            grid = np.array(self.grid, dtype=float)
            if grid.ndim != 1 or grid.size < 2:
                raise ValueError("grid must be 1-D with at least two points")
            if not np.all(np.isfinite(grid)):
                raise ValueError("grid must be finite")
            if not np.all(np.diff(grid) > 0):
                raise ValueError("grid must be strictly increasing")
            if data.shape != grid.shape:
                raise ValueError("values and grid must have matching length")
            grid.setflags(write=False)
            object.__setattr__(self, "grid", grid)
        elif self.realization == SCALAR:
            if data.shape != ():
                raise ValueError("scalar payload must be a single value")
            if self.grid is not None:
                raise ValueError("scalar elements carry no grid")
        else:
            raise ValueError(f"unknown realization {self.realization!r}")
        if not np.all(np.isfinite(data)):
            raise ValueError("payload must be finite (no NaN/Inf)")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        return add(self, other)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return sub(self, other)

    def __mul__(self, other: "AlgebraElement") -> "AlgebraElement":
        return mul(self, other)

    def __repr__(self) -> str:
        if self.realization == SCALAR:
            return f"AlgebraElement(scalar {float(self.data)!r})"
        if self.realization == MAT2:
            return f"AlgebraElement(mat2 {self.data.tolist()!r})"
        return f"AlgebraElement(sampled, {self.data.size} points)"


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def mat2(m11: float, m12: float, m21: float, m22: float) -> AlgebraElement:
    return AlgebraElement(MAT2, np.array([[m11, m12], [m21, m22]]))


def diag2(d1: float, d2: float) -> AlgebraElement:
    return mat2(d1, 0.0, 0.0, d2)


def sampled(grid: Any, values: Any) -> AlgebraElement:
    return AlgebraElement(SAMPLED, np.asarray(values, dtype=float), np.asarray(grid, dtype=float))


def scalar(value: float) -> AlgebraElement:
    return AlgebraElement(SCALAR, np.asarray(float(value)))


def zero_like(a: AlgebraElement) -> AlgebraElement:
    return AlgebraElement(a.realization, np.zeros_like(a.data), a.grid)


def identity_like(a: AlgebraElement) -> AlgebraElement:
    if a.realization == MAT2:
        return AlgebraElement(MAT2, np.eye(2))
    return AlgebraElement(a.realization, np.ones_like(a.data), a.grid)


# ---------------------------------------------------------------------------
# closed-form 2x2 helpers
# ---------------------------------------------------------------------------

def _sym2_eigvals(m: np.ndarray) -> tuple[float, float]:
    """Eigenvalues (low, high) of a symmetric 2x2 matrix."""
    half_tr = 0.5 * (m[0, 0] + m[1, 1])
    disc = math.hypot(0.5 * (m[0, 0] - m[1, 1]), m[0, 1])
    return half_tr - disc, half_tr + disc


def _sym2_rotation(m: np.ndarray) -> tuple[float, float]:
    """Cosine/sine of the rotation whose first column is the eigenvector
    of the *high* eigenvalue."""
    theta = 0.5 * math.atan2(2.0 * m[0, 1], m[0, 0] - m[1, 1])
    return math.cos(theta), math.sin(theta)


def _op_norm_mat2(m: np.ndarray) -> float:
    _, hi = _sym2_eigvals(m.T @ m)
    return math.sqrt(max(hi, 0.0))


def _inv_mat2(m: np.ndarray) -> np.ndarray:
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if det == 0.0:
        raise ZeroDivisionError("singular 2x2 matrix")
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]]) / det


def _require_same_space(a: AlgebraElement, b: AlgebraElement) -> None:
    if a.realization != b.realization:
        raise RealizationMismatch(
            f"cannot combine {a.realization!r} with {b.realization!r}")
    if a.realization == SAMPLED and not np.array_equal(a.grid, b.grid):
        raise RealizationMismatch("sampled elements live on different grids")


def _require_self_adjoint(a: AlgebraElement, tol: float) -> None:
    if a.realization == MAT2:
        skew = abs(a.data[0, 1] - a.data[1, 0])
        if skew > tol * (1.0 + float(np.max(np.abs(a.data)))):
            raise NotSelfAdjoint(f"matrix is not symmetric (skew {skew:.3e})")
    # sampled functions and scalars are real-valued, hence self-adjoint


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def add(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Componentwise sum of two elements of the same realization."""
    _require_same_space(a, b)
    return AlgebraElement(a.realization, a.data + b.data, a.grid)


def sub(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    _require_same_space(a, b)
    return AlgebraElement(a.realization, a.data - b.data, a.grid)


def scale(a: AlgebraElement, c: float) -> AlgebraElement:
    return AlgebraElement(a.realization, float(c) * a.data, a.grid)


def mul(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Algebra product: matrix product for mat2, pointwise otherwise."""
    _require_same_space(a, b)
    if a.realization == MAT2:
        return AlgebraElement(MAT2, a.data @ b.data)
    return AlgebraElement(a.realization, a.data * b.data, a.grid)


def adjoint(a: AlgebraElement) -> AlgebraElement:
    """Involution: transpose for matrices, identity for the real-valued rest."""
    if a.realization == MAT2:
        return AlgebraElement(MAT2, a.data.T.copy())
    return a


def norm(a: AlgebraElement, kind: NormKind = NormKind.OPERATOR) -> float:
    if kind is NormKind.OPERATOR:
        if a.realization == MAT2:
            return _op_norm_mat2(a.data)
        return float(np.max(np.abs(a.data))) if a.data.ndim else abs(float(a.data))
    if a.realization == SCALAR:
        return abs(float(a.data))
    return float(math.sqrt(np.sum(a.data * a.data)))


def min_spectrum(a: AlgebraElement, tol: float = DEFAULT_TOL) -> float:
    """Smallest eigenvalue (mat2) or smallest sample/value otherwise.

    Requires a self-adjoint input; the matrix check allows skew up to
    ``tol`` relative to the largest entry.
    """
    _require_self_adjoint(a, tol)
    if a.realization == MAT2:
        sym = 0.5 * (a.data + a.data.T)
        lo, _ = _sym2_eigvals(sym)
        return lo
    return float(np.min(a.data)) if a.data.ndim else float(a.data)


def is_positive(a: AlgebraElement, tol: float = DEFAULT_TOL) -> bool:
    """True iff the element lies in the positive cone, up to ``tol``."""
    return min_spectrum(a, tol) >= -tol


def leq(a: AlgebraElement, b: AlgebraElement,
        order: OrderKind = OrderKind.POSITIVE_CONE,
        tol: float = DEFAULT_TOL) -> bool:
    """Partial-order comparison ``a <= b`` in the chosen order."""
    _require_same_space(a, b)
    if order is OrderKind.ENTRYWISE:
        if a.realization != MAT2:
            raise RealizationMismatch("entrywise order is defined for mat2 only")
        return bool(np.all(b.data >= a.data - tol) and np.all(a.data >= -tol))
    _require_self_adjoint(a, tol)
    _require_self_adjoint(b, tol)
    return is_positive(sub(b, a), tol)


def sqrt_positive(a: AlgebraElement, tol: float = DEFAULT_TOL) -> AlgebraElement:
    """Positive square root of a positive element.

    Matrices go through the closed-form eigendecomposition; sampled
    functions and scalars take pointwise roots.  Eigenvalues/samples in
    ``[-tol, 0)`` are clipped to zero.
    """
    if not is_positive(a, tol):
        raise NotPositive("square root requires a positive element")
    if a.realization == MAT2:
        sym = 0.5 * (a.data + a.data.T)
        lo, hi = _sym2_eigvals(sym)
        c, s = _sym2_rotation(sym)
        s_hi = math.sqrt(max(hi, 0.0))
        s_lo = math.sqrt(max(lo, 0.0))
        v_hi = np.array([c, s])
        v_lo = np.array([-s, c])
        root = s_hi * np.outer(v_hi, v_hi) + s_lo * np.outer(v_lo, v_lo)
        return AlgebraElement(MAT2, root)
    return AlgebraElement(a.realization, np.sqrt(np.clip(a.data, 0.0, None)), a.grid)


def _inverse_one_minus_unchecked(a: AlgebraElement) -> AlgebraElement:
    one = identity_like(a)
    if a.realization == MAT2:
        inv = _inv_mat2(np.eye(2) - a.data)
        result = AlgebraElement(MAT2, inv)
    else:
        result = AlgebraElement(a.realization, 1.0 / (one.data - a.data), a.grid)
    residual = mul(sub(one, a), result)
    if norm(sub(residual, one), NormKind.OPERATOR) > 1e-10 * (1.0 + norm(result)):
        raise ArithmeticError("resolvent inverse failed its identity check")
    return result


def inverse_one_minus(a: AlgebraElement, tol: float = DEFAULT_TOL) -> AlgebraElement:
    """Resolvent ``(I - a)^-1`` for positive ``a`` with operator norm < 1/2.

    The norm gate keeps the product ``a (I - a)^-1`` inside the open unit
    ball, which downstream rate bounds rely on.
    """
    if not is_positive(a, tol):
        raise NotPositive("resolvent inverse requires a positive element")
    if norm(a, NormKind.OPERATOR) >= 0.5:
        raise PreconditionNormTooLarge(
            "operator norm must be below 1/2 for the resolvent inverse")
    return _inverse_one_minus_unchecked(a)


def is_diagonal(a: AlgebraElement, tol: float = 0.0) -> bool:
    """True for scalars, sampled functions, and (near-)diagonal matrices.

    These are exactly the realizations whose elements commute with each
    other, which some certificate regimes require structurally.
    """
    if a.realization != MAT2:
        return True
    return abs(a.data[0, 1]) <= tol and abs(a.data[1, 0]) <= tol


def allclose(a: AlgebraElement, b: AlgebraElement, tol: float = 1e-12) -> bool:
    _require_same_space(a, b)
    return bool(np.all(np.abs(a.data - b.data) <= tol))


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def element_to_json(a: AlgebraElement) -> dict:
    if a.realization == MAT2:
        return {"realization": "mat2", "entries": a.data.tolist()}
    if a.realization == SAMPLED:
        return {"realization": "sampled", "grid": a.grid.tolist(),
                "values": a.data.tolist()}
    return {"realization": "scalar", "value": float(a.data)}


def element_from_json(obj: dict) -> AlgebraElement:
    kind = obj.get("realization")
    if kind == "mat2":
        return AlgebraElement(MAT2, np.asarray(obj["entries"], dtype=float))
    if kind == "sampled":
        return sampled(obj["grid"], obj["values"])
    if kind == "scalar":
        return scalar(obj["value"])
    raise ValueError(f"unknown realization in JSON payload: {kind!r}")
