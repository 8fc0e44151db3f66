"""Problem data for max{<c, x> | Ax <= b, x >= 0} and the shared primitives.

An :class:`LpInstance` is one frozen snapshot of a (possibly time-varying)
linear program. Arrays are stored as read-only float64 copies so instances
can be handed to worker threads without defensive copying.
"""

from dataclasses import dataclass, field
from functools import cached_property
import json

import numpy as np


class ContractError(ValueError):
    """A caller violated an operation's precondition."""


class ParameterError(ValueError):
    """An algorithm parameter is outside its admissible range."""


class NumericalError(ArithmeticError):
    """Iterates left the finite floating point range."""


def _frozen_array(values, ndim, name):
    try:
        arr = np.array(values, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ContractError(f"{name}: not a numeric array ({exc})") from None
    if arr.ndim != ndim:
        raise ContractError(f"{name}: expected {ndim}-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ContractError(f"{name}: contains non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class LpInstance:
    """Dense LP snapshot ``max <c, x>  s.t.  A x <= b, x >= 0``.

    Parameters
    ----------
    A : array_like, shape (m, n)
        Constraint matrix, no zero rows.
    b : array_like, shape (m,)
        Right-hand side.
    c : array_like, shape (n,)
        Objective vector.
    nonneg_augmented : bool
        True when the last ``n`` rows of ``A`` are ``-x_j <= 0``, i.e. the
        sign constraints are part of the row system.
    """

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    nonneg_augmented: bool = False

    def __post_init__(self):
        A = _frozen_array(self.A, 2, "A")
        b = _frozen_array(self.b, 1, "b")
        c = _frozen_array(self.c, 1, "c")
        m, n = A.shape
        if m < 1 or n < 2:
            raise ContractError(f"A: need m >= 1 and n >= 2, got shape {A.shape}")
        if b.shape != (m,):
            raise ContractError(f"b: expected length {m}, got {b.shape[0]}")
        if c.shape != (n,):
            raise ContractError(f"c: expected length {n}, got {c.shape[0]}")
        zero_rows = np.flatnonzero(~np.any(A != 0.0, axis=1))
        if zero_rows.size:
            raise ContractError(f"A: zero row(s) at index {zero_rows.tolist()}")
        if self.nonneg_augmented:
            if m < n or not (np.array_equal(A[m - n:], -np.eye(n)) and np.all(b[m - n:] == 0.0)):
                raise ContractError("nonneg_augmented: last n rows are not -I x <= 0")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "nonneg_augmented", bool(self.nonneg_augmented))

    @property
    def m(self):
        return self.A.shape[0]

    @property
    def n(self):
        return self.A.shape[1]

    @cached_property
    def row_norms_sq(self):
        """Squared Euclidean norms of the rows, ``||a_i||^2``."""
        sq = np.einsum("ij,ij->i", self.A, self.A)
        sq.setflags(write=False)
        return sq

    def with_b(self, b):
        """Copy of this instance with a new right-hand side.

        If the new ``b`` moves the sign rows off zero they become ordinary
        rows and the flag is dropped, so ``x >= 0`` is again checked
        separately by :func:`is_feasible`.
        """
        b = np.asarray(b, dtype=np.float64)
        flag = self.nonneg_augmented and b.shape == self.b.shape and not np.any(b[self.m - self.n:])
        return LpInstance(self.A, b, self.c, flag)

    def objective(self, x):
        return float(np.dot(self.c, check_point(self, x)))

    def to_dict(self):
        return {
            "A": self.A.tolist(),
            "b": self.b.tolist(),
            "c": self.c.tolist(),
            "nonneg_augmented": self.nonneg_augmented,
        }

    @classmethod
    def from_dict(cls, data):
        """Build an instance from the JSON document layout.

        Missing or malformed fields raise :class:`ContractError` naming the
        offending field.
        """
        if not isinstance(data, dict):
            raise ContractError("instance: expected a JSON object")
        for key in ("A", "b", "c"):
            if key not in data:
                raise ContractError(f"{key}: missing field")
        flag = data.get("nonneg_augmented", False)
        if not isinstance(flag, bool):
            raise ContractError("nonneg_augmented: expected true/false")
        return cls(data["A"], data["b"], data["c"], flag)


def load_instance(path):
    with open(path, encoding="utf-8") as fh:
        return LpInstance.from_dict(json.load(fh))


def check_point(inst, x):
    """Return ``x`` as a float array, verifying its length against ``inst``."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (inst.n,):
        raise ContractError(f"point has shape {x.shape}, instance dimension is {inst.n}")
    return x


@dataclass(frozen=True)
class Tolerances:
    feas_tol: float = 1e-9
    conv_tol: float = 1e-10
    epsilon: float = 1e-3

    def __post_init__(self):
        for name in ("feas_tol", "conv_tol", "epsilon"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be strictly positive")
        if self.conv_tol > self.epsilon:
            raise ParameterError("conv_tol must not exceed epsilon")


def residual(inst, i, x):
    """Violation ``max(<a_i, x> - b_i, 0)`` of row ``i`` at ``x``."""
    x = check_point(inst, x)
    if not 0 <= i < inst.m:
        raise ContractError(f"row index {i} outside [0, {inst.m})")
    return max(float(np.dot(inst.A[i], x)) - float(inst.b[i]), 0.0)


def residuals(inst, x):
    """All row violations at once, as an array of length m."""
    x = check_point(inst, x)
    return np.maximum(inst.A @ x - inst.b, 0.0)


def is_feasible(inst, x, feas_tol):
    """True iff ``A x <= b + feas_tol`` and ``x >= -feas_tol``.

    The sign check is skipped for augmented instances, whose rows already
    carry it.
    """
    x = check_point(inst, x)
    if not bool(np.all(inst.A @ x <= inst.b + feas_tol)):
        return False
    if not inst.nonneg_augmented:
        return bool(np.all(x >= -feas_tol))
    return True


def augment_nonnegativity(inst):
    """Append ``-x_j <= 0`` for every coordinate as explicit rows."""
    if inst.nonneg_augmented:
        raise ContractError("instance is already nonneg_augmented")
    n = inst.n
    A = np.vstack([inst.A, -np.eye(n)])
    b = np.concatenate([inst.b, np.zeros(n)])
    return LpInstance(A, b, inst.c, nonneg_augmented=True)


def strip_nonnegativity(inst):
    """Inverse of :func:`augment_nonnegativity`."""
    if not inst.nonneg_augmented:
        return inst
    m, n = inst.A.shape
    if m == n:
        raise ContractError("instance has only sign rows")
    return LpInstance(inst.A[: m - n], inst.b[: m - n], inst.c, False)


def full_rows(inst):
    """Row system ``(A, b)`` that includes the sign constraints explicitly."""
    if inst.nonneg_augmented:
        return inst.A, inst.b
    n = inst.n
    return np.vstack([inst.A, -np.eye(n)]), np.concatenate([inst.b, np.zeros(n)])
