"""Averaged-relaxed projection (Fejer) map onto the feasible polytope.

For an instance with rows ``a_i`` and bounds ``b_i``::

    phi(x) = x - (lam / m) * sum_i max(<a_i, x> - b_i, 0) / ||a_i||^2 * a_i

Every point of the polytope is a fixed point, and for ``0 < lam < 2`` each
application strictly decreases the distance from an outside point to every
point of the polytope. Iterating to a fixed point gives the
pseudo-projection, which lands on the polytope but is generally not the
nearest point.
"""

from dataclasses import dataclass

import numpy as np

from .lp_core import ContractError, NumericalError, ParameterError, check_point

DEFAULT_LAMBDA = 1.5


def check_lambda(lam):
    if not 0.0 < lam < 2.0:
        raise ParameterError(f"relaxation factor lambda={lam} outside (0, 2)")


@dataclass(frozen=True)
class FejerParams:
    lam: float = DEFAULT_LAMBDA
    max_iters: int = 1_000_000
    conv_tol: float = 1e-10

    def __post_init__(self):
        check_lambda(self.lam)
        if self.max_iters < 1:
            raise ParameterError("max_iters must be positive")
        if not self.conv_tol > 0:
            raise ParameterError("conv_tol must be positive")


@dataclass(frozen=True)
class ProjectionResult:
    point: np.ndarray
    iterations_used: int
    converged: bool
    final_step_norm: float


def _correction(A, row_norms_sq, violation):
    # Weighted row sum in ascending row order; bit-reproducible.
    weights = violation / row_norms_sq
    return (weights[:, None] * A).sum(axis=0)


def fejer_step(A, b, row_norms_sq, lam, x):
    """One map application on raw arrays; returns ``x`` itself when no row is violated."""
    violation = np.maximum(A @ x - b, 0.0)
    if not violation.any():
        return x
    return x - (lam / A.shape[0]) * _correction(A, row_norms_sq, violation)


def fejer_map(inst, lam, x):
    """Apply the Fejer map of ``inst`` once.

    Points satisfying every row are returned unchanged (bit for bit).
    """
    check_lambda(lam)
    x = check_point(inst, x)
    return fejer_step(inst.A, inst.b, inst.row_norms_sq, lam, x)


def fejer_iterate(inst, lam, x, s):
    """``s``-fold composition of :func:`fejer_map`; ``s = 0`` returns ``x``."""
    check_lambda(lam)
    if s < 0:
        raise ContractError(f"iteration count s={s} must be >= 0")
    x = check_point(inst, x)
    A, b, sq = inst.A, inst.b, inst.row_norms_sq
    for _ in range(s):
        nxt = fejer_step(A, b, sq, lam, x)
        if nxt is x:
            # fixed point reached, further steps are identities
            break
        x = nxt
    if not np.all(np.isfinite(x)):
        raise NumericalError("Fejer iterate became non-finite")
    return x


def pseudo_projection(inst, params, x):
    """Iterate the Fejer map until the step norm drops to ``params.conv_tol``.

    Parameters
    ----------
    inst : LpInstance
    params : FejerParams
    x : array_like
        Starting point.

    Returns
    -------
    ProjectionResult
        ``converged`` is False when ``params.max_iters`` steps were used up
        without meeting the tolerance; that is not an error.
    """
    x = check_point(inst, x)
    with np.errstate(over="ignore", invalid="ignore"):
        return _pseudo_projection(inst, params, x)


def _pseudo_projection(inst, params, x):
    A, b, sq = inst.A, inst.b, inst.row_norms_sq
    step_norm = np.inf
    for it in range(1, params.max_iters + 1):
        nxt = fejer_step(A, b, sq, params.lam, x)
        if nxt is x:
            return ProjectionResult(x, it, True, 0.0)
        step_norm = float(np.linalg.norm(nxt - x))
        if not np.isfinite(step_norm) or not np.all(np.isfinite(nxt)):
            raise NumericalError("pseudo-projection diverged to non-finite values")
        x = nxt
        if step_norm <= params.conv_tol:
            return ProjectionResult(x, it, True, step_norm)
    return ProjectionResult(x, params.max_iters, False, step_norm)
