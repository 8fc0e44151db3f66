"""Independent references used only by the tests."""

import numpy as np

from nslp.lp_core import LpInstance, is_feasible


def halfspace_projection(a, b, x):
    a = np.asarray(a, float)
    x = np.asarray(x, float)
    return x - max(a @ x - b, 0.0) / (a @ a) * a


def sample_feasible(inst, rng, lo, hi, count, tol=0.0):
    """Rejection-sample points of the feasible set inside the box [lo, hi]."""
    out = []
    while len(out) < count:
        x = rng.uniform(lo, hi)
        if is_feasible(inst, x, tol):
            out.append(x)
    return out


def qp_distance(A, b, x):
    """dist(x, {y : A y <= b, y >= 0}) by a convex QP (cvxpy)."""
    import cvxpy as cp

    y = cp.Variable(len(x))
    prob = cp.Problem(cp.Minimize(cp.sum_squares(y - x)), [A @ y <= b, y >= 0])
    prob.solve(solver=cp.CLARABEL)
    return float(np.sqrt(max(prob.value, 0.0)))


def halfspace(a, b, c=None):
    a = np.asarray(a, dtype=float)
    return LpInstance([a], [b], c if c is not None else np.ones_like(a))


def box_instance(lo, hi, c=None):
    """Axis-aligned box as explicit rows (no implicit sign handling needed when lo >= 0)."""
    n = len(lo)
    eye = np.eye(n)
    A = np.vstack([eye, -eye])
    b = np.concatenate([hi, -np.asarray(lo, dtype=float)])
    return LpInstance(A, b, c if c is not None else np.ones(n), nonneg_augmented=False)
