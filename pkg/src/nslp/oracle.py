"""Brute-force references for small instances.

Nothing here is fast. The LP optimum comes from enumerating every basis
and the point-to-polytope distance from projecting onto every face, which
is exact but combinatorial in the number of rows.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .lp_core import check_point, full_rows

MAX_DIM = 3
DEDUP_TOL = 1e-9


class UnsupportedGeometry(ValueError):
    """The oracle does not handle this dimension or shape."""


class EmptyRegion(ValueError):
    """The feasible set is empty."""


@dataclass(frozen=True)
class VertexSolution:
    optimum: np.ndarray
    value: float
    vertices_checked: int
    feasible: bool
    bounded: bool


def _scaled_tol(b, feas_tol):
    return feas_tol * max(1.0, float(np.max(np.abs(b))))


def _vertices(A, b, tol):
    n = A.shape[1]
    found = []
    checked = 0
    for rows in combinations(range(A.shape[0]), n):
        sub = A[list(rows)]
        if abs(np.linalg.det(sub)) < 1e-12:
            continue
        checked += 1
        x = np.linalg.solve(sub, b[list(rows)])
        if np.all(A @ x <= b + tol) and not any(np.allclose(x, v, atol=DEDUP_TOL, rtol=0) for v in found):
            found.append(x)
    return found, checked


def _has_improving_ray(A, c, tol):
    n = A.shape[1]
    for rows in combinations(range(A.shape[0]), n - 1):
        sub = A[list(rows)]
        _, sv, vt = np.linalg.svd(sub)
        if sv.size < n - 1 or sv[-1] < 1e-12:
            continue
        ray = vt[-1]
        for r in (ray, -ray):
            if np.all(A @ r <= tol) and float(c @ r) > tol:
                return True
    return False


def exact_lp_solve(inst, feas_tol=1e-9):
    """Maximise ``<c, x>`` over the instance by vertex enumeration (n <= 3).

    Sign constraints are included whether or not the instance carries them
    as rows, so the region is pointed and has a vertex whenever nonempty.
    """
    if inst.n > MAX_DIM:
        raise UnsupportedGeometry(f"exact_lp_solve supports n <= {MAX_DIM}, got n={inst.n}")
    A, b = full_rows(inst)
    verts, checked = _vertices(A, b, _scaled_tol(b, feas_tol))
    if not verts:
        return VertexSolution(np.full(inst.n, np.nan), float("nan"), checked, False, True)
    if _has_improving_ray(A, inst.c, 1e-12):
        return VertexSolution(np.full(inst.n, np.nan), float("inf"), checked, True, False)
    values = [float(inst.c @ v) for v in verts]
    best = int(np.argmax(values))
    return VertexSolution(verts[best], values[best], checked, True, True)


def _box_bounds(A, b):
    """Per-axis (lo, hi) when every row is a multiple of a unit vector, else None."""
    n = A.shape[1]
    lo = np.full(n, -np.inf)
    hi = np.full(n, np.inf)
    for a, bi in zip(A, b):
        nz = np.flatnonzero(a)
        if nz.size != 1:
            return None
        j = nz[0]
        if a[j] > 0:
            hi[j] = min(hi[j], bi / a[j])
        else:
            lo[j] = max(lo[j], bi / a[j])
    return lo, hi


def is_box(inst):
    return _box_bounds(*full_rows(inst)) is not None


def supports_distance(inst):
    return inst.n <= MAX_DIM or is_box(inst)


def exact_distance(inst, x, feas_tol=1e-9):
    """Euclidean distance from ``x`` to the feasible set.

    Axis-aligned boxes use the clamp in any dimension. Otherwise (n <= 3)
    ``x`` is projected onto the affine hull of every set of up to n rows;
    the nearest projection that is feasible is the nearest point.
    """
    x = check_point(inst, x)
    A, b = full_rows(inst)
    box = _box_bounds(A, b)
    if box is not None:
        lo, hi = box
        if np.any(lo > hi):
            raise EmptyRegion("box bounds cross")
        return float(np.linalg.norm(x - np.clip(x, lo, hi)))
    if inst.n > MAX_DIM:
        raise UnsupportedGeometry(f"exact_distance supports boxes or n <= {MAX_DIM}, got n={inst.n}")
    if np.all(A @ x <= b):
        return 0.0
    tol = _scaled_tol(b, feas_tol)
    best = np.inf
    for size in range(1, inst.n + 1):
        for rows in combinations(range(A.shape[0]), size):
            sub = A[list(rows)]
            gram = sub @ sub.T
            if abs(np.linalg.det(gram)) < 1e-12:
                continue
            y = x - sub.T @ np.linalg.solve(gram, sub @ x - b[list(rows)])
            if np.all(A @ y <= b + tol):
                best = min(best, float(np.linalg.norm(x - y)))
    if not np.isfinite(best):
        raise EmptyRegion("no feasible face found")
    return best


def exact_projection_box(inst, x):
    """Nearest point of an axis-aligned box instance."""
    x = check_point(inst, x)
    box = _box_bounds(*full_rows(inst))
    if box is None:
        raise UnsupportedGeometry("instance is not an axis-aligned box")
    return np.clip(x, *box)

