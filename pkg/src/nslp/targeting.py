"""Targeting phase: an axisymmetric cross that follows the LP optimum.

The cross is a centre ``g0`` plus ``n`` cohorts of ``K`` points each, laid
out along the coordinate axes through ``g0`` at spacing ``s``. A point is
named by a marker ``(chi, eta)``: cohort (axis) ``chi`` and signed offset
``eta`` with ``1 <= |eta| <= K/2``; the centre is ``(0, 0)``. Markers also
have a flat sequential number ``alpha`` in ``0..nK`` used to hand points to
workers.

Each step checks which cross points are feasible, takes the best feasible
point of every cohort and either keeps ``g0`` (when it is feasible and at
least as good) or moves it to the mean of those per-cohort winners.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from functools import lru_cache
import logging
import math

import numpy as np

from .lp_core import ContractError, check_point
from .quest import QuestConfig, QuestFailed, quest_run
from .scenarios import instance_at

log = logging.getLogger(__name__)


class LostPolytope(RuntimeError):
    """No cross point and not the centre lies in the current polytope."""


@dataclass(frozen=True, order=True)
class Marker:
    chi: int
    eta: int


CENTER = Marker(0, 0)


def _sgn(v):
    return (v > 0) - (v < 0)


def _check_K(K):
    if isinstance(K, bool) or int(K) != K or K < 2 or K % 2:
        raise ContractError(f"K must be an even integer >= 2, got {K!r}")


def default_K(n):
    return min(2 * math.ceil(n / 2) * 2, 8)


@dataclass(frozen=True, eq=False)
class Cross:
    g0: np.ndarray
    K: int
    s: float

    def __post_init__(self):
        g0 = np.array(self.g0, dtype=np.float64)
        if g0.ndim != 1 or g0.size < 2:
            raise ContractError("g0 must be a vector of dimension >= 2")
        _check_K(self.K)
        if not self.s > 0:
            raise ContractError(f"spacing s must be positive, got {self.s}")
        g0.setflags(write=False)
        object.__setattr__(self, "g0", g0)

    @property
    def n(self):
        return self.g0.size

    @property
    def P(self):
        return self.n * self.K

    def __len__(self):
        return self.P + 1

    def moved_to(self, g0):
        return Cross(g0, self.K, self.s)

    def markers(self):
        """Markers in sequential-number order."""
        return sequential_numbering(self.n, self.K)

    def points(self):
        """All ``nK + 1`` points as rows, in sequential-number order."""
        return np.array([marker_to_point(self, mk) for mk in self.markers()])

    def cohort(self, chi):
        """Sequential numbers of the points of cohort ``chi``."""
        return [a for a, mk in enumerate(self.markers()) if mk.chi == chi and mk.eta != 0]


def check_marker(n, K, marker):
    if not 0 <= marker.chi < n:
        raise ContractError(f"marker cohort {marker.chi} outside [0, {n})")
    if abs(marker.eta) > K // 2:
        raise ContractError(f"marker offset {marker.eta} exceeds K/2 = {K // 2}")
    if marker.eta == 0 and marker.chi != 0:
        raise ContractError("only the centre (0, 0) has offset 0")


def marker_to_point(cross, marker):
    """``g0`` shifted by ``eta * s`` along axis ``chi``."""
    check_marker(cross.n, cross.K, marker)
    x = cross.g0.copy()
    x[marker.chi] += marker.eta * cross.s
    return x


def alpha_to_marker_2d(K, alpha):
    """Planar sequential number to marker.

    ``chi = ||alpha - K| - 1| // (K/2)`` and
    ``eta = sgn(alpha - K) * (((|alpha - K| - 1) mod K/2) + 1)``;
    ``alpha = K`` is the centre. Valid numbers are ``0..2K``.
    """
    _check_K(K)
    if not 0 <= alpha <= 2 * K:
        raise ContractError(f"alpha={alpha} outside [0, {2 * K}]")
    half = K // 2
    off = abs(alpha - K)
    chi = abs(off - 1) // half
    eta = _sgn(alpha - K) * (((off - 1) % half) + 1)
    if eta == 0:
        chi = 0
    return Marker(chi, eta)


def marker_to_alpha_2d(K, marker):
    """Inverse of :func:`alpha_to_marker_2d`: ``eta + sgn(eta) * chi * K / 2 + K``."""
    _check_K(K)
    check_marker(2, K, marker)
    return marker.eta + _sgn(marker.eta) * (marker.chi * K // 2) + K


@lru_cache(maxsize=64)
def sequential_numbering(n, K):
    """Tuple mapping sequential number ``alpha`` to its marker, ``alpha in 0..nK``.

    Numbers ``0..2K`` follow the planar formulas (cohorts 0 and 1, centre at
    ``K``). Cohorts ``chi >= 2`` follow in cohort-major order with ``eta``
    ascending, skipping 0.
    """
    if n < 2:
        raise ContractError("n must be >= 2")
    _check_K(K)
    order = [alpha_to_marker_2d(K, a) for a in range(2 * K + 1)]
    half = K // 2
    for chi in range(2, n):
        order.extend(Marker(chi, eta) for eta in range(-half, half + 1) if eta != 0)
    return tuple(order)


def marker_to_alpha(n, K, marker):
    check_marker(n, K, marker)
    if marker.chi < 2:
        return marker_to_alpha_2d(K, marker)
    half = K // 2
    pos = marker.eta + half if marker.eta < 0 else marker.eta + half - 1
    return 2 * K + 1 + (marker.chi - 2) * K + pos


def alpha_to_marker(n, K, alpha):
    if not 0 <= alpha <= n * K:
        raise ContractError(f"alpha={alpha} outside [0, {n * K}]")
    if alpha <= 2 * K:
        return alpha_to_marker_2d(K, alpha)
    return sequential_numbering(n, K)[alpha]


def _member_chunk(A, b, sign_check, feas_tol, pts):
    # One matrix-vector product per point so the result never depends on chunking.
    out = []
    for g in pts:
        ok = bool(np.all(A @ g <= b + feas_tol))
        if ok and sign_check:
            ok = bool(np.all(g >= -feas_tol))
        out.append(ok)
    return out


def evaluate_membership(cross, inst, feas_tol, workers=1):
    """Feasibility flag for each cross point, indexed by sequential number.

    With ``workers > 1`` the points are split into contiguous chunks and
    checked on a thread pool; the gathered vector is identical for any
    worker count.
    """
    if cross.n != inst.n:
        raise ContractError(f"cross dimension {cross.n} differs from instance dimension {inst.n}")
    pts = cross.points()
    args = (inst.A, inst.b, not inst.nonneg_augmented, feas_tol)
    if workers <= 1:
        return np.array(_member_chunk(*args, pts), dtype=bool)
    chunks = np.array_split(pts, min(workers, len(pts)))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda c: _member_chunk(*args, c), chunks))
    return np.array([flag for part in parts for flag in part], dtype=bool)


@dataclass(frozen=True)
class TargetingRecord:
    k: int
    g0: np.ndarray
    objective: float
    n_feasible: int
    moved: bool


@dataclass(frozen=True)
class Reacquisition:
    """A lost-polytope event and the Quest run that recovered from it."""

    k: int
    g0: np.ndarray
    quest: object


@dataclass(frozen=True)
class TargetingState:
    cross: Cross
    k: int
    last_Q: tuple = ()
    trace: tuple = ()
    events: tuple = ()


def targeting_step(state, inst_k, feas_tol=1e-9, workers=1):
    """One pass of the loop against the instance in force at ``state.k``.

    Raises
    ------
    LostPolytope
        When no cohort has a feasible point and ``g0`` itself is infeasible.
    """
    cross = state.cross
    pts = cross.points()
    feasible = evaluate_membership(cross, inst_k, feas_tol, workers)
    markers = cross.markers()
    center = markers.index(CENTER)
    values = pts @ inst_k.c

    # per-cohort argmax; ties go to the lowest sequential number
    Q = []
    for chi in range(cross.n):
        best = None
        for a in cross.cohort(chi):
            if feasible[a] and (best is None or values[a] > values[best]):
                best = a
        if best is not None:
            Q.append(best)

    g0_ok = bool(feasible[center])
    if not Q and not g0_ok:
        raise LostPolytope(f"cross at k={state.k} has no feasible point")
    if g0_ok and (not Q or values[center] >= max(values[a] for a in Q)):
        new_g0, moved = cross.g0, False
    else:
        new_g0, moved = pts[Q].sum(axis=0) / len(Q), True
    rec = TargetingRecord(state.k, new_g0, float(inst_k.c @ new_g0), int(feasible.sum()), moved)
    return TargetingState(
        cross.moved_to(new_g0) if moved else cross,
        state.k + 1,
        tuple(pts[a] for a in Q),
        state.trace + (rec,),
        state.events,
    )


def targeting_run(scn, start, K, s, steps, feas_tol=1e-9, quest_cfg=None, workers=1,
                  max_reacquisitions=2):
    """Build the cross at the Quest result and run ``steps`` targeting steps.

    On a lost polytope the Quest phase is re-run from the current centre,
    starting at the current update index, and the cross is rebuilt around
    its result. A Quest point can sit within ``epsilon`` of a corner with
    every axis line through it missing the polytope, so a repeated loss
    re-runs Quest with ``epsilon`` tightened to the membership tolerance.
    More than ``max_reacquisitions`` consecutive losses re-raise
    :class:`LostPolytope`; a Quest run that exhausts its budget raises
    :class:`QuestFailed`.
    """
    if not start.terminated:
        raise ContractError("targeting needs a terminated Quest result")
    if steps < 0:
        raise ContractError("steps must be >= 0")
    cfg = quest_cfg or QuestConfig()
    L = cfg.L
    state = TargetingState(Cross(start.z, K, s), start.k)
    done = 0
    losses = 0
    while done < steps:
        inst = instance_at(scn, state.k * L)
        try:
            state = targeting_step(state, inst, feas_tol, workers)
        except LostPolytope:
            losses += 1
            if losses > max_reacquisitions:
                raise
            eps = cfg.epsilon
            if losses > 1:
                eps = min(eps, feas_tol / max(1.0, float(np.sqrt(inst.row_norms_sq.max()))))
            log.info("lost polytope at k=%d; re-running Quest with epsilon=%g", state.k, eps)
            res = quest_run(scn, state.cross.g0, replace(cfg, epsilon=eps), k0=state.k,
                            require_nonneg=False)
            if not res.terminated:
                raise QuestFailed(res)
            event = Reacquisition(state.k, state.cross.g0, res)
            state = replace(state, cross=state.cross.moved_to(res.z), k=res.k,
                            events=state.events + (event,))
            continue
        losses = 0
        done += 1
    return state
