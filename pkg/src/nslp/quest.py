"""Quest phase: a Fejer process whose input data is refreshed every L steps.

Starting from ``z0`` the process runs epochs ``z_k = phi_{k-1}^L(z_{k-1})``,
where ``phi_{k-1}`` is the Fejer map of the instance in force at time
``(k-1) L``, and stops once ``z_k`` is within ``epsilon`` of the polytope
in force at ``k L``.

The remaining functions are diagnostics for the translating case: the
equivariance of the translated maps, the comoving map ``psi``, the sampled
tracking condition and the z/y parallelogram identities.
"""

from dataclasses import dataclass, field
import logging

import numpy as np

from .fejer import FejerParams, check_lambda, fejer_iterate, pseudo_projection
from .lp_core import ContractError, NumericalError, ParameterError, check_point, is_feasible
from .oracle import exact_distance, supports_distance
from .scenarios import fejer_map_translated, instance_at

log = logging.getLogger(__name__)


class QuestFailed(RuntimeError):
    """The Quest epoch budget ran out before the iterate reached the polytope."""

    def __init__(self, result):
        super().__init__(f"Quest did not terminate within {len(result.records)} epochs")
        self.result = result


@dataclass(frozen=True)
class QuestConfig:
    L: int = 10
    lam: float = 1.5
    epsilon: float = 1e-3
    max_updates: int = 10_000
    probe_iters: int = 100_000

    def __post_init__(self):
        if isinstance(self.L, bool) or int(self.L) != self.L or self.L < 1:
            raise ParameterError(f"L must be a positive integer, got {self.L!r}")
        check_lambda(self.lam)
        if not self.epsilon > 0:
            raise ParameterError("epsilon must be positive")
        if self.max_updates < 1:
            raise ParameterError("max_updates must be positive")


@dataclass(frozen=True)
class QuestRecord:
    k: int
    t: int
    dist_est: float
    dist_exact: float | None
    z: np.ndarray


@dataclass(frozen=True)
class QuestResult:
    z: np.ndarray
    k: int
    distances: list
    terminated: bool
    method: str
    records: list = field(default_factory=list)


def distance_estimate(inst, x, conv_tol=1e-10, probe_iters=100_000):
    """Distance from ``x`` to the feasible set of ``inst``.

    Returns ``(estimate, exact, method)``. When the oracle supports the
    geometry ``estimate == exact`` and ``method == "exact"``. Otherwise
    ``exact`` is None and the estimate is the larger of the worst scaled row
    violation (a lower bound) and the length of a pseudo-projection probe
    from ``x`` (``method == "surrogate"``).
    """
    x = check_point(inst, x)
    if supports_distance(inst):
        d = exact_distance(inst, x)
        return d, d, "exact"
    scaled = np.maximum(inst.A @ x - inst.b, 0.0) / np.sqrt(inst.row_norms_sq)
    lower = float(scaled.max())
    if not inst.nonneg_augmented:
        lower = max(lower, float(np.max(-x, initial=0.0)))
    if lower == 0.0:
        return 0.0, None, "surrogate"
    probe = pseudo_projection(inst, FejerParams(max_iters=probe_iters, conv_tol=conv_tol), x)
    return max(lower, float(np.linalg.norm(probe.point - x))), None, "surrogate"


def quest_run(scn, z0, cfg, k0=0, require_nonneg=True):
    """Run Quest epochs from ``z0`` until the distance test passes.

    Parameters
    ----------
    scn : Scenario
    z0 : array_like
        Initial approximation; must be nonnegative unless ``require_nonneg``
        is False (used when re-acquiring from an arbitrary point).
    cfg : QuestConfig
    k0 : int
        Update index the run starts at; time is ``k * cfg.L``.

    Returns
    -------
    QuestResult
        ``terminated`` is False when ``cfg.max_updates`` epochs elapsed
        without the distance falling below ``cfg.epsilon``.
    """
    z = check_point(scn.base, z0)
    if require_nonneg and np.any(z < 0):
        raise ContractError("z0 must have nonnegative coordinates")
    if k0 < 0:
        raise ContractError("k0 must be nonnegative")
    k = k0
    records = []
    method = None
    for _ in range(cfg.max_updates):
        z = fejer_iterate(instance_at(scn, k * cfg.L), cfg.lam, z, cfg.L)
        k += 1
        est, exact, method = distance_estimate(instance_at(scn, k * cfg.L), z, probe_iters=cfg.probe_iters)
        records.append(QuestRecord(k, k * cfg.L, est, exact, z))
        if est < cfg.epsilon:
            return QuestResult(z, k, [r.dist_est for r in records], True, method, records)
    log.info("quest budget of %d epochs exhausted at k=%d", cfg.max_updates, k)
    return QuestResult(z, k, [r.dist_est for r in records], False, method, records)


def _require_translation(scn):
    if scn.kind != "translation":
        raise ContractError("a translation scenario is required")


def psi_map(scn, L, lam, x, feas_tol=1e-9):
    """Comoving map: ``phi^L(x) - L d`` outside the base polytope, identity inside."""
    _require_translation(scn)
    x = check_point(scn.base, x)
    if is_feasible(scn.base, x, feas_tol):
        return x
    return fejer_iterate(scn.base, lam, x, L) - L * scn.d


def lemma1_check(scn, u, p, l, lam):
    """Equivariance residual ``||phi_p^l(u + pLd) - phi^l(u) - pLd||``.

    Zero in exact arithmetic for every ``p >= 0``, ``l >= 1``.
    """
    _require_translation(scn)
    if p < 0 or l < 1:
        raise ContractError("need p >= 0 and l >= 1")
    L = scn.L
    u = check_point(scn.base, u)
    shift = (p * L) * scn.d
    v = u + shift
    for _ in range(l):
        v = fejer_map_translated(scn, p, L, lam, v)
    w = fejer_iterate(scn.base, lam, u, l)
    return float(np.linalg.norm(v - w - shift))


def tracking_condition_estimate(scn, L, lam, samples, feas_tol=1e-9):
    """Sampled margins ``dist(x, M) - dist(phi^L(x), M) - ||L d||``.

    Positive margins at every sample are evidence, not proof, that the
    tracking hypothesis holds. Samples inside the base polytope get ``None``.
    """
    _require_translation(scn)
    check_lambda(lam)
    base = scn.base
    step = float(np.linalg.norm(L * scn.d))
    margins = []
    for j, x in enumerate(samples):
        x = check_point(base, x)
        if is_feasible(base, x, feas_tol):
            log.warning("sample %d lies inside M; skipped", j)
            margins.append(None)
            continue
        after = fejer_iterate(base, lam, x, L)
        margins.append(exact_distance(base, x) - exact_distance(base, after) - step)
    return margins


def parallelogram_identity_check(scn, z0, cfg, k_max):
    """Run the z- and y-processes side by side and measure the identity gaps.

    Returns a list of ``(shift_gap, dist_gap)`` for ``k = 0..k_max`` with
    ``shift_gap = ||z_k - y_k - kLd||`` and
    ``dist_gap = |dist(z_k, M_k) - dist(y_k, M)|``.
    """
    _require_translation(scn)
    L, lam, d = cfg.L, cfg.lam, scn.d
    z = y = check_point(scn.base, z0)
    gaps = []
    for k in range(k_max + 1):
        if k > 0:
            for _ in range(L):
                z = fejer_map_translated(scn, k - 1, L, lam, z)
            y = psi_map(scn, L, lam, y)
        if not (np.all(np.isfinite(z)) and np.all(np.isfinite(y))):
            raise NumericalError("iterates became non-finite")
        shift_gap = float(np.linalg.norm(z - y - k * L * d))
        dist_gap = abs(exact_distance(instance_at(scn, k * L), z) - exact_distance(scn.base, y))
        gaps.append((shift_gap, dist_gap))
    return gaps
