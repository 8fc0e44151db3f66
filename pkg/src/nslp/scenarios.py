"""Time-indexed LP providers.

Time is measured in Fejer-map evaluations: data updates happen at the
instants ``t_k = k * L`` and the instance is frozen in between.
"""

from bisect import bisect_right
from dataclasses import dataclass
import json

import numpy as np

from .fejer import check_lambda
from .lp_core import ContractError, LpInstance, augment_nonnegativity, check_point

KINDS = ("static", "translation", "piecewise")


@dataclass(frozen=True, eq=False)
class Scenario:
    """A provider ``t -> LpInstance``.

    ``translation`` moves the polytope rigidly by ``d`` per unit time
    (``b_t = b + A t d``; every row shifts, sign rows included, so the
    feasible set at ``t`` is exactly the base set plus ``t d``).
    ``piecewise`` swaps in whole instances at time thresholds and may change
    ``A`` and ``c`` as well; it carries no convergence guarantee.
    """

    kind: str
    base: LpInstance
    d: np.ndarray
    L: int = 1
    schedule: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ContractError(f"kind: expected one of {KINDS}, got {self.kind!r}")
        d = np.array(self.d, dtype=np.float64)
        if d.shape != (self.base.n,):
            raise ContractError(f"d: expected length {self.base.n}, got shape {d.shape}")
        if self.kind != "translation" and np.any(d != 0.0):
            raise ContractError("d: must be zero unless kind is 'translation'")
        d.setflags(write=False)
        object.__setattr__(self, "d", d)
        if isinstance(self.L, bool) or int(self.L) != self.L or self.L < 1:
            raise ContractError(f"L: expected a positive integer, got {self.L!r}")
        object.__setattr__(self, "L", int(self.L))
        sched = tuple((float(t), inst) for t, inst in self.schedule)
        if self.kind != "piecewise" and sched:
            raise ContractError("schedule: only allowed for kind 'piecewise'")
        times = [t for t, _ in sched]
        if any(t <= 0 for t in times) or times != sorted(set(times)):
            raise ContractError("schedule: thresholds must be positive and strictly increasing")
        for _, inst in sched:
            if inst.n != self.base.n:
                raise ContractError("schedule: instance dimension differs from base")
        object.__setattr__(self, "schedule", sched)

    @property
    def n(self):
        return self.base.n

    def to_dict(self):
        out = {"kind": self.kind, "base": self.base.to_dict(), "d": self.d.tolist(), "L": self.L}
        if self.schedule:
            out["schedule"] = [{"t": t, "instance": inst.to_dict()} for t, inst in self.schedule]
        return out

    @classmethod
    def from_dict(cls, data, augment=None):
        """Parse the scenario JSON layout.

        Sign constraints are appended as rows unless ``augment`` (or the
        document's ``"augment"`` field) is false.
        """
        if not isinstance(data, dict):
            raise ContractError("scenario: expected a JSON object")
        for key in ("kind", "base"):
            if key not in data:
                raise ContractError(f"{key}: missing field")
        if augment is None:
            augment = data.get("augment", True)
        base = _parse_instance(data["base"], "base")
        n = base.n
        d = data.get("d", [0.0] * n)
        schedule = []
        for j, entry in enumerate(data.get("schedule", [])):
            if not isinstance(entry, dict) or "t" not in entry or "instance" not in entry:
                raise ContractError(f"schedule[{j}]: expected {{'t': ..., 'instance': ...}}")
            schedule.append((entry["t"], _parse_instance(entry["instance"], f"schedule[{j}].instance")))
        try:
            return make_scenario(data["kind"], base, d=d, L=data.get("L", 1),
                                 schedule=schedule, augment=augment)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ContractError):
                raise
            raise ContractError(f"scenario: {exc}") from None


def _parse_instance(data, where):
    try:
        return LpInstance.from_dict(data)
    except ContractError as exc:
        raise ContractError(f"{where}.{exc}") from None


def make_scenario(kind, base, d=None, L=1, schedule=(), augment=True):
    """Build a scenario, appending sign rows to every instance when ``augment``."""
    def prep(inst):
        return augment_nonnegativity(inst) if augment and not inst.nonneg_augmented else inst

    base = prep(base)
    if d is None:
        d = np.zeros(base.n)
    return Scenario(kind, base, d, L, tuple((t, prep(inst)) for t, inst in schedule))


def load_scenario(path, augment=None):
    with open(path, encoding="utf-8") as fh:
        return Scenario.from_dict(json.load(fh), augment=augment)


def instance_at(scn, t):
    """The frozen instance in force at time ``t >= 0``."""
    if t < 0:
        raise ContractError(f"time t={t} must be nonnegative")
    if scn.kind == "static" or t == 0:
        # thresholds are strictly positive, so t = 0 is always the base
        return scn.base
    if scn.kind == "translation":
        return scn.base.with_b(scn.base.b + scn.base.A @ (t * scn.d))
    idx = bisect_right([th for th, _ in scn.schedule], t)
    return scn.base if idx == 0 else scn.schedule[idx - 1][1]


def fejer_map_translated(scn, k, L, lam, x):
    """Fejer map at update ``k`` of a translating scenario, via the shifted argument.

    Residuals are taken at ``x - k L d`` against the base data, which is the
    same map as :func:`nslp.fejer.fejer_map` on ``instance_at(scn, k * L)``
    up to rounding.
    """
    if scn.kind != "translation":
        raise ContractError("fejer_map_translated needs a translation scenario")
    check_lambda(lam)
    if k < 0:
        raise ContractError(f"update index k={k} must be >= 0")
    base = scn.base
    x = check_point(base, x)
    shift = (k * L) * scn.d
    violation = np.maximum(base.A @ (x - shift) - base.b, 0.0)
    if not violation.any():
        return x
    weights = violation / base.row_norms_sq
    return x - (lam / base.m) * (weights[:, None] * base.A).sum(axis=0)


def random_feasible_instance(n, m, seed):
    """Random bounded instance with a certified interior point.

    Row 0 is ``sum(x) <= b_0`` which, with ``x >= 0``, bounds the region.
    The other rows are Gaussian; every ``b_i`` is ``<a_i, x0>`` plus a
    positive margin, so ``x0`` satisfies all rows strictly.

    Returns
    -------
    inst : LpInstance
        Not augmented; the sign constraints are implicit.
    x0 : ndarray
        Interior point with coordinates in ``[0.5, 1.5]``.
    """
    if n < 2 or m < n:
        raise ContractError(f"need n >= 2 and m >= n, got n={n}, m={m}")
    rng = np.random.default_rng(seed)
    x0 = rng.uniform(0.5, 1.5, size=n)
    A = rng.standard_normal((m, n))
    A[0] = 1.0
    b = A @ x0 + rng.uniform(0.1, 1.0, size=m)
    c = rng.standard_normal(n)
    return LpInstance(A, b, c), x0
