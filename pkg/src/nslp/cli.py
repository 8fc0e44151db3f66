"""Command-line harness for the Quest/Targeting pipeline.

Exit codes: 0 success, 1 unreadable input, 2 Quest budget exhausted (or the
polytope could not be re-acquired), 3 dimension outside oracle support,
4 empty feasible region, 5 oracle gap above threshold after warm-up.
"""

import argparse
import csv
from dataclasses import replace
import io
import json
import logging
import sys

import numpy as np

from .fejer import DEFAULT_LAMBDA
from .lp_core import ContractError, ParameterError
from .oracle import MAX_DIM, EmptyRegion, exact_lp_solve
from .quest import QuestConfig, QuestFailed, distance_estimate, quest_run
from .scenarios import Scenario, instance_at
from .targeting import LostPolytope, default_K, targeting_run

log = logging.getLogger(__name__)

EXIT_OK, EXIT_PARSE, EXIT_BUDGET, EXIT_UNSUPPORTED, EXIT_INFEASIBLE, EXIT_GAP = range(6)


def build_parser():
    p = argparse.ArgumentParser(prog="nslp", description="Non-stationary LP: Quest and Targeting phases.")
    p.add_argument("command", choices=["quest", "target", "solve", "oracle-check"])
    p.add_argument("--scenario", required=True, help="scenario JSON file")
    p.add_argument("--out", default=None, help="output file (default: stdout)")
    p.add_argument("--L", type=int, default=None, help="iterations per data update (default: scenario's L)")
    p.add_argument("--lambda", dest="lam", type=float, default=DEFAULT_LAMBDA,
                   help="relaxation factor in (0, 2) (default: %(default)s)")
    p.add_argument("--epsilon", type=float, default=1e-3, help="Quest termination distance (default: %(default)s)")
    p.add_argument("--K", type=int, default=None, help="points per cohort, even (default: min(4*ceil(n/2), 8))")
    p.add_argument("--s", type=float, default=None, help="cross spacing (default: epsilon)")
    p.add_argument("--steps", type=int, default=100, help="Targeting steps (default: %(default)s)")
    p.add_argument("--feas-tol", type=float, default=1e-9, help="membership tolerance (default: %(default)s)")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for the random start point when the scenario has no z0 (default: %(default)s)")
    p.add_argument("--workers", type=int, default=1, help="threads for membership checks (default: %(default)s)")
    p.add_argument("--max-updates", type=int, default=10_000, help="Quest epoch budget (default: %(default)s)")
    p.add_argument("--warmup", type=int, default=25,
                   help="oracle-check: steps ignored after start or re-acquisition (default: %(default)s)")
    return p


def load_run_inputs(path, L=None):
    """Read the scenario and the optional start point ``z0`` from a JSON file."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ContractError(f"scenario: cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ContractError(f"scenario: invalid JSON ({exc})") from None
    scn = Scenario.from_dict(doc)
    if L is not None:
        scn = replace(scn, L=L)
    z0 = doc.get("z0")
    if z0 is not None:
        try:
            z0 = np.array(z0, dtype=np.float64)
        except (TypeError, ValueError):
            raise ContractError("z0: not a numeric vector") from None
        if z0.shape != (scn.n,):
            raise ContractError(f"z0: expected length {scn.n}")
    return scn, z0


def _fmt(v):
    if v is None:
        return ""
    return repr(float(v))


class TraceWriter:
    """CSV trace ``phase,k,t,dist_est,dist_exact,objective,g0_0..g0_{n-1}``."""

    def __init__(self, fh, n):
        self.w = csv.writer(fh, lineterminator="\n")
        self.w.writerow(["phase", "k", "t", "dist_est", "dist_exact", "objective"]
                        + [f"g0_{i}" for i in range(n)])

    def row(self, phase, k, t, dist_est, dist_exact, objective, g):
        self.w.writerow([phase, k, t, _fmt(dist_est), _fmt(dist_exact), _fmt(objective)]
                        + [_fmt(v) for v in g])


def _quest_rows(writer, scn, result, phase="quest"):
    for rec in result.records:
        inst = instance_at(scn, rec.t)
        writer.row(phase, rec.k, rec.t, rec.dist_est, rec.dist_exact, inst.c @ rec.z, rec.z)


def _target_rows(writer, scn, state, L):
    # re-acquisition epochs are interleaved with step rows in time order
    items = [(rec.k, 1, rec) for rec in state.trace] + [(ev.k, 0, ev) for ev in state.events]
    for _, is_step, item in sorted(items, key=lambda it: it[:2]):
        if not is_step:
            _quest_rows(writer, scn, item.quest, phase="reacquire")
            continue
        inst = instance_at(scn, item.k * L)
        est, exact, _ = distance_estimate(inst, item.g0)
        writer.row("target", item.k, item.k * L, est, exact, item.objective, item.g0)


def _configs(args, scn):
    cfg = QuestConfig(L=scn.L, lam=args.lam, epsilon=args.epsilon, max_updates=args.max_updates)
    K = args.K if args.K is not None else default_K(scn.n)
    s = args.s if args.s is not None else args.epsilon
    return cfg, K, s


def _start_point(args, scn, z0):
    if z0 is not None:
        return z0
    return np.random.default_rng(args.seed).uniform(0.0, 1.0, scn.n)


def _run_pipeline(args, scn, z0, out, emit_quest=True, emit_target=True):
    """Quest then Targeting; returns (exit code, targeting state or None)."""
    cfg, K, s = _configs(args, scn)
    writer = TraceWriter(out, scn.n)
    res = quest_run(scn, _start_point(args, scn, z0), cfg)
    if emit_quest:
        _quest_rows(writer, scn, res)
    if not res.terminated:
        log.warning("Quest budget exhausted after %d epochs", len(res.records))
        return EXIT_BUDGET, None
    if args.command == "quest":
        return EXIT_OK, None
    try:
        state = targeting_run(scn, res, K, s, args.steps, args.feas_tol, cfg, args.workers)
    except (QuestFailed, LostPolytope) as exc:
        log.warning("targeting stopped: %s", exc)
        return EXIT_BUDGET, None
    if emit_target:
        _target_rows(writer, scn, state, cfg.L)
    return EXIT_OK, state


def cmd_quest(args, scn, z0, out):
    return _run_pipeline(args, scn, z0, out, emit_target=False)[0]


def cmd_target(args, scn, z0, out):
    return _run_pipeline(args, scn, z0, out, emit_quest=False)[0]


def cmd_solve(args, scn, z0, out):
    return _run_pipeline(args, scn, z0, out)[0]


def cmd_oracle_check(args, scn, z0, out):
    """Compare every Targeting step against the vertex-enumeration optimum."""
    if scn.n > MAX_DIM:
        print(f"unsupported: oracle needs n <= {MAX_DIM}, scenario has n={scn.n}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    if not exact_lp_solve(scn.base).feasible:
        print("infeasible", file=out)
        return EXIT_INFEASIBLE
    s = _configs(args, scn)[2]
    code, state = _run_pipeline(args, scn, z0, io.StringIO())
    if state is None:
        return code
    L = scn.L
    settled_from = state.trace[0].k + args.warmup if state.trace else 0
    if state.events:
        settled_from = max(settled_from, max(ev.quest.k for ev in state.events) + args.warmup)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["k", "oracle_opt", "objective", "gap", "threshold", "checked"]
               + [f"g0_{i}" for i in range(scn.n)])
    ok = True
    for rec in state.trace:
        inst = instance_at(scn, rec.k * L)
        sol = exact_lp_solve(inst)
        if not sol.feasible:
            print("infeasible", file=out)
            return EXIT_INFEASIBLE
        gap = abs(sol.value - rec.objective)
        thr = 2.0 * s * float(np.linalg.norm(inst.c))
        checked = rec.k >= settled_from
        if checked and not gap <= thr:
            ok = False
        w.writerow([rec.k, _fmt(sol.value), _fmt(rec.objective), _fmt(gap), _fmt(thr), int(checked)]
                   + [_fmt(v) for v in rec.g0])
    return EXIT_OK if ok else EXIT_GAP


COMMANDS = {"quest": cmd_quest, "target": cmd_target, "solve": cmd_solve, "oracle-check": cmd_oracle_check}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        scn, z0 = load_run_inputs(args.scenario, args.L)
    except ContractError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    out = (open(args.out, "w", encoding="utf-8", newline="\n") if args.out
           else sys.stdout)
    try:
        return COMMANDS[args.command](args, scn, z0, out)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except EmptyRegion:
        print("infeasible", file=out)
        return EXIT_INFEASIBLE
    finally:
        if out is not sys.stdout:
            out.close()


if __name__ == "__main__":
    sys.exit(main())
