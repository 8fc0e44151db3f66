"""Two-phase solver for linear programs whose data drift over time.

The Quest phase drives a point onto the moving feasible polytope with a
Fejer process refreshed every ``L`` iterations; the Targeting phase then
keeps an axisymmetric cross of probe points centred near the optimum.
"""

from .fejer import FejerParams, ProjectionResult, fejer_iterate, fejer_map, pseudo_projection
from .lp_core import (
    ContractError,
    LpInstance,
    NumericalError,
    ParameterError,
    Tolerances,
    augment_nonnegativity,
    is_feasible,
    residual,
)
from .oracle import VertexSolution, exact_distance, exact_lp_solve
from .quest import QuestConfig, QuestFailed, QuestResult, quest_run
from .scenarios import Scenario, instance_at, make_scenario, random_feasible_instance
from .targeting import Cross, LostPolytope, Marker, TargetingState, targeting_run, targeting_step

__version__ = "0.1.0"
