"""Early-wildfire detection planning for UAV-assisted IoT sensor networks.

Analytical detection-probability curves (stochastic geometry feeding an
absorbing three-state chain), Monte Carlo validation, an air-to-ground link
budget with altitude design, and two budget-constrained planners.
"""

from .detection import (
    QuadratureSpec,
    StepProbabilities,
    detection_prob_given_counts,
    detection_prob_given_overlap,
    false_alarm_probability,
    intersection_probability,
    step_probabilities,
)
from .dtmc import (
    DetectionCurve,
    StateVector,
    StepTransition,
    build_transition,
    detection_curve,
    evolve,
    initial_state,
)
from .errors import InfeasibleError, NumericalError, PyrewatchError, ScenarioError
from .geometry import (
    FireGeometry,
    circle_intersection_area,
    detection_overlap_area,
    fire_geometry_at,
    sensors_in_overlap,
)
from .link_budget import (
    AltitudeDesign,
    average_snr,
    bpsk_ber,
    combined_error,
    coverage_radius_at_height,
    los_probability,
    optimize_altitude,
    repetition_error,
)
from .montecarlo import (
    MonteCarloCurve,
    TrialConfig,
    TrialOutcome,
    run_trials,
    single_step_frequency,
    wilson_halfwidth,
)
from .planner import (
    BudgetPoint,
    CellEval,
    CostModel,
    DetectionPlan,
    LossPlan,
    PlanGrid,
    PlanResult,
    budget_to_uavs,
    default_budget_grid,
    expected_losses,
    no_system_loss,
    solve_p1,
    solve_p2,
)
from .scenario import (
    ChannelParams,
    ScenarioParams,
    derived_step_count,
    load_scenario,
    scenario_from_dict,
    scenario_from_json,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ChannelParams",
    "ScenarioParams",
    "scenario_from_dict",
    "scenario_from_json",
    "load_scenario",
    "derived_step_count",
    "los_probability",
    "average_snr",
    "bpsk_ber",
    "repetition_error",
    "combined_error",
    "coverage_radius_at_height",
    "optimize_altitude",
    "AltitudeDesign",
    "FireGeometry",
    "fire_geometry_at",
    "circle_intersection_area",
    "detection_overlap_area",
    "sensors_in_overlap",
    "QuadratureSpec",
    "StepProbabilities",
    "intersection_probability",
    "false_alarm_probability",
    "detection_prob_given_counts",
    "detection_prob_given_overlap",
    "step_probabilities",
    "StateVector",
    "StepTransition",
    "DetectionCurve",
    "initial_state",
    "build_transition",
    "evolve",
    "detection_curve",
    "TrialConfig",
    "TrialOutcome",
    "MonteCarloCurve",
    "run_trials",
    "single_step_frequency",
    "wilson_halfwidth",
    "PlanGrid",
    "CostModel",
    "CellEval",
    "PlanResult",
    "DetectionPlan",
    "BudgetPoint",
    "LossPlan",
    "budget_to_uavs",
    "no_system_loss",
    "expected_losses",
    "solve_p1",
    "solve_p2",
    "default_budget_grid",
    "PyrewatchError",
    "ScenarioError",
    "NumericalError",
    "InfeasibleError",
]
