"""Budget-constrained design: maximize detection or minimize expected losses.

Both problems share one decision space: pick a sensor density and an alarm
threshold from a grid, spend the leftover budget on UAVs (integer count), and
score the resulting deployment with the analytical chain.  Problem one
maximizes the detection probability within the critical window at a single
budget; problem two minimizes expected losses (hardware spend plus
quadratic-in-time damage weighted by the detection-time distribution) over a
budget grid.

Every grid cell is independent, so cells are fanned out over a thread pool;
the compiled kernels release the GIL.  Ties are broken toward the smaller
spend, then the smaller threshold, scanning budgets, densities and thresholds
in ascending order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .detection import QuadratureSpec
from .dtmc import DetectionCurve, detection_curve
from .errors import InfeasibleError, ScenarioError
from .kernels import resolve_threads
from .scenario import ScenarioParams

__all__ = [
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
]


@dataclass(frozen=True)
class PlanGrid:
    """Search grid over sensor density and alarm threshold."""

    densities: tuple[float, ...] = tuple(float(d) for d in range(10, 401, 10))
    thresholds: tuple[int, ...] = tuple(range(1, 33))

    def __post_init__(self) -> None:
        if not self.densities or not self.thresholds:
            raise ScenarioError("plan grid must have at least one density and one threshold")
        if any(d <= 0 for d in self.densities):
            raise ScenarioError("grid densities must be positive")
        if any(not isinstance(m, int) or m < 1 for m in self.thresholds):
            raise ScenarioError("grid thresholds must be integers >= 1")


@dataclass(frozen=True)
class CostModel:
    """Hardware prices and the quadratic damage weight."""

    sensor_cost: float
    uav_cost: float
    damage_coeff: float
    fallback_time_min: float

    @classmethod
    def from_scenario(cls, params: ScenarioParams) -> "CostModel":
        return cls(
            sensor_cost=params.sensor_cost,
            uav_cost=params.uav_cost,
            damage_coeff=params.damage_coeff,
            fallback_time_min=params.fallback_time_min,
        )

    def damage(self, t_min: float) -> float:
        """Loss from a fire first handled at time t_min after ignition."""
        return self.damage_coeff * t_min * t_min


@dataclass(frozen=True)
class CellEval:
    budget: float
    density: float
    num_uavs: int
    threshold: int
    spend: float
    objective: float


@dataclass(frozen=True)
class PlanResult:
    budget: float
    density: float
    num_uavs: int
    threshold: int
    spend: float
    objective: float


@dataclass(frozen=True)
class BudgetPoint:
    budget: float
    objective: float
    density: float
    num_uavs: int
    threshold: int
    spend: float


@dataclass(frozen=True)
class DetectionPlan:
    budget: float
    best: PlanResult
    cells: tuple[CellEval, ...]


@dataclass(frozen=True)
class LossPlan:
    damage_coeff: float
    best: PlanResult
    cells: tuple[CellEval, ...]
    by_budget: tuple[BudgetPoint, ...]


def default_budget_grid(points: int = 25) -> np.ndarray:
    return np.logspace(4, 7, points)


def budget_to_uavs(budget: float, n_sensors: float, sensor_cost: float, uav_cost: float) -> int:
    """UAVs affordable after buying the sensors, exact rational floor."""
    if uav_cost <= 0 or sensor_cost <= 0:
        raise ScenarioError("sensor_cost and uav_cost must be positive")
    remaining = (
        Fraction(str(budget)) - Fraction(str(sensor_cost)) * Fraction(str(n_sensors))
    )
    if remaining < 0:
        raise InfeasibleError(
            f"budget {budget} cannot even buy the {n_sensors:.0f} sensors"
        )
    return int(remaining // Fraction(str(uav_cost)))


def no_system_loss(params: ScenarioParams) -> float:
    """Expected loss with no detection system: the fire burns to self-report."""
    t = params.fallback_time_min
    return params.damage_coeff * (t * t)


def _damage_integral(curve: DetectionCurve, n_steps: int) -> float:
    """Expected squared handling time over the fallback horizon (damage/omega_d)."""
    t = np.asarray(curve.t_min[:n_steps])
    rho = np.asarray(curve.rho_detected[:n_steps])
    t_miss = (n_steps + 1) * curve.params.t_step_min
    return float(np.dot(t * t, rho) + t_miss * t_miss * (1.0 - curve.pi_detected[n_steps - 1]))


def expected_losses(params: ScenarioParams, curve: DetectionCurve) -> float:
    """Hardware spend plus expected quadratic damage over the fallback horizon.

    The curve must have been built from `params` and span at least the
    fallback horizon.
    """
    if curve.params != params:
        raise ScenarioError("curve was built from different scenario parameters")
    kbar = params.n_steps_fallback
    if len(curve) < kbar:
        raise ScenarioError(
            f"curve spans {len(curve)} steps but the fallback horizon needs {kbar}"
        )
    cost = CostModel.from_scenario(params)
    spend = cost.sensor_cost * params.n_sensors + cost.uav_cost * params.num_uavs
    return spend + params.damage_coeff * _damage_integral(curve, kbar)


def _feasible_cell(
    template: ScenarioParams, density: float, num_uavs: int, threshold: int
) -> ScenarioParams | None:
    try:
        return replace(
            template,
            sensor_density_per_km2=density,
            num_uavs=num_uavs,
            flag_threshold=threshold,
        )
    except ScenarioError:
        return None


def _run_cells(tasks, worker, max_workers: int | None):
    workers = max_workers if max_workers is not None else resolve_threads()
    if workers <= 1 or len(tasks) <= 1:
        return [worker(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(worker, tasks))


def _pick_best(cells: list[CellEval], maximize: bool) -> PlanResult:
    best: CellEval | None = None
    for c in cells:
        if best is None:
            best = c
            continue
        better = c.objective > best.objective if maximize else c.objective < best.objective
        if better:
            best = c
        elif c.objective == best.objective and (
            c.spend < best.spend or (c.spend == best.spend and c.threshold < best.threshold)
        ):
            best = c
    assert best is not None
    return PlanResult(
        budget=best.budget,
        density=best.density,
        num_uavs=best.num_uavs,
        threshold=best.threshold,
        spend=best.spend,
        objective=best.objective,
    )


def solve_p1(
    template: ScenarioParams,
    budget: float | None = None,
    grid: PlanGrid | None = None,
    quad: QuadratureSpec = QuadratureSpec(),
    backend: str | None = None,
    max_workers: int | None = None,
) -> DetectionPlan:
    """Maximize detection probability within the critical window at one budget."""
    budget = template.budget if budget is None else float(budget)
    if budget <= 0:
        raise ScenarioError(f"budget must be positive, got {budget}")
    grid = grid or PlanGrid()

    tasks = []
    for density in grid.densities:
        n_sensors = density * template.forest_area_km2
        try:
            n_u = budget_to_uavs(budget, n_sensors, template.sensor_cost, template.uav_cost)
        except InfeasibleError:
            continue
        spend = template.sensor_cost * n_sensors + template.uav_cost * n_u
        for m in grid.thresholds:
            cell = _feasible_cell(template, density, n_u, m)
            if cell is not None:
                tasks.append((cell, spend))
    if not tasks:
        raise InfeasibleError(
            f"budget {budget} admits no feasible (density, threshold) cell"
        )

    def worker(task):
        cell, spend = task
        curve = detection_curve(cell, quad=quad, backend=backend)
        return CellEval(
            budget=budget,
            density=cell.sensor_density_per_km2,
            num_uavs=cell.num_uavs,
            threshold=cell.flag_threshold,
            spend=spend,
            objective=float(curve.pi_detected[-1]),
        )

    cells = _run_cells(tasks, worker, max_workers)
    return DetectionPlan(budget=budget, best=_pick_best(cells, maximize=True), cells=tuple(cells))


def solve_p2(
    template: ScenarioParams,
    budgets=None,
    grid: PlanGrid | None = None,
    damage_coeffs=None,
    quad: QuadratureSpec = QuadratureSpec(),
    backend: str | None = None,
    max_workers: int | None = None,
) -> tuple[LossPlan, ...]:
    """Minimize expected losses over a budget grid, one plan per damage weight.

    The detection curves do not depend on the damage weight, so each grid cell
    is evaluated once and rescored for every requested coefficient.
    """
    budgets = default_budget_grid() if budgets is None else np.asarray(list(budgets), float)
    if budgets.size == 0 or np.any(budgets <= 0):
        raise ScenarioError("budgets must be a nonempty sequence of positive values")
    if damage_coeffs is None:
        damage_coeffs = (template.damage_coeff,)
    damage_coeffs = tuple(float(w) for w in damage_coeffs)
    if any(w <= 0 for w in damage_coeffs):
        raise ScenarioError("damage coefficients must be positive")
    grid = grid or PlanGrid()

    tasks = []
    for budget in budgets:
        budget = float(budget)
        for density in grid.densities:
            n_sensors = density * template.forest_area_km2
            try:
                n_u = budget_to_uavs(budget, n_sensors, template.sensor_cost, template.uav_cost)
            except InfeasibleError:
                continue
            spend = template.sensor_cost * n_sensors + template.uav_cost * n_u
            for m in grid.thresholds:
                cell = _feasible_cell(template, density, n_u, m)
                if cell is not None:
                    tasks.append((budget, cell, spend))
    if not tasks:
        raise InfeasibleError("no budget in the grid admits a feasible cell")

    def worker(task):
        budget, cell, spend = task
        curve = detection_curve(
            cell, quad=quad, n_steps=cell.n_steps_fallback, backend=backend
        )
        return budget, cell, spend, _damage_integral(curve, cell.n_steps_fallback)

    raw = _run_cells(tasks, worker, max_workers)

    plans = []
    for w_d in damage_coeffs:
        cells = [
            CellEval(
                budget=budget,
                density=cell.sensor_density_per_km2,
                num_uavs=cell.num_uavs,
                threshold=cell.flag_threshold,
                spend=spend,
                objective=spend + w_d * integral,
            )
            for budget, cell, spend, integral in raw
        ]
        by_budget = []
        for budget in budgets:
            sub = [c for c in cells if c.budget == float(budget)]
            if sub:
                b = _pick_best(sub, maximize=False)
                by_budget.append(
                    BudgetPoint(
                        budget=b.budget,
                        objective=b.objective,
                        density=b.density,
                        num_uavs=b.num_uavs,
                        threshold=b.threshold,
                        spend=b.spend,
                    )
                )
        plans.append(
            LossPlan(
                damage_coeff=w_d,
                best=_pick_best(cells, maximize=False),
                cells=tuple(cells),
                by_budget=tuple(by_budget),
            )
        )
    return tuple(plans)
