"""Pydantic report models shared by validation, diagnostics and the CLI.

The models provide type safety and serialization for:
- Assumption checks on a problem and its communication graph
- KKT residuals of a primal/multiplier pair
- Run summaries written next to telemetry files
"""

from typing import List, Optional

from pydantic import BaseModel, Field


class AssumptionCheck(BaseModel):
    """Outcome of one standing-assumption check.

    :param name: Short identifier (connectivity, convexity, slater, ...)
    :type name: str
    :param passed: True/False, or None when the check does not apply
    :type passed: Optional[bool]
    :param reason: Human-readable explanation
    :type reason: str
    """

    name: str
    passed: Optional[bool]
    reason: str = ""


class ValidationReport(BaseModel):
    """Collection of assumption checks for one problem and graph.

    :param checks: Checks in evaluation order
    :type checks: List[AssumptionCheck]
    """

    checks: List[AssumptionCheck] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        """True when no applicable check failed."""
        return all(c.passed is not False for c in self.checks)

    def get(self, name: str) -> Optional[AssumptionCheck]:
        return next((c for c in self.checks if c.name == name), None)

    def failures(self) -> List[AssumptionCheck]:
        return [c for c in self.checks if c.passed is False]


class KktReport(BaseModel):
    """Optimality residuals of a primal point and stacked multipliers.

    All residuals are infinity norms and vanish exactly at an optimal
    pair.

    :param stationarity: ``||P(x - g(x) + W^T lambda_bar) - x||``
    :type stationarity: float
    :param feasibility: ``||W x - d0||``
    :type feasibility: float
    :param consensus: ``||L lambda||``, or the spread around the mean
        when no graph is given
    :type consensus: float
    :param lambda_bar: Mean of the agent multipliers
    :type lambda_bar: List[float]
    """

    stationarity: float = Field(ge=0.0)
    feasibility: float = Field(ge=0.0)
    consensus: float = Field(ge=0.0)
    lambda_bar: List[float]

    @property
    def max_residual(self) -> float:
        return max(self.stationarity, self.feasibility, self.consensus)


class StepChange(BaseModel):
    """Step-size change made by the chattering guard.

    :param step_index: Euler step at which the change took effect
    :param time: Simulated time of the change
    :param old_step: Step size before
    :param new_step: Step size after
    """

    step_index: int
    time: float
    old_step: float
    new_step: float


class RunSummary(BaseModel):
    """Summary of one simulated run.

    :param name: Built-in name or config stem
    :type name: str
    :param algorithm: ``dpofa`` or ``ddfa``
    :type algorithm: str
    :param converged: True iff the stop rule fired before ``t_end``
    :type converged: bool
    :param stop_reason: ``tolerance`` or ``t_end``
    :type stop_reason: str
    :param steps: Euler steps taken
    :type steps: int
    :param final_time: Simulated time at the end of the run
    :type final_time: float
    :param initial_step: Step size at the start
    :type initial_step: float
    :param final_step: Step size at the end
    :type final_step: float
    :param wall_time_s: Wall-clock duration in seconds
    :type wall_time_s: float
    :param objective: ``f(x)`` at the end
    :type objective: float
    :param eq_residual_sq: ``||W x - d0||^2`` at the end
    :type eq_residual_sq: float
    :param kkt: Final KKT residuals
    :type kkt: KktReport
    :param oracle_gap: ``||x(T) - x*||`` against a fixture, if any
    :type oracle_gap: Optional[float]
    :param z_mass_drift: Largest drift of the summed ``z`` blocks
    :type z_mass_drift: float
    :param max_set_violation: Largest distance of ``x`` from its set
    :type max_set_violation: float
    :param step_changes: Step halvings made by the chattering guard
    :type step_changes: List[StepChange]
    :param final_x: Primal output at the end
    :type final_x: List[float]
    """

    name: str
    algorithm: str
    converged: bool
    stop_reason: str
    steps: int
    final_time: float
    initial_step: float
    final_step: float
    wall_time_s: float
    objective: float
    eq_residual_sq: float
    kkt: KktReport
    oracle_gap: Optional[float] = None
    z_mass_drift: float = 0.0
    max_set_violation: float = 0.0
    step_changes: List[StepChange] = Field(default_factory=list)
    final_x: List[float] = Field(default_factory=list)

    def to_text(self) -> str:
        """Render the plain-text report."""
        gap = "n/a" if self.oracle_gap is None else f"{self.oracle_gap:.6e}"
        lines = [
            f"run: {self.name}",
            f"algorithm: {self.algorithm}",
            f"converged: {'yes' if self.converged else 'no'}",
            f"stop_reason: {self.stop_reason}",
            f"steps: {self.steps}",
            f"final_time: {self.final_time:.6g}",
            f"step: {self.initial_step:.6g} -> {self.final_step:.6g}",
            f"wall_time_s: {self.wall_time_s:.3f}",
            f"objective: {self.objective:.12g}",
            f"eq_residual_sq: {self.eq_residual_sq:.6e}",
            f"stationarity: {self.kkt.stationarity:.6e}",
            f"feasibility: {self.kkt.feasibility:.6e}",
            f"consensus: {self.kkt.consensus:.6e}",
            f"lambda_bar: {', '.join(f'{v:.9g}' for v in self.kkt.lambda_bar)}",
            f"oracle_gap: {gap}",
            f"z_mass_drift: {self.z_mass_drift:.3e}",
            f"max_set_violation: {self.max_set_violation:.3e}",
        ]
        for change in self.step_changes:
            lines.append(
                f"step_change: step {change.step_index} t={change.time:.6g} "
                f"h {change.old_step:.6g} -> {change.new_step:.6g}"
            )
        return "\n".join(lines) + "\n"
