"""Structured exception classes for distributed EMO solvers."""

import json
from typing import Any, Dict, List, Optional


class EmoError(Exception):
    """Base exception for all distributed EMO errors.

    Every error raised by the package carries a stable ``code`` for
    programmatic handling and a ``details`` mapping with the numbers that
    explain the failure (agent index, step index, residuals).

    :param message: Human-readable error message
    :param code: Optional error code for programmatic handling
    :param details: Optional dictionary containing additional error context
    """

    def __init__(
        self,
        message: str,
        code: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None,
    ):
        super().__init__(message)
        self.message = message
        self.code = code or self.__class__.__name__
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        """Convert exception to dictionary format.

        :return: Dictionary containing error code, message, and details
        """
        return {
            "error": self.code,
            "message": self.message,
            "details": self.details,
        }

    def to_json(self) -> str:
        """Convert exception to JSON string.

        :return: JSON-encoded string representation of the exception
        """
        return json.dumps(self.to_dict(), default=str)


class ValidationError(EmoError):
    """Raised when problem, set, graph or objective data is invalid.

    :param message: Description of the validation error
    :param field: Optional name of the field that failed validation
    :param value: Optional value that caused the validation failure
    """

    def __init__(
        self,
        message: str,
        field: Optional[str] = None,
        value: Optional[Any] = None,
    ):
        details: Dict[str, Any] = {}
        if field:
            details["field"] = field
        if value is not None:
            details["value"] = str(value)
        super().__init__(
            message=message, code="VALIDATION_ERROR", details=details
        )
        self.field = field


class DimensionError(ValidationError):
    """Raised when array shapes disagree with the stacked problem layout.

    :param message: Description of the mismatch
    :param agent_index: Index of the offending agent, when known
    :param expected: Expected shape or length
    :param actual: Shape or length that was received
    """

    def __init__(
        self,
        message: str,
        agent_index: Optional[int] = None,
        expected: Optional[Any] = None,
        actual: Optional[Any] = None,
    ):
        super().__init__(message, field="shape")
        self.code = "DIMENSION_ERROR"
        self.agent_index = agent_index
        if agent_index is not None:
            self.details["agent_index"] = agent_index
        if expected is not None:
            self.details["expected"] = str(expected)
        if actual is not None:
            self.details["actual"] = str(actual)


class ConnectivityError(ValidationError):
    """Raised when the communication graph is not connected.

    :param message: Description of the failure
    :param components: Node sets of the connected components
    """

    def __init__(
        self, message: str, components: Optional[List[List[int]]] = None
    ):
        super().__init__(message, field="graph")
        self.code = "CONNECTIVITY_ERROR"
        self.components = components or []
        self.details["components"] = self.components


class ConfigurationError(EmoError):
    """Raised for configuration-related errors.

    :param message: Description of the configuration error
    :param setting: Optional name of the problematic setting
    """

    def __init__(self, message: str, setting: Optional[str] = None):
        details = {}
        if setting:
            details["setting"] = setting
        super().__init__(
            message=message, code="CONFIGURATION_ERROR", details=details
        )
        self.setting = setting


class PreconditionError(EmoError):
    """Raised when an operation is called outside its preconditions.

    :param message: Description of the violated precondition
    :param parameter: Optional name of the offending parameter
    """

    def __init__(self, message: str, parameter: Optional[str] = None):
        details = {}
        if parameter:
            details["parameter"] = parameter
        super().__init__(
            message=message, code="PRECONDITION_ERROR", details=details
        )
        self.parameter = parameter


class InfeasibleProblemError(ValidationError):
    """Raised when problem data admits no feasible point.

    :param message: Description of the infeasibility
    :param residual: Size of the violated balance, when measurable
    """

    def __init__(self, message: str, residual: Optional[float] = None):
        super().__init__(message, field="supply")
        self.code = "INFEASIBLE_PROBLEM"
        if residual is not None:
            self.details["residual"] = residual


class IntegrationError(EmoError):
    """Raised when a simulated trajectory becomes numerically invalid.

    :param message: Description of the integration fault
    :param step: Index of the Euler step where the fault was detected
    :param component: Optional name of the state block that failed
    """

    def __init__(
        self,
        message: str,
        step: Optional[int] = None,
        component: Optional[str] = None,
    ):
        details: Dict[str, Any] = {}
        if step is not None:
            details["step"] = step
        if component:
            details["component"] = component
        super().__init__(
            message=message, code="INTEGRATION_ERROR", details=details
        )
        self.step = step


class OracleConvergenceError(EmoError):
    """Raised when the centralized reference solver does not converge.

    :param message: Description of the failure
    :param best_residual: Smallest KKT residual reached
    :param iterations: Number of iterations spent
    """

    def __init__(
        self,
        message: str,
        best_residual: Optional[float] = None,
        iterations: Optional[int] = None,
    ):
        details: Dict[str, Any] = {}
        if best_residual is not None:
            details["best_residual"] = best_residual
        if iterations is not None:
            details["iterations"] = iterations
        super().__init__(
            message=message, code="ORACLE_CONVERGENCE_ERROR", details=details
        )
        self.best_residual = best_residual


class EquilibriumError(EmoError):
    """Raised when an equilibrium cannot be built from given optimality data.

    :param message: Description of the failure
    :param residual: Residual of the Laplacian system for ``z*``
    """

    def __init__(self, message: str, residual: Optional[float] = None):
        details: Dict[str, Any] = {}
        if residual is not None:
            details["residual"] = residual
        super().__init__(
            message=message, code="EQUILIBRIUM_ERROR", details=details
        )


class FixtureError(EmoError):
    """Raised when an oracle fixture file is missing or malformed.

    :param message: Description of the fixture problem
    :param path: Path of the fixture file
    """

    def __init__(self, message: str, path: Optional[str] = None):
        details = {}
        if path:
            details["path"] = path
        super().__init__(message=message, code="FIXTURE_ERROR", details=details)
