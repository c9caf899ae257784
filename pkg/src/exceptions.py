"""
Custom exceptions for the road-map planning benchmark.
"""


class PlanningError(Exception):
    """Base exception for all planning-related errors."""

    pass


class RasterIOError(PlanningError):
    """Raster or overlay file could not be read or written."""

    pass


class RasterFormatError(PlanningError):
    """Raster content is malformed or uses an unsupported property."""

    pass


class GridBoundsError(PlanningError):
    """A cell lies outside the grid it was used with."""

    def __init__(self, x: int, y: int, width: int, height: int, what: str = "cell"):
        self.x = x
        self.y = y
        super().__init__(f"{what} ({x},{y}) outside {width}x{height} grid")


class ContractError(PlanningError):
    """A documented precondition of an operation was violated."""

    pass


class ParameterError(PlanningError, ValueError):
    """Invalid parameter value or unknown parameter key."""

    pass


class PlanningInputError(PlanningError):
    """Start or goal cell is unusable (out of bounds or impassable)."""

    pass


class OracleGuardError(PlanningError):
    """Reference solver invoked on a grid larger than its guard allows."""

    pass


class ScenarioError(PlanningError):
    """Scenario document is invalid; lists every problem found."""

    def __init__(self, scenario: str, problems: list[str]):
        self.scenario = scenario
        self.problems = list(problems)
        super().__init__(f"Invalid scenario '{scenario}': {'; '.join(self.problems)}")


class UsageError(PlanningError):
    """Command-line arguments could not be parsed."""

    pass
