"""Exception hierarchy shared by the solvers and the CLI.

Every error carries the process exit code the CLI reports for it:
2 for configuration / usage problems, 3 for numerical or solver failures.
"""


class FingerKitError(Exception):
    """Base class for all toolkit errors."""
    exit_code = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail

    def to_dict(self) -> dict:
        return {"error": type(self).__name__, "detail": self.detail, "exit_code": self.exit_code}


# --- Configuration / usage errors (exit 2) ---
class ConfigurationError(FingerKitError):
    exit_code = 2


class SchemaVersionError(ConfigurationError):
    pass


class InvalidStep(ConfigurationError):
    pass


class OutOfStroke(ConfigurationError):
    pass


# --- Numerical / solver errors (exit 3) ---
class SolverError(FingerKitError):
    exit_code = 3


class Disjoint(SolverError):
    pass


class Contained(SolverError):
    pass


class CoincidentCenters(SolverError):
    pass


class DegenerateSegment(SolverError):
    pass


class TooFewVertices(SolverError):
    pass


class SingularConfiguration(SolverError):
    pass


class RodTooShort(SolverError):
    pass


class EmptyBand(SolverError):
    pass


class DegeneratePath(SolverError):
    pass


class InfeasibleCell(SolverError):
    pass


class InsufficientData(SolverError):
    pass


class NearSingularity(SolverError):
    pass


class TransmissionSingularity(SolverError):
    pass


class DiscontinuousMotion(InfeasibleCell):
    pass
