"""Exception hierarchy shared across the package."""


class YoloMarlError(Exception):
    """Base class for all package errors."""


class ConfigError(YoloMarlError):
    """Invalid configuration. Carries the offending field name when known."""

    def __init__(self, message, field=None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field


class ContractViolationError(YoloMarlError):
    """Caller passed malformed data (wrong action length, bad index, shape mismatch)."""


class InterpretationError(YoloMarlError):
    """State vector does not match the environment layout it was paired with."""


class PlannerProtocolError(YoloMarlError):
    """External planner violated the wire protocol (bad JSON, bad seq, crash)."""


class PlannerInvalidLabelError(PlannerProtocolError):
    """External planner returned an assignment label outside the assignment set."""


class PlannerTimeoutError(YoloMarlError):
    """External planner failed to answer within the deadline."""


class OptimizerError(YoloMarlError):
    """Non-finite gradients or optimizer state; the run must abort with diagnostics."""


class TrainingAbortError(YoloMarlError):
    """Training loop aborted; partial run state is preserved by the harness."""


class GenerationError(YoloMarlError):
    """LLM pipeline failed to produce a valid planning artifact."""


class OfflineError(YoloMarlError):
    """A network call was requested while offline mode is active."""


class IntegrityError(YoloMarlError):
    """Stored artifact failed its checksum; names the corrupt file."""


class ComparisonError(YoloMarlError):
    """Run sets passed to the comparison tool are not comparable."""
