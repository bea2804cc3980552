from .admissible import MPE_DEAD_BAND, admissible_actions
from .artifact import PlanningArtifact, reference_artifact
from .external import ExternalPlanner, run_external_planner
from .protocol import DEFAULT_TIMEOUT, PROTOCOL_NAME, PlannerClient
from .reference import plan_reference
from .scripted import ScriptedLbfPolicy
from .validate import ValidationReport, validate_artifact

__all__ = [
    "MPE_DEAD_BAND", "admissible_actions", "PlanningArtifact", "reference_artifact",
    "ExternalPlanner", "run_external_planner", "DEFAULT_TIMEOUT", "PROTOCOL_NAME",
    "PlannerClient", "plan_reference", "ScriptedLbfPolicy", "ValidationReport",
    "validate_artifact",
]
