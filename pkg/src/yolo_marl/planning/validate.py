"""Sampling-based validation of planning artifacts.

Guards training against erroneous planner programs: the planner is driven
over states collected from seeded random rollouts, and every deviation
(invalid label, timeout, crash, malformed message) is counted instead of
raised. An artifact passes only with zero failures.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..envs.core import EnvSpec, make_spec
from ..envs.sampling import default_config, sample_rollout_states
from ..errors import (PlannerInvalidLabelError, PlannerProtocolError,
                      PlannerTimeoutError)
from ..interp import interpret
from .artifact import PlanningArtifact
from .external import ExternalPlanner
from .protocol import DEFAULT_TIMEOUT
from .reference import plan_reference


@dataclass
class ValidationReport:
    n_samples: int
    n_completed: int = 0
    invalid_label_count: int = 0
    timeout_count: int = 0
    exception_count: int = 0
    protocol_error_count: int = 0
    failures: list[str] = field(default_factory=list)  # first few messages

    _MAX_MESSAGES = 10

    @property
    def failure_count(self) -> int:
        return (self.invalid_label_count + self.timeout_count
                + self.exception_count + self.protocol_error_count)

    @property
    def passed(self) -> bool:
        return self.failure_count == 0 and self.n_completed == self.n_samples

    def record(self, counter: str, message: str) -> None:
        setattr(self, counter, getattr(self, counter) + 1)
        if len(self.failures) < self._MAX_MESSAGES:
            self.failures.append(message)

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status}: {self.n_completed}/{self.n_samples} responses, "
                f"{self.invalid_label_count} invalid labels, {self.timeout_count} timeouts, "
                f"{self.protocol_error_count} protocol errors, "
                f"{self.exception_count} exceptions")


def validate_artifact(artifact: PlanningArtifact, spec: EnvSpec, n_samples: int,
                      seed: int, timeout: float = DEFAULT_TIMEOUT) -> ValidationReport:
    """Drive the planner over ``n_samples`` rollout states; never raises
    planner-side errors. Timeouts and crashes end the run early (the session
    is gone); invalid labels keep sampling."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    cfg = default_config(spec.env_id, spec.n_agents)
    states = [interpret(s, make_spec(cfg))
              for s in sample_rollout_states(cfg, n_samples, seed)]
    report = ValidationReport(n_samples=n_samples)

    if artifact.kind == "reference":
        for s in states:
            try:
                labels = plan_reference(s, spec)
            except Exception as exc:  # reference is total; belt and braces
                report.record("exception_count", f"reference planner raised: {exc!r}")
                continue
            bad = [lab for lab in labels if lab not in spec.assignment_set]
            if bad or len(labels) != spec.n_agents:
                report.record("invalid_label_count", f"invalid labels {bad!r}")
            else:
                report.n_completed += 1
        return report

    planner = ExternalPlanner(artifact, spec, timeout=timeout)
    try:
        try:
            planner.start()
        except (PlannerTimeoutError, PlannerProtocolError, OSError) as exc:
            counter = ("timeout_count" if isinstance(exc, PlannerTimeoutError)
                       else "exception_count")
            report.record(counter, f"startup failed: {exc}")
            return report
        for s in states:
            try:
                planner.plan(s)
            except PlannerInvalidLabelError as exc:
                report.record("invalid_label_count", str(exc))
                continue
            except PlannerTimeoutError as exc:
                report.record("timeout_count", str(exc))
                break  # session can no longer be trusted to stay in sync
            except PlannerProtocolError as exc:
                report.record("protocol_error_count", str(exc))
                break
            report.n_completed += 1
    finally:
        planner.close()
    return report
