"""Execution vehicle for externally supplied planner programs.

An external artifact's source is materialized into a temp directory and run
as a Python subprocess speaking protocol v1. One session serves a whole
training run; it is not shared across threads.
"""

from __future__ import annotations

import sys
import tempfile
from pathlib import Path

from ..envs.core import EnvSpec
from ..errors import ConfigError
from ..interp import InterpretedState
from .artifact import PlanningArtifact
from .protocol import DEFAULT_TIMEOUT, PlannerClient


class ExternalPlanner:
    """Running planner subprocess bound to one artifact."""

    def __init__(self, artifact: PlanningArtifact, spec: EnvSpec,
                 timeout: float = DEFAULT_TIMEOUT):
        if artifact.kind != "external":
            raise ConfigError("ExternalPlanner requires an external artifact",
                              field="artifact.kind")
        if artifact.env_id is not spec.env_id:
            raise ConfigError(
                f"artifact is for {artifact.env_id.value}, spec is {spec.env_id.value}",
                field="artifact.env_id")
        self.artifact = artifact
        self.spec = spec
        self._tmp = tempfile.TemporaryDirectory(prefix="planner-")
        program = Path(self._tmp.name) / "planner.py"
        program.write_text(artifact.source_text, encoding="utf-8")
        self.client = PlannerClient([sys.executable, str(program)], spec, timeout=timeout)

    def start(self) -> "ExternalPlanner":
        self.client.start()
        return self

    def plan(self, state: InterpretedState) -> list[str]:
        return self.client.plan(state)

    def close(self) -> None:
        self.client.close()
        self._tmp.cleanup()

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.close()


def run_external_planner(planner: ExternalPlanner, state: InterpretedState) -> list[str]:
    """One request/response on an already started and handshaken session."""
    return planner.plan(state)
