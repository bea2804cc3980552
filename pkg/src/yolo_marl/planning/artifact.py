"""Provenance-tracked planning function definitions."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

from ..envs.core import EnvId
from ..errors import ConfigError


@dataclass(frozen=True)
class PlanningArtifact:
    """Either the built-in reference planner or an external generated program.

    External artifacts carry the full generated source, the hash of the
    prompt that produced them and the model id; reference artifacts carry
    neither.
    """

    kind: str  # "reference" | "external"
    env_id: EnvId
    source_text: str = ""
    strategy_text: str | None = None
    prompt_hash: str | None = None
    created_at: str | None = None
    model_id: str | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("reference", "external"):
            raise ConfigError(f"unknown artifact kind {self.kind!r}", field="artifact.kind")
        if self.kind == "external":
            if not self.prompt_hash:
                raise ConfigError("external artifacts must carry prompt_hash",
                                  field="artifact.prompt_hash")
            if not self.model_id:
                raise ConfigError("external artifacts must carry model_id",
                                  field="artifact.model_id")
            if not self.source_text:
                raise ConfigError("external artifacts must carry source_text",
                                  field="artifact.source_text")
        else:
            if self.prompt_hash or self.model_id:
                raise ConfigError("reference artifacts carry no prompt_hash or model_id",
                                  field="artifact.kind")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["env_id"] = self.env_id.value
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PlanningArtifact":
        d = dict(d)
        d["env_id"] = EnvId(d["env_id"])
        return cls(**d)


def reference_artifact(env_id: EnvId | str) -> PlanningArtifact:
    return PlanningArtifact(kind="reference", env_id=EnvId(env_id), source_text="builtin")
