"""Serve the built-in reference planner over protocol v1 on stdio.

Run as ``python -m yolo_marl.planning.serve_reference``. Used to exercise the
wire protocol against a known-good planner and as a template for external
planner programs.
"""

from __future__ import annotations

import json
import sys

from ..envs.core import EnvId
from ..envs.sampling import default_config
from ..envs.core import make_spec
from ..interp import AgentView, InterpretedState, RelativeEntry, TargetView
from .reference import plan_reference


def state_from_payload(payload: dict) -> InterpretedState:
    agents = [AgentView(id=a["id"], position=tuple(a["position"]),
                        level=a.get("level"),
                        velocity=tuple(a["velocity"]) if "velocity" in a else None)
              for a in payload["agents"]]
    targets = [TargetView(id=t["id"], kind=t["kind"], position=tuple(t["position"]),
                          active=t["active"], level=t.get("level"))
               for t in payload["targets"]]
    relative = [[RelativeEntry(offset=tuple(r["offset"]), distance=r["distance"])
                 for r in row] for row in payload["relative"]]
    return InterpretedState(env_id=EnvId(payload["env"]), agents=agents,
                            targets=targets, relative=relative)


def serve(stdin=None, stdout=None) -> None:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout

    def emit(obj):
        stdout.write(json.dumps(obj) + "\n")
        stdout.flush()

    handshake = json.loads(stdin.readline())
    spec = make_spec(default_config(handshake["env"], handshake["n_agents"]))
    emit({"ok": True})

    for line in stdin:
        line = line.strip()
        if not line:
            continue
        req = json.loads(line)
        labels = plan_reference(state_from_payload(req["state"]), spec)
        emit({"seq": req["seq"], "assignments": labels})


if __name__ == "__main__":
    serve()
