"""Planner wire protocol v1: newline-delimited JSON over stdin/stdout.

    runner -> planner  {"protocol": "yolo-marl-plan/1", "env": "lbf",
                        "n_agents": 2, "assignment_set": [...]}
    planner -> runner  {"ok": true}
    runner -> planner  {"seq": 1, "state": {...canonical interpreted state...}}
    planner -> runner  {"seq": 1, "assignments": ["Food0", "Food0"]}

Sequence numbers must echo exactly; any deviation, unknown label, or
malformed line is a protocol error. One request is in flight at a time.
"""

from __future__ import annotations

import json
import queue
import subprocess
import threading

from ..envs.core import EnvSpec
from ..errors import (PlannerInvalidLabelError, PlannerProtocolError,
                      PlannerTimeoutError)
from ..interp import InterpretedState, to_payload

PROTOCOL_NAME = "yolo-marl-plan/1"
DEFAULT_TIMEOUT = 1.0  # seconds per response

_EOF = object()


class PlannerClient:
    """Synchronous single-request-in-flight channel to one planner process."""

    def __init__(self, argv: list[str], spec: EnvSpec, timeout: float = DEFAULT_TIMEOUT):
        self.argv = list(argv)
        self.spec = spec
        self.timeout = timeout
        self._proc: subprocess.Popen | None = None
        self._lines: queue.Queue = queue.Queue()
        self._seq = 0

    # -- lifecycle ---------------------------------------------------------

    def start(self) -> None:
        self._proc = subprocess.Popen(
            self.argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
            stderr=subprocess.DEVNULL, text=True, bufsize=1)
        reader = threading.Thread(target=self._pump, daemon=True)
        reader.start()
        self._send({"protocol": PROTOCOL_NAME, "env": self.spec.env_id.value,
                    "n_agents": self.spec.n_agents,
                    "assignment_set": list(self.spec.assignment_set)})
        reply = self._read()
        if reply.get("ok") is not True:
            raise PlannerProtocolError(f"handshake rejected: {reply!r}")

    def close(self) -> None:
        proc, self._proc = self._proc, None
        if proc is None:
            return
        try:
            if proc.stdin:
                proc.stdin.close()
            proc.terminate()
            proc.wait(timeout=2)
        except Exception:
            proc.kill()

    def __enter__(self):
        self.start()
        return self

    def __exit__(self, *exc):
        self.close()

    def _pump(self):
        proc = self._proc
        assert proc is not None and proc.stdout is not None
        for line in proc.stdout:
            self._lines.put(line)
        self._lines.put(_EOF)

    # -- messaging ---------------------------------------------------------

    def _send(self, obj: dict) -> None:
        proc = self._proc
        if proc is None or proc.stdin is None or proc.poll() is not None:
            raise PlannerProtocolError("planner process is not running")
        try:
            proc.stdin.write(json.dumps(obj, sort_keys=True) + "\n")
            proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise PlannerProtocolError(f"planner closed its input: {exc}") from exc

    def _read(self) -> dict:
        try:
            line = self._lines.get(timeout=self.timeout)
        except queue.Empty:
            raise PlannerTimeoutError(
                f"planner gave no response within {self.timeout:.3f}s") from None
        if line is _EOF:
            code = self._proc.poll() if self._proc else None
            raise PlannerProtocolError(f"planner exited (code {code}) mid-conversation")
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise PlannerProtocolError(f"planner sent invalid JSON: {line!r}") from exc
        if not isinstance(obj, dict):
            raise PlannerProtocolError(f"planner sent a non-object message: {obj!r}")
        return obj

    def plan(self, state: InterpretedState) -> list[str]:
        """Send one request, block for its response, validate the labels."""
        self._seq += 1
        self._send({"seq": self._seq, "state": to_payload(state)})
        reply = self._read()
        if reply.get("seq") != self._seq:
            raise PlannerProtocolError(
                f"sequence mismatch: sent {self._seq}, got {reply.get('seq')!r}")
        labels = reply.get("assignments")
        if not isinstance(labels, list) or len(labels) != self.spec.n_agents:
            raise PlannerProtocolError(
                f"expected {self.spec.n_agents} assignments, got {labels!r}")
        valid = set(self.spec.assignment_set)
        for lab in labels:
            if lab not in valid:
                raise PlannerInvalidLabelError(
                    f"label {lab!r} not in assignment set {sorted(valid)}")
        return [str(lab) for lab in labels]
