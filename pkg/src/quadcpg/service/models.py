"""Pydantic request/response models for the wire protocol.

Commands travel as one JSON document per message:
  {"type": "set_gait", "gait": "trot", "seq": 7}
Replies mirror the sequence number:
  {"ok": true, "seq": 7}  /  {"ok": false, "reason": "...", "seq": 7}
Telemetry frames are serialized by quadcpg.session.frame_to_json so the bytes
match session records exactly.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class CommandRequest(BaseModel):
    type: Literal["set_gait", "set_turn", "set_frequency", "stop", "inject_delta"]
    gait: Optional[str] = None
    direction: Optional[Literal["left", "right", "none"]] = None
    hz: Optional[float] = None
    delta: Optional[list[list[float]]] = None
    seq: int = Field(ge=0)
    client: Optional[str] = None

    def payload(self) -> dict:
        """The command dict applied to the runtime (wire bookkeeping stripped)."""
        doc = {"type": self.type}
        if self.gait is not None:
            doc["gait"] = self.gait
        if self.direction is not None:
            doc["direction"] = self.direction
        if self.hz is not None:
            doc["hz"] = self.hz
        if self.delta is not None:
            doc["delta"] = self.delta
        return doc


class CommandReply(BaseModel):
    ok: bool
    seq: Optional[int] = None
    reason: Optional[str] = None


class GaitInfo(BaseModel):
    name: str
    frequency_hz: float
    offsets: list[float]  # cycle fractions


class StatusResponse(BaseModel):
    running: bool
    tick: int
    gait: str
    rate_hz: float
    internal_dt: float
    frequency_hz: float
    clients: int
    config_hash: str
