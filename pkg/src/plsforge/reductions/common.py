"""Solution maps shared by every reduction."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

__all__ = ["SolutionMap"]


@dataclass(frozen=True)
class SolutionMap:
    """Metadata needed to turn a target solution back into a source solution.

    ``data`` holds only JSON-friendly values so the map can be written to a
    roles file and read back by a separate process.
    """

    kind: str
    data: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps({"kind": self.kind, "data": self.data}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SolutionMap":
        obj = json.loads(text)
        return cls(obj["kind"], obj["data"])
