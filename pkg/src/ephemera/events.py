"""Trial event log records.

Line format: ``t,kind,agent,color[,counterpart]``. One record per knowledge
delivery, forget (expiry or capacity eviction), target capture, or rejected
delivery; the counterpart field names the responder for Delivery/Reject.
"""

from __future__ import annotations

from typing import NamedTuple, Optional

from .bt import Color, color_from_label

DELIVERY = "Delivery"
FORGET = "Forget"
CAPTURE = "Capture"
REJECT = "Reject"

KINDS = (DELIVERY, FORGET, CAPTURE, REJECT)


class EventRecord(NamedTuple):
    t: int
    kind: str
    agent: int
    color: Color
    counterpart: Optional[int] = None

    def line(self) -> str:
        base = f"{self.t},{self.kind},{self.agent},{self.color.label}"
        if self.counterpart is None:
            return base
        return f"{base},{self.counterpart}"


def parse_event_line(line: str) -> EventRecord:
    fields = line.strip().split(",")
    if len(fields) not in (4, 5):
        raise ValueError(f"malformed event line: {line!r}")
    t, kind, agent = int(fields[0]), fields[1], int(fields[2])
    if kind not in KINDS:
        raise ValueError(f"unknown event kind: {kind!r}")
    color = color_from_label(fields[3])
    counterpart = int(fields[4]) if len(fields) == 5 else None
    return EventRecord(t, kind, agent, color, counterpart)
