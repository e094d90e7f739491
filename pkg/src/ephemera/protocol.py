"""Query/respond/deliver: an agent that cannot handle a visible target
broadcasts a color question; the nearest in-range knower answers with a
serialized skill subtree; the querier merges it into store and tree.

Queries emitted at iteration t are resolved at the start of t+1 against the
positions and knowledge holding then; answering never mutates the responder.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence as SequenceT

from . import events as ev
from .bt import COLORS, Color, ParseError, graft, make_knowledge_subtree, parse, prune, serialize
from .knowledge import CapacityPolicy, LearnOutcome


@dataclass(frozen=True, slots=True)
class QueryMessage:
    querier: int
    color: Color
    emitted_at: int


@dataclass(frozen=True, slots=True)
class Delivery:
    querier: int
    responder: int
    payload: str  # serialized skill subtree, canonical grammar
    delivered_at: int


class ProtocolError(RuntimeError):
    """A payload failed to parse or validate; indicates an implementation bug."""


def emit_query(agent, perception, now: int, query_cooldown: int) -> Optional[QueryMessage]:
    """Broadcast a question for the nearest visible unknown color.

    Returns None while the agent's cooldown is running. Distance ties break
    toward the canonical color order.
    """
    if now < agent.cooldown_until:
        return None
    best_d: Optional[int] = None
    best_color: Optional[Color] = None
    store = agent.store
    for color in COLORS:
        if perception.sees(color) and not store.knows(color):
            d = perception.nearest_distance(color)
            if best_d is None or d < best_d:
                best_d, best_color = d, color
    if best_color is None:
        return None
    message = QueryMessage(agent.id, best_color, now)
    agent.cooldown_until = now + query_cooldown
    agent.pending_query = message
    return message


def merge_payload(
    querier,
    responder_id: int,
    payload: str,
    expected_color: Color,
    now: int,
    memory_duration: int,
    policy: CapacityPolicy,
    event_log: list[ev.EventRecord],
) -> None:
    """Querier side of a delivery: parse, validate, learn, and graft.

    Appends Forget (capacity eviction), Delivery, or Reject records to
    ``event_log``; a Delivery record is written only when the store kept the
    skill, so replaying the log reproduces knowledge exactly.
    """
    try:
        subtree = parse(payload)
    except ParseError as exc:
        raise ProtocolError(f"undecodable payload {payload!r}: {exc}") from exc
    if subtree != make_knowledge_subtree(expected_color):
        raise ProtocolError(
            f"payload {payload!r} is not the skill subtree for {expected_color.label}"
        )
    result = querier.store.learn(
        expected_color, now, memory_duration, policy, taught_by=responder_id
    )
    if result.outcome is LearnOutcome.REJECTED_FULL:
        event_log.append(ev.EventRecord(now, ev.REJECT, querier.id, expected_color, responder_id))
        return
    if result.outcome in (LearnOutcome.MERGED, LearnOutcome.EVICTED):
        if result.victim is not None:
            querier.tree = prune(querier.tree, result.victim)
            event_log.append(ev.EventRecord(now, ev.FORGET, querier.id, result.victim))
        querier.tree = graft(querier.tree, expected_color)
    event_log.append(ev.EventRecord(now, ev.DELIVERY, querier.id, expected_color, responder_id))


def resolve_and_deliver(
    pending: SequenceT[QueryMessage],
    agents,
    now: int,
    comm_radius: int,
    memory_duration: int,
    policy: CapacityPolicy,
    event_log: list[ev.EventRecord],
) -> list[Delivery]:
    """Resolve last iteration's queries in ascending querier ID.

    ``agents`` is indexed by agent ID. For each query the nearest agent
    within ``comm_radius`` (Chebyshev) that currently knows the color answers
    (ties to the lowest ID); the querier merges the answer immediately, so a
    skill learned here can answer a later query in the same pass. Queries
    with no responder lapse.
    """
    deliveries: list[Delivery] = []
    for message in sorted(pending, key=lambda m: m.querier):
        querier = agents[message.querier]
        querier.pending_query = None
        qx, qy = querier.x, querier.y
        color = message.color
        best_d: Optional[int] = None
        best_id: Optional[int] = None
        for other in agents:
            if other.id == message.querier or not other.store.knows(color):
                continue
            dx = other.x - qx
            dy = other.y - qy
            d = max(dx if dx >= 0 else -dx, dy if dy >= 0 else -dy)
            if d <= comm_radius and (best_d is None or d < best_d):
                best_d, best_id = d, other.id
        if best_id is None:
            continue
        payload = serialize(make_knowledge_subtree(color))
        merge_payload(querier, best_id, payload, color, now, memory_duration, policy, event_log)
        deliveries.append(Delivery(message.querier, best_id, payload, now))
    return deliveries
