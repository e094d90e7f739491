"""Discrete-time grid world: placement, Chebyshev sensing, phase-ordered
stepping, movement, and target collection.

Each :meth:`Arena.step` advances the clock by one and runs, with agents in
ascending ID order inside every phase:

1. resolve queries emitted last iteration (deliveries mutate queriers),
2. expire learned skills and prune the matching subtrees,
3. sense,
4. tick every agent's tree to one intent; Query intents may emit a query,
5. execute intents (collect / move / stand),
6. record a metrics snapshot on the snapshot grid.

All randomness comes from one splitmix64 stream per trial with a fixed draw
order: placement draws at init (one draw per attempt, targets color-major
then agents by ID; a cell index v maps to x = v % width, y = v // width),
then one draw per exploring agent per iteration, in agent-ID order.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Iterable, Optional

import numpy as np

from . import events as ev
from . import metrics, protocol
from .bt import COLORS, Blackboard, BTNode, Collect, Color, Explore, Query, assemble_agent_tree, prune, tick
from .knowledge import KnowledgeStore
from .protocol import QueryMessage
from .rng import SplitMix64

if TYPE_CHECKING:
    from .experiment import ScenarioConfig

_FAR = 1 << 20  # sentinel distance, larger than any grid diameter
_MOORE = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))


class SetupError(ValueError):
    """The scenario cannot be laid out on the requested grid."""


class RobotType(Enum):
    IGNORANT = "I"
    MASTER = "M"
    RED = "R"
    GREEN = "G"
    YELLOW = "Y"
    BLUE = "B"

    @property
    def innate_colors(self) -> tuple[Color, ...]:
        return _INNATE[self]


_INNATE = {
    RobotType.IGNORANT: (),
    RobotType.MASTER: COLORS,
    RobotType.RED: (Color.RED,),
    RobotType.GREEN: (Color.GREEN,),
    RobotType.YELLOW: (Color.YELLOW,),
    RobotType.BLUE: (Color.BLUE,),
}

# Order of the robot-count tuple in scenario configs.
ROBOT_ORDER = (
    RobotType.IGNORANT,
    RobotType.MASTER,
    RobotType.RED,
    RobotType.GREEN,
    RobotType.YELLOW,
    RobotType.BLUE,
)


@dataclass(frozen=True, slots=True)
class Target:
    id: int
    color: Color
    pos: tuple[int, int]
    alive: bool


class AgentState:
    __slots__ = ("id", "robot_type", "x", "y", "store", "tree", "cooldown_until", "pending_query")

    def __init__(self, agent_id: int, robot_type: RobotType, x: int, y: int,
                 store: KnowledgeStore, tree: BTNode):
        self.id = agent_id
        self.robot_type = robot_type
        self.x = x
        self.y = y
        self.store = store
        self.tree = tree
        self.cooldown_until = 0
        self.pending_query: Optional[QueryMessage] = None

    @property
    def pos(self) -> tuple[int, int]:
        return (self.x, self.y)


class Perception:
    """One agent's view for one iteration: alive targets within the sense
    radius, grouped by color, plus whether some visible color is unhandled."""

    __slots__ = ("pos", "sees_unknown", "_nearest_d", "_nearest_tid", "_sees", "_view")

    def __init__(self, pos, nearest_d, nearest_tid, sees, sees_unknown, view):
        self.pos = pos
        self._nearest_d = nearest_d
        self._nearest_tid = nearest_tid
        self._sees = sees
        self.sees_unknown = sees_unknown
        self._view = view

    def sees(self, color: Color) -> bool:
        return self._sees[color]

    def visible_colors(self) -> tuple[Color, ...]:
        return tuple(c for c in COLORS if self._sees[c])

    def nearest_distance(self, color: Color) -> Optional[int]:
        return self._nearest_d[color] if self._sees[color] else None

    def nearest_target(self, color: Color) -> Optional[int]:
        """ID of the nearest visible target of that color (ties: lowest ID)."""
        return self._nearest_tid[color] if self._sees[color] else None

    def visible(self, color: Color) -> list[tuple[int, int, int]]:
        """All visible targets of that color as (target_id, x, y), ID order."""
        if not self._sees[color]:
            return []
        d, row, live_ids, live_x, live_y, seg, radius = self._view
        s, e = seg[color]
        out = []
        for j in np.nonzero(d[row, s:e] <= radius)[0]:
            k = s + int(j)
            out.append((int(live_ids[k]), int(live_x[k]), int(live_y[k])))
        return out


class Arena:
    """Self-contained trial state; see the module docstring for the phase
    order and the draw-order contract."""

    def __init__(self, config: "ScenarioConfig", seed: int):
        width, height = config.grid
        total_targets = config.targets_per_color * len(COLORS)
        if total_targets > width * height:
            raise SetupError(
                f"{total_targets} targets do not fit on a {width}x{height} grid"
            )
        self.config = config
        self.width = width
        self.height = height
        self.rng = SplitMix64(seed)
        self.seed = seed

        cells = width * height
        occupied: set[tuple[int, int]] = set()
        cat_color: list[Color] = []
        cat_x: list[int] = []
        cat_y: list[int] = []
        for color in COLORS:
            for _ in range(config.targets_per_color):
                while True:
                    v = self.rng.below(cells)
                    cell = (v % width, v // width)
                    if cell not in occupied:
                        break
                occupied.add(cell)
                cat_color.append(color)
                cat_x.append(cell[0])
                cat_y.append(cell[1])

        agents: list[AgentState] = []
        for robot_type, count in zip(ROBOT_ORDER, config.robot_counts):
            for _ in range(count):
                v = self.rng.below(cells)
                store = KnowledgeStore(robot_type.innate_colors, capacity=config.memory_size)
                agents.append(AgentState(
                    len(agents), robot_type, v % width, v // width,
                    store, assemble_agent_tree(store.known_colors()),
                ))
        self._finish_init(cat_color, cat_x, cat_y, agents)

    @classmethod
    def from_layout(
        cls,
        config: "ScenarioConfig",
        targets: Iterable[tuple[Color, int, int]],
        agents: Iterable[tuple[RobotType, int, int]],
        seed: int = 0,
    ) -> "Arena":
        """Build an arena with explicit placement (tests and demos).

        Targets are reordered color-major; agent IDs follow the given order.
        """
        arena = cls.__new__(cls)
        width, height = config.grid
        arena.config = config
        arena.width = width
        arena.height = height
        arena.rng = SplitMix64(seed)
        arena.seed = seed
        spec = sorted(targets, key=lambda item: item[0])
        cells = set()
        for color, x, y in spec:
            if not (0 <= x < width and 0 <= y < height):
                raise SetupError(f"target at {(x, y)} is out of bounds")
            if (x, y) in cells:
                raise SetupError(f"two targets share cell {(x, y)}")
            cells.add((x, y))
        agent_states = []
        for robot_type, x, y in agents:
            if not (0 <= x < width and 0 <= y < height):
                raise SetupError(f"agent at {(x, y)} is out of bounds")
            store = KnowledgeStore(robot_type.innate_colors, capacity=config.memory_size)
            agent_states.append(AgentState(
                len(agent_states), robot_type, x, y,
                store, assemble_agent_tree(store.known_colors()),
            ))
        arena._finish_init(
            [c for c, _, _ in spec], [x for _, x, _ in spec], [y for _, _, y in spec],
            agent_states,
        )
        return arena

    def _finish_init(self, cat_color, cat_x, cat_y, agents) -> None:
        self._cat_color = cat_color
        self._cat_x = cat_x
        self._cat_y = cat_y
        self._alive = [True] * len(cat_color)
        self._live_ids = np.arange(len(cat_color), dtype=np.int32)
        self._live_x = np.array(cat_x, dtype=np.int32)
        self._live_y = np.array(cat_y, dtype=np.int32)
        self._live_color = np.array([int(c) for c in cat_color], dtype=np.int32)
        self._reseg()
        self._cell = {(x, y): i for i, (x, y) in enumerate(zip(cat_x, cat_y))}
        self._x_edge = self.width - 1
        self._y_edge = self.height - 1
        self.agents = agents
        self.t = 0
        self.trial = 0
        self.pending: list[QueryMessage] = []
        self.events: list[ev.EventRecord] = []
        self.snapshots: list[metrics.MetricsSnapshot] = []
        self.capture_counts = [0, 0, 0, 0]
        self.initial_total = len(cat_color)
        self.alive_count = len(cat_color)
        self.queries_sent = 0
        self.deliveries = 0
        self.forgets = 0
        self.rejects_full = 0

    def _reseg(self) -> None:
        bounds = np.searchsorted(self._live_color, (0, 1, 2, 3, 4))
        self._seg = [(int(bounds[i]), int(bounds[i + 1])) for i in range(4)]

    # --- queries about state ------------------------------------------------

    @property
    def capture_total(self) -> int:
        return sum(self.capture_counts)

    def target(self, target_id: int) -> Target:
        return Target(
            target_id,
            self._cat_color[target_id],
            (self._cat_x[target_id], self._cat_y[target_id]),
            self._alive[target_id],
        )

    def targets(self) -> list[Target]:
        return [self.target(i) for i in range(len(self._cat_color))]

    def event_lines(self) -> list[str]:
        return [record.line() for record in self.events]

    # --- sensing -------------------------------------------------------------

    def sense(self, agent: AgentState) -> Perception:
        return self._sense_rows([(agent.x, agent.y)], [agent.store.known_colors()])[0]

    def _sense_all(self) -> list[Perception]:
        return self._sense_rows(
            [(a.x, a.y) for a in self.agents],
            [a.store.known_colors() for a in self.agents],
        )

    def _sense_rows(self, positions, knowns) -> list[Perception]:
        n = len(positions)
        radius = self.config.sense_radius
        if self._live_ids.size == 0:
            empty = [False, False, False, False]
            return [
                Perception(positions[i], [_FAR] * 4, [0] * 4, empty, False, None)
                for i in range(n)
            ]
        ax = np.fromiter((p[0] for p in positions), np.int32, count=n)
        ay = np.fromiter((p[1] for p in positions), np.int32, count=n)
        d = np.abs(ax[:, None] - self._live_x[None, :])
        dy = np.abs(ay[:, None] - self._live_y[None, :])
        np.maximum(d, dy, out=d)
        nearest_d = np.full((n, 4), _FAR, np.int32)
        nearest_pos = np.zeros((n, 4), np.intp)
        for ci in range(4):
            s, e = self._seg[ci]
            if s == e:
                continue
            block = d[:, s:e]
            nearest_d[:, ci] = block.min(axis=1)
            nearest_pos[:, ci] = block.argmin(axis=1) + s
        nd_list = nearest_d.tolist()
        tid_list = self._live_ids[nearest_pos].tolist()
        sees_list = (nearest_d <= radius).tolist()
        seg = self._seg
        live_ids, live_x, live_y = self._live_ids, self._live_x, self._live_y
        perceptions = []
        for i in range(n):
            sees = sees_list[i]
            known = knowns[i]
            sees_unknown = False
            for color in COLORS:
                if sees[color] and color not in known:
                    sees_unknown = True
                    break
            view = (d, i, live_ids, live_x, live_y, seg, radius)
            perceptions.append(
                Perception(positions[i], nd_list[i], tid_list[i], sees, sees_unknown, view)
            )
        return perceptions

    # --- stepping -------------------------------------------------------------

    def step(self) -> None:
        cfg = self.config
        if self.t >= cfg.max_iterations or self.alive_count == 0:
            raise RuntimeError("trial is finished")
        self.t = now = self.t + 1

        # Phase 1: resolve queries emitted at now-1 (before forgetting, so an
        # entry expiring this iteration can still answer).
        if self.pending:
            messages, self.pending = self.pending, []
            if cfg.learning_enabled:
                mark = len(self.events)
                protocol.resolve_and_deliver(
                    messages, self.agents, now, cfg.comm_radius,
                    cfg.memory_duration, cfg.capacity_policy, self.events,
                )
                for record in self.events[mark:]:
                    if record.kind == ev.DELIVERY:
                        self.deliveries += 1
                    elif record.kind == ev.REJECT:
                        self.rejects_full += 1
                    else:  # capacity eviction
                        self.forgets += 1
            else:
                for message in messages:
                    self.agents[message.querier].pending_query = None

        # Phase 2: expiry sweep.
        for agent in self.agents:
            removed = agent.store.forget_expired(now)
            if removed:
                tree = agent.tree
                for color in removed:
                    tree = prune(tree, color)
                    self.events.append(ev.EventRecord(now, ev.FORGET, agent.id, color))
                agent.tree = tree
                self.forgets += len(removed)

        # Phase 3: sense.
        perceptions = self._sense_all()

        # Phase 4: tick trees; Query intents go through the emit gate.
        intents = []
        new_queries = []
        for agent in self.agents:
            bb = Blackboard(perceptions[agent.id], agent.store.known_colors())
            tick(agent.tree, bb)
            intent = bb.intent
            intents.append(intent)
            if type(intent) is Query:
                message = protocol.emit_query(agent, perceptions[agent.id], now, cfg.query_cooldown)
                if message is not None:
                    new_queries.append(message)
                    self.queries_sent += 1
        self.pending = new_queries

        # Phase 5: execute intents.
        for agent in self.agents:
            self._execute_intent(agent, intents[agent.id], perceptions[agent.id])

        # Phase 6: snapshot on the grid.
        if now % cfg.snapshot_interval == 0:
            self.snapshots.append(metrics.snapshot(self, self.trial))

        assert self.capture_total + self.alive_count == self.initial_total

    def _execute_intent(self, agent: AgentState, intent, perception: Perception) -> None:
        kind = type(intent)
        if kind is Collect:
            color = intent.color
            tid = self._cell.get((agent.x, agent.y))
            if tid is not None and self._cat_color[tid] is color:
                self._capture(tid, agent)
                return
            # Fall through to a one-step move toward the nearest target of
            # that color still alive at this instant (lower-ID agents may
            # have collected the sensed one this same iteration).
            dest = None
            tid = perception.nearest_target(color)
            if tid is not None and self._alive[tid]:
                dest = (self._cat_x[tid], self._cat_y[tid])
            else:
                dest = self._nearest_live(agent.x, agent.y, color)
            if dest is not None:
                dx = dest[0] - agent.x
                dy = dest[1] - agent.y
                agent.x += (dx > 0) - (dx < 0)
                agent.y += (dy > 0) - (dy < 0)
        elif kind is Explore:
            x, y = agent.x, agent.y
            if 0 < x < self._x_edge and 0 < y < self._y_edge:
                ox, oy = _MOORE[self.rng.below(8)]
                agent.x = x + ox
                agent.y = y + oy
            else:
                options = []
                for ox, oy in _MOORE:
                    nx, ny = x + ox, y + oy
                    if 0 <= nx < self.width and 0 <= ny < self.height:
                        options.append((nx, ny))
                agent.x, agent.y = options[self.rng.below(len(options))]
        # Query (awaiting an answer): stand still.

    def _nearest_live(self, x: int, y: int, color: Color) -> Optional[tuple[int, int]]:
        s, e = self._seg[color]
        if s == e:
            return None
        d = np.maximum(np.abs(self._live_x[s:e] - x), np.abs(self._live_y[s:e] - y))
        i = int(d.argmin())  # first minimum = lowest target ID
        if int(d[i]) > self.config.sense_radius:
            return None
        return (int(self._live_x[s + i]), int(self._live_y[s + i]))

    def _capture(self, target_id: int, agent: AgentState) -> None:
        color = self._cat_color[target_id]
        del self._cell[(self._cat_x[target_id], self._cat_y[target_id])]
        self._alive[target_id] = False
        self.alive_count -= 1
        self.capture_counts[color] += 1
        self.events.append(ev.EventRecord(self.t, ev.CAPTURE, agent.id, color))
        pos = int(np.searchsorted(self._live_ids, target_id))
        self._live_ids = np.delete(self._live_ids, pos)
        self._live_x = np.delete(self._live_x, pos)
        self._live_y = np.delete(self._live_y, pos)
        self._live_color = np.delete(self._live_color, pos)
        self._reseg()
