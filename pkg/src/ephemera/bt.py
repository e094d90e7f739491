"""Behavior trees: node types, the text grammar, tick semantics, and the
canonical agent-tree shape with graft/prune editing of skill subtrees.

Canonical grammar (serialize emits exactly this, parse also tolerates ASCII
spaces between tokens)::

    node   := "sel(" list ")" | "seq(" list ")" | "cond(" pred ")" | "act(" action ")"
    list   := node ("," node)*
    pred   := "SeeTarget:" color | "SeeUnknownTarget"
    action := "Collect:" color | "Query" | "Explore"
    color  := "Red" | "Green" | "Yellow" | "Blue"
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Any, Iterable, Union


class Color(IntEnum):
    """Target colors in canonical order: Red < Green < Yellow < Blue."""

    RED = 0
    GREEN = 1
    YELLOW = 2
    BLUE = 3

    @property
    def label(self) -> str:
        return _COLOR_LABELS[self]


COLORS: tuple[Color, ...] = tuple(Color)

_COLOR_LABELS = {
    Color.RED: "Red",
    Color.GREEN: "Green",
    Color.YELLOW: "Yellow",
    Color.BLUE: "Blue",
}
_COLOR_BY_LABEL = {label: color for color, label in _COLOR_LABELS.items()}


def color_from_label(label: str) -> Color:
    try:
        return _COLOR_BY_LABEL[label]
    except KeyError:
        raise ValueError(f"unknown color name: {label!r}") from None


# --- node types -------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class SeeTarget:
    color: Color


@dataclass(frozen=True, slots=True)
class SeeUnknownTarget:
    pass


Predicate = Union[SeeTarget, SeeUnknownTarget]


@dataclass(frozen=True, slots=True)
class Collect:
    color: Color


@dataclass(frozen=True, slots=True)
class Query:
    pass


@dataclass(frozen=True, slots=True)
class Explore:
    pass


ActionKind = Union[Collect, Query, Explore]


@dataclass(frozen=True, slots=True)
class Condition:
    pred: Predicate


@dataclass(frozen=True, slots=True)
class Action:
    kind: ActionKind


@dataclass(frozen=True, slots=True)
class Selector:
    """Prioritized fallback: succeeds at the first child that succeeds."""

    children: tuple["BTNode", ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "children", tuple(self.children))
        if not self.children:
            raise ValueError("composite node needs at least one child")


@dataclass(frozen=True, slots=True)
class Sequence:
    """Runs children in order: fails at the first child that fails."""

    children: tuple["BTNode", ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "children", tuple(self.children))
        if not self.children:
            raise ValueError("composite node needs at least one child")


BTNode = Union[Selector, Sequence, Condition, Action]


class TickStatus(Enum):
    SUCCESS = "success"
    FAILURE = "failure"


_SUCCESS = TickStatus.SUCCESS
_FAILURE = TickStatus.FAILURE


@dataclass(slots=True)
class Blackboard:
    """Per-tick scratch state.

    ``perception`` must expose ``sees(color) -> bool``; ``known_colors`` is the
    agent's current skill set. Actions post their kind to ``intent``; the
    first writer wins within a tick.
    """

    perception: Any
    known_colors: tuple[Color, ...]
    intent: ActionKind | None = None


def tick(node: BTNode, bb: Blackboard) -> TickStatus:
    """One memoryless root-to-leaf evaluation pass.

    There is no Running status: actions post an intent and report SUCCESS,
    so every iteration re-evaluates from the root.
    """
    kind = type(node)
    if kind is Selector:
        for child in node.children:
            if tick(child, bb) is _SUCCESS:
                return _SUCCESS
        return _FAILURE
    if kind is Sequence:
        for child in node.children:
            if tick(child, bb) is _FAILURE:
                return _FAILURE
        return _SUCCESS
    if kind is Condition:
        pred = node.pred
        if type(pred) is SeeTarget:
            return _SUCCESS if bb.perception.sees(pred.color) else _FAILURE
        known = bb.known_colors
        for color in COLORS:
            if color not in known and bb.perception.sees(color):
                return _SUCCESS
        return _FAILURE
    # Action leaf: first posted intent wins.
    if bb.intent is None:
        bb.intent = node.kind
    return _SUCCESS


# --- serialization ----------------------------------------------------------

def serialize(node: BTNode) -> str:
    """Canonical text form: no whitespace, children comma-separated."""
    parts: list[str] = []
    _write(node, parts)
    return "".join(parts)


def _write(node: BTNode, out: list[str]) -> None:
    kind = type(node)
    if kind is Selector or kind is Sequence:
        out.append("sel(" if kind is Selector else "seq(")
        for i, child in enumerate(node.children):
            if i:
                out.append(",")
            _write(child, out)
        out.append(")")
    elif kind is Condition:
        pred = node.pred
        if type(pred) is SeeTarget:
            out.append(f"cond(SeeTarget:{pred.color.label})")
        else:
            out.append("cond(SeeUnknownTarget)")
    else:
        action = node.kind
        if type(action) is Collect:
            out.append(f"act(Collect:{action.color.label})")
        elif type(action) is Query:
            out.append("act(Query)")
        else:
            out.append("act(Explore)")


class ParseError(ValueError):
    """Grammar violation; ``offset`` locates the offending byte."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.reason = message
        self.offset = offset


class _Parser:
    __slots__ = ("text", "pos")

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_spaces(self) -> None:
        text = self.text
        while self.pos < len(text) and text[self.pos] == " ":
            self.pos += 1

    def read_word(self) -> tuple[str, int]:
        self.skip_spaces()
        start = self.pos
        text = self.text
        while self.pos < len(text) and text[self.pos].isalpha():
            self.pos += 1
        return text[start:self.pos], start

    def expect(self, char: str, reason: str) -> None:
        self.skip_spaces()
        if self.pos >= len(self.text) or self.text[self.pos] != char:
            raise ParseError(reason, self.pos)
        self.pos += 1

    def peek(self) -> str:
        self.skip_spaces()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse_node(self) -> BTNode:
        word, start = self.read_word()
        if word in ("sel", "seq"):
            self.expect("(", "unbalanced parentheses")
            if self.peek() == ")":
                raise ParseError("empty child list", self.pos)
            children = [self.parse_node()]
            while self.peek() == ",":
                self.pos += 1
                children.append(self.parse_node())
            self.expect(")", "unbalanced parentheses")
            return Selector(tuple(children)) if word == "sel" else Sequence(tuple(children))
        if word == "cond":
            self.expect("(", "unbalanced parentheses")
            pred = self.parse_pred()
            self.expect(")", "unbalanced parentheses")
            return Condition(pred)
        if word == "act":
            self.expect("(", "unbalanced parentheses")
            action = self.parse_action()
            self.expect(")", "unbalanced parentheses")
            return Action(action)
        raise ParseError("unknown token", start)

    def parse_pred(self) -> Predicate:
        word, start = self.read_word()
        if word == "SeeTarget":
            self.expect(":", "expected ':' after SeeTarget")
            return SeeTarget(self.read_color())
        if word == "SeeUnknownTarget":
            return SeeUnknownTarget()
        raise ParseError("unknown token", start)

    def parse_action(self) -> ActionKind:
        word, start = self.read_word()
        if word == "Collect":
            self.expect(":", "expected ':' after Collect")
            return Collect(self.read_color())
        if word == "Query":
            return Query()
        if word == "Explore":
            return Explore()
        raise ParseError("unknown token", start)

    def read_color(self) -> Color:
        word, start = self.read_word()
        color = _COLOR_BY_LABEL.get(word)
        if color is None:
            raise ParseError("unknown color name", start)
        return color


def parse(text: str) -> BTNode:
    """Parse the grammar above; raises ParseError with a byte offset."""
    parser = _Parser(text)
    node = parser.parse_node()
    parser.skip_spaces()
    if parser.pos != len(text):
        raise ParseError("trailing garbage", parser.pos)
    return node


# --- canonical agent trees --------------------------------------------------

_QUERY_BRANCH = Sequence((Condition(SeeUnknownTarget()), Action(Query())))
_EXPLORE_LEAF = Action(Explore())


def make_knowledge_subtree(color: Color) -> Sequence:
    """The skill of handling one color: see it, collect it."""
    return Sequence((Condition(SeeTarget(color)), Action(Collect(color))))


def assemble_agent_tree(known: Iterable[Color]) -> Selector:
    """Canonical agent tree: skill subtrees in color order, then the query
    branch for unknown targets, then the explore fallback."""
    colors = sorted(set(known))
    children = tuple(make_knowledge_subtree(c) for c in colors)
    return Selector(children + (_QUERY_BRANCH, _EXPLORE_LEAF))


class CanonicalTreeError(ValueError):
    """The tree does not have the canonical agent-tree shape."""


def _skill_color(node: BTNode) -> Color | None:
    if (
        type(node) is Sequence
        and len(node.children) == 2
        and type(node.children[0]) is Condition
        and type(node.children[0].pred) is SeeTarget
        and type(node.children[1]) is Action
        and type(node.children[1].kind) is Collect
        and node.children[0].pred.color is node.children[1].kind.color
    ):
        return node.children[0].pred.color
    return None


def known_colors(root: BTNode) -> tuple[Color, ...]:
    """Colors of the skill subtrees of a canonical agent tree, in order."""
    if type(root) is not Selector or len(root.children) < 2:
        raise CanonicalTreeError("root must be a selector ending in query and explore branches")
    *skills, query_branch, explore_leaf = root.children
    if query_branch != _QUERY_BRANCH or explore_leaf != _EXPLORE_LEAF:
        raise CanonicalTreeError("missing canonical query/explore tail")
    colors: list[Color] = []
    for node in skills:
        color = _skill_color(node)
        if color is None:
            raise CanonicalTreeError(f"not a skill subtree: {serialize(node)}")
        colors.append(color)
    if colors != sorted(set(colors)):
        raise CanonicalTreeError("skill subtrees out of canonical color order")
    return tuple(colors)


def graft(root: BTNode, color: Color) -> Selector:
    """Insert the skill subtree for ``color`` in canonical position.

    Idempotent when the color is already present.
    """
    return assemble_agent_tree(known_colors(root) + (color,))


def prune(root: BTNode, color: Color) -> Selector:
    """Remove the skill subtree for ``color``; no-op when absent."""
    return assemble_agent_tree(c for c in known_colors(root) if c is not color)
