"""Reward-free environments with labelling functions.

Three deterministic models share one duck-typed interface:

* ``reset(rng) -> state``
* ``step(state, action) -> state`` (invalid actions raise)
* ``label(state, action) -> frozenset`` of propositions, read from the
  cell occupied *after* the action
* ``actions``, ``gamma``, ``timeout`` attributes
* ``state_key`` / ``state_json`` for tabular keys and serialization

States are immutable values; step/label are pure functions.

``LetterWorld``: a 7x7 grid where each letter of the vocabulary appears on
exactly two cells, drawn uniformly from the 48 non-center cells; the agent
starts at the center. ``LockedRooms``: two 3x3 rooms joined by a short
corridor whose door cells lock behind the agent, so only one room can ever
be visited. ``Bootcamp``: a single state where each action asserts one
proposition, for environment-agnostic task practice.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .formula import Vocabulary
from .streams import stream
from .taskgen import LETTERS_12

__all__ = [
    "GRID_ACTIONS",
    "LetterWorld",
    "LetterLayout",
    "LetterWorldState",
    "LockedRooms",
    "LockedRoomsState",
    "LOCKED_ROOMS_MAP",
    "Bootcamp",
    "BootcampState",
    "load_env",
]

GRID_ACTIONS = ("North", "South", "East", "West")
_MOVES = {"North": (-1, 0), "South": (1, 0), "East": (0, 1), "West": (0, -1)}


def _require_action(action: str, actions: tuple[str, ...]) -> None:
    if action not in actions:
        raise ValueError(f"invalid action {action!r}; expected one of {actions}")


# --- LetterWorld ------------------------------------------------------------


@dataclass(frozen=True)
class LetterLayout:
    """Immutable letter placement: two cells per letter, none at the center."""

    cells: tuple[tuple[int, int, str], ...]  # (row, col, letter), sorted
    seed: Optional[int]

    def letter_at(self, cell: tuple[int, int]) -> Optional[str]:
        return self._by_cell().get(cell)

    def _by_cell(self) -> dict:
        by_cell = self.__dict__.get("_cache")
        if by_cell is None:
            by_cell = {(r, c): letter for r, c, letter in self.cells}
            self.__dict__["_cache"] = by_cell
        return by_cell

    def to_json(self) -> str:
        payload = {
            "schema": "letter-layout/1",
            "seed": self.seed,
            "cells": [
                {"row": r, "col": c, "letter": letter} for r, c, letter in self.cells
            ],
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "LetterLayout":
        payload = json.loads(text)
        cells = tuple(
            sorted((d["row"], d["col"], d["letter"]) for d in payload["cells"])
        )
        return cls(cells=cells, seed=payload.get("seed"))


@dataclass(frozen=True)
class LetterWorldState:
    agent: tuple[int, int]
    layout: LetterLayout


class LetterWorld:
    """7x7 grid, four move actions, letters as propositions.

    ``placement_seed`` pins the layout (every reset reuses it); when None,
    each reset draws a fresh placement from the reset rng.
    """

    kind = "letterworld"
    width = 7
    height = 7

    def __init__(
        self,
        letters: Iterable[str] = LETTERS_12,
        gamma: float = 0.94,
        timeout: int = 75,
        placement_seed: Optional[int] = None,
    ):
        self.vocabulary = Vocabulary(letters)
        if not 0.0 < gamma <= 1.0:
            raise ValueError("gamma must be in (0, 1]")
        if timeout < 1:
            raise ValueError("timeout must be positive")
        if 2 * len(self.vocabulary) > self.width * self.height - 1:
            raise ValueError("not enough non-center cells for two per letter")
        self.gamma = gamma
        self.timeout = int(timeout)
        self.placement_seed = placement_seed
        self.actions = GRID_ACTIONS
        self.center = (self.height // 2, self.width // 2)

    def _place(self, rng: np.random.Generator) -> LetterLayout:
        free = [
            (r, c)
            for r in range(self.height)
            for c in range(self.width)
            if (r, c) != self.center
        ]
        picked = rng.choice(len(free), size=2 * len(self.vocabulary), replace=False)
        cells = []
        for slot, idx in enumerate(picked):
            letter = self.vocabulary.names[slot // 2]
            r, c = free[int(idx)]
            cells.append((r, c, letter))
        return LetterLayout(cells=tuple(sorted(cells)), seed=self.placement_seed)

    def reset(self, rng: np.random.Generator) -> LetterWorldState:
        if self.placement_seed is not None:
            layout = self._place(stream(self.placement_seed))
        else:
            layout = self._place(rng)
        return LetterWorldState(agent=self.center, layout=layout)

    def step(self, state: LetterWorldState, action: str) -> LetterWorldState:
        _require_action(action, self.actions)
        dr, dc = _MOVES[action]
        r, c = state.agent[0] + dr, state.agent[1] + dc
        if 0 <= r < self.height and 0 <= c < self.width:
            return LetterWorldState(agent=(r, c), layout=state.layout)
        return state  # off-grid moves are no-ops

    def label(self, state: LetterWorldState, action: str) -> frozenset:
        after = self.step(state, action)
        letter = state.layout.letter_at(after.agent)
        return frozenset() if letter is None else frozenset({letter})

    def is_terminal(self, state: LetterWorldState) -> bool:
        return False

    def state_key(self, state: LetterWorldState):
        return state.agent

    def state_json(self, state: LetterWorldState):
        return {"row": state.agent[0], "col": state.agent[1]}

    def enumerate_states(self, example: LetterWorldState):
        layout = example.layout
        return [
            LetterWorldState(agent=(r, c), layout=layout)
            for r in range(self.height)
            for c in range(self.width)
        ]


# --- LockedRooms -------------------------------------------------------------

# Bit-exact layout, version 1. Legend: '#' wall, '.' floor, 'D' door cell
# (locks behind the agent), 'S' start (corridor center), letters are
# coloured floor cells (B blue, R red, G green). The corridor is the
# middle row D S D; each door cell belongs to its room, and once a door
# is crossed the way back to the corridor is shut.
LOCKED_ROOMS_MAP = (
    "#######",
    "B..#..B",
    "..DSD..",
    "R..#..G",
    "#######",
)

_FLAGS = ("none", "lockedA", "lockedB")


@dataclass(frozen=True)
class LockedRoomsState:
    agent: tuple[int, int]
    flag: str  # 'none' | 'lockedA' | 'lockedB'


class LockedRooms:
    """Two mutually exclusive rooms behind self-locking doors."""

    kind = "lockedrooms"

    def __init__(self, gamma: float = 0.94, timeout: int = 75):
        if not 0.0 < gamma <= 1.0:
            raise ValueError("gamma must be in (0, 1]")
        self.gamma = gamma
        self.timeout = int(timeout)
        self.actions = GRID_ACTIONS
        self.vocabulary = Vocabulary(("B", "G", "R"))
        self._walkable = set()
        self._colors = {}
        self._doors = {}
        for r, row in enumerate(LOCKED_ROOMS_MAP):
            for c, ch in enumerate(row):
                if ch == "#":
                    continue
                self._walkable.add((r, c))
                if ch in ("B", "R", "G"):
                    self._colors[(r, c)] = ch
                elif ch == "S":
                    self.start = (r, c)
                elif ch == "D":
                    # door cell; room side decided by column vs corridor
                    self._doors[(r, c)] = "lockedA" if c < 3 else "lockedB"

    def reset(self, rng: np.random.Generator) -> LockedRoomsState:
        return LockedRoomsState(agent=self.start, flag="none")

    def step(self, state: LockedRoomsState, action: str) -> LockedRoomsState:
        _require_action(action, self.actions)
        dr, dc = _MOVES[action]
        target = (state.agent[0] + dr, state.agent[1] + dc)
        if target not in self._walkable:
            return state
        if state.agent in self._doors and target == self.start:
            return state  # locked doors do not reopen
        flag = state.flag
        if state.agent == self.start and target in self._doors:
            flag = self._doors[target]
        return LockedRoomsState(agent=target, flag=flag)

    def label(self, state: LockedRoomsState, action: str) -> frozenset:
        after = self.step(state, action)
        color = self._colors.get(after.agent)
        return frozenset() if color is None else frozenset({color})

    def is_terminal(self, state: LockedRoomsState) -> bool:
        return False

    def state_key(self, state: LockedRoomsState):
        return (state.agent, state.flag)

    def state_json(self, state: LockedRoomsState):
        return {"row": state.agent[0], "col": state.agent[1], "flag": state.flag}

    def enumerate_states(self, example: LockedRoomsState | None = None):
        return [
            LockedRoomsState(agent=cell, flag=flag)
            for cell in sorted(self._walkable)
            for flag in _FLAGS
        ]


# --- Bootcamp ----------------------------------------------------------------


@dataclass(frozen=True)
class BootcampState:
    pass


_BOOTCAMP_STATE = BootcampState()


class Bootcamp:
    """Single-state environment; each action makes one proposition true."""

    kind = "bootcamp"

    def __init__(
        self,
        vocabulary: Iterable[str],
        gamma: float = 0.9,
        timeout: int = 75,
    ):
        self.vocabulary = (
            vocabulary if isinstance(vocabulary, Vocabulary) else Vocabulary(vocabulary)
        )
        if not 0.0 < gamma <= 1.0:
            raise ValueError("gamma must be in (0, 1]")
        self.gamma = gamma
        self.timeout = int(timeout)
        self.actions = self.vocabulary.names

    def reset(self, rng: np.random.Generator) -> BootcampState:
        return _BOOTCAMP_STATE

    def step(self, state: BootcampState, action: str) -> BootcampState:
        _require_action(action, self.actions)
        return _BOOTCAMP_STATE

    def label(self, state: BootcampState, action: str) -> frozenset:
        _require_action(action, self.actions)
        return frozenset({action})

    def is_terminal(self, state: BootcampState) -> bool:
        return False

    def state_key(self, state: BootcampState):
        return "s0"

    def state_json(self, state: BootcampState):
        return "s0"

    def enumerate_states(self, example: BootcampState | None = None):
        return [_BOOTCAMP_STATE]


# --- config loading ----------------------------------------------------------


def load_env(source, placement_seed: Optional[int] = None):
    """Build an environment from a preset name, JSON file path, or dict.

    Presets: ``letterworld``, ``lockedrooms``, ``bootcamp`` (bootcamp over
    the 12 grid letters). ``placement_seed`` overrides the LetterWorld
    placement when given.
    """
    if isinstance(source, str) and source in ("letterworld", "lockedrooms", "bootcamp"):
        cfg = {"kind": source}
    elif isinstance(source, dict):
        cfg = dict(source)
    else:
        from pathlib import Path

        cfg = json.loads(Path(source).read_text())
    kind = cfg.pop("kind")
    if placement_seed is not None and kind == "letterworld":
        cfg["placement_seed"] = placement_seed
    if kind == "letterworld":
        return LetterWorld(**cfg)
    if kind == "lockedrooms":
        return LockedRooms(**cfg)
    if kind == "bootcamp":
        cfg.setdefault("vocabulary", LETTERS_12)
        return Bootcamp(**cfg)
    raise ValueError(f"unknown environment kind {kind!r}")
