import json

import pytest

from ltl2a.envs import (
    LOCKED_ROOMS_MAP,
    Bootcamp,
    LetterLayout,
    LetterWorld,
    LockedRooms,
    load_env,
)
from ltl2a.streams import stream


def test_letterworld_layout_two_cells_per_letter():
    env = LetterWorld(placement_seed=7)
    state = env.reset(stream(0))
    cells = state.layout.cells
    assert len(cells) == 24
    per_letter = {}
    for r, c, letter in cells:
        assert (r, c) != env.center
        per_letter.setdefault(letter, set()).add((r, c))
    assert set(per_letter) == set(env.vocabulary.names)
    assert all(len(v) == 2 for v in per_letter.values())
    assert state.agent == (3, 3)


def test_letterworld_reset_policy():
    pinned = LetterWorld(placement_seed=7)
    assert pinned.reset(stream(1)).layout == pinned.reset(stream(2)).layout
    free = LetterWorld()
    assert free.reset(stream(1)).layout != free.reset(stream(2)).layout
    assert free.reset(stream(1)).layout == free.reset(stream(1)).layout


def test_letterworld_moves_and_labels():
    env = LetterWorld(placement_seed=7)
    state = env.reset(stream(0))
    north = env.step(state, "North")
    assert north.agent == (2, 3)
    # walls are no-ops
    corner = state
    for _ in range(10):
        corner = env.step(corner, "North")
    assert corner.agent[0] == 0
    assert env.step(corner, "North").agent == corner.agent
    # labels read the post-move cell and have at most one letter
    for action in env.actions:
        label = env.label(state, action)
        assert len(label) <= 1
        target = env.step(state, action).agent
        assert label == (frozenset() if state.layout.letter_at(target) is None
                         else frozenset({state.layout.letter_at(target)}))
    with pytest.raises(ValueError):
        env.step(state, "Jump")


def test_letterworld_layout_json_round_trip():
    env = LetterWorld(placement_seed=3)
    layout = env.reset(stream(0)).layout
    again = LetterLayout.from_json(layout.to_json())
    assert again == layout
    assert json.loads(layout.to_json())["schema"] == "letter-layout/1"


def test_locked_rooms_map_is_versioned_shape():
    assert len(LOCKED_ROOMS_MAP) == 5
    assert all(len(row) == 7 for row in LOCKED_ROOMS_MAP)
    env = LockedRooms()
    assert env.start == (2, 3)
    assert sorted(env.vocabulary.names) == ["B", "G", "R"]


def test_locked_rooms_map_matches_published_doc():
    from pathlib import Path

    doc = Path(__file__).resolve().parent.parent / "docs" / "locked_rooms_map.txt"
    lines = doc.read_text().splitlines()
    start = lines.index(LOCKED_ROOMS_MAP[0])
    assert tuple(lines[start:start + len(LOCKED_ROOMS_MAP)]) == LOCKED_ROOMS_MAP


def test_locked_rooms_doors_lock_behind():
    env = LockedRooms()
    s = env.reset(stream(0))
    assert s.flag == "none"
    in_a = env.step(s, "West")
    assert in_a.agent == (2, 2) and in_a.flag == "lockedA"
    # door does not reopen
    assert env.step(in_a, "East") == in_a
    # room A interior stays lockedA and cannot reach room B
    s2 = env.step(env.step(in_a, "West"), "North")
    assert s2.flag == "lockedA"
    in_b = env.step(s, "East")
    assert in_b.agent == (2, 4) and in_b.flag == "lockedB"


def test_locked_rooms_colored_cells():
    env = LockedRooms()
    s = env.reset(stream(0))
    # West, West, West, North lands on blue in room A
    path = ["West", "West", "West"]
    for action in path:
        s = env.step(s, action)
    assert env.label(s, "North") == frozenset({"B"})
    s = env.step(s, "North")
    s = env.step(s, "South")
    assert env.label(s, "South") == frozenset({"R"})


def test_locked_rooms_reachable_states():
    env = LockedRooms()
    seen = set()
    frontier = [env.reset(stream(0))]
    while frontier:
        s = frontier.pop()
        if env.state_key(s) in seen:
            continue
        seen.add(env.state_key(s))
        for action in env.actions:
            frontier.append(env.step(s, action))
    # 1 corridor state + two 3x3 rooms
    assert len(seen) == 19
    assert len(env.enumerate_states()) == 19 * 3
    flags = {flag for (_, flag) in seen}
    assert flags == {"none", "lockedA", "lockedB"}
    # never both locks: each reachable state has exactly one flag value
    for (cell, flag) in seen:
        if flag == "lockedA":
            assert cell[1] <= 2
        if flag == "lockedB":
            assert cell[1] >= 4


def test_bootcamp_is_single_state():
    env = Bootcamp(["a", "b"])
    s = env.reset(stream(0))
    assert env.step(s, "a") == s
    assert env.label(s, "a") == frozenset({"a"})
    assert env.label(s, "b") == frozenset({"b"})
    assert env.enumerate_states() == [s]
    assert env.gamma == 0.9 and env.timeout == 75
    with pytest.raises(ValueError):
        env.step(s, "North")


def test_determinism_of_transitions():
    for env in (LetterWorld(placement_seed=1), LockedRooms(), Bootcamp(["a", "b"])):
        s = env.reset(stream(5))
        for action in env.actions:
            assert env.step(s, action) == env.step(s, action)
            assert env.label(s, action) == env.label(s, action)


def test_load_env_presets_and_defaults():
    lw = load_env("letterworld", placement_seed=4)
    assert lw.gamma == 0.94 and lw.timeout == 75 and lw.placement_seed == 4
    assert load_env("lockedrooms").timeout == 75
    bc = load_env("bootcamp")
    assert len(bc.actions) == 12
    with pytest.raises(ValueError):
        load_env({"kind": "maze"})
