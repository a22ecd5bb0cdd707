"""Shared fixtures and the independent brute-force play oracle.

The oracle enumerates every chip-feasible simple path breadth-first,
evaluates each completed play against the documented scoring and tie-break
contract, and picks the best by explicit key comparison. It shares no code
with the production solver.
"""

import random

import pytest

from svoie.engine import (
    Chips,
    Color,
    GameSetup,
    MOVE_NAMES,
    Position,
    enumerate_exchanges,
    generate_setup,
)
from svoie.policies import PolicyKind, Proposal

MOVE_STEPS = {"up": (-1, 0), "down": (1, 0), "left": (0, -1), "right": (0, 1)}


def oracle_plays(board, start: Position, goal: Position, chips: Chips):
    """Every (score, final, used, reached, moves) play, via BFS enumeration."""
    total = chips.total()
    plays = []
    frontier = [(start, frozenset([start]), tuple(chips), ())]
    while frontier:
        nxt_frontier = []
        for pos, seen, avail, moves in frontier:
            reached = goal in seen
            used = len(moves)
            score = (total - used) + 1.5 * used * (1 + reached)
            plays.append((score, pos, used, reached, moves))
            for name in MOVE_NAMES:
                dr, dc = MOVE_STEPS[name]
                cand = Position(pos.row + dr, pos.col + dc)
                if not (0 <= cand.row < 4 and 0 <= cand.col < 4):
                    continue
                if cand in seen:
                    continue
                color = board[cand.row * 4 + cand.col]
                if avail[color] == 0:
                    continue
                left = list(avail)
                left[color] -= 1
                nxt_frontier.append((cand, seen | {cand}, tuple(left), moves + (name,)))
        frontier = nxt_frontier
    return plays


def oracle_best_play(board, start: Position, goal: Position, chips: Chips):
    """Best play by the documented order: score desc, final distance asc,
    chips used asc, move sequence lexicographic (up < down < left < right)."""
    move_rank = {name: i for i, name in enumerate(MOVE_NAMES)}

    def key(play):
        score, pos, used, _reached, moves = play
        dist = abs(pos.row - goal.row) + abs(pos.col - goal.col)
        return (-score, dist, used, tuple(move_rank[m] for m in moves))

    return min(oracle_plays(board, start, goal, chips), key=key)


def oracle_score(board, start: Position, goal: Position, chips: Chips) -> float:
    return oracle_best_play(board, start, goal, chips)[0]


def random_inventory(rng, size=None) -> Chips:
    if size is None:
        size = rng.randrange(9)
    counts = [0, 0, 0, 0]
    for _ in range(size):
        counts[rng.randrange(4)] += 1
    return Chips(*counts)


def oracle_outcome_scores(setup, outcome, cache):
    """Score an exchange outcome with the enumeration oracle, memoized."""
    key_p = outcome.post_chips_p
    if key_p not in cache[0]:
        cache[0][key_p] = oracle_score(setup.board, setup.pos_p, setup.goal, key_p)
    key_r = outcome.post_chips_r
    if key_r not in cache[1]:
        cache[1][key_r] = oracle_score(setup.board, setup.pos_r, setup.goal, key_r)
    return cache[0][key_p], cache[1][key_r]


_ORACLE_CRITERIA = {
    PolicyKind.SELFISH: lambda s_p, s_r: s_p,
    PolicyKind.COOPERATIVE: lambda s_p, s_r: s_p + s_r,
    PolicyKind.ALTRUISTIC: lambda s_p, s_r: s_r,
    PolicyKind.POSITIVE_IE: lambda s_p, s_r: -abs(s_p - s_r),
    PolicyKind.NEGATIVE_IE: lambda s_p, s_r: s_p - s_r,
}


def oracle_rank_setup(setup):
    """Expected proposal per policy via an independent full argmax scan."""
    cache = ({}, {})
    scored = []
    for oc in enumerate_exchanges(setup.chips_p, setup.chips_r):
        s_p, s_r = oracle_outcome_scores(setup, oc, cache)
        scored.append((oc, s_p, s_r))
    expected = {}
    for policy, criterion in _ORACLE_CRITERIA.items():
        best = min(
            scored,
            key=lambda item: (
                -criterion(item[1], item[2]),
                -item[1],
                item[0].offer.total() + item[0].request.total(),
                item[0].offer,
                item[0].request,
            ),
        )
        expected[policy] = Proposal(best[0].offer, best[0].request)
    return expected


def fig1_setup() -> GameSetup:
    """A mutually-beneficial-swap fixture.

    Green everywhere except the goal (1,1)=Blue and its two approaches
    (1,2)=Yellow and (2,1)=Red; (2,2)=Yellow blocks a green detour. The
    proposer (1,3) holds a spare red and lacks yellow; the responder (3,1)
    holds a spare yellow and lacks red, so a red-for-yellow swap lets both
    reach the goal.
    """
    tiles = [Color.GREEN] * 16
    tiles[1 * 4 + 1] = Color.BLUE
    tiles[1 * 4 + 2] = Color.YELLOW
    tiles[2 * 4 + 1] = Color.RED
    tiles[2 * 4 + 2] = Color.YELLOW
    return GameSetup(
        board=tuple(tiles),
        pos_p=Position(1, 3),
        pos_r=Position(3, 1),
        goal=Position(1, 1),
        chips_p=Chips.of(Color.RED, Color.BLUE, Color.GREEN, Color.GREEN),
        chips_r=Chips.of(Color.YELLOW, Color.BLUE, Color.GREEN, Color.GREEN),
    )


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)


@pytest.fixture(scope="session")
def random_setups():
    r = random.Random(20240817)
    return [generate_setup(r) for _ in range(300)]
