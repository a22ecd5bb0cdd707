"""Colored Trails game engine: setup generation, optimal play, exchange scoring.

The board is a 4x4 grid of colored tiles. An agent moves orthogonally from its
start; each move consumes one chip matching the destination tile's color and no
tile is visited twice. A round scores ``unused + 1.5 * used * (1 + reached_goal)``
where the goal flag is set when the path touches the goal tile, so reaching the
goal doubles the value of every chip spent. All scores are exact multiples of
0.5 and float arithmetic on them is exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import IntEnum
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from numba import njit

BOARD_SIZE = 4
N_CELLS = BOARD_SIZE * BOARD_SIZE
MAX_CHIPS = 8  # 4 allocated + at most 4 received in trade


class Color(IntEnum):
    RED = 0
    BLUE = 1
    GREEN = 2
    YELLOW = 3


COLORS = tuple(Color)


class Position(NamedTuple):
    row: int
    col: int

    @property
    def cell(self) -> int:
        return self.row * BOARD_SIZE + self.col

    @classmethod
    def from_cell(cls, cell: int) -> "Position":
        return cls(*divmod(cell, BOARD_SIZE))

    def manhattan(self, other: "Position") -> int:
        return abs(self.row - other.row) + abs(self.col - other.col)

    def is_adjacent(self, other: "Position") -> bool:
        """Orthogonal (vertical/horizontal) adjacency."""
        return self.manhattan(other) == 1


# Row-major tuple of 16 Color values.
Board = tuple


class Chips(NamedTuple):
    """Chip inventory: a count per color."""

    red: int = 0
    blue: int = 0
    green: int = 0
    yellow: int = 0

    def total(self) -> int:
        return self.red + self.blue + self.green + self.yellow

    def add(self, other: "Chips") -> "Chips":
        return Chips(*(a + b for a, b in zip(self, other)))

    def subtract(self, other: "Chips") -> "Chips":
        out = Chips(*(a - b for a, b in zip(self, other)))
        if min(out) < 0:
            raise ValueError(f"cannot remove {other} from {self}")
        return out

    def covers(self, other: "Chips") -> bool:
        """True if ``other`` is a sub-multiset of this inventory."""
        return all(a >= b for a, b in zip(self, other))

    @classmethod
    def of(cls, *colors: Color) -> "Chips":
        counts = [0, 0, 0, 0]
        for c in colors:
            counts[c] += 1
        return cls(*counts)


class PlayResult(NamedTuple):
    score: float
    reached_goal: bool
    chips_used: int
    chips_unused: int
    final_pos: Position
    moves: tuple  # move names, e.g. ("right", "right")


class ExchangeOutcome(NamedTuple):
    offer: Chips       # proposer -> responder
    request: Chips     # responder -> proposer
    post_chips_p: Chips
    post_chips_r: Chips


@dataclass(frozen=True)
class GameSetup:
    board: Board
    pos_p: Position
    pos_r: Position
    goal: Position
    chips_p: Chips
    chips_r: Chips


def score(unused: int, used: int, reached_goal: int) -> float:
    """Round score for ``unused`` leftover chips and a path of ``used`` moves."""
    if unused < 0 or used < 0:
        raise ValueError("chip counts must be non-negative")
    return unused + 1.5 * used * (1 + int(reached_goal))


def generate_board(rng) -> Board:
    """Sample a board; each tile uniform over the four colors, row-major order.

    Draws one 2-bit value per cell (``rng.getrandbits``), which is exactly
    uniform over the color set.
    """
    return tuple(COLORS[rng.getrandbits(2)] for _ in range(N_CELLS))


def generate_setup(rng) -> GameSetup:
    """Sample a full game instance by rejection.

    Draw order is fixed (board, proposer start, responder start, goal, proposer
    chips, responder chips) so a seeded stream reproduces the setup exactly.
    Starts are resampled until distinct; the goal until it coincides with
    neither start and is orthogonally adjacent to neither.
    """
    board = generate_board(rng)
    pos_p = Position.from_cell(rng.getrandbits(4))
    pos_r = Position.from_cell(rng.getrandbits(4))
    while pos_r == pos_p:
        pos_r = Position.from_cell(rng.getrandbits(4))
    while True:
        goal = Position.from_cell(rng.getrandbits(4))
        if goal in (pos_p, pos_r):
            continue
        if goal.is_adjacent(pos_p) or goal.is_adjacent(pos_r):
            continue
        break
    chips_p = Chips.of(*(COLORS[rng.getrandbits(2)] for _ in range(4)))
    chips_r = Chips.of(*(COLORS[rng.getrandbits(2)] for _ in range(4)))
    return GameSetup(board, pos_p, pos_r, goal, chips_p, chips_r)


# Moves in tie-break (lexicographic) order.
MOVE_NAMES = ("up", "down", "left", "right")
_MOVE_DELTAS = ((-1, 0), (1, 0), (0, -1), (0, 1))


def best_play(board: Board, start: Position, goal: Position, chips: Chips) -> PlayResult:
    """Maximum-score play for one agent.

    Searches every simple chip-feasible path. A play counts as reaching the
    goal when its path touches the goal tile at any point; the path may
    continue afterwards, so every chip spent then earns the doubled rate.
    Ties on score are broken by smaller final distance to the goal, then fewer
    chips used, then the lexicographically smallest move sequence (up, down,
    left, right).
    """
    total = chips.total()
    goal_cell = goal.cell
    counts = list(chips)
    moves: list[int] = []
    best: dict = {"key": None, "cell": None, "moves": (), "reached": False}

    def consider(cell: int, reached: bool) -> None:
        used = len(moves)
        s = (total - used) + 1.5 * used * (1 + reached)
        dist = abs(cell // 4 - goal.row) + abs(cell % 4 - goal.col)
        key = (-s, dist, used)
        if best["key"] is None or key < best["key"] or (
            key == best["key"] and tuple(moves) < best["moves"]
        ):
            best["key"] = key
            best["cell"] = cell
            best["moves"] = tuple(moves)
            best["reached"] = reached

    def walk(cell: int, visited: int, saw_goal: bool) -> None:
        consider(cell, saw_goal)
        row, col = divmod(cell, 4)
        for mi, (dr, dc) in enumerate(_MOVE_DELTAS):
            nr, nc = row + dr, col + dc
            if not (0 <= nr < 4 and 0 <= nc < 4):
                continue
            nxt = nr * 4 + nc
            if visited & (1 << nxt):
                continue
            color = board[nxt]
            if counts[color] == 0:
                continue
            counts[color] -= 1
            moves.append(mi)
            walk(nxt, visited | (1 << nxt), saw_goal or nxt == goal_cell)
            moves.pop()
            counts[color] += 1

    walk(start.cell, 1 << start.cell, start.cell == goal_cell)
    neg_s, _dist, used = best["key"]
    final = Position.from_cell(best["cell"])
    return PlayResult(
        score=-neg_s,
        reached_goal=best["reached"],
        chips_used=used,
        chips_unused=total - used,
        final_pos=final,
        moves=tuple(MOVE_NAMES[m] for m in best["moves"]),
    )


def sub_multisets(chips: Chips) -> list[Chips]:
    """All sub-multisets of an inventory, lexicographically ascending by counts."""
    return [
        Chips(*c) for c in itertools.product(*(range(n + 1) for n in chips))
    ]


def no_exchange(chips_p: Chips, chips_r: Chips) -> ExchangeOutcome:
    """The keep-everything outcome (empty offer, empty request)."""
    return ExchangeOutcome(Chips(), Chips(), chips_p, chips_r)


def enumerate_exchanges(chips_p: Chips, chips_r: Chips) -> list[ExchangeOutcome]:
    """Every distinct (offer, request) pair, offer-major canonical order.

    The first element is always the no-exchange outcome.
    """
    outcomes = []
    for offer in sub_multisets(chips_p):
        post_p_base = chips_p.subtract(offer)
        post_r_base = chips_r.add(offer)
        for request in sub_multisets(chips_r):
            outcomes.append(
                ExchangeOutcome(
                    offer,
                    request,
                    post_p_base.add(request),
                    post_r_base.subtract(request),
                )
            )
    return outcomes


# ---------------------------------------------------------------------------
# Path solver kernels. The per-round score table is the simulation's inner
# loop: one kernel call evaluates every exchange outcome of a round.
# ---------------------------------------------------------------------------

_NBR_FLAT = np.full(N_CELLS * 4, -1, dtype=np.int64)
for _cell in range(N_CELLS):
    _r, _c = divmod(_cell, BOARD_SIZE)
    for _k, (_dr, _dc) in enumerate(_MOVE_DELTAS):
        _rr, _cc = _r + _dr, _c + _dc
        if 0 <= _rr < BOARD_SIZE and 0 <= _cc < BOARD_SIZE:
            _NBR_FLAT[_cell * 4 + _k] = _rr * BOARD_SIZE + _cc


@njit(cache=True)
def _solve_packed(board, start, goal, c0, c1, c2, c3, pos_stack, it_stack):
    """Iterative DFS over simple chip-feasible paths from ``start``.

    Returns ``bonus * 2 + reached`` where ``bonus`` is the best play's score
    above the inventory total, in half-points (``used`` for a path that never
    touches the goal, ``4 * used`` for one that does), and ``reached`` is the
    goal flag of the tie-broken best play (score, then final distance to the
    goal, then fewer chips used).
    """
    goal_row = goal // 4
    goal_col = goal % 4
    best_bonus = 0
    best_dist = abs(start // 4 - goal_row) + abs(start % 4 - goal_col)
    best_used = 0
    best_reached = 1 if start == goal else 0
    goal_depth = 0 if start == goal else -1
    pos_stack[0] = start
    it_stack[0] = 0
    visited = 1 << start
    depth = 0
    while depth >= 0:
        pos = pos_stack[depth]
        k = it_stack[depth]
        if k < 4:
            it_stack[depth] = k + 1
            nxt = _NBR_FLAT[pos * 4 + k]
            if nxt < 0:
                continue
            if visited & (1 << nxt):
                continue
            col = board[nxt]
            if col == 0:
                if c0 == 0:
                    continue
                c0 -= 1
            elif col == 1:
                if c1 == 0:
                    continue
                c1 -= 1
            elif col == 2:
                if c2 == 0:
                    continue
                c2 -= 1
            else:
                if c3 == 0:
                    continue
                c3 -= 1
            depth += 1
            pos_stack[depth] = nxt
            it_stack[depth] = 0
            visited |= 1 << nxt
            if nxt == goal:
                goal_depth = depth
            saw = goal_depth >= 0
            dist = abs(nxt // 4 - goal_row) + abs(nxt % 4 - goal_col)
            u = depth
            b = 4 * u if saw else u
            if b > best_bonus or (
                b == best_bonus and (dist < best_dist or (dist == best_dist and u < best_used))
            ):
                best_bonus = b
                best_dist = dist
                best_used = u
                best_reached = 1 if saw else 0
        else:
            if depth > 0:
                if goal_depth == depth:
                    goal_depth = -1
                visited &= ~(1 << pos)
                col = board[pos]
                if col == 0:
                    c0 += 1
                elif col == 1:
                    c1 += 1
                elif col == 2:
                    c2 += 1
                else:
                    c3 += 1
            depth -= 1
    return best_bonus * 2 + best_reached


@njit(cache=True)
def _score_table_kernel(board, pos_p, pos_r, goal, cp, cr, offers, requests):
    """Scores and goal flags for every (offer, request) pair, offer-major.

    Distinct post-trade inventories are solved once via a keyed memo; a round
    evaluates at most 256 outcomes but far fewer distinct inventories.
    """
    n_o = offers.shape[0]
    n_q = requests.shape[0]
    n = n_o * n_q
    s_p = np.empty(n, dtype=np.float64)
    s_r = np.empty(n, dtype=np.float64)
    g_p = np.empty(n, dtype=np.uint8)
    g_r = np.empty(n, dtype=np.uint8)
    memo_p = np.full(6561, -1, dtype=np.int64)
    memo_r = np.full(6561, -1, dtype=np.int64)
    pos_stack = np.empty(MAX_CHIPS + 1, dtype=np.int64)
    it_stack = np.empty(MAX_CHIPS + 1, dtype=np.int64)
    for oi in range(n_o):
        for qi in range(n_q):
            i = oi * n_q + qi
            a0 = cp[0] - offers[oi, 0] + requests[qi, 0]
            a1 = cp[1] - offers[oi, 1] + requests[qi, 1]
            a2 = cp[2] - offers[oi, 2] + requests[qi, 2]
            a3 = cp[3] - offers[oi, 3] + requests[qi, 3]
            key = ((a0 * 9 + a1) * 9 + a2) * 9 + a3
            packed = memo_p[key]
            if packed < 0:
                packed = _solve_packed(board, pos_p, goal, a0, a1, a2, a3, pos_stack, it_stack)
                memo_p[key] = packed
            s_p[i] = (a0 + a1 + a2 + a3) + 0.5 * (packed // 2)
            g_p[i] = packed & 1
            b0 = cr[0] + offers[oi, 0] - requests[qi, 0]
            b1 = cr[1] + offers[oi, 1] - requests[qi, 1]
            b2 = cr[2] + offers[oi, 2] - requests[qi, 2]
            b3 = cr[3] + offers[oi, 3] - requests[qi, 3]
            key = ((b0 * 9 + b1) * 9 + b2) * 9 + b3
            packed = memo_r[key]
            if packed < 0:
                packed = _solve_packed(board, pos_r, goal, b0, b1, b2, b3, pos_stack, it_stack)
                memo_r[key] = packed
            s_r[i] = (b0 + b1 + b2 + b3) + 0.5 * (packed // 2)
            g_r[i] = packed & 1
    return s_p, s_r, g_p, g_r


_SUBSET_ARRAYS: dict = {}
_MOVED_ARRAYS: dict = {}


def _subset_array(chips: Chips) -> np.ndarray:
    arr = _SUBSET_ARRAYS.get(chips)
    if arr is None:
        arr = np.array(
            list(itertools.product(*(range(n + 1) for n in chips))), dtype=np.int64
        )
        arr.setflags(write=False)
        _SUBSET_ARRAYS[chips] = arr
    return arr


def _moved_array(chips_p: Chips, chips_r: Chips) -> np.ndarray:
    """Chips changing hands per outcome, cached per inventory pair."""
    key = (chips_p, chips_r)
    arr = _MOVED_ARRAYS.get(key)
    if arr is None:
        offers = _subset_array(chips_p)
        requests = _subset_array(chips_r)
        arr = (offers.sum(axis=1)[:, None] + requests.sum(axis=1)[None, :]).ravel()
        arr.setflags(write=False)
        _MOVED_ARRAYS[key] = arr
    return arr


@dataclass(frozen=True)
class OutcomeTable:
    """Per-round score table over all exchange outcomes of a setup.

    Outcome ``i`` pairs offer ``i // len(requests)`` with request
    ``i % len(requests)``; index 0 is the no-exchange outcome. Row order
    matches :func:`enumerate_exchanges`.
    """

    offers: np.ndarray    # (O, 4) chip counts
    requests: np.ndarray  # (Q, 4)
    s_p: np.ndarray       # (O*Q,) proposer score per outcome
    s_r: np.ndarray
    goal_p: np.ndarray    # (O*Q,) uint8 goal flags
    goal_r: np.ndarray
    moved: np.ndarray     # (O*Q,) total chips changing hands

    @property
    def n_outcomes(self) -> int:
        return self.s_p.shape[0]

    def pair_at(self, i: int) -> tuple:
        oi, qi = divmod(i, self.requests.shape[0])
        return Chips(*map(int, self.offers[oi])), Chips(*map(int, self.requests[qi]))


def exchange_score_table(setup: GameSetup) -> OutcomeTable:
    """Solve every exchange outcome of a round in one kernel call."""
    board = np.array(setup.board, dtype=np.int64)
    offers = _subset_array(setup.chips_p)
    requests = _subset_array(setup.chips_r)
    s_p, s_r, g_p, g_r = _score_table_kernel(
        board,
        setup.pos_p.cell,
        setup.pos_r.cell,
        setup.goal.cell,
        np.array(setup.chips_p, dtype=np.int64),
        np.array(setup.chips_r, dtype=np.int64),
        offers,
        requests,
    )
    moved = _moved_array(setup.chips_p, setup.chips_r)
    return OutcomeTable(offers, requests, s_p, s_r, g_p, g_r, moved)


@lru_cache(maxsize=1 << 16)
def _chip_score(board: Board, start_cell: int, goal_cell: int, chips: Chips) -> float:
    stack_a = np.empty(MAX_CHIPS + 1, dtype=np.int64)
    stack_b = np.empty(MAX_CHIPS + 1, dtype=np.int64)
    packed = _solve_packed(
        np.array(board, dtype=np.int64), start_cell, goal_cell,
        chips.red, chips.blue, chips.green, chips.yellow, stack_a, stack_b,
    )
    return chips.total() + 0.5 * (packed // 2)


def outcome_scores(setup: GameSetup, outcome: ExchangeOutcome) -> tuple:
    """(proposer score, responder score) under an exchange outcome.

    Repeated inventories hit a cache, so scanning the full outcome set of a
    round solves each distinct post-trade inventory once.
    """
    s_p = _chip_score(setup.board, setup.pos_p.cell, setup.goal.cell, outcome.post_chips_p)
    s_r = _chip_score(setup.board, setup.pos_r.cell, setup.goal.cell, outcome.post_chips_r)
    return s_p, s_r
