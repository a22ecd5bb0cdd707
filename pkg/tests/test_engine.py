import random
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import chisquare

from svoie.engine import (
    Chips,
    Color,
    GameSetup,
    Position,
    best_play,
    enumerate_exchanges,
    exchange_score_table,
    generate_board,
    generate_setup,
    no_exchange,
    outcome_scores,
    score,
    sub_multisets,
)

from conftest import fig1_setup, oracle_best_play, oracle_score, random_inventory


class ConstantBits:
    """Degenerate random stream: every draw returns zero."""

    def getrandbits(self, _nbits):
        return 0


def test_score_fixtures():
    assert score(4, 0, 0) == 4.0
    assert score(1, 3, 1) == 10.0
    assert score(0, 2, 0) == 3.0


def test_score_rejects_negative_counts():
    with pytest.raises(ValueError):
        score(-1, 0, 0)
    with pytest.raises(ValueError):
        score(0, -2, 1)


def test_generate_board_constant_stream_is_all_red():
    board = generate_board(ConstantBits())
    assert board == (Color.RED,) * 16


def test_generate_board_deterministic():
    assert generate_board(random.Random(99)) == generate_board(random.Random(99))


def test_generate_board_color_frequencies():
    rng = random.Random(7)
    counts = Counter()
    n_boards = 10_000
    for _ in range(n_boards):
        counts.update(generate_board(rng))
    for color in Color:
        freq = counts[color] / (16 * n_boards)
        assert abs(freq - 0.25) <= 0.01


def test_generate_setup_invariants():
    rng = random.Random(11)
    for _ in range(10_000):
        s = generate_setup(rng)
        assert s.pos_p != s.pos_r
        assert s.goal != s.pos_p and s.goal != s.pos_r
        assert not s.goal.is_adjacent(s.pos_p)
        assert not s.goal.is_adjacent(s.pos_r)
        assert s.chips_p.total() == 4
        assert s.chips_r.total() == 4
        assert len(s.board) == 16
        assert all(tile in tuple(Color) for tile in s.board)


class ScriptedStarts:
    """Forces the two start draws, delegates everything else to a real rng."""

    def __init__(self, rng, start_cells):
        self._rng = rng
        self._starts = list(start_cells)

    def getrandbits(self, nbits):
        if nbits == 4 and self._starts:
            return self._starts.pop(0)
        return self._rng.getrandbits(nbits)


def test_goal_uniform_over_valid_cells_given_fixed_starts():
    rng = random.Random(5)
    pos_p, pos_r = Position(0, 0), Position(3, 3)
    blocked = {pos_p, pos_r}
    blocked |= {p for p in (Position(r, c) for r in range(4) for c in range(4))
                if p.is_adjacent(pos_p) or p.is_adjacent(pos_r)}
    valid = [Position(r, c) for r in range(4) for c in range(4)
             if Position(r, c) not in blocked]
    counts = Counter()
    n = 20_000
    for _ in range(n):
        s = generate_setup(ScriptedStarts(rng, [pos_p.cell, pos_r.cell]))
        assert s.pos_p == pos_p and s.pos_r == pos_r
        counts[s.goal] += 1
    assert set(counts) == set(valid)
    _stat, p = chisquare([counts[c] for c in valid])
    assert p > 1e-3


def test_best_play_two_step_goal_fixture():
    # (0,1)=red, (0,2)=blue goal, everything else yellow; no yellow chips
    tiles = [Color.YELLOW] * 16
    tiles[1] = Color.RED
    tiles[2] = Color.BLUE
    chips = Chips.of(Color.RED, Color.BLUE, Color.GREEN, Color.GREEN)
    result = best_play(tuple(tiles), Position(0, 0), Position(0, 2), chips)
    assert result.moves == ("right", "right")
    assert result.chips_used == 2
    assert result.chips_unused == 2
    assert result.reached_goal
    assert result.score == 8.0
    assert result.final_pos == Position(0, 2)


def test_best_play_no_feasible_move():
    tiles = [Color.YELLOW] * 16
    chips = Chips.of(Color.RED, Color.BLUE, Color.GREEN, Color.GREEN)
    result = best_play(tuple(tiles), Position(0, 0), Position(0, 2), chips)
    assert result.moves == ()
    assert result.score == 4.0
    assert result.chips_used == 0
    assert result.chips_unused == 4
    assert not result.reached_goal
    assert result.final_pos == Position(0, 0)


def test_best_play_matches_oracle_on_random_instances(random_setups):
    rng = random.Random(31337)
    for setup in random_setups[:150]:
        chips = random_inventory(rng)
        got = best_play(setup.board, setup.pos_p, setup.goal, chips)
        exp_score, exp_final, exp_used, exp_reached, exp_moves = oracle_best_play(
            setup.board, setup.pos_p, setup.goal, chips
        )
        assert got.score == exp_score
        assert got.final_pos == exp_final
        assert got.chips_used == exp_used
        assert got.reached_goal == exp_reached
        assert got.moves == exp_moves


def test_best_play_deterministic(random_setups):
    s = random_setups[0]
    first = best_play(s.board, s.pos_p, s.goal, s.chips_p)
    again = best_play(s.board, s.pos_p, s.goal, s.chips_p)
    assert first == again


@st.composite
def board_and_play(draw):
    board = tuple(draw(st.sampled_from(tuple(Color))) for _ in range(16))
    start = Position(draw(st.integers(0, 3)), draw(st.integers(0, 3)))
    goal = Position(draw(st.integers(0, 3)), draw(st.integers(0, 3)))
    counts = draw(
        st.tuples(*(st.integers(0, 2) for _ in range(4))).filter(lambda t: sum(t) <= 7)
    )
    return board, start, goal, Chips(*counts)


@settings(max_examples=60, deadline=None)
@given(board_and_play(), st.sampled_from(tuple(Color)))
def test_best_play_monotone_in_chips(params, extra):
    board, start, goal, chips = params
    base = best_play(board, start, goal, chips).score
    more = best_play(board, start, goal, chips.add(Chips.of(extra))).score
    assert more >= base + 1  # the added chip is worth at least its keep value


@settings(max_examples=60, deadline=None)
@given(board_and_play())
def test_best_play_satisfies_scoring_identity(params):
    board, start, goal, chips = params
    r = best_play(board, start, goal, chips)
    assert r.chips_used + r.chips_unused == chips.total()
    assert r.score == score(r.chips_unused, r.chips_used, int(r.reached_goal))
    assert (2 * r.score) == int(2 * r.score)  # half-point lattice


def test_sub_multisets_counts():
    assert len(sub_multisets(Chips(2, 0, 0, 0))) == 3
    assert len(sub_multisets(Chips(1, 1, 1, 1))) == 16
    assert len(sub_multisets(Chips(4, 0, 0, 0))) == 5
    assert sub_multisets(Chips())[0] == Chips()


def test_enumerate_exchanges_small_fixture():
    outcomes = enumerate_exchanges(Chips(2, 0, 0, 0), Chips(0, 1, 0, 0))
    assert len(outcomes) == 6  # offers {0,R,RR} x requests {0,B}
    assert outcomes[0].offer == Chips() and outcomes[0].request == Chips()
    assert outcomes[0].post_chips_p == Chips(2, 0, 0, 0)
    seen = {(o.offer, o.request) for o in outcomes}
    assert len(seen) == 6


def test_enumerate_exchanges_empty_and_full():
    assert len(enumerate_exchanges(Chips(), Chips())) == 1
    outcomes = enumerate_exchanges(Chips(1, 1, 1, 1), Chips(1, 1, 1, 1))
    assert len(outcomes) == 256


@settings(max_examples=40, deadline=None)
@given(
    st.tuples(*(st.integers(0, 2) for _ in range(4))),
    st.tuples(*(st.integers(0, 2) for _ in range(4))),
)
def test_enumerate_exchanges_conserves_chips(cp, cr):
    chips_p, chips_r = Chips(*cp), Chips(*cr)
    combined = chips_p.add(chips_r)
    for oc in enumerate_exchanges(chips_p, chips_r):
        assert chips_p.covers(oc.offer)
        assert chips_r.covers(oc.request)
        assert oc.post_chips_p.add(oc.post_chips_r) == combined


def test_outcome_scores_no_exchange_equals_best_play(random_setups):
    for setup in random_setups[:40]:
        s_p, s_r = outcome_scores(setup, no_exchange(setup.chips_p, setup.chips_r))
        assert s_p == best_play(setup.board, setup.pos_p, setup.goal, setup.chips_p).score
        assert s_r == best_play(setup.board, setup.pos_r, setup.goal, setup.chips_r).score


def test_outcome_scores_role_swap_symmetry(random_setups):
    for setup in random_setups[:25]:
        swapped = GameSetup(
            setup.board, setup.pos_r, setup.pos_p, setup.goal, setup.chips_r, setup.chips_p
        )
        for oc in enumerate_exchanges(setup.chips_p, setup.chips_r)[:20]:
            mirror = next(
                m
                for m in enumerate_exchanges(swapped.chips_p, swapped.chips_r)
                if m.offer == oc.request and m.request == oc.offer
            )
            assert outcome_scores(setup, oc) == tuple(reversed(outcome_scores(swapped, mirror)))


def test_fig1_swap_benefits_both():
    setup = fig1_setup()
    base_p, base_r = outcome_scores(setup, no_exchange(setup.chips_p, setup.chips_r))
    swap = next(
        oc
        for oc in enumerate_exchanges(setup.chips_p, setup.chips_r)
        if oc.offer == Chips.of(Color.RED) and oc.request == Chips.of(Color.YELLOW)
    )
    s_p, s_r = outcome_scores(setup, swap)
    assert s_p > base_p and s_r > base_r
    assert best_play(setup.board, setup.pos_p, setup.goal, swap.post_chips_p).reached_goal
    assert best_play(setup.board, setup.pos_r, setup.goal, swap.post_chips_r).reached_goal
    # frozen values, cross-checked against the enumeration oracle
    assert (base_p, base_r) == (5.0, 5.5)
    assert (s_p, s_r) == (12.0, 12.0)
    assert oracle_score(setup.board, setup.pos_p, setup.goal, swap.post_chips_p) == 12.0
    assert oracle_score(setup.board, setup.pos_r, setup.goal, swap.post_chips_r) == 12.0


def test_score_table_matches_outcome_scores(random_setups):
    for setup in random_setups[:30]:
        table = exchange_score_table(setup)
        outcomes = enumerate_exchanges(setup.chips_p, setup.chips_r)
        assert table.n_outcomes == len(outcomes)
        for i, oc in enumerate(outcomes):
            s_p, s_r = outcome_scores(setup, oc)
            assert table.s_p[i] == s_p
            assert table.s_r[i] == s_r
            assert table.moved[i] == oc.offer.total() + oc.request.total()
            assert table.pair_at(i) == (oc.offer, oc.request)


def test_score_table_goal_flags_match_best_play(random_setups):
    for setup in random_setups[:20]:
        table = exchange_score_table(setup)
        outcomes = enumerate_exchanges(setup.chips_p, setup.chips_r)
        for i in np.random.default_rng(1).choice(len(outcomes), size=8, replace=False):
            oc = outcomes[int(i)]
            play_p = best_play(setup.board, setup.pos_p, setup.goal, oc.post_chips_p)
            play_r = best_play(setup.board, setup.pos_r, setup.goal, oc.post_chips_r)
            assert bool(table.goal_p[int(i)]) == play_p.reached_goal
            assert bool(table.goal_r[int(i)]) == play_r.reached_goal


def test_chips_arithmetic():
    a = Chips(1, 2, 0, 1)
    b = Chips(0, 1, 0, 1)
    assert a.add(b) == Chips(1, 3, 0, 2)
    assert a.subtract(b) == Chips(1, 1, 0, 0)
    assert a.covers(b) and not b.covers(a)
    assert a.total() == 4
    with pytest.raises(ValueError):
        b.subtract(a)
    assert Chips.of(Color.RED, Color.RED, Color.YELLOW) == Chips(2, 0, 0, 1)
