import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from svoie.emotion import (
    EMOTION_LEVELS,
    AgentProfile,
    Mode,
    record_goal_outcome,
    select_policy,
    update_emotion,
)
from svoie.policies import PolicyKind


class NoDrawRng:
    def random(self):
        raise AssertionError("stable agents must not consume randomness")


def test_update_emotion_steps():
    assert update_emotion(0.0, True) == 0.5
    assert update_emotion(1.0, True) == 1.0
    assert update_emotion(0.5, False) == 0.0
    assert update_emotion(-1.0, False) == -1.0
    assert update_emotion(-0.5, True) == 0.0


def test_monotone_recovery_from_bottom():
    e = -1.0
    e = update_emotion(e, True)
    e = update_emotion(e, True)
    assert e == 0.0


@given(st.lists(st.booleans(), max_size=200))
def test_update_emotion_closure(outcomes):
    e = 0.0
    for achieved in outcomes:
        e = update_emotion(e, achieved)
        assert e in EMOTION_LEVELS


def test_profile_validation():
    with pytest.raises(ValueError):
        AgentProfile(0, PolicyKind.POSITIVE_IE, Mode.SVOIE)
    with pytest.raises(ValueError):
        AgentProfile(0, PolicyKind.SELFISH, Mode.SVOIE, emotion=0.3)


def test_stable_agents_never_update_or_draw():
    profile = AgentProfile(1, PolicyKind.COOPERATIVE, Mode.STABLE_SVO)
    record_goal_outcome(profile, True)
    record_goal_outcome(profile, True)
    assert profile.emotion == 0.0
    assert select_policy(profile, NoDrawRng()) is PolicyKind.COOPERATIVE


def test_svoie_agent_updates():
    profile = AgentProfile(1, PolicyKind.SELFISH, Mode.SVOIE)
    record_goal_outcome(profile, True)
    assert profile.emotion == 0.5
    record_goal_outcome(profile, False)
    record_goal_outcome(profile, False)
    assert profile.emotion == -0.5


def test_neutral_valence_always_svo():
    rng = random.Random(3)
    profile = AgentProfile(2, PolicyKind.ALTRUISTIC, Mode.SVOIE, emotion=0.0)
    assert all(select_policy(profile, rng) is PolicyKind.ALTRUISTIC for _ in range(10_000))


def test_full_valence_always_emotion_policy():
    rng = random.Random(4)
    up = AgentProfile(3, PolicyKind.SELFISH, Mode.SVOIE, emotion=1.0)
    down = AgentProfile(4, PolicyKind.SELFISH, Mode.SVOIE, emotion=-1.0)
    for _ in range(10_000):
        assert select_policy(up, rng) is PolicyKind.POSITIVE_IE
        assert select_policy(down, rng) is PolicyKind.NEGATIVE_IE


@pytest.mark.parametrize("emotion,expected", [(-0.5, PolicyKind.NEGATIVE_IE), (0.5, PolicyKind.POSITIVE_IE)])
def test_half_valence_frequency(emotion, expected):
    rng = random.Random(int(emotion * 10) & 0xFF)
    profile = AgentProfile(5, PolicyKind.COOPERATIVE, Mode.SVOIE, emotion=emotion)
    draws = [select_policy(profile, rng) for _ in range(10_000)]
    freq = sum(p is expected for p in draws) / len(draws)
    assert abs(freq - 0.5) <= 0.02
    assert set(draws) == {expected, PolicyKind.COOPERATIVE}


def test_sign_coupling():
    rng = random.Random(9)
    for emotion in EMOTION_LEVELS:
        profile = AgentProfile(6, PolicyKind.SELFISH, Mode.SVOIE, emotion=emotion)
        for _ in range(2_000):
            chosen = select_policy(profile, rng)
            if emotion <= 0:
                assert chosen is not PolicyKind.POSITIVE_IE
            if emotion >= 0:
                assert chosen is not PolicyKind.NEGATIVE_IE
