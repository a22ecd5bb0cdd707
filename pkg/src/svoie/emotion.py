"""Integral-emotion state and per-decision policy selection.

Valence is a five-level lattice -1, -0.5, 0, +0.5, +1. Reaching the goal in a
round steps it up, missing steps it down. Its magnitude is the probability of
acting on the matching emotion policy instead of the agent's SVO trait.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .policies import PolicyKind, SVO_TRAITS

EMOTION_STEP = 0.5
EMOTION_LEVELS = (-1.0, -0.5, 0.0, 0.5, 1.0)


class Mode(Enum):
    STABLE_SVO = "stable"
    SVOIE = "svoie"


@dataclass
class AgentProfile:
    id: int
    svo: PolicyKind
    mode: Mode
    emotion: float = 0.0

    def __post_init__(self) -> None:
        if self.svo not in SVO_TRAITS:
            raise ValueError(f"svo must be an SVO trait, got {self.svo!r}")
        if self.emotion not in EMOTION_LEVELS:
            raise ValueError(f"emotion must be one of {EMOTION_LEVELS}")


def update_emotion(emotion: float, goal_achieved: bool) -> float:
    """One valence step up on goal achievement, down otherwise, clamped."""
    if goal_achieved:
        return min(1.0, emotion + EMOTION_STEP)
    return max(-1.0, emotion - EMOTION_STEP)


def record_goal_outcome(profile: AgentProfile, goal_achieved: bool) -> None:
    """Apply a round's goal flag to an agent. Stable-SVO agents never move."""
    if profile.mode is Mode.SVOIE:
        profile.emotion = update_emotion(profile.emotion, goal_achieved)


def select_policy(profile: AgentProfile, rng) -> PolicyKind:
    """Policy governing the agent's next decision.

    Svoie agents draw once per decision: with probability |emotion| they act
    on the emotion policy matching the valence sign, otherwise on their SVO
    trait. Stable-SVO agents consume no draw and always use their trait.
    """
    if profile.mode is Mode.STABLE_SVO:
        return profile.svo
    draw = rng.random()
    e = profile.emotion
    if e > 0 and draw < e:
        return PolicyKind.POSITIVE_IE
    if e < 0 and draw < -e:
        return PolicyKind.NEGATIVE_IE
    return profile.svo
