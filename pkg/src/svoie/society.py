"""Society construction and the simulation driver.

Each time step pairs every agent with a random partner; each pair plays a
two-round game with fresh boards and chip allocations, swapping negotiation
roles between rounds. Emotion updates commit round by round, so a game's
second round already sees the first round's outcome.

Every random draw comes from a substream derived from (master seed, repeat,
step, pair), which makes record streams reproducible bit-for-bit regardless of
execution order or worker count.
"""

from __future__ import annotations

import hashlib
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from random import Random
from typing import Iterator, NamedTuple

from .emotion import AgentProfile, Mode, record_goal_outcome, select_policy
from .engine import Chips, generate_setup, exchange_score_table
from .policies import PolicyKind, accept_index, pick_outcome_index

TRAIT_LABELS = {
    PolicyKind.ALTRUISTIC: "altr",
    PolicyKind.COOPERATIVE: "coop",
    PolicyKind.SELFISH: "self",
}
TRAIT_BY_LABEL = {v: k for k, v in TRAIT_LABELS.items()}

# Preset share of each trait (altruistic, cooperative, selfish).
PRESET_SHARES = {
    "altr-coop": (1, 1, 0),
    "altr-self": (1, 0, 1),
    "coop-self": (0, 1, 1),
    "mixed": (1, 1, 1),
}
FULL_POPULATION = 300
DESK_POPULATION = 60


@dataclass(frozen=True)
class SocietyConfig:
    name: str
    n_altruistic: int
    n_cooperative: int
    n_selfish: int
    mode: Mode

    def __post_init__(self) -> None:
        counts = (self.n_altruistic, self.n_cooperative, self.n_selfish)
        if min(counts) < 0:
            raise ValueError("trait counts must be non-negative")
        if self.population == 0:
            raise ValueError("society must contain at least one pair of agents")
        if self.population % 2 != 0:
            raise ValueError(f"population must be even for pairing, got {self.population}")

    @property
    def population(self) -> int:
        return self.n_altruistic + self.n_cooperative + self.n_selfish

    @property
    def counts(self) -> dict:
        return {
            "altr": self.n_altruistic,
            "coop": self.n_cooperative,
            "self": self.n_selfish,
        }

    @property
    def traits_present(self) -> list:
        return [label for label, n in self.counts.items() if n > 0]


def society_preset(name: str, mode: Mode, population: int = FULL_POPULATION) -> SocietyConfig:
    """Build a preset society scaled to ``population`` agents."""
    if name not in PRESET_SHARES:
        raise ValueError(f"unknown society preset {name!r}; expected one of {sorted(PRESET_SHARES)}")
    shares = PRESET_SHARES[name]
    denom = sum(shares)
    if population % denom != 0:
        raise ValueError(f"population {population} not divisible into {denom} equal trait groups")
    part = population // denom
    counts = tuple(s * part for s in shares)
    return SocietyConfig(name, counts[0], counts[1], counts[2], mode)


@dataclass(frozen=True)
class SimulationConfig:
    society: SocietyConfig
    master_seed: int
    steps: int = 1000
    repeats: int = 3

    def __post_init__(self) -> None:
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")


class RoundRecord(NamedTuple):
    """One negotiation round. Column order matches the round-log CSV."""

    repeat: int
    step: int
    round: int          # 1 or 2 within a game; roles swap between them
    pair: int
    proposer_id: int
    responder_id: int
    proposer_trait: str
    responder_trait: str
    proposer_policy: str
    responder_policy: str
    offer: Chips
    request: Chips
    accepted: bool
    proposer_score: float
    responder_score: float
    proposer_goal: int
    responder_goal: int
    proposer_emotion: float   # after this round's update
    responder_emotion: float


def build_population(society: SocietyConfig) -> list:
    """Agents with ids 0..N-1 assigned in trait order altr, coop, self.

    Both arms of a comparison therefore hold the same (id, trait) mapping.
    """
    profiles = []
    trait_runs = (
        (PolicyKind.ALTRUISTIC, society.n_altruistic),
        (PolicyKind.COOPERATIVE, society.n_cooperative),
        (PolicyKind.SELFISH, society.n_selfish),
    )
    next_id = 0
    for trait, n in trait_runs:
        for _ in range(n):
            profiles.append(AgentProfile(id=next_id, svo=trait, mode=society.mode))
            next_id += 1
    return profiles


def derive_seed(master_seed: int, *path: int) -> int:
    """Stable 64-bit substream seed for (master seed, index path)."""
    h = hashlib.blake2b(digest_size=8)
    h.update(struct.pack(">Q", master_seed & 0xFFFFFFFFFFFFFFFF))
    for part in path:
        h.update(struct.pack(">q", part))
    return int.from_bytes(h.digest(), "big")


def pair_agents(population: list, rng: Random) -> list:
    """Uniform random perfect matching: shuffle, then pair adjacent entries."""
    if len(population) % 2 != 0:
        raise ValueError(f"cannot pair an odd population of {len(population)}")
    order = list(population)
    rng.shuffle(order)
    return [(order[i], order[i + 1]) for i in range(0, len(order), 2)]


def play_round(
    proposer: AgentProfile,
    responder: AgentProfile,
    rng: Random,
    *,
    repeat: int = 0,
    step: int = 0,
    pair: int = 0,
    round_index: int = 1,
    setup=None,
) -> RoundRecord:
    """One negotiation round: fresh setup, one proposal, one response.

    ``setup`` overrides the freshly generated game instance, which is mainly
    useful for driving fixtures through the full negotiation path.
    """
    if setup is None:
        setup = generate_setup(rng)
    table = exchange_score_table(setup)
    policy_p = select_policy(proposer, rng)
    policy_r = select_policy(responder, rng)
    index = pick_outcome_index(policy_p, table)
    accepted = accept_index(policy_r, table, index)
    applied = index if accepted else 0
    s_p = float(table.s_p[applied])
    s_r = float(table.s_r[applied])
    g_p = int(table.goal_p[applied])
    g_r = int(table.goal_r[applied])
    record_goal_outcome(proposer, bool(g_p))
    record_goal_outcome(responder, bool(g_r))
    offer, request = table.pair_at(index)
    return RoundRecord(
        repeat=repeat,
        step=step,
        round=round_index,
        pair=pair,
        proposer_id=proposer.id,
        responder_id=responder.id,
        proposer_trait=TRAIT_LABELS[proposer.svo],
        responder_trait=TRAIT_LABELS[responder.svo],
        proposer_policy=policy_p.value,
        responder_policy=policy_r.value,
        offer=offer,
        request=request,
        accepted=accepted,
        proposer_score=s_p,
        responder_score=s_r,
        proposer_goal=g_p,
        responder_goal=g_r,
        proposer_emotion=proposer.emotion,
        responder_emotion=responder.emotion,
    )


def play_game(
    a: AgentProfile,
    b: AgentProfile,
    rng: Random,
    *,
    repeat: int = 0,
    step: int = 0,
    pair: int = 0,
) -> tuple:
    """A two-round game: fair coin picks the first proposer, roles swap after."""
    if a.id == b.id:
        raise ValueError("a game needs two distinct agents")
    if rng.random() < 0.5:
        first, second = a, b
    else:
        first, second = b, a
    r1 = play_round(first, second, rng, repeat=repeat, step=step, pair=pair, round_index=1)
    r2 = play_round(second, first, rng, repeat=repeat, step=step, pair=pair, round_index=2)
    return r1, r2


def _iter_repeat(config: SimulationConfig, repeat: int) -> Iterator[RoundRecord]:
    population = build_population(config.society)
    for step in range(config.steps):
        pairing_rng = Random(derive_seed(config.master_seed, repeat, step, 0))
        pairs = pair_agents(population, pairing_rng)
        for pair_index, (a, b) in enumerate(pairs):
            game_rng = Random(derive_seed(config.master_seed, repeat, step, pair_index + 1))
            r1, r2 = play_game(a, b, game_rng, repeat=repeat, step=step, pair=pair_index)
            yield r1
            yield r2


def iter_simulation(config: SimulationConfig) -> Iterator[RoundRecord]:
    """Stream records in deterministic order (repeat, step, pair, round)."""
    for repeat in range(config.repeats):
        yield from _iter_repeat(config, repeat)


def _run_repeat(config: SimulationConfig, repeat: int) -> list:
    return list(_iter_repeat(config, repeat))


def run_simulation(config: SimulationConfig, workers: int = 1) -> list:
    """All round records of an experiment.

    ``workers > 1`` distributes repeats over processes; per-(repeat, step,
    pair) substreams make the result identical to a serial run.
    """
    if workers <= 1 or config.repeats == 1:
        return list(iter_simulation(config))
    records: list = []
    with ProcessPoolExecutor(max_workers=min(workers, config.repeats)) as pool:
        futures = [pool.submit(_run_repeat, config, r) for r in range(config.repeats)]
        for fut in futures:
            records.extend(fut.result())
    return records
