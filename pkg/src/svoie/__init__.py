"""Colored Trails negotiation societies with SVO and integral-emotion agents."""

__version__ = "0.1.0"

from .engine import (
    Board,
    Chips,
    Color,
    ExchangeOutcome,
    GameSetup,
    PlayResult,
    Position,
    best_play,
    enumerate_exchanges,
    generate_board,
    generate_setup,
    no_exchange,
    outcome_scores,
    score,
)
from .policies import (
    PolicyKind,
    Proposal,
    Role,
    UtilityView,
    accept,
    rank_proposals,
    u_advantage,
    u_aggregate,
    u_other,
    u_self,
    u_trade_advantage,
)
from .emotion import AgentProfile, Mode, select_policy, update_emotion
from .society import (
    RoundRecord,
    SimulationConfig,
    SocietyConfig,
    pair_agents,
    play_game,
    run_simulation,
    society_preset,
)
from .metrics import (
    ComparisonResult,
    WelfareSample,
    cohens_d,
    collective_welfare,
    cov,
    individual_welfare,
    summarize,
    welch_t_test,
)

__all__ = [
    "__version__",
    "AgentProfile",
    "Board",
    "Chips",
    "Color",
    "ComparisonResult",
    "ExchangeOutcome",
    "GameSetup",
    "Mode",
    "PlayResult",
    "PolicyKind",
    "Position",
    "Proposal",
    "Role",
    "RoundRecord",
    "SimulationConfig",
    "SocietyConfig",
    "UtilityView",
    "WelfareSample",
    "accept",
    "best_play",
    "cohens_d",
    "collective_welfare",
    "cov",
    "enumerate_exchanges",
    "generate_board",
    "generate_setup",
    "individual_welfare",
    "no_exchange",
    "outcome_scores",
    "pair_agents",
    "play_game",
    "rank_proposals",
    "run_simulation",
    "score",
    "select_policy",
    "society_preset",
    "summarize",
    "u_advantage",
    "u_aggregate",
    "u_other",
    "u_self",
    "u_trade_advantage",
    "update_emotion",
    "welch_t_test",
]
