"""Decision policies: utility functions, proposal ranking, and acceptance rules.

Utilities are written from the deciding agent's own perspective (``s_self`` is
that agent's score). A proposer ranks every exchange outcome by its policy's
criterion and proposes the argmax; a responder accepts only if its policy's
acceptance inequality holds strictly against the no-exchange outcome.
"""

from __future__ import annotations

from enum import Enum
from typing import NamedTuple

import numpy as np

from .engine import Chips, ExchangeOutcome, GameSetup, OutcomeTable, no_exchange, outcome_scores


class PolicyKind(Enum):
    SELFISH = "selfish"
    COOPERATIVE = "cooperative"
    ALTRUISTIC = "altruistic"
    POSITIVE_IE = "positive_ie"   # inequity aversion
    NEGATIVE_IE = "negative_ie"   # competitive equity aversion ("wounded pride")


SVO_TRAITS = (PolicyKind.ALTRUISTIC, PolicyKind.COOPERATIVE, PolicyKind.SELFISH)
EMOTION_POLICIES = (PolicyKind.POSITIVE_IE, PolicyKind.NEGATIVE_IE)


class Role(Enum):
    PROPOSER = "proposer"
    RESPONDER = "responder"


class Proposal(NamedTuple):
    offer: Chips
    request: Chips


class UtilityView(NamedTuple):
    """Scores of an outcome and of no-exchange, from the deciding agent's side."""

    s_self: float
    s_other: float
    s_self_bar: float
    s_other_bar: float


def u_self(v: UtilityView) -> float:
    return v.s_self


def u_other(v: UtilityView) -> float:
    return v.s_other


def u_aggregate(v: UtilityView) -> float:
    return v.s_self + v.s_other


def u_advantage(v: UtilityView) -> float:
    """Own-score advantage over the other agent."""
    return v.s_self - v.s_other


def u_trade_advantage(v: UtilityView) -> float:
    """How much more the trade improves one's own score than the other's."""
    return (v.s_self - v.s_self_bar) - (v.s_other - v.s_other_bar)


def ranking_value(policy: PolicyKind, s_self, s_other):
    """Proposal-ranking criterion; works on floats and on numpy arrays alike.

    The inequity-averse policy minimises the absolute payoff gap (so its
    criterion is the negated gap); the competitive policy maximises the signed
    advantage, which degrades to the least-bad margin when no outcome puts the
    agent ahead.
    """
    if policy is PolicyKind.SELFISH:
        return s_self
    if policy is PolicyKind.COOPERATIVE:
        return s_self + s_other
    if policy is PolicyKind.ALTRUISTIC:
        return s_other
    if policy is PolicyKind.POSITIVE_IE:
        return -abs(s_self - s_other)
    if policy is PolicyKind.NEGATIVE_IE:
        return s_self - s_other
    raise ValueError(f"unknown policy {policy!r}")


def accepts_view(policy: PolicyKind, v: UtilityView) -> bool:
    """Responder acceptance. All inequalities strict: a trade that leaves the
    criterion unchanged is rejected."""
    bar = UtilityView(v.s_self_bar, v.s_other_bar, v.s_self_bar, v.s_other_bar)
    if policy is PolicyKind.SELFISH:
        return u_self(v) > u_self(bar)
    if policy is PolicyKind.COOPERATIVE:
        return u_aggregate(v) > u_aggregate(bar)
    if policy is PolicyKind.ALTRUISTIC:
        return u_other(v) > u_other(bar)
    if policy is PolicyKind.POSITIVE_IE:
        return u_trade_advantage(v) < 0
    if policy is PolicyKind.NEGATIVE_IE:
        return u_trade_advantage(v) > 0
    raise ValueError(f"unknown policy {policy!r}")


def rank_proposals(policy: PolicyKind, setup: GameSetup, outcomes) -> Proposal:
    """Select the proposal whose outcome maximises the policy's criterion.

    Ties are broken by higher own (proposer) score, then fewer chips changing
    hands, then the canonical outcome order (offer, request ascending), so the
    result does not depend on how ``outcomes`` is ordered.
    """
    if not outcomes:
        raise ValueError("outcomes must contain at least the no-exchange outcome")
    best_key = None
    best: ExchangeOutcome | None = None
    for oc in outcomes:
        s_p, s_r = outcome_scores(setup, oc)
        crit = ranking_value(policy, s_p, s_r)
        key = (-crit, -s_p, oc.offer.total() + oc.request.total(), oc.offer, oc.request)
        if best_key is None or key < best_key:
            best_key = key
            best = oc
    return Proposal(best.offer, best.request)


def accept(policy: PolicyKind, setup: GameSetup, proposal: Proposal) -> bool:
    """Responder's decision on a proposal, relative to keeping everything."""
    outcome = ExchangeOutcome(
        proposal.offer,
        proposal.request,
        setup.chips_p.subtract(proposal.offer).add(proposal.request),
        setup.chips_r.add(proposal.offer).subtract(proposal.request),
    )
    s_p, s_r = outcome_scores(setup, outcome)
    sb_p, sb_r = outcome_scores(setup, no_exchange(setup.chips_p, setup.chips_r))
    return accepts_view(policy, UtilityView(s_r, s_p, sb_r, sb_p))


# Fast twins of rank_proposals/accept over a per-round score table. They share
# ranking_value/accepts_view with the reference path, so the two routes cannot
# drift apart in policy semantics.

def pick_outcome_index(policy: PolicyKind, table: OutcomeTable) -> int:
    """Index of the proposer's chosen outcome in a round's score table."""
    crit = ranking_value(policy, table.s_p, table.s_r)
    # stable lexsort: primary criterion desc, own score desc, chips moved asc,
    # remaining ties resolve to the lowest (canonical) index
    order = np.lexsort((table.moved, -table.s_p, -crit))
    return int(order[0])


def accept_index(policy: PolicyKind, table: OutcomeTable, index: int) -> bool:
    """Responder's decision on outcome ``index``; index 0 is no-exchange."""
    v = UtilityView(
        float(table.s_r[index]),
        float(table.s_p[index]),
        float(table.s_r[0]),
        float(table.s_p[0]),
    )
    return accepts_view(policy, v)
