"""Welfare and inequality metrics plus the Stable-vs-Svoie comparison table.

Individual welfare is an agent's mean score per time step within one repeat;
a time step is a two-round game, so it equals twice the agent's mean round
score. Welfare tests pool the per-(repeat, agent) welfares of both arms;
inequality tests compare the per-repeat CoV values, since CoV is a per-run
summary. Both views are emitted so either aggregation can be inspected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional

import numpy as np
from scipy.special import stdtr

SAMPLE_LABELS = ("all", "altr", "coop", "self")

# Every agent plays exactly two rounds (one game) per time step, so its
# per-step welfare is twice its per-round mean score.
ROUNDS_PER_STEP = 2


class WelfareRow(NamedTuple):
    repeat: int
    agent_id: int
    trait: str
    welfare: float


@dataclass
class WelfareSample:
    """Labelled welfare values pooled across repeats."""

    society: str
    label: str    # "all" or a trait label
    mode: str
    values: np.ndarray
    n_agents: int


@dataclass
class ComparisonResult:
    """One table row comparing the two arms on a sample of agents."""

    society: str
    sample: str
    size: int
    mean_stable: float
    std_stable: float
    cov_stable: float
    mean_svoie: float
    std_svoie: float
    cov_svoie: float
    p_value: float            # Welch t-test on pooled individual welfares
    cohens_d: float
    cov_p_value: Optional[float]   # Welch t-test on per-repeat CoV values
    cov_cohens_d: Optional[float]  # None when either side is degenerate


class WelfareAccumulator:
    """Streams round records into per-(repeat, agent) welfare rows."""

    def __init__(self) -> None:
        self._sums: dict = {}

    def observe(self, record) -> None:
        for id_, trait, sc in (
            (record.proposer_id, record.proposer_trait, record.proposer_score),
            (record.responder_id, record.responder_trait, record.responder_score),
        ):
            key = (record.repeat, id_)
            slot = self._sums.get(key)
            if slot is None:
                self._sums[key] = [trait, sc, 1]
            else:
                slot[1] += sc
                slot[2] += 1

    def rows(self) -> list:
        out = [
            WelfareRow(rep, agent, trait, ROUNDS_PER_STEP * total / count)
            for (rep, agent), (trait, total, count) in self._sums.items()
        ]
        out.sort(key=lambda r: (r.repeat, r.agent_id))
        return out


def welfare_rows(records: Iterable) -> list:
    acc = WelfareAccumulator()
    for rec in records:
        acc.observe(rec)
    return acc.rows()


def individual_welfare(records: Iterable, agent_id: int) -> float:
    """Mean score of one agent over every round it appears in."""
    total = 0.0
    count = 0
    for rec in records:
        if rec.proposer_id == agent_id:
            total += rec.proposer_score
            count += 1
        if rec.responder_id == agent_id:
            total += rec.responder_score
            count += 1
    if count == 0:
        raise ValueError(f"agent {agent_id} appears in no record")
    return total / count


def _values(sample) -> np.ndarray:
    vals = sample.values if isinstance(sample, WelfareSample) else sample
    return np.asarray(vals, dtype=np.float64)


def collective_welfare(sample) -> float:
    """Mean individual welfare over a sample of agents."""
    vals = _values(sample)
    if vals.size == 0:
        raise ValueError("empty welfare sample")
    return float(vals.mean())


def cov(sample, ddof: int = 0) -> float:
    """Coefficient of variation: standard deviation over mean.

    Population (ddof=0) by default; pass ddof=1 for the sample form.
    """
    vals = _values(sample)
    if vals.size == 0:
        raise ValueError("empty welfare sample")
    mean = vals.mean()
    if mean == 0:
        raise ValueError("CoV undefined for zero-mean sample")
    return float(vals.std(ddof=ddof) / mean)


def welch_t_test(a, b) -> float:
    """Two-sided p-value of the unequal-variance (Welch) two-sample t-test."""
    xa = np.asarray(a, dtype=np.float64)
    xb = np.asarray(b, dtype=np.float64)
    if xa.size < 2 or xb.size < 2:
        raise ValueError("each sample needs at least 2 values")
    va = xa.var(ddof=1)
    vb = xb.var(ddof=1)
    if va == 0 and vb == 0:
        raise ValueError("degenerate samples: both variances are zero")
    sa = va / xa.size
    sb = vb / xb.size
    t = (xa.mean() - xb.mean()) / math.sqrt(sa + sb)
    df = (sa + sb) ** 2 / (sa**2 / (xa.size - 1) + sb**2 / (xb.size - 1))
    return float(2.0 * stdtr(df, -abs(t)))


def cohens_d(a, b) -> float:
    """Absolute standardized mean difference with pooled (n-1) variance."""
    xa = np.asarray(a, dtype=np.float64)
    xb = np.asarray(b, dtype=np.float64)
    if xa.size < 2 or xb.size < 2:
        raise ValueError("each sample needs at least 2 values")
    pooled_var = (
        (xa.size - 1) * xa.var(ddof=1) + (xb.size - 1) * xb.var(ddof=1)
    ) / (xa.size + xb.size - 2)
    if pooled_var == 0:
        raise ValueError("degenerate samples: pooled variance is zero")
    return float(abs(xa.mean() - xb.mean()) / math.sqrt(pooled_var))


def build_samples(rows: list, society: str, mode: str) -> dict:
    """Welfare samples pooled across repeats, keyed by sample label."""
    samples = {}
    traits = sorted({r.trait for r in rows})
    for label in SAMPLE_LABELS:
        if label == "all":
            chosen = rows
        elif label in traits:
            chosen = [r for r in rows if r.trait == label]
        else:
            continue
        vals = np.array([r.welfare for r in chosen], dtype=np.float64)
        n_agents = len({r.agent_id for r in chosen})
        samples[label] = WelfareSample(society, label, mode, vals, n_agents)
    return samples


def per_repeat_cov(rows: list, label: str, ddof: int = 0) -> list:
    """CoV of each repeat's welfare distribution for one sample label."""
    by_repeat: dict = {}
    for r in rows:
        if label == "all" or r.trait == label:
            by_repeat.setdefault(r.repeat, []).append(r.welfare)
    return [cov(vals, ddof=ddof) for _, vals in sorted(by_repeat.items())]


def summarize(stable_rows: list, svoie_rows: list, society: str) -> list:
    """Stable-vs-Svoie comparison rows, one per sample label present."""
    stable = build_samples(stable_rows, society, "stable")
    svoie = build_samples(svoie_rows, society, "svoie")
    if set(stable) != set(svoie):
        raise ValueError(
            f"arms disagree on samples: {sorted(stable)} vs {sorted(svoie)}"
        )
    results = []
    for label in SAMPLE_LABELS:
        if label not in stable:
            continue
        sa, sv = stable[label], svoie[label]
        if sa.n_agents != sv.n_agents:
            raise ValueError(
                f"sample {label!r} sizes differ between arms: {sa.n_agents} vs {sv.n_agents}"
            )
        cov_st = per_repeat_cov(stable_rows, label)
        cov_sv = per_repeat_cov(svoie_rows, label)
        try:
            cov_p = welch_t_test(cov_st, cov_sv)
            cov_d = cohens_d(cov_st, cov_sv)
        except ValueError:
            cov_p = cov_d = None
        results.append(
            ComparisonResult(
                society=society,
                sample=label,
                size=sa.n_agents,
                mean_stable=collective_welfare(sa),
                std_stable=float(sa.values.std()),
                cov_stable=cov(sa),
                mean_svoie=collective_welfare(sv),
                std_svoie=float(sv.values.std()),
                cov_svoie=cov(sv),
                p_value=welch_t_test(sa.values, sv.values),
                cohens_d=cohens_d(sa.values, sv.values),
                cov_p_value=cov_p,
                cov_cohens_d=cov_d,
            )
        )
    return results
