"""On-disk formats: run config, round-log CSV, summary/manifest JSON, tables.

The round log is the artifact's source of truth: every statistic can be
recomputed from ``rounds.csv`` alone. ``summary.json`` caches the welfare
aggregation, and ``manifest.json`` records the config echo plus a SHA-256
digest of every emitted file, so a manifest and a seed pin every output byte.
"""

from __future__ import annotations

import csv
import hashlib
import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from . import metrics
from .engine import Chips
from .emotion import Mode
from .metrics import ComparisonResult, WelfareRow
from .society import (
    PRESET_SHARES,
    RoundRecord,
    SimulationConfig,
    SocietyConfig,
    society_preset,
)

SCHEMA_ROUNDS = "svoie-rounds-v1"
SCHEMA_SUMMARY = "svoie-summary-v1"
SCHEMA_MANIFEST = "svoie-manifest-v1"

ROUNDS_COLUMNS = list(RoundRecord._fields)

MODE_BY_LABEL = {m.value: m for m in Mode}


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


def chips_to_str(chips: Chips) -> str:
    """Four digits, one count per color in red/blue/green/yellow order."""
    return "".join(str(n) for n in chips)


def chips_from_str(text: str) -> Chips:
    if len(text) != 4 or not text.isdigit():
        raise ValueError(f"malformed chip counts {text!r}")
    return Chips(*(int(ch) for ch in text))


def _config_from_dict(data: dict, source: str) -> SimulationConfig:
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: config must be a JSON object")
    known = {"society", "counts", "mode", "steps", "repeats", "seed", "population"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"{source}: unknown keys {sorted(unknown)}")
    if "seed" not in data:
        raise ConfigError(f"{source}: 'seed' is required for reproducible runs")
    try:
        seed = int(data["seed"])
        steps = int(data.get("steps", 1000))
        repeats = int(data.get("repeats", 3))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    mode_label = data.get("mode", "stable")
    if mode_label not in MODE_BY_LABEL:
        raise ConfigError(
            f"{source}: unknown mode {mode_label!r}; expected one of {sorted(MODE_BY_LABEL)}"
        )
    mode = MODE_BY_LABEL[mode_label]
    society_name = data.get("society")
    if society_name is None:
        raise ConfigError(f"{source}: 'society' is required")
    try:
        if "counts" in data:
            counts = data["counts"]
            if not isinstance(counts, dict) or set(counts) - {"altr", "coop", "self"}:
                raise ConfigError(
                    f"{source}: 'counts' must map trait labels altr/coop/self to integers"
                )
            society = SocietyConfig(
                name=society_name,
                n_altruistic=int(counts.get("altr", 0)),
                n_cooperative=int(counts.get("coop", 0)),
                n_selfish=int(counts.get("self", 0)),
                mode=mode,
            )
        else:
            if society_name not in PRESET_SHARES:
                raise ConfigError(
                    f"{source}: unknown society preset {society_name!r}; "
                    f"expected one of {sorted(PRESET_SHARES)}"
                )
            population = int(data.get("population", 300))
            society = society_preset(society_name, mode, population)
        return SimulationConfig(society=society, master_seed=seed, steps=steps, repeats=repeats)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from exc


def load_config(path) -> SimulationConfig:
    """Parse and validate a JSON run config.

    Required keys: society (preset name), seed. Optional: mode (default
    "stable"), steps (default 1000), repeats (default 3), population (default
    300, presets scale proportionally), counts (explicit altr/coop/self counts
    overriding the preset split).
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"{path}: no such config file") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return _config_from_dict(data, str(path))


def config_to_dict(config: SimulationConfig) -> dict:
    return {
        "society": config.society.name,
        "counts": config.society.counts,
        "mode": config.society.mode.value,
        "steps": config.steps,
        "repeats": config.repeats,
        "seed": config.master_seed,
    }


def record_to_row(rec: RoundRecord) -> list:
    return [
        rec.repeat,
        rec.step,
        rec.round,
        rec.pair,
        rec.proposer_id,
        rec.responder_id,
        rec.proposer_trait,
        rec.responder_trait,
        rec.proposer_policy,
        rec.responder_policy,
        chips_to_str(rec.offer),
        chips_to_str(rec.request),
        int(rec.accepted),
        rec.proposer_score,
        rec.responder_score,
        rec.proposer_goal,
        rec.responder_goal,
        rec.proposer_emotion,
        rec.responder_emotion,
    ]


def row_to_record(row: list) -> RoundRecord:
    return RoundRecord(
        repeat=int(row[0]),
        step=int(row[1]),
        round=int(row[2]),
        pair=int(row[3]),
        proposer_id=int(row[4]),
        responder_id=int(row[5]),
        proposer_trait=row[6],
        responder_trait=row[7],
        proposer_policy=row[8],
        responder_policy=row[9],
        offer=chips_from_str(row[10]),
        request=chips_from_str(row[11]),
        accepted=bool(int(row[12])),
        proposer_score=float(row[13]),
        responder_score=float(row[14]),
        proposer_goal=int(row[15]),
        responder_goal=int(row[16]),
        proposer_emotion=float(row[17]),
        responder_emotion=float(row[18]),
    )


class _HashingFile:
    """Text sink that feeds a file and a SHA-256 digest the same bytes."""

    def __init__(self, fh):
        self._fh = fh
        self._hash = hashlib.sha256()
        self.bytes_written = 0

    def write(self, text: str) -> int:
        data = text.encode("utf-8")
        self._hash.update(data)
        self.bytes_written += len(data)
        self._fh.write(text)
        return len(data)

    def hexdigest(self) -> str:
        return self._hash.hexdigest()


def write_rounds_csv(path, records: Iterable[RoundRecord], observer=None, header: bool = True) -> dict:
    """Stream records to a round-log CSV; returns rows/bytes/sha256.

    ``observer`` (if given) sees every record as it is written, which lets a
    caller accumulate welfare statistics in the same pass.
    """
    path = Path(path)
    rows = 0
    with open(path, "w", newline="") as fh:
        sink = _HashingFile(fh)
        writer = csv.writer(sink, lineterminator="\n")
        if header:
            writer.writerow(ROUNDS_COLUMNS)
        for rec in records:
            writer.writerow(record_to_row(rec))
            if observer is not None:
                observer(rec)
            rows += 1
    return {"rows": rows, "bytes": sink.bytes_written, "sha256": sink.hexdigest()}


def read_rounds_csv(path) -> Iterator[RoundRecord]:
    """Parse a round-log CSV back into records."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ROUNDS_COLUMNS:
            raise ValueError(f"{path}: unexpected round-log header {header!r}")
        for row in reader:
            yield row_to_record(row)


def _write_json(path, payload: dict) -> dict:
    path = Path(path)
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    path.write_text(text)
    data = text.encode("utf-8")
    return {"bytes": len(data), "sha256": hashlib.sha256(data).hexdigest()}


def summary_payload(config: SimulationConfig, rows: list) -> dict:
    """Welfare aggregation of one run, in summary.json shape."""
    samples = metrics.build_samples(rows, config.society.name, config.society.mode.value)
    per_repeat: dict = {}
    for label in samples:
        chunks = []
        for rep in range(config.repeats):
            vals = [r.welfare for r in rows if r.repeat == rep and (label == "all" or r.trait == label)]
            chunks.append(
                {
                    "repeat": rep,
                    "mean": metrics.collective_welfare(vals),
                    "std": float(np.asarray(vals).std()),
                    "cov": metrics.cov(vals),
                }
            )
        per_repeat[label] = chunks
    return {
        "schema": SCHEMA_SUMMARY,
        "society": config.society.name,
        "counts": config.society.counts,
        "mode": config.society.mode.value,
        "steps": config.steps,
        "repeats": config.repeats,
        "master_seed": config.master_seed,
        "population": config.society.population,
        "samples": {
            label: {
                "size": s.n_agents,
                "mean": metrics.collective_welfare(s),
                "std": float(s.values.std()),
                "cov": metrics.cov(s),
            }
            for label, s in samples.items()
        },
        "per_repeat": per_repeat,
        "welfare_rows": [list(r) for r in rows],
    }


def write_summary(path, payload: dict) -> dict:
    return _write_json(path, payload)


def load_summary(path) -> dict:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"{path}: no such summary file") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    if data.get("schema") != SCHEMA_SUMMARY:
        raise ConfigError(f"{path}: not a {SCHEMA_SUMMARY} file")
    return data


def summary_welfare_rows(summary: dict) -> list:
    return [WelfareRow(int(r), int(a), t, float(w)) for r, a, t, w in summary["welfare_rows"]]


def write_manifest(path, config: SimulationConfig, outputs: dict, started: str, finished: str) -> None:
    from . import __version__  # package init imports this module

    payload = {
        "schema": SCHEMA_MANIFEST,
        "tool_version": __version__,
        "master_seed": config.master_seed,
        "config": config_to_dict(config),
        "started": started,
        "finished": finished,
        "outputs": outputs,
    }
    _write_json(path, payload)


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


COMPARISON_COLUMNS = [
    "society",
    "sample",
    "size",
    "stable_mean",
    "stable_std",
    "stable_cov",
    "svoie_mean",
    "svoie_std",
    "svoie_cov",
    "welfare_p",
    "welfare_d",
    "cov_p",
    "cov_d",
]


def write_comparison_csv(path, results: list) -> dict:
    """Table-style comparison rows (one per society/sample pair)."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        sink = _HashingFile(fh)
        writer = csv.writer(sink, lineterminator="\n")
        writer.writerow(COMPARISON_COLUMNS)
        for r in results:
            writer.writerow(
                [
                    r.society,
                    r.sample,
                    r.size,
                    repr(r.mean_stable),
                    repr(r.std_stable),
                    repr(r.cov_stable),
                    repr(r.mean_svoie),
                    repr(r.std_svoie),
                    repr(r.cov_svoie),
                    repr(r.p_value),
                    repr(r.cohens_d),
                    "" if r.cov_p_value is None else repr(r.cov_p_value),
                    "" if r.cov_cohens_d is None else repr(r.cov_cohens_d),
                ]
            )
    return {"bytes": sink.bytes_written, "sha256": sink.hexdigest()}


def read_comparison_csv(path) -> list:
    out = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != COMPARISON_COLUMNS:
            raise ValueError(f"{path}: unexpected comparison header {header!r}")
        for row in reader:
            out.append(
                ComparisonResult(
                    society=row[0],
                    sample=row[1],
                    size=int(row[2]),
                    mean_stable=float(row[3]),
                    std_stable=float(row[4]),
                    cov_stable=float(row[5]),
                    mean_svoie=float(row[6]),
                    std_svoie=float(row[7]),
                    cov_svoie=float(row[8]),
                    p_value=float(row[9]),
                    cohens_d=float(row[10]),
                    cov_p_value=float(row[11]) if row[11] else None,
                    cov_cohens_d=float(row[12]) if row[12] else None,
                )
            )
    return out


WELFARE_LONG_COLUMNS = ["agent_id", "trait", "mode", "welfare"]


def write_welfare_long_csv(path, stable_rows: list, svoie_rows: list) -> dict:
    """Plot-ready long format: one row per agent per arm, welfare averaged
    over repeats (each agent plays the same number of rounds per repeat)."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        sink = _HashingFile(fh)
        writer = csv.writer(sink, lineterminator="\n")
        writer.writerow(WELFARE_LONG_COLUMNS)
        for mode, rows in (("stable", stable_rows), ("svoie", svoie_rows)):
            agents: dict = {}
            for r in rows:
                slot = agents.setdefault(r.agent_id, [r.trait, 0.0, 0])
                slot[1] += r.welfare
                slot[2] += 1
            for agent_id in sorted(agents):
                trait, total, n = agents[agent_id]
                writer.writerow([agent_id, trait, mode, repr(total / n)])
    return {"bytes": sink.bytes_written, "sha256": sink.hexdigest()}


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()
