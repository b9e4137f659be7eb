"""Pipeline orchestration: configuration, file formats, the decide loop.

File formats (all TSV, UTF-8, LF, "#" comment lines ignored):

  candidates   sentence_id, span (comma-joined offsets), surface
  pairs        sentence_id, span, surface, ax_span, ax_surface, b, ay_span,
               ay_surface -- the first three columns describe the would-be
               merged unit, the rest carry the decomposition the decide
               step needs
  decisions    pair_id, a_x, b, a_y, id_x, id_y, idr, mi,
               decision (MERGED|NOTMERGED), s -- reals with 4 decimals
  decorated    pair_id, a_x, b, a_y, s, n_s, n_ax, n_ay -- raw counts for
               threshold sweeps
  gold         pair_id, MERGED|NOTMERGED
  scores       a_x, b, a_y, mi, id_x, id_y, idr -- externally supplied
               scores keyed by the pair's surfaces, used instead of count
               evidence when raw counts are unavailable
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence, TextIO

from .evidence import (
    CachedProvider,
    CountCache,
    CountProvider,
    EvidenceSet,
    FixtureProvider,
    RemoteClientConfig,
    RemoteCountClient,
    gather_evidence,
    load_corpus_file,
)
from .extractor import Candidate, CandidatePair, build_pair, merge_pass
from .measures import Thresholds, decision_rule, unithood

MERGED = "MERGED"
NOTMERGED = "NOTMERGED"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class PipelineConfig:
    """One serializable configuration for a full run.

    Exactly one provider spec may be present: ``fixture_path`` (JSON or
    TSV count table), ``corpus_path`` (one document per line), or
    ``remote`` settings.  ``cache_path`` enables the persistent count
    cache and is required with the remote provider.
    """

    thresholds: Thresholds = field(default_factory=Thresholds)
    fixture_path: str | None = None
    corpus_path: str | None = None
    remote: RemoteClientConfig | None = None
    cache_path: str | None = None
    missing_count_policy: str = "error"
    max_merge_passes: int = 3

    def __post_init__(self):
        specs = [s for s in (self.fixture_path, self.corpus_path, self.remote) if s is not None]
        if len(specs) > 1:
            raise ConfigError("config must name at most one count provider")
        if self.missing_count_policy not in ("error", "zero"):
            raise ConfigError("missing_count_policy must be 'error' or 'zero'")
        if self.max_merge_passes < 1:
            raise ConfigError("max_merge_passes must be >= 1")
        if self.remote is not None and self.cache_path is None:
            raise ConfigError("the remote provider requires a cache_path")

    def has_provider(self) -> bool:
        return any(s is not None for s in (self.fixture_path, self.corpus_path, self.remote))


def load_config(path: str | Path) -> PipelineConfig:
    """Load a JSON config file; relative paths resolve against its directory."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError("cannot read config %s: %s" % (path, exc)) from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    base = path.parent

    def resolve(p: str) -> str:
        return str((base / p)) if not Path(p).is_absolute() else p

    provider = raw.get("provider", {})
    if not isinstance(provider, dict):
        raise ConfigError("provider must be a JSON object")
    unknown = set(provider) - {"fixture", "corpus", "remote"}
    if unknown:
        raise ConfigError("unknown provider kind(s): %s" % ", ".join(sorted(unknown)))
    if len(provider) != 1:
        raise ConfigError("config must name exactly one count provider")
    cache_path = raw.get("cache_path")
    try:
        thresholds = Thresholds(**raw.get("thresholds", {}))
        remote = (
            RemoteClientConfig(**provider["remote"]) if "remote" in provider else None
        )
        return PipelineConfig(
            thresholds=thresholds,
            fixture_path=resolve(provider["fixture"]) if "fixture" in provider else None,
            corpus_path=resolve(provider["corpus"]) if "corpus" in provider else None,
            remote=remote,
            cache_path=resolve(cache_path) if cache_path else None,
            missing_count_policy=raw.get("missing_count_policy", "error"),
            max_merge_passes=raw.get("max_merge_passes", 3),
        )
    except TypeError as exc:
        raise ConfigError("invalid config %s: %s" % (path, exc)) from exc


def apply_threshold_overrides(
    config: PipelineConfig, overrides: Mapping[str, float]
) -> PipelineConfig:
    if not overrides:
        return config
    return replace(config, thresholds=replace(config.thresholds, **overrides))


def replace_cache(config: PipelineConfig, cache_path: str) -> PipelineConfig:
    return replace(config, cache_path=cache_path)


def build_provider(config: PipelineConfig) -> CountProvider:
    if config.fixture_path is not None:
        provider: CountProvider = FixtureProvider.from_file(
            config.fixture_path, config.missing_count_policy
        )
    elif config.corpus_path is not None:
        provider = load_corpus_file(config.corpus_path)
    elif config.remote is not None:
        provider = RemoteCountClient(config.remote)
    else:
        raise ConfigError("no count provider configured")
    if config.cache_path is not None:
        provider = CachedProvider(provider, CountCache(config.cache_path))
    return provider


# ---------------------------------------------------------------------------
# TSV helpers


def _span_str(span: Sequence[int]) -> str:
    return ",".join(str(o) for o in span)


def _parse_span(text: str) -> tuple[int, ...]:
    return tuple(int(part) for part in text.split(","))


def _rows(stream: Iterable[str], n_columns: int, what: str) -> Iterable[list[str]]:
    for line_number, raw in enumerate(stream, start=1):
        line = raw.rstrip("\n")
        if line.endswith("\r"):
            line = line[:-1]
        if not line.strip() or line.startswith("#"):
            continue
        columns = line.split("\t")
        if len(columns) != n_columns:
            raise ValueError(
                "%s line %d: expected %d columns, got %d"
                % (what, line_number, n_columns, len(columns))
            )
        yield columns


def write_candidates_file(candidates: Iterable[Candidate], stream: TextIO) -> None:
    stream.write("# sentence_id\tspan\tsurface\n")
    for c in candidates:
        stream.write("%s\t%s\t%s\n" % (c.sentence_id, _span_str(c.span), c.surface))


def write_pairs_file(pairs: Iterable[CandidatePair], stream: TextIO) -> None:
    stream.write(
        "# sentence_id\tspan\tsurface\tax_span\tax_surface\tb\tay_span\tay_surface\n"
    )
    for p in pairs:
        stream.write(
            "%s\t%s\t%s\t%s\t%s\t%s\t%s\t%s\n"
            % (
                p.sentence_id,
                _span_str(p.merged_span()),
                p.s,
                _span_str(p.a_x.span),
                p.a_x.surface,
                p.b,
                _span_str(p.a_y.span),
                p.a_y.surface,
            )
        )


def read_pairs_file(stream: Iterable[str]) -> list[CandidatePair]:
    pairs = []
    for columns in _rows(stream, 8, "pairs file"):
        sentence_id, _, _, ax_span, ax_surface, b, ay_span, ay_surface = columns
        a_x = Candidate(sentence_id, _parse_span(ax_span), ax_surface)
        a_y = Candidate(sentence_id, _parse_span(ay_span), ay_surface)
        pairs.append(build_pair(a_x, b, a_y))
    return pairs


@dataclass(frozen=True)
class DecisionRecord:
    """One decided pair, in the order it was evaluated."""

    pair_id: str
    sentence_id: str
    a_x: str
    b: str
    a_y: str
    s: str
    mi: float
    id_x: float
    id_y: float
    idr: float | None
    merged: bool
    evidence: EvidenceSet | None = None


def _fmt(value: float | None) -> str:
    return "NA" if value is None else "%.4f" % value


def write_decisions_file(records: Iterable[DecisionRecord], stream: TextIO) -> None:
    stream.write("# pair_id\ta_x\tb\ta_y\tid_x\tid_y\tidr\tmi\tdecision\ts\n")
    for r in records:
        stream.write(
            "%s\t%s\t%s\t%s\t%s\t%s\t%s\t%s\t%s\t%s\n"
            % (
                r.pair_id,
                r.a_x,
                r.b,
                r.a_y,
                _fmt(r.id_x),
                _fmt(r.id_y),
                _fmt(r.idr),
                _fmt(r.mi),
                MERGED if r.merged else NOTMERGED,
                r.s,
            )
        )


def read_decisions_file(stream: Iterable[str]) -> dict[str, bool]:
    decisions = {}
    for columns in _rows(stream, 10, "decisions file"):
        pair_id, verdict = columns[0], columns[8]
        if verdict not in (MERGED, NOTMERGED):
            raise ValueError("unknown decision %r for pair %s" % (verdict, pair_id))
        decisions[pair_id] = verdict == MERGED
    return decisions


def read_gold_file(stream: Iterable[str]) -> dict[str, bool]:
    gold = {}
    for columns in _rows(stream, 2, "gold file"):
        pair_id, verdict = columns
        if verdict not in (MERGED, NOTMERGED):
            raise ValueError("unknown gold label %r for pair %s" % (verdict, pair_id))
        gold[pair_id] = verdict == MERGED
    return gold


def write_decorated_file(records: Iterable[DecisionRecord], stream: TextIO) -> None:
    stream.write("# pair_id\ta_x\tb\ta_y\ts\tn_s\tn_ax\tn_ay\n")
    for r in records:
        if r.evidence is None:
            continue
        stream.write(
            "%s\t%s\t%s\t%s\t%s\t%d\t%d\t%d\n"
            % (r.pair_id, r.a_x, r.b, r.a_y, r.s, r.evidence.n_s, r.evidence.n_ax, r.evidence.n_ay)
        )


def read_decorated_file(stream: Iterable[str]) -> list[tuple[str, EvidenceSet]]:
    rows = []
    for columns in _rows(stream, 8, "decorated pairs file"):
        pair_id = columns[0]
        n_s, n_ax, n_ay = (int(v) for v in columns[5:8])
        rows.append((pair_id, EvidenceSet(n_s, n_ax, n_ay)))
    return rows


@dataclass(frozen=True)
class InjectedScores:
    mi: float
    id_x: float
    id_y: float
    idr: float | None


def read_scores_file(stream: Iterable[str]) -> dict[tuple[str, str, str], InjectedScores]:
    scores = {}
    for columns in _rows(stream, 7, "scores file"):
        a_x, b, a_y = columns[0:3]
        mi, id_x, id_y = (float(v) for v in columns[3:6])
        idr = None if columns[6] == "NA" else float(columns[6])
        scores[(a_x, b, a_y)] = InjectedScores(mi, id_x, id_y, idr)
    return scores


# ---------------------------------------------------------------------------
# The decide loop


def _dedup_candidates(pairs: Sequence[CandidatePair]) -> list[Candidate]:
    seen: dict[tuple[int, ...], Candidate] = {}
    for pair in pairs:
        for candidate in (pair.a_x, pair.a_y):
            seen.setdefault(candidate.span, candidate)
    return sorted(seen.values(), key=lambda c: c.start)


def _eligible_pairs(
    candidates: Sequence[Candidate], connectors: Mapping[int, str]
) -> list[CandidatePair]:
    # Re-derives pairs from candidate adjacency alone; connector lemmas
    # come from the originally extracted pairs, so a gap token that was
    # never a valid connector can never become one here.
    by_start = {c.start: c for c in candidates}
    pairs = []
    for left in sorted(candidates, key=lambda c: c.start):
        right = by_start.get(left.end + 1)
        if right is not None:
            pairs.append(build_pair(left, "", right))
        right = by_start.get(left.end + 2)
        if right is not None and left.end + 1 in connectors:
            pairs.append(build_pair(left, connectors[left.end + 1], right))
    return pairs


def decide_pairs(
    pairs: Sequence[CandidatePair],
    thresholds: Thresholds,
    provider: CountProvider | None = None,
    injected: Mapping[tuple[str, str, str], InjectedScores] | None = None,
    max_passes: int = 3,
) -> list[DecisionRecord]:
    """Decide every pair, merging accepted ones and re-pairing to fixpoint.

    Each sentence's pairs seed its candidate set and connector table;
    after a pass applies merges, newly adjacent candidates are paired
    and decided too, up to ``max_passes`` rounds.  Scores injected by
    surface triple take precedence over count evidence; pairs without
    injected scores need a provider.
    """
    injected = injected or {}
    by_sentence: dict[str, list[CandidatePair]] = {}
    for pair in pairs:
        by_sentence.setdefault(pair.sentence_id, []).append(pair)

    records: list[DecisionRecord] = []
    for sentence_id, sentence_pairs in by_sentence.items():
        connectors = {
            pair.connector_offset: pair.b
            for pair in sentence_pairs
            if pair.connector_offset is not None
        }
        candidates = _dedup_candidates(sentence_pairs)
        decided: dict[tuple[tuple[int, ...], tuple[int, ...]], bool] = {}
        for _ in range(max_passes):
            current = _eligible_pairs(candidates, connectors)
            decisions: dict[CandidatePair, bool] = {}
            for pair in current:
                key = pair.key()
                if key not in decided:
                    record = _decide_one(pair, thresholds, provider, injected)
                    records.append(record)
                    decided[key] = record.merged
                decisions[pair] = decided[key]
            merged_candidates = merge_pass(current, decisions, candidates)
            if len(merged_candidates) == len(candidates):
                break
            candidates = merged_candidates

    return [
        replace(record, pair_id=str(number))
        for number, record in enumerate(records, start=1)
    ]


def _decide_one(
    pair: CandidatePair,
    thresholds: Thresholds,
    provider: CountProvider | None,
    injected: Mapping[tuple[str, str, str], InjectedScores],
) -> DecisionRecord:
    key = (pair.a_x.surface, pair.b, pair.a_y.surface)
    if key in injected:
        given = injected[key]
        merged = decision_rule(given.mi, given.id_x, given.id_y, given.idr, thresholds)
        return DecisionRecord(
            "", pair.sentence_id, pair.a_x.surface, pair.b, pair.a_y.surface, pair.s,
            given.mi, given.id_x, given.id_y, given.idr, merged, None,
        )
    if provider is None:
        raise ConfigError(
            "no count provider configured and no injected scores for %r" % pair.s
        )
    evidence = gather_evidence(provider, pair.s, pair.a_x.surface, pair.a_y.surface)
    scores = unithood(evidence, thresholds)
    return DecisionRecord(
        "", pair.sentence_id, pair.a_x.surface, pair.b, pair.a_y.surface, pair.s,
        scores.mi, scores.id_x, scores.id_y, scores.idr, scores.uh, evidence,
    )


def warm_counts(pairs: Sequence[CandidatePair], provider: CountProvider) -> int:
    """Look up every phrase a decide run would need; returns the phrase count."""
    phrases: list[str] = []
    seen = set()
    for pair in pairs:
        for phrase in (pair.s, pair.a_x.surface, pair.a_y.surface):
            key = phrase.lower()
            if key not in seen:
                seen.add(key)
                phrases.append(phrase)
    for phrase in phrases:
        provider.count(phrase)
    return len(phrases)
