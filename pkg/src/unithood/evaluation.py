"""Scoring merge decisions against gold labels, plus threshold sweeps."""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from typing import Mapping, Sequence

from .evidence import EvidenceSet
from .measures import Thresholds, unithood

THRESHOLD_NAMES = ("mi_plus", "mi_minus", "id_t", "idr_plus", "idr_minus")
METRIC_NAMES = ("precision", "recall", "f_score", "paper_f", "accuracy")


class EvaluationError(ValueError):
    """Decision/gold ids do not line up; carries the orphaned ids."""

    def __init__(self, message: str, orphans: Sequence[str] = ()):
        super().__init__(message)
        self.orphans = list(orphans)


@dataclass(frozen=True)
class ContingencyTable:
    """Actual vs ideal merge decisions: tp, fp, fn, tn."""

    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError("cells must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class Metrics:
    """Precision/recall/accuracy plus two F variants.

    ``f_score`` is the balanced harmonic mean 2PR/(P+R); ``paper_f`` is
    the product P*R, reported alongside for comparability.  A metric
    whose denominator is zero is None, not 0.
    """

    precision: float | None
    recall: float | None
    f_score: float | None
    paper_f: float | None
    accuracy: float | None


def score(decisions: Mapping[str, bool], gold: Mapping[str, bool]) -> ContingencyTable:
    """Tabulate actual decisions against ideal labels.

    Every decided pair must carry a gold label; decided ids without one
    raise EvaluationError.  Gold labels without a decision are ignored
    with a warning.
    """
    orphans = sorted(set(decisions) - set(gold))
    if orphans:
        raise EvaluationError(
            "%d decided pair(s) have no gold label: %s"
            % (len(orphans), ", ".join(orphans[:10])),
            orphans,
        )
    if not decisions:
        raise EvaluationError("no pairs to evaluate")
    extra = len(set(gold) - set(decisions))
    if extra:
        warnings.warn("%d gold label(s) have no decision and are ignored" % extra)
    tp = fp = fn = tn = 0
    for pair_id, actual in decisions.items():
        ideal = gold[pair_id]
        if actual and ideal:
            tp += 1
        elif actual and not ideal:
            fp += 1
        elif not actual and ideal:
            fn += 1
        else:
            tn += 1
    return ContingencyTable(tp, fp, fn, tn)


def compute_metrics(table: ContingencyTable) -> Metrics:
    precision = table.tp / (table.tp + table.fp) if table.tp + table.fp > 0 else None
    recall = table.tp / (table.tp + table.fn) if table.tp + table.fn > 0 else None
    accuracy = (table.tp + table.tn) / table.total if table.total > 0 else None
    f_score = None
    paper_f = None
    if precision is not None and recall is not None:
        if precision + recall > 0:
            f_score = 2 * precision * recall / (precision + recall)
        paper_f = precision * recall
    return Metrics(precision, recall, f_score, paper_f, accuracy)


@dataclass(frozen=True)
class PairEvidence:
    """A pair id with its raw counts, ready for re-deciding at any thresholds."""

    pair_id: str
    evidence: EvidenceSet


@dataclass(frozen=True)
class SweepPoint:
    grid_index: int
    thresholds: Thresholds
    table: ContingencyTable
    metrics: Metrics


def decide_batch(
    rows: Sequence[PairEvidence], thresholds: Thresholds
) -> dict[str, bool]:
    return {row.pair_id: unithood(row.evidence, thresholds).uh for row in rows}


def sweep(
    rows: Sequence[PairEvidence],
    gold: Mapping[str, bool],
    grid: Mapping[str, Sequence[float]],
    sort_key: str = "f_score",
    map_fn=map,
) -> list[SweepPoint]:
    """Evaluate every grid point over fixed evidence.

    ``grid`` maps threshold names to candidate values; omitted names use
    the default thresholds.  Combinations violating the threshold
    invariants are skipped with a warning.  Results are sorted by the
    chosen metric, best first, ties kept in grid order.  ``map_fn`` may
    be an executor's map; the output does not depend on it.
    """
    if not rows:
        raise EvaluationError("no pairs to sweep over")
    if sort_key not in METRIC_NAMES:
        raise ValueError("sort_key must be one of %s" % (METRIC_NAMES,))
    unknown = set(grid) - set(THRESHOLD_NAMES)
    if unknown:
        raise ValueError("unknown threshold name(s): %s" % ", ".join(sorted(unknown)))
    defaults = Thresholds()
    axes = []
    for name in THRESHOLD_NAMES:
        values = list(grid.get(name, [getattr(defaults, name)]))
        if not values:
            raise ValueError("grid axis %r is empty" % name)
        axes.append(values)

    # Validate the id alignment once up front so grid points can score
    # quietly against a gold map restricted to the swept pairs.
    pair_ids = [row.pair_id for row in rows]
    orphans = sorted(set(pair_ids) - set(gold))
    if orphans:
        raise EvaluationError(
            "%d pair(s) have no gold label: %s" % (len(orphans), ", ".join(orphans[:10])),
            orphans,
        )
    extra = len(set(gold) - set(pair_ids))
    if extra:
        warnings.warn("%d gold label(s) have no swept pair and are ignored" % extra)
    restricted_gold = {pid: gold[pid] for pid in pair_ids}

    def evaluate(item: tuple[int, tuple[float, ...]]) -> SweepPoint | tuple[int, str]:
        index, combo = item
        try:
            thresholds = Thresholds(*combo)
        except ValueError as exc:
            return (index, "skipping grid point %s: %s" % (dict(zip(THRESHOLD_NAMES, combo)), exc))
        table = score(decide_batch(rows, thresholds), restricted_gold)
        return SweepPoint(index, thresholds, table, compute_metrics(table))

    points: list[SweepPoint] = []
    for result in map_fn(evaluate, list(enumerate(itertools.product(*axes)))):
        if isinstance(result, SweepPoint):
            points.append(result)
        else:
            warnings.warn(result[1])
    if not points:
        raise ValueError("every grid point was invalid")

    def order(point: SweepPoint):
        value = getattr(point.metrics, sort_key)
        return (0, -value, point.grid_index) if value is not None else (1, 0.0, point.grid_index)

    return sorted(points, key=order)
