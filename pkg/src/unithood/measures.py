"""Statistical unithood measures.

Given document counts for a merged unit s and its two sides a_x and
a_y, each count is turned into a dampened share of the evidence,

    p(w) = share * exp(-share),   share = n_w / (n_s + n_ax + n_ay),

which lies in [0, 1/e].  Mutual information is the ratio form
MI = p(s) / (p(a_x) * p(a_y)); independence of a side from the unit is
ID = log10(n_side - n_s) when the side is seen more often than the unit,
else 0.  The merge decision accepts a pair outright on high MI, or on
mediocre MI when both sides are highly independent and about equally so
(the ratio of their independences falls inside a band).

Two conventional baselines are included: pointwise mutual information
over probabilities, and the Cvalue frequency measure for nested terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .evidence import EvidenceSet

E_INV = math.exp(-1.0)

THRESHOLD_DEFAULTS_DOC = "mi_plus=0.9 mi_minus=0.02 id_t=6 idr_plus=1.35 idr_minus=0.93"


class UndefinedEvidenceError(ValueError):
    """All counts are zero; no measure can be computed."""


@dataclass(frozen=True)
class Thresholds:
    """The five decision thresholds.

    ``mi_plus`` accepts on its own; ``mi_minus``..``mi_plus`` is the
    mediocre band in which the independence tests apply; ``id_t`` is the
    minimum independence for each side; ``idr_minus``..``idr_plus``
    bounds the ratio of the two independences.
    """

    mi_plus: float = 0.9
    mi_minus: float = 0.02
    id_t: float = 6.0
    idr_plus: float = 1.35
    idr_minus: float = 0.93

    def __post_init__(self):
        values = (self.mi_plus, self.mi_minus, self.id_t, self.idr_plus, self.idr_minus)
        if not all(math.isfinite(v) for v in values):
            raise ValueError("thresholds must be finite")
        if self.mi_plus <= self.mi_minus:
            raise ValueError("mi_plus must exceed mi_minus")
        if self.idr_plus <= self.idr_minus:
            raise ValueError("idr_plus must exceed idr_minus")
        if self.id_t < 0:
            raise ValueError("id_t must be non-negative")


@dataclass(frozen=True)
class UnithoodScores:
    """Everything computed for one pair: weights, MI, IDs, ratio, verdict.

    ``idr`` is None when the right side's independence is zero.
    ``degenerate`` flags evidence where a side was never seen on its own
    (n_ax or n_ay is 0); such pairs are never merged.
    """

    p_s: float
    p_ax: float
    p_ay: float
    mi: float
    id_x: float
    id_y: float
    idr: float | None
    uh: bool
    degenerate: bool = False


def weight(n_w: int, total: int) -> float:
    """Dampened evidence share of one count: share * exp(-share)."""
    if total <= 0:
        raise UndefinedEvidenceError("total page count is zero")
    if n_w < 0 or n_w > total:
        raise ValueError("count %r outside [0, %r]" % (n_w, total))
    share = n_w / total
    return share * math.exp(-share)


def mutual_information(evidence: EvidenceSet) -> float:
    """Ratio-form MI of the pair; 0 when the unit or either side is unseen."""
    total = evidence.total
    if total == 0:
        raise UndefinedEvidenceError("all counts are zero")
    if evidence.n_s == 0 or evidence.n_ax == 0 or evidence.n_ay == 0:
        return 0.0
    return weight(evidence.n_s, total) / (
        weight(evidence.n_ax, total) * weight(evidence.n_ay, total)
    )


def independence(n_a: int, n_s: int) -> float:
    """How often a side occurs beyond the unit, on a log10 scale.

    Zero when the side is not seen more often than the unit, i.e. the
    side is never witnessed without it.
    """
    if n_a < 0 or n_s < 0:
        raise ValueError("counts must be non-negative")
    if n_a > n_s:
        return math.log10(n_a - n_s)
    return 0.0


def independence_ratio(id_x: float, id_y: float) -> float | None:
    return id_x / id_y if id_y > 0 else None


def decision_rule(
    mi: float, id_x: float, id_y: float, idr: float | None, thresholds: Thresholds
) -> bool:
    """The Boolean merge decision from precomputed scores.

    True when MI clears the upper threshold outright, or when MI falls
    in the mediocre band while both independences reach id_t and their
    ratio lies inside the idr band.  An undefined ratio fails the second
    branch without error.
    """
    if mi > thresholds.mi_plus:
        return True
    return (
        thresholds.mi_plus >= mi >= thresholds.mi_minus
        and id_x >= thresholds.id_t
        and id_y >= thresholds.id_t
        and idr is not None
        and thresholds.idr_plus >= idr >= thresholds.idr_minus
    )


def unithood(evidence: EvidenceSet, thresholds: Thresholds) -> UnithoodScores:
    """Score one pair's evidence and decide whether to merge it."""
    total = evidence.total
    if total == 0:
        raise UndefinedEvidenceError("all counts are zero")
    degenerate = evidence.n_ax == 0 or evidence.n_ay == 0
    p_s = weight(evidence.n_s, total)
    p_ax = weight(evidence.n_ax, total)
    p_ay = weight(evidence.n_ay, total)
    mi = mutual_information(evidence)
    id_x = independence(evidence.n_ax, evidence.n_s)
    id_y = independence(evidence.n_ay, evidence.n_s)
    idr = independence_ratio(id_x, id_y)
    uh = False if degenerate else decision_rule(mi, id_x, id_y, idr, thresholds)
    return UnithoodScores(p_s, p_ax, p_ay, mi, id_x, id_y, idr, uh, degenerate)


def baseline_pmi(p_ab: float, p_a: float, p_b: float) -> float:
    """Pointwise mutual information log2(p_ab / (p_a * p_b)).

    Returns -inf when the joint probability is zero; raises when either
    marginal is zero.
    """
    if p_a <= 0 or p_b <= 0:
        raise ValueError("marginal probabilities must be positive")
    if p_ab < 0:
        raise ValueError("joint probability must be non-negative")
    if p_ab == 0:
        return float("-inf")
    return math.log2(p_ab / (p_a * p_b))


def baseline_cvalue(
    candidate: str,
    frequency: float,
    longest_ngram: int,
    longer: Sequence[tuple[str, float]] = (),
) -> float:
    """Cvalue of a candidate term.

    log2(word count) times the frequency, discounted by the mean
    frequency of the longer terms containing the candidate when the
    candidate is shorter than the longest n-gram considered.  Note the
    log2 factor zeroes every single-word value.
    """
    words = candidate.split()
    if not words:
        raise ValueError("candidate must contain at least one word")
    if len(words) > longest_ngram:
        raise ValueError(
            "candidate has %d words but the longest n-gram considered is %d"
            % (len(words), longest_ngram)
        )
    if any(term == candidate for term, _ in longer):
        raise ValueError("the candidate must not appear in its own longer-term set")
    factor = math.log2(len(words))
    if len(words) == longest_ngram or not longer:
        return factor * frequency
    mean_longer = sum(freq for _, freq in longer) / len(longer)
    return factor * (frequency - mean_longer)
