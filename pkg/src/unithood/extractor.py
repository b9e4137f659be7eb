"""Head-driven left-right candidate filter and candidate pairing.

The filter identifies head nouns in a dependency-parsed sentence, grows
each into a maximal noun-phrase segment by absorbing contiguous
modifiers (left side first, then right), and emits the segments as term
candidates.  Nouns that end up in no segment are emitted as singleton
candidates.  Adjacent candidates, or candidates separated by exactly one
preposition or the conjunction "and", are then paired for the merge
decision; accepted merges produce new candidates that can be paired
again on the next pass.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .parse_ingest import NOUN_TAGS, ParsedSentence, ParseToken

# POS tags a candidate member may carry: nouns, adjectives, foreign words.
MEMBER_TAGS = NOUN_TAGS | {"JJ", "FW"}

# Dependency relations that attach a modifier inside a noun phrase.
NP_INTERNAL_RELS = frozenset({"nn", "amod", "poss"})

PREPOSITION_TAG = "IN"
CONJUNCTION_TAG = "CC"
CONJUNCTION_LEMMA = "and"


@dataclass(frozen=True)
class Candidate:
    """A term candidate: a span of token offsets within one sentence.

    ``surface`` is the member lemmas joined by single spaces in offset
    order.  ``head_offset`` is the head noun the candidate was grown
    from; it is None for leftover-noun singletons and for candidates
    produced by merging.
    """

    sentence_id: str
    span: tuple[int, ...]
    surface: str
    head_offset: int | None = None

    def __post_init__(self):
        if not self.span:
            raise ValueError("candidate span must be non-empty")
        if any(b <= a for a, b in zip(self.span, self.span[1:])):
            raise ValueError("candidate span must be strictly ascending")

    @property
    def start(self) -> int:
        return self.span[0]

    @property
    def end(self) -> int:
        return self.span[-1]


@dataclass(frozen=True)
class CandidatePair:
    """Two candidates eligible for merging, with their connector.

    ``b`` is the empty string when the candidates are offset-adjacent,
    otherwise the lemma of the single preposition or "and" between them.
    ``s`` is the would-be merged surface.
    """

    a_x: Candidate
    b: str
    a_y: Candidate
    s: str

    def __post_init__(self):
        if self.a_x.sentence_id != self.a_y.sentence_id:
            raise ValueError("paired candidates must come from one sentence")
        gap = 1 if self.b == "" else 2
        if self.a_y.start != self.a_x.end + gap:
            raise ValueError(
                "candidates at %r..%r are not adjacent through connector %r"
                % (self.a_x.span, self.a_y.span, self.b)
            )

    @property
    def sentence_id(self) -> str:
        return self.a_x.sentence_id

    @property
    def connector_offset(self) -> int | None:
        return self.a_x.end + 1 if self.b else None

    def merged_span(self) -> tuple[int, ...]:
        middle = (self.a_x.end + 1,) if self.b else ()
        return self.a_x.span + middle + self.a_y.span

    def key(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return (self.a_x.span, self.a_y.span)


def _is_modifier_dependent(token: ParseToken) -> bool:
    return token.dep_rel in NP_INTERNAL_RELS or token.pos in MEMBER_TAGS


def find_head_nouns(sentence: ParsedSentence) -> set[int]:
    """Return the offsets of tokens the filter grows candidates from.

    A noun qualifies when some other token modifies it (an nn/amod/poss
    dependent, or any dependent tagged noun/adjective/foreign), or when
    it does not itself hang inside a noun phrase, i.e. its own relation
    to its governor is not one of nn/amod/poss.  Possessive nouns never
    qualify.
    """
    dependents: dict[int, list[ParseToken]] = {}
    for token in sentence.tokens:
        if token.head_offset > 0:
            dependents.setdefault(token.head_offset, []).append(token)
    heads: set[int] = set()
    for token in sentence.tokens:
        if not token.is_noun or token.dep_rel == "poss":
            continue
        has_modifier = any(
            _is_modifier_dependent(d) for d in dependents.get(token.offset, ())
        )
        externally_governed = token.dep_rel not in NP_INTERNAL_RELS
        if has_modifier or externally_governed:
            heads.add(token.offset)
    return heads


def _absorbable(token: ParseToken, members: set[int]) -> bool:
    # A member must modify the growing candidate, carry an allowed POS,
    # and be neither a possessive nor a preposition.
    return (
        token.head_offset in members
        and token.pos in MEMBER_TAGS
        and token.dep_rel != "poss"
        and token.pos != PREPOSITION_TAG
    )


def _grow(head: int, by_offset: Mapping[int, ParseToken]) -> tuple[int, ...]:
    members = {head}
    cursor = head - 1
    while cursor in by_offset and _absorbable(by_offset[cursor], members):
        members.add(cursor)
        cursor -= 1
    cursor = head + 1
    while cursor in by_offset and _absorbable(by_offset[cursor], members):
        members.add(cursor)
        cursor += 1
    return tuple(sorted(members))


def _surface(span: Sequence[int], by_offset: Mapping[int, ParseToken]) -> str:
    return " ".join(by_offset[offset].lemma for offset in span)


def extract_candidates(sentence: ParsedSentence) -> list[Candidate]:
    """Run the head-driven filter over one sentence.

    Candidates grown from different heads are unified: a candidate whose
    span is covered by another is dropped.  Remaining noun tokens that
    no candidate covers become singletons, except possessives.  The
    result is ordered by span start and candidates never share offsets.
    """
    by_offset = sentence.by_offset()
    grown: list[tuple[tuple[int, ...], int]] = []
    for head in sorted(find_head_nouns(sentence)):
        grown.append((_grow(head, by_offset), head))

    kept: list[tuple[tuple[int, ...], int]] = []
    covered: set[int] = set()
    for span, head in sorted(grown, key=lambda g: (-len(g[0]), g[0][0])):
        members = set(span)
        if members <= covered:
            continue
        if members & covered:
            # Partial overlap cannot arise from single-headed dependency
            # links; guard anyway so output spans stay disjoint.
            continue
        kept.append((span, head))
        covered |= members

    candidates = [
        Candidate(sentence.sentence_id, span, _surface(span, by_offset), head)
        for span, head in kept
    ]
    for token in sentence.tokens:
        if token.is_noun and token.offset not in covered and token.dep_rel != "poss":
            candidates.append(
                Candidate(sentence.sentence_id, (token.offset,), token.lemma, None)
            )
    candidates.sort(key=lambda c: c.start)
    return candidates


def _connector_lemma(token: ParseToken | None) -> str | None:
    if token is None:
        return None
    if token.pos == PREPOSITION_TAG:
        return token.lemma
    if token.pos == CONJUNCTION_TAG and token.lemma == CONJUNCTION_LEMMA:
        return token.lemma
    return None


def build_pair(a_x: Candidate, b: str, a_y: Candidate) -> CandidatePair:
    parts = [a_x.surface, b, a_y.surface] if b else [a_x.surface, a_y.surface]
    return CandidatePair(a_x, b, a_y, " ".join(parts))


def form_pairs(
    candidates: Sequence[Candidate], sentence: ParsedSentence
) -> list[CandidatePair]:
    """Pair candidates that sit next to each other in the sentence.

    A pair is emitted when the right candidate starts one offset after
    the left one ends, or two offsets after with the token in between
    being a preposition or the conjunction "and".  Pairs come out in
    left-to-right order of the left candidate.
    """
    by_offset = sentence.by_offset()
    by_start = {c.start: c for c in candidates}
    pairs: list[CandidatePair] = []
    for left in sorted(candidates, key=lambda c: c.start):
        right = by_start.get(left.end + 1)
        if right is not None:
            pairs.append(build_pair(left, "", right))
        right = by_start.get(left.end + 2)
        if right is not None:
            lemma = _connector_lemma(by_offset.get(left.end + 1))
            if lemma is not None:
                pairs.append(build_pair(left, lemma, right))
    return pairs


def merge_pass(
    pairs: Sequence[CandidatePair],
    decisions: Mapping[CandidatePair, bool],
    candidates: Sequence[Candidate],
) -> list[Candidate]:
    """Apply one round of accepted merges to the candidate list.

    Each accepted pair is replaced by a single candidate covering both
    sides plus the connector token.  When a candidate appears in two
    accepted pairs, the leftmost pair wins and the other is deferred to
    a later pass.  With all decisions False the input list is returned
    unchanged.
    """
    for pair in pairs:
        if pair not in decisions:
            raise ValueError("no decision for pair %r" % (pair.s,))
    accepted = sorted(
        (p for p in pairs if decisions[p]), key=lambda p: (p.a_x.start, p.a_y.start)
    )
    replacement: dict[Candidate, Candidate] = {}
    consumed: set[Candidate] = set()
    for pair in accepted:
        if pair.a_x in consumed or pair.a_y in consumed:
            continue
        merged = Candidate(pair.sentence_id, pair.merged_span(), pair.s, None)
        replacement[pair.a_x] = merged
        consumed.update((pair.a_x, pair.a_y))
    result: list[Candidate] = []
    for candidate in sorted(candidates, key=lambda c: c.start):
        if candidate in replacement:
            result.append(replacement[candidate])
        elif candidate not in consumed:
            result.append(candidate)
    return result
