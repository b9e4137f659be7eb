import random

import pytest

from unithood import (
    Candidate,
    CandidatePair,
    ParsedSentence,
    ParseToken,
    build_pair,
    extract_candidates,
    find_head_nouns,
    form_pairs,
    merge_pass,
)


def sentence_from(rows, sentence_id="t"):
    tokens = tuple(ParseToken(*row) for row in rows)
    return ParsedSentence(sentence_id, tokens)


class TestFindHeadNouns:
    def test_sample_sentence(self, sample_sentence):
        heads = find_head_nouns(sample_sentence)
        # Kopnisky, Institute and Health each carry a compound modifier.
        assert {15, 21, 24} <= heads
        # Nouns only governed from outside a noun phrase qualify too.
        assert heads == {7, 10, 15, 21, 24, 32}

    def test_possessive_not_a_head(self, sample_sentence):
        assert 18 not in find_head_nouns(sample_sentence)

    def test_internal_modifiers_not_heads(self, sample_sentence):
        assert {14, 20, 23} & find_head_nouns(sample_sentence) == set()

    def test_no_nouns(self):
        sentence = sentence_from([(1, "run", "VBG", "root", 0), (2, "fast", "RB", "advmod", 1)])
        assert find_head_nouns(sentence) == set()

    def test_single_noun_sentence(self):
        sentence = sentence_from([(3, "dog", "NN", "root", 0)])
        assert find_head_nouns(sentence) == {3}


class TestExtractCandidates:
    def test_sample_multi_token_candidates(self, sample_sentence):
        candidates = extract_candidates(sample_sentence)
        multi = {c.surface for c in candidates if len(c.span) > 1}
        assert multi == {"Mental Health", "National Institute", "Kathy Kopnisky"}

    def test_sample_singletons(self, sample_sentence):
        candidates = extract_candidates(sample_sentence)
        singles = {c.surface for c in candidates if len(c.span) == 1}
        assert singles == {"HIV", "brain", "neuroAIDS"}

    def test_possessive_and_preposition_absent(self, sample_sentence):
        for candidate in extract_candidates(sample_sentence):
            words = candidate.surface.split()
            assert "NIH's" not in words
            assert "of" not in words

    def test_preposition_blocks_growth(self, sample_sentence):
        by_surface = {c.surface: c for c in extract_candidates(sample_sentence)}
        assert by_surface["Mental Health"].span == (23, 24)
        assert by_surface["National Institute"].span == (20, 21)

    def test_contained_candidate_dropped(self):
        # "science" heads "computer" but is itself absorbed by "department".
        sentence = sentence_from(
            [
                (1, "computer", "NN", "nn", 2),
                (2, "science", "NN", "nn", 3),
                (3, "department", "NN", "pobj", 0),
            ]
        )
        candidates = extract_candidates(sentence)
        assert [c.surface for c in candidates] == ["computer science department"]

    def test_leftover_noun_without_head_status(self):
        # "press" hangs inside a noun phrase (nn) but its governor is a
        # verb-tagged token, so nothing absorbs it; the leftover rule
        # keeps it as a singleton without a head marker.
        sentence = sentence_from(
            [
                (1, "press", "NN", "nn", 2),
                (2, "release", "VBG", "root", 0),
            ]
        )
        candidates = extract_candidates(sentence)
        assert [c.surface for c in candidates] == ["press"]
        assert candidates[0].head_offset is None


class TestFormPairs:
    def test_sample_single_pair(self, sample_sentence):
        candidates = extract_candidates(sample_sentence)
        pairs = form_pairs(candidates, sample_sentence)
        assert len(pairs) == 1
        pair = pairs[0]
        assert pair.a_x.surface == "National Institute"
        assert pair.b == "of"
        assert pair.a_y.surface == "Mental Health"
        assert pair.s == "National Institute of Mental Health"

    def test_determiner_blocks_pairing(self, sample_sentence):
        # "Kathy Kopnisky of the ..." has two tokens between the
        # candidates, so no pair forms to its right.
        pairs = form_pairs(extract_candidates(sample_sentence), sample_sentence)
        assert all(p.a_x.surface != "Kathy Kopnisky" for p in pairs)

    def test_adjacent_candidates_pair_with_empty_connector(self):
        sentence = sentence_from(
            [
                (1, "bird", "NN", "nn", 2),
                (2, "flu", "NN", "nn", 3),
                (3, "virus", "NN", "dobj", 0),
            ]
        )
        # force two candidates: split the compound by hand
        left = Candidate("t", (1, 2), "bird flu")
        right = Candidate("t", (3,), "virus")
        pairs = form_pairs([left, right], sentence)
        assert len(pairs) == 1
        assert pairs[0].b == ""
        assert pairs[0].s == "bird flu virus"

    def test_conjunction_and_pairs(self):
        sentence = sentence_from(
            [
                (1, "Allergy", "NNP", "pobj", 0),
                (2, "and", "CC", "cc", 1),
                (3, "Diseases", "NNPS", "conj", 1),
            ]
        )
        pairs = form_pairs(extract_candidates(sentence), sentence)
        assert [p.s for p in pairs] == ["Allergy and Diseases"]

    def test_other_conjunction_does_not_pair(self):
        sentence = sentence_from(
            [
                (1, "Allergy", "NNP", "pobj", 0),
                (2, "or", "CC", "cc", 1),
                (3, "Diseases", "NNPS", "conj", 1),
            ]
        )
        assert form_pairs(extract_candidates(sentence), sentence) == []

    def test_verb_separated_candidates_do_not_pair(self):
        sentence = sentence_from(
            [
                (1, "dog", "NN", "nsubj", 2),
                (2, "bite", "VBZ", "root", 0),
                (3, "man", "NN", "dobj", 2),
            ]
        )
        assert form_pairs(extract_candidates(sentence), sentence) == []

    def test_pair_order_is_left_to_right(self):
        sentence = sentence_from(
            [
                (1, "a", "NN", "nsubj", 0),
                (2, "b", "NN", "dobj", 1),
                (3, "of", "IN", "prep", 2),
                (4, "c", "NN", "pobj", 3),
            ]
        )
        candidates = [
            Candidate("t", (1,), "a"),
            Candidate("t", (2,), "b"),
            Candidate("t", (4,), "c"),
        ]
        pairs = form_pairs(candidates, sentence)
        assert [(p.a_x.surface, p.a_y.surface) for p in pairs] == [("a", "b"), ("b", "c")]


class TestCandidatePairInvariants:
    def test_rejects_wrong_gap(self):
        left = Candidate("t", (1,), "a")
        right = Candidate("t", (5,), "b")
        with pytest.raises(ValueError):
            CandidatePair(left, "of", right, "a of b")

    def test_rejects_cross_sentence(self):
        left = Candidate("t1", (1,), "a")
        right = Candidate("t2", (2,), "b")
        with pytest.raises(ValueError):
            CandidatePair(left, "", right, "a b")

    def test_merged_span_includes_connector(self):
        pair = build_pair(Candidate("t", (1, 2), "a b"), "of", Candidate("t", (4,), "c"))
        assert pair.merged_span() == (1, 2, 3, 4)


class TestMergePass:
    def pair_chain(self):
        c1 = Candidate("t", (1,), "a")
        c2 = Candidate("t", (3,), "b")
        c3 = Candidate("t", (5,), "c")
        p12 = build_pair(c1, "of", c2)
        p23 = build_pair(c2, "of", c3)
        return [c1, c2, c3], [p12, p23]

    def test_all_false_is_identity(self):
        candidates, pairs = self.pair_chain()
        out = merge_pass(pairs, {p: False for p in pairs}, candidates)
        assert out == candidates

    def test_single_merge(self):
        candidates, pairs = self.pair_chain()
        decisions = {pairs[0]: True, pairs[1]: False}
        out = merge_pass(pairs, decisions, candidates)
        assert [c.surface for c in out] == ["a of b", "c"]
        assert out[0].span == (1, 2, 3)
        assert out[0].head_offset is None

    def test_chain_leftmost_wins(self):
        candidates, pairs = self.pair_chain()
        out = merge_pass(pairs, {p: True for p in pairs}, candidates)
        assert [c.surface for c in out] == ["a of b", "c"]

    def test_candidate_count_drops_by_applied_merges(self):
        candidates, pairs = self.pair_chain()
        out = merge_pass(pairs, {pairs[0]: True, pairs[1]: False}, candidates)
        assert len(out) == len(candidates) - 1

    def test_unpaired_candidates_survive(self):
        candidates, pairs = self.pair_chain()
        extra = Candidate("t", (9,), "z")
        out = merge_pass(pairs, {p: True for p in pairs}, candidates + [extra])
        assert extra in out

    def test_missing_decision_raises(self):
        candidates, pairs = self.pair_chain()
        with pytest.raises(ValueError):
            merge_pass(pairs, {pairs[0]: True}, candidates)

    def test_merged_output_never_overlaps(self):
        candidates, pairs = self.pair_chain()
        out = merge_pass(pairs, {p: True for p in pairs}, candidates)
        seen = set()
        for candidate in out:
            assert not (set(candidate.span) & seen)
            seen |= set(candidate.span)


POS_CHOICES = ["NN", "NNS", "NNP", "NNPS", "JJ", "FW", "IN", "DT", "CC", "VBG", "RB", "CD"]
REL_CHOICES = ["nn", "amod", "poss", "det", "prep", "pobj", "nsubj", "dobj", "conj", "cc"]
LEMMAS = ["alpha", "beta", "gamma", "delta", "and", "of", "on", "the", "run"]


def random_sentence(rng: random.Random) -> ParsedSentence:
    length = rng.randint(1, 14)
    offset = 0
    rows = []
    offsets = []
    for _ in range(length):
        offset += rng.choice([1, 1, 1, 2])
        offsets.append(offset)
    for position in offsets:
        head = rng.choice([0] + [o for o in offsets if o != position])
        rows.append(
            (
                position,
                rng.choice(LEMMAS),
                rng.choice(POS_CHOICES),
                rng.choice(REL_CHOICES),
                head,
            )
        )
    return sentence_from(rows, sentence_id="r")


class TestRandomizedInvariants:
    def test_candidates_never_share_offsets(self):
        rng = random.Random(20240811)
        for _ in range(300):
            sentence = random_sentence(rng)
            seen = set()
            for candidate in extract_candidates(sentence):
                overlap = set(candidate.span) & seen
                assert not overlap, (sentence, candidate)
                seen |= set(candidate.span)

    def test_surfaces_match_member_lemmas(self):
        rng = random.Random(7)
        for _ in range(300):
            sentence = random_sentence(rng)
            by_offset = sentence.by_offset()
            for candidate in extract_candidates(sentence):
                expected = " ".join(by_offset[o].lemma for o in candidate.span)
                assert candidate.surface == expected

    def test_multi_token_candidates_contain_one_head(self):
        rng = random.Random(99)
        for _ in range(300):
            sentence = random_sentence(rng)
            heads = find_head_nouns(sentence)
            for candidate in extract_candidates(sentence):
                if len(candidate.span) > 1:
                    assert candidate.head_offset in heads
                    assert candidate.head_offset in candidate.span

    def test_pair_gap_is_zero_or_one_qualifying_token(self):
        rng = random.Random(4242)
        for _ in range(300):
            sentence = random_sentence(rng)
            by_offset = sentence.by_offset()
            candidates = extract_candidates(sentence)
            for pair in form_pairs(candidates, sentence):
                assert pair.a_x.end < pair.a_y.start
                gap = pair.a_y.start - pair.a_x.end - 1
                assert gap in (0, 1)
                if gap == 1:
                    between = by_offset[pair.a_x.end + 1]
                    assert between.pos == "IN" or (
                        between.pos == "CC" and between.lemma == "and"
                    )
                    assert pair.b == between.lemma
                else:
                    assert pair.b == ""

    def test_merge_pass_counts_and_disjointness(self):
        rng = random.Random(31337)
        for _ in range(300):
            sentence = random_sentence(rng)
            candidates = extract_candidates(sentence)
            pairs = form_pairs(candidates, sentence)
            decisions = {p: rng.random() < 0.5 for p in pairs}
            out = merge_pass(pairs, decisions, candidates)
            assert len(out) <= len(candidates)
            seen = set()
            for candidate in out:
                assert not (set(candidate.span) & seen)
                seen |= set(candidate.span)
