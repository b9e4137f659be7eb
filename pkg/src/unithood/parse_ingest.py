"""Reader/writer for the tab-separated dependency-parse format.

One token per line, six tab-separated columns:

    sentence_id<TAB>offset<TAB>lemma<TAB>pos<TAB>dep_rel<TAB>head_offset

Lines starting with ``#`` are comments and are skipped, as are blank
lines.  Offsets are the parser's 1-based word positions within a
sentence and may have gaps (elided tokens).  ``head_offset`` 0 marks the
sentence root; a head_offset pointing at an offset that is not present
in the sentence is tolerated and treated downstream as "head outside
scope".  Files are UTF-8 with LF line endings.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, TextIO

NOUN_TAGS = frozenset({"NN", "NNS", "NNP", "NNPS"})

HEADER_COMMENT = "# sentence_id\toffset\tlemma\tpos\tdep_rel\thead_offset"

_FORBIDDEN_CHARS = ("\t", "\n", "\r")


class ParseFileError(ValueError):
    """A malformed parse file; carries the 1-based offending line number."""

    def __init__(self, message: str, line_number: int):
        super().__init__("line %d: %s" % (line_number, message))
        self.line_number = line_number


def _check_field(name: str, value: str, allow_empty: bool = True) -> None:
    if not allow_empty and not value:
        raise ValueError("%s must be non-empty" % name)
    if any(c in value for c in _FORBIDDEN_CHARS):
        raise ValueError("%s must not contain tabs or line breaks" % name)


@dataclass(frozen=True)
class ParseToken:
    """One parsed word: its offset, lemma, POS tag and dependency edge."""

    offset: int
    lemma: str
    pos: str
    dep_rel: str
    head_offset: int

    def __post_init__(self):
        if self.offset < 1:
            raise ValueError("offset must be >= 1, got %r" % (self.offset,))
        if self.head_offset < 0:
            raise ValueError("head_offset must be >= 0, got %r" % (self.head_offset,))
        if self.head_offset == self.offset:
            raise ValueError("token at offset %d depends on itself" % self.offset)
        _check_field("lemma", self.lemma, allow_empty=False)
        _check_field("pos", self.pos)
        _check_field("dep_rel", self.dep_rel)

    @property
    def is_noun(self) -> bool:
        return self.pos in NOUN_TAGS


@dataclass(frozen=True)
class ParsedSentence:
    """A parsed sentence: an id plus tokens in strictly ascending offset order."""

    sentence_id: str
    tokens: tuple[ParseToken, ...]

    def __post_init__(self):
        _check_field("sentence_id", self.sentence_id)
        if self.sentence_id.startswith("#"):
            raise ValueError("sentence_id must not start with '#'")
        if not self.tokens:
            raise ValueError("sentence %r has no tokens" % self.sentence_id)
        offsets = [t.offset for t in self.tokens]
        if any(b <= a for a, b in zip(offsets, offsets[1:])):
            raise ValueError(
                "sentence %r offsets must be strictly increasing" % self.sentence_id
            )

    def by_offset(self) -> dict[int, ParseToken]:
        return {t.offset: t for t in self.tokens}


def read_parse_file(stream: TextIO | Iterable[str]) -> list[ParsedSentence]:
    """Parse a stream of lines into sentences.

    Sentences are returned in order of first appearance of their id;
    tokens are sorted by offset.  Raises ParseFileError for rows with
    the wrong column count, non-integer offsets, invalid token fields,
    or an offset that repeats within a sentence.
    """
    grouped: dict[str, list[ParseToken]] = {}
    seen: set[tuple[str, int]] = set()
    for line_number, raw in enumerate(stream, start=1):
        line = raw.rstrip("\n")
        if line.endswith("\r"):
            line = line[:-1]
        if not line.strip() or line.startswith("#"):
            continue
        columns = line.split("\t")
        if len(columns) != 6:
            raise ParseFileError(
                "expected 6 tab-separated columns, got %d" % len(columns), line_number
            )
        sentence_id, offset_s, lemma, pos, dep_rel, head_s = columns
        try:
            offset = int(offset_s)
            head_offset = int(head_s)
        except ValueError:
            raise ParseFileError(
                "offset and head_offset must be integers, got %r / %r"
                % (offset_s, head_s),
                line_number,
            ) from None
        try:
            token = ParseToken(offset, lemma, pos, dep_rel, head_offset)
        except ValueError as exc:
            raise ParseFileError(str(exc), line_number) from None
        if (sentence_id, offset) in seen:
            raise ParseFileError(
                "duplicate offset %d in sentence %r" % (offset, sentence_id),
                line_number,
            )
        seen.add((sentence_id, offset))
        grouped.setdefault(sentence_id, []).append(token)
    return [
        ParsedSentence(sid, tuple(sorted(tokens, key=lambda t: t.offset)))
        for sid, tokens in grouped.items()
    ]


def write_parse_file(sentences: Iterable[ParsedSentence], stream: TextIO) -> None:
    """Write sentences in the columnar format, starting with a header comment.

    Reading the result back yields the same sentences, field for field,
    provided sentence ids are unique.
    """
    stream.write(HEADER_COMMENT + "\n")
    for sentence in sentences:
        for t in sentence.tokens:
            stream.write(
                "%s\t%d\t%s\t%s\t%s\t%d\n"
                % (sentence.sentence_id, t.offset, t.lemma, t.pos, t.dep_rel, t.head_offset)
            )
