"""Document-count evidence providers.

Every provider answers one question: in how many documents does a phrase
occur as an exact contiguous token sequence?  Three interchangeable
sources are available: a closed fixture (phrase -> count mapping), a
local index built over a small corpus, and a generic HTTP client for any
search API that reports a total-results figure.  A persistent append-only
cache can wrap any of them so repeated runs are reproducible and hit the
network at most once per phrase.
"""

from __future__ import annotations

import json
import re
import threading
import time
import urllib.parse
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Mapping, Protocol

import requests


def normalize_phrase(phrase: str) -> str:
    """Collapse runs of whitespace to single spaces; case is preserved."""
    return " ".join(phrase.split())


def _lookup_key(phrase: str) -> str:
    return normalize_phrase(phrase).lower()


class MissingCountError(LookupError):
    """A closed fixture has no count for the requested phrase."""

    def __init__(self, phrase: str):
        super().__init__("no count recorded for phrase %r" % phrase)
        self.phrase = phrase


class TransportError(RuntimeError):
    """The remote count could not be obtained; distinct from a zero count."""


class CountProvider(Protocol):
    provider_id: str

    def count(self, phrase: str) -> int: ...


@dataclass(frozen=True)
class EvidenceSet:
    """Document counts for a candidate pair: the merged unit and both sides."""

    n_s: int
    n_ax: int
    n_ay: int

    def __post_init__(self):
        if min(self.n_s, self.n_ax, self.n_ay) < 0:
            raise ValueError("counts must be non-negative")

    @property
    def total(self) -> int:
        return self.n_s + self.n_ax + self.n_ay


def gather_evidence(provider: CountProvider, s: str, a_x: str, a_y: str) -> EvidenceSet:
    return EvidenceSet(provider.count(s), provider.count(a_x), provider.count(a_y))


class FixtureProvider:
    """Counts served from a fixed phrase -> count table.

    ``missing_policy`` is "error" (default, to expose fixture gaps) or
    "zero".
    """

    provider_id = "fixture"

    def __init__(self, counts: Mapping[str, int], missing_policy: str = "error"):
        if missing_policy not in ("error", "zero"):
            raise ValueError("missing_policy must be 'error' or 'zero'")
        self._counts = {_lookup_key(p): int(c) for p, c in counts.items()}
        if any(c < 0 for c in self._counts.values()):
            raise ValueError("fixture counts must be non-negative")
        self.missing_policy = missing_policy

    @classmethod
    def from_file(cls, path: str | Path, missing_policy: str = "error") -> "FixtureProvider":
        """Load a JSON object {phrase: count} or a TSV of phrase<TAB>count."""
        text = Path(path).read_text(encoding="utf-8")
        if str(path).endswith(".json") or text.lstrip().startswith("{"):
            counts = json.loads(text)
        else:
            counts = {}
            for line in text.splitlines():
                if not line.strip() or line.startswith("#"):
                    continue
                phrase, value = line.split("\t")
                counts[phrase] = int(value)
        return cls(counts, missing_policy)

    def count(self, phrase: str) -> int:
        key = _lookup_key(phrase)
        if not key:
            raise ValueError("phrase is empty after normalization")
        if key in self._counts:
            return self._counts[key]
        if self.missing_policy == "zero":
            return 0
        raise MissingCountError(normalize_phrase(phrase))


class LocalIndexProvider:
    """Document-frequency counts over an in-memory corpus.

    A phrase counts once per document containing it as a contiguous
    token subsequence, however many times it occurs there.  Matching is
    case-insensitive.  Lookups intersect per-token posting lists and
    verify the survivors with a padded-string containment check.
    """

    provider_id = "local-index"

    def __init__(self, documents: Iterable[str | Iterable[str]]):
        self._postings: dict[str, set[int]] = {}
        self._padded: list[str] = []
        for doc_id, document in enumerate(documents):
            tokens = document.split() if isinstance(document, str) else list(document)
            tokens = [t.lower() for t in tokens]
            for token in tokens:
                self._postings.setdefault(token, set()).add(doc_id)
            self._padded.append(" " + " ".join(tokens) + " ")

    def __len__(self) -> int:
        return len(self._padded)

    def count(self, phrase: str) -> int:
        tokens = _lookup_key(phrase).split()
        if not tokens:
            raise ValueError("phrase is empty after normalization")
        doc_ids: set[int] | None = None
        for token in tokens:
            posting = self._postings.get(token)
            if not posting:
                return 0
            doc_ids = posting.copy() if doc_ids is None else doc_ids & posting
            if not doc_ids:
                return 0
        needle = " " + " ".join(tokens) + " "
        assert doc_ids is not None
        return sum(1 for doc_id in doc_ids if needle in self._padded[doc_id])


def build_local_index(corpus: Iterable[str | Iterable[str]]) -> LocalIndexProvider:
    """Index a corpus of whitespace-tokenized documents (or token lists)."""
    return LocalIndexProvider(corpus)


def load_corpus_file(path: str | Path) -> LocalIndexProvider:
    """Build a local index from a text file with one document per line."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return LocalIndexProvider([line for line in lines if line.strip()])


@dataclass(frozen=True)
class CountCacheEntry:
    phrase: str
    count: int
    provider_id: str
    fetched_at: str


class CountCache:
    """Append-only TSV cache: phrase<TAB>count<TAB>provider_id<TAB>fetched_at.

    The whole file is loaded at construction; the last entry for a
    (phrase, provider) pair wins.  Writes append a line and are
    serialized through a lock.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._entries: dict[tuple[str, str], CountCacheEntry] = {}
        if self.path.exists():
            for line in self.path.read_text(encoding="utf-8").splitlines():
                if not line.strip() or line.startswith("#"):
                    continue
                phrase, count, provider_id, fetched_at = line.split("\t")
                entry = CountCacheEntry(phrase, int(count), provider_id, fetched_at)
                self._entries[(provider_id, _lookup_key(phrase))] = entry

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, provider_id: str, phrase: str) -> int | None:
        entry = self._entries.get((provider_id, _lookup_key(phrase)))
        return None if entry is None else entry.count

    def put(self, provider_id: str, phrase: str, count: int) -> None:
        normalized = normalize_phrase(phrase)
        entry = CountCacheEntry(
            normalized,
            int(count),
            provider_id,
            time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        )
        with self._lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8") as handle:
                handle.write(
                    "%s\t%d\t%s\t%s\n"
                    % (entry.phrase, entry.count, entry.provider_id, entry.fetched_at)
                )
            self._entries[(provider_id, _lookup_key(normalized))] = entry


class CachedProvider:
    """Cache-first wrapper around any provider."""

    def __init__(self, inner: CountProvider, cache: CountCache):
        self.inner = inner
        self.cache = cache
        self.provider_id = inner.provider_id

    def count(self, phrase: str) -> int:
        cached = self.cache.get(self.provider_id, phrase)
        if cached is not None:
            return cached
        value = self.inner.count(phrase)
        self.cache.put(self.provider_id, phrase, value)
        return value


@dataclass(frozen=True)
class RemoteClientConfig:
    """Settings for the generic search-API count client.

    ``endpoint_template`` must contain a ``{query}`` placeholder.
    ``count_path`` is either a dotted path into the JSON response body
    (list indices allowed, e.g. "searchInformation.totalResults") or
    ``regex:<pattern>`` whose first capture group is the count.
    """

    endpoint_template: str
    count_path: str
    min_delay_ms: int = 1000
    max_retries: int = 3
    timeout_ms: int = 10000

    def __post_init__(self):
        if "{query}" not in self.endpoint_template:
            raise ValueError("endpoint_template must contain a {query} placeholder")
        if self.min_delay_ms < 0 or self.max_retries < 1 or self.timeout_ms <= 0:
            raise ValueError("invalid remote client settings")


def _default_fetch(url: str, timeout_ms: int) -> str:
    response = requests.get(url, timeout=timeout_ms / 1000.0)
    response.raise_for_status()
    return response.text


class RemoteCountClient:
    """Fetch total-result counts from a configurable search endpoint.

    Phrases are submitted as quoted exact-phrase queries.  Consecutive
    requests are spaced at least ``min_delay_ms`` apart (enforced
    globally across threads).  Failures are retried up to
    ``max_retries`` attempts and then raised as TransportError; a
    failure is never reported as a zero count.
    """

    provider_id = "remote"

    def __init__(
        self,
        config: RemoteClientConfig,
        fetch: Callable[[str], str] | None = None,
        sleep: Callable[[float], None] = time.sleep,
        clock: Callable[[], float] = time.monotonic,
    ):
        self.config = config
        self._fetch = fetch or (lambda url: _default_fetch(url, config.timeout_ms))
        self._sleep = sleep
        self._clock = clock
        self._lock = threading.Lock()
        self._last_request: float | None = None

    def build_url(self, phrase: str) -> str:
        query = urllib.parse.quote_plus('"%s"' % normalize_phrase(phrase))
        return self.config.endpoint_template.replace("{query}", query)

    def _respect_rate_limit(self) -> None:
        with self._lock:
            now = self._clock()
            if self._last_request is not None:
                wait = self.config.min_delay_ms / 1000.0 - (now - self._last_request)
                if wait > 0:
                    self._sleep(wait)
                    now = self._clock()
            self._last_request = now

    def extract_count(self, body: str) -> int:
        path = self.config.count_path
        if path.startswith("regex:"):
            match = re.search(path[len("regex:"):], body)
            if match is None:
                raise ValueError("count pattern matched nothing")
            return int(match.group(1).replace(",", ""))
        value: object = json.loads(body)
        for part in path.split("."):
            if isinstance(value, list):
                value = value[int(part)]
            elif isinstance(value, dict):
                value = value[part]
            else:
                raise ValueError("count_path %r does not resolve" % path)
        return int(str(value).replace(",", ""))

    def count(self, phrase: str) -> int:
        if not normalize_phrase(phrase):
            raise ValueError("phrase is empty after normalization")
        url = self.build_url(phrase)
        last_error: Exception | None = None
        for _ in range(self.config.max_retries):
            self._respect_rate_limit()
            try:
                return self.extract_count(self._fetch(url))
            except (requests.RequestException, ValueError, KeyError, IndexError) as exc:
                last_error = exc
        raise TransportError(
            "could not fetch count for %r: %s" % (normalize_phrase(phrase), last_error)
        )
