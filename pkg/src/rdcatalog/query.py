"""In-memory search, filtering, and ordering over a catalog snapshot.

Searches are read-only passes over the immutable snapshot, so any
number can run concurrently.  Random order uses a seeded SplitMix64
stream driving a Fisher-Yates shuffle over the slug-sorted record
list; given the same seed and snapshot it yields the same permutation
in any process, which keeps pagination stable within a visit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .model import CatalogSnapshot, DatasetRecord

MAX_PAGE_SIZE = 100

_M64 = (1 << 64) - 1


class QueryError(Exception):
    pass


class InvalidPage(QueryError):
    pass


@dataclass(frozen=True)
class SearchQuery:
    text: str = ""
    chips: tuple[str, ...] = ()
    combine: str = "AND"
    lang: str = "en"

    def __post_init__(self):
        object.__setattr__(self, "chips", tuple(self.chips))
        object.__setattr__(self, "combine", str(self.combine).upper())
        if self.combine not in ("AND", "OR"):
            raise ValueError(f"combine must be AND or OR, got {self.combine!r}")
        if self.lang not in ("en", "ja"):
            raise ValueError(f"unsupported language {self.lang!r}")

    @property
    def terms(self) -> tuple[str, ...]:
        return tuple(t for t in self.text.split() if t)


@dataclass(frozen=True)
class SortOrder:
    kind: str
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in ("random", "access_desc", "title_asc"):
            raise ValueError(f"unknown sort order {self.kind!r}")
        if self.kind == "random" and self.seed is None:
            raise ValueError("random order requires an explicit seed")

    @classmethod
    def random(cls, seed: int) -> "SortOrder":
        return cls("random", seed=int(seed))

    @classmethod
    def access_desc(cls) -> "SortOrder":
        return cls("access_desc")

    @classmethod
    def title_asc(cls) -> "SortOrder":
        return cls("title_asc")


def _matches_term(record: DatasetRecord, term: str, lang: str) -> bool:
    needle = term.lower()
    for text in (
        record.title.get(lang),
        record.snippet.get(lang),
        record.description.get(lang),
    ):
        if text and needle in text.lower():
            return True
    return any(needle in keyword.lower() for keyword in record.keywords)


def _matches_chip(record: DatasetRecord, chip: str) -> bool:
    tag = chip.lower()
    return any(tag == k.lower() for k in record.keywords) or any(
        tag == d.lower() for d in record.discipline
    )


def matches(record: DatasetRecord, query: SearchQuery) -> bool:
    """One record against one query; empty queries match everything."""
    checks = [_matches_term(record, term, query.lang) for term in query.terms]
    checks += [_matches_chip(record, chip) for chip in query.chips]
    if not checks:
        return True
    return all(checks) if query.combine == "AND" else any(checks)


def _splitmix64(state: int) -> tuple[int, int]:
    state = (state + 0x9E3779B97F4A7C15) & _M64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return state, (z ^ (z >> 31)) & _M64


def seeded_shuffle(items: Sequence, seed: int) -> list:
    """Fisher-Yates permutation driven by a SplitMix64 stream."""
    out = list(items)
    state = int(seed) & _M64
    for i in range(len(out) - 1, 0, -1):
        state, word = _splitmix64(state)
        j = word % (i + 1)
        out[i], out[j] = out[j], out[i]
    return out


def sort_records(
    records: Iterable[DatasetRecord],
    order: SortOrder,
    access_counts: Mapping[str, int] | None = None,
    lang: str = "en",
) -> list[DatasetRecord]:
    """Deterministic ordering; ties always fall back to the slug."""
    by_slug = sorted(records, key=lambda r: r.id)
    if order.kind == "random":
        return seeded_shuffle(by_slug, order.seed)
    if order.kind == "access_desc":
        counts = access_counts or {}

        def count_of(record: DatasetRecord) -> int:
            return counts.get(record.id, record.access_count)

        return sorted(by_slug, key=lambda r: (-count_of(r), r.id))
    return sorted(by_slug, key=lambda r: (r.title.get(lang).lower(), r.id))


def search(
    snapshot: CatalogSnapshot,
    query: SearchQuery | None = None,
    sort: SortOrder | None = None,
    page: int = 1,
    page_size: int = 20,
    access_counts: Mapping[str, int] | None = None,
) -> dict:
    """Filter, order, and paginate; returns {"total": n, "items": [...]}.

    ``access_counts`` supplies live counter values merged over the
    snapshot's stored ones, so access-ordered listings see increments
    made since the snapshot was built.
    """
    if page < 1:
        raise InvalidPage(f"page must be >= 1, got {page}")
    if not 1 <= page_size <= MAX_PAGE_SIZE:
        raise InvalidPage(f"page_size must be in 1..{MAX_PAGE_SIZE}, got {page_size}")
    query = query or SearchQuery()
    sort = sort or SortOrder.title_asc()

    hits = [r for r in snapshot.records.values() if matches(r, query)]
    ordered = sort_records(hits, sort, access_counts=access_counts, lang=query.lang)
    start = (page - 1) * page_size
    return {"total": len(ordered), "items": ordered[start : start + page_size]}
