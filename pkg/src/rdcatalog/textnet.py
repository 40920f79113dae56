"""Term co-occurrence network over dataset titles.

Tokenization is pluggable: :func:`build_cooccurrence` accepts any
callable mapping a title to a list of terms, so a morphological
analyzer can replace the default rule-based tokenizer without touching
the graph logic.  The default pipeline lowercases, splits on
non-alphanumeric boundaries (keeping intra-word hyphens), drops
stopwords and one-character tokens, and merges curator-listed phrases
("syowa station") into single terms by greedy longest match over the
token stream.  Matching on the token stream rather than the raw string
keeps the tokenizer idempotent: re-tokenizing its own joined output
reproduces the same terms.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from pathlib import Path
from typing import Callable, Iterable, Sequence

_TOKEN_RE = re.compile(r"[^\W_]+(?:-[^\W_]+)*", re.UNICODE)

DEFAULT_MIN_COUNT = 2
DEFAULT_MIN_CO = 2

Tokenizer = Callable[[str], list[str]]


class GraphFormatError(Exception):
    pass


@dataclass(frozen=True)
class GraphNode:
    term: str
    count: int
    rate: float


@dataclass(frozen=True)
class GraphEdge:
    term_a: str
    term_b: str
    co_count: int

    def __post_init__(self):
        if self.term_a >= self.term_b:
            raise ValueError("edge endpoints must be ordered term_a < term_b")


@dataclass(frozen=True)
class CooccurrenceGraph:
    nodes: tuple[GraphNode, ...]
    edges: tuple[GraphEdge, ...]
    total_titles: int

    def check_integrity(self) -> None:
        counts = {}
        for node in self.nodes:
            if node.term in counts:
                raise ValueError(f"duplicate node term {node.term!r}")
            if node.count < 1 or not 0.0 < node.rate <= 1.0:
                raise ValueError(f"node {node.term!r} has invalid count/rate")
            counts[node.term] = node.count
        for edge in self.edges:
            if edge.term_a not in counts or edge.term_b not in counts:
                raise ValueError(f"edge ({edge.term_a}, {edge.term_b}) endpoint missing")
            if edge.co_count > min(counts[edge.term_a], counts[edge.term_b]):
                raise ValueError(
                    f"edge ({edge.term_a}, {edge.term_b}) co_count exceeds endpoint count"
                )


def _word_tokens(text: str, stopwords: frozenset[str]) -> list[str]:
    return [
        t
        for t in _TOKEN_RE.findall(text.lower())
        if len(t) >= 2 and t not in stopwords
    ]


def tokenize_title(
    title: str,
    phrases: Iterable[str] = (),
    stopwords: Iterable[str] = (),
) -> list[str]:
    """Terms of a title, with dictionary phrases merged into single terms."""
    stop = frozenset(s.strip().lower() for s in stopwords)
    tokens = _word_tokens(title, stop)
    if not tokens:
        return []

    table: dict[tuple[str, ...], str] = {}
    # longest token sequence wins; ties resolved by phrase text for determinism
    for phrase in sorted(set(phrases), key=lambda p: (-len(_word_tokens(p, stop)), p)):
        seq = tuple(_word_tokens(phrase, stop))
        if seq and seq not in table:
            table[seq] = " ".join(phrase.lower().split())
    if not table:
        return tokens
    max_len = max(len(seq) for seq in table)

    out: list[str] = []
    i = 0
    while i < len(tokens):
        matched = False
        for length in range(min(max_len, len(tokens) - i), 0, -1):
            seq = tuple(tokens[i : i + length])
            if seq in table:
                out.append(table[seq])
                i += length
                matched = True
                break
        if not matched:
            out.append(tokens[i])
            i += 1
    return out


def load_wordlist(source) -> list[str]:
    """One entry per line; blank lines and '#' comments ignored."""
    text = Path(source).read_text(encoding="utf-8")
    entries = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            entries.append(line)
    return entries


@lru_cache(maxsize=1)
def _default_wordlists() -> tuple[tuple[str, ...], tuple[str, ...]]:
    from importlib import resources

    data = resources.files("rdcatalog") / "data"
    stop = tuple(
        line.strip()
        for line in (data / "stopwords.txt").read_text(encoding="utf-8").splitlines()
        if line.strip() and not line.strip().startswith("#")
    )
    phrases = tuple(
        line.strip()
        for line in (data / "phrases.txt").read_text(encoding="utf-8").splitlines()
        if line.strip() and not line.strip().startswith("#")
    )
    return stop, phrases


def make_tokenizer(
    phrases: Iterable[str] | None = None,
    stopwords: Iterable[str] | None = None,
) -> Tokenizer:
    """A tokenize_title closure; None picks up the packaged word lists."""
    default_stop, default_phrases = _default_wordlists()
    chosen_phrases = tuple(phrases) if phrases is not None else default_phrases
    chosen_stop = tuple(stopwords) if stopwords is not None else default_stop
    return lambda title: tokenize_title(title, chosen_phrases, chosen_stop)


def build_cooccurrence(
    titles: Sequence[str],
    tokenizer: Tokenizer | None = None,
    min_count: int = DEFAULT_MIN_COUNT,
    min_co: int = DEFAULT_MIN_CO,
) -> CooccurrenceGraph:
    """Count per-title term sets; a term repeated within one title counts once."""
    if min_count < 1 or min_co < 1:
        raise ValueError("min_count and min_co must be at least 1")
    tokenizer = tokenizer or make_tokenizer()

    term_counts: Counter[str] = Counter()
    pair_counts: Counter[tuple[str, str]] = Counter()
    for title in titles:
        terms = sorted(set(tokenizer(title)))
        term_counts.update(terms)
        pair_counts.update(combinations(terms, 2))

    total = len(titles)
    kept = {t: c for t, c in term_counts.items() if c >= min_count}
    nodes = tuple(
        GraphNode(term=t, count=c, rate=c / total)
        for t, c in sorted(kept.items(), key=lambda kv: (-kv[1], kv[0]))
    )
    edges = tuple(
        GraphEdge(term_a=a, term_b=b, co_count=c)
        for (a, b), c in sorted(pair_counts.items(), key=lambda kv: (-kv[1], kv[0]))
        if c >= min_co and a in kept and b in kept
    )
    graph = CooccurrenceGraph(nodes=nodes, edges=edges, total_titles=total)
    graph.check_integrity()
    return graph


def export_graph(graph: CooccurrenceGraph) -> str:
    """Deterministic document form of the graph, served verbatim over HTTP."""
    doc = {
        "total_titles": graph.total_titles,
        "nodes": [
            {"term": n.term, "count": n.count, "rate": n.rate}
            for n in sorted(graph.nodes, key=lambda n: (-n.count, n.term))
        ],
        "edges": [
            {"term_a": e.term_a, "term_b": e.term_b, "co_count": e.co_count}
            for e in sorted(graph.edges, key=lambda e: (-e.co_count, (e.term_a, e.term_b)))
        ],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def import_graph(text: str) -> CooccurrenceGraph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"graph document is not valid JSON: {exc}") from exc
    try:
        nodes = tuple(
            GraphNode(term=n["term"], count=int(n["count"]), rate=float(n["rate"]))
            for n in doc["nodes"]
        )
        edges = tuple(
            GraphEdge(term_a=e["term_a"], term_b=e["term_b"], co_count=int(e["co_count"]))
            for e in doc["edges"]
        )
        graph = CooccurrenceGraph(
            nodes=nodes, edges=edges, total_titles=int(doc["total_titles"])
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphFormatError(f"graph document malformed: {exc}") from exc
    graph.check_integrity()
    return graph
