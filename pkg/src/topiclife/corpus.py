"""Tweet corpus ingestion: parsing, hashtag extraction, filtering, timeslots.

The tweet file format is the public SNAP twitter7 layout: three lines per
record (`T <tab> timestamp`, `U <tab> profile url`, `W <tab> text`), records
separated by blank lines.  The follower file is one `user<TAB>follower` pair
per line.  Both may be gzip-compressed (sniffed by magic bytes).
"""

from __future__ import annotations

import gzip
import re
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import IO, Iterable, Iterator

from topiclife.errors import ConfigurationError, ContractViolation

HASHTAG_RE = re.compile(r"#(\w+)")
_TIMESTAMP_FMT = "%Y-%m-%d %H:%M:%S"


@dataclass
class Tweet:
    """One post: ordinal id, author handle, UTC timestamp, text, hashtags."""

    tweet_seq: int
    author: str
    timestamp: datetime
    text: str
    hashtags: list[str]


@dataclass
class ParseStats:
    """Mutable counters threaded through a streaming parse."""

    parsed: int = 0
    malformed_skipped: int = 0


def extract_hashtags(text: str) -> list[str]:
    """Return hashtag tokens in order of appearance.

    A hashtag is '#' followed by one or more word characters (letters, digits,
    underscore).  The leading '#' is stripped; case is preserved; duplicates
    are retained.
    """
    return HASHTAG_RE.findall(text)


def open_maybe_gzip(path: str | Path) -> IO[str]:
    """Open a text file, transparently decompressing if gzip magic is found."""
    path = Path(path)
    with open(path, "rb") as probe:
        magic = probe.read(2)
    if magic == b"\x1f\x8b":
        return gzip.open(path, "rt", encoding="utf-8", errors="replace")
    return open(path, "r", encoding="utf-8", errors="replace")


def _parse_record(seq: int, lines: list[str]) -> Tweet | None:
    if len(lines) != 3:
        return None
    t_line, u_line, w_line = lines
    if not (t_line.startswith("T") and u_line.startswith("U") and w_line.startswith("W")):
        return None
    try:
        _, ts_raw = t_line.split(None, 1)
        _, url = u_line.split(None, 1)
    except ValueError:
        return None
    parts = w_line.split(None, 1)
    text = parts[1] if len(parts) == 2 else ""
    try:
        timestamp = datetime.strptime(ts_raw.strip(), _TIMESTAMP_FMT).replace(tzinfo=timezone.utc)
    except ValueError:
        return None
    author = url.strip().rstrip("/").rsplit("/", 1)[-1]
    if not author:
        return None
    return Tweet(seq, author, timestamp, text, extract_hashtags(text))


def parse_tweet_stream(source: Iterable[str], stats: ParseStats | None = None) -> Iterator[Tweet]:
    """Yield Tweets from a line stream of 3-line records.

    Malformed records (wrong line count, bad prefixes, unparseable timestamp)
    are counted in ``stats.malformed_skipped`` and skipped, never silently
    dropped.  Streaming: memory is bounded by the largest single record.
    """
    if stats is None:
        stats = ParseStats()
    record: list[str] = []
    seq = 0

    def flush() -> Tweet | None:
        nonlocal seq
        if not record:
            return None
        tweet = _parse_record(seq, record)
        seq += 1
        record.clear()
        if tweet is None:
            stats.malformed_skipped += 1
            return None
        stats.parsed += 1
        return tweet

    for raw in source:
        line = raw.rstrip("\n")
        if line.strip() == "":
            tweet = flush()
            if tweet is not None:
                yield tweet
        else:
            record.append(line)
    tweet = flush()
    if tweet is not None:
        yield tweet


def read_tweets(path: str | Path, stats: ParseStats | None = None) -> Iterator[Tweet]:
    """Stream tweets from a plain or gzipped file."""
    with open_maybe_gzip(path) as fh:
        yield from parse_tweet_stream(fh, stats)


def count_hashtag_usage(tweets: Iterable[Tweet]) -> Counter[str]:
    """Count hashtag incidences: a tag used twice in one tweet counts twice."""
    counts: Counter[str] = Counter()
    for tweet in tweets:
        counts.update(tweet.hashtags)
    return counts


def filter_hashtags(counts: dict[str, int], min_count: int = 40, max_count: int = 1000) -> set[str]:
    """Return hashtags whose count lies in [min_count, max_count] (inclusive)."""
    if min_count > max_count:
        raise ConfigurationError(f"min_count {min_count} > max_count {max_count}")
    return {h for h, c in counts.items() if min_count <= c <= max_count}


def assign_timeslot(timestamp: datetime, epoch_start: datetime, slot_width: timedelta) -> int:
    """Map a timestamp to its slot index: floor((timestamp - epoch_start)/width)."""
    if timestamp < epoch_start:
        raise ValueError(f"timestamp {timestamp} precedes epoch start {epoch_start}")
    return int((timestamp - epoch_start) // slot_width)


@dataclass(frozen=True)
class Slotting:
    """Timeslot parameters: an anchor instant and a fixed slot width."""

    epoch_start: datetime
    slot_width: timedelta = timedelta(days=1)

    def index_of(self, timestamp: datetime) -> int:
        return assign_timeslot(timestamp, self.epoch_start, self.slot_width)

    def slot_start(self, index: int) -> datetime:
        return self.epoch_start + index * self.slot_width


def default_epoch(timestamps: Iterable[datetime]) -> datetime:
    """Midnight UTC of the earliest date seen (reproducible anchor)."""
    earliest = min(timestamps)
    return earliest.replace(hour=0, minute=0, second=0, microsecond=0)


class SocialGraph:
    """Undirected simple graph over user handles (no self-loops, no duplicates)."""

    def __init__(self) -> None:
        self.adjacency: dict[str, set[str]] = {}

    @property
    def nodes(self) -> set[str]:
        return set(self.adjacency)

    def add_node(self, node: str) -> None:
        self.adjacency.setdefault(node, set())

    def add_edge(self, a: str, b: str) -> None:
        if a == b:
            return
        self.adjacency.setdefault(a, set()).add(b)
        self.adjacency.setdefault(b, set()).add(a)

    def has_edge(self, a: str, b: str) -> bool:
        return b in self.adjacency.get(a, ())

    def neighbors(self, node: str) -> set[str]:
        return self.adjacency.get(node, set())

    def degree(self, node: str) -> int:
        return len(self.adjacency.get(node, ()))

    def edges(self) -> Iterator[tuple[str, str]]:
        for a in self.adjacency:
            for b in self.adjacency[a]:
                if a < b:
                    yield (a, b)

    @property
    def node_count(self) -> int:
        return len(self.adjacency)

    @property
    def edge_count(self) -> int:
        return sum(len(nbrs) for nbrs in self.adjacency.values()) // 2

    def induced_subgraph(self, users: set[str]) -> "SocialGraph":
        sub = SocialGraph()
        for u in self.adjacency.keys() & users:
            sub.add_node(u)
            for v in self.adjacency[u]:
                if v in users:
                    sub.add_edge(u, v)
        return sub


def load_social_graph(
    source: Iterable[str],
    retained_users: set[str],
    stats: ParseStats | None = None,
) -> SocialGraph:
    """Build the undirected subgraph induced on retained_users.

    Lines are `user<TAB>follower`; malformed lines are counted and skipped.
    Only edges with both endpoints retained are kept; every retained user that
    appears on a kept line becomes a node.
    """
    if stats is None:
        stats = ParseStats()
    graph = SocialGraph()
    for u in retained_users:
        graph.add_node(u)
    for raw in source:
        line = raw.rstrip("\n")
        if not line.strip():
            continue
        parts = line.split("\t") if "\t" in line else line.split()
        if len(parts) != 2:
            stats.malformed_skipped += 1
            continue
        stats.parsed += 1
        a, b = parts[0].strip(), parts[1].strip()
        if a in retained_users and b in retained_users:
            graph.add_edge(a, b)
    return graph
