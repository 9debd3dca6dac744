"""Staged pipeline with cached intermediate artifacts.

Each stage reads the previous stage's files from the output directory and
writes its own; a manifest of content hashes makes rerunning an unchanged
stage a no-op.  All artifacts are plain CSV/JSON with sorted rows and keys,
so identical inputs and configuration produce byte-identical outputs.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field, asdict
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np

from topiclife import corpus, embedding, synth
from topiclife.clustering import KMeansConfig, SemanticCluster, kmeans_cluster
from topiclife.community import Partition, detect_communities, modularity
from topiclife.corpus import ParseStats, Slotting, Tweet
from topiclife.errors import ConfigurationError, PrerequisiteError
from topiclife.temporal import active_slots, split_semantic_cluster, build_all_series
from topiclife.timeline import UsageTimeline, build_timeline, lifecycle_report

DEFAULT_K_LIST = [200, 400, 600, 800, 1000, 1200, 1400, 1600, 1800, 2000]

STAGES = ["ingest", "embed", "cluster", "split", "communities", "timelines", "report"]


@dataclass
class PipelineConfig:
    tweets_path: str | None = None
    edges_path: str | None = None
    lexicon_path: str | None = None
    out_dir: str = "out"
    date_start: str | None = None  # YYYY-MM-DD, inclusive, UTC
    date_end: str | None = None  # YYYY-MM-DD, inclusive, UTC
    slot_width_days: float = 1.0
    min_count: int = 40
    max_count: int = 1000
    k_list: list[int] = field(default_factory=lambda: list(DEFAULT_K_LIST))
    k: int | None = None
    gap_threshold_slots: int = 2
    kmeans_seed: int = 0
    kmeans_max_iterations: int = 100
    kmeans_tolerance: float = 1e-6
    community_seed: int = 0
    community_size_floor: int = 10
    divisor_mode: str = "covered"
    morph_across_gaps: bool = False
    embedding_dim: int = 200
    threads: int = 1
    synth_seed: int = 0

    def validate(self, stage: str) -> None:
        problems: list[str] = []
        if self.min_count > self.max_count:
            problems.append(f"min_count {self.min_count} > max_count {self.max_count}")
        if self.slot_width_days <= 0:
            problems.append("slot_width_days must be positive")
        if self.gap_threshold_slots < 0:
            problems.append("gap_threshold_slots must be non-negative")
        if self.divisor_mode not in ("covered", "all"):
            problems.append(f"divisor_mode must be 'covered' or 'all', got {self.divisor_mode!r}")
        if any(k < 1 for k in self.k_list):
            problems.append("k_list entries must be positive")
        if self.community_size_floor < 1:
            problems.append("community_size_floor must be >= 1")
        if self.embedding_dim < 1:
            problems.append("embedding_dim must be positive")
        if self.threads < 1:
            problems.append("threads must be >= 1")
        needs_tweets = stage in ("ingest", "all")
        if needs_tweets and not self.tweets_path:
            problems.append("tweets_path is required")
        if stage in ("embed", "all") and not self.lexicon_path:
            problems.append("lexicon_path is required")
        if stage in ("communities", "all") and not self.edges_path:
            problems.append("edges_path is required")
        if stage in ("split", "timelines", "report", "all") and self.chosen_k() is None:
            problems.append("an explicit k is required for lifecycle stages (--k)")
        for name in ("date_start", "date_end"):
            value = getattr(self, name)
            if value is not None:
                try:
                    datetime.strptime(value, "%Y-%m-%d")
                except ValueError:
                    problems.append(f"{name} must be YYYY-MM-DD, got {value!r}")
        if problems:
            raise ConfigurationError("; ".join(problems))

    def chosen_k(self) -> int | None:
        if self.k is not None:
            return self.k
        if len(self.k_list) == 1:
            return self.k_list[0]
        return None

    def slot_width(self) -> timedelta:
        return timedelta(days=self.slot_width_days)


def load_config_file(path: str | Path) -> dict[str, str]:
    """Flat `key = value` config file; '#' starts a comment."""
    values: dict[str, str] = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"config line has no '=': {raw!r}")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip().strip('"')
    return values


def config_from_mapping(values: dict[str, str]) -> PipelineConfig:
    cfg = PipelineConfig()
    casts = {
        "slot_width_days": float,
        "kmeans_tolerance": float,
        "min_count": int,
        "max_count": int,
        "k": int,
        "gap_threshold_slots": int,
        "kmeans_seed": int,
        "kmeans_max_iterations": int,
        "community_seed": int,
        "community_size_floor": int,
        "embedding_dim": int,
        "threads": int,
        "synth_seed": int,
        "morph_across_gaps": lambda v: v.lower() in ("1", "true", "yes"),
        "k_list": lambda v: [int(x) for x in v.replace(",", " ").split()],
    }
    for key, value in values.items():
        if not hasattr(cfg, key):
            raise ConfigurationError(f"unknown config key {key!r}")
        setattr(cfg, key, casts.get(key, str)(value))
    return cfg


# ---------------------------------------------------------------------------
# manifest / caching


def _hash_file(path: Path, h: "hashlib._Hash") -> None:
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)


def _stage_hash(input_files: list[Path], config_subset: dict) -> str:
    h = hashlib.sha256()
    h.update(json.dumps(config_subset, sort_keys=True, default=str).encode())
    for path in input_files:
        h.update(str(path.name).encode())
        _hash_file(path, h)
    return h.hexdigest()


class Workspace:
    """Output directory plus the stage manifest used for up-to-date checks."""

    def __init__(self, out_dir: str | Path) -> None:
        self.root = Path(out_dir)
        self.root.mkdir(parents=True, exist_ok=True)
        self.manifest_path = self.root / "manifest.json"
        if self.manifest_path.exists():
            self.manifest = json.loads(self.manifest_path.read_text())
        else:
            self.manifest = {}

    def path(self, name: str) -> Path:
        return self.root / name

    def require(self, name: str, produced_by: str) -> Path:
        path = self.root / name
        if not path.exists():
            raise PrerequisiteError(f"missing artifact {name!r}; run the '{produced_by}' stage first")
        return path

    def up_to_date(self, stage: str, digest: str, outputs: list[str]) -> bool:
        entry = self.manifest.get(stage)
        if not entry or entry.get("hash") != digest:
            return False
        return all((self.root / name).exists() for name in entry.get("outputs", outputs))

    def record(self, stage: str, digest: str, outputs: list[str]) -> None:
        self.manifest[stage] = {"hash": digest, "outputs": outputs}
        self.manifest_path.write_text(json.dumps(self.manifest, indent=2, sort_keys=True) + "\n")


def write_resolved_config(ws: Workspace, cfg: PipelineConfig) -> None:
    ws.path("resolved_config.json").write_text(
        json.dumps(asdict(cfg), indent=2, sort_keys=True) + "\n"
    )


# ---------------------------------------------------------------------------
# shared readers


def _read_meta(ws: Workspace) -> dict:
    return json.loads(ws.require("ingest_meta.json", "ingest").read_text())


def _slotting_from_meta(meta: dict) -> tuple[Slotting, int]:
    epoch = datetime.fromisoformat(meta["epoch_start"])
    return Slotting(epoch, timedelta(seconds=meta["slot_width_seconds"])), meta["n_slots"]


def _read_retained_tweets(ws: Workspace) -> list[Tweet]:
    tweets = []
    with open(ws.require("tweets_retained.jsonl", "ingest"), encoding="utf-8") as fh:
        for line in fh:
            rec = json.loads(line)
            tweets.append(
                Tweet(
                    rec["seq"],
                    rec["author"],
                    datetime.fromisoformat(rec["ts"]),
                    rec["text"],
                    corpus.extract_hashtags(rec["text"]),
                )
            )
    return tweets


def _read_retained_hashtags(ws: Workspace) -> list[str]:
    path = ws.require("hashtag_counts.csv", "ingest")
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        return [row[0] for row in reader]


def _read_embeddings(ws: Workspace) -> dict[str, np.ndarray]:
    path = ws.require("embeddings.tsv", "embed")
    out: dict[str, np.ndarray] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            tag, comps = line.rstrip("\n").split("\t")
            out[tag] = np.asarray([float(x) for x in comps.split(" ")], dtype=np.float64)
    return out


def _read_topics(ws: Workspace, k: int) -> dict[str, set[str]]:
    path = ws.require(f"topics_k{k}.csv", "split")
    topics: dict[str, set[str]] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for topic_id, hashtag, _first, _last in reader:
            topics.setdefault(topic_id, set()).add(hashtag)
    return topics


def _read_partition(ws: Workspace) -> Partition:
    path = ws.require("partition.csv", "communities")
    assignment: dict[str, int] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for user, cid in reader:
            assignment[user] = int(cid)
    return Partition(assignment)


def _date_window(cfg: PipelineConfig) -> tuple[datetime | None, datetime | None]:
    start = end = None
    if cfg.date_start:
        start = datetime.strptime(cfg.date_start, "%Y-%m-%d").replace(tzinfo=timezone.utc)
    if cfg.date_end:
        end = datetime.strptime(cfg.date_end, "%Y-%m-%d").replace(tzinfo=timezone.utc) + timedelta(days=1)
    return start, end


# ---------------------------------------------------------------------------
# stages


def stage_ingest(ws: Workspace, cfg: PipelineConfig, force: bool = False) -> bool:
    tweets_path = Path(cfg.tweets_path)
    if not tweets_path.exists():
        raise PrerequisiteError(f"tweet file not found: {tweets_path}")
    subset = {
        "min_count": cfg.min_count,
        "max_count": cfg.max_count,
        "date_start": cfg.date_start,
        "date_end": cfg.date_end,
        "slot_width_days": cfg.slot_width_days,
    }
    digest = _stage_hash([tweets_path], subset)
    outputs = ["tweets_retained.jsonl", "hashtag_counts.csv", "retained_users.txt", "ingest_meta.json"]
    if not force and ws.up_to_date("ingest", digest, outputs):
        print("ingest: up-to-date")
        return False

    start, end = _date_window(cfg)

    def in_window(t: Tweet) -> bool:
        return (start is None or t.timestamp >= start) and (end is None or t.timestamp < end)

    # pass 1: hashtag counts and the time extent
    stats = ParseStats()
    counts: dict[str, int] = {}
    total_in_window = 0
    t_min = t_max = None
    for tweet in corpus.read_tweets(tweets_path, stats):
        if not in_window(tweet):
            continue
        total_in_window += 1
        t_min = tweet.timestamp if t_min is None else min(t_min, tweet.timestamp)
        t_max = tweet.timestamp if t_max is None else max(t_max, tweet.timestamp)
        for tag in tweet.hashtags:
            counts[tag] = counts.get(tag, 0) + 1
    if total_in_window == 0:
        raise ConfigurationError("no parseable tweets in the configured window")

    retained = corpus.filter_hashtags(counts, cfg.min_count, cfg.max_count)
    epoch = corpus.default_epoch([t_min])
    width = cfg.slot_width()
    n_slots = corpus.assign_timeslot(t_max, epoch, width) + 1

    # pass 2: keep tweets that use a retained hashtag
    users: set[str] = set()
    retained_tweets = 0
    with open(ws.path("tweets_retained.jsonl"), "w", encoding="utf-8") as out:
        for tweet in corpus.read_tweets(tweets_path):
            if not in_window(tweet) or not any(h in retained for h in tweet.hashtags):
                continue
            retained_tweets += 1
            users.add(tweet.author)
            out.write(
                json.dumps(
                    {
                        "seq": tweet.tweet_seq,
                        "author": tweet.author,
                        "ts": tweet.timestamp.isoformat(),
                        "text": tweet.text,
                    },
                    sort_keys=True,
                )
                + "\n"
            )

    with open(ws.path("hashtag_counts.csv"), "w", encoding="utf-8", newline="") as out:
        writer = csv.writer(out)
        writer.writerow(["hashtag", "count"])
        for tag in sorted(retained):
            writer.writerow([tag, counts[tag]])
    ws.path("retained_users.txt").write_text(
        "".join(u + "\n" for u in sorted(users)), encoding="utf-8"
    )
    meta = {
        "total_tweets": stats.parsed,
        "malformed_skipped": stats.malformed_skipped,
        "tweets_in_window": total_in_window,
        "retained_tweets": retained_tweets,
        "retained_hashtags": len(retained),
        "retained_users": len(users),
        "avg_tweets_per_user": round(retained_tweets / len(users), 4) if users else 0.0,
        "epoch_start": epoch.isoformat(),
        "slot_width_seconds": int(width.total_seconds()),
        "n_slots": n_slots,
    }
    ws.path("ingest_meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    ws.record("ingest", digest, outputs)
    print(f"ingest: {retained_tweets} tweets, {len(retained)} hashtags, {len(users)} users")
    return True


def stage_embed(ws: Workspace, cfg: PipelineConfig, force: bool = False) -> bool:
    lexicon_path = Path(cfg.lexicon_path)
    if not lexicon_path.exists():
        raise PrerequisiteError(f"lexicon file not found: {lexicon_path}")
    tweets_file = ws.require("tweets_retained.jsonl", "ingest")
    counts_file = ws.require("hashtag_counts.csv", "ingest")
    subset = {"embedding_dim": cfg.embedding_dim, "divisor_mode": cfg.divisor_mode}
    digest = _stage_hash([tweets_file, counts_file, lexicon_path], subset)
    outputs = ["embeddings.tsv", "no_coverage.txt", "embed_meta.json"]
    if not force and ws.up_to_date("embed", digest, outputs):
        print("embed: up-to-date")
        return False

    with corpus.open_maybe_gzip(lexicon_path) as fh:
        lexicon = embedding.load_lexicon(fh, cfg.embedding_dim)
    retained = set(_read_retained_hashtags(ws))

    # stream the corpus once, accumulating per-hashtag sums: every tweet that
    # contains the hashtag contributes its covered token vectors to the mean
    sums = {h: np.zeros(cfg.embedding_dim) for h in retained}
    covered = dict.fromkeys(retained, 0)
    total_tokens = dict.fromkeys(retained, 0)
    for tweet in _read_retained_tweets(ws):
        tokens = embedding.tokenize(tweet.text)
        vecs = [lexicon.vectors[t] for t in tokens if t in lexicon.vectors]
        tweet_sum = np.sum(vecs, axis=0) if vecs else None
        for tag in set(tweet.hashtags) & retained:
            total_tokens[tag] += len(tokens)
            if tweet_sum is not None:
                sums[tag] += tweet_sum
                covered[tag] += len(vecs)

    no_coverage = sorted(h for h in retained if covered[h] == 0)
    with open(ws.path("embeddings.tsv"), "w", encoding="utf-8") as out:
        for tag in sorted(retained):
            if covered[tag] == 0:
                continue
            denom = covered[tag] if cfg.divisor_mode == "covered" else total_tokens[tag]
            vec = sums[tag] / denom
            out.write(tag + "\t" + " ".join(f"{v:.10g}" for v in vec) + "\n")
    ws.path("no_coverage.txt").write_text("".join(h + "\n" for h in no_coverage), encoding="utf-8")
    meta = {
        "lexicon_words": len(lexicon),
        "lexicon_skipped_lines": lexicon.skipped_lines,
        "lexicon_duplicate_words": lexicon.duplicate_words,
        "embedded_hashtags": len(retained) - len(no_coverage),
        "no_coverage_hashtags": len(no_coverage),
    }
    ws.path("embed_meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    ws.record("embed", digest, outputs)
    print(f"embed: {meta['embedded_hashtags']} hashtags embedded, {len(no_coverage)} uncovered")
    return True


def stage_cluster(ws: Workspace, cfg: PipelineConfig, force: bool = False) -> bool:
    emb_file = ws.require("embeddings.tsv", "embed")
    subset = {
        "k_list": cfg.k_list,
        "seed": cfg.kmeans_seed,
        "max_iterations": cfg.kmeans_max_iterations,
        "tolerance": cfg.kmeans_tolerance,
    }
    digest = _stage_hash([emb_file], subset)
    outputs = [f"clusters_k{k}.csv" for k in cfg.k_list] + ["kmeans_meta.json"]
    if not force and ws.up_to_date("cluster", digest, outputs):
        print("cluster: up-to-date")
        return False

    embeddings = _read_embeddings(ws)
    traces: dict[str, list[float]] = {}
    failures: dict[str, str] = {}
    produced: list[str] = []
    for k in cfg.k_list:
        config = KMeansConfig(k, cfg.kmeans_seed, cfg.kmeans_max_iterations, cfg.kmeans_tolerance)
        try:
            result = kmeans_cluster(embeddings, config)
        except ConfigurationError as exc:
            failures[str(k)] = str(exc)
            continue
        name = f"clusters_k{k}.csv"
        with open(ws.path(name), "w", encoding="utf-8", newline="") as out:
            writer = csv.writer(out)
            writer.writerow(["k", "cluster_id", "hashtag"])
            for tag in sorted(result.assignment):
                writer.writerow([k, result.assignment[tag], tag])
        traces[str(k)] = result.objective_trace
        produced.append(name)
    meta = {"objective_traces": traces, "failures": failures}
    ws.path("kmeans_meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    ws.record("cluster", digest, produced + ["kmeans_meta.json"])
    print(f"cluster: {len(produced)} clusterings, {len(failures)} failed k values")
    return True


def _load_clusters(ws: Workspace, k: int) -> list[SemanticCluster]:
    path = ws.require(f"clusters_k{k}.csv", "cluster")
    members: dict[int, set[str]] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for _k, cid, tag in reader:
            members.setdefault(int(cid), set()).add(tag)
    return [SemanticCluster(cid, tags, np.zeros(0)) for cid, tags in sorted(members.items())]


def stage_split(ws: Workspace, cfg: PipelineConfig, force: bool = False) -> bool:
    k = cfg.chosen_k()
    clusters_file = ws.require(f"clusters_k{k}.csv", "cluster")
    tweets_file = ws.require("tweets_retained.jsonl", "ingest")
    subset = {"k": k, "gap_threshold_slots": cfg.gap_threshold_slots}
    digest = _stage_hash([clusters_file, tweets_file], subset)
    outputs = [f"topics_k{k}.csv"]
    if not force and ws.up_to_date("split", digest, outputs):
        print("split: up-to-date")
        return False

    slotting, n_slots = _slotting_from_meta(_read_meta(ws))
    clusters = _load_clusters(ws, k)
    all_tags = {tag for c in clusters for tag in c.members}
    series = build_all_series(all_tags, _read_retained_tweets(ws), slotting, n_slots)

    rows = []
    for cluster in clusters:
        for topic in split_semantic_cluster(cluster, series, cfg.gap_threshold_slots, k_label=k):
            for tag in sorted(topic.members):
                act = active_slots(series[tag])
                first = int(act[0]) if act.size else -1
                last = int(act[-1]) if act.size else -1
                rows.append([topic.topic_id, tag, first, last])
    rows.sort()
    with open(ws.path(f"topics_k{k}.csv"), "w", encoding="utf-8", newline="") as out:
        writer = csv.writer(out)
        writer.writerow(["topic_id", "hashtag", "first_active_slot", "last_active_slot"])
        writer.writerows(rows)
    ws.record("split", digest, outputs)
    print(f"split: {len({r[0] for r in rows})} topics from {len(clusters)} semantic clusters")
    return True


def stage_communities(ws: Workspace, cfg: PipelineConfig, force: bool = False) -> bool:
    edges_path = Path(cfg.edges_path)
    if not edges_path.exists():
        raise PrerequisiteError(f"edge file not found: {edges_path}")
    users_file = ws.require("retained_users.txt", "ingest")
    subset = {"seed": cfg.community_seed}
    digest = _stage_hash([edges_path, users_file], subset)
    outputs = ["partition.csv", "community_summary.json"]
    if not force and ws.up_to_date("communities", digest, outputs):
        print("communities: up-to-date")
        return False

    retained_users = set(users_file.read_text(encoding="utf-8").split())
    stats = ParseStats()
    with corpus.open_maybe_gzip(edges_path) as fh:
        graph = corpus.load_social_graph(fh, retained_users, stats)
    partition = detect_communities(graph, seed=cfg.community_seed)

    with open(ws.path("partition.csv"), "w", encoding="utf-8", newline="") as out:
        writer = csv.writer(out)
        writer.writerow(["user", "community_id"])
        for user in sorted(partition.assignment):
            writer.writerow([user, partition.assignment[user]])
    sizes = partition.sizes()
    histogram: dict[str, int] = {}
    for size in sizes.values():
        histogram[str(size)] = histogram.get(str(size), 0) + 1
    summary = {
        "community_count": partition.community_count,
        "size_histogram": histogram,
        "final_modularity": modularity(graph, partition.assignment) if graph.edge_count else None,
        "malformed_edge_lines": stats.malformed_skipped,
        "graph_nodes": graph.node_count,
        "graph_edges": graph.edge_count,
    }
    ws.path("community_summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    ws.record("communities", digest, outputs)
    print(f"communities: {partition.community_count} communities, Q={summary['final_modularity']}")
    return True


def stage_timelines(ws: Workspace, cfg: PipelineConfig, force: bool = False) -> bool:
    k = cfg.chosen_k()
    topics_file = ws.require(f"topics_k{k}.csv", "split")
    partition_file = ws.require("partition.csv", "communities")
    tweets_file = ws.require("tweets_retained.jsonl", "ingest")
    subset = {"k": k, "community_size_floor": cfg.community_size_floor}
    digest = _stage_hash([topics_file, partition_file, tweets_file], subset)
    outputs = ["hashtag_timeline.csv", "topic_timeline.csv"]
    if not force and ws.up_to_date("timelines", digest, outputs):
        print("timelines: up-to-date")
        return False

    slotting, n_slots = _slotting_from_meta(_read_meta(ws))
    topics = _read_topics(ws, k)
    from topiclife.temporal import TopicCluster

    topic_objs = [TopicCluster(tid, members, -1) for tid, members in sorted(topics.items())]
    partition = _read_partition(ws)
    timeline = build_timeline(
        _read_retained_tweets(ws),
        partition,
        topic_objs,
        slotting,
        n_slots,
        cfg.community_size_floor,
    )

    with open(ws.path("hashtag_timeline.csv"), "w", encoding="utf-8", newline="") as out:
        writer = csv.writer(out)
        writer.writerow(["scope", "slot", "hashtag", "topic_id", "count"])
        for (scope, slot, tag) in sorted(timeline.counts):
            writer.writerow([scope, slot, tag, timeline.topic_of[tag], timeline.counts[(scope, slot, tag)]])
    with open(ws.path("topic_timeline.csv"), "w", encoding="utf-8", newline="") as out:
        writer = csv.writer(out)
        writer.writerow(["scope", "slot", "topic_id", "intensity"])
        for scope in sorted(timeline.scopes):
            for slot in range(n_slots):
                for tid in sorted(topics):
                    intensity = timeline.topic_intensity(tid, scope, slot)
                    if intensity:
                        writer.writerow([scope, slot, tid, intensity])
    ws.record("timelines", digest, outputs)
    print(f"timelines: {len(timeline.counts)} usage records over {len(timeline.scopes)} scopes")
    return True


def load_timeline(ws: Workspace, cfg: PipelineConfig) -> UsageTimeline:
    """Rebuild a UsageTimeline from the timelines stage artifacts."""
    k = cfg.chosen_k()
    topics = _read_topics(ws, k)
    _, n_slots = _slotting_from_meta(_read_meta(ws))
    counts: dict[tuple[str, int, str], int] = {}
    scopes: set[str] = set()
    with open(ws.require("hashtag_timeline.csv", "timelines"), encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for scope, slot, tag, _tid, count in reader:
            counts[(scope, int(slot), tag)] = int(count)
            scopes.add(scope)
    scopes.add("overall")
    # communities that never used a tracked hashtag still form scopes
    with open(ws.require("topic_timeline.csv", "timelines"), encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for scope, *_rest in reader:
            scopes.add(scope)
    return UsageTimeline(counts, topics, n_slots, scopes)


def stage_report(ws: Workspace, cfg: PipelineConfig, force: bool = False) -> bool:
    k = cfg.chosen_k()
    inputs = [
        ws.require("hashtag_timeline.csv", "timelines"),
        ws.require("topic_timeline.csv", "timelines"),
        ws.require(f"topics_k{k}.csv", "split"),
    ]
    subset = {"k": k, "morph_across_gaps": cfg.morph_across_gaps}
    digest = _stage_hash(inputs, subset)
    outputs = ["report.json", "events.json"]
    if not force and ws.up_to_date("report", digest, outputs):
        print("report: up-to-date")
        return False

    timeline = load_timeline(ws, cfg)
    report = lifecycle_report(timeline, across_gaps=cfg.morph_across_gaps)
    morphs = []
    deaths = []
    for tid, entry in report["topics"].items():
        for scope, data in entry["scopes"].items():
            morphs.extend(data["morphs"])
            if data["status"] == "dead":
                deaths.append({"scope": scope, "topic_id": tid, "death_slot": data["death_slot"]})
    morphs.sort(key=lambda e: (e["scope"], e["topic_id"], e["slot_from"]))
    deaths.sort(key=lambda e: (e["scope"], e["topic_id"]))
    events = {"morph_events": morphs, "death_events": deaths}
    ws.path("events.json").write_text(json.dumps(events, indent=2, sort_keys=True) + "\n")
    ws.path("report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    ws.record("report", digest, outputs)
    print(f"report: {len(morphs)} morph events, {len(deaths)} death events")
    return True


def stage_synth(ws: Workspace, cfg: PipelineConfig, force: bool = False) -> bool:
    out = ws.path("synth")
    spec = synth.default_spec(seed=cfg.synth_seed)
    synth.generate(spec, out)
    print(f"synth: corpus written to {out}")
    return True


def run_stage(stage: str, cfg: PipelineConfig, force: bool = False) -> None:
    cfg.validate(stage)
    ws = Workspace(cfg.out_dir)
    write_resolved_config(ws, cfg)
    runners = {
        "ingest": stage_ingest,
        "embed": stage_embed,
        "cluster": stage_cluster,
        "split": stage_split,
        "communities": stage_communities,
        "timelines": stage_timelines,
        "report": stage_report,
        "synth": stage_synth,
    }
    if stage == "all":
        for name in STAGES:
            runners[name](ws, cfg, force)
    else:
        runners[stage](ws, cfg, force)
