"""Command-line entry point for the topic lifecycle pipeline.

Subcommands run individual stages (ingest, embed, cluster, split,
communities, timelines, report, synth) or the whole chain (all).  Options
can come from a flat key=value config file, with flags taking precedence.
Exit codes: 0 success, 1 invalid configuration, 2 missing prerequisite
artifact, 3 I/O failure, 4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import sys

from topiclife.errors import ConfigurationError, PrerequisiteError
from topiclife.pipeline import (
    DEFAULT_K_LIST,
    PipelineConfig,
    config_from_mapping,
    load_config_file,
    run_stage,
)

STAGE_CHOICES = [
    "ingest",
    "embed",
    "cluster",
    "split",
    "communities",
    "timelines",
    "report",
    "synth",
    "all",
]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topiclife",
        description="Hashtag topic clustering and per-community topic lifecycle analysis.",
    )
    parser.add_argument("stage", choices=STAGE_CHOICES, help="pipeline stage to run")
    parser.add_argument("--config", help="flat key=value config file; flags override it")
    parser.add_argument("--tweets", dest="tweets_path", help="tweet corpus file (3-line records, plain or .gz)")
    parser.add_argument("--edges", dest="edges_path", help="follower edge file (user<TAB>follower)")
    parser.add_argument("--lexicon", dest="lexicon_path", help="word-vector file (word c1 ... cd per line)")
    parser.add_argument("--out", dest="out_dir", help="output directory for artifacts (default: out)")
    parser.add_argument("--date-start", dest="date_start", help="first day to ingest, YYYY-MM-DD (UTC)")
    parser.add_argument("--date-end", dest="date_end", help="last day to ingest, YYYY-MM-DD (UTC)")
    parser.add_argument("--slot-width-days", dest="slot_width_days", type=float, help="timeslot width in days (default 1)")
    parser.add_argument("--min-count", dest="min_count", type=int, help="minimum hashtag occurrences (default 40)")
    parser.add_argument("--max-count", dest="max_count", type=int, help="maximum hashtag occurrences (default 1000)")
    parser.add_argument(
        "--k-list",
        dest="k_list",
        help=f"comma-separated k values for the sweep (default {','.join(map(str, DEFAULT_K_LIST))})",
    )
    parser.add_argument("--k", type=int, help="the single k used for lifecycle stages (split/timelines/report)")
    parser.add_argument("--gap-threshold", dest="gap_threshold_slots", type=int, help="max slot gap for temporal relatedness (default 2)")
    parser.add_argument("--kmeans-seed", dest="kmeans_seed", type=int, help="k-means PRNG seed (default 0)")
    parser.add_argument("--kmeans-max-iterations", dest="kmeans_max_iterations", type=int)
    parser.add_argument("--community-seed", dest="community_seed", type=int, help="Louvain PRNG seed (default 0)")
    parser.add_argument("--size-floor", dest="community_size_floor", type=int, help="min community size for per-community timelines (default 10)")
    parser.add_argument("--divisor", dest="divisor_mode", choices=["covered", "all"], help="embedding average divisor: covered token instances (default) or all tokens")
    parser.add_argument("--morph-across-gaps", dest="morph_across_gaps", action="store_true", default=None, help="compare dominants across zero-usage gaps when detecting morphs")
    parser.add_argument("--embedding-dim", dest="embedding_dim", type=int, help="word-vector dimensionality (default 200)")
    parser.add_argument("--threads", type=int, help="worker cap (stages currently run single-threaded)")
    parser.add_argument("--synth-seed", dest="synth_seed", type=int, help="seed for the synth stage (default 0)")
    parser.add_argument("--force", action="store_true", help="rerun stages even when up-to-date")
    return parser


def make_config(args: argparse.Namespace) -> PipelineConfig:
    if args.config:
        cfg = config_from_mapping(load_config_file(args.config))
    else:
        cfg = PipelineConfig()
    for key in vars(PipelineConfig()):
        value = getattr(args, key, None)
        if value is not None:
            if key == "k_list" and isinstance(value, str):
                value = [int(x) for x in value.replace(",", " ").split()]
            setattr(cfg, key, value)
    return cfg


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = make_config(args)
        run_stage(args.stage, cfg, force=args.force)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except PrerequisiteError as exc:
        print(f"prerequisite error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # noqa: BLE001 - invariant violations map to exit code 4
        print(f"internal error: {exc}", file=sys.stderr)
        return 4
    return 0


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
