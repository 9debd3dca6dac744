"""Topic lifecycle analytics over tweet corpora and follower graphs.

Pipeline: ingest tweets and a follower graph, embed hashtags by averaging
pretrained word vectors over their tweet documents, cluster the embeddings
(spherical k-means), split clusters by temporal co-occurrence into topics,
detect modularity communities, and report per-community topic lifecycles
(dominant hashtags, morph events, topic death).
"""

from topiclife.corpus import (
    Tweet,
    Slotting,
    SocialGraph,
    extract_hashtags,
    parse_tweet_stream,
    count_hashtag_usage,
    filter_hashtags,
    assign_timeslot,
    load_social_graph,
)
from topiclife.embedding import (
    EmbeddingLexicon,
    HashtagDocument,
    HashtagEmbedding,
    load_lexicon,
    build_document,
    embed_hashtag,
    cosine_similarity,
)
from topiclife.clustering import KMeansConfig, SemanticCluster, kmeans_cluster, sweep_k
from topiclife.temporal import (
    TopicCluster,
    build_usage_series,
    pairwise_related,
    temporal_components,
    split_semantic_cluster,
)
from topiclife.community import Partition, modularity, detect_communities, community_of
from topiclife.timeline import (
    UsageTimeline,
    MorphEvent,
    TopicFate,
    build_timeline,
    lifecycle_report,
)

__version__ = "0.1.0"
