"""Walk through hashtag embedding and spherical k-means on a toy vocabulary.

Builds a tiny word-vector lexicon by hand, embeds a few fake hashtag
documents, and clusters them under cosine similarity, printing the objective
trace so the monotone convergence is visible.

Run: python3 demos/demo_clustering.py
"""

import numpy as np

from topiclife import (
    EmbeddingLexicon,
    HashtagDocument,
    KMeansConfig,
    cosine_similarity,
    embed_hashtag,
    kmeans_cluster,
)


def main() -> None:
    # three word groups pointing in three rough directions
    words = {
        "match": [1.0, 0.1, 0.0],
        "racket": [0.9, 0.2, 0.1],
        "serve": [1.1, 0.0, 0.1],
        "ballot": [0.1, 1.0, 0.0],
        "vote": [0.0, 0.9, 0.2],
        "poll": [0.2, 1.1, 0.1],
        "guitar": [0.0, 0.1, 1.0],
        "chord": [0.1, 0.0, 0.9],
    }
    lexicon = EmbeddingLexicon(3, {w: np.asarray(v) for w, v in words.items()})

    docs = {
        "wimbledon": ["match", "racket", "serve", "serve"],
        "usopen": ["serve", "match", "match"],
        "election": ["ballot", "vote", "poll"],
        "runoff": ["vote", "poll"],
        "unplugged": ["guitar", "chord", "chord"],
    }
    embeddings = {}
    for tag, tokens in docs.items():
        emb = embed_hashtag(HashtagDocument(tag, tokens), lexicon)
        embeddings[tag] = emb.vector
        print(f"{tag:>10}: {np.round(emb.vector, 3)}")

    print("\npairwise cosine similarities:")
    tags = sorted(embeddings)
    for i, a in enumerate(tags):
        for b in tags[i + 1 :]:
            print(f"  {a} ~ {b}: {cosine_similarity(embeddings[a], embeddings[b]):.3f}")

    result = kmeans_cluster(embeddings, KMeansConfig(k=3, seed=0))
    print("\nobjective trace:", [round(v, 4) for v in result.objective_trace])
    for cluster in result.clusters:
        print(f"cluster {cluster.cluster_id}: {sorted(cluster.members)}")


if __name__ == "__main__":
    main()
