"""TF-IDF vectorization and k-means clustering for stratified sampling.

Evaluation samples are drawn one per cluster within each instruction
variant, so no single template category dominates a human-rated subset.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .metrics import tokenize
from .seeds import derive_seed

KMEANS_TOL = 1e-4
KMEANS_MAX_ITER = 100
DEFAULT_CLUSTERS = 10


class EmptyCorpus(DataError):
    pass


class KTooLarge(DataError):
    pass


class GroupTooSmall(DataError):
    pass


@dataclass
class TfidfModel:
    vocabulary: dict[str, int]
    idf: np.ndarray
    doc_count: int


@dataclass
class ClusterAssignment:
    k: int
    labels: np.ndarray
    centroids: np.ndarray
    inertia: float
    inertia_history: list[float]


def fit_tfidf(docs) -> TfidfModel:
    """Learn vocabulary and smoothed idf: ln((1+N)/(1+df)) + 1."""
    tokenized = [tokenize(doc) for doc in docs]
    if not any(tokenized):
        raise EmptyCorpus("need at least one non-empty document")
    df: Counter = Counter()
    for tokens in tokenized:
        df.update(set(tokens))
    vocabulary = {token: i for i, token in enumerate(sorted(df))}
    n = len(tokenized)
    idf = np.array(
        [np.log((1 + n) / (1 + df[token])) + 1 for token in vocabulary], dtype=float
    )
    return TfidfModel(vocabulary=vocabulary, idf=idf, doc_count=n)


def transform(model: TfidfModel, doc: str) -> np.ndarray:
    """Raw-count tf x idf, L2-normalized; out-of-vocabulary tokens ignored.
    The result is dense but mostly zeros."""
    vec = np.zeros(len(model.vocabulary))
    for token, count in Counter(tokenize(doc)).items():
        idx = model.vocabulary.get(token)
        if idx is not None:
            vec[idx] = count * model.idf[idx]
    norm = np.linalg.norm(vec)
    return vec / norm if norm > 0 else vec


def transform_all(model: TfidfModel, docs) -> np.ndarray:
    return np.stack([transform(model, doc) for doc in docs])


def _squared_distances(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - centroids[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def _plus_plus_init(points: np.ndarray, k: int, rng: np.random.RandomState) -> np.ndarray:
    centroids = [points[rng.randint(len(points))]]
    for _ in range(1, k):
        d2 = _squared_distances(points, np.stack(centroids)).min(axis=1)
        probs = d2 / d2.sum()
        centroids.append(points[rng.choice(len(points), p=probs)])
    return np.stack(centroids)


def kmeans(vectors, k: int, seed: int = 0) -> ClusterAssignment:
    """Lloyd's algorithm with k-means++ seeding.

    Runs until the largest centroid shift drops below 1e-4 or 100
    iterations; empty clusters are re-seeded from the point farthest from
    its assigned centroid. Deterministic under a fixed seed.
    """
    points = np.asarray(vectors, dtype=float)
    if points.ndim != 2 or len(points) == 0:
        raise ValueError("vectors must be a non-empty 2-D array")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    distinct = len(np.unique(points, axis=0))
    if k > distinct:
        raise KTooLarge(f"k={k} exceeds {distinct} distinct vectors")

    rng = np.random.RandomState(seed % 2**32)
    centroids = _plus_plus_init(points, k, rng)
    history: list[float] = []
    labels = np.zeros(len(points), dtype=int)
    for _ in range(KMEANS_MAX_ITER):
        d2 = _squared_distances(points, centroids)
        labels = d2.argmin(axis=1)

        for cluster in range(k):
            if not (labels == cluster).any():
                own_d2 = d2[np.arange(len(points)), labels]
                farthest = int(own_d2.argmax())
                centroids[cluster] = points[farthest]
                d2 = _squared_distances(points, centroids)
                labels = d2.argmin(axis=1)

        history.append(float(d2[np.arange(len(points)), labels].sum()))
        new_centroids = np.stack(
            [points[labels == cluster].mean(axis=0) for cluster in range(k)]
        )
        shift = float(np.linalg.norm(new_centroids - centroids, axis=1).max())
        centroids = new_centroids
        if shift < KMEANS_TOL:
            break

    d2 = _squared_distances(points, centroids)
    labels = d2.argmin(axis=1)
    inertia = float(d2[np.arange(len(points)), labels].sum())
    return ClusterAssignment(
        k=k, labels=labels, centroids=centroids, inertia=inertia, inertia_history=history
    )


def stratified_sample(
    pairs_by_variant: dict[str, list],
    k: int = DEFAULT_CLUSTERS,
    seed: int = 0,
) -> list:
    """Per variant: TF-IDF the instruction texts, cluster into k groups, and
    draw one pair uniformly from each cluster."""
    sampled = []
    for variant in sorted(pairs_by_variant):
        group = pairs_by_variant[variant]
        if len(group) < k:
            raise GroupTooSmall(
                f"variant {variant!r} has {len(group)} pairs, need at least {k}"
            )
        texts = [pair.instruction_text for pair in group]
        model = fit_tfidf(texts)
        vectors = transform_all(model, texts)
        assignment = kmeans(vectors, k, seed=derive_seed(seed, variant, "kmeans"))
        rng = random.Random(derive_seed(seed, variant, "pick"))
        for cluster in range(k):
            members = [i for i in range(len(group)) if assignment.labels[i] == cluster]
            sampled.append(group[rng.choice(members)])
    return sampled
