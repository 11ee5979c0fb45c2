"""Foreground/background cluster identification.

Each cluster is summarized by the average cosine similarity of its members
to their mean vector; the cluster with the larger average is labeled
Background. Rationale: background seconds collapse onto a null-like
embedding region and sit tighter around their centroid than foreground
speech does. The rule is applied as an empirical criterion, not re-derived;
both averages are reported so a failure of the assumption is visible.

The centroid is always the arithmetic mean, including for K-Medoids
clusters, which keeps the rule method-agnostic.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .clustering import ClusterAssignment
from .errors import EmptyCluster, NotBinary
from .store import BinaryLabel, ZERO_NORM_EPS

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ClusterSummary:
    cluster_index: int
    centroid: np.ndarray
    mean_similarity: float  # average member-to-centroid cosine
    size: int


def summarize_cluster(members: np.ndarray, cluster_index: int = 0) -> ClusterSummary:
    """Mean vector and average member-to-centroid cosine for one cluster."""
    members = np.asarray(members, dtype=np.float64)
    if members.ndim != 2 or members.shape[0] == 0:
        raise EmptyCluster(f"cluster {cluster_index} has no members")
    centroid = members.mean(axis=0)
    c_norm = float(np.linalg.norm(centroid))
    norms = np.linalg.norm(members, axis=1)
    if c_norm < ZERO_NORM_EPS:
        sims = np.zeros(len(members))
    else:
        safe = np.where(norms < ZERO_NORM_EPS, 1.0, norms)
        sims = (members @ centroid) / (safe * c_norm)
        sims[norms < ZERO_NORM_EPS] = 0.0  # zero-vector cosine convention
    mean_sim = float(np.clip(sims, -1.0, 1.0).mean())
    return ClusterSummary(cluster_index=cluster_index, centroid=centroid,
                          mean_similarity=mean_sim, size=len(members))


@dataclass(frozen=True)
class LabelingResult:
    predictions: list[BinaryLabel]  # one per instance, row order
    foreground_cluster: int
    background_cluster: int
    summaries: tuple[ClusterSummary, ClusterSummary]  # indexed by cluster
    tie_broken: bool = False


def assign_fg_bg(assignment: ClusterAssignment, matrix: np.ndarray) -> LabelingResult:
    """Label the tighter of the two clusters Background, the other Foreground.

    An exact tie on the average similarity goes to the larger cluster
    (background dominates the corpus); equal sizes fall back to the lower
    cluster index. Ties are logged because they signal degenerate input.
    """
    if assignment.k != 2:
        raise NotBinary(f"fg/bg labeling needs k=2, got k={assignment.k}")
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.shape[0] != len(assignment.labels):
        raise NotBinary(
            f"{matrix.shape[0]} embedding rows vs {len(assignment.labels)} labels")

    summaries = tuple(
        summarize_cluster(matrix[assignment.labels == c], cluster_index=c)
        for c in (0, 1)
    )
    s0, s1 = summaries[0].mean_similarity, summaries[1].mean_similarity
    tie_broken = False
    if s0 == s1:
        tie_broken = True
        if summaries[0].size != summaries[1].size:
            background = 0 if summaries[0].size > summaries[1].size else 1
        else:
            background = 0
        log.warning("mean-similarity tie (%.6f): labeling cluster %d Background "
                    "by size rule", s0, background)
    else:
        background = 0 if s0 > s1 else 1
    foreground = 1 - background

    predictions = [
        BinaryLabel.Foreground if lbl == foreground else BinaryLabel.Background
        for lbl in assignment.labels
    ]
    return LabelingResult(predictions=predictions, foreground_cluster=foreground,
                          background_cluster=background, summaries=summaries,
                          tie_broken=tie_broken)
