"""Node importance scores and the target vector steering the optimiser.

Four structural properties (betweenness, degree, intra- and inter-community
degree) are rank-normalised into [0, 1] and mixed with convex weights. The
combined score decides which candidate edge flips look promising: drop ties
to important nodes inside the target's community, add ties to important
nodes outside it.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .detectors import Partition
from .errors import ConfigError
from .graph import GraphLike

PROPERTY_NAMES = ("betweenness", "degree", "intra_degree", "inter_degree")

DEFAULT_WEIGHTS = (0.25, 0.25, 0.25, 0.25)


def betweenness(g: GraphLike) -> np.ndarray:
    """Shortest-path betweenness, unnormalised, each node pair counted once."""
    n = g.n
    bc = np.zeros(n)
    for s in range(n):
        stack: list[int] = []
        pred: list[list[int]] = [[] for _ in range(n)]
        sigma = np.zeros(n)
        sigma[s] = 1.0
        dist = np.full(n, -1)
        dist[s] = 0
        queue = deque((s,))
        while queue:
            v = queue.popleft()
            stack.append(v)
            for w in g.neighbors(v):
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    pred[w].append(v)
        delta = np.zeros(n)
        while stack:
            w = stack.pop()
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in pred[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                bc[w] += delta[w]
    return bc / 2.0


def pagerank(
    g: GraphLike, damping: float = 0.85, tol: float = 1e-10, max_iter: int = 5000
) -> np.ndarray:
    """Power-iteration PageRank with uniform teleport; sums to 1."""
    n = g.n
    if n == 0:
        return np.zeros(0)
    deg = np.array([g.degree(v) for v in range(n)], dtype=float)
    x = np.full(n, 1.0 / n)
    base = (1.0 - damping) / n
    dangling = deg == 0
    nonzero = ~dangling
    inv_deg = np.zeros(n)
    inv_deg[nonzero] = 1.0 / deg[nonzero]
    for _ in range(max_iter):
        share = x * inv_deg
        nxt = np.full(n, base + damping * x[dangling].sum() / n)
        for v in range(n):
            nbrs = g.neighbors(v)
            if nbrs:
                nxt[v] += damping * share[list(nbrs)].sum()
        if np.abs(nxt - x).sum() < tol:
            return nxt
        x = nxt
    raise ArithmeticError(f"pagerank failed to converge within {max_iter} iterations")


def community_degrees(g: GraphLike, partition: Partition) -> tuple[np.ndarray, np.ndarray]:
    """Per-node (intra, inter) degree split relative to a partition."""
    n = g.n
    intra = np.zeros(n, dtype=np.int64)
    inter = np.zeros(n, dtype=np.int64)
    for v in range(n):
        cv = partition.community_of(v)
        for w in g.neighbors(v):
            if partition.community_of(w) == cv:
                intra[v] += 1
            else:
                inter[v] += 1
    return intra, inter


def rank_scores(values: np.ndarray) -> np.ndarray:
    """Ranks 1..n, ascending by value, equal values ordered by node id."""
    values = np.asarray(values, dtype=float)
    order = np.lexsort((np.arange(values.size), values))
    ranks = np.empty(values.size, dtype=np.int64)
    ranks[order] = np.arange(1, values.size + 1)
    return ranks


def _check_weights(weights) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    if w.shape != (len(PROPERTY_NAMES),):
        raise ConfigError(f"expected {len(PROPERTY_NAMES)} property weights, got shape {w.shape}")
    if (w < 0).any():
        raise ConfigError("property weights must be non-negative")
    if abs(w.sum() - 1.0) > 1e-9:
        raise ConfigError(f"property weights must sum to 1, got {float(w.sum()):g}")
    return w


@dataclass(frozen=True)
class StructuralScores:
    """Rank-normalised property scores and their weighted combination."""

    properties: dict[str, np.ndarray]
    weights: np.ndarray
    combined: np.ndarray


def structural_scores(
    g: GraphLike, partition: Partition, weights=DEFAULT_WEIGHTS
) -> StructuralScores:
    """Combine the four structural properties into one score per node."""
    w = _check_weights(weights)
    intra, inter = community_degrees(g, partition)
    raw = {
        "betweenness": betweenness(g),
        "degree": np.array([g.degree(v) for v in range(g.n)], dtype=float),
        "intra_degree": intra.astype(float),
        "inter_degree": inter.astype(float),
    }
    n = g.n
    combined = np.zeros(n)
    normalised: dict[str, np.ndarray] = {}
    for i, name in enumerate(PROPERTY_NAMES):
        if n > 1:
            score = (rank_scores(raw[name]) - 1) / (n - 1)
        else:
            score = np.zeros(n)
        normalised[name] = score
        combined += w[i] * score
    return StructuralScores(properties=normalised, weights=w, combined=combined)


def promising_actions(
    g: GraphLike,
    u: int,
    partition: Partition,
    scores: StructuralScores | None = None,
    weights=DEFAULT_WEIGHTS,
    complement: bool = False,
) -> np.ndarray:
    """Target connectivity vector for node u in [0, 1]^n.

    Inside u's community the entry falls with node importance (prefer
    dropping heavy members); outside it rises with importance (prefer
    linking to heavy outsiders). `complement=True` ignores importance and
    targets the plain bitwise complement of u's row instead.
    """
    if complement:
        bits = g.adjacency_vector(u).bits
        tgt = 1.0 - bits.astype(float)
        tgt[u] = 0.5
        return tgt
    if scores is None:
        scores = structural_scores(g, partition, weights)
    s = scores.combined
    members = partition.community_members(u)
    tgt = (1.0 + s) / 2.0
    idx = list(members)
    tgt[idx] = (1.0 - s[idx]) / 2.0
    tgt[u] = 0.5
    return tgt
