"""Heuristic rewiring baselines the gradient attack is compared against.

Every baseline spends the same flip budget (stopping early only when it
runs out of candidates) and is scored by the same similarity criterion as
the optimiser. Ranked choices break ties by the smaller node id, so the
degree, centrality, dice and roam baselines are fully deterministic.
"""

from __future__ import annotations

import time

import numpy as np

from .detectors import DetectorSpec, Partition, detect
from .errors import ConfigError, SingletonCommunityError
from .gradient import HidingConfig, HidingOutcome, dice_similarity
from .graph import EdgeDelta, GraphLike, apply_delta
from .scoring import betweenness

BASELINE_NAMES = ("dice", "roam", "random", "degree", "centrality")


def _prepare(
    g: GraphLike, u: int, detector: DetectorSpec, partition: Partition | None
) -> tuple[Partition, frozenset[int], int]:
    if not 0 <= u < g.n:
        raise ValueError(f"target {u} outside graph with n={g.n}")
    detections = 0
    if partition is None:
        partition = detect(g, detector)
        detections = 1
    reference = partition.community_members(u) - {u}
    if not reference:
        raise SingletonCommunityError(
            f"node {u} forms a singleton community; nothing to hide"
        )
    return partition, reference, detections


def _finalise(
    g: GraphLike,
    u: int,
    detector: DetectorSpec,
    config: HidingConfig,
    deltas: tuple[EdgeDelta, ...],
    partition: Partition,
    reference: frozenset[int],
    detections: int,
    t_start: float,
) -> HidingOutcome:
    g2 = g
    used = 0
    for d in deltas:
        used += d.size
        if d.size:
            g2 = apply_delta(g2, d)
    if used:
        part2 = detect(g2, detector)
        detections += 1
        sim = dice_similarity(reference, part2.community_members(u) - {u})
    else:
        part2 = partition
        sim = 1.0
    return HidingOutcome(
        target=u,
        success=sim <= config.tau and used <= config.beta,
        similarity=sim,
        deltas=deltas,
        used_budget=used,
        graph=g2,
        partition=part2,
        detections=detections,
        wall_seconds=time.perf_counter() - t_start,
    )


def run_dice(
    g: GraphLike,
    u: int,
    detector: DetectorSpec,
    config: HidingConfig,
    seed: int = 0,
    partition: Partition | None = None,
) -> HidingOutcome:
    """Disconnect internally once, connect externally with the rest.

    Drops the edge to the highest-degree neighbour inside the target's
    community, then adds edges to the highest-degree outside non-neighbours
    until the budget is spent. Without an internal neighbour the whole
    budget goes to additions.
    """
    t0 = time.perf_counter()
    partition, reference, detections = _prepare(g, u, detector, partition)
    members = partition.community_members(u)
    intra = [v for v in g.neighbors(u) if v in members]
    toggles: set[int] = set()
    if intra:
        toggles.add(min(intra, key=lambda v: (-g.degree(v), v)))
    outside = sorted(
        (v for v in range(g.n) if v != u and v not in members and not g.has_edge(u, v)),
        key=lambda v: (-g.degree(v), v),
    )
    toggles.update(outside[: config.beta - len(toggles)])
    delta = EdgeDelta(u, frozenset(toggles))
    return _finalise(
        g, u, detector, config, (delta,), partition, reference, detections, t0
    )


def run_roam(
    g: GraphLike,
    u: int,
    detector: DetectorSpec,
    config: HidingConfig,
    seed: int = 0,
    partition: Partition | None = None,
) -> HidingOutcome:
    """Detach the strongest neighbour and rewire it to the target's others.

    Removes the edge to the highest-degree neighbour v0, then adds up to
    budget-1 edges from v0 to the highest-degree other neighbours of the
    target not yet adjacent to v0. The additions land on v0's row.
    """
    t0 = time.perf_counter()
    partition, reference, detections = _prepare(g, u, detector, partition)
    nbrs = g.neighbors(u)
    if not nbrs:
        return _finalise(
            g, u, detector, config, (EdgeDelta(u),), partition, reference, detections, t0
        )
    v0 = min(nbrs, key=lambda v: (-g.degree(v), v))
    deltas = [EdgeDelta(u, frozenset((v0,)))]
    additions = sorted(
        (w for w in nbrs if w != v0 and not g.has_edge(v0, w)),
        key=lambda w: (-g.degree(w), w),
    )[: config.beta - 1]
    if additions:
        deltas.append(EdgeDelta(v0, frozenset(additions)))
    return _finalise(
        g, u, detector, config, tuple(deltas), partition, reference, detections, t0
    )


def run_random(
    g: GraphLike,
    u: int,
    detector: DetectorSpec,
    config: HidingConfig,
    seed: int = 0,
    partition: Partition | None = None,
    distinct: bool = False,
) -> HidingOutcome:
    """Toggle the edge to a uniformly drawn node, budget times.

    Draws are independent, so a node drawn twice is toggled back and the
    net change can be smaller than the budget; `distinct=True` switches to
    sampling without replacement instead.
    """
    t0 = time.perf_counter()
    partition, reference, detections = _prepare(g, u, detector, partition)
    rng = np.random.default_rng(seed)
    candidates = np.array([v for v in range(g.n) if v != u])
    toggles: set[int] = set()
    if candidates.size:
        if distinct:
            take = min(config.beta, candidates.size)
            toggles.update(
                int(v) for v in rng.choice(candidates, size=take, replace=False)
            )
        else:
            for idx in rng.integers(candidates.size, size=config.beta):
                toggles.symmetric_difference_update((int(candidates[idx]),))
    delta = EdgeDelta(u, frozenset(toggles))
    return _finalise(
        g, u, detector, config, (delta,), partition, reference, detections, t0
    )


def run_degree(
    g: GraphLike,
    u: int,
    detector: DetectorSpec,
    config: HidingConfig,
    seed: int = 0,
    partition: Partition | None = None,
) -> HidingOutcome:
    """Toggle the edge to the currently highest-degree node, budget times.

    Degrees are recomputed on the perturbed graph after every toggle; each
    node is toggled at most once per run.
    """
    t0 = time.perf_counter()
    partition, reference, detections = _prepare(g, u, detector, partition)
    view: GraphLike = g
    toggles: set[int] = set()
    for _ in range(config.beta):
        remaining = [v for v in range(g.n) if v != u and v not in toggles]
        if not remaining:
            break
        v = min(remaining, key=lambda x: (-view.degree(x), x))
        toggles.add(v)
        view = apply_delta(view, EdgeDelta(u, frozenset((v,))))
    delta = EdgeDelta(u, frozenset(toggles))
    return _finalise(
        g, u, detector, config, (delta,), partition, reference, detections, t0
    )


def run_centrality(
    g: GraphLike,
    u: int,
    detector: DetectorSpec,
    config: HidingConfig,
    seed: int = 0,
    partition: Partition | None = None,
) -> HidingOutcome:
    """Toggle edges to the top betweenness-centrality nodes.

    Centrality is computed once on the original graph; recomputing it per
    toggle would cost another full all-pairs pass per step.
    """
    t0 = time.perf_counter()
    partition, reference, detections = _prepare(g, u, detector, partition)
    bc = betweenness(g)
    ranked = sorted((v for v in range(g.n) if v != u), key=lambda v: (-bc[v], v))
    delta = EdgeDelta(u, frozenset(ranked[: config.beta]))
    return _finalise(
        g, u, detector, config, (delta,), partition, reference, detections, t0
    )


_RUNNERS = {
    "dice": run_dice,
    "roam": run_roam,
    "random": run_random,
    "degree": run_degree,
    "centrality": run_centrality,
}


def run_baseline(
    name: str,
    g: GraphLike,
    u: int,
    detector: DetectorSpec,
    config: HidingConfig,
    seed: int = 0,
    partition: Partition | None = None,
    **kwargs,
) -> HidingOutcome:
    try:
        runner = _RUNNERS[name]
    except KeyError:
        raise ConfigError(
            f"unknown baseline {name!r}; available: {', '.join(BASELINE_NAMES)}"
        ) from None
    return runner(g, u, detector, config, seed=seed, partition=partition, **kwargs)
