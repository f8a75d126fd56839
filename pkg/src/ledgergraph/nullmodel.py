"""Size-matched random graphs and the small-world verdict.

The comparison graph is drawn from the Erdős-Rényi model with the same
node count and exactly the same arc count as the graph under analysis
(G(n, m) mode); a G(n, p) mode is available as well. The verdict combines
the clustering and path-length ratios into sigma = (C/C_r) / (L/L_r):
well above 1 means small-world structure.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .graph import DirectedGraph
from .metrics import MetricsReport, SamplePlan, build_metrics_report


@dataclass(frozen=True)
class RandomGraphSpec:
    """Parameters for one random graph draw.

    Exactly one of `edge_count` (G(n, m)) or `edge_probability` (G(n, p))
    must be given. Directed graphs draw ordered pairs; undirected ones draw
    unordered pairs and store both arcs.
    """

    node_count: int
    edge_count: Optional[int] = None
    edge_probability: Optional[float] = None
    directed: bool = True
    seed: int = 0

    def __post_init__(self) -> None:
        if self.node_count < 0:
            raise ValueError("node_count must be >= 0")
        if (self.edge_count is None) == (self.edge_probability is None):
            raise ValueError("give exactly one of edge_count or edge_probability")
        if self.edge_probability is not None and not (0.0 <= self.edge_probability <= 1.0):
            raise ValueError(f"edge probability must be in [0, 1], got {self.edge_probability}")
        if self.edge_count is not None:
            if self.edge_count < 0:
                raise ValueError("edge_count must be >= 0")
            if self.edge_count > self.max_edges():
                raise ValueError(
                    f"edge_count {self.edge_count} exceeds the {self.max_edges()} "
                    f"possible {'arcs' if self.directed else 'edges'} on {self.node_count} nodes"
                )

    def max_edges(self) -> int:
        n = self.node_count
        return n * (n - 1) if self.directed else n * (n - 1) // 2


def _pair_from_index(k: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    # linear index over the n*(n-1) ordered non-loop pairs
    src = k // (n - 1)
    off = k % (n - 1)
    dst = np.where(off < src, off, off + 1)
    return src, dst


def erdos_renyi(spec: RandomGraphSpec) -> DirectedGraph:
    """Draw a random graph per `spec`, deterministically for a given seed.

    G(n, m) draws exactly m distinct pairs uniformly (collision-retry,
    cheap while m is far from saturation, correct regardless). G(n, p)
    walks the pair-index space with geometric jumps, so the cost scales
    with the number of arcs produced rather than n^2.
    """
    n = spec.node_count
    graph = DirectedGraph.with_node_count(n)
    rng = np.random.default_rng(spec.seed)
    if n < 2:
        return graph

    if spec.edge_count is not None:
        target = spec.edge_count
        chosen: set[tuple[int, int]] = set()
        while len(chosen) < target:
            batch = max(256, int((target - len(chosen)) * 1.3))
            a = rng.integers(0, n, size=batch)
            b = rng.integers(0, n, size=batch)
            for u, v in zip(a.tolist(), b.tolist()):
                if u == v:
                    continue
                pair = (u, v) if spec.directed else (min(u, v), max(u, v))
                if pair in chosen:
                    continue
                chosen.add(pair)
                graph.add_arc(pair[0], pair[1])
                if not spec.directed:
                    graph.add_arc(pair[1], pair[0])
                if len(chosen) == target:
                    break
        return graph

    p = spec.edge_probability
    assert p is not None
    if p == 0.0:
        return graph
    total = spec.max_edges()
    if p == 1.0:
        picks = np.arange(total, dtype=np.int64)
    else:
        # geometric jumps through the linear pair index space
        jumps: list[np.ndarray] = []
        covered = 0
        expect = int(total * p) + 1
        while covered < total:
            draw = rng.geometric(p, size=max(256, expect))
            jumps.append(draw)
            covered += int(draw.sum())
        steps = np.concatenate(jumps).cumsum() - 1
        picks = steps[steps < total]
    if spec.directed:
        src, dst = _pair_from_index(picks, n)
    else:
        # unordered pair index -> (i, j) with i < j
        i = (0.5 * (2 * n - 1 - np.sqrt((2 * n - 1) ** 2 - 8.0 * picks))).astype(np.int64)
        # sqrt rounding can land one row off near block boundaries
        base = i * (2 * n - i - 1) // 2
        i = np.where(base > picks, i - 1, i)
        base = i * (2 * n - i - 1) // 2
        next_base = (i + 1) * (2 * n - i - 2) // 2
        i = np.where(picks >= next_base, i + 1, i)
        base = i * (2 * n - i - 1) // 2
        j = picks - base + i + 1
        src, dst = i, j
    for u, v in zip(src.tolist(), dst.tolist()):
        graph.add_arc(u, v)
        if not spec.directed:
            graph.add_arc(v, u)
    return graph


@dataclass
class SmallWorldReport:
    """Paired real/random metrics plus the ratios and sigma.

    A ratio (and then sigma) is None when the random twin degenerates, for
    example a triangle-free random graph gives C_r = 0; `undefined` maps
    each missing ratio to the reason.
    """

    real_metrics: MetricsReport
    random_metrics: Optional[MetricsReport]
    acc_ratio: Optional[float]
    aspl_ratio: Optional[float]
    sigma: Optional[float]
    undefined: dict[str, str] = field(default_factory=dict)
    seeds: dict = field(default_factory=dict)
    timings: Optional[dict] = None

    def to_json_dict(self, include_timings: bool = True) -> dict:
        out = {
            "real": self.real_metrics.to_json_dict(),
            "random": self.random_metrics.to_json_dict() if self.random_metrics else None,
            "acc_ratio": self.acc_ratio,
            "aspl_ratio": self.aspl_ratio,
            "sigma": self.sigma,
            "undefined": self.undefined,
            "seeds": self.seeds,
        }
        if include_timings and self.timings is not None:
            out["timings"] = self.timings
        return out


def ratios_and_sigma(
    acc: float, random_acc: float, aspl: float, random_aspl: float
) -> tuple[Optional[float], Optional[float], Optional[float], dict[str, str]]:
    """The ratio/sigma arithmetic, factored out so it can run on published
    table values as well as on freshly measured ones."""
    undefined: dict[str, str] = {}
    acc_ratio = aspl_ratio = sigma = None
    if random_acc == 0.0:
        undefined["acc_ratio"] = "random graph clustering coefficient is zero"
    else:
        acc_ratio = acc / random_acc
    if random_aspl == 0.0:
        undefined["aspl_ratio"] = "random graph ASPL is zero"
    else:
        aspl_ratio = aspl / random_aspl
    if acc_ratio is None or aspl_ratio is None:
        undefined["sigma"] = "needs both ratios"
    elif aspl_ratio == 0.0:
        undefined["sigma"] = "ASPL ratio is zero"
    else:
        sigma = acc_ratio / aspl_ratio
    return acc_ratio, aspl_ratio, sigma, undefined


def small_world_compare(
    real: DirectedGraph,
    plan: SamplePlan,
    seed: int = 0,
    hub_count: int = 10,
    workers: int = 1,
    edge_reuse_ratio: Optional[float] = None,
) -> SmallWorldReport:
    """Measure `real`, draw its size-matched random twin, measure that with
    the same sampling plan, and combine the ratios into sigma."""
    if real.node_count == 0:
        raise ValueError("cannot compare an empty graph")
    timings: dict[str, float] = {}

    t0 = time.perf_counter()
    real_metrics = build_metrics_report(
        real, plan, hub_count=hub_count, workers=workers, edge_reuse_ratio=edge_reuse_ratio
    )
    timings["real_metrics_s"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    spec = RandomGraphSpec(
        node_count=real.node_count, edge_count=real.arc_count, directed=True, seed=seed
    )
    random_graph = erdos_renyi(spec)
    timings["random_generation_s"] = time.perf_counter() - t0

    undefined: dict[str, str] = {}
    random_metrics: Optional[MetricsReport] = None
    t0 = time.perf_counter()
    try:
        random_metrics = build_metrics_report(
            random_graph, plan, hub_count=hub_count, workers=workers
        )
    except ValueError as exc:
        undefined["aspl_ratio"] = f"random graph is degenerate: {exc}"
        undefined["acc_ratio"] = f"random graph is degenerate: {exc}"
        undefined["sigma"] = "needs both ratios"
    timings["random_metrics_s"] = time.perf_counter() - t0

    acc_ratio = aspl_ratio = sigma = None
    if random_metrics is not None:
        acc_ratio, aspl_ratio, sigma, undefined = ratios_and_sigma(
            real_metrics.graph_acc,
            random_metrics.graph_acc,
            real_metrics.main_component_aspl,
            random_metrics.main_component_aspl,
        )

    return SmallWorldReport(
        real_metrics=real_metrics,
        random_metrics=random_metrics,
        acc_ratio=acc_ratio,
        aspl_ratio=aspl_ratio,
        sigma=sigma,
        undefined=undefined,
        seeds={"random_graph": seed, "sample": plan.seed},
        timings=timings,
    )
