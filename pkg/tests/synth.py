"""Seeded synthetic graphs used as test subjects and fixtures."""

from __future__ import annotations

import random

from ledgergraph.graph import DirectedGraph


def random_digraph(n: int, m: int, seed: int, labels: bool = False) -> DirectedGraph:
    """Uniform random simple digraph with exactly m arcs (needs m <= n(n-1))."""
    if m > n * (n - 1):
        raise ValueError("too many arcs requested")
    rng = random.Random(seed)
    g = DirectedGraph.with_node_count(0)
    if labels:
        for v in range(n):
            g.intern_address(f"addr{v:05d}")
    else:
        g = DirectedGraph.with_node_count(n)
    chosen: set[tuple[int, int]] = set()
    while len(chosen) < m:
        a = rng.randrange(n)
        b = rng.randrange(n)
        if a == b or (a, b) in chosen:
            continue
        chosen.add((a, b))
        g.add_arc(a, b)
    return g


def watts_strogatz(n: int, k: int, beta: float, seed: int) -> DirectedGraph:
    """Watts-Strogatz small world as a symmetric digraph.

    Ring of n nodes, each joined to its k nearest neighbors (k even,
    k/2 per side); every clockwise lattice edge is rewired to a uniform
    random target with probability beta, avoiding self-loops and duplicate
    edges. Every undirected edge is stored as two arcs.
    """
    if k % 2 or k < 2:
        raise ValueError("k must be even and >= 2")
    rng = random.Random(seed)
    edges: set[frozenset[int]] = set()
    for v in range(n):
        for off in range(1, k // 2 + 1):
            edges.add(frozenset((v, (v + off) % n)))
    for v in range(n):
        for off in range(1, k // 2 + 1):
            w = (v + off) % n
            e = frozenset((v, w))
            if e not in edges or rng.random() >= beta:
                continue
            for _ in range(100):
                t = rng.randrange(n)
                cand = frozenset((v, t))
                if t != v and cand not in edges:
                    edges.discard(e)
                    edges.add(cand)
                    break
    g = DirectedGraph.with_node_count(n)
    for e in sorted(tuple(sorted(e)) for e in edges):
        g.add_arc(e[0], e[1])
        g.add_arc(e[1], e[0])
    return g
