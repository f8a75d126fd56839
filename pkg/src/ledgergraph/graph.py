"""Directed simple graph over interned ledger addresses.

Nodes are dense integer ids assigned in first-seen order. Arcs are stored
as a set (no parallel arcs, no self-loops); repeated submissions of an
existing arc bump a multiplicity counter so edge-reuse statistics stay
derivable, and self-loop submissions are counted but never stored.

Construction is single-writer; after that every function here treats the
graph as read-only, so a built graph can be shared across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Optional


class AddArcResult(Enum):
    INSERTED = "inserted"
    DUPLICATED = "duplicated"
    SELF_LOOP_DISCARDED = "self_loop_discarded"


class DirectedGraph:
    """Simple directed graph with an address <-> node-id interning table.

    Node ids are consecutive integers starting at 0. Nodes created through
    :meth:`intern_address` carry their address string; nodes created in bulk
    via :meth:`with_node_count` (synthetic graphs, unlabeled Pajek files)
    have no label.
    """

    __slots__ = (
        "_succ",
        "_pred",
        "_addr_to_id",
        "_id_to_addr",
        "_arc_count",
        "_extra_multiplicity",
        "_pair_submissions",
        "self_loop_count",
    )

    def __init__(self) -> None:
        self._succ: list[set[int]] = []
        self._pred: list[set[int]] = []
        self._addr_to_id: dict[str, int] = {}
        self._id_to_addr: list[Optional[str]] = []
        self._arc_count = 0
        # per-arc repeats beyond the first, keyed (src, dst); absent == 1
        self._extra_multiplicity: dict[tuple[int, int], int] = {}
        self._pair_submissions = 0
        self.self_loop_count = 0

    @classmethod
    def with_node_count(cls, n: int) -> "DirectedGraph":
        """Create a graph with `n` unlabeled nodes 0..n-1."""
        if n < 0:
            raise ValueError(f"node count must be >= 0, got {n}")
        g = cls()
        g._succ = [set() for _ in range(n)]
        g._pred = [set() for _ in range(n)]
        g._id_to_addr = [None] * n
        return g

    # -- nodes ------------------------------------------------------------

    @property
    def node_count(self) -> int:
        return len(self._succ)

    def intern_address(self, address: str) -> int:
        """Return the node id for `address`, assigning the next id if new."""
        if not address:
            raise ValueError("address must be a non-empty string")
        node = self._addr_to_id.get(address)
        if node is not None:
            return node
        node = len(self._succ)
        self._addr_to_id[address] = node
        self._id_to_addr.append(address)
        self._succ.append(set())
        self._pred.append(set())
        return node

    def address_of(self, node: int) -> Optional[str]:
        return self._id_to_addr[node]

    def node_of(self, address: str) -> Optional[int]:
        return self._addr_to_id.get(address)

    def has_labels(self) -> bool:
        """True when every node carries an address label."""
        return len(self._addr_to_id) == self.node_count

    # -- arcs -------------------------------------------------------------

    @property
    def arc_count(self) -> int:
        return self._arc_count

    def add_arc(self, src: int, dst: int) -> AddArcResult:
        """Submit the ordered pair (src, dst).

        Inserts the arc on first sight, increments its multiplicity on
        repeats, and discards (but counts) self-loops.
        """
        n = self.node_count
        if not (0 <= src < n and 0 <= dst < n):
            raise ValueError(f"arc ({src}, {dst}) references a node id outside [0, {n})")
        if src == dst:
            self.self_loop_count += 1
            return AddArcResult.SELF_LOOP_DISCARDED
        self._pair_submissions += 1
        succ = self._succ[src]
        if dst in succ:
            key = (src, dst)
            self._extra_multiplicity[key] = self._extra_multiplicity.get(key, 0) + 1
            return AddArcResult.DUPLICATED
        succ.add(dst)
        self._pred[dst].add(src)
        self._arc_count += 1
        return AddArcResult.INSERTED

    def add_interaction(self, sender: str, recipient: str) -> AddArcResult:
        """Intern both addresses and submit the sender -> recipient arc."""
        return self.add_arc(self.intern_address(sender), self.intern_address(recipient))

    def has_arc(self, src: int, dst: int) -> bool:
        return dst in self._succ[src]

    def successors(self, node: int) -> set[int]:
        """Distinct successors of `node` (do not mutate)."""
        return self._succ[node]

    def predecessors(self, node: int) -> set[int]:
        """Distinct predecessors of `node` (do not mutate)."""
        return self._pred[node]

    def arcs(self) -> Iterator[tuple[int, int]]:
        """All arcs (unspecified order); sort when determinism matters."""
        for src, succ in enumerate(self._succ):
            for dst in succ:
                yield src, dst

    def multiplicity(self, src: int, dst: int) -> int:
        """How many times the arc (src, dst) was submitted (0 if absent)."""
        if dst not in self._succ[src]:
            return 0
        return 1 + self._extra_multiplicity.get((src, dst), 0)

    @property
    def pair_submissions(self) -> int:
        """Total non-self-loop arc submissions (sum of multiplicities)."""
        return self._pair_submissions

    def edge_reuse_ratio(self) -> float:
        """Fraction of arc submissions that hit an already existing arc."""
        if self._pair_submissions == 0:
            return 0.0
        return (self._pair_submissions - self._arc_count) / self._pair_submissions


@dataclass(frozen=True)
class Component:
    """A weakly or strongly connected component."""

    members: frozenset[int]
    kind: str  # "weak" or "strong"
    is_main: bool = False

    def __len__(self) -> int:
        return len(self.members)


def _finalize(groups: list[set[int]], kind: str) -> list[Component]:
    # main component: largest, ties broken by lowest contained node id
    if not groups:
        return []
    keyed = sorted(groups, key=lambda g: (-len(g), min(g)))
    out = [Component(frozenset(g), kind, is_main=(i == 0)) for i, g in enumerate(keyed)]
    return out


def weakly_connected_components(graph: DirectedGraph) -> list[Component]:
    """Partition of the nodes into weakly connected components.

    Components are returned largest first; the first one is the main
    component.
    """
    n = graph.node_count
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]  # path halving
            x = parent[x]
        return x

    for src, dst in graph.arcs():
        ra, rb = find(src), find(dst)
        if ra != rb:
            if ra < rb:
                parent[rb] = ra
            else:
                parent[ra] = rb
    groups: dict[int, set[int]] = {}
    for v in range(n):
        groups.setdefault(find(v), set()).add(v)
    return _finalize(list(groups.values()), "weak")


def strongly_connected_components(graph: DirectedGraph) -> list[Component]:
    """Tarjan's algorithm, iterative to cope with deep ledgers' chains."""
    n = graph.node_count
    UNSEEN = -1
    index = [UNSEEN] * n
    lowlink = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    groups: list[set[int]] = []
    counter = 0

    for root in range(n):
        if index[root] != UNSEEN:
            continue
        work: list[tuple[int, Iterator[int]]] = [(root, iter(graph.successors(root)))]
        index[root] = lowlink[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if index[w] == UNSEEN:
                    index[w] = lowlink[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, iter(graph.successors(w))))
                    advanced = True
                    break
                if on_stack[w]:
                    if index[w] < lowlink[v]:
                        lowlink[v] = index[w]
            if advanced:
                continue
            work.pop()
            if work:
                pv = work[-1][0]
                if lowlink[v] < lowlink[pv]:
                    lowlink[pv] = lowlink[v]
            if lowlink[v] == index[v]:
                comp: set[int] = set()
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.add(w)
                    if w == v:
                        break
                groups.append(comp)
    return _finalize(groups, "strong")


def main_component(graph: DirectedGraph, kind: str) -> Component:
    """The largest component of the requested kind ("weak" or "strong")."""
    if kind == "weak":
        comps = weakly_connected_components(graph)
    elif kind == "strong":
        comps = strongly_connected_components(graph)
    else:
        raise ValueError(f"component kind must be 'weak' or 'strong', got {kind!r}")
    if not comps:
        raise ValueError("graph has no nodes, so no main component")
    return comps[0]


def undirected_projection(graph: DirectedGraph) -> DirectedGraph:
    """Symmetric closure: for every arc (a, b) ensure (b, a) exists too.

    The node set and labels are preserved; multiplicity is not carried over
    (the projection is an analysis artifact, not a transaction record).
    """
    out = DirectedGraph.with_node_count(graph.node_count)
    out._addr_to_id = dict(graph._addr_to_id)
    out._id_to_addr = list(graph._id_to_addr)
    for src, dst in graph.arcs():
        out.add_arc(src, dst)
        out.add_arc(dst, src)
    return out


def induced_subgraph(
    graph: DirectedGraph, members: Iterable[int]
) -> tuple[DirectedGraph, list[int]]:
    """Subgraph on `members` with nodes renumbered densely.

    Returns (subgraph, original_ids) where original_ids[new_id] is the node
    id in `graph`. New ids follow ascending original id, so the extraction
    is deterministic.
    """
    original_ids = sorted(set(members))
    remap = {old: new for new, old in enumerate(original_ids)}
    sub = DirectedGraph.with_node_count(len(original_ids))
    if graph.has_labels():
        for new, old in enumerate(original_ids):
            addr = graph.address_of(old)
            assert addr is not None
            sub._id_to_addr[new] = addr
            sub._addr_to_id[addr] = new
    for old in original_ids:
        new_src = remap[old]
        for dst in graph.successors(old):
            new_dst = remap.get(dst)
            if new_dst is not None:
                sub.add_arc(new_src, new_dst)
    return sub, original_ids
