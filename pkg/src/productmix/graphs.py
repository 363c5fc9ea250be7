"""Marginal-bids multigraph, derived bipartite graph, and the parameter search.

The allocation loop is steered by two graphs rebuilt from the current problem
each iteration.  The marginal bids multigraph has the goods (including the
reject good 0) as vertices and one bidder-labelled edge per pair of goods
some bid of that bidder is marginal between.  Per bidder, the vertex sets of
the connected components of their labelled subgraph form demand clusters; a
good lying in clusters of two or more bidders is a link good.  The derived
graph is the bipartite graph of link goods versus clusters.

find_params walks the derived graph to find either a cluster with at most one
link good (handing its bids to unambiguous allocation) or evidence of a
multi-bidder cycle (handing a cycle-link good and edge label to the
shift/project reduction).  priority_params replaces the free walk with a
caller-supplied preference order over (good, bidder) pairs.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .errors import NoMarginals


class UnionFind:
    """Disjoint sets with path compression and union by rank."""

    def __init__(self, size: int):
        self.parent = list(range(size))
        self.rank = [0] * size

    def find(self, a: int) -> int:
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1


@dataclass(frozen=True)
class IsolatedCluster:
    """A demand cluster with no link goods; its residual belongs to the bidder."""

    goods: frozenset[int]
    bidder: str


@dataclass(frozen=True)
class LeafCluster:
    """A demand cluster with exactly one link good."""

    goods: frozenset[int]
    bidder: str
    link: int


@dataclass(frozen=True)
class CycleEdge:
    """A cycle-link good and the label of one of its incident cycle edges."""

    good: int
    bidder: str


ParamsResult = Union[IsolatedCluster, LeafCluster, CycleEdge]


class MarginalBidsGraph:
    """Goods as vertices; a j-labelled edge per pair of goods j ties together."""

    def __init__(self, n: int, edges):
        self.n = n
        self.edges = frozenset(edges)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def bidder_edges(self, bidder: str):
        return [(i, k) for (i, k, j) in self.edges if j == bidder]

    def bidders(self) -> tuple[str, ...]:
        return tuple(sorted({j for (_, _, j) in self.edges}))


class DerivedGraph:
    """Bipartite graph of link goods versus demand clusters."""

    def __init__(self, clusters, link_goods):
        # clusters sorted by (bidder, min good) for reproducible walks
        self.clusters = tuple(sorted(clusters, key=lambda c: (c[1], min(c[0]))))
        self.link_goods = tuple(sorted(link_goods))
        self.cluster_links = tuple(
            tuple(sorted(g for g in goods if g in set(self.link_goods)))
            for goods, _ in self.clusters
        )
        good_clusters: dict[int, list[int]] = {g: [] for g in self.link_goods}
        for idx, (goods, _) in enumerate(self.clusters):
            for g in goods:
                if g in good_clusters:
                    good_clusters[g].append(idx)
        self.good_clusters = {g: tuple(idxs) for g, idxs in good_clusters.items()}

    def cluster_of(self, bidder: str, good: int) -> Optional[int]:
        for idx in self.good_clusters.get(good, ()):
            if self.clusters[idx][1] == bidder:
                return idx
        return None


def build_marginal_graph(problem) -> MarginalBidsGraph:
    """Construct the multigraph from any object exposing marginal_sets().

    marginal_sets() maps each bidder to the demand sets (subsets of goods,
    reject included) of their marginal bids at the problem's price.  A bid
    marginal on k goods contributes all k-choose-2 pairs, deduplicated per
    bidder.
    """
    edges = set()
    for bidder, sets in problem.marginal_sets().items():
        for goods in sets:
            ordered = sorted(goods)
            for a in range(len(ordered)):
                for b in range(a + 1, len(ordered)):
                    edges.add((ordered[a], ordered[b], bidder))
    return MarginalBidsGraph(problem.n, edges)


def build_derived_graph(graph: MarginalBidsGraph) -> DerivedGraph:
    """Demand clusters via per-bidder union-find, then link-good counting."""
    clusters = []
    good_owners: dict[int, set[str]] = {}
    for bidder in graph.bidders():
        pairs = graph.bidder_edges(bidder)
        uf = UnionFind(graph.n + 1)
        touched = set()
        for a, b in pairs:
            uf.union(a, b)
            touched.add(a)
            touched.add(b)
        by_root: dict[int, set[int]] = {}
        for g in touched:
            by_root.setdefault(uf.find(g), set()).add(g)
        for goods in by_root.values():
            clusters.append((frozenset(goods), bidder))
            for g in goods:
                good_owners.setdefault(g, set()).add(bidder)
    link_goods = {g for g, owners in good_owners.items() if len(owners) > 1}
    return DerivedGraph(clusters, link_goods)


def _walk(derived: DerivedGraph) -> ParamsResult:
    """Maximal alternating walk from the lowest link good.

    Extends greedily through unvisited vertices (lexicographically smallest
    neighbour first).  An open end is a leaf cluster; any other dead end
    certifies a cycle, for which the last link good and the last cluster's
    bidder are a valid shift/project input.
    """
    start = derived.link_goods[0]
    visited_goods = {start}
    visited_clusters: set[int] = set()
    last_good = start
    last_cluster: Optional[int] = None
    at_good = True
    current: int = start
    prev: Optional[int] = None
    while True:
        if at_good:
            options = [c for c in derived.good_clusters[current] if c not in visited_clusters]
            if not options:
                # stuck at a link good: it has a second, already visited cluster
                return CycleEdge(last_good, derived.clusters[last_cluster][1])
            nxt = min(options)
            visited_clusters.add(nxt)
            last_cluster = nxt
            prev, current, at_good = current, nxt, False
        else:
            options = [g for g in derived.cluster_links[current] if g not in visited_goods]
            if not options:
                links = derived.cluster_links[current]
                goods, bidder = derived.clusters[current]
                if len(links) == 1:
                    return LeafCluster(goods, bidder, links[0])
                return CycleEdge(last_good, bidder)
            nxt = min(options)
            visited_goods.add(nxt)
            last_good = nxt
            prev, current, at_good = current, nxt, True


def find_params(problem, graph: Optional[MarginalBidsGraph] = None) -> ParamsResult:
    """Pick the next reduction: an isolated or leaf cluster, else a cycle edge."""
    if graph is None:
        graph = build_marginal_graph(problem)
    if graph.edge_count == 0:
        raise NoMarginals("the marginal bids graph is empty")
    derived = build_derived_graph(graph)
    for goods, bidder in derived.clusters:
        if not any(g in derived.good_clusters for g in goods):
            return IsolatedCluster(goods, bidder)
    return _walk(derived)


def _edge_on_cycle(derived: DerivedGraph, good: int, cluster_idx: int) -> bool:
    """Is the derived-graph edge good--cluster on a cycle?

    Checked by removing the edge and testing connectivity of its endpoints
    with breadth-first search.
    """
    target = ("c", cluster_idx)
    seen = {("g", good)}
    queue = deque([("g", good)])
    while queue:
        kind, v = queue.popleft()
        if kind == "g":
            for c in derived.good_clusters[v]:
                if v == good and c == cluster_idx:
                    continue  # removed edge
                node = ("c", c)
                if node == target:
                    return True
                if node not in seen:
                    seen.add(node)
                    queue.append(node)
        else:
            for g in derived.cluster_links[v]:
                if v == cluster_idx and g == good:
                    continue
                node = ("g", g)
                if node not in seen:
                    seen.add(node)
                    queue.append(node)
    return False


def priority_params(
    problem,
    priority: Sequence[tuple[int, str]],
    graph: Optional[MarginalBidsGraph] = None,
) -> ParamsResult:
    """Deterministic parameter choice controlled by a (good, bidder) order.

    Returns the first pair in the priority list whose derived-graph edge lies
    on a cycle; pairs whose good is no longer a link good are skipped.  When
    no edge lies on a cycle, falls back to an isolated cluster if one exists,
    else a leaf cluster (smallest by bidder then goods).
    """
    if graph is None:
        graph = build_marginal_graph(problem)
    if graph.edge_count == 0:
        raise NoMarginals("the marginal bids graph is empty")
    derived = build_derived_graph(graph)
    for good, bidder in priority:
        if good not in derived.good_clusters:
            continue
        idx = derived.cluster_of(bidder, good)
        if idx is None:
            continue
        if _edge_on_cycle(derived, good, idx):
            return CycleEdge(good, bidder)
    for goods, bidder in derived.clusters:
        if not any(g in derived.good_clusters for g in goods):
            return IsolatedCluster(goods, bidder)
    for idx, (goods, bidder) in enumerate(derived.clusters):
        if len(derived.cluster_links[idx]) == 1:
            return LeafCluster(goods, bidder, derived.cluster_links[idx][0])
    # every cluster is cycle-bound but the priority list named none of its
    # edges (an incomplete list); fall back to the free walk
    return _walk(derived)


def dump_marginal_graph(graph: MarginalBidsGraph) -> str:
    """One edge per line, sorted: 'i j bidder'."""
    lines = [f"{i} {k} {j}" for (i, k, j) in sorted(graph.edges)]
    return "\n".join(lines)


def dump_derived_graph(derived: DerivedGraph) -> str:
    """One derived edge per line, sorted: 'link -> bidder:{goods}'."""
    lines = []
    for idx, (goods, bidder) in enumerate(derived.clusters):
        label = ",".join(str(g) for g in sorted(goods))
        for g in derived.cluster_links[idx]:
            lines.append(f"{g} -> {bidder}:{{{label}}}")
    return "\n".join(sorted(lines))
