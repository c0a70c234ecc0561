"""Cluster decomposition, backup selection, and scattered-set helpers.

The decomposition picks heads pairwise at least three hops apart, growing
deterministically from vertex 0, so that closed neighborhoods of heads are
disjoint while every vertex stays within two hops of its head.  Backups are
the alpha largest-capacity members of each cluster.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .instance import ContractViolation, InstanceError, ThresholdGraph


@dataclass(frozen=True)
class Clustering:
    graph: ThresholdGraph
    heads: tuple[int, ...]  # creation order; heads[0] == 0
    cluster_of: tuple[int, ...]  # vertex -> its head
    clusters: Mapping[int, tuple[int, ...]]  # head -> sorted members
    tree_edges: frozenset  # unordered head pairs at hop distance exactly 3


def monarch_clustering(graph: ThresholdGraph) -> Clustering:
    """Partition a connected graph into clusters around mutually far heads.

    Properties relied on downstream: tree edges join heads exactly three hops
    apart, N(head) is contained in its cluster, every cluster sits inside the
    closed 2-neighborhood of its head, and the clusters partition the vertex
    set.
    """
    if graph.n == 0:
        raise InstanceError("empty graph")
    if not graph.is_connected():
        raise InstanceError("clustering requires a connected graph")
    n = graph.n
    hops = graph.hops()
    heads = [0]
    parents = {}
    while True:
        nxt = None
        for w in range(n):
            if min(hops[w][h] for h in heads) == 3:
                nxt = w
                break
        if nxt is None:
            break
        for h in heads:  # earliest-created head at distance exactly 3
            if hops[nxt][h] == 3:
                parents[nxt] = h
                break
        heads.append(nxt)

    cluster_of = [-1] * n
    for h in heads:
        for v in graph.adj[h] | {h}:
            if cluster_of[v] != -1:
                raise ContractViolation("head neighborhoods overlap")
            cluster_of[v] = h
    for v in range(n):
        if cluster_of[v] != -1:
            continue
        for h in heads:  # earliest-created head within two hops
            if hops[v][h] <= 2:
                cluster_of[v] = h
                break
        else:
            raise ContractViolation(f"vertex {v} is more than two hops from every head")

    clusters = {h: [] for h in heads}
    for v in range(n):
        clusters[cluster_of[v]].append(v)
    tree_edges = frozenset(
        (min(c, p), max(c, p)) for c, p in parents.items()
    )
    return Clustering(
        graph,
        tuple(heads),
        tuple(cluster_of),
        {h: tuple(sorted(vs)) for h, vs in clusters.items()},
        tree_edges,
    )


def select_backups(clustering: Clustering, capacities: Sequence[int], alpha: int):
    """Pick alpha largest-capacity members of each cluster (ties: lowest index).

    Returns (backups, None) mapping head -> ascending-index tuple, or
    (None, reason) when some cluster has fewer than alpha members, which
    certifies that no distance-1 solution exists at this threshold.
    """
    backups = {}
    for h in clustering.heads:
        members = clustering.clusters[h]
        if len(members) < alpha:
            return None, (
                f"cluster of head {h} has {len(members)} vertices; "
                f"any solution needs at least alpha={alpha} centers that close to it"
            )
        ranked = sorted(members, key=lambda v: (-capacities[v], v))
        backups[h] = tuple(sorted(ranked[:alpha]))
    return backups, None


def backup_union(backups: Mapping[int, tuple[int, ...]]) -> frozenset:
    out = set()
    for vs in backups.values():
        out.update(vs)
    return frozenset(out)


class DirectedGraph:
    """Immutable digraph with closed out-neighborhood queries."""

    __slots__ = ("n", "out")

    def __init__(self, n: int, out_sets):
        self.n = n
        self.out = tuple(frozenset(s) for s in out_sets)

    def closed_out(self, U) -> frozenset:
        verts = [U] if isinstance(U, int) else list(U)
        res = set(verts)
        for u in verts:
            res |= self.out[u]
        return frozenset(res)


def build_gprime(
    graph: ThresholdGraph,
    clustering: Clustering,
    backups: Mapping[int, tuple[int, ...]],
) -> DirectedGraph:
    """Arc-augmented digraph: base edges both ways, plus arcs into each
    cluster's backups from every vertex adjacent to the head's neighborhood."""
    out = [set(graph.adj[u]) for u in range(graph.n)]
    for h in clustering.heads:
        B_h = backups.get(h, ())
        if not B_h:
            continue
        closed = graph.adj[h] | {h}
        zone = set()
        for t in closed:
            zone |= graph.adj[t]
        for u in zone:
            out[u].update(w for w in B_h if w != u)
    return DirectedGraph(graph.n, out)


def greedy_independent(graph: ThresholdGraph, ell: int) -> tuple[int, ...]:
    """Maximal set with pairwise hop distance >= ell, scanned by lowest index.

    Maximality gives coverage: every vertex is within ell-1 hops of a member.
    """
    hops = graph.hops()
    chosen: list[int] = []
    for v in range(graph.n):
        if all(hops[v][a] >= ell for a in chosen):
            chosen.append(v)
    return tuple(chosen)


def is_alpha_ell_independent(
    graph: ThresholdGraph, S, alpha: int, ell: int
) -> bool:
    """True iff every component of the ell-th power restricted to S has <= alpha vertices."""
    verts = sorted(set(S))
    hops = graph.hops()
    seen = set()
    for s in verts:
        if s in seen:
            continue
        comp = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            for w in verts:
                if w not in comp and hops[u][w] <= ell:
                    comp.add(w)
                    stack.append(w)
        if len(comp) > alpha:
            return False
        seen |= comp
    return True
