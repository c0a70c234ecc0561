"""Rounding fractional centers into integral ones, and scenario assignments.

A transfer of radius r moves fractional center mass so that every vertex
set keeps at least as much reachable capacity within r hops as it had at
distance zero, never touching pinned backups.  The general pipeline composes
a distance-1 aggregation onto auxiliary vertices, a distance-2 transfer on a
spanning tree of cluster heads (distance 6 on the base graph), and a final
distance-1 shift, for an integral distance-8 transfer; the uniform-capacity
pipeline finds an integral distance-5 transfer directly.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

from .clustering import Clustering, DirectedGraph, backup_union
from .flow import FlowNetwork, INF, capacitated_assignment, max_flow
from .instance import (
    ContractViolation,
    InstanceError,
    ThresholdGraph,
    uniform_capacity_level,
)

ZERO = Fraction(0)
ONE = Fraction(1)


# -- transfer verification ------------------------------------------------


def _mass(y: Mapping[int, Fraction], verts) -> Fraction:
    return sum((Fraction(y.get(v, 0)) for v in verts), ZERO)


def condition_b_exhaustive(y, y2, graph: ThresholdGraph, r: int, B, caps) -> bool:
    """Coverage condition checked over every vertex subset via bitmasks."""
    n = graph.n
    if n > 22:
        raise InstanceError(f"exhaustive subset check infeasible for n={n}")
    hops = graph.hops()
    B = frozenset(B)
    nbr = []
    for v in range(n):
        m = 0
        row = hops[v]
        for w in range(n):
            if row[w] <= r:
                m |= 1 << w
        nbr.append(m)
    demand = [Fraction(caps[v]) * Fraction(y.get(v, 0)) for v in range(n)]
    supply = [Fraction(caps[v]) * Fraction(y2.get(v, 0)) for v in range(n)]
    bmask = 0
    for v in B:
        bmask |= 1 << v
    dem = [ZERO] * (1 << n)
    cov = [0] * (1 << n)
    for mask in range(1, 1 << n):
        low = mask & (-mask)
        v = low.bit_length() - 1
        rest = mask ^ low
        dem[mask] = dem[rest] + (ZERO if (low & bmask) else demand[v])
        cov[mask] = cov[rest] | nbr[v]
        need = dem[mask]
        if need == 0:
            continue
        have = ZERO
        avail = cov[mask] & ~bmask
        while avail:
            lw = avail & (-avail)
            have += supply[lw.bit_length() - 1]
            avail ^= lw
        if have < need:
            return False
    return True


def condition_b_flow(y, y2, graph: ThresholdGraph, r: int, B, caps) -> bool:
    """Same condition via a single max-flow (Hall with fractional demands)."""
    n = graph.n
    hops = graph.hops()
    B = frozenset(B)
    net = FlowNetwork("s", "t")
    total = ZERO
    for v in range(n):
        if v in B:
            continue
        d = Fraction(caps[v]) * Fraction(y.get(v, 0))
        if d == 0:
            continue
        total += d
        net.add_arc("s", ("a", v), d)
        row = hops[v]
        for w in range(n):
            if w not in B and row[w] <= r:
                net.add_arc(("a", v), ("b", w), INF)
    for w in range(n):
        if w not in B:
            s = Fraction(caps[w]) * Fraction(y2.get(w, 0))
            if s > 0:
                net.add_arc(("b", w), "t", s)
    if total == 0:
        return True
    return max_flow(net).value == total


def verify_transfer(y, y2, graph: ThresholdGraph, r: int, B, caps, method="auto") -> bool:
    """Certify that y2 is a distance-r transfer of y on graph avoiding B:
    (a) total mass preserved, (b) r-hop coverage dominates for every subset,
    (c) y2 agrees with y on B."""
    B = frozenset(B)
    n = graph.n
    if _mass(y, range(n)) != _mass(y2, range(n)):
        return False
    for v in B:
        if Fraction(y.get(v, 0)) != Fraction(y2.get(v, 0)):
            return False
    if method == "auto":
        method = "exhaustive" if n <= 14 else "flow"
    if method == "exhaustive":
        return condition_b_exhaustive(y, y2, graph, r, B, caps)
    if method == "flow":
        return condition_b_flow(y, y2, graph, r, B, caps)
    raise InstanceError(f"unknown method {method!r}")


# -- tree transfer ---------------------------------------------------------


def tree_transfer(tree: ThresholdGraph, members, y, caps):
    """Integral distance-2 transfer on a tree with fractional leaves.

    Preconditions: the mass on `members` is integral and every internal tree
    node carries y=1.  Candidates keeping all internal nodes open are tried
    first (lexicographically), arbitrary subsets second, so the result favors
    the shape the analysis promises while never failing when any transfer
    exists.
    """
    members = sorted(set(members))
    mset = set(members)
    kappa = _mass(y, members)
    if kappa.denominator != 1:
        raise ContractViolation("tree transfer needs integral total mass")
    kappa = int(kappa)
    deg = {w: len(tree.adj[w] & mset) for w in members}
    internal = [w for w in members if deg[w] >= 2]
    for w in internal:
        if Fraction(y.get(w, 0)) != 1:
            raise ContractViolation("internal tree node with fractional mass")
    free = [w for w in members if deg[w] <= 1]

    def feasible(opened) -> bool:
        net = FlowNetwork("s", "t")
        total = ZERO
        for w in members:
            d = Fraction(caps[w]) * Fraction(y.get(w, 0))
            if d == 0:
                continue
            total += d
            net.add_arc("s", ("a", w), d)
            for x in opened:
                if tree.hop(w, x) <= 2:
                    net.add_arc(("a", w), ("b", x), INF)
        for x in opened:
            net.add_arc(("b", x), "t", Fraction(caps[x]))
        return total == 0 or max_flow(net).value == total

    def result(opened):
        y2 = dict(y)
        opened = set(opened)
        for w in members:
            y2[w] = ONE if w in opened else ZERO
        return y2

    want = kappa - len(internal)
    if 0 <= want <= len(free):
        for extra in combinations(free, want):
            opened = sorted(internal) + list(extra)
            if feasible(opened):
                return result(opened)
    for opened in combinations(members, kappa):
        if set(internal) <= set(opened):
            continue  # already tried above
        if feasible(opened):
            return result(opened)
    raise ContractViolation("no distance-2 transfer exists on the tree")


# -- general pipeline rounding ---------------------------------------------


@dataclass
class Augmented:
    """Base graph plus one auxiliary vertex per cluster head.

    The auxiliary for head h sits on N(h) (adjacent to the whole closed
    neighborhood) and inherits the capacity of m_h, the largest-capacity
    non-backup neighbor of h.
    """

    ext: ThresholdGraph
    caps_ext: tuple
    aux_of: dict  # head -> aux vertex id
    head_of: dict  # aux vertex id -> head
    m_of: dict  # head -> designated heavy neighbor


def build_augmented(
    graph: ThresholdGraph,
    clustering: Clustering,
    backup_set,
    caps: Sequence[int],
) -> Augmented:
    n = graph.n
    aux_of, head_of, m_of = {}, {}, {}
    edges = list(graph.edges)
    caps_ext = list(caps)
    for i, h in enumerate(clustering.heads):
        pool = sorted(
            (v for v in (graph.adj[h] | {h}) if v not in backup_set),
            key=lambda v: (-caps[v], v),
        )
        if not pool:
            raise ContractViolation(
                f"head {h} has no non-backup neighbor; the LP row should forbid this"
            )
        m = pool[0]
        a = n + i
        aux_of[h], head_of[a], m_of[h] = a, h, m
        for u in graph.adj[h] | {h}:
            edges.append((a, u))
    ext = ThresholdGraph(n + len(clustering.heads), edges)
    caps_ext += [caps[m_of[h]] for h in clustering.heads]
    return Augmented(ext, tuple(caps_ext), aux_of, head_of, m_of)


@dataclass
class RoundResult:
    R: tuple  # sorted real centers, |R| = k
    support2: frozenset  # support after the tree step (real + aux ids)
    y0: dict
    y1: dict
    y2: dict
    y3: dict
    aug: Augmented
    tree: ThresholdGraph
    tree_members: frozenset


def round_general(
    y: Mapping[int, Fraction],
    graph: ThresholdGraph,
    clustering: Clustering,
    backups: Mapping[int, tuple],
    caps: Sequence[int],
) -> RoundResult:
    """Round an LP point to k centers containing the backups.

    Step 1 drains each head's neighborhood onto its auxiliary (m_h first,
    then ascending capacity, ties by index).  Step 2 runs the tree transfer
    on the head tree with fractional cluster members as leaves.  Step 3 moves
    each opened auxiliary's unit onto m_h.
    """
    n = graph.n
    bset = frozenset(backup_union(backups))
    aug = build_augmented(graph, clustering, bset, caps)
    y0 = {v: Fraction(y.get(v, 0)) for v in range(n)}
    for h in clustering.heads:
        y0[aug.aux_of[h]] = ZERO

    y1 = dict(y0)
    for h in clustering.heads:
        a = aug.aux_of[h]
        m = aug.m_of[h]
        order = [m] + sorted(
            (v for v in (graph.adj[h] | {h}) if v not in bset and v != m),
            key=lambda v: (caps[v], v),
        )
        need = ONE
        for v in order:
            if need == 0:
                break
            take = min(need, y1[v])
            y1[v] -= take
            y1[a] += take
            need -= take
        if need != 0:
            raise ContractViolation(
                f"head {h}: fractional mass {ONE - need} < 1 despite the LP row"
            )

    members = set(aug.aux_of.values())
    members.update(
        v for v in range(n) if 0 < y1[v] < 1
    )
    tree_edges = []
    for (h1, h2) in clustering.tree_edges:
        tree_edges.append((aug.aux_of[h1], aug.aux_of[h2]))
    for v in range(n):
        if 0 < y1[v] < 1:
            tree_edges.append((aug.aux_of[clustering.cluster_of[v]], v))
    tree = ThresholdGraph(aug.ext.n, tree_edges)
    y2 = tree_transfer(tree, members, y1, aug.caps_ext)

    y3 = dict(y2)
    for h in clustering.heads:
        a = aug.aux_of[h]
        if y3[a] == 1:
            m = aug.m_of[h]
            if y3[m] != 0:
                raise ContractViolation("designated neighbor already open")
            y3[a] = ZERO
            y3[m] = ONE
    R = tuple(sorted(v for v in range(n) if y3[v] == 1))
    if any(y3[a] != 0 for a in aug.aux_of.values()):
        raise ContractViolation("auxiliary still open after the final shift")
    if not bset <= set(R):
        raise ContractViolation("a pinned backup was closed by rounding")
    if _mass(y3, range(n)) != _mass(y0, range(aug.ext.n)):
        raise ContractViolation("rounding changed the total mass")
    support2 = frozenset(v for v, val in y2.items() if val == 1)
    return RoundResult(R, support2, y0, y1, y2, y3, aug, tree, frozenset(members))


# -- scenario assignments (general pipeline) --------------------------------


@dataclass
class GeneralRounding:
    """Everything scenario assignment needs from one per-threshold solve."""

    graph: ThresholdGraph
    caps: Sequence[int]
    clustering: Clustering
    backups: Mapping[int, tuple]
    gprime: DirectedGraph
    rr: RoundResult
    alpha: int

    def backup_set(self) -> frozenset:
        return frozenset(backup_union(self.backups))

    def delta(self, center: int) -> int:
        """Head of the cluster a (possibly auxiliary) center belongs to."""
        if center in self.rr.aug.head_of:
            return self.rr.aug.head_of[center]
        return self.clustering.cluster_of[center]


def _reach_set(state: GeneralRounding, u: int) -> set:
    """Centers u may use: backups granted by the arc-augmented digraph, plus
    everything within two tree hops of its 2-neighborhood in the extended
    graph (the one with auxiliary nodes, so drained mass stays reachable)."""
    B = state.backup_set()
    out = set(state.gprime.closed_out(u) & B)
    near = state.rr.aug.ext.neighborhood([u], 2)
    out |= near
    T, members = state.rr.tree, state.rr.tree_members
    for w in near & members:
        out.update(x for x in members if T.hop(w, x) <= 2)
    return out


def assign_scenario_backups(state: GeneralRounding, F) -> dict:
    """Assignment avoiding a failure set of backups (|F| <= alpha, F within B).

    Clients within nine hops of their center and eight hops of the center's
    cluster head; guaranteed feasible for LP-derived roundings.
    """
    F = frozenset(F)
    B = state.backup_set()
    if not F <= B:
        raise InstanceError("failure set must consist of backups")
    if len(F) > state.alpha:
        raise InstanceError("too many failures")
    rr = state.rr
    targets = sorted(rr.support2 - F)
    caps_ext = rr.aug.caps_ext
    n = state.graph.n
    allowed = {}
    tset = set(targets)
    for u in range(n):
        allowed[u] = sorted((_reach_set(state, u) - F) & tset)
    phi_bar, witness = capacitated_assignment(
        list(range(n)), targets, allowed, {t: caps_ext[t] for t in targets}
    )
    if phi_bar is None:
        raise ContractViolation(
            f"scenario {sorted(F)}: assignment infeasible despite the LP guarantee"
        )
    phi = {}
    for u, c in phi_bar.items():
        if c in rr.aug.head_of:
            c = rr.aug.m_of[rr.aug.head_of[c]]
        phi[u] = c
    hops = state.graph.hops()
    load = Counter(phi.values())
    for c, l in load.items():
        if l > state.caps[c]:
            raise ContractViolation("capacity exceeded after auxiliary substitution")
    for u, c in phi.items():
        if hops[u][c] > 9 or hops[u][state.delta(c)] > 8:
            raise ContractViolation("assignment exceeds its distance bound")
        if c not in rr.R or c in F:
            raise ContractViolation("assignment uses a closed or failed center")
    return phi


def assign_scenario_general(state: GeneralRounding, F) -> dict:
    """Assignment avoiding an arbitrary failure set F within the solution.

    Failed non-backups are routed through same-cluster backup stand-ins of no
    smaller capacity, then swapped back; clients stay within ten hops of
    their center.
    """
    F = frozenset(F)
    if len(F) > state.alpha:
        raise InstanceError("too many failures")
    if not F <= set(state.rr.R):
        raise InstanceError("failures must be centers of the solution")
    B = state.backup_set()
    alpha = state.alpha
    if F <= B:
        F2 = set(F)
        for b in sorted(B - F):
            if len(F2) >= alpha:
                break
            F2.add(b)
        return assign_scenario_backups(state, F2)

    caps = state.caps
    by_head = {}
    for f in F:
        by_head.setdefault(state.clustering.cluster_of[f], []).append(f)
    stand_ins = {}
    for h, fs in by_head.items():
        ranked = sorted(state.backups[h], key=lambda v: (-caps[v], v))
        stand_ins[h] = (sorted(fs), ranked[: len(fs)])
    Fprime = set()
    for h, (_, reps) in stand_ins.items():
        Fprime.update(reps)
    F2 = set(Fprime)
    for b in sorted(B - Fprime - F):
        if len(F2) >= alpha:
            break
        F2.add(b)
    for b in sorted((B & F) - Fprime):
        if len(F2) >= alpha:
            break
        F2.add(b)
    phi_pre = assign_scenario_backups(state, F2)

    remap = {}
    for h, (fs, reps) in stand_ins.items():
        dead = sorted(set(fs) - set(reps))
        alive = sorted(set(reps) - set(fs))
        if len(dead) != len(alive):
            raise ContractViolation("stand-in bookkeeping out of balance")
        for d, a in zip(dead, alive):
            if caps[d] > caps[a]:
                raise ContractViolation("stand-in has smaller capacity than the center it replaces")
            remap[d] = a
    phi = {u: remap.get(c, c) for u, c in phi_pre.items()}

    hops = state.graph.hops()
    load = Counter(phi.values())
    for c, l in load.items():
        if l > caps[c]:
            raise ContractViolation("capacity exceeded after the stand-in swap")
    for u, c in phi.items():
        if c in F or c not in state.rr.R:
            raise ContractViolation("assignment uses a closed or failed center")
        if hops[u][c] > 10:
            raise ContractViolation("assignment exceeds the ten-hop bound")
    return phi


# -- uniform-capacity pipeline ----------------------------------------------


def round_uniform(y: Mapping[int, Fraction], graph: ThresholdGraph, k: int, caps) -> tuple:
    """Integral distance-5 transfer for {0,L} capacities.

    Only the positive-capacity part of R matters for coverage, so the search
    runs lexicographically over L-vertex subsets of size min(k, |V^L|) and
    pads with lowest-index zero-capacity vertices.
    """
    n = graph.n
    uniform_capacity_level(caps)
    lverts = [v for v in range(n) if caps[v] > 0]
    smax = min(k, len(lverts))
    for part in combinations(lverts, smax):
        chosen = set(part)
        rest = [v for v in range(n) if v not in chosen]
        padded = sorted(chosen | set(rest[: k - smax]))
        y2 = {v: (ONE if v in padded else ZERO) for v in range(n)}
        if condition_b_flow(y, y2, graph, 5, frozenset(), caps):
            return tuple(padded)
    raise ContractViolation("no distance-5 transfer despite LP feasibility")


def assign_scenario_uniform(graph: ThresholdGraph, R, caps, F, alpha: int) -> dict:
    """Assignment within six hops avoiding up to alpha failed centers."""
    F = frozenset(F)
    if len(F) > alpha:
        raise InstanceError("too many failures")
    if not F <= set(R):
        raise InstanceError("failures must be centers")
    n = graph.n
    hops = graph.hops()
    targets = sorted(v for v in R if v not in F and caps[v] > 0)
    allowed = {
        u: [c for c in targets if hops[u][c] <= 6] for u in range(n)
    }
    phi, witness = capacitated_assignment(
        list(range(n)), targets, allowed, {c: caps[c] for c in targets}
    )
    if phi is None:
        raise ContractViolation(
            f"uniform scenario {sorted(F)} infeasible despite the transfer guarantee"
        )
    return phi
