"""Conservative solvers: failures only move the clients of failed centers.

Both algorithms pre-open backup sets sized for the failure budget, solve a
residual non-fault-tolerant instance on the remaining capacity, and repair
failure scenarios locally: the {0,L} algorithm walks each orphaned client to
a nearby anchor's backups (seven hops), the general one routes orphans
through a chain of failed centers' neighborhoods via max-flow (beta + 6*alpha
hops, where beta is the stretch of the residual solver).
"""

from __future__ import annotations

from collections import Counter
from itertools import combinations
from typing import Callable

from .bottleneck import (
    PerTauInfeasible,
    PerTauSolution,
    quick_infeasible,
    solve_components,
    sweep,
)
from .clustering import greedy_independent, is_alpha_ell_independent
from .flow import FlowNetwork, INF, max_flow
from .instance import (
    ContractViolation,
    InstanceError,
    MetricInstance,
    ThresholdGraph,
    strip_zero_zero_edges,
    uniform_capacity_level,
)
from .solvers import SolveResult, _require_variant, ft_general_connected, ft_uniform_connected


def _pad_centers(centers, k: int, n: int) -> tuple:
    """Extend a center set to exactly k with lowest-index unused vertices."""
    out = sorted(set(centers))
    if len(out) > k:
        raise ContractViolation("more centers than the budget")
    have = set(out)
    for v in range(n):
        if len(out) >= k:
            break
        if v not in have:
            out.append(v)
            have.add(v)
    if len(out) != k:
        raise ContractViolation("cannot pad centers to k")
    return tuple(sorted(out))


# -- {0,L} conservative algorithm -------------------------------------------


def conservative_uniform_connected(graph: ThresholdGraph, k: int, caps, alpha: int):
    """Anchors pairwise seven hops apart, alpha backups near each anchor,
    then a failure-free uniform solve on what remains."""
    uniform_capacity_level(caps)
    why = quick_infeasible(graph, k, caps, alpha)
    if why:
        return PerTauInfeasible(why)
    anchors = greedy_independent(graph, 7)
    backups = {}
    for a in anchors:
        pool = sorted(v for v in (graph.adj[a] | {a}) if caps[v] > 0)
        if len(pool) < alpha:
            return PerTauInfeasible(
                f"anchor {a}: {len(pool)} positive-capacity vertices within one hop, "
                f"fewer than alpha={alpha}"
            )
        backups[a] = tuple(pool[:alpha])
    bset = set()
    for vs in backups.values():
        bset.update(vs)
    budget = k - len(bset)
    if budget < 1:
        return PerTauInfeasible(
            f"{len(bset)} backups leave no budget for the residual solve (k={k})"
        )
    inner_caps = [0 if v in bset else caps[v] for v in range(graph.n)]
    stripped = strip_zero_zero_edges(graph, inner_caps)
    inner = solve_components(
        stripped,
        budget,
        0,
        inner_caps,
        lambda sub, b, c: ft_uniform_connected(sub, b, c, 0),
    )
    if isinstance(inner, PerTauInfeasible):
        return PerTauInfeasible(f"residual uniform solve: {inner.reason}")
    phi0 = dict(inner.assignment)
    centers = _pad_centers(set(inner.centers) | bset, k, graph.n)
    detail = {
        "kind": "conservative-0l",
        "anchors": anchors,
        "backups": backups,
        "residual_centers": inner.centers,
        "inner": inner.detail,
    }
    return PerTauSolution(
        centers,
        phi0,
        7,
        lambda F: reassign_uniform(graph, caps, anchors, backups, phi0, F, alpha, centers),
        detail,
    )


def reassign_uniform(
    graph: ThresholdGraph,
    caps,
    anchors,
    backups,
    phi0: dict,
    F,
    alpha: int,
    centers,
) -> dict:
    """Move each orphaned client to a free backup of its nearest anchor.

    Conservative by construction: only clients of failed centers move, and
    they land within seven hops (six to the anchor, one more to a backup).
    """
    F = frozenset(F)
    if len(F) > alpha:
        raise InstanceError("too many failures")
    if not F <= set(centers):
        raise InstanceError("failures must be centers")
    uniform_capacity_level(caps)
    hops = graph.hops()
    load = Counter(c for u, c in phi0.items() if c not in F)
    phi = dict(phi0)
    moved = sorted(u for u, c in phi0.items() if c in F)
    for u in moved:
        a = min(anchors, key=lambda x: (hops[u][x], x))
        if hops[u][a] > 6:
            raise ContractViolation("anchor maximality violated")
        target = None
        for b in backups[a]:
            if b not in F and load[b] < caps[b]:
                target = b
                break
        if target is None:
            raise ContractViolation(
                f"no free backup near anchor {a} for client {u}; capacity argument failed"
            )
        phi[u] = target
        load[target] += 1
        if hops[u][target] > 7:
            raise ContractViolation("reassignment exceeds seven hops")
    return phi


def solve_conservative_uniform(inst: MetricInstance) -> SolveResult:
    """{0,L} conservative solver, radius at most 7 * tau*."""
    _require_variant(inst, "conservative", "cons-0l")
    uniform_capacity_level(inst.capacities)

    def per_tau(G):
        stripped = strip_zero_zero_edges(G, inst.capacities)
        return solve_components(
            stripped,
            inst.k,
            inst.alpha,
            inst.capacities,
            lambda sub, budget, caps: conservative_uniform_connected(sub, budget, caps, inst.alpha),
        )

    return SolveResult("cons-0l", inst, sweep(inst, per_tau))


# -- general conservative algorithm ------------------------------------------


def build_backup_set(graph: ThresholdGraph, caps, alpha: int):
    """Grow a backup set until no small vertex set outweighs the backups in
    its 6-hop neighborhood.

    Returns (B, trace); the trace records each chosen set and the running
    backup capacity, which strictly increases, bounding the loop.
    """
    n = graph.n
    hops = graph.hops()
    n6 = [frozenset(w for w in range(n) if hops[v][w] <= 6) for v in range(n)]
    candidates = []
    for size in range(1, alpha + 1):
        candidates.extend(combinations(range(n), size))
    candidates.sort()
    B: set = set()
    trace = []
    cap_b = 0
    while True:
        best = None
        for U in candidates:
            cover = set()
            for v in U:
                cover |= n6[v]
            deficit = sum(caps[v] for v in U) - sum(caps[b] for b in B & cover)
            if deficit > 0 and (best is None or deficit > best[0]):
                best = (deficit, U, cover)
        if best is None:
            break
        _, U, cover = best
        B = (B - cover) | set(U)
        new_cap = sum(caps[b] for b in B)
        if new_cap <= cap_b:
            raise ContractViolation("backup capacity did not increase")
        cap_b = new_cap
        trace.append((U, new_cap))
        if len(trace) > n * n + 1:
            raise ContractViolation("backup loop exceeded its iteration bound")
    return frozenset(B), trace


def conservative_general_connected(
    graph: ThresholdGraph,
    k: int,
    caps,
    alpha: int,
    residual_solver: Callable,
    beta: int,
):
    """Backup loop plus an arbitrary failure-free residual solver of stretch beta."""
    capped = [min(c, graph.n) for c in caps]
    why = quick_infeasible(graph, k, capped, alpha)
    if why:
        return PerTauInfeasible(why)
    B, trace = build_backup_set(graph, capped, alpha)
    if not is_alpha_ell_independent(graph, B, alpha, 6):
        raise ContractViolation("backup set is not (alpha,6)-independent")
    budget = k - len(B)
    if budget < 1:
        return PerTauInfeasible(
            f"{len(B)} backups leave no budget for the residual solve (k={k})"
        )
    inner_caps = [0 if v in B else capped[v] for v in range(graph.n)]
    inner = residual_solver(graph, budget, inner_caps)
    if isinstance(inner, PerTauInfeasible):
        return PerTauInfeasible(f"residual solve: {inner.reason}")
    phi0 = dict(inner.assignment)
    centers = _pad_centers(set(inner.centers) | B, k, graph.n)
    detail = {
        "kind": "conservative-general",
        "B": B,
        "trace": trace,
        "beta": beta,
        "residual_centers": inner.centers,
        "inner": inner.detail,
    }
    return PerTauSolution(
        centers,
        phi0,
        beta + 6 * alpha,
        lambda F: reassign_flow(graph, capped, B, phi0, F, alpha, beta, centers),
        detail,
    )


def reassignment_network(graph: ThresholdGraph, caps, B, phi0: dict, F_pad):
    """Flow network whose saturation reroutes every orphaned client.

    Unit arcs client -> its failed center; failed centers fan out to backups
    within six hops (a failed backup's node chains back to its own failure
    node, letting orphans hop across up to alpha failures); backups absorb up
    to their capacity.
    """
    hops = graph.hops()
    F_pad = frozenset(F_pad)
    moved = sorted(u for u, c in phi0.items() if c in F_pad)
    net = FlowNetwork("s", "t")
    for u in moved:
        net.add_arc("s", ("y", u), INF)
        net.add_arc(("y", u), ("f", phi0[u]), 1)
    for v in F_pad:
        for w in B:
            if w != v and hops[v][w] <= 6:
                if w in F_pad:
                    net.add_arc(("f", v), ("w2", w), INF)
                else:
                    net.add_arc(("f", v), ("u", w), INF)
    for w in B & F_pad:
        net.add_arc(("w2", w), ("f", w), INF)
    for w in B - F_pad:
        net.add_arc(("u", w), "t", caps[w])
    return net, moved


def _unit_paths(flow: dict, sources, sink):
    """Decompose an integral flow into one unit path per source, cancelling
    any circulation met along the way."""
    left = Counter()
    for arc, f in flow.items():
        left[arc] = f
    out = {}
    adj = {}
    for (a, b) in flow:
        adj.setdefault(a, []).append(b)
    for a in adj:
        adj[a].sort(key=repr)
    for src in sources:
        path = [src]
        on_path = {src: 0}
        while path[-1] != sink:
            u = path[-1]
            nxt = None
            for v in adj.get(u, []):
                if left[(u, v)] > 0:
                    nxt = v
                    break
            if nxt is None:
                raise ContractViolation("flow decomposition stuck")
            if nxt in on_path:  # cancel the circulation and resume from nxt
                i = on_path[nxt]
                for a, b in zip(path[i:], path[i + 1 :] + [nxt]):
                    left[(a, b)] -= 1
                for w in path[i + 1 :]:
                    del on_path[w]
                path = path[: i + 1]
                continue
            on_path[nxt] = len(path)
            path.append(nxt)
        for a, b in zip(path, path[1:]):
            left[(a, b)] -= 1
            if left[(a, b)] < 0:
                raise ContractViolation("flow decomposition oversubscribed an arc")
        out[src] = path
    return out


def reassign_flow(
    graph: ThresholdGraph,
    caps,
    B,
    phi0: dict,
    F,
    alpha: int,
    beta: int,
    centers,
) -> dict:
    """Scenario repair for the general conservative algorithm."""
    F = frozenset(F)
    if len(F) > alpha:
        raise InstanceError("too many failures")
    if not F <= set(centers):
        raise InstanceError("failures must be centers")
    pad = set(F)
    for b in sorted(B - F):
        if len(pad) >= alpha:
            break
        pad.add(b)
    net, moved = reassignment_network(graph, caps, B, phi0, pad)
    if not moved:
        return dict(phi0)
    res = max_flow(net)
    if res.value != len(moved):
        raise ContractViolation(
            f"reassignment flow saturates {res.value} of {len(moved)} orphans"
        )
    paths = _unit_paths(res.flow, [("y", u) for u in moved], "t")
    hops = graph.hops()
    phi = dict(phi0)
    load = Counter(c for u, c in phi0.items() if c not in pad)
    for u in moved:
        path = paths[("y", u)]
        last = path[-2]
        if not (isinstance(last, tuple) and last[0] == "u"):
            raise ContractViolation("path does not end at a live backup")
        w = last[1]
        if hops[phi0[u]][w] > 6 * alpha:
            raise ContractViolation("rerouted client strays beyond 6*alpha of its center")
        if hops[u][w] > beta + 6 * alpha:
            raise ContractViolation("rerouted client exceeds the distance bound")
        phi[u] = w
        load[w] += 1
    for c, l in load.items():
        if l > caps[c]:
            raise ContractViolation("reassignment exceeds a capacity")
    return phi


def solve_conservative_general(
    inst: MetricInstance, residual: str = "lp"
) -> SolveResult:
    """General conservative solver; radius (beta + 6*alpha) * tau* with
    beta = 9 for the LP residual solver, beta = 1 for the exact one."""
    _require_variant(inst, "conservative", "cons-general")
    if residual == "lp":
        beta = 9

        def res_solver(G, budget, caps):
            return ft_general_connected(G, budget, caps, 0)

    elif residual == "exact":
        beta = 1

        def res_solver(G, budget, caps):
            from .oracle import exact_distance1

            found = exact_distance1(G, budget, caps)
            if found is None:
                return PerTauInfeasible("no exact distance-1 residual solution")
            S, phi = found
            return PerTauSolution(
                tuple(sorted(S)), phi, 1, lambda F: _failfree_only(phi, F), {"kind": "exact"}
            )

    else:
        raise InstanceError(f"unknown residual solver {residual!r}")

    def per_tau(G):
        return solve_components(
            G,
            inst.k,
            inst.alpha,
            inst.capacities,
            lambda sub, budget, caps: conservative_general_connected(
                sub, budget, caps, inst.alpha, res_solver, beta
            ),
        )

    return SolveResult(f"cons-general[{residual}]", inst, sweep(inst, per_tau))


def _failfree_only(phi, F):
    if F:
        raise InstanceError("the exact residual solver only serves the empty scenario")
    return dict(phi)
