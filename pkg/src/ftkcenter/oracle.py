"""Ground-truth tools: solution verifiers, exhaustive optimum search on small
instances, the unbounded-integrality-gap family, and random instance
generators.

The exhaustive searches are exponential by design; they exist to certify the
approximation factors of the polynomial algorithms on small inputs, so they
refuse anything large unless explicitly overridden.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

from .flow import FlowNetwork, INF, capacitated_assignment, max_flow
from .instance import (
    InstanceError,
    MetricInstance,
    Radius,
    SizeLimitError,
    ThresholdGraph,
)


@dataclass(frozen=True)
class VerifyReport:
    ok: bool
    detail: str = ""


# -- verifiers ---------------------------------------------------------------


def verify_ft(inst: MetricInstance, centers, radius: Radius) -> VerifyReport:
    """Check that every failure scenario leaves a capacity-respecting
    assignment within the radius.

    Only scenarios of size exactly alpha are tried: an assignment that avoids
    a failure set also serves every subset of it.
    """
    S = sorted(set(centers))
    if len(S) != inst.k or len(S) != len(set(centers)):
        return VerifyReport(False, f"expected {inst.k} distinct centers, got {centers!r}")
    if not all(isinstance(c, int) and 0 <= c < inst.n for c in S):
        return VerifyReport(False, "centers out of range")
    caps = {c: inst.capacities[c] for c in S}
    for F in combinations(S, inst.alpha):
        live = [c for c in S if c not in F]
        allowed = {
            u: [c for c in live if radius.covers(inst.d2[u][c])]
            for u in range(inst.n)
        }
        phi, witness = capacitated_assignment(list(range(inst.n)), live, allowed, caps)
        if phi is None:
            return VerifyReport(
                False,
                f"failures {sorted(F)}: clients {sorted(witness.clients)} see "
                f"capacity {witness.capacity} < {witness.demand}",
            )
    return VerifyReport(True, "all scenarios served")


def verify_conservative(
    inst: MetricInstance, centers, phi0, radius: Radius
) -> VerifyReport:
    """Check the base assignment plus every scenario's local repair.

    A scenario passes when the orphaned clients (and only those) can be
    rerouted to surviving centers whose spare capacity, after the untouched
    clients keep their seats, suffices.
    """
    S = sorted(set(centers))
    if len(S) != inst.k or len(S) != len(set(centers)):
        return VerifyReport(False, f"expected {inst.k} distinct centers, got {centers!r}")
    if set(phi0) != set(range(inst.n)):
        return VerifyReport(False, "base assignment must cover every vertex")
    load = {c: 0 for c in S}
    for u, c in phi0.items():
        if c not in load:
            return VerifyReport(False, f"vertex {u} assigned to non-center {c}")
        if not radius.covers(inst.d2[u][c]):
            return VerifyReport(False, f"vertex {u} is outside the radius of its center {c}")
        load[c] += 1
    for c, l in load.items():
        if l > inst.capacities[c]:
            return VerifyReport(False, f"center {c} carries {l} > capacity {inst.capacities[c]}")
    for F in combinations(S, inst.alpha):
        moved = sorted(u for u in range(inst.n) if phi0[u] in F)
        if not moved:
            continue
        live = [c for c in S if c not in F]
        spare = {c: inst.capacities[c] - load[c] for c in live}
        allowed = {
            u: [c for c in live if radius.covers(inst.d2[u][c])] for u in moved
        }
        phi, witness = capacitated_assignment(moved, live, allowed, spare)
        if phi is None:
            return VerifyReport(
                False,
                f"failures {sorted(F)}: orphans {sorted(witness.clients)} see spare "
                f"capacity {witness.capacity} < {witness.demand}",
            )
    return VerifyReport(True, "base assignment and all repairs served")


# -- exhaustive optima -------------------------------------------------------


def _covers_enough(inst: MetricInstance, S, tau2) -> bool:
    """Necessary: alpha+1 positive-capacity centers within tau of everyone."""
    need = inst.alpha + 1
    for u in range(inst.n):
        hits = 0
        for c in S:
            if inst.capacities[c] > 0 and inst.d2[u][c] <= tau2:
                hits += 1
                if hits >= need:
                    break
        if hits < need:
            return False
    return True


def _capacity_enough(inst: MetricInstance, S) -> bool:
    caps = sorted((inst.capacities[c] for c in S), reverse=True)
    return sum(caps[: len(S) - inst.alpha]) >= inst.n


def ft_feasible_at(inst: MetricInstance, tau2) -> Optional[tuple]:
    """Some size-k center set surviving every scenario at radius tau, or None."""
    r = Radius(1, tau2)
    for S in combinations(range(inst.n), inst.k):
        if not _capacity_enough(inst, S):
            continue
        if not _covers_enough(inst, S, tau2):
            continue
        if verify_ft(inst, S, r).ok:
            return S
    return None


def _phi_search(inst: MetricInstance, S, tau2):
    """Lowest-index-first search over base assignments, testing scenarios at
    the leaves.  Returns a working phi0 or None."""
    n = inst.n
    r = Radius(1, tau2)
    options = []
    for u in range(n):
        opts = [c for c in S if inst.d2[u][c] <= tau2]
        if not opts:
            return None
        options.append(opts)
    load = {c: 0 for c in S}
    phi = {}

    def leaf_ok() -> bool:
        for F in combinations(S, inst.alpha):
            moved = [u for u in range(n) if phi[u] in F]
            if not moved:
                continue
            live = [c for c in S if c not in F]
            spare = {c: inst.capacities[c] - load[c] for c in live}
            allowed = {u: [c for c in live if inst.d2[u][c] <= tau2] for u in moved}
            got, _ = capacitated_assignment(moved, live, allowed, spare)
            if got is None:
                return False
        return True

    def rec(u: int):
        if u == n:
            return leaf_ok()
        for c in options[u]:
            if load[c] < inst.capacities[c]:
                phi[u] = c
                load[c] += 1
                if rec(u + 1):
                    return True
                load[c] -= 1
                del phi[u]
        return False

    if rec(0):
        return dict(phi)
    return None


def conservative_feasible_at(inst: MetricInstance, tau2) -> Optional[tuple]:
    """Some (centers, phi0) surviving every scenario conservatively, or None."""
    for S in combinations(range(inst.n), inst.k):
        if not _capacity_enough(inst, S):
            continue
        if not _covers_enough(inst, S, tau2):
            continue
        if verify_ft(inst, S, Radius(1, tau2)).ok is False:
            continue  # conservative solutions are in particular fault-tolerant
        phi0 = _phi_search(inst, S, tau2)
        if phi0 is not None:
            return S, phi0
    return None


def _binary_search_opt(inst: MetricInstance, feasible_at):
    taus = inst.thresholds_sq()
    best = feasible_at(inst, taus[-1])
    if best is None:
        return None, None
    lo, hi = 0, len(taus) - 1  # hi is feasible
    while lo < hi:
        mid = (lo + hi) // 2
        wit = feasible_at(inst, taus[mid])
        if wit is None:
            lo = mid + 1
        else:
            hi = mid
            best = wit
    return taus[hi], best


def exact_opt_ft(inst: MetricInstance, max_n: int = 10, max_alpha: int = 3):
    """Smallest threshold with a fault-tolerant solution, by exhaustive search.

    Feasibility is monotone in the threshold, so a binary search over the
    distinct distances is sound.  Returns (opt_sq, witness_centers) or
    (None, None) when no size-k set works even on the complete graph.
    """
    if inst.n > max_n:
        raise SizeLimitError(f"n={inst.n} exceeds max_n={max_n}")
    if inst.alpha > max_alpha:
        raise SizeLimitError(f"alpha={inst.alpha} exceeds max_alpha={max_alpha}")
    return _binary_search_opt(inst, ft_feasible_at)


def exact_opt_conservative(
    inst: MetricInstance, max_n: int = 8, max_k: int = 4, max_alpha: int = 2
):
    """Smallest threshold with a conservative solution, exhaustively.

    Returns (opt_sq, (centers, phi0)) or (None, None).
    """
    if inst.n > max_n:
        raise SizeLimitError(f"n={inst.n} exceeds max_n={max_n}")
    if inst.k > max_k:
        raise SizeLimitError(f"k={inst.k} exceeds max_k={max_k}")
    if inst.alpha > max_alpha:
        raise SizeLimitError(f"alpha={inst.alpha} exceeds max_alpha={max_alpha}")
    return _binary_search_opt(inst, conservative_feasible_at)


def exact_distance1(graph: ThresholdGraph, k: int, caps: Sequence[int]):
    """A size-k set serving every vertex from its closed neighborhood, or None.

    Exhaustive; used as the stretch-1 residual solver and in tests.
    """
    if k > graph.n:
        return None
    balls = [sorted(graph.adj[u] | {u}) for u in range(graph.n)]
    for S in combinations(range(graph.n), k):
        sset = set(S)
        allowed = {u: [c for c in balls[u] if c in sset] for u in range(graph.n)}
        phi, _ = capacitated_assignment(
            list(range(graph.n)), list(S), allowed, {c: caps[c] for c in S}
        )
        if phi is not None:
            return S, phi
    return None


# -- LP relaxation check and the gap family ----------------------------------


def relaxed_ilp_holds(
    graph: ThresholdGraph, y, caps: Sequence[int], k: int, alpha: int
) -> bool:
    """Whether fractional y survives every failure scenario at distance 1.

    Checks mass k, bounds, and for each F (any alpha vertices, not only
    centers) a max-flow certifying that closed neighborhoods minus F hold
    enough capacity-weighted mass for all clients at once.
    """
    n = graph.n
    yv = {v: Fraction(y.get(v, 0)) for v in range(n)}
    if sum(yv.values()) != k:
        return False
    if any(val < 0 or val > 1 for val in yv.values()):
        return False
    for F in combinations(range(n), alpha):
        fset = set(F)
        net = FlowNetwork("s", "t")
        for u in range(n):
            net.add_arc("s", ("a", u), 1)
            for w in (graph.adj[u] | {u}) - fset:
                net.add_arc(("a", u), ("b", w), INF)
        for w in range(n):
            if w not in fset:
                net.add_arc(("b", w), "t", yv[w] * caps[w])
        if max_flow(net).value < n:
            return False
    return True


def gap_instance(s: int) -> MetricInstance:
    """Family with optimal radius s/2 whose distance-1 relaxation is feasible.

    s*s vertices on a cycle, distance = ceil(cyclic hops / s), k = s centers,
    alpha = s-1 failures, capacities never bind.  Even s >= 2.
    """
    if s < 2 or s % 2:
        raise InstanceError("s must be an even integer >= 2")
    n = s * s
    dist = [
        [Fraction(math.ceil(min(abs(i - j), n - abs(i - j)) / s)) for j in range(n)]
        for i in range(n)
    ]
    return MetricInstance.from_matrix(
        dist, s, s - 1, [n] * n, variant="ft", name=f"gap-{n}"
    )


# -- random instances --------------------------------------------------------


def random_points(rng, n: int, span: int = 12):
    return [(rng.randrange(span), rng.randrange(span)) for _ in range(n)]


def random_point_instance(
    rng,
    n: int,
    k: int,
    alpha: int,
    variant: str = "ft",
    caps_mode: str = "general",
    span: int = 12,
    name: str = "random",
) -> MetricInstance:
    """Random integer-grid instance; squared distances stay exact.

    caps_mode "general" draws each capacity from 1..n, "uniform" picks one
    level L and zeroes a few vertices, "unit" gives everyone capacity 1.
    """
    pts = random_points(rng, n, span)
    if caps_mode == "general":
        caps = [rng.randint(1, n) for _ in range(n)]
    elif caps_mode == "uniform":
        L = rng.randint(1, n)
        caps = [L if rng.random() < 0.85 else 0 for _ in range(n)]
        if all(c == 0 for c in caps):
            caps[rng.randrange(n)] = L
    elif caps_mode == "unit":
        caps = [1] * n
    else:
        raise InstanceError(f"unknown caps_mode {caps_mode!r}")
    return MetricInstance.from_points(pts, k, alpha, caps, variant=variant, name=name)


def random_feasible_instance(
    rng,
    n: int,
    k: int,
    alpha: int,
    variant: str = "ft",
    caps_mode: str = "general",
    span: int = 12,
    max_tries: int = 200,
):
    """Draw random instances until the exhaustive oracle certifies one.

    Returns (instance, optimum_sq, witness); the caller gets the optimum for
    free instead of re-running the oracle.
    """
    for t in range(max_tries):
        inst = random_point_instance(
            rng, n, k, alpha, variant=variant, caps_mode=caps_mode, span=span,
            name=f"random-{variant}-{t}",
        )
        if variant == "conservative":
            opt2, wit = exact_opt_conservative(inst)
        else:
            opt2, wit = exact_opt_ft(inst)
        if opt2 is not None:
            return inst, opt2, wit
    raise RuntimeError("no feasible instance found; loosen the parameters")


def random_connected_graph(rng, n: int, extra: int = 0) -> ThresholdGraph:
    """Random spanning tree plus `extra` random non-tree edges."""
    edges = set()
    order = list(range(n))
    rng.shuffle(order)
    for i in range(1, n):
        a = order[i]
        b = order[rng.randrange(i)]
        edges.add((min(a, b), max(a, b)))
    tries = 0
    while len(edges) < n - 1 + extra and tries < 50 * (extra + 1):
        a, b = rng.randrange(n), rng.randrange(n)
        tries += 1
        if a != b:
            edges.add((min(a, b), max(a, b)))
    return ThresholdGraph(n, sorted(edges))
