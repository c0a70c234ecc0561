"""Problem instances, exact rational metrics, and threshold graphs.

Distances are kept as exact squared values (`Fraction`) so that every
comparison made anywhere in the package is exact: instances given as 2-D
rational points have rational squared distances, and instances given as a
distance matrix are squared losslessly on load.  Nothing downstream ever
takes a square root.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence


class InstanceError(ValueError):
    """Malformed instance data or an operation precondition violated by input."""


class SizeLimitError(RuntimeError):
    """An exact oracle was asked to run above its configured size cap."""


class ContractViolation(RuntimeError):
    """An internal guarantee failed; indicates a bug, not bad input."""


VARIANTS = ("ft", "conservative")

ZERO = Fraction(0)


def _is_plain_int(x) -> bool:
    return type(x) is int


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if _is_plain_int(x):
        return Fraction(x)
    raise InstanceError(f"expected an exact number, got {type(x).__name__}")


def decimal_str(x: Fraction) -> str:
    """Exact decimal rendering of a rational with terminating expansion.

    Raises InstanceError for non-terminating rationals; values parsed from
    JSON numbers always terminate.
    """
    den = x.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        raise InstanceError(f"{x} has no exact decimal form")
    shift = max(twos, fives)
    scaled = x * 10**shift
    digits = str(abs(scaled.numerator)).rjust(shift + 1, "0")
    sign = "-" if x < 0 else ""
    if shift == 0:
        return sign + digits
    head, tail = digits[:-shift], digits[-shift:]
    tail = tail.rstrip("0")
    return sign + head + ("." + tail if tail else "")


@dataclass(frozen=True)
class Radius:
    """An exact length of the form mult * sqrt(base2).

    Sweep radii are integer stretch factors times a threshold tau = sqrt(tau2),
    which is irrational for general point instances.  Comparisons against
    squared distances stay exact.
    """

    mult: int
    base2: Fraction

    @classmethod
    def exact(cls, value: Fraction) -> "Radius":
        value = _to_fraction(value)
        if value < 0:
            raise InstanceError("radius must be non-negative")
        return cls(1, value * value)

    def value_sq(self) -> Fraction:
        return self.mult * self.mult * self.base2

    def covers(self, d2: Fraction) -> bool:
        return d2 <= self.value_sq()

    def __le__(self, other: "Radius") -> bool:
        return self.value_sq() <= other.value_sq()

    def approx(self) -> float:
        return self.mult * math.sqrt(self.base2)

    def display(self) -> str:
        """Exact decimal string when the value is rational, float repr otherwise."""
        sq = self.value_sq()
        p, q = sq.numerator, sq.denominator
        rp, rq = math.isqrt(p), math.isqrt(q)
        if rp * rp == p and rq * rq == q:
            try:
                return decimal_str(Fraction(rp, rq))
            except InstanceError:
                return f"{rp}/{rq}"
        return repr(self.approx())


class ThresholdGraph:
    """Immutable unweighted graph on vertices 0..n-1.

    Built by thresholding a metric (edge iff distance <= tau, u != v) but also
    used for derived graphs (powers, strips, trees over augmented vertex sets).
    All-pairs hop distances are computed lazily and cached; unreachable pairs
    are math.inf.
    """

    __slots__ = ("n", "tau2", "edges", "adj", "_hops")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]], tau2: Fraction | None = None):
        if n < 0:
            raise InstanceError("vertex count must be non-negative")
        norm = set()
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise InstanceError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise InstanceError(f"self-loop at {u}")
            norm.add((u, v) if u < v else (v, u))
        self.n = n
        self.tau2 = tau2
        self.edges = frozenset(norm)
        adj = [set() for _ in range(n)]
        for u, v in norm:
            adj[u].add(v)
            adj[v].add(u)
        self.adj = tuple(frozenset(a) for a in adj)
        self._hops = None

    def hops(self):
        """All-pairs hop distance matrix (list of lists; math.inf if unreachable)."""
        if self._hops is None:
            mat = []
            for s in range(self.n):
                row = [math.inf] * self.n
                row[s] = 0
                q = deque([s])
                while q:
                    u = q.popleft()
                    for w in self.adj[u]:
                        if row[w] is math.inf or row[w] > row[u] + 1:
                            row[w] = row[u] + 1
                            q.append(w)
                mat.append(row)
            self._hops = mat
        return self._hops

    def hop(self, u: int, v: int):
        return self.hops()[u][v]

    def neighborhood(self, U: Iterable[int], ell: int = 1) -> frozenset:
        """Closed ell-hop neighborhood of a vertex set (always contains U)."""
        verts = [U] if isinstance(U, int) else list(U)
        hops = self.hops()
        out = set(verts)
        for u in verts:
            row = hops[u]
            out.update(w for w in range(self.n) if row[w] <= ell)
        return frozenset(out)

    def power(self, ell: int) -> "ThresholdGraph":
        """Graph with an edge wherever the hop distance is between 1 and ell."""
        if ell < 1:
            raise InstanceError("power exponent must be >= 1")
        hops = self.hops()
        edges = [
            (u, v)
            for u in range(self.n)
            for v in range(u + 1, self.n)
            if hops[u][v] <= ell
        ]
        return ThresholdGraph(self.n, edges)

    def components(self) -> tuple[tuple[int, ...], ...]:
        """Connected components as sorted vertex tuples, ordered by minimum vertex."""
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            comp = []
            q = deque([s])
            seen[s] = True
            while q:
                u = q.popleft()
                comp.append(u)
                for w in self.adj[u]:
                    if not seen[w]:
                        seen[w] = True
                        q.append(w)
            comps.append(tuple(sorted(comp)))
        return tuple(sorted(comps, key=lambda c: c[0]))

    def induced(self, vertices: Sequence[int]) -> tuple["ThresholdGraph", tuple[int, ...]]:
        """Induced subgraph with vertices relabeled 0..m-1; returns (graph, orig_ids)."""
        orig = tuple(sorted(set(vertices)))
        pos = {v: i for i, v in enumerate(orig)}
        edges = [
            (pos[u], pos[v])
            for (u, v) in self.edges
            if u in pos and v in pos
        ]
        return ThresholdGraph(len(orig), edges, self.tau2), orig

    def is_connected(self) -> bool:
        return self.n <= 1 or len(self.components()) == 1

    def __repr__(self):
        return f"ThresholdGraph(n={self.n}, m={len(self.edges)}, tau2={self.tau2})"


def strip_zero_zero_edges(graph: ThresholdGraph, capacities: Sequence[int]) -> ThresholdGraph:
    """Drop every edge whose two endpoints both have capacity zero.

    Used by the uniform-capacity pipelines: no assignment ever crosses such an
    edge (a serving center has positive capacity), so distance-1 feasibility is
    unchanged while hop distances can only grow.
    """
    if len(capacities) != graph.n:
        raise InstanceError("capacity vector length mismatch")
    kept = [
        (u, v)
        for (u, v) in graph.edges
        if capacities[u] > 0 or capacities[v] > 0
    ]
    return ThresholdGraph(graph.n, kept, graph.tau2)


def uniform_capacity_level(capacities: Sequence[int]) -> int:
    """The L of a {0,L} capacity vector; raises InstanceError otherwise."""
    levels = sorted({c for c in capacities if c != 0})
    if len(levels) > 1:
        raise InstanceError(f"capacities are not of {{0,L}} form: levels {levels}")
    return levels[0] if levels else 0


def _validate_square(rows, n, what):
    if len(rows) != n:
        raise InstanceError(f"{what} must have {n} rows")
    for r in rows:
        if len(r) != n:
            raise InstanceError(f"{what} must be {n}x{n}")


def _triangle_sq_ok(a2: Fraction, b2: Fraction, c2: Fraction) -> bool:
    # sqrt(a2) <= sqrt(b2) + sqrt(c2), decided without square roots
    diff = a2 - b2 - c2
    return diff <= 0 or diff * diff <= 4 * b2 * c2


@dataclass(frozen=True)
class MetricInstance:
    """A capacitated fault-tolerant k-center instance.

    `d2` holds exact squared distances.  Exactly one of `points` / `dist`
    reflects how the instance was specified and drives serialization.
    """

    name: str
    n: int
    k: int
    alpha: int
    variant: str
    capacities: tuple[int, ...]
    d2: tuple[tuple[Fraction, ...], ...]
    points: tuple[tuple[Fraction, Fraction], ...] | None = None
    dist: tuple[tuple[Fraction, ...], ...] | None = None

    # -- construction ---------------------------------------------------

    @classmethod
    def from_points(cls, points, k, alpha, capacities, variant="ft", name="instance"):
        pts = tuple((_to_fraction(x), _to_fraction(y)) for x, y in points)
        n = len(pts)
        d2 = tuple(
            tuple(
                (pts[i][0] - pts[j][0]) ** 2 + (pts[i][1] - pts[j][1]) ** 2
                for j in range(n)
            )
            for i in range(n)
        )
        inst = cls(name, n, k, alpha, variant, tuple(capacities), d2, points=pts)
        inst._validate(check_triangle=False)  # Euclidean metrics satisfy it
        return inst

    @classmethod
    def from_matrix(cls, dist, k, alpha, capacities, variant="ft", name="instance"):
        rows = tuple(tuple(_to_fraction(x) for x in row) for row in dist)
        n = len(rows)
        _validate_square(rows, n, "dist")
        d2 = tuple(tuple(x * x for x in row) for row in rows)
        inst = cls(name, n, k, alpha, variant, tuple(capacities), d2, dist=rows)
        inst._validate(check_triangle=True)
        return inst

    def _validate(self, check_triangle: bool):
        if not isinstance(self.name, str):
            raise InstanceError("name must be a string")
        if self.variant not in VARIANTS:
            raise InstanceError(f"variant must be one of {VARIANTS}")
        n = self.n
        if n < 1:
            raise InstanceError("need at least one vertex")
        if not (_is_plain_int(self.k) and _is_plain_int(self.alpha)):
            raise InstanceError("k and alpha must be integers")
        if not 1 <= self.k <= n:
            raise InstanceError(f"k={self.k} out of range 1..{n}")
        if not 0 <= self.alpha < self.k:
            raise InstanceError(f"alpha={self.alpha} must satisfy 0 <= alpha < k")
        if len(self.capacities) != n:
            raise InstanceError("capacities length mismatch")
        for c in self.capacities:
            if not _is_plain_int(c) or c < 0:
                raise InstanceError("capacities must be non-negative integers")
        _validate_square(self.d2, n, "squared distances")
        for i in range(n):
            if self.d2[i][i] != 0:
                raise InstanceError(f"nonzero self-distance at {i}")
            for j in range(n):
                if self.d2[i][j] < 0:
                    raise InstanceError("negative distance")
                if self.d2[i][j] != self.d2[j][i]:
                    raise InstanceError(f"asymmetric distances at ({i},{j})")
        if check_triangle:
            for i in range(n):
                for j in range(n):
                    for m in range(n):
                        if not _triangle_sq_ok(self.d2[i][j], self.d2[i][m], self.d2[m][j]):
                            raise InstanceError(
                                f"triangle inequality fails on ({i},{j}) via {m}"
                            )

    # -- thresholds ------------------------------------------------------

    def thresholds_sq(self) -> tuple[Fraction, ...]:
        """Sorted distinct squared distances, always including 0."""
        vals = {ZERO}
        for row in self.d2:
            vals.update(row)
        return tuple(sorted(vals))

    def threshold_graph(self, tau2: Fraction) -> ThresholdGraph:
        """Unweighted graph with an edge iff the squared distance is <= tau2."""
        edges = [
            (u, v)
            for u in range(self.n)
            for v in range(u + 1, self.n)
            if self.d2[u][v] <= tau2
        ]
        return ThresholdGraph(self.n, edges, tau2=_to_fraction(tau2))

    # -- serialization ---------------------------------------------------

    def to_payload(self) -> dict:
        out = {
            "name": self.name,
            "n": self.n,
            "k": self.k,
            "alpha": self.alpha,
            "variant": self.variant,
            "capacities": list(self.capacities),
        }
        if self.points is not None:
            out["points"] = [list(p) for p in self.points]
        else:
            out["dist"] = [list(r) for r in self.dist]
        return out

    def to_json(self) -> str:
        return canonical_json(self.to_payload())

    @classmethod
    def from_payload(cls, data) -> "MetricInstance":
        if not isinstance(data, dict):
            raise InstanceError("instance JSON must be an object")
        keys = set(data)
        required = {"name", "n", "k", "alpha", "variant", "capacities"}
        missing = required - keys
        if missing:
            raise InstanceError(f"missing keys: {sorted(missing)}")
        has_dist = "dist" in keys
        has_points = "points" in keys
        if has_dist == has_points:
            raise InstanceError("exactly one of 'dist' or 'points' is required")
        extra = keys - required - {"dist", "points"}
        if extra:
            raise InstanceError(f"unknown keys: {sorted(extra)}")
        n = data["n"]
        if not _is_plain_int(n):
            raise InstanceError("n must be an integer")
        caps = data["capacities"]
        if not isinstance(caps, list):
            raise InstanceError("capacities must be a list")
        common = dict(
            k=data["k"],
            alpha=data["alpha"],
            capacities=caps,
            variant=data["variant"],
            name=data["name"],
        )
        if has_points:
            pts = data["points"]
            if not isinstance(pts, list) or len(pts) != n:
                raise InstanceError("points must be a list of n pairs")
            for p in pts:
                if not isinstance(p, list) or len(p) != 2:
                    raise InstanceError("each point must be an [x, y] pair")
            inst = cls.from_points(pts, **common)
        else:
            inst = cls.from_matrix(data["dist"], **common)
        if inst.n != n:
            raise InstanceError("n does not match data size")
        return inst

    @classmethod
    def from_json(cls, text: str) -> "MetricInstance":
        return cls.from_payload(parse_exact_json(text))


def parse_exact_json(text: str):
    """json.loads with floats parsed as exact Fractions (no binary rounding)."""

    def bad_constant(name):
        raise InstanceError(f"non-finite number {name!r} not allowed")

    try:
        return json.loads(text, parse_float=Fraction, parse_constant=bad_constant)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"invalid JSON: {exc}") from exc


def _render_json(obj, indent: int) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        parts = [
            f'{inner}{json.dumps(key)}: {_render_json(val, indent + 1)}'
            for key, val in obj.items()
        ]
        return "{\n" + ",\n".join(parts) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [_render_json(x, indent + 1) for x in obj]
        flat = "[" + ", ".join(items) + "]"
        if len(flat) + len(pad) <= 100 and "\n" not in flat:
            return flat
        return "[\n" + ",\n".join(inner + x for x in items) + "\n" + pad + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, Fraction):
        return decimal_str(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return repr(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise InstanceError(f"cannot serialize {type(obj).__name__}")


def canonical_json(payload) -> str:
    """Two-space indented JSON with exact decimal numbers and a trailing newline.

    Key order is whatever the payload dict carries; builders emit the fixed
    canonical order, so serialize(parse(x)) is a canonical form of x.
    """
    return _render_json(payload, 0) + "\n"


def load_instance(path) -> MetricInstance:
    with open(path, "r", encoding="utf-8") as fh:
        return MetricInstance.from_json(fh.read())


def save_instance(inst: MetricInstance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(inst.to_json())


def hop_metric_instance(
    graph: ThresholdGraph,
    k: int,
    alpha: int,
    capacities: Sequence[int],
    variant: str = "ft",
    name: str = "hop-instance",
) -> MetricInstance:
    """Instance whose metric is the hop distance of a connected graph."""
    if not graph.is_connected():
        raise InstanceError("hop metric needs a connected graph")
    hops = graph.hops()
    dist = [[int(hops[i][j]) for j in range(graph.n)] for i in range(graph.n)]
    return MetricInstance.from_matrix(dist, k, alpha, capacities, variant, name)
