"""Self-avoiding walks: rooted counts, separating domain walls and their partition function.

Energies are in nats.  A walk on a :class:`~mielab.lattice.DualGraph` is a
sequence of dual edges; its length is the number of edges.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

from .lattice import separates

# ---------------------------------------------------------------------------
# rooted counts on infinite lattices


def _nbrs_square(x, y):
    return ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1))


def _nbrs_triangular(x, y):
    return ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1), (x + 1, y + 1), (x - 1, y - 1))


def _nbrs_hexagonal(x, y):
    # brick-wall embedding of the honeycomb lattice
    return ((x + 1, y), (x - 1, y), (x, y + 1) if (x + y) % 2 == 0 else (x, y - 1))


NEIGHBOURS = {"square": _nbrs_square, "triangular": _nbrs_triangular, "hexagonal": _nbrs_hexagonal}


def _walk_dfs(kind, n_max, radius, closed):
    nbrs = NEIGHBOURS[kind]
    counts = [0] * (n_max + 1)
    counts[0] = 1
    visited = {(0, 0)}

    def check(p):
        if radius is not None and max(abs(p[0]), abs(p[1])) > radius:
            raise ValueError(f"patch of radius {radius} is too small for length {n_max}")

    def rec(p, depth):
        for q in nbrs(*p):
            if closed and q == (0, 0) and depth + 1 >= 3:
                counts[depth + 1] += 1
                continue
            if q in visited:
                continue
            check(q)
            if not closed:
                counts[depth + 1] += 1
            if depth + 1 == n_max:
                continue
            visited.add(q)
            rec(q, depth + 1)
            visited.remove(q)

    if n_max > 0:
        rec((0, 0), 0)
    return counts


@lru_cache(maxsize=None)
def count_table(kind, n_max, radius=None):
    """Rooted self-avoiding walk counts ``c_0 .. c_n_max`` (``c_0 = 1``)."""
    if kind not in NEIGHBOURS:
        raise ValueError(f"unknown lattice kind {kind!r}")
    if n_max < 0:
        raise ValueError("n must be non-negative")
    return tuple(_walk_dfs(kind, n_max, radius, closed=False))


def count_rooted_walks(kind, n, radius=None):
    """Number of ``n``-step self-avoiding walks from the origin."""
    return count_table(kind, n, radius)[n]


@lru_cache(maxsize=None)
def polygon_table(kind, l_max):
    """Counts of self-avoiding polygons through the origin, lengths ``0 .. l_max``."""
    if kind not in NEIGHBOURS:
        raise ValueError(f"unknown lattice kind {kind!r}")
    raw = _walk_dfs(kind, l_max, None, closed=True) if l_max > 0 else [1]
    # each polygon through the origin is traversed in two directions
    return tuple([0] + [c // 2 for c in raw[1:]])


def count_rooted_polygons(kind, l):
    """Number of self-avoiding polygons of length ``l`` passing through the origin."""
    if l < 0:
        raise ValueError("length must be non-negative")
    if kind == "square" and (l < 4 or l % 2):
        return 0
    if l < 3:
        return 0
    return polygon_table(kind, l)[l]


# ---------------------------------------------------------------------------
# domain walls on dual graphs


@dataclass(frozen=True)
class Walk:
    edges: tuple
    vertices: tuple

    @property
    def length(self):
        return len(self.edges)

    @property
    def anchor(self):
        return "closed_loop" if self.vertices[0] == self.vertices[-1] else "boundary_to_boundary"

    def is_self_avoiding(self):
        inner = self.vertices[:-1] if self.anchor == "closed_loop" else self.vertices
        return len(set(inner)) == len(inner)

    def record(self):
        return {"length": self.length, "edges": list(self.edges)}


def admissible_anchors(dual, geometry):
    """Virtual vertices on which a wall of the given geometry may end."""
    if geometry == "strip":
        return [dual.virtual[s] for s in ("left", "right") if s in dual.virtual]
    if geometry == "half_chain":
        return sorted(dual.virtual.values())
    return []


def allowed_dual_edges(dual, partition):
    """Dual edges a domain wall may use: never inside A or inside C (their spins are fixed equal)."""
    out = set()
    for k, e in enumerate(dual.crossing):
        i, j = dual.primal_edges[e]
        if (i in partition.A and j in partition.A) or (i in partition.C and j in partition.C):
            continue
        out.add(k)
    return out


def _open_paths(dual, allowed, anchors, l_max, allow_same):
    inc = dual.incidence()
    anchor_set = set(anchors)
    found = []
    for s in sorted(anchors):
        path_v, path_e = [s], []
        on_path = {s}

        def rec(v):
            for k in inc[v]:
                if k not in allowed or (path_e and k == path_e[-1]):
                    continue
                a, b = dual.edges[k]
                w = b if a == v else a
                if dual.is_virtual(w):
                    if w not in anchor_set or len(path_e) + 1 > l_max:
                        continue
                    if w == s:
                        if not allow_same or not path_e:
                            continue
                    elif w < s:
                        continue
                    edges = tuple(path_e) + (k,)
                    if w == s and edges > tuple(reversed(edges)):
                        continue
                    found.append(Walk(edges, tuple(path_v) + (w,)))
                    continue
                if w in on_path or len(path_e) + 1 >= l_max:
                    continue
                on_path.add(w)
                path_v.append(w)
                path_e.append(k)
                rec(w)
                path_e.pop()
                path_v.pop()
                on_path.remove(w)

        rec(s)
    return found


def _closed_loops(dual, allowed, l_max):
    inc = dual.incidence()
    found = []
    for s in range(dual.n_faces):
        path_v, path_e = [s], []
        on_path = {s}

        def rec(v):
            for k in inc[v]:
                if k not in allowed or (path_e and k == path_e[-1]):
                    continue
                a, b = dual.edges[k]
                w = b if a == v else a
                if dual.is_virtual(w) or w < s:
                    continue
                if w == s:
                    if len(path_e) + 1 >= 3 and len(path_e) + 1 <= l_max and path_e[0] < k:
                        found.append(Walk(tuple(path_e) + (k,), tuple(path_v) + (s,)))
                    continue
                if w in on_path or len(path_e) + 1 >= l_max:
                    continue
                on_path.add(w)
                path_v.append(w)
                path_e.append(k)
                rec(w)
                path_e.pop()
                path_v.pop()
                on_path.remove(w)

        rec(s)
    return found


def enumerate_separating_walks(dual, partition, l_max):
    """All self-avoiding separating domain walls with at most ``l_max`` edges.

    Strip walls run between the left and right boundary; half-chain walls may
    join any two boundary points (including two points on the same side);
    bulk-triple walls are closed loops in the interior.
    """
    if l_max < 1:
        return []
    allowed = allowed_dual_edges(dual, partition)
    if partition.geometry == "bulk_triple":
        cands = _closed_loops(dual, allowed, l_max)
    else:
        anchors = admissible_anchors(dual, partition.geometry)
        cands = _open_paths(dual, allowed, anchors, l_max, allow_same=partition.geometry != "strip")
    walls = [w for w in cands if separates(w.edges, partition, dual)]
    walls.sort(key=lambda w: (w.length, w.edges))
    return walls


def c_side_region(walk_edges, partition, dual):
    """Primal vertices reachable from C without crossing the wall."""
    cut = {dual.crossing[k] for k in walk_edges}
    adj = [[] for _ in range(dual.primal_n)]
    for k, (i, j) in enumerate(dual.primal_edges):
        if k not in cut:
            adj[i].append(j)
            adj[j].append(i)
    seen = set(partition.C)
    queue = deque(partition.C)
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return frozenset(seen)


# ---------------------------------------------------------------------------
# weights and partition function


@dataclass
class WeightModel:
    """Energy rule ``H[W]`` for domain walls, in nats.

    ``per_edge``: ``H = beta * |W|``.
    ``edge_sum``: ``H = sum of per-primal-edge costs`` over crossed edges.
    ``entropy_driven``: ``H = S2(region) / 2`` with ``region`` the C side of the wall.
    """

    mode: str
    beta: float | None = None
    edge_costs: dict | None = None
    renyi2: Callable | None = None
    dual: object = None
    partition: object = None
    _memo: dict = field(default_factory=dict, repr=False)

    @classmethod
    def per_edge(cls, beta):
        return cls("per_edge", beta=float(beta))

    @classmethod
    def edge_sum(cls, costs):
        return cls("edge_sum", edge_costs=dict(costs))

    @classmethod
    def entropy_driven(cls, renyi2, dual, partition):
        return cls("entropy_driven", renyi2=renyi2, dual=dual, partition=partition)

    def energy(self, walk, dual=None):
        if self.mode == "per_edge":
            return self.beta * walk.length
        if self.mode == "edge_sum":
            d = dual if dual is not None else self.dual
            return sum(self.edge_costs.get(d.crossing[k], 0.0) for k in walk.edges)
        if self.mode == "entropy_driven":
            region = c_side_region(walk.edges, self.partition, self.dual)
            if region not in self._memo:
                self._memo[region] = float(self.renyi2(region))
            return 0.5 * self._memo[region]
        raise ValueError(f"unknown weight mode {self.mode!r}")


@dataclass(frozen=True)
class SawPartition:
    exact_sum: float
    tail_bound: float
    l_max: int
    n_walks: int
    tail_available: bool
    growth_rate: float | None = None
    anchors: int | None = None

    @property
    def total_upper(self):
        return self.exact_sum + self.tail_bound

    def to_dict(self):
        d = {
            "exact_sum": self.exact_sum,
            "tail_bound": self.tail_bound if math.isfinite(self.tail_bound) else None,
            "total_upper": self.total_upper if math.isfinite(self.total_upper) else None,
            "l_max": self.l_max,
            "n_walks": self.n_walks,
            "tail_available": self.tail_available,
            "growth_rate": self.growth_rate,
            "anchors": self.anchors,
        }
        return d


def longest_possible_walk(dual, geometry):
    if geometry == "bulk_triple":
        return dual.n_faces
    return dual.n_faces + 1


def submultiplicative_bound(counts, n, k):
    """Upper bound on ``c_n`` from ``c_{a+b} <= c_a c_b`` using counts up to ``k``."""
    if n < len(counts):
        return counts[n]
    q, r = divmod(n, k)
    return counts[k] ** q * counts[r]


def strip_tail_bound(beta, l_max, anchors, counts, k):
    """Certified weight of all strip walls longer than ``l_max``.

    A wall of length ``l`` is an anchor edge followed by an ``(l-1)``-step
    self-avoiding walk on the honeycomb lattice, hence at most
    ``anchors * c_{l-1}`` walls, with ``c_n <= c_k^floor(n/k) c_{n mod k}``.
    Returns ``inf`` when the geometric series diverges.
    """
    ck = counts[k]
    rho = ck * math.exp(-beta * k)
    if rho >= 1.0:
        return math.inf
    n0 = l_max - 1  # walls with n = l - 1 > n0 are omitted
    q0, r0 = divmod(n0, k)
    partial = sum(ck**q0 * counts[r] * math.exp(-beta * (q0 * k + r + 1)) for r in range(r0 + 1, k))
    block = sum(counts[r] * math.exp(-beta * (r + 1)) for r in range(k))
    full = block * rho ** (q0 + 1) / (1.0 - rho)
    return anchors * (partial + full)


def partition_function(dual, partition, weight, l_max, *, walks=None, k=12, counts=None):
    """Boltzmann sum over separating walls with a certified tail when available."""
    if walks is None:
        walks = enumerate_separating_walks(dual, partition, l_max)
    exact = math.fsum(math.exp(-weight.energy(w, dual)) for w in walks if w.length <= l_max)
    longest = longest_possible_walk(dual, partition.geometry)
    if l_max >= longest:
        return SawPartition(exact, 0.0, l_max, len(walks), True)
    if weight.mode != "per_edge" or partition.geometry != "strip" or "left" not in dual.virtual:
        return SawPartition(exact, math.inf, l_max, len(walks), False)
    if counts is None:
        counts = count_table("hexagonal", k)
    allowed = allowed_dual_edges(dual, partition)
    left = dual.virtual["left"]
    anchors = sum(1 for e, (u, v) in enumerate(dual.edges) if e in allowed and left in (u, v))
    tail = strip_tail_bound(weight.beta, l_max, anchors, counts, k)
    growth = counts[k] ** (1.0 / k)
    return SawPartition(exact, tail, l_max, len(walks), math.isfinite(tail), growth, anchors)


# ---------------------------------------------------------------------------
# closed-loop bounds for bulk sites


def bulk_loop_weights(beta, log_mu_upper, l0):
    """Loop-weight bounds for polygons around isolated bulk sites.

    With ``nu = exp(log_mu - beta)`` and ``c_l <= mu^l``:
    ``w(l0) <= nu^l0 / (1 - nu)``; loops around one site weigh at most
    ``2 nu^4 / (1 - nu)^3`` (area at most ``l^2/16``); two separate loops at most
    the square of that.
    """
    if math.isinf(beta) and beta > 0:
        nu = 0.0
    else:
        nu = math.exp(log_mu_upper - beta)
    if nu >= 1.0:
        raise ValueError(f"nu = {nu:.4f} >= 1: the loop gas is not in its ordered phase")
    w_tail = nu**l0 / (1.0 - nu)
    type1 = 2.0 * nu**4 / (1.0 - nu) ** 3
    return {"nu": nu, "w_tail": w_tail, "type1_bound": type1, "type3_bound": type1**2}
