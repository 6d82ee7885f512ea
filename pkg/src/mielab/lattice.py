"""Open-boundary lattices, region partitions, cell blocking and dual graphs.

Sites are indexed row-major, ``index = y * width + x``, with ``y = 0`` the
bottom row.  Everything here is immutable after construction.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations

SIDES = ("left", "right", "bottom", "top")


def _normalise_edges(edges):
    out = set()
    for i, j in edges:
        if i == j:
            raise ValueError(f"self-loop at vertex {i}")
        out.add((min(i, j), max(i, j)))
    return tuple(sorted(out))


def _triangles(n_vertices, edges):
    adj = [set() for _ in range(n_vertices)]
    for i, j in edges:
        adj[i].add(j)
        adj[j].add(i)
    faces = []
    for i, j in edges:
        for k in adj[i] & adj[j]:
            if k > j:
                faces.append((i, j, k))
    return tuple(sorted(faces))


@dataclass(frozen=True)
class SiteLattice:
    """Rectangular open-boundary lattice of ``width x height`` sites.

    ``kind="triangular"`` adds the diagonal ``(x, y)-(x+1, y+1)`` to every
    square plaquette, which makes the lattice a triangulation while keeping
    it planar.
    """

    kind: str
    width: int
    height: int
    edges: tuple = field(repr=False)

    @property
    def n_vertices(self):
        return self.width * self.height

    n_sites = n_vertices

    def index(self, x, y):
        return y * self.width + x

    def coords(self, i):
        return i % self.width, i // self.width

    def rows(self):
        w = self.width
        return [list(range(y * w, (y + 1) * w)) for y in range(self.height)]

    def sides(self, i):
        x, y = self.coords(i)
        s = set()
        if x == 0:
            s.add("left")
        if x == self.width - 1:
            s.add("right")
        if y == 0:
            s.add("bottom")
        if y == self.height - 1:
            s.add("top")
        return s

    def neighbors(self, i):
        return sorted({b for a, b in self.edges if a == i} | {a for a, b in self.edges if b == i})

    def degree(self, i):
        return len(self.neighbors(i))

    def faces(self):
        if self.kind != "triangular":
            return ()
        return _triangles(self.n_vertices, self.edges)

    def triangulated(self):
        return build_lattice("triangular", self.width, self.height)

    def spec(self):
        return {"kind": self.kind, "Lx": self.width, "Ly": self.height}


def build_lattice(kind, Lx, Ly):
    """Build an open-boundary ``square`` or ``triangular`` lattice."""
    if kind not in ("square", "triangular"):
        raise ValueError(f"unknown lattice kind {kind!r}")
    if int(Lx) < 1 or int(Ly) < 1:
        raise ValueError(f"lattice dimensions must be positive, got {Lx}x{Ly}")
    Lx, Ly = int(Lx), int(Ly)
    edges = []
    for y in range(Ly):
        for x in range(Lx):
            i = y * Lx + x
            if x + 1 < Lx:
                edges.append((i, i + 1))
            if y + 1 < Ly:
                edges.append((i, i + Lx))
            if kind == "triangular" and x + 1 < Lx and y + 1 < Ly:
                edges.append((i, i + Lx + 1))
    return SiteLattice(kind, Lx, Ly, _normalise_edges(edges))


@dataclass(frozen=True)
class RegionPartition:
    """Disjoint regions A, B (measured) and C covering a vertex set."""

    A: frozenset
    B: frozenset
    C: frozenset
    geometry: str

    def __post_init__(self):
        if self.A & self.B or self.A & self.C or self.B & self.C:
            raise ValueError("regions overlap")

    def check_cover(self, n_vertices):
        if len(self.A) + len(self.B) + len(self.C) != n_vertices:
            raise ValueError("regions do not cover the lattice")
        return True

    def as_lists(self):
        return sorted(self.A), sorted(self.B), sorted(self.C)


def strip_partition(lat):
    """A = bottom row, C = top row, B = everything in between."""
    rows = lat.rows()
    A = frozenset(rows[0])
    C = frozenset(rows[-1]) if len(rows) > 1 else frozenset()
    B = frozenset(range(lat.n_vertices)) - A - C
    return RegionPartition(A, B, C, "strip")


def half_chain_partition(lat):
    """A and C are the lower and upper halves of the right boundary column."""
    col = sorted((v for v in range(lat.n_vertices) if "right" in lat.sides(v)), key=lambda v: _row_of(lat, v))
    if len(col) < 2:
        raise ValueError("half_chain geometry needs at least two vertices on the right boundary")
    half = len(col) // 2
    A = frozenset(col[:half])
    C = frozenset(col[half:])
    B = frozenset(range(lat.n_vertices)) - A - C
    return RegionPartition(A, B, C, "half_chain")


def bulk_triple_partition(lat, H, I, J):
    """A = {H}, C = {I, J}; the rest is measured."""
    if len({H, I, J}) != 3:
        raise ValueError("bulk_triple needs three distinct vertices")
    A = frozenset([H])
    C = frozenset([I, J])
    B = frozenset(range(lat.n_vertices)) - A - C
    return RegionPartition(A, B, C, "bulk_triple")


def make_partition(lat, geometry, triple=None):
    if geometry == "strip":
        return strip_partition(lat)
    if geometry == "half_chain":
        return half_chain_partition(lat)
    if geometry == "bulk_triple":
        if triple is None:
            raise ValueError("bulk_triple geometry needs the three sites")
        return bulk_triple_partition(lat, *triple)
    raise ValueError(f"unknown geometry {geometry!r}")


def _row_of(lat, v):
    for r, row in enumerate(lat.rows()):
        if v in row:
            return r
    raise KeyError(v)


@dataclass(frozen=True)
class CellLattice:
    """Brickwork blocking of a site lattice into ``4 d_C x 2 d_C`` cells.

    Odd cell rows are shifted by half a cell width; the two truncated cells at
    the ends of a shifted row are kept as half-width cells so that the cells
    partition the base lattice exactly.  Two cells are adjacent when they share
    a boundary segment of positive length, which yields a triangulation.
    """

    base: SiteLattice
    d_C: int
    cell_shape: tuple
    cells: tuple = field(repr=False)
    rects: tuple = field(repr=False)
    cell_rows: tuple = field(repr=False)
    edges: tuple = field(repr=False)

    @property
    def n_vertices(self):
        return len(self.cells)

    @property
    def width(self):
        return self.base.width // self.cell_shape[0]

    @property
    def height(self):
        return len(self.cell_rows)

    @property
    def local_dim_exponent(self):
        """Number of sites per full cell; the cell dimension is q to this power."""
        return self.cell_shape[0] * self.cell_shape[1]

    def rows(self):
        return [list(r) for r in self.cell_rows]

    def sides(self, c):
        x0, x1, y0, y1 = self.rects[c]
        s = set()
        if x0 == 0:
            s.add("left")
        if x1 == self.base.width:
            s.add("right")
        if y0 == 0:
            s.add("bottom")
        if y1 == self.base.height:
            s.add("top")
        return s

    def faces(self):
        return _triangles(self.n_vertices, self.edges)

    def cell_of(self, site):
        for c, members in enumerate(self.cells):
            if site in members:
                return c
        raise KeyError(site)

    def unblock(self):
        """Sorted union of the cell contents (the original site set)."""
        return sorted(s for members in self.cells for s in members)

    def site_region(self, cell_indices):
        return frozenset(s for c in cell_indices for s in self.cells[c])

    def spec(self):
        return {"kind": "cells", "Lx": self.base.width, "Ly": self.base.height, "dC": self.d_C}


def block_cells(lat, d_C, cell_shape=None):
    """Tile ``lat`` with brickwork cells of ``4 d_C`` by ``2 d_C`` sites."""
    if d_C < 1:
        raise ValueError("d_C must be positive")
    w, h = cell_shape if cell_shape is not None else (4 * d_C, 2 * d_C)
    if w % 2:
        raise ValueError("cell width must be even for the brickwork offset")
    if lat.width % w or lat.height % h:
        raise ValueError(f"lattice {lat.width}x{lat.height} is not divisible into {w}x{h} cells")
    rects, rows = [], []
    for r in range(lat.height // h):
        y0, y1 = r * h, (r + 1) * h
        if r % 2 == 0:
            cuts = list(range(0, lat.width + 1, w))
        else:
            cuts = [0] + list(range(w // 2, lat.width, w)) + [lat.width]
        row = []
        for x0, x1 in zip(cuts[:-1], cuts[1:]):
            row.append(len(rects))
            rects.append((x0, x1, y0, y1))
        rows.append(tuple(row))
    cells = tuple(
        frozenset(lat.index(x, y) for y in range(y0, y1) for x in range(x0, x1)) for x0, x1, y0, y1 in rects
    )
    edges = []
    for a, b in combinations(range(len(rects)), 2):
        ax0, ax1, ay0, ay1 = rects[a]
        bx0, bx1, by0, by1 = rects[b]
        if ay0 == by0 and (ax1 == bx0 or bx1 == ax0):
            edges.append((a, b))
        elif (ay1 == by0 or by1 == ay0) and min(ax1, bx1) - max(ax0, bx0) > 0:
            edges.append((a, b))
    return CellLattice(lat, d_C, (w, h), cells, tuple(rects), tuple(rows), _normalise_edges(edges))


@dataclass(frozen=True)
class DualGraph:
    """Dual of a triangulated planar lattice.

    Vertices ``0 .. n_faces-1`` are triangles; the remaining vertices are one
    virtual vertex per open side (see :attr:`virtual`).  Dual edge ``k``
    crosses primal edge ``crossing[k]``.
    """

    n_faces: int
    virtual: dict = field(repr=False)
    edges: tuple = field(repr=False)
    crossing: tuple = field(repr=False)
    primal_n: int = 0
    primal_edges: tuple = field(default=(), repr=False)

    @property
    def n_vertices(self):
        return self.n_faces + len(self.virtual)

    @property
    def n_edges(self):
        return len(self.edges)

    def is_virtual(self, v):
        return v >= self.n_faces

    def side_of(self, v):
        for side, idx in self.virtual.items():
            if idx == v:
                return side
        return None

    def incidence(self):
        inc = [[] for _ in range(self.n_vertices)]
        for k, (u, v) in enumerate(self.edges):
            inc[u].append(k)
            inc[v].append(k)
        return inc

    def degree(self, v):
        return sum(1 for u, w in self.edges if v in (u, w))


def dual_graph(lat):
    """Dual graph of a triangulated lattice (a ``CellLattice`` or triangular ``SiteLattice``)."""
    if isinstance(lat, SiteLattice) and lat.kind != "triangular":
        raise ValueError("dual_graph needs a triangulation; block the lattice or use kind='triangular'")
    faces = lat.faces()
    V, E, F = lat.n_vertices, len(lat.edges), len(faces)
    if V - E + F != 1:
        raise ValueError(f"lattice is not a triangulated disk (V-E+F = {V - E + F})")
    edge_index = {e: k for k, e in enumerate(lat.edges)}
    owners = [[] for _ in lat.edges]
    for f, (a, b, c) in enumerate(faces):
        for e in ((a, b), (a, c), (b, c)):
            owners[edge_index[e]].append(f)
    virtual, dual_edges, crossing = {}, [], []
    for k, (i, j) in enumerate(lat.edges):
        own = owners[k]
        if len(own) == 2:
            dual_edges.append((own[0], own[1]))
        elif len(own) == 1:
            side = _boundary_side(lat, i, j)
            if side not in virtual:
                virtual[side] = None
            dual_edges.append((own[0], side))
        else:
            raise ValueError(f"edge {(i, j)} lies in no triangle")
        crossing.append(k)
    order = [s for s in SIDES if s in virtual]
    virtual = {s: F + n for n, s in enumerate(order)}
    dual_edges = tuple((u, virtual[v]) if isinstance(v, str) else (u, v) for u, v in dual_edges)
    return DualGraph(F, virtual, dual_edges, tuple(crossing), V, tuple(lat.edges))


def _boundary_side(lat, i, j):
    common = lat.sides(i) & lat.sides(j)
    for side in SIDES:
        if side in common:
            return side
    raise ValueError(f"boundary edge {(i, j)} has no common side")


def separates(walk_edges, partition, dual):
    """True iff removing the primal edges crossed by ``walk_edges`` cuts every A vertex from every C vertex."""
    if not partition.A or not partition.C:
        return False
    cut = {dual.crossing[k] for k in walk_edges}
    adj = [[] for _ in range(dual.primal_n)]
    for k, (i, j) in enumerate(dual.primal_edges):
        if k not in cut:
            adj[i].append(j)
            adj[j].append(i)
    seen = set(partition.A)
    queue = deque(partition.A)
    while queue:
        v = queue.popleft()
        if v in partition.C:
            return False
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return True


def lattice_from_spec(spec):
    """Build the lattice described by a ``{kind, Lx, Ly, dC}`` mapping.

    ``kind="cells"`` blocks a square site lattice with cell depth ``dC``.
    """
    kind = spec["kind"]
    if kind == "cells":
        return block_cells(build_lattice("square", spec["Lx"], spec["Ly"]), int(spec.get("dC", 1)))
    return build_lattice(kind, spec["Lx"], spec["Ly"])
