"""Fractal photonic lattices and their regular counterparts.

A lattice is a planar point set with unit nearest-neighbour spacing and an
edge set over those points.  Generators build the Sierpinski gasket, the
Sierpinski carpet, the dual carpet (one site per kept square), and filled
triangle/square baselines of matching geometry.

All construction happens on integer coordinates so that deduplication and
adjacency are exact; float coordinates are produced once at the end.  For
the triangle family a point (p, q) maps to (p/2, q*sqrt(3)/2), for the
square family (i, j) maps to (i, j), and a dual-carpet cell (i, j) maps to
its centre (i + 1/2, j + 1/2).  In every case neighbouring sites end up
exactly one spacing apart.

The edge rule is purely metric: every pair of sites at exactly one
spacing is coupled, whatever the pair bounds.  For the gasket this
includes pairs that face each other across a removed triangle (midpoints
of the sides of any void of scale 2 or larger sit one spacing apart), so
from generation 2 onward some sites carry five or six neighbours instead
of the four that the smallest-triangle sides alone would give.  At
generation 1 the two rules coincide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import BoundsError, StructuralError

SQRT3_2 = math.sqrt(3.0) / 2.0

#: half-width of the accepted edge-length interval around one spacing
DIST_TOL = 1e-6

#: coordinate tolerance for "same position" and farthest-distance ties
COORD_TOL = 1e-9


class LatticeKind(str, Enum):
    SG = "sg"
    SC = "sc"
    DSC = "dsc"
    TRIANGLE = "triangle"
    SQUARE = "square"

    @classmethod
    def parse(cls, name: str) -> "LatticeKind":
        try:
            return cls(name.lower())
        except ValueError:
            raise BoundsError(
                f"unknown lattice kind {name!r}; expected one of "
                + ", ".join(k.value for k in cls)
            ) from None


FRACTAL_KINDS = (LatticeKind.SG, LatticeKind.SC, LatticeKind.DSC)

GENERATION_RANGE = {
    LatticeKind.SG: (1, 7),
    LatticeKind.SC: (1, 4),
    LatticeKind.DSC: (1, 4),
    LatticeKind.TRIANGLE: (1, 64),
    LatticeKind.SQUARE: (1, 64),
}


@dataclass(frozen=True)
class Lattice:
    """Point set plus edge set; site ids are row indices into ``coords``."""

    kind: LatticeKind
    generation: int          # rows for TRIANGLE, side for SQUARE
    coords: np.ndarray       # (N, 2) float64
    edges: np.ndarray        # (E, 2) int64, each row i < j, lexicographically sorted
    spacing: float = 1.0

    def __post_init__(self):
        self.coords.setflags(write=False)
        self.edges.setflags(write=False)

    @property
    def n_sites(self) -> int:
        return self.coords.shape[0]

    @property
    def n_edges(self) -> int:
        return self.edges.shape[0]

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n_sites, dtype=np.int64)
        np.add.at(deg, self.edges[:, 0], 1)
        np.add.at(deg, self.edges[:, 1], 1)
        return deg


@dataclass(frozen=True)
class FractalMeta:
    fractal_dimension: float
    spectral_dimension: float
    embedding_dimension: int = 2


# The carpet's spectral dimension has no closed form; 1.805 is the accepted
# numerical estimate and is carried for reporting only.
_META = {
    LatticeKind.SG: FractalMeta(math.log(3) / math.log(2), 2 * math.log(3) / math.log(5)),
    LatticeKind.SC: FractalMeta(math.log(8) / math.log(3), 1.805),
    LatticeKind.DSC: FractalMeta(math.log(8) / math.log(3), 1.805),
    LatticeKind.TRIANGLE: FractalMeta(2.0, 2.0),
    LatticeKind.SQUARE: FractalMeta(2.0, 2.0),
}


def fractal_meta(kind: LatticeKind) -> FractalMeta:
    """Fractal, spectral, and embedding dimensions for a lattice kind."""
    return _META[LatticeKind.parse(kind) if isinstance(kind, str) else kind]


@dataclass(frozen=True)
class Landmarks:
    """Geometric landmarks of a fractal lattice relative to one input site.

    ``first_void_boundary`` holds the sites within one spacing of the first
    effective void, ``probe_length_a`` the Euclidean distance from the input
    to that void's nearest deleted position, and ``farthest_set`` every site
    at maximal distance from the input (ties included).
    """

    input_site: int
    first_void_boundary: tuple[int, ...]
    probe_length_a: float
    farthest_set: tuple[int, ...]
    farthest_distance: float
    first_void_positions: tuple[tuple[float, float], ...]


def _check_generation(kind: LatticeKind, generation: int) -> None:
    lo, hi = GENERATION_RANGE[kind]
    if not isinstance(generation, (int, np.integer)) or not lo <= generation <= hi:
        raise BoundsError(
            f"{kind.value} generation must be an integer in [{lo}, {hi}], got {generation!r}"
        )


# ---------------------------------------------------------------------------
# triangle family: integer coords (p, q), x = p/2, y = q * sqrt(3)/2.
# The unit upward triangle anchored at (p, q) has corners (p, q), (p+2, q),
# (p+1, q+1); a side-s triangle anchored at (p, q) spans to (p+2s, q) with
# apex (p+s, q+s).

_TRI_NEIGHBOR_STEPS = ((2, 0), (1, 1), (-1, 1))  # unit-distance offsets, q-increasing half


def _gasket_cells(generation: int) -> list[tuple[int, int]]:
    """Anchors of the smallest-scale blue triangles, recursively."""
    cells: list[tuple[int, int]] = []

    def rec(p: int, q: int, s: int) -> None:
        if s == 1:
            cells.append((p, q))
            return
        h = s // 2
        rec(p, q, h)
        rec(p + s, q, h)
        rec(p + h, q + h, h)

    rec(0, 0, 2 ** generation)
    return cells


def _triangle_points(rows: int) -> set[tuple[int, int]]:
    pts = set()
    for q in range(rows + 1):
        for p in range(q, 2 * rows - q + 1, 2):
            pts.add((p, q))
    return pts


def _tri_xy(points: list[tuple[int, int]]) -> np.ndarray:
    arr = np.asarray(points, dtype=np.float64)
    return np.column_stack((arr[:, 0] * 0.5, arr[:, 1] * SQRT3_2))


def _order_points(points) -> list[tuple[int, int]]:
    # top row first, left to right inside a row; puts the apex or the
    # top-left corner at id 0 for every kind
    return sorted(points, key=lambda pq: (-pq[1], pq[0]))


def _index_map(ordered) -> dict[tuple[int, int], int]:
    return {pt: i for i, pt in enumerate(ordered)}


def _edge_array(pairs) -> np.ndarray:
    if not pairs:
        return np.zeros((0, 2), dtype=np.int64)
    arr = np.array(sorted(set(tuple(sorted(p)) for p in pairs)), dtype=np.int64)
    return arr


def _tri_edges(points: set, ordered, idx) -> np.ndarray:
    # (dp, dq) with dp^2 + 3 dq^2 = 4 are exactly the unit-distance offsets,
    # so scanning the q-increasing half of them closes the edge set
    pairs = []
    for (p, q) in ordered:
        for dp, dq in _TRI_NEIGHBOR_STEPS:
            other = (p + dp, q + dq)
            if other in points:
                pairs.append((idx[(p, q)], idx[other]))
    return _edge_array(pairs)


def generate_sierpinski_gasket(generation: int) -> Lattice:
    """Sierpinski gasket lattice of the given generation.

    Sites are the deduplicated corners of the 3^g smallest blue triangles
    of an overall triangle with side 2^g spacings, N = 3 (3^g + 1) / 2.
    Edges are every unit-distance pair.  Besides the triangle sides these
    include the cross-void pairs described in the module docstring, so the
    edge count exceeds 3^(g+1) from generation 2 onward.

    Parameters
    ----------
    generation : int
        Subdivision depth, 1 to 7.
    """
    _check_generation(LatticeKind.SG, generation)
    points = set()
    for (p, q) in _gasket_cells(generation):
        points.update(((p, q), (p + 2, q), (p + 1, q + 1)))
    ordered = _order_points(points)
    idx = _index_map(ordered)
    return Lattice(
        LatticeKind.SG, generation, _tri_xy(ordered), _tri_edges(points, ordered, idx)
    )


def generate_triangle(rows: int) -> Lattice:
    """Filled triangular lattice with the given number of row intervals.

    Row k below the apex holds k+1 sites; the overall side length is
    ``rows`` spacings, so rows = 2^g matches the frame of gasket
    generation g exactly.  Every unit-distance pair is an edge, giving
    interior sites six neighbours.
    """
    _check_generation(LatticeKind.TRIANGLE, rows)
    points = _triangle_points(rows)
    ordered = _order_points(points)
    idx = _index_map(ordered)
    return Lattice(LatticeKind.TRIANGLE, rows, _tri_xy(ordered), _tri_edges(points, ordered, idx))


# ---------------------------------------------------------------------------
# square family: carpet vertices at integer (i, j); dual-carpet cells at
# centres (i + 1/2, j + 1/2)


def _carpet_cells(generation: int) -> set[tuple[int, int]]:
    """Unit squares kept by the carpet: no base-3 digit pair equals (1, 1)."""
    side = 3 ** generation
    kept = set()
    for i in range(side):
        for j in range(side):
            a, b = i, j
            keep = True
            while a or b:
                if a % 3 == 1 and b % 3 == 1:
                    keep = False
                    break
                a //= 3
                b //= 3
            if keep:
                kept.add((i, j))
    return kept


def _carpet_points(generation: int) -> set[tuple[int, int]]:
    pts = set()
    for (i, j) in _carpet_cells(generation):
        pts.update(((i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)))
    return pts


def _grid_xy(points: list[tuple[int, int]], offset: float = 0.0) -> np.ndarray:
    arr = np.asarray(points, dtype=np.float64)
    return arr + offset


def _grid_edges(points: set, ordered, idx) -> np.ndarray:
    pairs = []
    for (i, j) in ordered:
        for di, dj in ((1, 0), (0, 1)):
            other = (i + di, j + dj)
            if other in points:
                pairs.append((idx[(i, j)], idx[other]))
    return _edge_array(pairs)


def generate_sierpinski_carpet(generation: int) -> Lattice:
    """Sierpinski carpet lattice of the given generation.

    Sites are the deduplicated corners of the 8^g kept unit squares of an
    overall square with side 3^g; edges connect every unit-distance pair.
    The smallest (1 x 1) removed squares contain no interior vertices, so
    they do not alter the graph.
    """
    _check_generation(LatticeKind.SC, generation)
    points = _carpet_points(generation)
    ordered = _order_points(points)
    idx = _index_map(ordered)
    return Lattice(
        LatticeKind.SC, generation, _grid_xy(ordered), _grid_edges(points, ordered, idx)
    )


def generate_dual_sierpinski_carpet(generation: int) -> Lattice:
    """Dual carpet: one site at the centre of each kept square, N = 8^g.

    Edges connect sites whose squares share a side, which is exactly the
    unit-distance rule on the centres.
    """
    _check_generation(LatticeKind.DSC, generation)
    cells = _carpet_cells(generation)
    ordered = _order_points(cells)
    idx = _index_map(ordered)
    return Lattice(
        LatticeKind.DSC,
        generation,
        _grid_xy(ordered, offset=0.5),
        _grid_edges(cells, ordered, idx),
    )


def generate_square(side: int) -> Lattice:
    """Filled square vertex grid with (side + 1)^2 sites and 4-neighbour edges."""
    _check_generation(LatticeKind.SQUARE, side)
    points = {(i, j) for i in range(side + 1) for j in range(side + 1)}
    ordered = _order_points(points)
    idx = _index_map(ordered)
    return Lattice(
        LatticeKind.SQUARE, side, _grid_xy(ordered), _grid_edges(points, ordered, idx)
    )


_GENERATORS = {
    LatticeKind.SG: generate_sierpinski_gasket,
    LatticeKind.SC: generate_sierpinski_carpet,
    LatticeKind.DSC: generate_dual_sierpinski_carpet,
    LatticeKind.TRIANGLE: generate_triangle,
    LatticeKind.SQUARE: generate_square,
}


def generate(kind: LatticeKind | str, generation: int) -> Lattice:
    """Dispatch to the generator for ``kind``."""
    kind = LatticeKind.parse(kind) if isinstance(kind, str) else kind
    return _GENERATORS[kind](generation)


# ---------------------------------------------------------------------------
# connectivity and landmarks


def connectivity_histogram(lattice: Lattice) -> dict[int, int]:
    """Map degree -> number of sites with that degree."""
    values, counts = np.unique(lattice.degrees(), return_counts=True)
    return {int(v): int(c) for v, c in zip(values, counts)}


def canonical_input(lattice: Lattice) -> int:
    """Default input site: the topmost site, leftmost on ties.

    This is the apex for the triangle family and the top-left corner for
    the square family.
    """
    coords = lattice.coords
    order = np.lexsort((coords[:, 0], -coords[:, 1]))
    return int(order[0])


_NAMED_INPUTS = ("auto", "apex", "corner", "topleft", "top-left")


def resolve_input(lattice: Lattice, selector: str | int) -> int:
    """Turn an input selector (named or raw id) into a site id."""
    if isinstance(selector, (int, np.integer)):
        site = int(selector)
    else:
        name = str(selector).strip().lower()
        if name in _NAMED_INPUTS:
            return canonical_input(lattice)
        try:
            site = int(name)
        except ValueError:
            raise BoundsError(
                f"input selector {selector!r} is neither a site id nor one of "
                + ", ".join(_NAMED_INPUTS)
            ) from None
    if not 0 <= site < lattice.n_sites:
        raise BoundsError(f"site id {site} out of range 0..{lattice.n_sites - 1}")
    return site


def _deleted_positions(lattice: Lattice) -> tuple[np.ndarray, list[list[int]]]:
    """Positions of the filled counterpart that the fractal deletes,
    grouped into connected voids (unit-step adjacency on the filled grid)."""
    g = lattice.generation
    if lattice.kind is LatticeKind.SG:
        filled = _triangle_points(2 ** g)
        present = set()
        for (p, q) in _gasket_cells(g):
            present.update(((p, q), (p + 2, q), (p + 1, q + 1)))
        steps = ((2, 0), (-2, 0), (1, 1), (-1, 1), (1, -1), (-1, -1))
        to_xy = lambda pts: _tri_xy(pts)
    elif lattice.kind is LatticeKind.SC:
        side = 3 ** g
        filled = {(i, j) for i in range(side + 1) for j in range(side + 1)}
        present = _carpet_points(g)
        steps = ((1, 0), (-1, 0), (0, 1), (0, -1))
        to_xy = lambda pts: _grid_xy(pts)
    elif lattice.kind is LatticeKind.DSC:
        side = 3 ** g
        filled = {(i, j) for i in range(side) for j in range(side)}
        present = _carpet_cells(g)
        steps = ((1, 0), (-1, 0), (0, 1), (0, -1))
        to_xy = lambda pts: _grid_xy(pts, offset=0.5)
    else:
        raise StructuralError(
            f"lattice kind {lattice.kind.value!r} has no voids; landmarks require "
            "a fractal kind (sg, sc, dsc)"
        )

    deleted = filled - present
    clusters: list[list[tuple[int, int]]] = []
    remaining = set(deleted)
    while remaining:
        seed = min(remaining)
        stack = [seed]
        remaining.discard(seed)
        comp = [seed]
        while stack:
            p, q = stack.pop()
            for dp, dq in steps:
                other = (p + dp, q + dq)
                if other in remaining:
                    remaining.discard(other)
                    stack.append(other)
                    comp.append(other)
        clusters.append(sorted(comp))

    if not clusters:
        raise StructuralError(
            f"{lattice.kind.value} generation {g} deletes no site of its filled "
            "counterpart; no effective void exists"
        )
    all_pts = [pt for comp in clusters for pt in comp]
    xy = to_xy(all_pts)
    index_lists: list[list[int]] = []
    k = 0
    for comp in clusters:
        index_lists.append(list(range(k, k + len(comp))))
        k += len(comp)
    return xy, index_lists


def landmark_sites(lattice: Lattice, input_site: int) -> Landmarks:
    """Locate the first effective void and the farthest sites from the input.

    The first effective void is the removed region nearest to the input
    whose interior strictly contains at least one point of the
    corresponding filled lattice (for the dual carpet, a missing site);
    nearer ties go to the smaller region.  ``first_void_boundary`` collects
    the sites within 1 + 1e-6 spacings of that void's deleted positions.
    """
    if not 0 <= input_site < lattice.n_sites:
        raise BoundsError(f"site id {input_site} out of range 0..{lattice.n_sites - 1}")
    xy, clusters = _deleted_positions(lattice)
    origin = lattice.coords[input_site]
    dists = np.hypot(xy[:, 0] - origin[0], xy[:, 1] - origin[1])

    best = min(
        clusters,
        key=lambda ids: (float(dists[ids].min()), len(ids), tuple(map(tuple, xy[ids]))),
    )
    void_xy = xy[best]
    probe_length = float(dists[best].min())

    diff = lattice.coords[:, None, :] - void_xy[None, :, :]
    site_to_void = np.sqrt((diff ** 2).sum(axis=2)).min(axis=1)
    boundary = tuple(int(i) for i in np.flatnonzero(site_to_void <= 1.0 + DIST_TOL))

    site_dists = np.hypot(
        lattice.coords[:, 0] - origin[0], lattice.coords[:, 1] - origin[1]
    )
    dmax = float(site_dists.max())
    farthest = tuple(int(i) for i in np.flatnonzero(site_dists >= dmax - COORD_TOL))

    return Landmarks(
        input_site=int(input_site),
        first_void_boundary=boundary,
        probe_length_a=probe_length,
        farthest_set=farthest,
        farthest_distance=dmax,
        first_void_positions=tuple((float(x), float(y)) for x, y in void_xy),
    )
