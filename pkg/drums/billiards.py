"""Unfolding a base tile along an involution graph into a planar billiard.

Each placed tile carries the affine isometry ``x -> A x + t`` taking base-tile
coordinates to the plane. Gluing across side ``mu`` composes the parent isometry
with the reflection of the base tile in that side, so every tile's side ``mu``
lands on its neighbour's side ``mu``.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Dict, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np
from django.conf import settings
from shapely.geometry import Polygon

from .exceptions import (
    InvalidPolygonError,
    IrrationalAngleError,
    IsodrumError,
    LoopMismatch,
    NonPlanarDomain,
)
from .permcat import COLORS, ColoredGraph

logger = logging.getLogger(__name__)

Number = Union[int, float, Fraction]


@dataclass(frozen=True, eq=False)
class BaseTile:
    """A convex polygon, counter-clockwise, with the sides that act as mirrors.

    ``mirrors[mu]`` is the index of the edge ``v[e] -> v[e+1]`` reflected across
    for color ``mu``; any other edge is always boundary. ``angles`` are interior
    angles as multiples of pi when they are known exactly.
    """

    name: str
    vertices: np.ndarray
    mirrors: Dict[int, int]
    angles: Optional[Tuple[Fraction, ...]] = None
    scale: float = 1.0

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise InvalidPolygonError("Invalid tile: need at least three 2D vertices")
        if self.signed_area(v) <= 0:
            raise InvalidPolygonError("Invalid tile: vertices must be counter-clockwise and non-degenerate")
        object.__setattr__(self, "vertices", v)

    @staticmethod
    def signed_area(v: np.ndarray) -> float:
        x, y = v[:, 0], v[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))

    @property
    def area(self) -> float:
        return self.signed_area(self.vertices)

    def edge(self, e: int) -> Tuple[np.ndarray, np.ndarray]:
        k = len(self.vertices)
        return self.vertices[e % k], self.vertices[(e + 1) % k]

    def edge_lengths(self) -> List[float]:
        return [float(np.hypot(*(b - a))) for a, b in (self.edge(e) for e in range(len(self.vertices)))]

    def float_angles(self) -> List[float]:
        v = self.vertices
        k = len(v)
        result = []
        for i in range(k):
            a = v[i - 1] - v[i]
            b = v[(i + 1) % k] - v[i]
            result.append(math.atan2(abs(a[0] * b[1] - a[1] * b[0]), float(np.dot(a, b))))
        return result

    def reflection(self, mu: int) -> Tuple[np.ndarray, np.ndarray]:
        """Linear part and translation of the reflection in side ``mu``."""
        p, q = self.edge(self.mirrors[mu])
        dx, dy = q - p
        norm = dx * dx + dy * dy
        linear = np.array([[dx * dx - dy * dy, 2 * dx * dy], [2 * dx * dy, dy * dy - dx * dx]]) / norm
        return linear, p - linear @ p

    @classmethod
    def half_square(cls, d: Number = 1) -> "BaseTile":
        """Right isosceles triangle with legs d; side 1 is the bottom leg, 2 the right leg, 3 the hypotenuse."""
        d = float(d)
        return cls(
            f"half-square:{d:g}",
            np.array([[d, d], [0.0, 0.0], [d, 0.0]]),
            {1: 1, 2: 2, 3: 0},
            (Fraction(1, 4), Fraction(1, 4), Fraction(1, 2)),
            d,
        )

    @classmethod
    def rectangle(cls, w: Number, h: Number) -> "BaseTile":
        """Rectangle mirrored on its left (1), right (2) and bottom (3) sides; the top is boundary."""
        w, h = float(w), float(h)
        return cls(
            f"rectangle:{w:g},{h:g}",
            np.array([[0.0, 0.0], [w, 0.0], [w, h], [0.0, h]]),
            {1: 3, 2: 1, 3: 0},
            (Fraction(1, 2),) * 4,
            min(w, h),
        )

    @classmethod
    def triangle(cls, vertices: Sequence[Sequence[float]], angles: Optional[Sequence[Fraction]] = None) -> "BaseTile":
        """Triangle with vertices v1, v2, v3; side mu is opposite vertex mu."""
        v = np.asarray(vertices, dtype=float)
        if v.shape != (3, 2):
            raise InvalidPolygonError("Invalid triangle: need exactly three 2D vertices")
        if cls.signed_area(v) < 0:
            raise InvalidPolygonError("Invalid triangle: vertices must be counter-clockwise")
        label = "triangle:" + ",".join(f"{x:g}" for x in v.ravel())
        return cls(label, v, {1: 1, 2: 2, 3: 0}, tuple(angles) if angles else None,
                   float(max(np.ptp(v[:, 0]), np.ptp(v[:, 1]))))

    @classmethod
    def from_angles(cls, a1: Fraction, a2: Fraction, a3: Fraction) -> "BaseTile":
        """Triangle with interior angles ``a_i * pi`` at v_i and side v2v3 of length sin(a1 pi)."""
        angles = tuple(Fraction(a) for a in (a1, a2, a3))
        if sum(angles) != 1 or min(angles) <= 0:
            raise InvalidPolygonError(f"Invalid triangle angles {angles}: must be positive and sum to 1")
        A, B, C = (float(a) * math.pi for a in angles)
        v2 = (0.0, 0.0)
        v3 = (math.sin(A), 0.0)
        v1 = (math.sin(C) * math.cos(B), math.sin(C) * math.sin(B))
        return cls.triangle([v1, v2, v3], angles)

    @classmethod
    def scalene(cls) -> "BaseTile":
        return cls.from_angles(Fraction(2, 9), Fraction(1, 3), Fraction(4, 9))

    @classmethod
    def for_graph(cls, graph: ColoredGraph) -> "BaseTile":
        """A triangle whose angles let every cycle of ``graph`` close.

        A cycle of length 2m alternating colors mu and nu needs angle pi/m at the
        vertex shared by sides mu and nu. Trees get the default scalene triangle.
        """
        if graph.cycle_rank() == 0:
            return cls.scalene()
        g = graph.to_networkx()
        cycles = nx.cycle_basis(g)
        if len(cycles) != graph.cycle_rank():
            raise InvalidPolygonError("Two tiles are glued along more than one side")
        constraints = {}
        for cycle in cycles:
            colors = set()
            for i, j in zip(cycle, cycle[1:] + cycle[:1]):
                colors |= g[i][j]["colors"]
            if len(colors) != 2 or len(cycle) % 2:
                raise InvalidPolygonError(f"Cycle {cycle} does not alternate two colors")
            (third,) = set(COLORS) - colors
            angle = Fraction(2, len(cycle))
            if constraints.get(third, angle) != angle:
                raise InvalidPolygonError("Cycles require incompatible angles")
            constraints[third] = angle
        fixed = sum(constraints.values())
        free = [mu for mu in COLORS if mu not in constraints]
        if fixed >= 1 or not free:
            raise InvalidPolygonError("Cycles leave no room for a triangle")
        shares = (Fraction(2, 5), Fraction(3, 5)) if len(free) == 2 else (Fraction(1),)
        for mu, share in zip(free, shares):
            constraints[mu] = (1 - fixed) * share
        return cls.from_angles(*(constraints[mu] for mu in COLORS))


@dataclass(frozen=True, eq=False)
class PlacedTile:
    index: int
    linear: np.ndarray
    offset: np.ndarray
    orientation: int

    def apply(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(points) @ self.linear.T + self.offset

    def to_local(self, points: np.ndarray) -> np.ndarray:
        """Inverse isometry: plane coordinates back to base-tile coordinates."""
        return (np.asarray(points) - self.offset) @ self.linear


@dataclass(frozen=True, eq=False)
class PlanarDomain:
    tile: BaseTile
    graph: ColoredGraph
    placements: Tuple[PlacedTile, ...]
    boundary_edges: Tuple[Tuple[np.ndarray, np.ndarray, int, int], ...]
    loops: Tuple[Tuple[Tuple[np.ndarray, float], ...], ...] = field(default=())

    @property
    def d(self) -> int:
        return self.graph.d

    def tile_vertices(self, i: int) -> np.ndarray:
        return self.placements[i].apply(self.tile.vertices)

    def boundary_counts(self) -> Dict[int, int]:
        """Number of boundary edges per base-tile edge index."""
        counts = {e: 0 for e in range(len(self.tile.vertices))}
        for _, _, _, e in self.boundary_edges:
            counts[e] += 1
        return counts

    def outer_loop(self) -> List[np.ndarray]:
        if not self.loops:
            return []
        return [p for p, _ in max(self.loops, key=len)]


def _neighbours(graph: ColoredGraph) -> List[Dict[int, int]]:
    nbrs: List[Dict[int, int]] = [dict() for _ in range(graph.d)]
    for i, j, mu in graph.edges:
        if mu in nbrs[i] or mu in nbrs[j]:
            raise IsodrumError(f"Tile {i} or {j} has two neighbours of color {mu}")
        nbrs[i][mu] = j
        nbrs[j][mu] = i
    return nbrs


def unfold(tile: BaseTile, graph: ColoredGraph, root: int = 0, check_planar: bool = True) -> PlanarDomain:
    if not graph.connected():
        raise IsodrumError("Invalid graph: not connected")
    if not 0 <= root < graph.d:
        raise IsodrumError(f"Invalid root {root} for {graph.d} tiles")
    nbrs = _neighbours(graph)
    reflections = {mu: tile.reflection(mu) for mu in COLORS if mu in tile.mirrors}
    placed: Dict[int, PlacedTile] = {root: PlacedTile(root, np.eye(2), np.zeros(2), 1)}
    queue = [root]
    tol = settings.ISODRUM_LOOP_TOL
    while queue:
        i = queue.pop(0)
        parent = placed[i]
        for mu in sorted(nbrs[i]):
            j = nbrs[i][mu]
            rlin, rt = reflections[mu]
            child = PlacedTile(j, parent.linear @ rlin, parent.linear @ rt + parent.offset, -parent.orientation)
            if j in placed:
                gap = np.abs(placed[j].apply(tile.vertices) - child.apply(tile.vertices)).max()
                if gap > tol:
                    raise LoopMismatch(f"Loop through tiles {i} and {j} fails to close by {gap:.3g}")
                continue
            placed[j] = child
            queue.append(j)

    placements = tuple(placed[i] for i in range(graph.d))
    if check_planar:
        _check_overlaps(tile, placements)

    boundary = []
    for placement in placements:
        for e in range(len(tile.vertices)):
            glued = any(tile.mirrors.get(mu) == e for mu in nbrs[placement.index])
            if glued:
                continue
            a, b = placement.apply(np.array(tile.edge(e)))
            if placement.orientation < 0:
                a, b = b, a
            boundary.append((a, b, placement.index, e))
    domain = PlanarDomain(tile, graph, placements, tuple(boundary))
    loops = _trace_loops(domain, tile)
    logger.info("Unfolded %d tiles of %s into %d boundary loop(s)", graph.d, tile.name, len(loops))
    return PlanarDomain(tile, graph, placements, tuple(boundary), loops)


def _check_overlaps(tile: BaseTile, placements: Sequence[PlacedTile]) -> None:
    polygons = [Polygon(p.apply(tile.vertices)) for p in placements]
    limit = settings.ISODRUM_OVERLAP_TOL * tile.area
    for a in range(len(polygons)):
        for b in range(a + 1, len(polygons)):
            overlap = polygons[a].intersection(polygons[b]).area
            if overlap > limit:
                raise NonPlanarDomain(
                    f"Tiles {placements[a].index} and {placements[b].index} overlap (area {overlap:.3g})"
                )


def _turn(din: np.ndarray, dout: np.ndarray) -> float:
    cross = din[0] * dout[1] - din[1] * dout[0]
    angle = math.atan2(cross, float(np.dot(din, dout)))
    if abs(abs(angle) - math.pi) < 1e-9:
        return -math.pi
    return angle


def _trace_loops(domain: PlanarDomain, tile: BaseTile) -> Tuple[Tuple[Tuple[np.ndarray, float], ...], ...]:
    """Chain boundary edges into loops; each entry is a corner point and its turn angle.

    At a vertex with several unused outgoing edges the sharpest left turn is
    taken; a reversal is a turn of -pi (the tip of a slit).
    """
    def key(p):
        return round(float(p[0]), 9) + 0.0, round(float(p[1]), 9) + 0.0

    edges = [(a, b) for a, b, _, _ in domain.boundary_edges]
    outgoing: Dict[Tuple[float, float], List[int]] = {}
    for n, (a, _) in enumerate(edges):
        outgoing.setdefault(key(a), []).append(n)
    unused = set(range(len(edges)))
    loops = []
    while unused:
        first = min(unused)
        unused.discard(first)
        chain = [first]
        current = first
        while True:
            a, b = edges[current]
            din = b - a
            candidates = [n for n in outgoing.get(key(b), []) if n in unused or n == first]
            if not candidates:
                raise InvalidPolygonError("Boundary does not close")
            nxt = max(candidates, key=lambda n: _turn(din, edges[n][1] - edges[n][0]))
            if nxt == first:
                break
            unused.discard(nxt)
            chain.append(nxt)
            current = nxt
        corners = []
        for pos, n in enumerate(chain):
            prev = chain[pos - 1]
            a_prev, b_prev = edges[prev]
            a, b = edges[n]
            turn = _turn(b_prev - a_prev, b - a)
            if abs(turn) < 1e-9:
                continue
            corners.append((a, turn))
        loops.append(tuple(corners))
    return tuple(loops)


def _angle_denominator(tile: BaseTile) -> Optional[int]:
    if tile.angles is None:
        return None
    return reduce(math.lcm, (a.denominator for a in tile.angles), 1)


def corner_angles(domain: PlanarDomain) -> List[Union[Fraction, float]]:
    """Interior boundary angles as multiples of pi, exact when the tile's angles are rational."""
    denominator = _angle_denominator(domain.tile)
    result = []
    for loop in domain.loops:
        for _, turn in loop:
            ratio = (math.pi - turn) / math.pi
            if denominator is None:
                result.append(ratio)
                continue
            snapped = Fraction(round(ratio * denominator), denominator)
            if abs(float(snapped) - ratio) > 1e-6:
                raise IrrationalAngleError(f"Corner angle {ratio}*pi is not a multiple of pi/{denominator}")
            result.append(snapped)
    return result


@dataclass(frozen=True)
class WeylData:
    area: float
    perimeter: float
    K: Union[Fraction, float]
    angles: Tuple[Union[Fraction, float], ...]
    boundary_counts: Tuple[int, ...]

    def triple(self) -> Tuple[float, float, float]:
        return self.area, self.perimeter, float(self.K)


def weyl_data(domain: PlanarDomain) -> WeylData:
    """Area, perimeter and the corner constant ``K = sum (1/r - r)/24`` over corners ``r pi``."""
    angles = corner_angles(domain)
    exact = all(isinstance(a, Fraction) for a in angles)
    zero = Fraction(0) if exact else 0.0
    K = sum(((1 / r - r) / 24 for r in angles if r != 1), zero)
    counts = domain.boundary_counts()
    lengths = domain.tile.edge_lengths()
    perimeter = sum(counts[e] * lengths[e] for e in sorted(counts))
    return WeylData(domain.d * domain.tile.area, perimeter, K, tuple(angles), tuple(counts[e] for e in sorted(counts)))


def _as_fraction(angle) -> Fraction:
    if isinstance(angle, float):
        snapped = Fraction(angle).limit_denominator(1000)
        if abs(float(snapped) - angle) > 1e-12:
            raise IrrationalAngleError(f"Angle {angle}*pi is not a rational multiple of pi")
        return snapped
    try:
        return Fraction(angle)
    except (TypeError, ValueError):
        raise IrrationalAngleError(f"Angle {angle!r} is not a rational multiple of pi")


def translation_surface_genus(angles: Sequence[Union[Fraction, float, str]]) -> int:
    """Genus of the translation surface unfolded from a polygon with angles ``pi m_i/n_i``.

    ``g = 1 + (n/2) sum (m_i - 1)/n_i`` with n the lcm of the n_i.
    """
    fracs = [_as_fraction(a) for a in angles]
    if not fracs or min(fracs) <= 0:
        raise IrrationalAngleError("Invalid angle list: angles must be positive")
    n = reduce(math.lcm, (f.denominator for f in fracs), 1)
    genus = 1 + Fraction(n, 2) * sum(Fraction(f.numerator - 1, f.denominator) for f in fracs)
    if genus.denominator != 1:
        raise InvalidPolygonError(f"Angle list gives non-integral genus {genus}")
    return int(genus)


def _number(x: float) -> Union[int, float]:
    x = float(x)
    return int(x) if x.is_integer() else x


def _point(p) -> List[Union[int, float]]:
    return [_number(p[0]), _number(p[1])]


def domain_record(domain: PlanarDomain) -> dict:
    return {
        "tiles": [[_point(v) for v in domain.tile_vertices(i)] for i in range(domain.d)],
        "edges": [[i, j, mu] for i, j, mu in domain.graph.edges],
        "boundary": [_point(p) for p in domain.outer_loop()],
    }


def domain_to_json(pair: str, base: str, domains: Dict[str, Union[PlanarDomain, dict]]) -> str:
    document = {
        "pair": pair,
        "base": base,
        "domains": {
            name: (domain_record(d) if isinstance(d, PlanarDomain) else d) for name, d in domains.items()
        },
    }
    return json.dumps(document, indent=2) + "\n"


def domain_from_json(text: str) -> dict:
    from .serializer import DomainFileSerializer

    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise IsodrumError(f"Invalid domain file: {exc}")
    serializer = DomainFileSerializer(data=data)
    if not serializer.is_valid():
        raise IsodrumError(f"Invalid domain file: {serializer.errors}")
    return serializer.validated_data
