"""Permutations, involution graphs and the bundled catalog of isospectral pairs.

Tiles are numbered from 0. A pair is described by two triples of involutions:
``(a1, b1, c1)`` act on the first member's tiles, ``(a2, b2, c2)`` on the second.
Generator ``mu`` (1, 2 or 3) glues tile ``i`` to tile ``g(i)`` across side ``mu``;
a fixed point means side ``mu`` of that tile lies on the billiard boundary.
"""

import logging
import re
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from django.conf import settings

from .exceptions import CycleParseError, DimensionMismatch, IsodrumError, UnknownPairError

logger = logging.getLogger(__name__)

COLORS = (1, 2, 3)
GEN_KEYS = ("a1", "b1", "c1", "a2", "b2", "c2")

CORRUPT = "corrupt-source"

_CYCLES_RE = re.compile(r"^\s*(\(\s*[^()]*\)\s*)*$")
_CYCLE_RE = re.compile(r"\(([^()]*)\)")


@dataclass(frozen=True)
class Permutation:
    """A bijection of ``0..d-1``; ``(p * q)(i) == p(q(i))``."""

    images: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(int(i) for i in self.images))
        if sorted(self.images) != list(range(len(self.images))):
            raise IsodrumError(f"Invalid permutation images {self.images}")

    @classmethod
    def identity(cls, d: int) -> "Permutation":
        return cls(tuple(range(d)))

    @classmethod
    def from_transpositions(cls, d: int, pairs: Iterable[Tuple[int, int]]) -> "Permutation":
        images = list(range(d))
        for i, j in pairs:
            images[i], images[j] = images[j], images[i]
        return cls(tuple(images))

    @property
    def d(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __mul__(self, other: "Permutation") -> "Permutation":
        if other.d != self.d:
            raise DimensionMismatch(f"Cannot compose permutations on {self.d} and {other.d} points")
        return Permutation(tuple(self.images[j] for j in other.images))

    def inverse(self) -> "Permutation":
        inv = [0] * self.d
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def fixed_points(self) -> Tuple[int, ...]:
        return tuple(i for i, j in enumerate(self.images) if i == j)

    def moved(self) -> int:
        return self.d - len(self.fixed_points())

    def is_identity(self) -> bool:
        return self.moved() == 0

    def is_involution(self) -> bool:
        return all(self.images[j] == i for i, j in enumerate(self.images))

    def cycles(self) -> List[Tuple[int, ...]]:
        seen = set()
        result = []
        for start in range(self.d):
            if start in seen or self.images[start] == start:
                continue
            cycle = [start]
            seen.add(start)
            nxt = self.images[start]
            while nxt != start:
                cycle.append(nxt)
                seen.add(nxt)
                nxt = self.images[nxt]
            result.append(tuple(cycle))
        return result

    def matrix(self) -> np.ndarray:
        """0/1 matrix with ``M[i, p(i)] = 1``."""
        m = np.zeros((self.d, self.d), dtype=np.int64)
        m[np.arange(self.d), list(self.images)] = 1
        return m

    def __str__(self) -> str:
        return "".join("(" + " ".join(str(i) for i in c) + ")" for c in self.cycles())


def involution_from_cycles(text: str, d: int) -> Permutation:
    """Parse disjoint transpositions such as ``"(2 5)(4 6)"`` into an involution on ``d`` points.

    Indices not named are fixed. The empty string gives the identity.
    """
    if not _CYCLES_RE.match(text or ""):
        raise CycleParseError(f"Invalid cycle notation {text!r}")
    pairs = []
    used = set()
    for match in _CYCLE_RE.finditer(text or ""):
        cycle = match.group(0)
        parts = match.group(1).split()
        if len(parts) != 2:
            raise CycleParseError(f"Cycle {cycle} is not a transposition")
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise CycleParseError(f"Cycle {cycle} holds a non-integer index")
        for k in (i, j):
            if not 0 <= k < d:
                raise CycleParseError(f"Index {k} in cycle {cycle} is outside 0..{d - 1}")
            if k in used:
                raise CycleParseError(f"Index {k} repeated in cycle {cycle}")
        if i == j:
            raise CycleParseError(f"Cycle {cycle} repeats index {i}")
        used.update((i, j))
        pairs.append((i, j))
    return Permutation.from_transpositions(d, pairs)


@dataclass(frozen=True, eq=False)
class AdjacencySet:
    """The three gluing matrices ``M^(mu)`` of one member of a pair."""

    gens: Tuple[Permutation, Permutation, Permutation]
    matrices: Tuple[np.ndarray, np.ndarray, np.ndarray]

    @property
    def d(self) -> int:
        return self.gens[0].d

    def __getitem__(self, mu: int) -> np.ndarray:
        return self.matrices[mu - 1]

    def gen(self, mu: int) -> Permutation:
        return self.gens[mu - 1]

    def signed(self, mu: int) -> np.ndarray:
        """``M^(mu)`` with fixed points carrying -1, the Dirichlet reflection."""
        m = self[mu]
        return m - 2 * np.diag(np.diag(m))


def adjacency_set(gens: Sequence[Permutation], d: int) -> AdjacencySet:
    if len(gens) != 3:
        raise IsodrumError(f"Expected three generators, got {len(gens)}")
    for mu, g in zip(COLORS, gens):
        if g.d != d:
            raise DimensionMismatch(f"Generator {mu} acts on {g.d} points, expected {d}")
        if not g.is_involution():
            raise IsodrumError(f"Generator {mu} is not an involution")
    return AdjacencySet(tuple(gens), tuple(g.matrix() for g in gens))


@dataclass(frozen=True, eq=False)
class ColoredGraph:
    """Tiles as vertices, one edge of color ``mu`` per gluing across side ``mu``.

    Color 0 marks an uncolored edge (plain graphs built with ``from_edges``).
    """

    d: int
    edges: Tuple[Tuple[int, int, int], ...]
    delta: np.ndarray = field(repr=False)

    @classmethod
    def from_edges(cls, d: int, edges: Iterable[Sequence[int]]) -> "ColoredGraph":
        normalized = []
        delta = np.zeros((d, d), dtype=np.int64)
        for edge in edges:
            i, j = int(edge[0]), int(edge[1])
            mu = int(edge[2]) if len(edge) > 2 else 0
            if i == j or not (0 <= i < d and 0 <= j < d):
                raise IsodrumError(f"Invalid edge ({i}, {j}) on {d} vertices")
            i, j = min(i, j), max(i, j)
            normalized.append((i, j, mu))
            delta[i, j] += 1
            delta[j, i] += 1
        return cls(d, tuple(sorted(normalized)), delta)

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.d))
        for i, j, mu in self.edges:
            if graph.has_edge(i, j):
                graph[i][j]["colors"] = graph[i][j]["colors"] | {mu}
            else:
                graph.add_edge(i, j, colors=frozenset({mu}))
        return graph

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def components(self) -> int:
        if self.d == 0:
            return 0
        return nx.number_connected_components(self.to_networkx())

    def connected(self) -> bool:
        return self.components() == 1

    def cycle_rank(self) -> int:
        return self.edge_count - self.d + self.components()


def involution_graph(adj: AdjacencySet) -> ColoredGraph:
    edges = []
    for mu in COLORS:
        g = adj.gen(mu)
        edges.extend((i, g(i), mu) for i in range(adj.d) if i < g(i))
    return ColoredGraph.from_edges(adj.d, edges)


@dataclass(frozen=True)
class IsospectralityResult:
    isospectral: bool
    traces: Tuple[Tuple[int, int, int], ...]

    def __bool__(self) -> bool:
        return self.isospectral

    @property
    def first_difference(self) -> Optional[Tuple[int, int, int]]:
        """``(l, Tr A^l, Tr B^l)`` at the shortest length where the traces differ."""
        return next((row for row in self.traces if row[1] != row[2]), None)


def _trace_table(a: np.ndarray, b: np.ndarray) -> IsospectralityResult:
    a, b = a.astype(object), b.astype(object)
    pa, pb = a, b
    rows = []
    for length in range(1, a.shape[0] + 1):
        if length > 1:
            pa = pa.dot(a)
            pb = pb.dot(b)
        rows.append((length, int(np.trace(pa)), int(np.trace(pb))))
    return IsospectralityResult(all(t1 == t2 for _, t1, t2 in rows), tuple(rows))


def graph_isospectral(g1: ColoredGraph, g2: ColoredGraph) -> IsospectralityResult:
    """Compare ``Tr(A^l)`` and ``Tr(B^l)`` for ``l = 1..d`` in exact integers."""
    if g1.d != g2.d:
        raise DimensionMismatch(f"Graphs have {g1.d} and {g2.d} vertices")
    return _trace_table(g1.delta, g2.delta)


def gluing_isospectral(M: AdjacencySet, N: AdjacencySet) -> IsospectralityResult:
    """Traces of powers of ``sum_mu M^(mu)`` against ``sum_mu N^(mu)``, fixed points on the diagonal.

    A transplantation conjugates each ``M^(mu)`` into ``N^(mu)``, so these sums are similar.
    """
    if M.d != N.d:
        raise DimensionMismatch(f"Adjacency sets act on {M.d} and {N.d} tiles")
    return _trace_table(sum(M.matrices), sum(N.matrices))


def colored_isomorphic(g1: ColoredGraph, g2: ColoredGraph, permute_colors: bool = False) -> bool:
    """Color-preserving isomorphism, optionally up to a global relabeling of the colors."""
    if g1.d != g2.d or g1.edge_count != g2.edge_count:
        return False
    target = g2.to_networkx()
    relabelings = permutations(COLORS) if permute_colors else [COLORS]
    for perm in relabelings:
        mapping = dict(zip(COLORS, perm))
        mapping[0] = 0
        source = ColoredGraph.from_edges(g1.d, [(i, j, mapping[mu]) for i, j, mu in g1.edges])
        if nx.is_isomorphic(
            source.to_networkx(),
            target,
            edge_match=lambda x, y: x["colors"] == y["colors"],
        ):
            return True
    return False


@dataclass(frozen=True)
class PairSpec:
    name: str
    group_label: str
    d: int
    cycles: Tuple[str, ...]
    gens_points: Optional[Tuple[Permutation, Permutation, Permutation]]
    gens_hyperplanes: Optional[Tuple[Permutation, Permutation, Permutation]]
    flags: Tuple[str, ...] = ()
    problems: Tuple[str, ...] = ()

    @property
    def corrupt(self) -> bool:
        return CORRUPT in self.flags

    @classmethod
    def from_cycles(cls, name: str, group_label: str, d: int, cycles: Sequence[str]) -> "PairSpec":
        cycles = tuple(cycles)
        try:
            gens = [involution_from_cycles(text, d) for text in cycles]
        except CycleParseError as exc:
            return cls(name, group_label, d, cycles, None, None, (CORRUPT,), (str(exc),))
        spec = cls(name, group_label, d, cycles, tuple(gens[:3]), tuple(gens[3:]))
        problems = validate_pair(spec)
        if problems:
            return cls(name, group_label, d, cycles, spec.gens_points, spec.gens_hyperplanes,
                       (CORRUPT,), tuple(problems))
        return spec

    @classmethod
    def from_permutations(
        cls,
        name: str,
        group_label: str,
        points: Sequence[Permutation],
        hyperplanes: Sequence[Permutation],
    ) -> "PairSpec":
        cycles = [str(g) for g in list(points) + list(hyperplanes)]
        return cls.from_cycles(name, group_label, points[0].d, cycles)

    def adjacency(self) -> Tuple[AdjacencySet, AdjacencySet]:
        if self.gens_points is None:
            raise IsodrumError(f"Pair {self.name} has unusable generators: {'; '.join(self.problems)}")
        return adjacency_set(self.gens_points, self.d), adjacency_set(self.gens_hyperplanes, self.d)

    def graphs(self) -> Tuple[ColoredGraph, ColoredGraph]:
        m, n = self.adjacency()
        return involution_graph(m), involution_graph(n)


def validate_pair(spec: PairSpec) -> List[str]:
    """Structural checks every usable pair satisfies; returns the problems found."""
    problems = []
    for label, gens in (("points", spec.gens_points), ("hyperplanes", spec.gens_hyperplanes)):
        for key, g in zip(("a", "b", "c"), gens):
            if g.is_identity():
                problems.append(f"{label} generator {key} moves no tile")
        graph = involution_graph(adjacency_set(gens, spec.d))
        if not graph.connected():
            problems.append(f"{label} graph is disconnected")
            continue
        moved = sum(g.moved() for g in gens)
        expected = 2 * (spec.d - 1 + graph.cycle_rank())
        if moved != expected:
            problems.append(f"{label} generators move {moved} tiles, expected {expected}")
    return problems


def parse_catalog(text: str) -> List[PairSpec]:
    """Read the catalog text format: ``pair``, ``group``, ``d`` then ``a1`` .. ``c2`` lines."""
    from .serializer import PairRecordSerializer

    records = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition(" ")
        value = value.strip()
        if key == "pair":
            current = {"name": value}
            records.append(current)
        elif current is None:
            raise IsodrumError(f"Invalid catalog line {lineno}: {key!r} before any pair")
        elif key in ("group", "d") or key in GEN_KEYS:
            current["group_label" if key == "group" else key] = value
        else:
            raise IsodrumError(f"Invalid catalog line {lineno}: unknown key {key!r}")

    pairs = []
    seen: Dict[Tuple[str, ...], str] = {}
    for record in records:
        serializer = PairRecordSerializer(data=record)
        if not serializer.is_valid():
            raise IsodrumError(f"Invalid catalog record {record.get('name')!r}: {serializer.errors}")
        data = serializer.validated_data
        cycles = tuple(data[k] for k in GEN_KEYS)
        spec = PairSpec.from_cycles(data["name"], data["group_label"], data["d"], cycles)
        if cycles in seen:
            spec = PairSpec(spec.name, spec.group_label, spec.d, spec.cycles, spec.gens_points,
                            spec.gens_hyperplanes, spec.flags + (f"duplicate-of:{seen[cycles]}",),
                            spec.problems)
        else:
            seen[cycles] = spec.name
        pairs.append(spec)
    return pairs


def format_catalog(pairs: Iterable[PairSpec]) -> str:
    blocks = []
    for spec in pairs:
        lines = [f"pair {spec.name}", f"group {spec.group_label}", f"d {spec.d}"]
        lines.extend(f"{key} {text}".rstrip() for key, text in zip(GEN_KEYS, spec.cycles))
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


@lru_cache(maxsize=4)
def _load_catalog(path: str) -> Dict[str, PairSpec]:
    pairs = parse_catalog(Path(path).read_text(encoding="utf-8"))
    logger.info("Loaded %d pairs from %s", len(pairs), path)
    return {spec.name: spec for spec in pairs}


def catalog(path: Optional[str] = None) -> Dict[str, PairSpec]:
    """All catalog pairs by name, in file order. Flagged records are kept."""
    return dict(_load_catalog(str(path or settings.ISODRUM_CATALOG)))


def get_pair(name: str, path: Optional[str] = None) -> PairSpec:
    pairs = catalog(path)
    if name not in pairs:
        raise UnknownPairError(f"Unknown pair {name!r}; known pairs: {', '.join(pairs)}")
    return pairs[name]
