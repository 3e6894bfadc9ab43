"""Finite projective spaces PG(n, q) and the transplantation algebra built on them.

Points and hyperplanes are both labeled by normalized coordinate vectors (first
nonzero coordinate equal to 1) in lexicographic order. The collineation group
PGammaL(n+1, q) is generated by breadth-first closure of point permutations and
kept as a numpy array, one row per group element.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations, product
from math import prod
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
import sympy
from django.conf import settings

from .billiards import BaseTile
from .exceptions import (
    CommutantTooLarge,
    CongruentDomains,
    DimensionMismatch,
    GroupTooLarge,
    InvalidPolygonError,
    IsodrumError,
    NotTransplantable,
    PrimePowerError,
)
from .permcat import (
    COLORS,
    AdjacencySet,
    ColoredGraph,
    PairSpec,
    Permutation,
    adjacency_set,
    colored_isomorphic,
    involution_graph,
)

logger = logging.getLogger(__name__)


class FiniteField:
    """GF(q) as lookup tables over the integers ``0..q-1``.

    Element ``e`` stands for the polynomial whose coefficient of ``x^i`` is the
    i-th base-p digit of ``e``. The modulus is the first monic irreducible
    polynomial in that ordering, which for q = 4 is x^2 + x + 1.
    """

    def __init__(self, q: int):
        factors = sympy.factorint(q) if q >= 2 else {}
        if len(factors) != 1:
            raise PrimePowerError(f"Invalid field order {q}: not a prime power")
        ((p, h),) = factors.items()
        self.q, self.p, self.h = int(q), int(p), int(h)
        self.digits = np.array([[(e // p**i) % p for i in range(h)] for e in range(q)], dtype=np.int64)
        self.weights = p ** np.arange(h, dtype=np.int64)
        self.add = ((self.digits[:, None, :] + self.digits[None, :, :]) % p) @ self.weights
        self.neg = ((-self.digits) % p) @ self.weights
        self.modulus, self.mul = self._find_modulus()
        self.inv = np.zeros(q, dtype=np.int64)
        for a in range(1, q):
            self.inv[a] = int(np.flatnonzero(self.mul[a] == 1)[0])
        self.frob = np.array([self.power(a, p) for a in range(q)], dtype=np.int64)
        self.primitive = next(a for a in range(1, q) if self._order(a) == q - 1)

    def _poly_mul_table(self, low: Sequence[int]) -> np.ndarray:
        p, h = self.p, self.h
        table = np.zeros((self.q, self.q), dtype=np.int64)
        for a in range(self.q):
            for b in range(self.q):
                coeffs = [0] * (2 * h - 1)
                for i in range(h):
                    for j in range(h):
                        coeffs[i + j] += int(self.digits[a, i]) * int(self.digits[b, j])
                # x^h = -(low_0 + low_1 x + ...)
                for k in range(2 * h - 2, h - 1, -1):
                    c = coeffs[k] % p
                    coeffs[k] = 0
                    for i in range(h):
                        coeffs[k - h + i] -= c * low[i]
                table[a, b] = sum((coeffs[i] % p) * p**i for i in range(h))
        return table

    def _find_modulus(self) -> Tuple[Tuple[int, ...], np.ndarray]:
        for code in range(self.q):
            low = tuple(int(c) for c in self.digits[code])
            table = self._poly_mul_table(low)
            if all((table[a] == 1).any() for a in range(1, self.q)):
                return low, table
        raise PrimePowerError(f"No irreducible polynomial found for GF({self.q})")

    def power(self, a: int, e: int) -> int:
        result = 1
        for _ in range(e):
            result = int(self.mul[result, a])
        return result

    def _order(self, a: int) -> int:
        if a == 0:
            return 0
        x, k = a, 1
        while x != 1:
            x = int(self.mul[x, a])
            k += 1
        return k

    def additive_basis(self) -> List[int]:
        return [self.p**i for i in range(self.h)]

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        rows, inner = a.shape
        cols = b.shape[1]
        out = np.zeros((rows, cols), dtype=np.int64)
        for k in range(inner):
            out = self.add[out, self.mul[a[:, k][:, None], b[k][None, :]]]
        return out

    def frobenius(self, a: np.ndarray, times: int) -> np.ndarray:
        out = np.asarray(a, dtype=np.int64)
        for _ in range(times % self.h):
            out = self.frob[out]
        return out


@dataclass(frozen=True, eq=False)
class ProjectiveSpace:
    n: int
    q: int
    field: FiniteField
    points: np.ndarray
    hyperplanes: np.ndarray
    _codes: np.ndarray

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def label(self) -> str:
        return f"PG({self.n},{self.q})"

    def normalize(self, vectors: np.ndarray) -> np.ndarray:
        vectors = np.atleast_2d(vectors)
        lead_pos = np.argmax(vectors != 0, axis=1)
        lead = vectors[np.arange(len(vectors)), lead_pos]
        return self.field.mul[self.field.inv[lead][:, None], vectors]

    def index_of(self, vectors: np.ndarray) -> np.ndarray:
        """Labels of the points spanned by the given nonzero vectors."""
        normalized = self.normalize(vectors)
        codes = normalized @ (self.q ** np.arange(self.n, -1, -1, dtype=np.int64))
        labels = self._codes[codes]
        if (labels < 0).any():
            raise IsodrumError("Invalid projective point: zero vector")
        return labels


def build_pg(n: int, q: int) -> ProjectiveSpace:
    if n < 1:
        raise IsodrumError(f"Invalid projective dimension {n}")
    field = FiniteField(q)
    vectors = [v for v in product(range(q), repeat=n + 1) if any(v) and next(x for x in v if x) == 1]
    points = np.array(vectors, dtype=np.int64)
    codes = np.full(q ** (n + 1), -1, dtype=np.int64)
    codes[points @ (q ** np.arange(n, -1, -1, dtype=np.int64))] = np.arange(len(points))
    space = ProjectiveSpace(n, q, field, points, points.copy(), codes)
    logger.info("Built %s with %d points", space.label, space.size)
    return space


@dataclass(frozen=True, eq=False)
class IncidenceMatrix:
    """A square 0/1 (or signed) matrix with the parameters of a symmetric design."""

    T: np.ndarray
    k: int
    lam: Optional[int]
    q: Optional[int] = None
    n: Optional[int] = None

    @property
    def N(self) -> int:
        return self.T.shape[0]

    @classmethod
    def from_matrix(cls, T: np.ndarray, q: Optional[int] = None, n: Optional[int] = None) -> "IncidenceMatrix":
        A = np.abs(np.asarray(T, dtype=np.int64))
        k = int(A[0].sum())
        gram = A @ A.T
        off = gram[~np.eye(len(A), dtype=bool)]
        lam = int(off[0]) if len(off) and (off == off[0]).all() else None
        return cls(np.asarray(T, dtype=np.int64), k, lam, q, n)

    def satisfies_design(self) -> bool:
        """``|T||T|^t = lam J + (k - lam) I`` with constant row and column sums k."""
        if self.lam is None:
            return False
        A = np.abs(self.T)
        N = self.N
        expected = self.lam * np.ones((N, N), dtype=np.int64) + (self.k - self.lam) * np.eye(N, dtype=np.int64)
        return bool(
            (A @ A.T == expected).all() and (A.sum(axis=0) == self.k).all() and (A.sum(axis=1) == self.k).all()
        )

    def inverse(self) -> sympy.Matrix:
        """Closed-form inverse ``(T^t - (lam/k) J) / (k - lam)`` in exact rationals."""
        if self.lam is None or (self.T < 0).any():
            raise IsodrumError("Invalid incidence matrix: no design parameters")
        N = self.N
        return (sympy.Matrix(self.T.T.tolist()) - sympy.Rational(self.lam, self.k) * sympy.ones(N, N)) / (
            self.k - self.lam
        )

    def verify_inverse(self) -> bool:
        return sympy.Matrix(self.T.tolist()) * self.inverse() == sympy.eye(self.N)


def incidence_matrix(space: ProjectiveSpace) -> IncidenceMatrix:
    """``T[i, j] = 1`` iff point j lies on hyperplane i."""
    f = space.field
    acc = np.zeros((space.size, space.size), dtype=np.int64)
    for k in range(space.n + 1):
        acc = f.add[acc, f.mul[space.hyperplanes[:, k][:, None], space.points[:, k][None, :]]]
    T = (acc == 0).astype(np.int64)
    q, n = space.q, space.n
    k = (q**n - 1) // (q - 1)
    lam = (q ** (n - 1) - 1) // (q - 1)
    return IncidenceMatrix(T, k, lam, q, n)


def is_incidence_of(space: ProjectiveSpace, T: np.ndarray) -> bool:
    """True when T is the incidence matrix of ``space`` up to row and column relabeling."""
    T = np.asarray(T)
    if T.shape != (space.size, space.size):
        return False

    def bipartite(matrix):
        graph = nx.Graph()
        rows, cols = matrix.shape
        graph.add_nodes_from((("r", i) for i in range(rows)), side=0)
        graph.add_nodes_from((("c", j) for j in range(cols)), side=1)
        graph.add_edges_from((("r", i), ("c", j)) for i, j in zip(*np.nonzero(matrix)))
        return graph

    return nx.is_isomorphic(
        bipartite(incidence_matrix(space).T),
        bipartite(T),
        node_match=lambda a, b: a["side"] == b["side"],
    )


def group_order(space: ProjectiveSpace) -> int:
    """Order of PGammaL(n+1, q)."""
    q, m = space.q, space.n + 1
    return space.field.h * q ** (m * (m - 1) // 2) * prod(q**i - 1 for i in range(2, m + 1))


@dataclass(frozen=True, eq=False)
class Generator:
    matrix: np.ndarray
    frob: int
    images: np.ndarray


@dataclass(frozen=True, eq=False)
class CollineationGroup:
    space: ProjectiveSpace
    generators: Tuple[Generator, ...]
    elements: np.ndarray
    parent: np.ndarray
    via: np.ndarray
    frob: np.ndarray

    @property
    def order(self) -> int:
        return len(self.elements)


def _semilinear_images(space: ProjectiveSpace, matrix: np.ndarray, frob: int) -> np.ndarray:
    f = space.field
    twisted = f.frobenius(space.points, frob)
    image = f.matmul(twisted, matrix.T)
    return space.index_of(image)


def _generators(space: ProjectiveSpace) -> List[Generator]:
    f, m = space.field, space.n + 1
    gens = []
    identity = np.eye(m, dtype=np.int64)
    for r in range(m - 1):
        for c in f.additive_basis():
            for (i, j) in ((r, r + 1), (r + 1, r)):
                a = identity.copy()
                a[i, j] = c
                gens.append((a, 0))
    if f.q > 2:
        a = identity.copy()
        a[0, 0] = f.primitive
        gens.append((a, 0))
    if f.h > 1:
        gens.append((identity.copy(), 1))
    return [Generator(a, s, _semilinear_images(space, a, s)) for a, s in gens]


def collineation_group(space: ProjectiveSpace) -> CollineationGroup:
    """All point permutations induced by PGammaL(n+1, q), by closure over generators."""
    expected = group_order(space)
    limit = settings.ISODRUM_GROUP_LIMIT
    if expected > limit:
        raise GroupTooLarge(f"{space.label} has a collineation group of order {expected} > {limit}")
    gens = _generators(space)
    N, h = space.size, space.field.h
    identity = np.arange(N, dtype=np.int16)
    elements = [identity]
    parent, via, frob = [-1], [-1], [0]
    seen: Dict[bytes, int] = {identity.tobytes(): 0}
    frontier = np.array([0])
    while len(frontier):
        current = np.stack([elements[i] for i in frontier])
        nxt = []
        for g_idx, gen in enumerate(gens):
            # (parent o gen)(j) = parent(gen(j))
            composed = current[:, gen.images]
            for row, src in zip(composed, frontier):
                key = row.tobytes()
                if key in seen:
                    continue
                seen[key] = len(elements)
                nxt.append(len(elements))
                elements.append(row)
                parent.append(int(src))
                via.append(g_idx)
                frob.append((frob[src] + gen.frob) % h)
        frontier = np.array(nxt, dtype=np.int64)
    group = CollineationGroup(
        space, tuple(gens), np.stack(elements), np.array(parent), np.array(via), np.array(frob)
    )
    if group.order != expected:
        raise IsodrumError(f"Closure of {space.label} gave {group.order} elements, expected {expected}")
    logger.info("Enumerated %d collineations of %s", group.order, space.label)
    return group


@dataclass(frozen=True, eq=False)
class Collineation:
    """A collineation: point and hyperplane permutations plus its semilinear matrix."""

    point_perm: Permutation
    hyperplane_perm: Permutation
    matrix: np.ndarray
    frob: int
    kind: str

    @property
    def fixed(self) -> int:
        return len(self.point_perm.fixed_points())


def _element_matrix(group: CollineationGroup, index: int) -> Tuple[np.ndarray, int]:
    f = group.space.field
    chain = []
    while group.parent[index] >= 0:
        chain.append(group.generators[group.via[index]])
        index = int(group.parent[index])
    matrix = np.eye(group.space.n + 1, dtype=np.int64)
    sigma = 0
    for gen in reversed(chain):
        # (A, s) o (B, t) = (A * B^s, s + t)
        matrix = f.matmul(matrix, f.frobenius(gen.matrix, sigma))
        sigma = (sigma + gen.frob) % f.h
    flat = matrix.ravel()
    lead = flat[np.flatnonzero(flat)[0]]
    return f.mul[f.inv[lead], matrix], sigma


def hyperplane_permutation(
    space: ProjectiveSpace, point_images: Sequence[int], T: Optional[np.ndarray] = None
) -> Permutation:
    """The permutation of hyperplanes induced by a permutation of points."""
    T = incidence_matrix(space).T if T is None else T
    blocks = {frozenset(np.flatnonzero(row).tolist()): i for i, row in enumerate(T)}
    images = []
    for row in T:
        image = frozenset(int(point_images[j]) for j in np.flatnonzero(row))
        images.append(blocks[image])
    return Permutation(tuple(images))


def _classify(space: ProjectiveSpace, fixed: int, frob: int) -> str:
    q, n = space.q, space.n
    hyperplane = (q**n - 1) // (q - 1)
    if frob:
        return "baer"
    if q % 2 == 0 and fixed == hyperplane:
        return "elation"
    if q % 2 == 1 and fixed == hyperplane + 1:
        return "homology"
    return "linear"


def enumerate_involutions(
    space: ProjectiveSpace,
    group: Optional[CollineationGroup] = None,
    include_identity: bool = False,
) -> List[Collineation]:
    """Involutions of PGammaL(n+1, q), in group enumeration order."""
    group = group or collineation_group(space)
    elements = group.elements
    squares = np.take_along_axis(elements, elements.astype(np.int64), axis=1)
    identity = np.arange(space.size)
    is_inv = (squares == identity).all(axis=1)
    T = incidence_matrix(space).T
    result = []
    for idx in np.flatnonzero(is_inv):
        point_perm = Permutation(tuple(int(x) for x in elements[idx]))
        if point_perm.is_identity() and not include_identity:
            continue
        matrix, sigma = _element_matrix(group, int(idx))
        fixed = len(point_perm.fixed_points())
        result.append(
            Collineation(
                point_perm,
                hyperplane_permutation(space, point_perm.images, T),
                matrix,
                sigma,
                "identity" if point_perm.is_identity() else _classify(space, fixed, sigma),
            )
        )
    logger.info("Found %d involutions in %s", len(result), space.label)
    return result


def dual_commutes(space: ProjectiveSpace, collineation: Collineation) -> bool:
    """``T P = H T`` for the point and hyperplane permutation matrices of ``collineation``."""
    T = incidence_matrix(space).T
    P = collineation.point_perm.matrix().T
    H = collineation.hyperplane_perm.matrix().T
    return bool((T @ P == H @ T).all())


def involution_classes(
    space: ProjectiveSpace,
    involutions: Sequence[Collineation],
    group: Optional[CollineationGroup] = None,
) -> List[List[int]]:
    """Conjugacy classes, as lists of positions into ``involutions``."""
    group = group or collineation_group(space)
    position = {c.point_perm.images: i for i, c in enumerate(involutions)}
    gen_perms = [Permutation(tuple(int(x) for x in g.images)) for g in group.generators]
    gen_perms += [g.inverse() for g in gen_perms]
    assigned = set()
    classes = []
    for start, inv in enumerate(involutions):
        if start in assigned:
            continue
        members = [start]
        assigned.add(start)
        queue = [inv.point_perm]
        while queue:
            g = queue.pop()
            for x in gen_perms:
                conj = x * g * x.inverse()
                idx = position.get(conj.images)
                if idx is not None and idx not in assigned:
                    assigned.add(idx)
                    members.append(idx)
                    queue.append(conj)
        classes.append(sorted(members))
    logger.info("Involutions of %s fall into %d classes", space.label, len(classes))
    return classes


def _connected(perms: Sequence[Permutation], size: int) -> bool:
    uf = nx.utils.UnionFind(range(size))
    for g in perms:
        for i, j in enumerate(g.images):
            if i < j:
                uf.union(i, j)
    return len(set(uf[i] for i in range(size))) == 1


def _graphs(points: Sequence[Permutation], hyperplanes: Sequence[Permutation]) -> Tuple[ColoredGraph, ColoredGraph]:
    d = points[0].d
    return involution_graph(adjacency_set(points, d)), involution_graph(adjacency_set(hyperplanes, d))


def _same_pair(a: Tuple[ColoredGraph, ColoredGraph], b: Tuple[ColoredGraph, ColoredGraph]) -> bool:
    """Equal up to one global color relabeling and swapping the two members."""
    for perm in permutations(COLORS):
        mapping = dict(zip(COLORS, perm))
        relabeled = [
            ColoredGraph.from_edges(g.d, [(i, j, mapping[mu]) for i, j, mu in g.edges]) for g in a
        ]
        for first, second in ((b[0], b[1]), (b[1], b[0])):
            if colored_isomorphic(relabeled[0], first) and colored_isomorphic(relabeled[1], second):
                return True
    return False


def _signature(graphs: Tuple[ColoredGraph, ColoredGraph]) -> Tuple:
    parts = []
    for g in graphs:
        degrees = tuple(sorted(int(x) for x in g.delta.sum(axis=1)))
        per_color = tuple(sorted(sum(1 for e in g.edges if e[2] == mu) for mu in COLORS))
        parts.append((degrees, per_color))
    return tuple(sorted(parts))


def closes_on_common_tile(graphs: Tuple[ColoredGraph, ColoredGraph]) -> bool:
    """Both members unfold around one triangle: every cycle alternates two colors
    and the corner angles those cycles force agree between the members."""
    if all(g.cycle_rank() == 0 for g in graphs):
        return True
    try:
        first, second = (BaseTile.for_graph(g) for g in graphs)
    except InvalidPolygonError:
        return False
    return first.angles == second.angles


def search_isospectral_data(
    space: ProjectiveSpace,
    r: int = 3,
    allow_cycle_rank: int = 0,
    involutions: Optional[Sequence[Collineation]] = None,
) -> List[PairSpec]:
    """Pairs of involution graphs from r-tuples of involutions with connected graphs.

    A tuple qualifies when its moved-point total is ``2(N - 1 + rho)`` with
    ``rho <= allow_cycle_rank`` and both the point graph and the hyperplane graph are
    connected. Pairs whose members are color-isomorphic are congruent and dropped, as
    are pairs with cycles that cannot close around a common base triangle.
    """
    group = collineation_group(space)
    involutions = list(involutions) if involutions is not None else enumerate_involutions(space, group)
    N = space.size
    targets = {2 * (N - 1 + rho) for rho in range(allow_cycle_rank + 1)}
    moved = [inv.point_perm.moved() for inv in involutions]
    classes = involution_classes(space, involutions, group)

    found: List[Tuple[Tuple, Tuple[ColoredGraph, ColoredGraph], Tuple[int, ...]]] = []
    checked = 0
    unfoldable = 0
    for members in classes:
        rep = members[0]
        others = [i for i in range(len(involutions)) if i != rep]
        for rest in combinations(others, r - 1):
            if moved[rep] + sum(moved[i] for i in rest) not in targets:
                continue
            chosen = (rep,) + rest
            points = [involutions[i].point_perm for i in chosen]
            hyperplanes = [involutions[i].hyperplane_perm for i in chosen]
            if not (_connected(points, N) and _connected(hyperplanes, N)):
                continue
            checked += 1
            graphs = _graphs(points, hyperplanes)
            if colored_isomorphic(graphs[0], graphs[1]):
                continue
            if not closes_on_common_tile(graphs):
                unfoldable += 1
                continue
            signature = _signature(graphs)
            if any(sig == signature and _same_pair(graphs, known) for sig, known, _ in found):
                continue
            found.append((signature, graphs, chosen))
    logger.info(
        "%s: %d connected tuples, %d without a common tile, %d distinct pairs",
        space.label,
        checked,
        unfoldable,
        len(found),
    )

    pairs = []
    for number, (_, _, chosen) in enumerate(found, start=1):
        pairs.append(
            PairSpec.from_permutations(
                f"{N}_{number}",
                f"PGammaL({space.n + 1},{space.q})",
                [involutions[i].point_perm for i in chosen],
                [involutions[i].hyperplane_perm for i in chosen],
            )
        )
    return pairs


@dataclass(frozen=True, eq=False)
class Commutant:
    """Basis of ``{T : T M^(mu) = N^(mu) T}`` made of signed orbit indicators."""

    basis: Tuple[np.ndarray, ...]
    signed: bool

    @property
    def dim(self) -> int:
        return len(self.basis)


def commutant(M: AdjacencySet, N: AdjacencySet, dirichlet: bool = False) -> Commutant:
    """Rows of T are indexed by N's tiles, columns by M's tiles.

    ``T M = N T`` forces ``T[h(i), g(k)] = s_h(i) s_g(k) T[i, k]`` with
    g, h the generators of M and N and s = -1 at fixed points when ``dirichlet``.
    Each orbit of cells is one basis element; an orbit whose signs conflict is zero.
    """
    if M.d != N.d:
        raise DimensionMismatch(f"Adjacency sets act on {M.d} and {N.d} tiles")
    d = M.d
    graph = nx.MultiGraph()
    graph.add_nodes_from(product(range(d), range(d)))
    for mu in COLORS:
        g, h = M.gen(mu), N.gen(mu)
        for i in range(d):
            for k in range(d):
                sign = 1
                if dirichlet:
                    sign = (-1 if h(i) == i else 1) * (-1 if g(k) == k else 1)
                graph.add_edge((i, k), (h(i), g(k)), sign=sign)

    basis = []
    components = sorted((sorted(c) for c in nx.connected_components(graph)), key=lambda c: c[0])
    for cells in components:
        signs = {cells[0]: 1}
        consistent = True
        stack = [cells[0]]
        while stack and consistent:
            cell = stack.pop()
            for _, nb, sign in graph.edges(cell, data="sign"):
                expected = signs[cell] * sign
                if nb not in signs:
                    signs[nb] = expected
                    stack.append(nb)
                elif signs[nb] != expected:
                    consistent = False
                    break
        if not consistent:
            continue
        B = np.zeros((d, d), dtype=np.int64)
        for (i, k), s in signs.items():
            B[i, k] = s
        basis.append(B)
    return Commutant(tuple(basis), dirichlet)


def _is_monomial(T: np.ndarray) -> bool:
    A = np.abs(T)
    return bool((A.sum(axis=0) == 1).all() and (A.sum(axis=1) == 1).all() and ((A == 0) | (A == 1)).all())


def solve_transplantation(M: AdjacencySet, N: AdjacencySet, dirichlet: bool = False) -> IncidenceMatrix:
    """Find the transplantation matrix T with ``T M^(mu) = N^(mu) T`` for all mu.

    Unsigned: the invertible 0/1 solution with constant row and column sums and the
    smallest row sum. With ``dirichlet`` the fixed-point diagonals carry -1 and the
    sparsest invertible {0, +-1} solution is returned.
    """
    comm = commutant(M, N, dirichlet)
    limit = settings.ISODRUM_SIGNED_MAX_DIM if dirichlet else settings.ISODRUM_COMMUTANT_MAX_DIM
    if comm.dim > limit:
        raise CommutantTooLarge(f"Commutant dimension {comm.dim} exceeds {limit}")
    if comm.dim == 0:
        raise NotTransplantable("Commutant is trivial")
    d = M.d
    values = (-1, 0, 1) if dirichlet else (0, 1)
    best = None
    best_key = None
    for coeffs in product(values, repeat=comm.dim):
        nonzero = [c for c in coeffs if c]
        if not nonzero or nonzero[0] < 0:
            continue
        T = sum(c * B for c, B in zip(coeffs, comm.basis))
        if np.linalg.matrix_rank(T.astype(float)) < d:
            continue
        if _is_monomial(T):
            raise CongruentDomains("Commutant contains a permutation: the domains are congruent")
        if dirichlet:
            key = int(np.abs(T).sum())
        else:
            rows, cols = T.sum(axis=1), T.sum(axis=0)
            if not ((rows == rows[0]).all() and (cols == rows[0]).all()):
                continue
            key = int(rows[0])
        if best_key is None or key < best_key:
            best, best_key = T, key
    if best is None:
        raise NotTransplantable("No invertible solution with constant row sums in the commutant")

    if dirichlet:
        ok = all((best @ M.signed(mu) == N.signed(mu) @ best).all() for mu in COLORS)
    else:
        ok = all((best @ M[mu] == N[mu] @ best).all() for mu in COLORS)
    if not ok:
        raise IsodrumError("Transplantation check failed")
    result = IncidenceMatrix.from_matrix(best)
    logger.info(
        "Transplantation found: d=%d, commutant dimension %d, k=%d, lambda=%s",
        d,
        comm.dim,
        result.k,
        result.lam,
    )
    return result


def word_products(adj: AdjacencySet, max_len: int, signed: bool = False):
    """Yield ``(word, product)`` for every word over {1,2,3} of length 1..max_len, depth first."""
    mats = {mu: (adj.signed(mu) if signed else adj[mu]) for mu in COLORS}
    stack = [((), np.eye(adj.d, dtype=np.int64))]
    while stack:
        word, prod_ = stack.pop()
        if word:
            yield word, prod_
        if len(word) < max_len:
            stack.extend((word + (mu,), prod_ @ mats[mu]) for mu in reversed(COLORS))


def word_products_identity(
    incidence: IncidenceMatrix, M: AdjacencySet, N: AdjacencySet, max_len: int = 5
) -> bool:
    """``T M_w T^t = lam J + (k - lam) N_w`` for every word w up to ``max_len``."""
    if incidence.lam is None:
        return False
    T, k, lam = incidence.T, incidence.k, incidence.lam
    J = np.ones((M.d, M.d), dtype=np.int64)
    for (word, Mw), (_, Nw) in zip(word_products(M, max_len), word_products(N, max_len)):
        if not (T @ Mw @ T.T == lam * J + (k - lam) * Nw).all():
            logger.info("Word identity fails for word %s", word)
            return False
    return True


@dataclass(frozen=True)
class ConstraintSolution:
    case: str
    r: int
    q: int
    p: Optional[int] = None


def constraint_table(max_r: int = 12, max_q: int = 64) -> List[ConstraintSolution]:
    """Integer solutions of the counting equations for tree-like and one-cycle data.

    even-nonsquare: r q^2/2 = q^2 + q
    odd-nonsquare:  r (q^2 - 1)/2 = q^2 + q
    square-tree:    r (p^4 - p)/2 = p^4 + p^2
    square-cycle:   r (p^4 - p)/2 = p^4 + p^2 + 1
    """
    solutions = []
    for q in range(2, max_q + 1):
        factors = sympy.factorint(q)
        if len(factors) != 1:
            continue
        ((p, h),) = factors.items()
        for r in range(1, max_r + 1):
            if h % 2 == 1:
                if p == 2 and Fraction(r * q * q, 2) == q * q + q:
                    solutions.append(ConstraintSolution("even-nonsquare", r, q))
                if p != 2 and Fraction(r * (q * q - 1), 2) == q * q + q:
                    solutions.append(ConstraintSolution("odd-nonsquare", r, q))
            else:
                root = int(sympy.sqrt(q))
                lhs = Fraction(r * (root**4 - root), 2)
                if lhs == root**4 + root**2:
                    solutions.append(ConstraintSolution("square-tree", r, q, root))
                if lhs == root**4 + root**2 + 1:
                    solutions.append(ConstraintSolution("square-cycle", r, q, root))
    return solutions
