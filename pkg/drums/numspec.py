"""Finite-difference Dirichlet spectra of unfolded billiards.

Only domains whose tile vertices sit on a square grid are handled (half-square
and rectangle tilings). Grid nodes on boundary segments, slits included, are
excluded, so neighbouring interior nodes never straddle the boundary and the
5-point stencil with zero exterior values is the Dirichlet Laplacian.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from django.conf import settings
from scipy import ndimage
from scipy.sparse.linalg import eigsh

from .billiards import BaseTile, PlanarDomain, WeylData
from .exceptions import DimensionMismatch, EigenSolveError, IsodrumError, NotGridAligned, SpectrumTooShort

logger = logging.getLogger(__name__)

# Mode numbers of the first closed-form states on the seven-tile half-square pair.
TRIANGULAR_LABELS = {(2, 1): 9, (3, 1): 21, (3, 2): 27, (4, 1): 38, (4, 2): 44}
NEUMANN_TRIANGULAR_LABELS = {(0, 1): 5, (1, 1): 9, (0, 2): 15, (1, 2): 20, (2, 2): 29}


@dataclass(frozen=True, eq=False)
class GridDomain:
    domain: PlanarDomain
    n_grid: int
    unit: float
    nodes: np.ndarray  # (count, 2) integer grid coordinates of interior nodes
    tiles: np.ndarray  # lowest tile index containing each node
    origin: Tuple[int, int]
    shape: Tuple[int, int]  # (rows, cols) of the bounding box, rows along y

    @property
    def h(self) -> float:
        return self.unit / self.n_grid

    @property
    def size(self) -> int:
        return len(self.nodes)

    def coordinates(self) -> np.ndarray:
        return self.nodes * self.h

    def lookup(self) -> Dict[Tuple[int, int], int]:
        return {(int(x), int(y)): n for n, (x, y) in enumerate(self.nodes)}

    @classmethod
    def from_domain(cls, domain: PlanarDomain, n_grid: int, unit: Optional[float] = None) -> "GridDomain":
        if n_grid < 1:
            raise IsodrumError(f"Invalid grid size {n_grid}")
        unit = float(unit or domain.tile.scale)
        factor = n_grid / unit

        def to_grid(points):
            scaled = np.asarray(points, dtype=float) * factor
            rounded = np.rint(scaled)
            if np.abs(scaled - rounded).max() > 1e-9:
                raise NotGridAligned(f"Tile vertices of {domain.tile.name} are not on a grid with n={n_grid}")
            return rounded.astype(np.int64)

        polygons = [to_grid(domain.tile_vertices(i)) for i in range(domain.d)]
        segments = [(to_grid(a), to_grid(b)) for a, b, _, _ in domain.boundary_edges]
        allv = np.vstack(polygons)
        (x0, y0), (x1, y1) = allv.min(axis=0), allv.max(axis=0)
        xs, ys = np.meshgrid(np.arange(x0, x1 + 1), np.arange(y0, y1 + 1))
        px, py = xs.ravel(), ys.ravel()

        owner = np.full(px.shape, -1, dtype=np.int64)
        for i, poly in reversed(list(enumerate(polygons))):
            sign = 1 if BaseTile.signed_area(poly) > 0 else -1
            inside = np.ones(px.shape, dtype=bool)
            for a, b in zip(poly, np.roll(poly, -1, axis=0)):
                cross = (b[0] - a[0]) * (py - a[1]) - (b[1] - a[1]) * (px - a[0])
                inside &= sign * cross >= 0
            owner[inside] = i

        on_boundary = np.zeros(px.shape, dtype=bool)
        for a, b in segments:
            dx, dy = b - a
            cross = dx * (py - a[1]) - dy * (px - a[0])
            dot = dx * (px - a[0]) + dy * (py - a[1])
            on_boundary |= (cross == 0) & (dot >= 0) & (dot <= dx * dx + dy * dy)

        keep = (owner >= 0) & ~on_boundary
        nodes = np.stack([px[keep], py[keep]], axis=1)
        grid = cls(domain, n_grid, unit, nodes, owner[keep], (int(x0), int(y0)),
                   (int(y1 - y0 + 1), int(x1 - x0 + 1)))
        logger.info("Rasterised %d tiles at n=%d: %d interior nodes", domain.d, n_grid, grid.size)
        return grid

    def laplacian(self) -> sp.csr_matrix:
        """The 5-point negative Laplacian with Dirichlet exterior."""
        index = self.lookup()
        rows, cols, vals = [], [], []
        for n, (x, y) in enumerate(self.nodes):
            rows.append(n)
            cols.append(n)
            vals.append(4.0)
            for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                m = index.get((int(x) + dx, int(y) + dy))
                if m is not None:
                    rows.append(n)
                    cols.append(m)
                    vals.append(-1.0)
        A = sp.coo_matrix((vals, (rows, cols)), shape=(self.size, self.size)).tocsr()
        return A / self.h**2

    def to_image(self, values: np.ndarray) -> np.ndarray:
        """Values on the bounding box, rows from the largest y down, nan outside."""
        image = np.full(self.shape, np.nan)
        x0, y0 = self.origin
        image[self.shape[0] - 1 - (self.nodes[:, 1] - y0), self.nodes[:, 0] - x0] = values
        return image


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Ascending eigenvalues in 1/length^2; ``unit`` is the length d of the pi^2/d^2 scale."""

    values: np.ndarray
    unit: float = 1.0
    vectors: Optional[np.ndarray] = None
    grid: Optional[GridDomain] = None

    def normalized(self) -> np.ndarray:
        return self.values * self.unit**2 / math.pi**2

    def __len__(self) -> int:
        return len(self.values)


def fd_spectrum(grid: GridDomain, count: int) -> Spectrum:
    if count < 1:
        raise IsodrumError(f"Invalid eigenvalue count {count}")
    if count >= grid.size:
        raise SpectrumTooShort(f"Requested {count} eigenvalues from {grid.size} interior nodes")
    A = grid.laplacian()
    values, vectors = eigsh(A, k=count, sigma=0, which="LM")
    order = np.argsort(values)
    values, vectors = values[order], vectors[:, order]

    norm_a = 8.0 / grid.h**2
    limit = settings.ISODRUM_EIG_RESIDUAL * norm_a
    residuals = np.linalg.norm(A @ vectors - vectors * values, axis=0)
    if (residuals > limit).any():
        worst = int(np.argmax(residuals))
        raise EigenSolveError(f"Eigenpair {worst} has residual {residuals[worst]:.3g} > {limit:.3g}")
    vectors = vectors / (np.linalg.norm(vectors, axis=0) * grid.h)
    logger.info("Solved %d eigenpairs on %d nodes", count, grid.size)
    return Spectrum(values, grid.unit, vectors, grid)


def richardson(coarse: Sequence[float], fine: Sequence[float]) -> np.ndarray:
    """Two-grid extrapolation for an error proportional to h^2, h halved between grids."""
    n = min(len(coarse), len(fine))
    return (4 * np.asarray(fine[:n], dtype=float) - np.asarray(coarse[:n], dtype=float)) / 3


def weyl_remainder(values: Sequence[float], weyl: WeylData) -> np.ndarray:
    """``N(E) - A E/4pi + L sqrt(E)/4pi - K`` at each eigenvalue, N counting that mode."""
    E = np.asarray(values, dtype=float)
    counts = np.arange(1, len(E) + 1)
    return counts - weyl.area * E / (4 * math.pi) + weyl.perimeter * np.sqrt(E) / (4 * math.pi) - float(weyl.K)


@dataclass(frozen=True, eq=False)
class GridState:
    values: np.ndarray
    eigenvalue: float
    label: Optional[int]
    residual: Optional[float] = None


def triangular_state(m: int, n: int, grid: GridDomain) -> GridState:
    """``sin(m pi x/d) sin(n pi y/d) - sin(n pi x/d) sin(m pi y/d)`` sampled on the grid."""
    if not m > n >= 1:
        raise IsodrumError(f"Invalid triangular state ({m}, {n}): need m > n >= 1")
    d = grid.unit
    x, y = grid.coordinates().T
    k = math.pi / d
    values = np.sin(m * k * x) * np.sin(n * k * y) - np.sin(n * k * x) * np.sin(m * k * y)
    eigenvalue = k**2 * (m * m + n * n)
    norm = np.linalg.norm(values)
    residual = None
    if norm > 0:
        residual = float(np.linalg.norm(grid.laplacian() @ values - eigenvalue * values) / norm)
    return GridState(values, eigenvalue, TRIANGULAR_LABELS.get((m, n)), residual)


def neumann_triangular_state(m: int, n: int, grid: GridDomain) -> GridState:
    """``cos(m pi x/d) cos(n pi y/d) + cos(m pi y/d) cos(n pi x/d)`` for ``0 <= m <= n``."""
    if not 0 <= m <= n or n == 0:
        raise IsodrumError(f"Invalid Neumann state ({m}, {n}): need 0 <= m <= n, n > 0")
    d = grid.unit
    x, y = grid.coordinates().T
    k = math.pi / d
    values = np.cos(m * k * x) * np.cos(n * k * y) + np.cos(m * k * y) * np.cos(n * k * x)
    return GridState(values, k**2 * (m * m + n * n), NEUMANN_TRIANGULAR_LABELS.get((m, n)))


@dataclass(frozen=True, eq=False)
class Transplant:
    values: np.ndarray
    residual: float
    constant: float
    overlap: Optional[float]


def transplant_eigenvector(
    T: np.ndarray,
    phi: np.ndarray,
    grid_a: GridDomain,
    grid_b: GridDomain,
    eigenvalue: float,
    spectrum_b: Optional[Spectrum] = None,
) -> Transplant:
    """Build ``psi`` on B tile by tile: ``psi_i = sum_j T_ij phi_j`` in base-tile coordinates.

    Rows of T are B's tiles, columns A's tiles.
    """
    T = np.asarray(T)
    d_a, d_b = grid_a.domain.d, grid_b.domain.d
    if T.shape != (d_b, d_a) or d_a != d_b:
        raise DimensionMismatch(f"Matrix of shape {T.shape} does not match {d_b} and {d_a} tiles")
    if abs(grid_a.h - grid_b.h) > 1e-12:
        raise DimensionMismatch("Both domains must share the grid spacing")
    h = grid_b.h
    lookup_a = grid_a.lookup()
    placements_a = grid_a.domain.placements
    placements_b = grid_b.domain.placements
    coords_b = grid_b.coordinates()

    psi = np.zeros(grid_b.size)
    for n, (X, i) in enumerate(zip(coords_b, grid_b.tiles)):
        local = placements_b[i].to_local(X)
        total = 0.0
        for j in np.flatnonzero(T[i]):
            Y = placements_a[j].apply(local)
            key = (int(round(Y[0] / h)), int(round(Y[1] / h)))
            m = lookup_a.get(key)
            if m is not None:
                total += T[i, j] * phi[m]
        psi[n] = total

    norm = np.linalg.norm(psi) * h
    if norm < 1e-12:
        raise IsodrumError("Transplanted function vanishes: wrong sign matrix")
    psi = psi / norm
    A = grid_b.laplacian()
    residual = float(np.linalg.norm(A @ psi - eigenvalue * psi) / np.linalg.norm(psi))

    overlap = None
    if spectrum_b is not None and spectrum_b.vectors is not None:
        close = np.abs(spectrum_b.values - eigenvalue) <= 1e-6 * abs(eigenvalue)
        if close.any():
            coeffs = spectrum_b.vectors[:, close].T @ psi * h**2
            overlap = float(np.sqrt(np.sum(coeffs**2)))
        else:
            overlap = 0.0
    logger.info("Transplanted eigenvector: residual %.3g, overlap %s", residual, overlap)
    return Transplant(psi, residual, residual / h**2, overlap)


def nodal_count(vector: np.ndarray, grid: GridDomain) -> int:
    """Number of 4-connected sign components, ignoring near-zero nodes."""
    image = grid.to_image(np.asarray(vector, dtype=float))
    scale = np.nanmax(np.abs(image))
    if not scale:
        return 0
    cutoff = 1e-8 * scale
    filled = np.nan_to_num(image, nan=0.0)
    _, positive = ndimage.label(filled > cutoff)
    _, negative = ndimage.label(filled < -cutoff)
    return int(positive + negative)


def mixed_bc_pair_spectra(cutoff: float) -> Tuple[List[Fraction], List[Fraction]]:
    """Closed-form spectra, in units of pi^2/d^2, of the square and triangle with mixed sides.

    Square: ``(m + 1/2)^2 + n^2``, ``m >= 0``, ``n >= 1``.
    Triangle: ``((m + 1/2)^2 + (n + 1/2)^2) / 2``, ``m > n >= 0``.
    """
    limit = Fraction(cutoff).limit_denominator(10**9) if not isinstance(cutoff, Fraction) else cutoff
    square = []
    m = 0
    while Fraction((2 * m + 1) ** 2, 4) + 1 <= limit:
        n = 1
        while True:
            value = Fraction((2 * m + 1) ** 2, 4) + n * n
            if value > limit:
                break
            square.append(value)
            n += 1
        m += 1
    triangle = []
    n = 0
    while Fraction((2 * n + 3) ** 2 + (2 * n + 1) ** 2, 8) <= limit:
        m = n + 1
        while True:
            value = Fraction((2 * m + 1) ** 2 + (2 * n + 1) ** 2, 8)
            if value > limit:
                break
            triangle.append(value)
            m += 1
        n += 1
    return sorted(square), sorted(triangle)


@dataclass(frozen=True)
class MixedInvariants:
    area: float
    length_difference: float
    corner: float


def mixed_bc_invariants(vertices: Sequence[Sequence[float]], labels: Sequence[str]) -> MixedInvariants:
    """Heat-trace invariants of a polygon whose side ``v[i] -> v[i+1]`` carries label D or N.

    Returns area, ``L_D - L_N`` and ``sum_DD + sum_NN (pi^2 - b^2)/b - 1/2 sum_DN (pi^2 + 2 b^2)/b``
    over corner angles b.
    """
    v = np.asarray(vertices, dtype=float)
    k = len(v)
    if len(labels) != k or any(label not in ("D", "N") for label in labels):
        raise IsodrumError("Invalid side labels: need one D or N per side")
    area = BaseTile.signed_area(v)
    if area <= 0:
        raise IsodrumError("Invalid polygon: vertices must be counter-clockwise")
    lengths = [float(np.hypot(*(v[(i + 1) % k] - v[i]))) for i in range(k)]
    length_difference = sum(l if s == "D" else -l for l, s in zip(lengths, labels))
    corner = 0.0
    for i in range(k):
        a = v[i - 1] - v[i]
        b = v[(i + 1) % k] - v[i]
        beta = math.atan2(abs(a[0] * b[1] - a[1] * b[0]), float(np.dot(a, b)))
        before, after = labels[i - 1], labels[i]
        if before == after:
            corner += (math.pi**2 - beta**2) / beta
        else:
            corner -= 0.5 * (math.pi**2 + 2 * beta**2) / beta
    return MixedInvariants(area, length_difference, corner)


def mixed_bc_square(d: float = 1.0) -> Tuple[List[Tuple[float, float]], List[str]]:
    """Square of side d, Neumann on x = d."""
    return [(0, 0), (d, 0), (d, d), (0, d)], ["D", "N", "D", "D"]


def mixed_bc_triangle(d: float = 1.0) -> Tuple[List[Tuple[float, float]], List[str]]:
    """Right isosceles triangle with legs d*sqrt(2), Neumann on the vertical leg."""
    a = d * math.sqrt(2)
    return [(0, 0), (a, 0), (a, a)], ["D", "N", "D"]
