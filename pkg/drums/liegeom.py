"""Point-graph spectra of thick generalized polygons.

The collinearity graph of a generalized n-gon of order (s, t) is distance
regular, so its distinct eigenvalues are those of the small tridiagonal
intersection matrix. Closed forms are kept in sympy and checked against a
numerical solve of the symmetrised matrix.
"""

import logging
from typing import Dict, FrozenSet, Iterable, List, Tuple

import numpy as np
import sympy
from scipy.linalg import eigvalsh_tridiagonal

from .exceptions import IsodrumError

logger = logging.getLogger(__name__)

GONS = (3, 4, 6, 8)
AGREEMENT_TOL = 1e-10


def _check(gon: int, s: int, t: int) -> None:
    if gon not in GONS:
        raise IsodrumError(f"Invalid gon {gon}: thick generalized n-gons exist only for n in {GONS}")
    if s < 2 or t < 2:
        raise IsodrumError(f"Order ({s}, {t}) is not thick")
    if gon == 3 and s != t:
        raise IsodrumError(f"A projective plane has order (n, n), got ({s}, {t})")


def intersection_array(gon: int, s: int, t: int) -> Tuple[List[int], List[int], List[int]]:
    """``(a, b, c)`` of the collinearity graph, indexed by distance 0..diameter."""
    _check(gon, s, t)
    k = s * (t + 1)
    if gon == 3:
        return [0, k - 1], [k, 0], [0, 1]
    m = gon // 2
    a = [0] + [s - 1] * (m - 1) + [(t + 1) * (s - 1)]
    b = [k] + [s * t] * (m - 1) + [0]
    c = [0] + [1] * (m - 1) + [t + 1]
    return a, b, c


def intersection_matrix(gon: int, s: int, t: int) -> sympy.Matrix:
    a, b, c = intersection_array(gon, s, t)
    size = len(a)
    B = sympy.zeros(size, size)
    for i in range(size):
        B[i, i] = a[i]
        if i + 1 < size:
            B[i, i + 1] = c[i + 1]
            B[i + 1, i] = b[i]
    return B


def closed_form_spectrum(gon: int, s: int, t: int) -> FrozenSet[sympy.Expr]:
    _check(gon, s, t)
    s, t = sympy.Integer(s), sympy.Integer(t)
    if gon == 3:
        v = s**2 + s + 1
        return frozenset({sympy.Integer(-1), v - 1})
    if gon == 4:
        return frozenset({-t - 1, s - 1, s * (t + 1)})
    if gon == 6:
        root = sympy.sqrt(s * t)
        return frozenset({-t - 1, s * (t + 1), s - 1 - root, s - 1 + root})
    root = sympy.sqrt(2 * s * t)
    return frozenset({-t - 1, s - 1, s * (t + 1), s - 1 - root, s - 1 + root})


def numeric_spectrum(gon: int, s: int, t: int) -> np.ndarray:
    """Eigenvalues of the intersection matrix through its symmetric tridiagonal similarity."""
    a, b, c = intersection_array(gon, s, t)
    off = np.sqrt([b[i] * c[i + 1] for i in range(len(a) - 1)], dtype=float)
    return eigvalsh_tridiagonal(np.array(a, dtype=float), off)


def gp_spectrum(gon: int, s: int, t: int) -> List[sympy.Expr]:
    """Distinct point-graph eigenvalues, ascending, cross-checked against the numerical solve."""
    exact = sorted(closed_form_spectrum(gon, s, t), key=lambda x: float(x))
    numeric = numeric_spectrum(gon, s, t)
    if len(numeric) != len(exact) or np.max(np.abs(numeric - np.array([float(x) for x in exact]))) > AGREEMENT_TOL * max(
        1.0, float(exact[-1])
    ):
        raise IsodrumError(f"Closed form and numerical spectra disagree for gon={gon}, order ({s}, {t})")
    return exact


def spectrum_determines_order(gon: int, grid: Iterable[Tuple[int, int]]) -> bool:
    """True when no two orders of the grid share a point-graph spectrum."""
    seen: Dict[FrozenSet[sympy.Expr], Tuple[int, int]] = {}
    for s, t in grid:
        spectrum = frozenset(gp_spectrum(gon, s, t))
        if spectrum in seen and seen[spectrum] != (s, t):
            logger.info("gon=%d: orders %s and %s share a spectrum", gon, seen[spectrum], (s, t))
            return False
        seen[spectrum] = (s, t)
    logger.info("gon=%d: %d orders, all spectra distinct", gon, len(seen))
    return True


def thick_grid(gon: int, limit: int = 32) -> List[Tuple[int, int]]:
    if gon == 3:
        return [(n, n) for n in range(2, limit + 1)]
    return [(s, t) for s in range(2, limit + 1) for t in range(2, limit + 1)]
