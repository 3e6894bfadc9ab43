"""Flat tori and their lattices.

A torus R^n / L is determined by the lattice L. Two tori are isospectral iff
their lattices (equivalently the duals) have the same theta series, so most of
this module counts lattice vectors by norm. Gram arithmetic is exact through
sympy; only the enumeration bounds and the Jacobi check use floats.
"""

import itertools
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
import sympy
from django.conf import settings

from .exceptions import (
    DimensionMismatch,
    EnumerationBudgetExceeded,
    ExtensionTooLarge,
    IsodrumError,
)

logger = logging.getLogger(__name__)

LLL_DELTA = Fraction(3, 4)


def _fraction(value) -> Fraction:
    value = sympy.nsimplify(value, rational=True) if not isinstance(value, sympy.Rational) else value
    if not isinstance(value, sympy.Rational):
        raise IsodrumError(f"Gram entry {value} is not rational")
    return Fraction(int(value.p), int(value.q))


@dataclass(frozen=True, eq=False)
class Lattice:
    """Lattice spanned by the columns of ``basis``."""

    basis: sympy.Matrix
    name: str = ""

    def __post_init__(self):
        if self.basis.rows != self.basis.cols:
            raise DimensionMismatch(f"Basis of shape {self.basis.shape} is not square")
        if self.basis.det() == 0:
            raise IsodrumError("Basis vectors are linearly dependent")

    @classmethod
    def from_gram(cls, gram, name: str = "") -> "Lattice":
        """A lattice with the given Gram matrix, realised through its Cholesky factor."""
        gram = sympy.Matrix(gram)
        return cls(gram.cholesky(hermitian=False).T, name)

    @property
    def rank(self) -> int:
        return self.basis.rows

    @property
    def gram(self) -> sympy.Matrix:
        return (self.basis.T * self.basis).applyfunc(sympy.nsimplify)

    @property
    def determinant(self) -> sympy.Expr:
        return self.gram.det()

    @property
    def volume(self) -> float:
        return math.sqrt(float(self.determinant))

    def gram_fractions(self) -> List[List[Fraction]]:
        return [[_fraction(x) for x in row] for row in self.gram.tolist()]

    @property
    def scale(self) -> int:
        """Smallest s with s * |x|^2 integral for every lattice vector x."""
        G = self.gram_fractions()
        dens = [G[i][i].denominator for i in range(self.rank)]
        dens += [(2 * G[i][j]).denominator for i in range(self.rank) for j in range(i + 1, self.rank)]
        return math.lcm(*dens)

    def dual(self) -> "Lattice":
        return Lattice(self.basis * self.gram.inv(), f"{self.name}*" if self.name else "")

    def direct_sum(self, other: "Lattice") -> "Lattice":
        name = f"{self.name}+{other.name}" if self.name and other.name else ""
        return Lattice(sympy.diag(self.basis, other.basis), name)

    def scaled(self, c) -> "Lattice":
        return Lattice(self.basis * sympy.nsimplify(c), self.name)

    def lll(self, delta: Fraction = LLL_DELTA) -> "Lattice":
        U = _lll_transform(self.gram_fractions(), delta)
        return Lattice(self.basis * sympy.Matrix(U).T, self.name)

    def minimum(self) -> Fraction:
        """Smallest nonzero norm."""
        G = self.gram_fractions()
        bound = min(G[i][i] for i in range(self.rank))
        coeffs = theta(self, bound)
        return min(n for n in coeffs.by_norm() if n > 0)


def _gso(G: List[List[Fraction]]) -> Tuple[List[List[Fraction]], List[Fraction]]:
    n = len(G)
    mu = [[Fraction(0)] * n for _ in range(n)]
    B = [Fraction(0)] * n
    for i in range(n):
        for j in range(i):
            mu[i][j] = (G[i][j] - sum(mu[j][k] * mu[i][k] * B[k] for k in range(j))) / B[j]
        B[i] = G[i][i] - sum(mu[i][k] ** 2 * B[k] for k in range(i))
    return mu, B


def _lll_transform(G: List[List[Fraction]], delta: Fraction) -> List[List[int]]:
    """Integer rows U such that U G U^t is LLL-reduced, working on the Gram matrix only."""
    n = len(G)
    G = [row[:] for row in G]
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    mu, B = _gso(G)
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            r = round(mu[k][j])
            if not r:
                continue
            # b_k <- b_k - r b_j
            U[k] = [a - r * b for a, b in zip(U[k], U[j])]
            gkk = G[k][k] - 2 * r * G[k][j] + r * r * G[j][j]
            for i in range(n):
                if i != k:
                    G[k][i] -= r * G[j][i]
                    G[i][k] = G[k][i]
            G[k][k] = gkk
            mu[k][j] -= r
            for i in range(j):
                mu[k][i] -= r * mu[j][i]
        if B[k] >= (delta - mu[k][k - 1] ** 2) * B[k - 1]:
            k += 1
            continue
        U[k], U[k - 1] = U[k - 1], U[k]
        G[k], G[k - 1] = G[k - 1], G[k]
        for row in G:
            row[k], row[k - 1] = row[k - 1], row[k]
        mu, B = _gso(G)
        k = max(k - 1, 1)
    return U


@dataclass
class ThetaCoeffs:
    """Vector counts keyed by scaled norm ``scale * |x|^2``."""

    scale: int
    max_norm: Fraction
    counts: Dict[int, int] = field(default_factory=dict)
    nodes: int = 0

    def by_norm(self) -> Dict[Fraction, int]:
        return {Fraction(m, self.scale): c for m, c in sorted(self.counts.items())}

    def shells(self) -> List[Tuple[Fraction, int]]:
        return list(self.by_norm().items())

    def truncated(self, max_norm) -> Dict[Fraction, int]:
        max_norm = Fraction(max_norm)
        return {n: c for n, c in self.by_norm().items() if n <= max_norm}

    def __getitem__(self, scaled_norm: int) -> int:
        return self.counts.get(scaled_norm, 0)


def short_vectors(lattice: Lattice, max_norm, collect: bool = False):
    """Coefficient vectors of norm at most ``max_norm``, depth first over the reduced basis.

    Returns the :class:`ThetaCoeffs` and, when ``collect`` is set, a list of
    ``(coefficients in the original basis, scaled norm)``.
    """
    max_norm = Fraction(max_norm)
    if max_norm <= 0:
        raise IsodrumError(f"Invalid norm bound {max_norm}: must be positive")
    budget = settings.ISODRUM_THETA_NODE_BUDGET
    s = lattice.scale
    reduced_U = _lll_transform(lattice.gram_fractions(), LLL_DELTA)
    G = np.array(lattice.gram_fractions(), dtype=object)
    U = np.array(reduced_U, dtype=object)
    Gr = (U.dot(G).dot(U.T)).astype(float)
    n = lattice.rank
    R = np.linalg.cholesky(Gr).T
    q = np.diag(R) ** 2
    mu = [[R[i, j] / R[i, i] for j in range(n)] for i in range(n)]

    limit = float(max_norm) * (1 + 1e-9) + 1e-12
    scaled_bound = max_norm * s
    counts: Counter = Counter()
    found: List[Tuple[Tuple[int, ...], int]] = []
    x = [0] * n
    nodes = 0

    def descend(i: int, remaining: float):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise EnumerationBudgetExceeded(f"Theta enumeration exceeded {budget} nodes at norm {max_norm}")
        c = -sum(mu[i][j] * x[j] for j in range(i + 1, n))
        r = math.sqrt(max(remaining, 0.0) / q[i])
        for xi in range(math.ceil(c - r), math.floor(c + r) + 1):
            left = remaining - q[i] * (xi - c) ** 2
            if left < 0:
                continue
            x[i] = xi
            if i == 0:
                exact = s * (limit - left)
                m = round(exact)
                if abs(exact - m) > 1e-6 * max(1.0, exact):
                    raise IsodrumError(f"Norm {exact / s} is not a multiple of 1/{s}")
                if m <= scaled_bound:
                    counts[m] += 1
                    if collect:
                        original = tuple(int(v) for v in np.array(x, dtype=object).dot(U))
                        found.append((original, m))
            else:
                descend(i - 1, left)
        x[i] = 0

    descend(n - 1, limit)
    coeffs = ThetaCoeffs(s, max_norm, dict(sorted(counts.items())), nodes)
    logger.info(
        "Lattice %s: %d vectors of norm <= %s (%d nodes)", lattice.name or "?", sum(counts.values()), max_norm, nodes
    )
    return (coeffs, found) if collect else coeffs


def theta(lattice: Lattice, max_norm) -> ThetaCoeffs:
    return short_vectors(lattice, max_norm)


def milnor_ball_check(L1: Lattice, L2: Lattice, radius) -> bool:
    """Every ball of radius <= ``radius`` around the origin holds the same number of points of both lattices."""
    if L1.rank != L2.rank:
        raise DimensionMismatch(f"Lattices of rank {L1.rank} and {L2.rank}")
    bound = _fraction(sympy.nsimplify(radius) ** 2)
    return theta(L1, bound).by_norm() == theta(L2, bound).by_norm()


def extend_lattice(lattice: Lattice, epsilon) -> Lattice:
    """Orthogonal sum with a line of length ``epsilon``."""
    epsilon = sympy.nsimplify(epsilon)
    if epsilon <= 0:
        raise IsodrumError(f"Invalid extension length {epsilon}: must be positive")
    if _fraction(epsilon**2) >= lattice.minimum():
        raise ExtensionTooLarge(f"epsilon^2 = {epsilon**2} is not below the minimum {lattice.minimum()}")
    name = f"{lattice.name}+eps" if lattice.name else ""
    return Lattice(sympy.diag(lattice.basis, sympy.Matrix([[epsilon]])), name)


def conway_sloane(a: int, b: int, c: int, d: int) -> Tuple[Lattice, Lattice]:
    """The lattices L+(a,b,c,d) and L-(a,b,c,d) in an orthogonal frame with squared lengths (a,b,c,d)/12."""
    params = (a, b, c, d)
    if any(int(p) != p or p <= 0 for p in params):
        raise IsodrumError(f"Invalid parameters {params}: must be positive integers")
    frame = sympy.diag(*[sympy.sqrt(sympy.Rational(p, 12)) for p in params])
    pair = []
    for sign in (1, -1):
        vectors = [
            [3 * sign, -1, -1, -1],
            [1, 3 * sign, 1, -1],
            [1, -1, 3 * sign, 1],
            [1, 1, -1, 3 * sign],
        ]
        label = "+" if sign > 0 else "-"
        pair.append(Lattice(frame * sympy.Matrix(vectors).T, f"CS{label}({a},{b},{c},{d})"))
    return pair[0], pair[1]


def integer_lattice(n: int) -> Lattice:
    return Lattice(sympy.eye(n), f"Z{n}")


def hexagonal() -> Lattice:
    return Lattice(sympy.Matrix([[1, sympy.Rational(1, 2)], [0, sympy.sqrt(3) / 2]]), "A2")


def d_plus(n: int) -> Lattice:
    """D_n with the glue vector (1/2, ..., 1/2); even unimodular for n divisible by 8."""
    if n < 8 or n % 8:
        raise IsodrumError(f"Invalid rank {n} for D_n^+: must be a positive multiple of 8")
    columns = [[sympy.Rational(1, 2)] * n]
    for i in range(1, n - 1):
        v = [0] * n
        v[i], v[i + 1] = 1, -1
        columns.append(v)
    v = [0] * n
    v[n - 2], v[n - 1] = 1, 1
    columns.append(v)
    return Lattice(sympy.Matrix(columns).T, "E8" if n == 8 else f"D{n}+")


def e8() -> Lattice:
    return d_plus(8)


def e8_e8() -> Lattice:
    return e8().direct_sum(e8())


def d16_plus() -> Lattice:
    return d_plus(16)


def standard_lattice(name: str) -> Lattice:
    """Lattices by name: ``Z<n>``, ``A2``, ``E8``, ``E8+E8``, ``D16+``, ``CS+:a,b,c,d`` and ``CS-:a,b,c,d``."""
    key = name.strip()
    if key.startswith(("CS+:", "CS-:")):
        params = tuple(int(p) for p in key[4:].split(","))
        if len(params) != 4:
            raise IsodrumError(f"Invalid Conway-Sloane parameters in {name!r}")
        plus, minus = conway_sloane(*params)
        return plus if key[2] == "+" else minus
    if key.startswith("Z") and key[1:].isdigit():
        return integer_lattice(int(key[1:]))
    table = {"A2": hexagonal, "E8": e8, "E8+E8": e8_e8, "D16+": d16_plus}
    if key not in table:
        raise IsodrumError(f"Unknown lattice {name!r}")
    return table[key]()


def lattice_from_rows(rank: int, scale: int, rows: Iterable[Iterable[int]], name: str = "") -> Lattice:
    """Lattice file contents: generator rows of integers divided by ``scale``."""
    rows = [list(r) for r in rows]
    if len(rows) != rank or any(len(r) != rank for r in rows):
        raise DimensionMismatch(f"Expected {rank} rows of {rank} integers")
    return Lattice(sympy.Matrix(rows).T / scale, name)


def jacobi_check(lattice: Lattice, tau: float, truncation: int = 20) -> float:
    """``|LHS - RHS|`` of the theta inversion identity relating eigenvalues and closed geodesics."""
    if tau <= 0:
        raise IsodrumError(f"Invalid tau {tau}: must be positive")
    Q = np.array(lattice.gram.tolist(), dtype=float)
    Qinv = np.linalg.inv(Q)
    n = lattice.rank
    axis = np.arange(-truncation, truncation + 1)
    points = np.array(np.meshgrid(*([axis] * n), indexing="ij")).reshape(n, -1)
    lhs = np.exp(-4 * math.pi**2 * tau * np.einsum("ik,ij,jk->k", points, Qinv, points)).sum()
    volume = math.sqrt(np.linalg.det(Q))
    rhs = volume / (4 * math.pi * tau) ** (n / 2) * np.exp(-np.einsum("ik,ij,jk->k", points, Q, points) / (4 * tau)).sum()
    return float(abs(lhs - rhs))


def _configuration(lattice: Lattice, shells: int, max_vectors: int) -> Optional[Counter]:
    """Inner products among the vectors of the first ``shells`` shells, or None past ``max_vectors``."""
    bound = lattice.minimum()
    coeffs = theta(lattice, bound)
    while len(coeffs.counts) - 1 < shells:
        bound *= 2
        coeffs = theta(lattice, bound)
    norms = [n for n in coeffs.by_norm() if n > 0][:shells]
    if sum(coeffs.truncated(norms[-1]).values()) > max_vectors:
        return None
    _, vectors = short_vectors(lattice, norms[-1], collect=True)
    G = np.array(lattice.gram_fractions(), dtype=object)
    nonzero = [(np.array(u, dtype=object), m) for u, m in vectors if m]
    config: Counter = Counter()
    for (u, a), (v, b) in itertools.combinations(nonzero, 2):
        config[(min(a, b), max(a, b), abs(u.dot(G).dot(v)))] += 1
    return config


def nonisometry_witness(L1: Lattice, L2: Lattice, max_norm=None, shells: int = 2, max_vectors: int = 2000) -> str:
    """``"nonisometric"`` when an isometry invariant separates the lattices, otherwise ``"undecided"``.

    Invariants are tried in order: rank and determinant, the theta series up to
    ``max_norm`` and the inner products among vectors of the first ``shells`` shells.
    """
    if L1.rank != L2.rank or L1.determinant != L2.determinant:
        return "nonisometric"
    if max_norm is not None and theta(L1, max_norm).by_norm() != theta(L2, max_norm).by_norm():
        return "nonisometric"
    first = _configuration(L1, shells, max_vectors)
    second = _configuration(L2, shells, max_vectors)
    if first is not None and second is not None and first != second:
        return "nonisometric"
    return "undecided"
