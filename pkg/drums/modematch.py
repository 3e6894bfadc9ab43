"""Mode-matching eigenvalues of the seven half-square pair.

The field in each strip is expanded in N sine modes; matching across the
internal edges gives a 4N x 4N matrix ``M(E)`` (first member) or ``M'(E)``
(second member) whose determinant vanishes at eigenvalues. The V = 0 family,
the closed-form triangular states, is added analytically.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from django.conf import settings

from .exceptions import IsodrumError, PoleProximityError, SpectrumTooShort
from .numspec import Spectrum

logger = logging.getLogger(__name__)

WHICH = ("first", "second")


def _poles(E_max: float, d: float) -> np.ndarray:
    """Energies ``pi^2 (m^2 + n^2)/d^2`` with ``m >= 0, n >= 1`` up to ``E_max``: poles of W and zeros of b_n."""
    top = int(math.sqrt(E_max) * d / math.pi) + 2
    values = {(m * m + n * n) for m in range(top + 1) for n in range(1, top + 1)}
    return np.array(sorted(values), dtype=float) * (math.pi / d) ** 2


@dataclass(frozen=True, eq=False)
class MatchMatrix:
    E: float
    N: int
    d: float
    which: str
    matrix: np.ndarray
    scaling: np.ndarray

    @property
    def transplant_matrix(self) -> np.ndarray:
        """The orthogonal T with ``M = T^t M' T``."""
        N = self.N
        I = np.eye(N)
        P = np.diag([(-1.0) ** n for n in range(1, N + 1)])
        Z = np.zeros((N, N))
        return np.block([[Z, I, Z, P], [I, Z, P, Z], [Z, -I, Z, P], [-I, Z, P, Z]]) / math.sqrt(2)

    def transplant(self, coefficients: np.ndarray) -> np.ndarray:
        """Map matching coefficients of the first member to the second: ``T V``."""
        return self.transplant_matrix @ np.asarray(coefficients)

    def regularized_logdet(self) -> Tuple[float, float]:
        """Sign and log-magnitude of ``det(M S)`` with the sine poles of U and V removed."""
        return np.linalg.slogdet(self.matrix * self.scaling[None, :])


def assemble(E: float, N: int, which: str = "first", d: float = 1.0, check_poles: bool = True) -> MatchMatrix:
    """Matching matrix at energy E with N modes per edge."""
    if which not in WHICH:
        raise IsodrumError(f"Invalid member {which!r}: expected one of {WHICH}")
    if N < 1:
        raise IsodrumError(f"Invalid truncation {N}")
    if check_poles:
        poles = _poles(E, d)
        near = np.abs(poles - E) <= settings.ISODRUM_POLE_EXCLUSION * poles
        if near.any():
            raise PoleProximityError(f"E={E!r} lies within the exclusion radius of pole {poles[near][0]!r}")

    n = np.arange(1, N + 1)
    a = n * math.pi / d
    x = E - a**2
    U = np.empty(N)
    V = np.empty(N)
    s = np.empty(N)
    real = x > 0
    b = np.sqrt(np.abs(x))
    bd = b * d
    U[real] = b[real] / np.tan(bd[real])
    V[real] = b[real] / np.sin(bd[real])
    s[real] = np.sin(bd[real]) / bd[real]
    imag = ~real
    U[imag] = b[imag] / np.tanh(bd[imag])
    V[imag] = b[imag] / np.sinh(bd[imag])
    s[imag] = np.sinh(bd[imag]) / bd[imag]

    W = np.outer(a, a) / (d * (E - a[:, None] ** 2 - a[None, :] ** 2))
    p = (-1.0) ** n
    PWP = p[:, None] * W * p[None, :]
    Ud, Vd = np.diag(U), np.diag(V)
    PV = np.diag(p * V)
    Z = np.zeros((N, N))

    if which == "first":
        blocks = [
            [Ud - 2 * W, PWP - PV / 2, Z, Z],
            [PWP - PV / 2, Ud - W, -Vd / 2, Z],
            [Z, -Vd / 2, Ud, W],
            [Z, Z, W, Ud - PWP],
        ]
    else:
        blocks = [
            [Ud - W, PWP - PV / 2, Z, Z],
            [PWP - PV / 2, Ud - W, PV / 2, W],
            [Z, PV / 2, Ud - W, PWP],
            [Z, W, PWP, Ud - W],
        ]
    return MatchMatrix(E, N, d, which, np.block(blocks), np.tile(s, 4))


def _sign(E: float, N: int, which: str, d: float) -> float:
    sign, _ = assemble(E, N, which, d, check_poles=False).regularized_logdet()
    return float(sign)


def match_roots(N: int, E_max: float, which: str = "first", d: float = 1.0) -> List[float]:
    """Roots of the regularized determinant below ``E_max`` (1/length^2) at one truncation.

    k = sqrt(E) is scanned in steps of pi/(40 d); sign changes are bisected and
    brackets that collapse onto a pole are dropped.
    """
    exclusion = settings.ISODRUM_POLE_EXCLUSION
    rtol = settings.ISODRUM_BISECT_RTOL
    poles = _poles(E_max, d)

    def near_pole(E):
        return bool((np.abs(poles - E) <= exclusion * poles).any())

    step = math.pi / (40 * d)
    k_max = math.sqrt(E_max)
    roots = []
    # no eigenvalue lies below 0.9 pi^2/d^2
    k_prev = math.sqrt(0.9) * math.pi / d
    s_prev = _sign(k_prev**2, N, which, d)
    k = k_prev + step
    while k <= k_max:
        if near_pole(k * k):
            k += step
            continue
        s = _sign(k * k, N, which, d)
        if s != s_prev and s != 0 and s_prev != 0:
            lo, hi, s_lo = k_prev, k, s_prev
            collapsed = False
            while hi - lo > rtol * hi:
                mid = 0.5 * (lo + hi)
                if near_pole(mid * mid):
                    collapsed = True
                    break
                s_mid = _sign(mid * mid, N, which, d)
                if s_mid == s_lo:
                    lo = mid
                else:
                    hi = mid
            root = (0.5 * (lo + hi)) ** 2
            if not collapsed and not near_pole(root):
                roots.append(root)
        k_prev, s_prev = k, s
        k += step
    logger.info("N=%d (%s): %d roots below E=%.6g", N, which, len(roots), E_max)
    return roots


def triangular_energies(E_max: float, d: float = 1.0) -> List[Tuple[float, Tuple[int, int]]]:
    top = int(math.sqrt(E_max) * d / math.pi) + 1
    found = []
    for m in range(2, top + 1):
        for n in range(1, m):
            E = (math.pi / d) ** 2 * (m * m + n * n)
            if E <= E_max:
                found.append((E, (m, n)))
    return sorted(found)


@dataclass(frozen=True, eq=False)
class MatchSpectrum:
    spectrum: Spectrum
    triangular: Tuple[bool, ...]
    raw: Tuple[Tuple[float, ...], Tuple[float, ...]]


def extrapolate(coarse: Sequence[float], fine: Sequence[float]) -> List[float]:
    """Linear-in-1/N extrapolation ``2 E(2N) - E(N)``, pairing each fine root with the nearest coarse one."""
    if not coarse:
        return list(fine)
    coarse = np.asarray(coarse)
    return [2 * E - float(coarse[np.argmin(np.abs(coarse - E))]) for E in fine]


def eigenvalues_mm(
    N: int, count: int, E_max: float, d: float = 1.0, which: str = "first"
) -> MatchSpectrum:
    """The lowest ``count`` eigenvalues, ``E_max`` given in units of pi^2/d^2."""
    if count < 1:
        raise IsodrumError(f"Invalid eigenvalue count {count}")
    E_cap = E_max * (math.pi / d) ** 2
    coarse = match_roots(N, E_cap, which, d)
    fine = match_roots(2 * N, E_cap, which, d)
    values = [(E, False) for E in extrapolate(coarse, fine)]
    values += [(E, True) for E, _ in triangular_energies(E_cap, d)]
    values.sort()
    if len(values) < count:
        raise SpectrumTooShort(f"Only {len(values)} eigenvalues below {E_max} pi^2/d^2, {count} requested")
    values = values[:count]
    spectrum = Spectrum(np.array([E for E, _ in values]), d)
    return MatchSpectrum(spectrum, tuple(flag for _, flag in values), (tuple(coarse), tuple(fine)))
