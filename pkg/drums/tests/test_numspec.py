import math
from fractions import Fraction

import numpy as np
from django.test import SimpleTestCase

from drums.billiards import BaseTile, WeylData, unfold
from drums.exceptions import IsodrumError, SpectrumTooShort
from drums.numspec import (
    GridDomain,
    fd_spectrum,
    mixed_bc_invariants,
    mixed_bc_pair_spectra,
    mixed_bc_square,
    mixed_bc_triangle,
    neumann_triangular_state,
    nodal_count,
    richardson,
    transplant_eigenvector,
    triangular_state,
    weyl_remainder,
)
from drums.permcat import ColoredGraph, get_pair
from drums.projgeom import solve_transplantation


def single_tile(tile):
    return unfold(tile, ColoredGraph.from_edges(1, []))


def discrete(m, n, h):
    return 4 / h**2 * (math.sin(m * math.pi * h / 2) ** 2 + math.sin(n * math.pi * h / 2) ** 2)


class GridTests(SimpleTestCase):
    def test_unit_square(self):
        grid = GridDomain.from_domain(single_tile(BaseTile.rectangle(1, 1)), 16)
        self.assertEqual(grid.size, 15 * 15)
        spectrum = fd_spectrum(grid, 3)
        h = 1 / 16
        expected = [discrete(1, 1, h), discrete(2, 1, h), discrete(2, 1, h)]
        np.testing.assert_allclose(spectrum.values, expected, rtol=1e-9)
        self.assertEqual(nodal_count(spectrum.vectors[:, 0], grid), 1)

    def test_half_square_ground_state(self):
        grid = GridDomain.from_domain(single_tile(BaseTile.half_square()), 20)
        spectrum = fd_spectrum(grid, 1)
        self.assertAlmostEqual(spectrum.values[0] / discrete(2, 1, 1 / 20), 1.0, places=9)
        self.assertAlmostEqual(spectrum.normalized()[0], 5.0, delta=0.05)

    def test_triangular_state_residual(self):
        grid = GridDomain.from_domain(single_tile(BaseTile.half_square()), 40)
        state = triangular_state(2, 1, grid)
        self.assertEqual(state.label, 9)
        self.assertAlmostEqual(state.eigenvalue, 5 * math.pi**2)
        self.assertLess(state.residual / state.eigenvalue, 1e-2)
        with self.assertRaises(IsodrumError):
            triangular_state(1, 1, grid)

    def test_too_many_eigenvalues(self):
        grid = GridDomain.from_domain(single_tile(BaseTile.rectangle(1, 1)), 4)
        with self.assertRaises(SpectrumTooShort):
            fd_spectrum(grid, 9)

    def test_richardson(self):
        np.testing.assert_allclose(richardson([1.0, 2.0, 3.0], [2.0, 3.0]), [7 / 3, 10 / 3])

    def test_neumann_triangular_state(self):
        grid = GridDomain.from_domain(single_tile(BaseTile.rectangle(1, 1)), 8)
        state = neumann_triangular_state(0, 1, grid)
        self.assertEqual(state.label, 5)
        self.assertAlmostEqual(state.eigenvalue, math.pi**2)
        x, y = grid.coordinates().T
        np.testing.assert_allclose(state.values, np.cos(math.pi * x) + np.cos(math.pi * y), atol=1e-12)
        for m, n in [(1, 0), (0, 0)]:
            with self.assertRaises(IsodrumError):
                neumann_triangular_state(m, n, grid)

    def test_weyl_remainder(self):
        weyl = WeylData(1.0, 4.0, Fraction(1, 4), (Fraction(1, 2),) * 4, (1, 1, 1, 1))
        remainder = weyl_remainder([2 * math.pi**2], weyl)
        expected = 1 - math.pi / 2 + math.sqrt(2) - 0.25
        self.assertAlmostEqual(remainder[0], expected, places=12)


class PairSpectrumTests(SimpleTestCase):
    def setUp(self):
        g1, g2 = get_pair("7_3").graphs()
        tile = BaseTile.half_square()
        self.grid_a = GridDomain.from_domain(unfold(tile, g1), 8)
        self.grid_b = GridDomain.from_domain(unfold(tile, g2), 8)

    def test_discrete_isospectrality(self):
        a = fd_spectrum(self.grid_a, 5)
        b = fd_spectrum(self.grid_b, 5)
        np.testing.assert_allclose(a.values, b.values, rtol=1e-8)

    def test_transplanted_eigenvector(self):
        M, N = get_pair("7_3").adjacency()
        T = solve_transplantation(M, N, dirichlet=True)
        a = fd_spectrum(self.grid_a, 2)
        b = fd_spectrum(self.grid_b, 2)
        result = transplant_eigenvector(T.T, a.vectors[:, 0], self.grid_a, self.grid_b, a.values[0], b)
        self.assertLess(result.residual, 1e-6 * a.values[0])
        self.assertAlmostEqual(result.overlap, 1.0, places=6)


# Finite-difference column of the published seven-tile table, in units of pi^2/d^2.
FD_COLUMN = [1.028936, 1.481865, 2.098249, 2.649715, 2.938176, 3.732689, 4.295193, 4.677665, 5.000002, 5.291475]


class SevenTileTableTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        g1, g2 = get_pair("7_3").graphs()
        tile = BaseTile.half_square()
        cls.domains = (unfold(tile, g1), unfold(tile, g2))
        cls.coarse = [fd_spectrum(GridDomain.from_domain(d, 80), 10) for d in cls.domains]

    def test_members_agree(self):
        np.testing.assert_allclose(self.coarse[0].normalized(), self.coarse[1].normalized(), rtol=5e-3)

    def test_ninth_mode_is_triangular(self):
        self.assertAlmostEqual(self.coarse[0].normalized()[8], 5.0, delta=0.025)

    def test_richardson_matches_table(self):
        fine = fd_spectrum(GridDomain.from_domain(self.domains[0], 160), 10)
        extrapolated = richardson(self.coarse[0].normalized(), fine.normalized())
        np.testing.assert_allclose(extrapolated, FD_COLUMN, rtol=1e-2)


class RectangleTransplantTests(SimpleTestCase):
    def test_ground_state(self):
        pair = get_pair("7_3")
        g1, g2 = pair.graphs()
        tile = BaseTile.rectangle(2, 1)
        grid_a = GridDomain.from_domain(unfold(tile, g1), 80)
        grid_b = GridDomain.from_domain(unfold(tile, g2), 80)
        T = solve_transplantation(*pair.adjacency(), dirichlet=True)
        a = fd_spectrum(grid_a, 2)
        b = fd_spectrum(grid_b, 2)
        result = transplant_eigenvector(T.T, a.vectors[:, 0], grid_a, grid_b, a.values[0], b)
        self.assertLess(result.residual / a.values[0], 5e-3)
        self.assertGreater(result.overlap, 0.999)


class MixedBoundaryTests(SimpleTestCase):
    def test_closed_form_spectra_agree(self):
        square, triangle = mixed_bc_pair_spectra(100)
        self.assertGreaterEqual(len(square), 50)
        self.assertEqual(square, triangle)
        self.assertEqual(square[0], Fraction(5, 4))

    def test_empty_below_ground_state(self):
        self.assertEqual(mixed_bc_pair_spectra(1), ([], []))

    def test_invariants_agree(self):
        a = mixed_bc_invariants(*mixed_bc_square(1.0))
        b = mixed_bc_invariants(*mixed_bc_triangle(1.0))
        self.assertAlmostEqual(a.area, 1.0)
        self.assertAlmostEqual(b.area, 1.0)
        self.assertAlmostEqual(a.length_difference, 2.0)
        self.assertAlmostEqual(b.length_difference, 2.0)
        self.assertAlmostEqual(a.corner, 0.0, places=9)
        self.assertAlmostEqual(b.corner, 0.0, places=9)

    def test_invalid_labels(self):
        with self.assertRaises(IsodrumError):
            mixed_bc_invariants([(0, 0), (1, 0), (0, 1)], ["D", "N"])
