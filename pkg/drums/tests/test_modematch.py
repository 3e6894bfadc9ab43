import math

import numpy as np
from django.test import SimpleTestCase

from drums.exceptions import IsodrumError, PoleProximityError, SpectrumTooShort
from drums.modematch import (
    assemble,
    eigenvalues_mm,
    extrapolate,
    match_roots,
    triangular_energies,
)

PI2 = math.pi**2
REFERENCE = [1.028535, 1.481467, 2.097467, 2.649547, 2.937434]


class AssembleTests(SimpleTestCase):
    def test_shape(self):
        self.assertEqual(assemble(2.4 * PI2, 1).matrix.shape, (4, 4))
        self.assertEqual(assemble(2.4 * PI2, 5, "second").matrix.shape, (20, 20))

    def test_members_related_by_orthogonal_transplant(self):
        first = assemble(2.4 * PI2, 3, "first")
        second = assemble(2.4 * PI2, 3, "second")
        T = first.transplant_matrix
        np.testing.assert_allclose(T.T @ T, np.eye(12), atol=1e-14)
        scale = np.abs(first.matrix).max()
        np.testing.assert_allclose(first.matrix, T.T @ second.matrix @ T, atol=1e-12 * scale)

    def test_evanescent_modes_are_finite(self):
        mm = assemble(0.5 * PI2, 4)
        self.assertTrue(np.isfinite(mm.matrix).all())
        self.assertTrue(np.isfinite(mm.regularized_logdet()[1]))

    def test_pole_rejected(self):
        with self.assertRaises(PoleProximityError):
            assemble(2 * PI2, 4)

    def test_invalid_member(self):
        with self.assertRaises(IsodrumError):
            assemble(2.4 * PI2, 4, "third")


class SpectrumTests(SimpleTestCase):
    def test_lowest_eigenvalues(self):
        result = eigenvalues_mm(16, 5, 3.2)
        np.testing.assert_allclose(result.spectrum.normalized(), REFERENCE, rtol=1e-3)
        self.assertEqual(result.triangular, (False,) * 5)

    def test_members_share_roots(self):
        first = match_roots(8, 3.2 * PI2, "first")
        second = match_roots(8, 3.2 * PI2, "second")
        self.assertEqual(len(first), 5)
        np.testing.assert_allclose(first, second, rtol=1e-8)

    def test_triangular_state_is_ninth(self):
        result = eigenvalues_mm(8, 9, 5.2)
        self.assertAlmostEqual(result.spectrum.normalized()[8], 5.0, places=12)
        self.assertEqual(result.triangular, (False,) * 8 + (True,))

    def test_too_short(self):
        with self.assertRaises(SpectrumTooShort):
            eigenvalues_mm(4, 5, 1.2)

    def test_triangular_energies(self):
        found = [mn for _, mn in triangular_energies(13.5 * PI2)]
        self.assertEqual(found, [(2, 1), (3, 1), (3, 2)])

    def test_extrapolate(self):
        np.testing.assert_allclose(extrapolate([1.0, 3.0], [0.9, 2.8]), [0.8, 2.6])
        self.assertEqual(extrapolate([], [1.5]), [1.5])
