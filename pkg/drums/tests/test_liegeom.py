import sympy
from django.test import SimpleTestCase

from drums.exceptions import IsodrumError
from drums.liegeom import (
    closed_form_spectrum,
    gp_spectrum,
    intersection_array,
    numeric_spectrum,
    spectrum_determines_order,
    thick_grid,
)


class IntersectionArrayTests(SimpleTestCase):
    def test_quadrangle(self):
        self.assertEqual(intersection_array(4, 2, 2), ([0, 1, 3], [6, 4, 0], [0, 1, 3]))

    def test_projective_plane(self):
        self.assertEqual(intersection_array(3, 2, 2), ([0, 5], [6, 0], [0, 1]))

    def test_invalid_orders(self):
        for gon, s, t in ((5, 2, 2), (4, 1, 2), (3, 2, 3)):
            with self.subTest(gon=gon, s=s, t=t), self.assertRaises(IsodrumError):
                intersection_array(gon, s, t)


class SpectrumTests(SimpleTestCase):
    def test_quadrangle(self):
        self.assertEqual(gp_spectrum(4, 2, 2), [-3, 1, 6])

    def test_projective_plane(self):
        self.assertEqual(gp_spectrum(3, 3, 3), [-1, 12])

    def test_hexagon(self):
        s, t = 2, 2
        self.assertEqual(
            closed_form_spectrum(6, s, t), frozenset({-3, 6, 1 - sympy.Integer(2), 1 + sympy.Integer(2)})
        )
        self.assertEqual(gp_spectrum(6, 3, 3), [-4, -1, 5, 12])

    def test_octagon(self):
        spectrum = gp_spectrum(8, 2, 4)
        self.assertEqual(spectrum, [-5, -3, 1, 5, 10])
        self.assertEqual(len(numeric_spectrum(8, 2, 4)), 5)

    def test_orders_are_determined(self):
        for gon in (3, 4, 6, 8):
            with self.subTest(gon=gon):
                self.assertTrue(spectrum_determines_order(gon, thick_grid(gon, 12)))

    def test_grid(self):
        self.assertEqual(thick_grid(3, 4), [(2, 2), (3, 3), (4, 4)])
        self.assertEqual(len(thick_grid(4, 4)), 9)
