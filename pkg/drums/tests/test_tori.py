import os
from fractions import Fraction
from unittest import skipUnless

import sympy
from django.test import SimpleTestCase

from drums.exceptions import ExtensionTooLarge, IsodrumError
from drums.tori import (
    Lattice,
    conway_sloane,
    d16_plus,
    e8,
    e8_e8,
    extend_lattice,
    hexagonal,
    integer_lattice,
    jacobi_check,
    milnor_ball_check,
    nonisometry_witness,
    standard_lattice,
    theta,
)

CS_COUNTS = {
    0: 1, 12: 2, 16: 2, 20: 4, 26: 2, 30: 4, 32: 4, 34: 2, 36: 2, 38: 2,
    40: 4, 44: 4, 46: 4, 48: 8, 50: 2, 52: 2, 54: 6, 58: 2, 60: 8,
}


class LatticeTests(SimpleTestCase):
    def test_square_lattice_counts(self):
        coeffs = theta(integer_lattice(2), 5)
        self.assertEqual([coeffs[m] for m in range(6)], [1, 4, 4, 0, 4, 8])
        self.assertEqual(coeffs.scale, 1)

    def test_scaled_lattice(self):
        coeffs = theta(integer_lattice(2).scaled(2), 4)
        self.assertEqual(coeffs.by_norm(), {Fraction(0): 1, Fraction(4): 4})

    def test_hexagonal(self):
        lattice = hexagonal()
        self.assertEqual(lattice.gram, sympy.Matrix([[1, sympy.Rational(1, 2)], [sympy.Rational(1, 2), 1]]))
        self.assertEqual(theta(lattice, 1)[1], 6)
        self.assertFalse(milnor_ball_check(lattice, integer_lattice(2), 1))
        self.assertTrue(milnor_ball_check(lattice, lattice, 2))

    def test_dual_of_dual(self):
        lattice = Lattice(sympy.Matrix([[2, 1], [0, 3]]))
        self.assertEqual(lattice.dual().dual().basis, lattice.basis)
        self.assertEqual(lattice.dual().determinant, sympy.Rational(1, 36))

    def test_lll(self):
        lattice = Lattice(sympy.Matrix([[1, 5], [0, 1]]))
        self.assertEqual(lattice.lll().gram, sympy.eye(2))

    def test_from_gram(self):
        gram = sympy.Matrix([[2, 1], [1, 2]])
        self.assertEqual(Lattice.from_gram(gram).gram, gram)

    def test_dependent_basis(self):
        with self.assertRaises(IsodrumError):
            Lattice(sympy.Matrix([[1, 2], [2, 4]]))

    def test_extension(self):
        extended = extend_lattice(integer_lattice(1), sympy.Rational(1, 2))
        self.assertEqual(extended.rank, 2)
        self.assertEqual(extended.minimum(), Fraction(1, 4))
        with self.assertRaises(IsodrumError):
            extend_lattice(integer_lattice(1), 0)
        with self.assertRaises(ExtensionTooLarge):
            extend_lattice(integer_lattice(1), 1)

    def test_standard_names(self):
        self.assertEqual(standard_lattice("Z3").rank, 3)
        self.assertEqual(standard_lattice("CS-:1,1,1,1").name, "CS-(1,1,1,1)")
        with self.assertRaises(IsodrumError):
            standard_lattice("Q7")


class IsospectralTorusTests(SimpleTestCase):
    def test_conway_sloane_theta_series(self):
        plus, minus = conway_sloane(7, 13, 19, 49)
        a, b = theta(plus, 60), theta(minus, 60)
        self.assertEqual(a.scale, 1)
        self.assertEqual(a.counts, CS_COUNTS)
        self.assertEqual(b.counts, CS_COUNTS)
        self.assertEqual(nonisometry_witness(plus, minus), "nonisometric")

    def test_conway_sloane_degenerate_case(self):
        plus, minus = conway_sloane(1, 1, 1, 1)
        self.assertEqual(plus.gram, sympy.eye(4))
        self.assertEqual(minus.gram, sympy.eye(4))

    def test_invalid_parameters(self):
        with self.assertRaises(IsodrumError):
            conway_sloane(1, 2, 3, 0)

    def test_even_unimodular_rank_sixteen(self):
        self.assertEqual(theta(e8(), 2)[2], 240)
        a, b = e8_e8(), d16_plus()
        self.assertEqual(a.determinant, 1)
        self.assertEqual(b.determinant, 1)
        self.assertEqual(theta(a, 2).counts, {0: 1, 2: 480})
        self.assertEqual(theta(b, 2).counts, {0: 1, 2: 480})

    def test_rank_sixteen_second_shell(self):
        expected = {0: 1, 2: 480, 4: 61920}
        self.assertEqual(theta(e8_e8(), 4).counts, expected)
        self.assertEqual(theta(d16_plus(), 4).counts, expected)

    @skipUnless(os.environ.get("ISODRUM_SLOW_TESTS"), "enumerates about a million vectors per lattice")
    def test_rank_sixteen_third_shell(self):
        expected = {0: 1, 2: 480, 4: 61920, 6: 1050240}
        self.assertEqual(theta(e8_e8(), 6).counts, expected)
        self.assertEqual(theta(d16_plus(), 6).counts, expected)

    def test_witness(self):
        self.assertEqual(nonisometry_witness(integer_lattice(2), integer_lattice(2)), "undecided")
        self.assertEqual(nonisometry_witness(integer_lattice(2), hexagonal()), "nonisometric")


class JacobiTests(SimpleTestCase):
    def test_square_lattice(self):
        self.assertLess(jacobi_check(integer_lattice(2), 0.7), 1e-10)

    def test_skew_lattice(self):
        lattice = Lattice.from_gram([[2, 1], [1, 2]])
        self.assertLess(jacobi_check(lattice, 0.5), 1e-10)

    def test_invalid_tau(self):
        with self.assertRaises(IsodrumError):
            jacobi_check(integer_lattice(2), 0)
