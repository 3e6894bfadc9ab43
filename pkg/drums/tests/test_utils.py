from fractions import Fraction

from django.test import SimpleTestCase

from drums.exceptions import IsodrumError
from drums.utils import parse_base, parse_fraction, parse_space, render_table


class ParserTests(SimpleTestCase):
    def test_space(self):
        self.assertEqual(parse_space("2,4"), (2, 4))
        self.assertEqual(parse_space("1,3"), (1, 3))
        for text in ("0,2", "2", "a,b"):
            with self.subTest(text=text), self.assertRaises(IsodrumError):
                parse_space(text)

    def test_fraction(self):
        self.assertEqual(parse_fraction(" 5/12 "), Fraction(5, 12))
        with self.assertRaises(IsodrumError):
            parse_fraction("1/0")

    def test_base(self):
        self.assertEqual(parse_base("half-square:2").name, "half-square:2")
        self.assertEqual(parse_base("angles:1/2,1/4,1/4").angles, (Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)))
        with self.assertRaises(IsodrumError):
            parse_base("hexagon:1")


class TableTests(SimpleTestCase):
    def test_columns_align(self):
        lines = render_table(["stage", "status"], [("weyl", "PASS")]).splitlines()
        self.assertEqual(lines, ["stage  status", "-----  ------", "weyl   PASS"])
