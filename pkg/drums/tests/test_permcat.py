import numpy as np
from django.test import SimpleTestCase

from drums.exceptions import CycleParseError, UnknownPairError
from drums.permcat import (
    CORRUPT,
    ColoredGraph,
    PairSpec,
    Permutation,
    catalog,
    colored_isomorphic,
    format_catalog,
    get_pair,
    gluing_isospectral,
    graph_isospectral,
    involution_from_cycles,
    parse_catalog,
)

FLAGGED = {"13_4", "13_5", "13_9", "15_4"}


class PermutationTests(SimpleTestCase):
    def test_parse_transpositions(self):
        p = involution_from_cycles("(2 5)(4 6)", 7)
        self.assertEqual(p.images, (0, 1, 5, 3, 6, 2, 4))
        self.assertTrue(p.is_involution())
        self.assertEqual(p.fixed_points(), (0, 1, 3))
        self.assertEqual(str(p), "(2 5)(4 6)")

    def test_empty_text_is_identity(self):
        self.assertTrue(involution_from_cycles("", 4).is_identity())

    def test_parse_errors(self):
        for text in ("(0 1 2)", "(0 9)", "(0 1)(1 2)", "(a b)", "0 1"):
            with self.subTest(text=text), self.assertRaises(CycleParseError):
                involution_from_cycles(text, 7)

    def test_composition_order(self):
        p = Permutation((1, 2, 0))
        q = Permutation.from_transpositions(3, [(0, 1)])
        self.assertEqual((p * q).images, (p(q(0)), p(q(1)), p(q(2))))
        self.assertTrue((p * p.inverse()).is_identity())

    def test_matrix_convention(self):
        p = involution_from_cycles("(0 2)", 3)
        self.assertTrue((p.matrix() == np.array([[0, 0, 1], [0, 1, 0], [1, 0, 0]])).all())


class CatalogTests(SimpleTestCase):
    def test_seventeen_pairs(self):
        pairs = catalog()
        self.assertEqual(len(pairs), 17)
        self.assertEqual(list(pairs)[:3], ["7_1", "7_2", "7_3"])

    def test_flagged_records(self):
        pairs = catalog()
        flagged = {name for name, spec in pairs.items() if spec.corrupt}
        self.assertEqual(flagged, FLAGGED)
        self.assertIn("duplicate-of:13_4", pairs["13_5"].flags)

    def test_good_pairs_are_connected_with_expected_moves(self):
        for name, spec in catalog().items():
            if name in FLAGGED:
                continue
            with self.subTest(pair=name):
                g1, g2 = spec.graphs()
                self.assertTrue(g1.connected() and g2.connected())
                self.assertEqual(g1.cycle_rank(), g2.cycle_rank())
                self.assertEqual(g1.cycle_rank(), 1 if name == "21_1" else 0)

    def test_unknown_pair(self):
        with self.assertRaises(UnknownPairError):
            get_pair("8_1")

    def test_format_parse_round_trip(self):
        pair = get_pair("7_3")
        (again,) = parse_catalog(format_catalog([pair]))
        self.assertEqual(again.cycles, pair.cycles)
        self.assertEqual(again.gens_points, pair.gens_points)

    def test_perturbed_pair_is_flagged_but_usable(self):
        pair = get_pair("7_3")
        cycles = list(pair.cycles)
        cycles[4] = "(0 6)(1 5)"
        spec = PairSpec.from_cycles("7_3x", pair.group_label, 7, cycles)
        self.assertIn(CORRUPT, spec.flags)
        self.assertIsNotNone(spec.gens_points)


class GraphTests(SimpleTestCase):
    def test_seven_tile_pair(self):
        g1, g2 = get_pair("7_3").graphs()
        self.assertEqual(g1.edge_count, 6)
        self.assertTrue(graph_isospectral(g1, g2))
        self.assertFalse(colored_isomorphic(g1, g2))
        self.assertTrue(colored_isomorphic(g1, g1))

    def test_good_pairs_have_cospectral_gluing_sums(self):
        for name, spec in catalog().items():
            if name in FLAGGED:
                continue
            with self.subTest(pair=name):
                self.assertTrue(gluing_isospectral(*spec.adjacency()))

    def test_plain_graph_spectra(self):
        witnesses = {"13_8": (10, {4284, 4274}), "15_3": (12, {30038, 30002}), "21_1": (10, {12432, 12422})}
        for name, spec in catalog().items():
            if name in FLAGGED:
                continue
            with self.subTest(pair=name):
                result = graph_isospectral(*spec.graphs())
                if name in witnesses:
                    length, traces = witnesses[name]
                    self.assertFalse(result)
                    self.assertEqual(result.first_difference[0], length)
                    self.assertEqual(set(result.first_difference[1:]), traces)
                else:
                    self.assertTrue(result)
                    self.assertIsNone(result.first_difference)

    def test_path_and_star_traces_differ(self):
        path = ColoredGraph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
        star = ColoredGraph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
        result = graph_isospectral(path, star)
        self.assertFalse(result)
        self.assertEqual(result.traces[3], (4, 14, 18))

    def test_color_relabeling(self):
        a = ColoredGraph.from_edges(3, [(0, 1, 1), (1, 2, 2)])
        b = ColoredGraph.from_edges(3, [(0, 1, 2), (1, 2, 1)])
        self.assertTrue(colored_isomorphic(a, b))
        c = ColoredGraph.from_edges(3, [(0, 1, 3), (1, 2, 2)])
        self.assertFalse(colored_isomorphic(a, c))
        self.assertTrue(colored_isomorphic(a, c, permute_colors=True))
