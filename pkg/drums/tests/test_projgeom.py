import os
from unittest import skipUnless

import numpy as np
from django.test import SimpleTestCase

from drums.exceptions import CongruentDomains, PrimePowerError
from drums.permcat import COLORS, ColoredGraph, catalog, colored_isomorphic, get_pair
from drums.projgeom import (
    FiniteField,
    build_pg,
    closes_on_common_tile,
    collineation_group,
    commutant,
    constraint_table,
    dual_commutes,
    enumerate_involutions,
    group_order,
    incidence_matrix,
    is_incidence_of,
    search_isospectral_data,
    solve_transplantation,
    word_products_identity,
)


class FiniteFieldTests(SimpleTestCase):
    def test_gf4_tables(self):
        f = FiniteField(4)
        self.assertEqual(f.mul[2, 2], 3)
        self.assertEqual(f.mul[2, 3], 1)
        self.assertEqual(f.inv[2], 3)
        self.assertEqual(f.add[2, 3], 1)
        self.assertEqual(f.frob[2], 3)

    def test_prime_field(self):
        f = FiniteField(5)
        self.assertEqual(f.mul[2, 3], 1)
        self.assertEqual(f.neg[2], 3)

    def test_not_prime_power(self):
        with self.assertRaises(PrimePowerError):
            FiniteField(6)


class ProjectiveSpaceTests(SimpleTestCase):
    def test_fano_plane(self):
        space = build_pg(2, 2)
        self.assertEqual(space.size, 7)
        T = incidence_matrix(space)
        self.assertEqual((T.k, T.lam), (3, 1))
        self.assertTrue(T.satisfies_design())
        self.assertTrue(T.verify_inverse())

    def test_group_orders(self):
        self.assertEqual(group_order(build_pg(2, 2)), 168)
        self.assertEqual(group_order(build_pg(2, 3)), 5616)
        self.assertEqual(group_order(build_pg(2, 4)), 120960)

    def test_fano_involutions_are_elations(self):
        space = build_pg(2, 2)
        group = collineation_group(space)
        self.assertEqual(group.order, 168)
        involutions = enumerate_involutions(space, group)
        self.assertEqual(len(involutions), 21)
        self.assertEqual({c.kind for c in involutions}, {"elation"})
        self.assertTrue(all(c.fixed == 3 for c in involutions))
        self.assertTrue(all(dual_commutes(space, c) for c in involutions))

    def test_constraint_table(self):
        found = {(s.case, s.r, s.q) for s in constraint_table(max_r=12, max_q=64)}
        self.assertEqual(
            found, {("even-nonsquare", 3, 2), ("odd-nonsquare", 3, 3), ("square-cycle", 3, 4)}
        )


class TransplantationTests(SimpleTestCase):
    def test_seven_tile_transplantation(self):
        M, N = get_pair("7_3").adjacency()
        self.assertEqual(commutant(M, N).dim, 2)
        T = solve_transplantation(M, N)
        self.assertEqual((T.k, T.lam), (3, 1))
        self.assertTrue(T.satisfies_design())
        self.assertTrue(is_incidence_of(build_pg(2, 2), T.T))
        for mu in COLORS:
            self.assertTrue((T.T @ M[mu] == N[mu] @ T.T).all())
        self.assertTrue(word_products_identity(T, M, N, max_len=4))

    def test_dirichlet_transplantation(self):
        M, N = get_pair("7_3").adjacency()
        T = solve_transplantation(M, N, dirichlet=True)
        self.assertTrue((T.T < 0).any())
        self.assertEqual(np.linalg.matrix_rank(T.T.astype(float)), 7)
        for mu in COLORS:
            self.assertTrue((T.T @ M.signed(mu) == N.signed(mu) @ T.T).all())

    def test_every_good_pair_is_transplantable(self):
        for name, spec in catalog().items():
            if spec.corrupt:
                continue
            with self.subTest(pair=name):
                T = solve_transplantation(*spec.adjacency())
                self.assertTrue(T.satisfies_design())

    def test_congruent_members(self):
        M, _ = get_pair("7_3").adjacency()
        with self.assertRaises(CongruentDomains):
            solve_transplantation(M, M)


def matches_catalog_pair(found, pair):
    a, b = found.graphs()
    c, d = pair.graphs()
    return any(
        colored_isomorphic(x, y, permute_colors=True) and colored_isomorphic(u, v, permute_colors=True)
        for (x, u), (y, v) in [((a, b), (c, d)), ((a, b), (d, c))]
    )


class SearchTests(SimpleTestCase):
    def assertSearchFinds(self, n, q, count, cycle_rank=0):
        pairs = search_isospectral_data(build_pg(n, q), 3, cycle_rank)
        self.assertEqual(len(pairs), count)
        for pair in pairs:
            g1, g2 = pair.graphs()
            self.assertTrue(g1.connected() and g2.connected())
            self.assertFalse(colored_isomorphic(g1, g2))
            self.assertTrue(solve_transplantation(*pair.adjacency()).satisfies_design())
        return pairs

    def test_fano_plane(self):
        pairs = self.assertSearchFinds(2, 2, 3)
        for name in ("7_1", "7_2", "7_3"):
            with self.subTest(pair=name):
                self.assertTrue(any(matches_catalog_pair(p, get_pair(name)) for p in pairs))

    def test_order_three_plane(self):
        self.assertSearchFinds(2, 3, 9)

    def test_three_space(self):
        space = build_pg(3, 2)
        group = collineation_group(space)
        self.assertEqual(len(enumerate_involutions(space, group)), 315)
        self.assertEqual(len(enumerate_involutions(space, group, include_identity=True)), 316)
        self.assertSearchFinds(3, 2, 4)

    def test_cycle_rank_one_on_fano_plane(self):
        self.assertSearchFinds(2, 2, 3, cycle_rank=1)

    @skipUnless(os.environ.get("ISODRUM_SLOW_TESTS"), "searches PGammaL(3,4); set ISODRUM_SLOW_TESTS=1")
    def test_order_four_plane(self):
        (pair,) = self.assertSearchFinds(2, 4, 1, cycle_rank=1)
        self.assertEqual([g.cycle_rank() for g in pair.graphs()], [1, 1])
        self.assertTrue(matches_catalog_pair(pair, get_pair("21_1")))

    def test_common_tile(self):
        self.assertTrue(closes_on_common_tile(get_pair("21_1").graphs()))
        self.assertTrue(closes_on_common_tile(get_pair("7_3").graphs()))
        square = ColoredGraph.from_edges(4, [(0, 1, 1), (1, 2, 2), (2, 3, 1), (3, 0, 2)])
        hexagon = ColoredGraph.from_edges(6, [(i, (i + 1) % 6, 1 + i % 2) for i in range(6)])
        triangle = ColoredGraph.from_edges(3, [(0, 1, 1), (1, 2, 2), (2, 0, 3)])
        self.assertTrue(closes_on_common_tile((square, square)))
        self.assertFalse(closes_on_common_tile((square, hexagon)))
        self.assertFalse(closes_on_common_tile((triangle, triangle)))
        doubled = ColoredGraph.from_edges(2, [(0, 1, 1), (0, 1, 2)])
        self.assertFalse(closes_on_common_tile((doubled, doubled)))
