from itertools import zip_longest

from ...numspec import mixed_bc_invariants, mixed_bc_pair_spectra, mixed_bc_square, mixed_bc_triangle
from ...utils import parse_fraction, render_table
from ..base import DrumsCommand


class Command(DrumsCommand):
    help = "Closed-form spectra and heat invariants of the mixed Dirichlet-Neumann square/triangle pair"

    def add_arguments(self, parser):
        parser.add_argument("--cutoff", required=True, help="eigenvalue bound in units of pi^2/d^2")

    def run(self, cutoff, **options):
        square, triangle = mixed_bc_pair_spectra(parse_fraction(cutoff))
        rows = [
            (i, "" if a is None else a, "" if b is None else b)
            for i, (a, b) in enumerate(zip_longest(square, triangle), start=1)
        ]
        self.stdout.write(render_table(["mode", "square", "triangle"], rows), ending="")
        for name, (vertices, labels) in (("square", mixed_bc_square()), ("triangle", mixed_bc_triangle())):
            inv = mixed_bc_invariants(vertices, labels)
            self.stdout.write(
                f"{name}: area={inv.area:.12g} L_D-L_N={inv.length_difference:.12g} corner={inv.corner:.3e}"
            )
        if square != triangle:
            self.stdout.write("RESULT: FAIL")
            self.fail("Spectra differ")
        self.stdout.write("RESULT: PASS")
