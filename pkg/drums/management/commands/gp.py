from ...liegeom import GONS, gp_spectrum, intersection_matrix, spectrum_determines_order, thick_grid
from ..base import DrumsCommand


class Command(DrumsCommand):
    help = "Point-graph spectrum of a thick generalized polygon of order (s, t)"

    def add_arguments(self, parser):
        parser.add_argument("--gon", type=int, required=True, choices=GONS)
        parser.add_argument("--s", type=int, required=True)
        parser.add_argument("--t", type=int, required=True)
        parser.add_argument("--grid", type=int, help="also check that spectra separate all orders up to this value")

    def run(self, gon, s, t, grid=None, **options):
        spectrum = gp_spectrum(gon, s, t)
        self.stdout.write(f"intersection matrix {intersection_matrix(gon, s, t).tolist()}")
        self.stdout.write("spectrum " + ", ".join(f"{x} ({float(x):.12g})" for x in spectrum))
        if grid:
            injective = spectrum_determines_order(gon, thick_grid(gon, grid))
            self.stdout.write(f"spectrum determines order up to {grid}: {'yes' if injective else 'no'}")
            if not injective:
                self.fail("Two orders share a spectrum")
