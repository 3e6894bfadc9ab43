from ...tori import nonisometry_witness, theta
from ...utils import load_lattice, parse_fraction, render_table
from ..base import DrumsCommand


class Command(DrumsCommand):
    help = "Theta-series coefficients of a lattice, optionally against a second one"

    def add_arguments(self, parser):
        parser.add_argument("--lattice", required=True, help="Z<n>, A2, E8, E8+E8, D16+, CS+:a,b,c,d, CS-:a,b,c,d or a lattice file")
        parser.add_argument("--max-norm", required=True, help="rational norm bound")
        parser.add_argument("--against", help="second lattice for the ball-count comparison")

    def run(self, lattice, max_norm, against=None, **options):
        bound = parse_fraction(max_norm)
        first = load_lattice(lattice)
        coeffs = theta(first, bound)
        if not against:
            rows = [(norm, count) for norm, count in coeffs.shells()]
            self.stdout.write(f"lattice {lattice}  rank {first.rank}  scale {coeffs.scale}")
            self.stdout.write(render_table(["norm", "vectors"], rows), ending="")
            return
        second = load_lattice(against)
        other = theta(second, bound)
        a, b = coeffs.by_norm(), other.by_norm()
        rows = [(norm, a.get(norm, 0), b.get(norm, 0)) for norm in sorted(set(a) | set(b))]
        self.stdout.write(render_table(["norm", lattice, against], rows), ending="")
        equal = a == b
        self.stdout.write(f"ball counts {'agree' if equal else 'differ'} up to norm {bound}")
        if not equal:
            self.fail("Theta series differ")
        self.stdout.write(f"isometry: {nonisometry_witness(first, second)}")
