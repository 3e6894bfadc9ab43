from ...projgeom import build_pg, search_isospectral_data
from ...permcat import format_catalog
from ...utils import parse_space
from ..base import DrumsCommand


class Command(DrumsCommand):
    help = "Search a projective space for pairs of involution graphs giving transplantable domains"

    def add_arguments(self, parser):
        parser.add_argument("--space", required=True, help="n,q for PG(n, q)")
        parser.add_argument("--r", type=int, default=3, help="number of involutions per tuple")
        parser.add_argument("--cycle-rank", type=int, default=0, help="largest cycle rank allowed")
        parser.add_argument("--out", help="catalog file; stdout when omitted")

    def run(self, space, r, cycle_rank, out=None, **options):
        n, q = parse_space(space)
        pairs = search_isospectral_data(build_pg(n, q), r, cycle_rank)
        self.stderr.write(f"{len(pairs)} pairs in PG({n},{q})")
        if pairs:
            self.emit(format_catalog(pairs), out)
