from ...billiards import domain_to_json, unfold
from ...permcat import get_pair
from ...services import default_base
from ...utils import parse_base
from ..base import DrumsCommand


class Command(DrumsCommand):
    help = "Unfold both members of a pair over a base tile and write the domain file"

    def add_arguments(self, parser):
        parser.add_argument("--pair", required=True)
        parser.add_argument("--base", default="auto", help="half-square[:d], rectangle:w,h, triangle:x1,y1,..., angles:a1,a2,a3, scalene or auto")
        parser.add_argument("--out", help="output file; stdout when omitted")

    def run(self, pair, base, out=None, **options):
        spec = get_pair(pair)
        if spec.corrupt:
            self.usage_error(f"Pair {spec.name} is flagged corrupt-source: {'; '.join(spec.problems)}")
        tile = default_base(spec) if base == "auto" else parse_base(base)
        g1, g2 = spec.graphs()
        domains = {"points": unfold(tile, g1), "hyperplanes": unfold(tile, g2)}
        self.emit(domain_to_json(spec.name, tile.name, domains), out)
