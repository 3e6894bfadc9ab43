from ...permcat import get_pair
from ...services import verify_pair
from ...utils import parse_base
from ..base import DrumsCommand


class Command(DrumsCommand):
    help = "Run the transplantation and isospectrality checks on a catalog pair"

    def add_arguments(self, parser):
        parser.add_argument("--pair", required=True)
        parser.add_argument("--base", default="auto")
        parser.add_argument("--max-len", type=int, default=8)

    def run(self, pair, base, max_len, **options):
        spec = get_pair(pair)
        tile = None if base == "auto" else parse_base(base)
        report = verify_pair(spec, tile, max_len)
        self.stdout.write(report.render(), ending="")
        if not report.passed:
            self.fail(f"Pair {spec.name} failed verification")
