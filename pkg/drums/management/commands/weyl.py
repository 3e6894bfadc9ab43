from ...billiards import translation_surface_genus, unfold, weyl_data
from ...exceptions import IsodrumError
from ...permcat import get_pair
from ...services import default_base
from ...utils import parse_base, render_table
from ..base import DrumsCommand


class Command(DrumsCommand):
    help = "Area, perimeter and corner constant of both members of a pair"

    def add_arguments(self, parser):
        parser.add_argument("--pair", required=True)
        parser.add_argument("--base", default="auto")

    def run(self, pair, base, **options):
        spec = get_pair(pair)
        tile = default_base(spec) if base == "auto" else parse_base(base)
        rows = []
        data = []
        for name, graph in zip(("points", "hyperplanes"), spec.graphs()):
            w = weyl_data(unfold(tile, graph))
            data.append(w)
            rows.append((name, f"{w.area:.12g}", f"{w.perimeter:.12g}", w.K, " ".join(str(a) for a in w.angles)))
        self.stdout.write(f"pair {spec.name}  base {tile.name}")
        self.stdout.write(render_table(["member", "area", "perimeter", "K", "corner angles / pi"], rows), ending="")
        if tile.angles is not None:
            try:
                self.stdout.write(f"translation surface genus of the base tile: {translation_surface_genus(tile.angles)}")
            except IsodrumError as exc:
                self.stdout.write(f"translation surface genus unavailable: {exc}")
        first, second = data
        same = all(abs(x - y) <= 1e-12 * max(1.0, abs(x)) for x, y in zip(first.triple(), second.triple()))
        if not same:
            self.fail("Weyl data differ")
