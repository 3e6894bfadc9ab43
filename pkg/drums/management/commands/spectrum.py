import logging

from ...billiards import unfold
from ...modematch import eigenvalues_mm
from ...numspec import GridDomain, fd_spectrum, nodal_count, richardson
from ...permcat import get_pair
from ...utils import parse_base, write_field_csv, write_pgm, write_spectrum_csv
from ..base import DrumsCommand

logger = logging.getLogger(__name__)

MEMBERS = {"points": 0, "hyperplanes": 1}


class Command(DrumsCommand):
    help = "Eigenvalues by finite differences (fd) or by mode matching on the seven-tile half-square pair (mm)"

    def add_arguments(self, parser):
        parser.add_argument("method", choices=["fd", "mm"])
        parser.add_argument("--count", type=int, default=10)
        parser.add_argument("--out", help="spectrum CSV; stdout when omitted")
        fd = parser.add_argument_group("fd")
        fd.add_argument("--pair", default="7_3")
        fd.add_argument("--member", choices=sorted(MEMBERS), default="points")
        fd.add_argument("--base", default="half-square")
        fd.add_argument("--n-grid", type=int, default=80)
        fd.add_argument("--richardson", action="store_true", help="extrapolate from n and 2n")
        fd.add_argument("--mode", type=int, default=1, help="eigenvector written by --field/--pgm")
        fd.add_argument("--field", help="eigenvector CSV grid")
        fd.add_argument("--pgm", help="eigenvector PGM image")
        mm = parser.add_argument_group("mm")
        mm.add_argument("--N", type=int, default=16, dest="N")
        mm.add_argument("--emax", type=float, default=12.0, help="scan limit in units of pi^2/d^2")
        mm.add_argument("--which", choices=["first", "second"], default="first")

    def run(self, method, **options):
        if options["count"] < 1:
            self.usage_error("--count must be positive")
        if method == "mm":
            result = eigenvalues_mm(options["N"], options["count"], options["emax"], which=options["which"])
            flagged = [i + 1 for i, tri in enumerate(result.triangular) if tri]
            logger.info("Triangular states at modes %s", flagged)
            self.emit(self.render(write_spectrum_csv, result.spectrum.normalized()), options["out"])
            return

        spec = get_pair(options["pair"])
        if spec.corrupt:
            self.usage_error(f"Pair {spec.name} is flagged corrupt-source")
        tile = parse_base(options["base"])
        graph = spec.graphs()[MEMBERS[options["member"]]]
        domain = unfold(tile, graph)
        grid = GridDomain.from_domain(domain, options["n_grid"])
        spectrum = fd_spectrum(grid, options["count"])
        values = spectrum.normalized()
        if options["richardson"]:
            fine = fd_spectrum(GridDomain.from_domain(domain, 2 * options["n_grid"]), options["count"])
            values = richardson(values, fine.normalized())
        self.emit(self.render(write_spectrum_csv, values), options["out"])

        mode = options["mode"]
        if options["field"] or options["pgm"]:
            if not 1 <= mode <= options["count"]:
                self.usage_error(f"--mode must lie in 1..{options['count']}")
            vector = spectrum.vectors[:, mode - 1]
            image = grid.to_image(vector)
            logger.info("Mode %d has %d nodal domains", mode, nodal_count(vector, grid))
            if options["field"]:
                self.emit(self.render(write_field_csv, image), options["field"])
            if options["pgm"]:
                self.emit(self.render(write_pgm, image), options["pgm"])
