from ...utils import compare_spectra, read_spectrum_csv, render_table
from ..base import DrumsCommand


class Command(DrumsCommand):
    help = "Compare two spectrum CSV files mode by mode"

    def add_arguments(self, parser):
        parser.add_argument("first")
        parser.add_argument("second")
        parser.add_argument("--rel-tol", type=float, default=1e-3)

    def run(self, first, second, rel_tol, **options):
        with open(first, encoding="utf-8") as fh:
            a = read_spectrum_csv(fh)
        with open(second, encoding="utf-8") as fh:
            b = read_spectrum_csv(fh)
        rows = compare_spectra(a, b, rel_tol)
        table = [(i, f"{x:.9f}", f"{y:.9f}", f"{gap:.3e}", "ok" if gap <= rel_tol else "DIFF") for i, x, y, gap in rows]
        self.stdout.write(render_table(["mode", "first", "second", "rel gap", ""], table), ending="")
        bad = [i for i, _, _, gap in rows if gap > rel_tol]
        if bad:
            self.stdout.write("RESULT: FAIL")
            self.fail(f"{len(bad)} modes differ by more than {rel_tol:g}")
        self.stdout.write("RESULT: PASS")
