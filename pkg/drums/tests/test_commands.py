import os
import tempfile
from contextlib import redirect_stderr, redirect_stdout
from io import StringIO

from django.core.management import CommandError, call_command
from django.test import SimpleTestCase

from drums.billiards import domain_from_json
from drums.permcat import parse_catalog
from drums.utils import read_spectrum_csv, write_spectrum_csv
from manage import main


def run(*args, **options):
    out, err = StringIO(), StringIO()
    call_command(*args, stdout=out, stderr=err, **options)
    return out.getvalue(), err.getvalue()


class CommandTestCase(SimpleTestCase):
    def assertExitCode(self, code, *args, **options):
        with self.assertRaises(CommandError) as ctx:
            run(*args, **options)
        self.assertEqual(ctx.exception.returncode, code)
        return ctx.exception


class CatalogCommandTests(CommandTestCase):
    def test_list(self):
        out, _ = run("catalog", "list")
        self.assertTrue(out.rstrip().endswith("17 pairs"))
        self.assertIn("duplicate-of:13_4", out)

    def test_show(self):
        out, _ = run("catalog", "show", "7_3")
        self.assertIn("a1 (2 5)(4 6)", out)
        self.assertIn("cycle rank 0/0", out)

    def test_unknown_pair(self):
        self.assertExitCode(2, "catalog", "show", "99_1")

    def test_show_without_name(self):
        self.assertExitCode(2, "catalog", "show")


class VerifyCommandTests(CommandTestCase):
    def test_good_pair(self):
        out, _ = run("verify", pair="7_3")
        self.assertIn("RESULT: PASS", out)

    def test_corrupt_pair(self):
        out = StringIO()
        with self.assertRaises(CommandError) as ctx:
            call_command("verify", pair="15_4", stdout=out)
        self.assertEqual(ctx.exception.returncode, 1)
        self.assertIn("corrupt-source", out.getvalue())

    def test_invalid_base(self):
        self.assertExitCode(2, "verify", pair="7_3", base="hexagon:1")


class BuildCommandTests(CommandTestCase):
    def test_domain_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "7_3.json")
            run("build", pair="7_3", base="half-square", out=path)
            with open(path, encoding="utf-8") as fh:
                data = domain_from_json(fh.read())
        self.assertEqual(set(data["domains"]), {"points", "hyperplanes"})
        self.assertEqual(data["base"], "half-square:1")

    def test_corrupt_pair(self):
        self.assertExitCode(2, "build", pair="13_9")


class SpectrumCommandTests(CommandTestCase):
    def test_fd_csv(self):
        out, _ = run("spectrum", "fd", pair="7_3", n_grid=8, count=3)
        values = read_spectrum_csv(StringIO(out))
        self.assertEqual(len(values), 3)
        self.assertTrue(0.9 < values[0] < 1.1)

    def test_mm_csv(self):
        out, _ = run("spectrum", "mm", N=8, count=2, emax=3.2)
        values = read_spectrum_csv(StringIO(out))
        self.assertAlmostEqual(values[0], 1.028535, delta=2e-3)

    def test_bad_count(self):
        self.assertExitCode(2, "spectrum", "mm", count=0)


class CompareCommandTests(CommandTestCase):
    def write(self, tmp, name, values):
        path = os.path.join(tmp, name)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            write_spectrum_csv(fh, values)
        return path

    def test_equal_and_different(self):
        with tempfile.TemporaryDirectory() as tmp:
            a = self.write(tmp, "a.csv", [1.0285, 1.4815])
            b = self.write(tmp, "b.csv", [1.0286, 1.4814])
            c = self.write(tmp, "c.csv", [1.0285, 1.6])
            d = self.write(tmp, "d.csv", [1.0285])
            out, _ = run("compare", a, b)
            self.assertIn("RESULT: PASS", out)
            self.assertExitCode(1, "compare", a, c)
            self.assertExitCode(2, "compare", a, d)
            self.assertExitCode(2, "compare", a, os.path.join(tmp, "missing.csv"))


class LatticeCommandTests(CommandTestCase):
    def test_theta(self):
        out, _ = run("theta", lattice="Z2", max_norm="5")
        self.assertIn("scale 1", out)

    def test_isospectral_tori(self):
        out, _ = run("theta", lattice="CS+:7,13,19,49", max_norm="60", against="CS-:7,13,19,49")
        self.assertIn("ball counts agree", out)
        self.assertIn("isometry: nonisometric", out)

    def test_different_tori(self):
        self.assertExitCode(1, "theta", lattice="Z2", max_norm="1", against="A2")

    def test_lattice_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "square.txt")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write("# doubled square lattice\n2\n1\n2 0\n0 2\n")
            out, _ = run("theta", lattice=path, max_norm="4")
        self.assertIn("rank 2", out)


class MiscCommandTests(CommandTestCase):
    def test_lengths(self):
        out, _ = run("lengths", pair="7_3", maxlen=5)
        self.assertIn("isolength up to length 5", out)

    def test_weyl(self):
        out, _ = run("weyl", pair="7_3")
        self.assertIn("5/12", out)
        self.assertIn("genus of the base tile: 1", out)

    def test_mixed(self):
        out, _ = run("mixed", cutoff="20")
        self.assertIn("RESULT: PASS", out)

    def test_gp(self):
        out, _ = run("gp", gon=4, s=2, t=2, grid=6)
        self.assertIn("spectrum -3", out)
        self.assertIn("determines order up to 6: yes", out)

    def test_gp_thin_order(self):
        self.assertExitCode(2, "gp", gon=4, s=1, t=2)

    def test_search(self):
        out, err = run("search", space="2,2")
        self.assertIn("PG(2,2)", err)
        pairs = parse_catalog(out)
        self.assertGreaterEqual(len(pairs), 1)
        self.assertFalse(any(p.corrupt for p in pairs))


class ManageMainTests(SimpleTestCase):
    def test_exit_status(self):
        out, err = StringIO(), StringIO()
        with redirect_stdout(out), redirect_stderr(err):
            main(["manage.py", "verify", "--pair", "7_3", "--max-len", "4"])
            with self.assertRaises(SystemExit) as failed:
                main(["manage.py", "verify", "--pair", "15_4"])
            with self.assertRaises(SystemExit) as unknown:
                main(["manage.py", "verify", "--pair", "99_1"])
        self.assertIn("RESULT: PASS", out.getvalue())
        self.assertEqual(failed.exception.code, 1)
        self.assertEqual(unknown.exception.code, 2)
