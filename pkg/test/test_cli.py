import io
import json
import math
import os
import tempfile
import unittest
from contextlib import redirect_stdout, redirect_stderr
from gaussduet import cli


def run(*argv):
    stdout, stderr = io.StringIO(), io.StringIO()
    with redirect_stdout(stdout), redirect_stderr(stderr):
        code = cli.main(list(argv))
    return code, stdout.getvalue(), stderr.getvalue()


class MomentsCommandTests(unittest.TestCase):

    def test_vacuum(self):
        code, out, _ = run("moments", "--kind", "linear", "--g", "0", "--kappa", "1", "--na", "0", "--ma", "0",
                           "--nb", "0", "--mb", "0", "--steady", "--format", "json")
        self.assertEqual(code, 0)
        report = json.loads(out)
        self.assertTrue(report["steady"])
        self.assertEqual(report["analytic"]["moments"]["pop_a"], 0.0)
        self.assertLess(report["max_deviation"], 1e-12)
        self.assertIsNone(report["analytic"]["degrees"]["eta_ab"])

    def test_above_threshold(self):
        code, out, err = run("moments", "--kind", "nonlinear", "--g", "1", "--kappa", "1", "--steady")
        self.assertEqual(code, 3)
        self.assertEqual(out, "")
        self.assertIn("gaussduet:", err)

    def test_quarter_turn(self):
        code, out, _ = run("moments", "--kind", "linear", "--g", "1", "--kappa", "1", "--na", "0.5",
                           "--ma", "0.8660254", "--phi", "1.5707963", "--steady", "--format", "json")
        self.assertEqual(code, 0)
        report = json.loads(out)
        for path in ("analytic", "oracle"):
            self.assertAlmostEqual(report[path]["moments"]["pop_a"], 0.375, places=10)
            self.assertAlmostEqual(report[path]["moments"]["pop_b"], 0.125, places=10)
        self.assertAlmostEqual(report["psi"], 0.7853981633974483, places=12)

    def test_negative_phase(self):
        base = ("moments", "--g", "1", "--na", "0.5", "--ma", "0.8660254", "--steady", "--format", "json")
        code, out, _ = run(*base, "--phi", "-pi/2")
        self.assertEqual(code, 0)
        negative = json.loads(out)
        self.assertAlmostEqual(negative["config"]["phi"], 1.5 * math.pi, places=12)
        code, out, _ = run(*base, "--phi=3*pi/2")
        self.assertEqual(code, 0)
        positive = json.loads(out)
        for name in ("pop_a", "pop_b"):
            self.assertAlmostEqual(positive["analytic"]["moments"][name], negative["analytic"]["moments"][name],
                                   places=12)

    def test_join_negative_values(self):
        self.assertEqual(cli.join_negative_values(["--phi", "-pi/2", "--steady"]), ["--phi=-pi/2", "--steady"])
        self.assertEqual(cli.join_negative_values(["--t", "-1"]), ["--t=-1"])
        self.assertEqual(cli.join_negative_values(["--phi", "--steady"]), ["--phi", "--steady"])
        self.assertEqual(cli.join_negative_values(["--phi"]), ["--phi"])

    def test_angle_contradicts_kind(self):
        for argv in (("--kind", "nonlinear", "--set", "psi=0.5"), ("--kind", "linear", "--set", "chi=0.5")):
            code, out, err = run("moments", *argv, "--na", "0.5", "--steady", "--format", "json")
            self.assertEqual(code, 2)
            self.assertEqual(out, "")
            self.assertIn("coupling angle", err)
        code, out, _ = run("moments", "--set", "chi=0.5", "--na", "0.5", "--steady", "--format", "json")
        self.assertEqual(code, 0)
        self.assertEqual(json.loads(out)["kind"], "nonlinear")

    def test_text_report(self):
        code, out, _ = run("moments", "--scenario", "squeezedPlusVacuum", "--n", "0.5", "--g", "1", "--t", "1")
        self.assertEqual(code, 0)
        self.assertTrue(out.startswith("linear coupling, t=1.0"))
        self.assertIn("max deviation:", out)
        self.assertIn("quantum-squeezed", out)
        self.assertIn("entangled (eta_ab > 1):", out)

    def test_validation_error(self):
        code, _, err = run("moments", "--na", "0.5", "--ma", "0.9")
        self.assertEqual(code, 2)
        self.assertIn("sqrt", err)
        code, _, _ = run("moments", "--kind", "quadratic")
        self.assertEqual(code, 2)

    def test_config_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "system.json")
            with open(path, "w") as fp:
                json.dump({"kind": "linear", "g": 1.0, "na": 0.5, "ma": 0.8660254, "phi": "pi/2",
                           "steady": True, "format": "json"}, fp)
            code, out, _ = run("moments", "--config", path)
            self.assertEqual(code, 0)
            self.assertAlmostEqual(json.loads(out)["analytic"]["moments"]["pop_a"], 0.375, places=10)
            code, out, _ = run("moments", "--config", path, "--g", "0")
            self.assertAlmostEqual(json.loads(out)["analytic"]["moments"]["pop_a"], 0.5, places=12)

            with open(path, "w") as fp:
                json.dump({"colour": "blue"}, fp)
            code, _, err = run("moments", "--config", path)
            self.assertEqual(code, 2)
            self.assertIn("colour", err)


class SweepCommandTests(unittest.TestCase):

    def test_visibility_csv(self):
        code, out, _ = run("sweep", "--scenario", "squeezedPlusVacuum", "--n", "0.5", "--phi", "0",
                           "--axis", "psi:0:pi/2:3", "--quantities", "visibility")
        self.assertEqual(code, 0)
        lines = out.splitlines()
        self.assertEqual(lines[0], "psi [rad],visibility [1],oracle_maxdev [1]")
        self.assertEqual(len(lines), 4)
        self.assertTrue(lines[1].startswith("0.0,0.0,"))
        self.assertTrue(lines[3].endswith(","))

    def test_deterministic(self):
        argv = ("sweep", "--scenario", "equalSqueezed", "--n", "0.3", "--axis", "psi:0:1:3", "--axis", "phi:0:pi:2",
                "--format", "json")
        first, second = run(*argv), run(*argv)
        self.assertEqual(first, second)
        self.assertEqual(len(json.loads(first[1])), 6)

    def test_degenerate_axis(self):
        code, _, _ = run("sweep", "--scenario", "squeezedPlusVacuum", "--n", "0.5", "--axis", "psi:0:1:1")
        self.assertEqual(code, 2)

    def test_output_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "sweep.csv")
            code, out, _ = run("sweep", "--kind", "nonlinear", "--scenario", "squeezedPlusThermal", "--n", "0.5",
                               "--axis", "chi:0:1:4", "--out", path)
            self.assertEqual(code, 0)
            self.assertEqual(out, "")
            with open(path) as fp:
                self.assertEqual(len(fp.read().splitlines()), 5)


class OtherCommandTests(unittest.TestCase):

    def test_figure(self):
        with tempfile.TemporaryDirectory() as tmp:
            code, out, _ = run("figure", "fig2a", "--points", "5", "--out", tmp)
            self.assertEqual(code, 0)
            self.assertEqual(sorted(os.listdir(tmp)), ["fig2a.csv", "fig2a.meta.json"])
            self.assertEqual(len(out.splitlines()), 2)
            code, _, _ = run("figure", "fig99", "--out", tmp)
            self.assertEqual(code, 2)

    def test_verify(self):
        code, _, _ = run("verify", "--count", "0")
        self.assertEqual(code, 2)
        code, out, _ = run("verify", "--count", "2", "--seed", "7")
        self.assertEqual(code, 0)
        self.assertTrue(out.startswith("seed=7 count=2"))
        self.assertNotIn("FAILED", out)

    def test_relations(self):
        code, out, _ = run("relations", "--na", "0.5", "--set", "psi=pi/3")
        self.assertEqual(code, 0)
        lines = out.splitlines()
        self.assertEqual(len(lines), 3)
        self.assertTrue(lines[0].startswith("relation [1],mode [1],path [1],angle [rad],lhs [1]"))
        self.assertTrue(lines[1].startswith("onePhoton,a,analytic,"))

    def test_usage(self):
        code, _, _ = run()
        self.assertEqual(code, 2)
        code, _, _ = run("moments", "--t", "1", "--steady")
        self.assertEqual(code, 2)


if __name__ == '__main__':
    unittest.main()
