import math
import unittest
import numpy as np
from hypothesis import given, settings, strategies as st
from gaussduet import presets
from gaussduet.model import Kind, CouplingConfig, SystemConfig
from gaussduet.relations import (MAX_STEP, Relation, Quantity, check_identity, convergence_order, all_identities,
                                 locate_extrema)
from gaussduet.types import ConfigError, StabilityError, GridTooCoarse
from gaussduet.verify import sample_configs
from test import system_configs

PSI_GRID = np.linspace(0.0, math.pi / 2, 201)


def unbalanced(angle=math.pi / 3):
    return presets.custom(na=0.5, coupling=CouplingConfig.from_angle(Kind.LINEAR, angle))


def generic_linear():
    return presets.custom(na=1.0, ma=1.2, nb=0.3, phi=0.4, coupling=CouplingConfig.from_angle(Kind.LINEAR, 0.6))


class IdentityTests(unittest.TestCase):

    def test_one_photon_linear(self):
        expected = 0.25 * math.sin(math.pi / 3) * math.cos(math.pi / 3)
        for mode in ("a", "b"):
            result = check_identity(Kind.LINEAR, Relation.ONE_PHOTON, unbalanced(), mode=mode)
            self.assertAlmostEqual(result.lhs, expected, places=12)
            self.assertAlmostEqual(result.lhs, 0.108253, places=6)
            self.assertLess(result.residual, 1e-6)
            self.assertEqual(result.step, 1e-4)

    def test_uncoupled(self):
        result = check_identity("linear", "onePhoton", unbalanced(0.0))
        self.assertEqual(result.lhs, 0.0)
        self.assertLess(result.rhs, 1e-10)

    def test_two_photon_nonlinear_vacuum(self):
        config = SystemConfig(coupling=CouplingConfig.from_angle(Kind.NONLINEAR, 0.5))
        for mode in ("a", "b"):
            result = check_identity(Kind.NONLINEAR, "twoPhoton", config, mode=mode)
            self.assertAlmostEqual(result.lhs, 0.5 * math.sinh(0.5) * math.cosh(0.5), places=12)
            self.assertAlmostEqual(result.lhs, 0.2938004, places=6)
            self.assertLess(result.residual, 1e-6)

    def test_oracle_path(self):
        config = presets.custom(na=0.5, ma=0.6, nb=0.2, phi=1.1,
                                coupling=CouplingConfig.from_angle(Kind.LINEAR, math.pi / 3))
        for which in Relation:
            analytic = check_identity(Kind.LINEAR, which, config)
            oracle = check_identity(Kind.LINEAR, which, config, path="oracle")
            self.assertAlmostEqual(oracle.lhs, analytic.lhs, delta=1e-9)
            self.assertLess(oracle.residual, 1e-6)
        with self.assertRaises(ConfigError):
            check_identity(Kind.LINEAR, "onePhoton", config, path="symbolic")

    def test_argument_errors(self):
        with self.assertRaises(ConfigError):
            check_identity(Kind.LINEAR, "onePhoton", unbalanced(), h=0.1)
        with self.assertRaises(ConfigError):
            check_identity(Kind.LINEAR, "onePhoton", unbalanced(), h=1e-8)
        with self.assertRaises(ConfigError):
            check_identity(Kind.LINEAR, "threePhoton", unbalanced())
        with self.assertRaises(ConfigError):
            check_identity(Kind.LINEAR, "onePhoton", unbalanced(), mode="c")
        with self.assertRaises(StabilityError):
            check_identity(Kind.NONLINEAR, "twoPhoton", SystemConfig(coupling=CouplingConfig(Kind.NONLINEAR, 1.0, 1.0)))

    def test_convergence_order(self):
        config = generic_linear()
        self.assertGreater(convergence_order(Kind.LINEAR, "twoPhoton", config, h=1e-2), 1.9)
        plain = check_identity(Kind.LINEAR, "twoPhoton", config, h=1e-2)
        extrapolated = check_identity(Kind.LINEAR, "twoPhoton", config, h=1e-2, richardson=True)
        self.assertLess(extrapolated.residual, plain.residual)

    def test_convergence_order_sampled(self):
        for kind, index, config in sample_configs(314, 10):
            for which in Relation:
                order = convergence_order(kind, which, config, h=MAX_STEP)
                self.assertGreaterEqual(order, 1.9, f"{kind.value} #{index} {which.value}: {config.to_dict()}")

    def test_all_identities(self):
        results = all_identities(generic_linear())
        self.assertEqual([r.relation for r in results], [Relation.ONE_PHOTON, Relation.TWO_PHOTON])
        self.assertEqual(results[0].to_dict()["mode"], "a")

    @settings(max_examples=50, deadline=None)
    @given(st.sampled_from((Kind.LINEAR, Kind.NONLINEAR)), st.sampled_from(tuple(Relation)),
           st.sampled_from(("a", "b")), st.data())
    def test_identities_hold(self, kind, which, mode, data):
        config = data.draw(system_configs(kind))
        result = check_identity(kind, which, config, mode=mode)
        self.assertLess(result.residual, 1e-6 * max(1.0, result.lhs))


class ExtremumTests(unittest.TestCase):

    def test_one_photon_peak_meets_inflection(self):
        config = presets.squeezed_plus_vacuum(0.1, phi=math.pi / 2)
        report = locate_extrema(Kind.LINEAR, Quantity.ONE_PHOTON, config, PSI_GRID)
        self.assertEqual(report.argmax_index, 100)
        self.assertAlmostEqual(report.argmax_angle, math.pi / 4, places=12)
        self.assertLessEqual(report.separation, 1.0)
        self.assertAlmostEqual(report.inflection_angle, math.pi / 4, delta=PSI_GRID[1])

    def test_degrees(self):
        for m in (math.sqrt(0.1 * 1.1), 0.1):
            config = presets.equal_squeezed(0.1, m, phi=math.pi / 2)
            report = locate_extrema(Kind.LINEAR, "degrees", config, PSI_GRID)
            self.assertEqual(report.argmax_index, 100)
            self.assertLessEqual(report.separation, 1.0)
            self.assertEqual(report.to_dict()["quantity"], Quantity.DEGREES)

    def test_coarse_grids(self):
        config = presets.squeezed_plus_vacuum(0.1, phi=math.pi / 2)
        with self.assertRaises(GridTooCoarse):
            locate_extrema(Kind.LINEAR, "onePhoton", config, [0.5])
        with self.assertRaises(GridTooCoarse):
            locate_extrema(Kind.LINEAR, "onePhoton", config, np.r_[np.linspace(0.0, 1.0, 100), 0.5])
        with self.assertRaises(GridTooCoarse):
            locate_extrema(Kind.LINEAR, "onePhoton", config, np.linspace(0.0, math.pi / 2, 100))
        with self.assertRaises(GridTooCoarse):
            locate_extrema(Kind.LINEAR, "onePhoton", config, np.linspace(0.0, 0.3, 101))
        report = locate_extrema(Kind.LINEAR, "onePhoton", config, np.linspace(0.0, math.pi / 2, 101))
        self.assertEqual(report.argmax_index, 50)


if __name__ == '__main__':
    unittest.main()
