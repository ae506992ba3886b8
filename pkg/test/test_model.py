import math
import unittest
import numpy as np
from hypothesis import given, settings, strategies as st
import gaussduet as gd
from gaussduet.model import (Kind, ModeState, ModeParams, CouplingConfig, SystemConfig, ideal_m, validate,
                             scaled_coupling, derived_params, input_covariance)
from gaussduet.types import ConfigError, PhysicalityError, StabilityError
from gaussduet import presets
from test import system_configs


class ModelTests(unittest.TestCase):

    def test_validate_classification(self):
        report = validate(presets.squeezed_plus_thermal(1.0, 0.0))
        self.assertEqual(report.mode_a, ModeState.THERMAL)
        self.assertEqual(report.mode_b, ModeState.THERMAL)
        report = validate(presets.custom(na=0.5, ma=math.sqrt(0.75)))
        self.assertEqual(report.mode_a, ModeState.QUANTUM_SQUEEZED)
        self.assertEqual(report.mode_b, ModeState.VACUUM)
        self.assertEqual(ModeParams(1.0, 0.5).classify(), ModeState.CLASSICAL_SQUEEZED)
        self.assertEqual(ModeParams(1.0, 1.0).classify(), ModeState.CLASSICAL_SQUEEZED)

    def test_validate_errors(self):
        with self.assertRaises(PhysicalityError):
            validate(presets.custom(na=0.5, ma=0.9))
        with self.assertRaises(ConfigError) as context:
            validate(SystemConfig(coupling=CouplingConfig(Kind.LINEAR, 1.0, 0.0)))
        self.assertNotIsInstance(context.exception, PhysicalityError)
        with self.assertRaises(ConfigError):
            validate(SystemConfig(coupling=CouplingConfig(Kind.LINEAR, -1.0, 1.0)))
        with self.assertRaises(ConfigError):
            validate(presets.custom(na=-0.1))

    def test_clamp(self):
        bound = ideal_m(0.5)
        self.assertEqual(ModeParams(0.5, bound + 5e-13).m, bound)
        self.assertGreater(ModeParams(0.5, bound + 1e-9).m, bound)

    def test_scaled_coupling(self):
        self.assertEqual(scaled_coupling(CouplingConfig(Kind.LINEAR, 0, 1)).angle, 0.0)
        self.assertAlmostEqual(scaled_coupling(CouplingConfig(Kind.LINEAR, 1, 1)).angle, math.pi / 4, places=12)
        self.assertAlmostEqual(scaled_coupling(CouplingConfig(Kind.NONLINEAR, 0.9, 1)).angle, 1.472219, places=6)
        with self.assertRaises(StabilityError):
            scaled_coupling(CouplingConfig(Kind.NONLINEAR, 1, 1))
        with self.assertRaises(ConfigError):
            Kind.parse("quadratic")

    def test_from_angle_round_trip(self):
        for kind, angle in ((Kind.LINEAR, 0.3), (Kind.LINEAR, 1.2), (Kind.NONLINEAR, 0.7)):
            config = presets.equal_squeezed(0.5).with_angle(angle, kind)
            self.assertAlmostEqual(scaled_coupling(config.coupling).angle, angle, places=12)
        self.assertAlmostEqual(CouplingConfig.from_angle("linear", math.pi / 4, kappa=2.0).g, 2.0, places=12)

    def test_phi_reduced(self):
        self.assertAlmostEqual(SystemConfig(phi=7.0).phi, 7.0 - 2 * math.pi, places=12)
        self.assertAlmostEqual(SystemConfig(phi=-1.0).phi, 2 * math.pi - 1.0, places=12)
        self.assertEqual(SystemConfig(phi=2 * math.pi).phi, 0.0)

    def test_derived_params_equal_squeezed(self):
        p = derived_params(presets.equal_squeezed(0.5, phi=0.4))
        self.assertEqual(p.delta_m, 0.0)
        self.assertEqual(p.delta_n, 0.0)
        self.assertAlmostEqual(p.theta, math.pi / 2, places=12)
        self.assertAlmostEqual(p.alpha, 1.0, places=12)

    def test_derived_params_squeezed_vacuum(self):
        config = presets.squeezed_plus_vacuum(0.5, phi=0.7)
        p = derived_params(config)
        self.assertEqual(p.delta_m, 1.0)
        self.assertEqual(p.delta_n, 1.0)
        self.assertAlmostEqual(p.m, config.mode_a.m / 2, places=12)
        self.assertAlmostEqual(p.theta, 0.7, places=12)

    def test_derived_params_unsqueezed(self):
        p = derived_params(presets.custom(na=1.0, nb=1.0))
        self.assertEqual(p.delta_m, 0.0)
        self.assertAlmostEqual(p.theta, math.pi / 2, places=12)
        self.assertTrue(math.isinf(derived_params(presets.squeezed_plus_vacuum(0.5, phi=0.0)).alpha))

    @settings(max_examples=60, deadline=None)
    @given(system_configs(Kind.LINEAR), st.floats(min_value=0.05, max_value=3.0))
    def test_alpha_sin_phi_identity(self, config, phi):
        config = SystemConfig(config.mode_a, config.mode_b, phi, config.coupling)
        p = derived_params(config)
        if p.m > 0:
            self.assertAlmostEqual(p.alpha * abs(math.sin(phi)), p.alpha_sin_phi, places=9)
            self.assertLessEqual(abs(p.delta_m), 1.0)
        if p.n > 0:
            self.assertLessEqual(abs(p.delta_n), 1.0)

    def test_phase_identities_on_grid(self):
        phases = np.linspace(0.01, 2 * math.pi - 0.01, 100)
        for ma, mb in ((1.0, 0.0), (0.0, 1.0), (0.9, 0.3), (0.3, 0.9), (0.6, 0.6)):
            for phi in phases:
                linear = derived_params(presets.custom(na=1.0, ma=ma, nb=1.0, mb=mb, phi=phi))
                expected = math.sqrt(math.sin(phi) ** 2 + linear.delta_m ** 2 * math.cos(phi) ** 2)
                self.assertAlmostEqual(linear.alpha * abs(math.sin(phi)), expected, delta=1e-12)
                self.assertAlmostEqual(linear.alpha_sin_phi, expected, delta=1e-12)
                nonlinear = derived_params(presets.custom(na=1.0, ma=ma, nb=1.0, mb=mb, phi=phi,
                                                          coupling=CouplingConfig(Kind.NONLINEAR, 0.5, 1.0)))
                expected = math.sqrt(math.cos(phi) ** 2 + nonlinear.delta_m ** 2 * math.sin(phi) ** 2)
                self.assertAlmostEqual(nonlinear.beta * abs(math.cos(phi)), expected, delta=1e-12)
                self.assertAlmostEqual(nonlinear.beta_cos_phi, expected, delta=1e-12)

    def test_scaled_coupling_monotone(self):
        for kind, top in ((Kind.LINEAR, 20.0), (Kind.NONLINEAR, 0.99)):
            for kappa in (0.5, 1.0, 2.0):
                angles = [scaled_coupling(CouplingConfig(kind, g, kappa)).angle
                          for g in np.linspace(0.0, top * kappa, 200)]
                self.assertTrue(np.all(np.diff(angles) > 0), f"{kind.value} kappa={kappa}")

    @settings(max_examples=60, deadline=None)
    @given(st.sampled_from((Kind.LINEAR, Kind.NONLINEAR)), st.floats(min_value=0.0, max_value=0.98),
           st.floats(min_value=0.0, max_value=0.98), st.floats(min_value=0.5, max_value=2.0))
    def test_scaled_coupling_order(self, kind, first, second, kappa):
        low, high = sorted((first, second))
        self.assertLessEqual(scaled_coupling(CouplingConfig(kind, low * kappa, kappa)).angle,
                             scaled_coupling(CouplingConfig(kind, high * kappa, kappa)).angle)

    @settings(max_examples=60, deadline=None)
    @given(system_configs(Kind.NONLINEAR), st.floats(min_value=0.05, max_value=1.5))
    def test_nonlinear_theta(self, config, phi):
        config = SystemConfig(config.mode_a, config.mode_b, phi, config.coupling)
        p = derived_params(config)
        if p.m > 0:
            self.assertAlmostEqual(math.tan(p.theta), p.delta_m * math.tan(phi), places=9)

    @settings(max_examples=60, deadline=None)
    @given(system_configs(Kind.LINEAR))
    def test_input_covariance_physical(self, config):
        cov = input_covariance(config)
        self.assertTrue(cov.is_physical())
        self.assertEqual(cov["Xa", "Xa"], cov[0, 0])

    def test_presets_identify(self):
        self.assertEqual(presets.identify(presets.equal_squeezed(0.5)), presets.Scenario.EQUAL_SQUEEZED)
        self.assertEqual(presets.identify(presets.squeezed_plus_vacuum(0.5)), presets.Scenario.SQUEEZED_PLUS_VACUUM)
        self.assertEqual(presets.identify(presets.squeezed_plus_thermal(0.5)),
                         presets.Scenario.SQUEEZED_PLUS_THERMAL)
        self.assertEqual(presets.identify(presets.equal_pop_unequal_squeeze(1.0, 1.0, 0.5)),
                         presets.Scenario.EQUAL_POP_UNEQUAL_SQUEEZE)
        self.assertEqual(presets.identify(presets.custom(1.0, 0.5, 0.3, 0.1)), presets.Scenario.CUSTOM)

    def test_to_dict(self):
        config = presets.squeezed_plus_vacuum(0.5, coupling=CouplingConfig("nonlinear", 0.5, 1.0))
        self.assertEqual(config.to_dict()["kind"], "nonlinear")
        self.assertEqual(config.to_dict()["nb"], 0.0)
        self.assertIsInstance(gd.SystemConfig, type)


if __name__ == '__main__':
    unittest.main()
