__version__ = "0.1.0"

import gaussduet.core
from gaussduet.types import (GaussDuetError, ConfigError, PhysicalityError, StabilityError, NegativePopulation,
                             UndefinedDegree, ScenarioMismatch, GridTooCoarse, VerificationFailure,
                             MomentSet, VarianceSet, QuadratureCovariance)
from gaussduet.model import Kind, ModeParams, CouplingConfig, SystemConfig, ideal_m
from gaussduet import model
from gaussduet import presets
from gaussduet import oracle
from gaussduet import analytic
from gaussduet import observables
from gaussduet import relations
from gaussduet import sweep
from gaussduet import verify


def settings():
    return dict(gaussduet.core.settings())


def set_settings(threads=None,
                 fd_step=None,
                 grid_points=None,
                 physicality_tolerance=None,
                 population_floor=None):
    """
    Changes the module level settings used by every gaussduet module. Only the values provided are changed.
    :param threads: Worker cap for grid evaluation
    :param fd_step: Default finite difference step in the scaled angle
    :param grid_points: Default number of points per axis of the figure presets
    :param physicality_tolerance: Width of the clamp applied to m ≤ sqrt(n(n+1))
    :param population_floor: Populations below this make the dependent degrees undefined
    :return: None
    """
    gaussduet.core.update_settings(gaussduet.core.copy_non_null_keys(locals()))


def reset_settings():
    """Restores the default settings and re-reads GAUSSDUET_THREADS"""
    gaussduet.core.reset_settings()
