from dataclasses import dataclass, asdict, fields
import math
import numpy as np


class GaussDuetError(Exception):
    """
    Base class for every error raised by gaussduet. The *message* is available as a property and the
    *exit_code* class attribute tells the command line front end how to terminate when the error escapes.
    """
    exit_code = 2

    def __init__(self, message, *args):
        super().__init__(message, *args)
        self.__message = message

    @classmethod
    def wrap(cls, error, message=None):
        """
        Wraps an exception raised by a numerical library and truncates the traceback to stop at the last
        *gaussduet* frame. This avoids reviewing the long numpy/scipy stack for a failure that is really
        a property of the inputs.
        """
        tb = error.__traceback__
        found = tb is not None and 'gaussduet' in tb.tb_frame.f_code.co_filename
        while tb is not None and tb.tb_next:
            if 'gaussduet' in tb.tb_next.tb_frame.f_code.co_filename:
                found = True
            elif found:
                tb.tb_next = None
                break
            tb = tb.tb_next
        return cls(message or str(error)).with_traceback(tb)

    @property
    def message(self):
        """
        The human readable description of the failure.
        """
        return self.__message


class ConfigError(GaussDuetError):
    """Raised for invalid rates, negative occupations or malformed sweep specifications"""
    exit_code = 2


class PhysicalityError(ConfigError):
    """Raised when a mode violates m ≤ sqrt(n(n+1)) beyond the clamp tolerance"""
    exit_code = 2


class ScenarioMismatch(ConfigError):
    exit_code = 2


class GridTooCoarse(ConfigError):
    exit_code = 2


class StabilityError(GaussDuetError):
    """Raised when a steady state is requested for a drift that is not Hurwitz (nonlinear g ≥ κ)"""
    exit_code = 3


class NegativePopulation(GaussDuetError):
    exit_code = 1


class UndefinedDegree(GaussDuetError):
    exit_code = 1


class VerificationFailure(GaussDuetError):
    exit_code = 1


# Ordering of the quadratures in every covariance matrix
QUADRATURES = ("Xa", "Ya", "Xb", "Yb")

SYMPLECTIC_FORM = np.kron(np.eye(2), np.array([[0.0, 1.0], [-1.0, 0.0]]))


@dataclass(frozen=True)
class VarianceSet:
    xx_a: float
    yy_a: float
    xy_a: float
    xx_b: float
    yy_b: float
    xy_b: float

    def uncertainty_products(self):
        """
        Returns the per-mode determinants xx·yy − xy², each of which is bounded below by ¼.
        """
        return (self.xx_a * self.yy_a - self.xy_a ** 2,
                self.xx_b * self.yy_b - self.xy_b ** 2)

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class MomentSet:
    """
    Equal-time second moments of the two modes: the populations ⟨a†a⟩ and ⟨b†b⟩, the single-mode
    two-photon correlations ⟨aa⟩ and ⟨bb⟩, and the inter-mode correlations ⟨a†b⟩ and ⟨ab⟩.
    """
    pop_a: float
    pop_b: float
    c_aa: complex
    c_bb: complex
    c_adagb: complex
    c_ab: complex

    def values(self):
        return tuple(getattr(self, f.name) for f in fields(self))

    def max_deviation(self, other, relative=False):
        """
        Largest entrywise difference to another MomentSet. With *relative* set, each difference is divided by
        max(1, |other value|) so large values are compared relatively and small ones absolutely.
        """
        worst = 0.0
        for mine, theirs in zip(self.values(), other.values()):
            diff = abs(complex(mine) - complex(theirs))
            if relative:
                diff /= max(1.0, abs(complex(theirs)))
            worst = max(worst, diff)
        return worst

    def tolerance_ratio(self, other, rtol=1e-8, atol=1e-10):
        """
        Largest entrywise difference to another MomentSet in units of the allowance atol + rtol·|other value|.
        At most 1 exactly when :meth:`isclose` holds.
        """
        worst = 0.0
        for mine, theirs in zip(self.values(), other.values()):
            diff = abs(complex(mine) - complex(theirs))
            if math.isnan(diff):
                return math.inf
            worst = max(worst, diff / (atol + rtol * abs(complex(theirs))))
        return worst

    def isclose(self, other, rtol=1e-8, atol=1e-10):
        return self.tolerance_ratio(other, rtol, atol) <= 1.0

    def violations(self, tolerance=1e-8):
        """
        Lists the type invariants this set breaks: negative populations and single-mode correlations
        larger than sqrt(pop(pop+1)).
        """
        problems = []
        for mode, pop, corr in (("a", self.pop_a, self.c_aa), ("b", self.pop_b, self.c_bb)):
            if pop < -1e-10:
                problems.append(f"pop_{mode}={pop!r} is negative")
            elif abs(corr) > math.sqrt(max(pop, 0.0) * (max(pop, 0.0) + 1)) + tolerance:
                problems.append(f"|c_{mode}{mode}|={abs(corr)!r} exceeds sqrt(pop(pop+1))")
        return problems

    def to_dict(self):
        return asdict(self)

    def flatten(self):
        """
        Flat record with real and imaginary parts and magnitudes split out, used for tabular output.
        """
        row = {"pop_a": self.pop_a, "pop_b": self.pop_b}
        for name in ("c_aa", "c_bb", "c_adagb", "c_ab"):
            value = complex(getattr(self, name))
            row[f"{name}_re"] = value.real
            row[f"{name}_im"] = value.imag
            row[f"abs_{name}"] = abs(value)
        return row


@dataclass(frozen=True, eq=False)
class QuadratureCovariance:
    """
    Symmetrized quadrature second moments ⟨z_i z_j + z_j z_i⟩/2 in the ordering (Xa, Ya, Xb, Yb).
    The stored matrix is a read-only copy.
    """
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float, copy=True)
        if m.shape != (4, 4):
            raise ValueError(f"Covariance must be 4x4, received shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __array__(self, dtype=None):
        return np.asarray(self.matrix, dtype=dtype)

    def __getitem__(self, item):
        if isinstance(item, tuple) and all(isinstance(i, str) for i in item):
            item = tuple(QUADRATURES.index(i) for i in item)
        return self.matrix[item]

    def asymmetry(self):
        return float(np.max(np.abs(self.matrix - self.matrix.T)))

    def min_physical_eigenvalue(self):
        """
        Smallest eigenvalue of the Hermitian matrix M + (i/2)Ω. A physical state has it ≥ 0.
        """
        return float(np.min(np.linalg.eigvalsh(self.matrix + 0.5j * SYMPLECTIC_FORM)))

    def is_physical(self, tolerance=1e-10):
        return self.asymmetry() <= 1e-12 and self.min_physical_eigenvalue() >= -tolerance

    def variances(self):
        m = self.matrix
        return VarianceSet(xx_a=float(m[0, 0]), yy_a=float(m[1, 1]), xy_a=float(m[0, 1]),
                           xx_b=float(m[2, 2]), yy_b=float(m[3, 3]), xy_b=float(m[2, 3]))

    def to_dict(self):
        return {"order": list(QUADRATURES), "matrix": self.matrix.tolist()}
