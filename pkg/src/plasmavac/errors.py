"""Exception hierarchy shared by the library and the command line."""
from __future__ import annotations


class PlasmaVacError(Exception):
    """Base class for every error raised by :mod:`plasmavac`."""


class ShapeError(PlasmaVacError, ValueError):
    """Array or matrix has the wrong dimensions."""


class SingularMatrixError(PlasmaVacError, ArithmeticError):
    """Matrix is singular to working tolerance."""


class AsymmetryError(PlasmaVacError, ValueError):
    """A symmetric input was required but the matrix is not symmetric."""


class ConvergenceError(PlasmaVacError, RuntimeError):
    """An iterative kernel exhausted its iteration budget."""


class InadmissibleStateError(PlasmaVacError, ValueError):
    """Thermodynamic state outside the hyperbolicity region."""


class GateError(PlasmaVacError, ValueError):
    """A hypothesis gate (stability, invertibility, velocity, ...) failed.

    Attributes:
        gate: short machine-readable gate name.
        condition: human-readable statement of the violated condition.
    """

    def __init__(self, gate: str, condition: str, detail: str = "") -> None:
        self.gate = gate
        self.condition = condition
        msg = f"{gate} gate failed: requires {condition}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class JacobianDegenerateError(GateError):
    """1 + Psi_1 dropped below 1/2, so the lifted map may fold."""

    def __init__(self, detail: str = "") -> None:
        super().__init__("jacobian", "1 + Psi_1 >= 1/2", detail)


class InvertibilityError(GateError):
    """epsilon*|Psi_t| >= 1, so J is not invertible."""

    def __init__(self, detail: str = "") -> None:
        super().__init__("invertibility", "epsilon*|Psi_t| < 1 (J invertible)", detail)


class NuRangeError(GateError):
    """|nu| >= 1, secondary symmetrizer loses positivity."""

    def __init__(self, detail: str = "") -> None:
        super().__init__("nu-range", "|nu| < 1 (secondary symmetrizer positive)", detail)


class StabilityError(GateError):
    """Plasma and vacuum magnetic fields are (nearly) parallel on the interface."""

    def __init__(self, detail: str = "") -> None:
        super().__init__(
            "stability", "|H x calH| >= delta (non-parallel magnetic fields)", detail
        )


class VelocityError(GateError):
    """Basic-state velocity at the boundary is not below the scaled light speed."""

    def __init__(self, detail: str = "") -> None:
        super().__init__("velocity", "|v_hat| < 1/epsilon on the boundary", detail)


class ElectricFieldError(GateError):
    """Effective boundary electric field mu_hat exceeds the smallness threshold."""

    def __init__(self, detail: str = "") -> None:
        super().__init__("electric-field", "|mu_hat| <= mu_star (weak vacuum electric field)", detail)


class BoundaryConditionError(PlasmaVacError, ValueError):
    """A boundary trace does not satisfy the interface conditions."""


class GridError(PlasmaVacError, ValueError):
    """Incompatible or malformed grid."""


class CFLError(PlasmaVacError, ValueError):
    """Time step exceeds the CFL bound."""


class NonFiniteError(PlasmaVacError, FloatingPointError):
    """NaN or Inf encountered during time stepping."""

    def __init__(self, step: int, where: str = "") -> None:
        self.step = step
        super().__init__(f"non-finite value at step {step}" + (f" in {where}" if where else ""))


class ConfigError(PlasmaVacError, ValueError):
    """Run configuration failed schema validation.

    Attributes:
        problems: every violation found, not just the first.
    """

    def __init__(self, problems: list[str]) -> None:
        self.problems = list(problems)
        super().__init__("invalid configuration:\n  - " + "\n  - ".join(self.problems))
