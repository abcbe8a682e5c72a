"""Closed-form GA-SPP dynamics for 2x2 games.

Away from the boundary one GA-SPP iteration is affine in ``(alpha, beta)``::

    (alpha', beta') - (alpha, beta) = eta * U @ (alpha, beta) + eta * c
    U = [[g*u_r*u_c, u_r], [u_c, g*u_r*u_c]]
    c = (g*u_r*b_c + b_r, g*u_c*b_r + b_c)

with ``g`` the prediction length. The sign of ``u_r * u_c`` splits games
into three cases: singular ``U`` (case 1), complex eigenvalues with negative
real part (case 2) and real eigenvalues of opposite sign (case 3). In case 3
the coordinates ``F``/``G`` along the eigenvectors evolve geometrically,
which predicts which corner the strategies run to.
"""
import enum
import math
from dataclasses import dataclass

import numpy as np

from gaspp.errors import UnsupportedCaseError, UnsupportedShapeError
from gaspp.game import Reduced2x2Params, reduced_params


class Case(enum.Enum):
    SINGULAR = "Case1_Singular"
    IMAGINARY = "Case2_Imaginary"
    REAL = "Case3_Real"


class Outcome(enum.Enum):
    CONVERGES_FINITE_STEPS = "ConvergesFiniteSteps"
    CONVERGES_TO_NE = "ConvergesToNE"
    CENTER = "Center"
    CORNER = "Corner"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class Dynamics2x2:
    params: Reduced2x2Params
    gamma: float
    U: np.ndarray
    eigenvalues: tuple
    center: tuple | None
    case: Case

    @property
    def sign(self):
        """+1 when u_r, u_c > 0 in case 3, -1 when both are negative (alpha is mirrored)."""
        return 1.0 if self.params.u_r > 0 else -1.0

    def as_dict(self):
        return {
            "u_r": self.params.u_r,
            "b_r": self.params.b_r,
            "u_c": self.params.u_c,
            "b_c": self.params.b_c,
            "gamma": self.gamma,
            "U": self.U.tolist(),
            "eigenvalues": [[z.real, z.imag] for z in self.eigenvalues],
            "center": list(self.center) if self.center is not None else None,
            "case": self.case.value,
        }


@dataclass(frozen=True)
class EigenCoords:
    F: float
    G: float


@dataclass(frozen=True)
class QualitativePrediction:
    """Predicted fate of a GA-SPP run; ``point`` is set for CENTER and CORNER."""

    outcome: Outcome
    point: tuple | None = None

    @property
    def tag(self):
        return self.outcome.value


def update_matrix(u_r, u_c, gamma):
    p = u_r * u_c
    return np.array([[gamma * p, u_r], [u_c, gamma * p]])


def eigenvalues(u_r, u_c, gamma):
    """``gamma*u_r*u_c +/- sqrt(u_r*u_c)`` as a pair of complex numbers (larger real part first)."""
    p = u_r * u_c
    root = complex(math.sqrt(p), 0.0) if p >= 0 else complex(0.0, math.sqrt(-p))
    return (gamma * p + root, gamma * p - root)


def analyze(game, gamma):
    """Linearised GA-SPP dynamics of a 2x2 game at prediction length ``gamma``."""
    if game.shape != (2, 2):
        raise UnsupportedShapeError(f"2x2 analysis needs a 2x2 game, got {game.shape}")
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    prm = reduced_params(game)
    p = prm.u_r * prm.u_c
    U = update_matrix(prm.u_r, prm.u_c, gamma)
    if p == 0:
        case = Case.SINGULAR
    elif p < 0:
        case = Case.IMAGINARY
    else:
        case = Case.REAL
    center = None
    if p != 0 and gamma * gamma * p != 1.0:
        center = (-prm.b_c / prm.u_c, -prm.b_r / prm.u_r)
    return Dynamics2x2(prm, float(gamma), U, eigenvalues(prm.u_r, prm.u_c, gamma), center, case)


def eigencoords(dyn, alpha, beta):
    """Coordinates of ``(alpha, beta)`` along the eigenvectors of ``U`` (case 3 only).

    With ``x = alpha - alpha_c`` and ``y = beta - beta_c``,
    ``F = s*x + sqrt(u_r/u_c)*y`` and ``G = s*x - sqrt(u_r/u_c)*y`` where
    ``s`` is :attr:`Dynamics2x2.sign`. ``F`` grows by ``1 + eta*lambda_1``
    and ``G`` shrinks by ``1 + eta*lambda_2`` per unclipped step.
    """
    if dyn.case is not Case.REAL or dyn.center is None:
        raise UnsupportedCaseError(f"eigencoordinates need case 3 with a center, got {dyn.case.value}")
    x = alpha - dyn.center[0]
    y = beta - dyn.center[1]
    r = math.sqrt(dyn.params.u_r / dyn.params.u_c)
    s = dyn.sign
    return EigenCoords(F=s * x + r * y, G=s * x - r * y)


def _in_unit(v):
    return 0.0 <= v <= 1.0


def predict_outcome(dyn, initial, tol=1e-12):
    """Qualitative fate of GA-SPP from ``initial = (alpha0, beta0)``.

    Case 1 settles in finitely many steps and case 2 converges to a Nash
    equilibrium. In case 3 with the center inside the unit square the sign
    of ``F0`` picks the center (``F0 == 0``) or one of the two corners the
    ``F`` axis points to. With part of the center outside the square, the
    out-of-range coordinate makes one action strictly dominant for the
    other agent, which fixes that agent's limit and then the opponent's.
    """
    if dyn.case is Case.SINGULAR:
        return QualitativePrediction(Outcome.CONVERGES_FINITE_STEPS)
    if dyn.case is Case.IMAGINARY:
        return QualitativePrediction(Outcome.CONVERGES_TO_NE)
    if dyn.center is None:
        return QualitativePrediction(Outcome.INDETERMINATE)
    alpha_c, beta_c = dyn.center
    s = dyn.sign
    u_r, u_c = dyn.params.u_r, dyn.params.u_c
    if _in_unit(alpha_c) and _in_unit(beta_c):
        F0 = eigencoords(dyn, *initial).F
        if abs(F0) <= tol:
            return QualitativePrediction(Outcome.CENTER, (alpha_c, beta_c))
        # F increases toward beta = 1 and toward alpha = 1 (s > 0) or alpha = 0 (s < 0)
        up = F0 > 0
        alpha = (1.0 if up else 0.0) if s > 0 else (0.0 if up else 1.0)
        beta = 1.0 if up else 0.0
        return QualitativePrediction(Outcome.CORNER, (alpha, beta))

    # d V_r / d alpha = u_r * (beta - beta_c), d V_c / d beta = u_c * (alpha - alpha_c)
    alpha = beta = None
    if not _in_unit(beta_c):
        alpha = 1.0 if u_r * (0.5 - beta_c) > 0 else 0.0
    if not _in_unit(alpha_c):
        beta = 1.0 if u_c * (0.5 - alpha_c) > 0 else 0.0
    if beta is None:
        push = u_c * (alpha - alpha_c)
        if push == 0:
            return QualitativePrediction(Outcome.INDETERMINATE)
        beta = 1.0 if push > 0 else 0.0
    if alpha is None:
        push = u_r * (beta - beta_c)
        if push == 0:
            return QualitativePrediction(Outcome.INDETERMINATE)
        alpha = 1.0 if push > 0 else 0.0
    return QualitativePrediction(Outcome.CORNER, (alpha, beta))
