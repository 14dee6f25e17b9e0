"""Level sets of the equilibrium value, resource effectiveness, optimal investment.

Everything here depends on player B only through ``qR_B = q * R_B``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .closed_form import payoff_value
from .core import LottoError


class InvalidLevel(LottoError):
    pass


class InvalidCost(LottoError):
    pass


class InvalidBudget(LottoError):
    pass


class Branch(str, enum.Enum):
    LINEAR = "linear"
    QUADRATIC = "quadratic"


@dataclass(frozen=True)
class LevelPoint:
    Pi: float
    P: float
    R_A: float
    branch: Branch


@dataclass(frozen=True)
class AboveLevel:
    """No real-time budget reaches level ``Pi``: even ``R_A = 0`` does better."""

    Pi: float
    P: float
    P_max: float

    def __bool__(self):
        return False


@dataclass(frozen=True)
class Investment:
    P_star: float
    R_A_star: float
    payoff: float
    t: float
    interval: tuple[float, float] | None = None


def _check_level(Pi: float, W: float) -> None:
    if not (0.0 <= Pi < W):
        raise InvalidLevel(f"Pi={Pi} must lie in [0, W={W})")


def _check_opponent(R_B: float, q: float) -> None:
    if not (R_B > 0.0 and q > 0.0):
        raise InvalidBudget(f"need R_B > 0 and q > 0, got R_B={R_B}, q={q}")


def level_switch_P(Pi: float, qRB: float, W: float) -> float | None:
    """Pre-allocation where the linear piece hands over to the quadratic one."""
    if Pi >= W / 2:
        return None
    return (W - 2.0 * Pi) * qRB / (W - Pi)


def level_P_max(Pi: float, qRB: float, W: float) -> float:
    return W * qRB / (W - Pi)


def level_RA(Pi: float, P: float, R_B: float, q: float = 1.0, W: float = 1.0) -> LevelPoint | AboveLevel:
    """Real-time budget that, together with pre-allocation ``P``, yields value ``Pi``."""
    _check_level(Pi, W)
    _check_opponent(R_B, q)
    if P < 0.0:
        raise InvalidBudget(f"P={P} must be >= 0")
    qRB = q * R_B
    P_max = level_P_max(Pi, qRB, W)
    switch = level_switch_P(Pi, qRB, W)
    if switch is not None and P < switch:
        return LevelPoint(Pi, P, 2.0 * Pi / W * (qRB - P), Branch.LINEAR)
    if P <= P_max:
        gap = qRB * W - (W - Pi) * P
        return LevelPoint(Pi, P, gap * gap / (2.0 * qRB * (W - Pi) * W), Branch.QUADRATIC)
    return AboveLevel(Pi, P, P_max)


def level_slope(Pi: float, P: float, R_B: float, q: float = 1.0, W: float = 1.0) -> float:
    """d R_A / d P along the ``Pi`` level curve."""
    point = level_RA(Pi, P, R_B, q, W)
    if not point:
        raise InvalidLevel(f"P={P} lies beyond the level curve for Pi={Pi}")
    qRB = q * R_B
    if point.branch is Branch.LINEAR:
        return -2.0 * Pi / W
    return -(qRB * W - (W - Pi) * P) / (qRB * W)


def level_curve(Pi: float, R_B: float, q: float = 1.0, W: float = 1.0,
                num_points: int = 101) -> list[LevelPoint]:
    """Sample the ``Pi`` level curve uniformly in ``P``, ascending.

    The branch switch is inserted as an extra exact sample when it falls
    strictly between grid points.
    """
    if num_points < 2:
        raise ValueError("num_points must be >= 2")
    _check_level(Pi, W)
    _check_opponent(R_B, q)
    qRB = q * R_B
    P_max = level_P_max(Pi, qRB, W)
    grid = list(np.linspace(0.0, P_max, num_points))
    grid[-1] = P_max
    switch = level_switch_P(Pi, qRB, W)
    if switch is not None and 0.0 < switch < P_max and not np.any(np.isclose(grid, switch, rtol=0, atol=1e-15)):
        grid.append(switch)
        grid.sort()
    points = []
    for P in grid:
        point = level_RA(Pi, float(P), R_B, q, W)
        assert point, P
        points.append(point)
    return points


def effectiveness_equivalent_P(R_A: float, R_B: float, q: float = 1.0) -> float:
    """Pre-allocated budget that matches ``R_A`` real-time resources used alone."""
    if not (R_A > 0.0):
        raise InvalidBudget(f"R_A={R_A} must be > 0")
    _check_opponent(R_B, q)
    qRB = q * R_B
    if R_A > qRB:
        return 2.0 * R_A
    # the formula is >= 2 R_A exactly; max() keeps that true under rounding near R_A = qR_B
    return max(2.0 * qRB * qRB / (2.0 * qRB - R_A), 2.0 * R_A)


def optimal_investment(X_A: float, c: float, R_B: float, q: float = 1.0, W: float = 1.0) -> Investment:
    """Best split of money ``X_A`` between pre-allocated (unit price ``c``) and real-time (price 1) resources.

    When ``c`` sits exactly at the threshold the optimum is an interval; the
    returned point is its ``P = 0`` end and the interval is reported.
    """
    if not (c > 0.0):
        raise InvalidCost(f"c={c} must be > 0")
    if not (X_A > 0.0):
        raise InvalidBudget(f"X_A={X_A} must be > 0")
    _check_opponent(R_B, q)
    qRB = q * R_B
    t = min(1.0, X_A / qRB)
    P_interior = (1.0 - c / (2.0 - c)) * X_A / c if c < 2.0 else 0.0
    if abs(c - t) <= 1e-12 * max(1.0, t):
        P_star, interval = 0.0, (0.0, max(P_interior, 0.0))
    elif c < t:
        P_star, interval = P_interior, None
    else:
        P_star, interval = 0.0, None
    R_A_star = X_A - c * P_star

    if c < t and interval is None:
        value = W * (1.0 - qRB / (2.0 * X_A) * c * (2.0 - c))
    elif X_A >= qRB:
        value = W * (1.0 - qRB / (2.0 * X_A))
    else:
        value = W * X_A / (2.0 * qRB)
    return Investment(P_star, R_A_star, value, t, interval)


def investment_payoff(P: float, R_A: float, R_B: float, q: float = 1.0, W: float = 1.0) -> float:
    """Equilibrium value of a candidate investment; used by the brute-force checks."""
    return payoff_value(W, q * R_B, P, R_A)
