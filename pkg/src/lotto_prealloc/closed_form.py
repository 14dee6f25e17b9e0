"""Exact equilibrium payoff of the two-stage game under the optimal pre-allocation."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .core import GameInstance, LottoError, Payoff
from .glf_solver import KappaPair, Partition


class ZeroRealTimeBudget(LottoError):
    pass


class RegimeTag(str, enum.Enum):
    I = "I"
    II = "II"
    BOUNDARY = "boundary"


@dataclass(frozen=True)
class Regime:
    tag: RegimeTag
    tau: float | None  # None when qR_B < P

    @property
    def payoff_branch(self) -> RegimeTag:
        # the two payoff formulas coincide on the boundary
        return RegimeTag.II if self.tag is RegimeTag.II else RegimeTag.I


def regime_threshold(P: float, qRB: float) -> float | None:
    """R_A threshold separating the two payoff regimes; None if qR_B < P."""
    if qRB < P:
        return None
    gap = qRB - P
    return 2.0 * gap * gap / (P + 2.0 * gap)


def classify_regime(instance: GameInstance) -> Regime:
    tau = regime_threshold(instance.P, instance.qRB)
    if tau is None:
        return Regime(RegimeTag.I, None)
    if abs(instance.R_A - tau) <= 1e-12 * max(1.0, tau):
        return Regime(RegimeTag.BOUNDARY, tau)
    return Regime(RegimeTag.I if instance.R_A > tau else RegimeTag.II, tau)


def payoff_regime_one(W: float, qRB: float, P: float, R_A: float) -> float:
    """Square-root payoff formula (strong player A)."""
    s = math.sqrt(max(R_A * (R_A + 2.0 * P), 0.0))
    frac = (R_A + s) / (P + R_A + s)
    return W * (1.0 - qRB / (2.0 * R_A) * frac * frac)


def payoff_regime_two(W: float, qRB: float, P: float, R_A: float) -> float:
    """Linear-ratio payoff formula (weak player A); requires qR_B > P."""
    return W * R_A / (2.0 * (qRB - P))


def payoff_value(W: float, qRB: float, P: float, R_A: float) -> float:
    """Equilibrium value to A as a plain float, from the scalar summary (W, qR_B, P, R_A).

    Values depend on R_B and q only through their product, which is what the
    level-set and investment code relies on.
    """
    if R_A == 0.0:
        if P >= qRB and P > 0.0:
            return W * (1.0 - qRB / P)
        return 0.0
    tau = regime_threshold(P, qRB)
    if tau is not None and R_A < tau and abs(R_A - tau) > 1e-12 * max(1.0, tau):
        return payoff_regime_two(W, qRB, P, R_A)
    return payoff_regime_one(W, qRB, P, R_A)


def payoff_A(instance: GameInstance) -> Payoff:
    value = payoff_value(instance.W, instance.qRB, instance.P, instance.R_A)
    assert -1e-12 * instance.W <= value <= instance.W * (1 + 1e-12), value
    return Payoff(value, instance.W)


def kappa_closed_form(instance: GameInstance) -> tuple[KappaPair, Partition]:
    """(kappa_A, kappa_B) solving the budget system at the proportional pre-allocation.

    Regime I puts every battlefield in B1, regime II every battlefield in B2.
    """
    if instance.R_A <= 0.0:
        raise ZeroRealTimeBudget("R_A must be > 0 for the kappa system")
    W, q, P, R_A, qRB = instance.W, instance.q, instance.P, instance.R_A, instance.qRB
    everything = frozenset(range(instance.n))
    if classify_regime(instance).payoff_branch is RegimeTag.I:
        q_kappa_B = (P + R_A + math.sqrt(max(R_A * (R_A + 2.0 * P), 0.0))) / W
        kappa_A = ((P + R_A) * q_kappa_B - P * P / W) / qRB
        partition = Partition(B1=everything, B2=frozenset())
    else:
        gap = qRB - P
        kappa_A = 2.0 * gap / W
        q_kappa_B = 2.0 * gap * gap / (W * R_A)
        partition = Partition(B1=frozenset(), B2=everything)
    return KappaPair(kappa_A, q_kappa_B / q), partition
