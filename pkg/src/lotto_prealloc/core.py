"""Game instances, pre-allocations and the error types shared by every module.

Notation follows the two-stage General Lotto model: ``w`` are battlefield
values, ``q`` scales player B's real-time resources, ``P`` is player A's
pre-allocated budget, ``R_A``/``R_B`` are the real-time budgets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


class LottoError(ValueError):
    """Base class for domain errors; ``str(type(err).__name__)`` is the CLI error name."""


class EmptyBattlefields(LottoError):
    pass


class NonPositiveWeight(LottoError):
    pass


class NonPositiveQ(LottoError):
    pass


class NegativeBudget(LottoError):
    pass


class NonPositiveRB(LottoError):
    pass


class InvalidPreAllocation(LottoError):
    pass


def simplex_tol(P: float) -> float:
    return 1e-12 * max(1.0, P)


@dataclass(frozen=True)
class GameInstance:
    w: tuple[float, ...]
    q: float
    P: float
    R_A: float
    R_B: float
    W: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "w", tuple(float(x) for x in self.w))
        object.__setattr__(self, "W", float(sum(self.w)))

    @property
    def n(self) -> int:
        return len(self.w)

    @property
    def qRB(self) -> float:
        return self.q * self.R_B

    @property
    def w_array(self) -> np.ndarray:
        return np.asarray(self.w, dtype=float)

    def replace(self, **changes) -> "GameInstance":
        params = dict(w=self.w, q=self.q, P=self.P, R_A=self.R_A, R_B=self.R_B)
        params.update(changes)
        return validate_instance(**params)

    def to_dict(self) -> dict:
        return {"n": self.n, "w": list(self.w), "q": self.q, "P": self.P,
                "R_A": self.R_A, "R_B": self.R_B}


@dataclass(frozen=True)
class PreAllocation:
    p: tuple[float, ...]

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.p, dtype=float)

    @property
    def total(self) -> float:
        return float(sum(self.p))


@dataclass(frozen=True)
class Payoff:
    value_A: float
    W: float

    @property
    def value_B(self) -> float:
        return self.W - self.value_A


def validate_instance(w: Sequence[float], q: float, P: float, R_A: float,
                      R_B: float, n: int | None = None) -> GameInstance:
    """Check raw parameters and build a :class:`GameInstance`.

    ``n`` is optional; when given it must match ``len(w)``.
    """
    w = [float(x) for x in w]
    if len(w) == 0 or (n is not None and n < 1):
        raise EmptyBattlefields("n: need at least one battlefield")
    if n is not None and n != len(w):
        raise EmptyBattlefields(f"n: n={n} does not match len(w)={len(w)}")
    for b, wb in enumerate(w):
        if not (wb > 0 and np.isfinite(wb)):
            raise NonPositiveWeight(f"w[{b}]={wb} must be > 0")
    if not (q > 0 and np.isfinite(q)):
        raise NonPositiveQ(f"q={q} must be > 0")
    for name, val in (("P", P), ("R_A", R_A)):
        if not (val >= 0 and np.isfinite(val)):
            raise NegativeBudget(f"{name}={val} must be >= 0")
    if not (R_B > 0 and np.isfinite(R_B)):
        raise NonPositiveRB(f"R_B={R_B} must be > 0")
    inst = GameInstance(tuple(w), float(q), float(P), float(R_A), float(R_B))
    assert inst.W == sum(inst.w)
    return inst


def make_preallocation(instance: GameInstance, p: Sequence[float]) -> PreAllocation:
    """Validate an explicit pre-allocation against ``instance`` (p on the simplex of size P)."""
    p = [float(x) for x in p]
    if len(p) != instance.n:
        raise InvalidPreAllocation(f"p: expected {instance.n} entries, got {len(p)}")
    if any(not (x >= 0) for x in p):
        raise InvalidPreAllocation(f"p: entries must be >= 0, got {p}")
    if abs(sum(p) - instance.P) > simplex_tol(instance.P):
        raise InvalidPreAllocation(f"p: sums to {sum(p)}, expected P={instance.P}")
    return PreAllocation(tuple(p))


def proportional_preallocation(instance: GameInstance) -> PreAllocation:
    """The value-proportional split ``p_b = (P/W) w_b``.

    The last entry absorbs rounding so the vector sums to ``P`` as closely as
    binary64 allows.
    """
    ratio = instance.P / instance.W
    p = [ratio * wb for wb in instance.w]
    if instance.n > 1:
        p[-1] = max(0.0, instance.P - sum(p[:-1]))
    else:
        p[0] = instance.P
    return PreAllocation(tuple(p))


def weighted_norm_sq(instance: GameInstance, p: PreAllocation | Sequence[float]) -> float:
    """``sum_b p_b**2 / w_b``; minimized over the simplex by the proportional split."""
    arr = p.array if isinstance(p, PreAllocation) else np.asarray(p, dtype=float)
    return float(np.sum(arr**2 / instance.w_array))
