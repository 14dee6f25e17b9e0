"""Stage-2 solver: General Lotto with favoritism for an arbitrary pre-allocation.

The equilibrium is pinned down by two multipliers ``(kappa_A, kappa_B)`` that
solve the players' expected-budget identities

    R_A = sum_b (h_b - p_b)**2 / (2 q w_b kappa_B)
    R_B = sum_b (h_b**2 - p_b**2) / (2 q w_b kappa_A)

with ``h_b = min(q w_b kappa_B, w_b kappa_A + p_b)``.  Battlefields where the
first arm is active form ``B1``, the rest ``B2``.  Feasibility forces ``B1`` to
hold the largest ratios ``p_b / w_b``, so only threshold cuts in that order
need to be tried.

A battlefield whose pre-allocation already exceeds ``q w_b kappa_B`` is
conceded by B: neither player spends on it and A collects ``w_b``.  Such
battlefields sit in ``B1`` (the first arm of ``h_b`` is the minimum) and are
additionally listed in ``Partition.conceded``.  Their budget terms are the
positive parts of the expressions above, which vanish.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .core import GameInstance, LottoError, Payoff, PreAllocation

log = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-9
_FEAS_RTOL = 1e-10


class ZeroBudget(LottoError):
    pass


class NoFeasiblePartition(LottoError):
    pass


@dataclass(frozen=True)
class KappaPair:
    kappa_A: float
    kappa_B: float

    def q_kappa_B(self, q: float) -> float:
        return q * self.kappa_B


@dataclass(frozen=True)
class Partition:
    B1: frozenset
    B2: frozenset
    conceded: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "B1", frozenset(self.B1))
        object.__setattr__(self, "B2", frozenset(self.B2))
        object.__setattr__(self, "conceded", frozenset(self.conceded))
        assert not (self.B1 & self.B2)
        assert self.conceded <= self.B1

    @property
    def active_B1(self) -> frozenset:
        return self.B1 - self.conceded

    def describe(self) -> dict:
        return {"B1": sorted(self.B1), "B2": sorted(self.B2),
                "conceded": sorted(self.conceded)}


@dataclass(frozen=True)
class PartitionQuantities:
    """Aggregates over the contested part of B1 and over B2."""

    W1: float
    W2: float
    P1: float
    P2: float
    norm1: float
    C1: float
    C2: float
    H1: float
    H2: float


@dataclass(frozen=True)
class Infeasible:
    reason: str
    battlefield: int | None = None

    def __bool__(self):
        return False


@dataclass(frozen=True)
class GlfEquilibrium:
    kappa: KappaPair
    partition: Partition
    payoff: Payoff
    residual_A: float
    residual_B: float


def _arrays(instance: GameInstance, p) -> tuple[np.ndarray, np.ndarray]:
    p_arr = p.array if isinstance(p, PreAllocation) else np.asarray(p, dtype=float)
    return instance.w_array, p_arr


def h_value(instance: GameInstance, p, kappa: KappaPair, b: int) -> float:
    w, p_arr = _arrays(instance, p)
    return min(instance.q * w[b] * kappa.kappa_B, w[b] * kappa.kappa_A + p_arr[b])


def soe_residual(instance: GameInstance, p, kappa: KappaPair) -> tuple[float, float]:
    """Absolute defects of the two budget identities at ``kappa``."""
    w, p_arr = _arrays(instance, p)
    q = instance.q
    h = np.minimum(q * w * kappa.kappa_B, w * kappa.kappa_A + p_arr)
    spend_A = np.maximum(h - p_arr, 0.0) ** 2 / (2.0 * q * w * kappa.kappa_B)
    spend_B = np.maximum(h * h - p_arr * p_arr, 0.0) / (2.0 * q * w * kappa.kappa_A)
    return abs(float(spend_A.sum()) - instance.R_A), abs(float(spend_B.sum()) - instance.R_B)


def partition_quantities(instance: GameInstance, p, partition: Partition) -> PartitionQuantities:
    w, p_arr = _arrays(instance, p)
    b1 = sorted(partition.active_B1)
    b2 = sorted(partition.B2)
    W1 = float(w[b1].sum())
    W2 = float(w[b2].sum())
    P1 = float(p_arr[b1].sum())
    P2 = float(p_arr[b2].sum())
    norm1 = float(np.sum(p_arr[b1] ** 2 / w[b1]))
    C1 = instance.R_A + P1
    C2 = instance.qRB - P2
    return PartitionQuantities(W1, W2, P1, P2, norm1, C1, C2,
                               C1 * C1 - W1 * norm1, C2 * C2 + W2 * norm1)


def _kappas_for(instance: GameInstance, pq: PartitionQuantities) -> tuple[float, float] | Infeasible:
    """(kappa_A, q*kappa_B) from the algebraic solution for the given split."""
    qRB, R_A = instance.qRB, instance.R_A
    if pq.W1 == 0.0 and pq.W2 == 0.0:
        return Infeasible("every battlefield conceded")
    if pq.W1 == 0.0:
        # pure B2: kappa_A from B's budget, kappa_B from A's
        if pq.C2 <= 0.0:
            return Infeasible("qR_B <= pre-allocation on B2")
        kappa_A = 2.0 * pq.C2 / pq.W2
        return kappa_A, pq.W2 * kappa_A * kappa_A / (2.0 * R_A)
    if pq.W2 == 0.0:
        if pq.H1 < 0.0:
            if pq.H1 < -1e-14 * pq.C1 * pq.C1:
                return Infeasible("H1 < 0")
            root = 0.0
        else:
            root = math.sqrt(pq.H1)
        q_kappa_B = (pq.C1 + root) / pq.W1
        return (pq.C1 * q_kappa_B - pq.norm1) / qRB, q_kappa_B
    prod = pq.H1 * pq.H2
    if prod < 0.0:
        scale = max(pq.C1 * pq.C1, pq.W1 * pq.norm1) * pq.H2
        if prod < -1e-14 * scale:
            return Infeasible("H1*H2 < 0")
        prod = 0.0
    root = math.sqrt(prod)
    denom = pq.W1 * pq.C2 * pq.C2 + pq.W2 * pq.C1 * pq.C1
    # signed C2 keeps the two roots paired when qR_B < P2; the other root has kappa_A <= 0
    q_kappa_B = (pq.C1 * pq.H2 + pq.C2 * root) / denom
    kappa_A = (pq.C2 * pq.H1 + pq.C1 * root) / denom
    return kappa_A, q_kappa_B


def solve_partition(instance: GameInstance, p, partition: Partition) -> KappaPair | Infeasible:
    """Closed-form multipliers for a fixed split, or the first violated condition."""
    if instance.R_A <= 0.0:
        raise ZeroBudget("R_A must be > 0")
    w, p_arr = _arrays(instance, p)
    pq = partition_quantities(instance, p_arr, partition)
    sol = _kappas_for(instance, pq)
    if isinstance(sol, Infeasible):
        return sol
    kappa_A, q_kappa_B = sol
    if not (kappa_A > 0.0 and q_kappa_B > 0.0) or not (math.isfinite(kappa_A) and math.isfinite(q_kappa_B)):
        return Infeasible("non-positive kappa")
    for b in range(instance.n):
        top = q_kappa_B * w[b]
        margin = top - p_arr[b]
        cap = w[b] * kappa_A
        tol = _FEAS_RTOL * max(top, cap + p_arr[b], 1e-300)
        if b in partition.conceded:
            if margin > tol:
                return Infeasible("conceded battlefield still contested", b)
        elif b in partition.B1:
            # margin == 0 is the conceded boundary; both labels are valid there
            if margin < -tol:
                return Infeasible("B1 requires q w_b kappa_B > p_b", b)
            if margin > cap + tol:
                return Infeasible("B1 requires q w_b kappa_B - p_b <= w_b kappa_A", b)
        else:
            if margin < cap - tol:
                return Infeasible("B2 requires q w_b kappa_B - p_b > w_b kappa_A", b)
    kappa = KappaPair(kappa_A, q_kappa_B / instance.q)
    res_A, res_B = soe_residual(instance, p_arr, kappa)
    if res_A > RESIDUAL_TOL * instance.R_A or res_B > RESIDUAL_TOL * instance.R_B:
        return Infeasible(f"budget identities violated (residuals {res_A:.3g}, {res_B:.3g})")
    return kappa


def payoff_from_kappa(instance: GameInstance, p, kappa: KappaPair, partition: Partition) -> Payoff:
    """Player A's equilibrium value from the multipliers, battlefield by battlefield."""
    w, p_arr = _arrays(instance, p)
    q_kappa_B = instance.q * kappa.kappa_B
    ratio = q_kappa_B / (2.0 * kappa.kappa_A)
    value = 0.0
    for b in sorted(partition.B1):
        top = q_kappa_B * w[b]
        share = min(p_arr[b] / top, 1.0)
        value += w[b] * (1.0 - ratio * (1.0 - share * share))
    for b in sorted(partition.B2):
        value += w[b] * kappa.kappa_A / (2.0 * q_kappa_B)
    return Payoff(float(value), instance.W)


def payoff_per_battlefield(instance: GameInstance, p, kappa: KappaPair, partition: Partition) -> np.ndarray:
    out = np.zeros(instance.n)
    for b in range(instance.n):
        single = Partition(B1={b} & partition.B1, B2={b} & partition.B2,
                           conceded={b} & partition.conceded)
        out[b] = payoff_from_kappa(instance, p, kappa, single).value_A
    return out


def threshold_partitions(instance: GameInstance, p) -> list[Partition]:
    """Every (conceded, B1, B2) split that respects the descending ``p_b/w_b`` order.

    Cuts that keep equal-ratio battlefields together come first; cuts that
    split a tie follow.
    """
    w, p_arr = _arrays(instance, p)
    ratios = p_arr / w
    order = sorted(range(instance.n), key=lambda b: (-ratios[b], b))
    n = instance.n
    boundary = [k == 0 or k == n or ratios[order[k - 1]] != ratios[order[k]] for k in range(n + 1)]
    grouped, split = [], []
    for j in range(n):  # conceded = order[:j], never everything
        for k in range(j, n + 1):  # B1 = order[:k]
            part = Partition(B1=order[:k], B2=order[k:], conceded=order[:j])
            (grouped if boundary[j] and boundary[k] else split).append(part)
    return grouped + split


def _all_partitions(n: int):
    for labels in itertools.product((0, 1, 2), repeat=n):
        if all(lab == 0 for lab in labels):
            continue
        yield Partition(B1=[b for b in range(n) if labels[b] in (0, 1)],
                        B2=[b for b in range(n) if labels[b] == 2],
                        conceded=[b for b in range(n) if labels[b] == 0])


def feasible_partitions(instance: GameInstance, p, exhaustive: bool = False) -> list[tuple[Partition, KappaPair]]:
    if exhaustive and instance.n > 10:
        raise ValueError("exhaustive enumeration is limited to n <= 10")
    candidates = _all_partitions(instance.n) if exhaustive else threshold_partitions(instance, p)
    found = []
    for part in candidates:
        sol = solve_partition(instance, p, part)
        if not isinstance(sol, Infeasible):
            found.append((part, sol))
    return found


def solve_glf(instance: GameInstance, p, exhaustive: bool = False) -> GlfEquilibrium:
    """Equilibrium multipliers, partition and payoff for pre-allocation ``p``.

    ``exhaustive=True`` tries every labelling of the battlefields (n <= 10)
    instead of threshold cuts; it exists to cross-check the ordering argument.
    """
    if instance.R_A <= 0.0 or instance.R_B <= 0.0:
        raise ZeroBudget("solve_glf needs R_A > 0 and R_B > 0")
    found = feasible_partitions(instance, p, exhaustive)
    if not found:
        raise NoFeasiblePartition(
            f"no feasible partition for instance={instance.to_dict()} p={list(_arrays(instance, p)[1])}")

    results = []
    for part, kappa in found:
        res_A, res_B = soe_residual(instance, p, kappa)
        rel = max(res_A / instance.R_A, res_B / instance.R_B)
        payoff = payoff_from_kappa(instance, p, kappa, part)
        results.append((rel, part, kappa, payoff, res_A, res_B))
    if len(results) > 1:
        values = [r[3].value_A for r in results]
        if max(values) - min(values) > 1e-8 * instance.W:
            log.warning("feasible partitions disagree on payoff: %s", values)
    # residuals below round-off are treated as ties
    rel, part, kappa, payoff, res_A, res_B = min(
        results, key=lambda r: (round(r[0], 12), len(r[1].B1)))
    return GlfEquilibrium(kappa, part, payoff, res_A, res_B)


def case2_margin(instance: GameInstance, p) -> float:
    """Slack of the condition that puts every battlefield in B2.

    Positive means the all-B2 solution is valid and A's value equals
    ``W R_A / (2 (qR_B - P))`` regardless of how ``p`` is spread.
    """
    w, p_arr = _arrays(instance, p)
    R_A = instance.R_A
    top_ratio = float(np.max(p_arr / w))
    return (instance.qRB - instance.P) - 0.5 * R_A * (
        1.0 + math.sqrt(1.0 + 2.0 * instance.W / R_A * top_ratio))
