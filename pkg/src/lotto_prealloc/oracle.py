"""Discretized Stage-2 game used to certify the closed forms independently.

Both players pick allocation vectors on a grid ``{0, d, 2d, ...}`` per
battlefield and may mix over them subject to an expected-budget constraint.
A wins battlefield ``b`` iff ``x_A + p_b > q x_B`` (B wins ties unless
``tie_to_A``).  Payoffs are additively separable over battlefields, so every
quantity is computed from per-battlefield marginals.

The equilibrium is found by a double-oracle loop: solve the game restricted to
a few pure strategies by linear programming, add both players' exact best
responses, repeat.  The reported duality gap comes from exact best responses
over the full grid, so the certificate holds whatever the loop did.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .core import GameInstance, LottoError, PreAllocation
from .glf_solver import solve_glf

log = logging.getLogger(__name__)

MAX_STRATEGIES = 100_000
MAX_BATTLEFIELDS = 3


class InvalidStep(LottoError):
    pass


class TooLarge(LottoError):
    pass


@dataclass(frozen=True)
class MixedStrategy:
    """Sparse distribution over one player's grid strategies (flat indices)."""

    probs: dict[int, float]
    expected_cost: float


@dataclass
class DiscretizedGame:
    instance: GameInstance
    p: np.ndarray
    delta: float
    x_max_A: float
    x_max_B: float
    tie_rule: str = "split"
    levels_A: int = field(init=False)
    levels_B: int = field(init=False)

    def __post_init__(self):
        self.p = np.asarray(self.p, dtype=float)
        self.levels_A = int(math.floor(self.x_max_A / self.delta + 1e-9)) + 1
        self.levels_B = int(math.floor(self.x_max_B / self.delta + 1e-9)) + 1
        n = self.instance.n
        # one matrix per battlefield: wins[b][i, j] = 1 if A at level i beats B at level j
        self.wins = []
        for b in range(n):
            xa = self.delta * np.arange(self.levels_A)[:, None] + self.p[b]
            xb = self.instance.q * self.delta * np.arange(self.levels_B)[None, :]
            diff = xa - xb
            tol = 1e-9 * max(1.0, float(np.max(np.abs(xa))), float(np.max(np.abs(xb))))
            share = (diff > tol).astype(float)
            if self.tie_rule == "A":
                share[np.abs(diff) <= tol] = 1.0
            elif self.tie_rule == "split":
                share[np.abs(diff) <= tol] = 0.5
            elif self.tie_rule != "B":
                raise ValueError(f"unknown tie_rule {self.tie_rule!r}")
            self.wins.append(share)

    @property
    def n(self) -> int:
        return self.instance.n

    def num_strategies(self, player: str) -> int:
        return self.levels(player) ** self.n

    def levels(self, player: str) -> int:
        return self.levels_A if player == "A" else self.levels_B

    def budget(self, player: str) -> float:
        return self.instance.R_A if player == "A" else self.instance.R_B

    def unravel(self, player: str, flat) -> np.ndarray:
        """Level indices, shape (..., n), of flat strategy indices."""
        shape = (self.levels(player),) * self.n
        return np.stack(np.unravel_index(np.asarray(flat), shape), axis=-1)

    def cost(self, player: str, flat) -> np.ndarray:
        return self.delta * self.unravel(player, flat).sum(axis=-1)

    def marginals(self, player: str, strategy: MixedStrategy) -> np.ndarray:
        """(n, levels) array of per-battlefield level probabilities."""
        out = np.zeros((self.n, self.levels(player)))
        idx = np.fromiter(strategy.probs.keys(), dtype=np.int64, count=len(strategy.probs))
        pr = np.fromiter(strategy.probs.values(), dtype=float, count=len(strategy.probs))
        lv = self.unravel(player, idx)
        for b in range(self.n):
            np.add.at(out[b], lv[:, b], pr)
        return out

    def win_value(self, player: str, opponent_marginals: np.ndarray) -> np.ndarray:
        """(n, levels) value ``player`` collects on each battlefield at each own level."""
        w = self.instance.w_array
        rows = []
        for b in range(self.n):
            if player == "A":
                rows.append(w[b] * (self.wins[b] @ opponent_marginals[b]))
            else:
                rows.append(w[b] * ((1.0 - self.wins[b]).T @ opponent_marginals[b]))
        return np.array(rows)

    def payoff(self, sigma_A: MixedStrategy, sigma_B: MixedStrategy) -> float:
        """Expected value to A."""
        mA = self.marginals("A", sigma_A)
        mB = self.marginals("B", sigma_B)
        return float(np.sum(mA * self.win_value("A", mB)))

    def pure_matrix(self, idx_A, idx_B) -> np.ndarray:
        """A's payoff for each pair of listed pure strategies."""
        la = self.unravel("A", idx_A)
        lb = self.unravel("B", idx_B)
        w = self.instance.w_array
        out = np.zeros((len(la), len(lb)))
        for b in range(self.n):
            out += w[b] * self.wins[b][np.ix_(la[:, b], lb[:, b])]
        return out


@dataclass(frozen=True)
class SaddleCertificate:
    value: float
    sigma_A: MixedStrategy
    sigma_B: MixedStrategy
    best_response_A: float
    best_response_B: float
    gap: float
    iterations: int
    converged: bool

    @property
    def lower(self) -> float:
        return self.value - self.gap

    @property
    def upper(self) -> float:
        return self.value + self.gap


def build_discretized(instance: GameInstance, p, delta: float, cap_policy: str = "kappa",
                      tie_rule: str = "split") -> DiscretizedGame:
    """Grid game whose caps bracket the equilibrium supports.

    ``cap_policy="kappa"`` caps allocations just above the supports implied by
    the multipliers; ``"budget"`` (also the fallback when they are unavailable)
    uses ``2 (P + R_A + qR_B)``.
    """
    if not (delta > 0.0 and math.isfinite(delta)):
        raise InvalidStep(f"delta={delta} must be > 0")
    p_arr = p.array if isinstance(p, PreAllocation) else np.asarray(p, dtype=float)
    if instance.n > MAX_BATTLEFIELDS:
        raise TooLarge(f"n={instance.n} battlefields; the grid oracle supports n <= {MAX_BATTLEFIELDS}")
    q = instance.q
    x_max_A = x_max_B = None
    if cap_policy == "kappa" and instance.R_A > 0.0:
        eq = solve_glf(instance, p_arr)
        w = instance.w_array
        x_max_A = float(np.max(q * w * eq.kappa.kappa_B)) + 2 * delta
        x_max_B = float(np.max(w * eq.kappa.kappa_A + p_arr)) / q + 2 * delta
    elif cap_policy not in ("kappa", "budget"):
        raise ValueError(f"unknown cap_policy {cap_policy!r}")
    if x_max_A is None:
        x_max_A = 2.0 * (instance.P + instance.R_A + instance.qRB)
        x_max_B = x_max_A / q
    x_max_A = max(x_max_A, delta)
    x_max_B = max(x_max_B, delta)
    for name, cap in (("A", x_max_A), ("B", x_max_B)):
        count = (int(math.floor(cap / delta + 1e-9)) + 1) ** instance.n
        if count > MAX_STRATEGIES:
            raise TooLarge(f"player {name} would have {count} pure strategies (limit {MAX_STRATEGIES})")
    return DiscretizedGame(instance, p_arr, delta, x_max_A, x_max_B, tie_rule)


def _upper_hull(costs: np.ndarray, utils: np.ndarray) -> list[int]:
    """Indices of the upper concave envelope; ``costs`` strictly increasing."""
    hull: list[int] = []
    for k in range(len(costs)):
        while len(hull) >= 2:
            i, j = hull[-2], hull[-1]
            cross = (costs[j] - costs[i]) * (utils[k] - utils[i]) - (utils[j] - utils[i]) * (costs[k] - costs[i])
            if cross >= 0:
                hull.pop()
            else:
                break
        hull.append(k)
    return hull


def best_response(game: DiscretizedGame, opponent: MixedStrategy, player: str) -> tuple[float, MixedStrategy]:
    """Exact best response of ``player`` under its expected-budget constraint.

    The optimum of a linear objective over budget-feasible mixtures is the
    upper concave envelope of (cost, value) over pure strategies, evaluated at
    the budget; it mixes at most two pure strategies.
    """
    other = "B" if player == "A" else "A"
    per_level = game.win_value(player, game.marginals(other, opponent))
    n, m = per_level.shape
    # joint grid: value and total level by broadcasting
    util = np.zeros((m,) * n)
    total = np.zeros((m,) * n, dtype=np.int64)
    for b in range(n):
        shape = [1] * n
        shape[b] = m
        util = util + per_level[b].reshape(shape)
        total = total + np.arange(m).reshape(shape)
    util = util.ravel()
    total = total.ravel()
    # best strategy for each total level (first index wins ties)
    n_levels = n * (m - 1) + 1
    order = np.lexsort((-util, total))
    first = np.ones(len(order), dtype=bool)
    first[1:] = total[order][1:] != total[order][:-1]
    best_idx = order[first]
    level_ids = total[best_idx]
    assert len(level_ids) == n_levels
    costs = game.delta * level_ids.astype(float)
    values = util[best_idx]

    budget = game.budget(player)
    top = int(np.argmax(values))  # lowest cost among maximizers
    if budget >= costs[top]:
        strat = MixedStrategy({int(best_idx[top]): 1.0}, float(costs[top]))
        return float(values[top]), strat
    hull = _upper_hull(costs, values)
    for a, c in zip(hull[:-1], hull[1:]):
        if costs[a] <= budget <= costs[c]:
            if budget == costs[c]:
                return float(values[c]), MixedStrategy({int(best_idx[c]): 1.0}, float(costs[c]))
            theta = (budget - costs[a]) / (costs[c] - costs[a])
            value = (1 - theta) * values[a] + theta * values[c]
            probs = {int(best_idx[a]): 1.0 - theta}
            if theta > 0:
                probs[int(best_idx[c])] = theta
            exp_cost = (1 - theta) * costs[a] + theta * costs[c]
            return float(value), MixedStrategy(probs, float(exp_cost))
    raise AssertionError("budget not bracketed by the hull")


def _restricted_lp(U: np.ndarray, own_costs: np.ndarray, own_budget: float,
                   opp_costs: np.ndarray, opp_budget: float) -> tuple[float, np.ndarray]:
    """Maximin mixture for the row player of U under both expected-budget limits."""
    k, m = U.shape
    # variables: sigma (k), t, lam
    c = np.zeros(k + 2)
    c[k] = -1.0
    c[k + 1] = opp_budget
    A_ub = np.zeros((m + 1, k + 2))
    A_ub[:m, :k] = -U.T
    A_ub[:m, k] = 1.0
    A_ub[:m, k + 1] = -opp_costs
    A_ub[m, :k] = own_costs
    b_ub = np.zeros(m + 1)
    b_ub[m] = own_budget
    A_eq = np.zeros((1, k + 2))
    A_eq[0, :k] = 1.0
    bounds = [(0, None)] * k + [(None, None), (0, None)]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[1.0], bounds=bounds, method="highs")
    if res.status != 0:
        raise RuntimeError(f"restricted LP failed: {res.message}")
    sigma = np.clip(res.x[:k], 0.0, None)
    sigma /= sigma.sum()
    return -res.fun, sigma


def _as_mixed(game: DiscretizedGame, player: str, support: list[int], sigma: np.ndarray) -> MixedStrategy:
    probs: dict[int, float] = {}
    for idx, pr in zip(support, sigma):
        if pr > 1e-15:
            probs[idx] = probs.get(idx, 0.0) + float(pr)
    total = sum(probs.values())
    probs = {k: v / total for k, v in probs.items()}
    cost = float(sum(pr * game.cost(player, idx) for idx, pr in probs.items()))
    budget = game.budget(player)
    if cost > budget:
        # LP round-off: shift the excess onto the zero allocation
        scale = budget / cost
        probs = {k: v * scale for k, v in probs.items()}
        probs[0] = probs.get(0, 0.0) + (1.0 - scale)
        cost = budget
    return MixedStrategy(probs, cost)


def solve_saddle(game: DiscretizedGame, epsilon: float | None = None, max_iters: int = 500,
                 seed: int = 0) -> SaddleCertificate:
    """Approximate equilibrium of the grid game with a duality-gap certificate.

    ``epsilon`` defaults to ``0.005 W``.  When the gap target is not met
    within ``max_iters`` the best certificate seen is returned with
    ``converged=False``.
    """
    W = game.instance.W
    if epsilon is None:
        epsilon = 0.005 * W
    if not epsilon > 0:
        raise ValueError("epsilon must be > 0")
    rng = np.random.default_rng(seed)
    supports = {"A": [0], "B": [0]}
    for player in ("A", "B"):
        extra = rng.integers(0, game.num_strategies(player), size=2)
        for idx in extra:
            if game.cost(player, int(idx)) <= game.budget(player) * 2 + game.delta:
                supports[player].append(int(idx))
        supports[player] = sorted(set(supports[player]))

    best: SaddleCertificate | None = None
    for it in range(1, max_iters + 1):
        sA, sB = supports["A"], supports["B"]
        U = game.pure_matrix(sA, sB)
        cA = game.cost("A", sA)
        cB = game.cost("B", sB)
        _, sigA = _restricted_lp(U, cA, game.budget("A"), cB, game.budget("B"))
        _, sigB = _restricted_lp(W - U.T, cB, game.budget("B"), cA, game.budget("A"))
        sigma_A = _as_mixed(game, "A", sA, sigA)
        sigma_B = _as_mixed(game, "B", sB, sigB)
        br_A, resp_A = best_response(game, sigma_B, "A")
        br_B, resp_B = best_response(game, sigma_A, "B")
        gap = br_A + br_B - W
        value = game.payoff(sigma_A, sigma_B)
        cert = SaddleCertificate(value, sigma_A, sigma_B, br_A, br_B, max(gap, 0.0), it, gap <= epsilon)
        if best is None or cert.gap < best.gap:
            best = cert
        if gap <= epsilon:
            return cert
        grown = False
        for player, resp in (("A", resp_A), ("B", resp_B)):
            current = set(supports[player])
            new = [k for k in resp.probs if k not in current]
            if new:
                supports[player] = sorted(current.union(new))
                grown = True
        if not grown:
            # best responses already in the support: the gap is LP round-off
            break
    log.warning("saddle search stopped at gap %.3g after %d iterations", best.gap, max_iters)
    return best
