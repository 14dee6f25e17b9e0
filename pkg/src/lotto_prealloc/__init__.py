"""Two-stage General Lotto games with pre-allocated resources."""

from .core import (GameInstance, LottoError, Payoff, PreAllocation, make_preallocation,
                   proportional_preallocation, validate_instance, weighted_norm_sq)
from .glf_solver import (GlfEquilibrium, Infeasible, KappaPair, Partition, payoff_from_kappa,
                         soe_residual, solve_glf, solve_partition)
from .closed_form import Regime, RegimeTag, classify_regime, kappa_closed_form, payoff_A
from .analysis import (Investment, LevelPoint, effectiveness_equivalent_P, level_curve, level_RA,
                       optimal_investment)

__all__ = [
    "GameInstance", "LottoError", "Payoff", "PreAllocation", "make_preallocation",
    "proportional_preallocation", "validate_instance", "weighted_norm_sq",
    "GlfEquilibrium", "Infeasible", "KappaPair", "Partition", "payoff_from_kappa",
    "soe_residual", "solve_glf", "solve_partition",
    "Regime", "RegimeTag", "classify_regime", "kappa_closed_form", "payoff_A",
    "Investment", "LevelPoint", "effectiveness_equivalent_P", "level_curve", "level_RA",
    "optimal_investment",
]
