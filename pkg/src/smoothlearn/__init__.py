"""No-regret learning dynamics on multilinear games, with LP-certified
smoothness analysis and equilibrium-quality metrics."""

__version__ = "0.1.0"

from .bayesian import BayesianGame, agent_form, bne_gap
from .dynamics import (
    CgdSchedule,
    OgdState,
    Trajectory,
    cgd_fixed_point,
    ogd_init,
    ogd_play,
    ogd_step,
    run_cgd,
    run_ogd,
    trajectory_to_csv,
)
from .equilibria import EquilibriumSet, bimatrix_nash, poa, pure_nash
from .games import (
    GraphicalGame,
    NormalFormGame,
    PolymatrixGame,
    barman_augment,
    constant_sum_value,
    eliminate_dominated,
    game_operator,
    lipschitz_bound,
    load_game,
    optimal_welfare,
    pure_profile,
    random_game,
    save_game,
    sensitivity,
    social_welfare,
    uniform_profile,
)
from .geometry import diameter, product_diameter, project_simplex, prox
from .lp import LinearProgram, LPSolution, solve
from .metrics import (
    GapReport,
    RegretReport,
    avg_cce_gap,
    best_iterate,
    br_gap,
    diagonal_mass,
    metrics_to_csv,
    ne_gap,
    regrets,
    rvu_audit,
    weak_ne_check,
    welfare_trace,
)
from .smoothness import (
    MintyCertificate,
    SmoothnessCertificate,
    brgap_bound,
    horizon,
    is_smooth,
    minty_certificate,
    rpoa,
    weighted_rpoa,
)

__all__ = [
    "BayesianGame",
    "CgdSchedule",
    "EquilibriumSet",
    "GapReport",
    "GraphicalGame",
    "LinearProgram",
    "LPSolution",
    "MintyCertificate",
    "NormalFormGame",
    "OgdState",
    "PolymatrixGame",
    "RegretReport",
    "SmoothnessCertificate",
    "Trajectory",
    "agent_form",
    "avg_cce_gap",
    "barman_augment",
    "best_iterate",
    "bimatrix_nash",
    "bne_gap",
    "br_gap",
    "brgap_bound",
    "cgd_fixed_point",
    "constant_sum_value",
    "diagonal_mass",
    "diameter",
    "eliminate_dominated",
    "game_operator",
    "horizon",
    "is_smooth",
    "lipschitz_bound",
    "load_game",
    "metrics_to_csv",
    "minty_certificate",
    "ne_gap",
    "ogd_init",
    "ogd_play",
    "ogd_step",
    "optimal_welfare",
    "poa",
    "product_diameter",
    "project_simplex",
    "prox",
    "pure_nash",
    "pure_profile",
    "random_game",
    "regrets",
    "rpoa",
    "run_cgd",
    "run_ogd",
    "rvu_audit",
    "save_game",
    "sensitivity",
    "social_welfare",
    "solve",
    "trajectory_to_csv",
    "uniform_profile",
    "weak_ne_check",
    "weighted_rpoa",
    "welfare_trace",
]
