"""Quitting games: exact payoffs, epsilon-equilibrium and perfectness certificates,
the one-player perturbation, and a Monte-Carlo cross-check."""
from .errors import (
    AssumptionViolated,
    BadCoalition,
    BadEpsilon,
    BadLambda,
    BadPlayerCount,
    BadProfile,
    BadVectorLength,
    ConvergenceFailure,
    MissingCoalition,
    NoEquilibriumFound,
    NonFiniteEntry,
    NoQualifyingPlayer,
    NotEtaPerfect,
    QuittingGameError,
    TooManyPlayers,
)
from .game import (
    EventuallyCyclicProfile,
    OneStepGame,
    QuittingGame,
    check_profile,
    coalition_key,
    coalition_mask,
    coalition_members,
    load_game,
    load_profile,
    subgame_profile,
    validate_game,
)
from .montecarlo import SimulationSummary, simulate
from .one_step import (
    EquilibriumCertificate,
    GameConstants,
    PerfectnessReport,
    Support,
    convert_certificates,
    equilibrium_certificate,
    game_constants,
    one_step_payoff,
    payoff_with_pure_action,
    perfectness_report,
)
from .perturbation import PerturbationReport, perturb, theorem1_report
from .probability import (
    CoalitionDistribution,
    coalition_distribution,
    rho,
    rho_decompose,
)
from .repeated import (
    DeviationResult,
    RepeatedPayoffResult,
    best_response,
    equilibrium_certificate_repeated,
    repeated_payoff,
    subgame_certificate,
    truncated_payoff,
)
from .solver import (
    PsiMembershipCertificate,
    construct_psi_member,
    find_one_step_equilibrium,
    select_player_m,
    verify_psi_certificate,
)

__version__ = "0.1.0"

__all__ = [
    "AssumptionViolated",
    "BadCoalition",
    "BadEpsilon",
    "BadLambda",
    "BadPlayerCount",
    "BadProfile",
    "BadVectorLength",
    "CoalitionDistribution",
    "ConvergenceFailure",
    "DeviationResult",
    "EquilibriumCertificate",
    "EventuallyCyclicProfile",
    "GameConstants",
    "MissingCoalition",
    "NoEquilibriumFound",
    "NoQualifyingPlayer",
    "NonFiniteEntry",
    "NotEtaPerfect",
    "OneStepGame",
    "PerfectnessReport",
    "PerturbationReport",
    "PsiMembershipCertificate",
    "QuittingGame",
    "QuittingGameError",
    "RepeatedPayoffResult",
    "SimulationSummary",
    "Support",
    "TooManyPlayers",
    "best_response",
    "check_profile",
    "coalition_distribution",
    "coalition_key",
    "coalition_mask",
    "coalition_members",
    "construct_psi_member",
    "convert_certificates",
    "equilibrium_certificate",
    "equilibrium_certificate_repeated",
    "find_one_step_equilibrium",
    "game_constants",
    "load_game",
    "load_profile",
    "one_step_payoff",
    "payoff_with_pure_action",
    "perfectness_report",
    "perturb",
    "repeated_payoff",
    "rho",
    "rho_decompose",
    "select_player_m",
    "simulate",
    "subgame_certificate",
    "subgame_profile",
    "theorem1_report",
    "truncated_payoff",
    "validate_game",
    "verify_psi_certificate",
]
