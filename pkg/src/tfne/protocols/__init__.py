"""Concrete protocol games, machine registries and strategy filters."""
from . import coinflip, dhr, owp
from .base import (
    CTFNEVerdict,
    FilterOutcome,
    Protocol,
    RunResult,
    check_ctfne_at,
    covering_check,
    empirical_outcome_distribution,
    induced_pure_strategies,
    machine_outcome_distribution,
    run_protocol,
    strategic_representation,
    tractable_set,
)
from .coinflip import build_coinflip_game, coinflip_filter
from .dhr import CorrelatedEquilibriumDecomposition, build_dhr_game, decompose_ce, dhr_filter_p2, recompose
from .owp import build_modified_owp_game, build_owp_game, owp_filter

__all__ = [
    "CTFNEVerdict",
    "CorrelatedEquilibriumDecomposition",
    "FilterOutcome",
    "Protocol",
    "RunResult",
    "build_coinflip_game",
    "build_dhr_game",
    "build_modified_owp_game",
    "build_owp_game",
    "check_ctfne_at",
    "coinflip",
    "coinflip_filter",
    "covering_check",
    "decompose_ce",
    "dhr",
    "dhr_filter_p2",
    "empirical_outcome_distribution",
    "induced_pure_strategies",
    "machine_outcome_distribution",
    "owp",
    "owp_filter",
    "recompose",
    "run_protocol",
    "strategic_representation",
    "tractable_set",
]
