"""Equilibria of two-values games under risk-sensitive valuations.

Subpackages by concern: `games` (matrices, profiles, condensed normal
form, JSON), `valuations` (the one-parameter cost functionals and their
analytic anchors), `equilibrium` (verification, solving, certification,
the 3x3 atlas), `families` (named generators), `theorems` (executable
clause checks and counterexample synthesis), `winpair` (the linear-time
winning-pair machinery), `cli` (the `eqforge` command).
"""

from .games import (
    CondensedNormalGame,
    EqforgeError,
    Game,
    InputError,
    InvariantError,
    MixedStrategy,
    Profile,
    TwoValuesGame,
    expectation,
    from_condensed,
    is_E_equilibrium,
    is_normal,
    pure_equilibria,
    to_condensed,
    x_value,
)
from .valuations import (
    HalfClass,
    OneParamValuation,
    ValuationAnalysis,
    analyze,
    classify_half,
    eval_F,
    is_unimodal,
    x0_of,
    x1_of,
)
from .equilibrium import (
    EquilibriumReport,
    FEquilibrium,
    NonExistenceCertificate,
    atlas_3x3,
    best_response_cost,
    certify_no_F_equilibrium,
    find_F_equilibrium,
    solve_E_support_enumeration,
    three_strategy_F_equilibrium,
    verify_E_equilibrium,
    verify_F_equilibrium,
    verify_general_equilibrium,
    weep_holds,
)
from .families import (
    FamilySpec,
    crawford,
    gen_C,
    gen_D,
    known_equilibrium,
    nis4_fixtures,
    random_normal,
)
from .theorems import (
    TheoremVerdict,
    cm_nonexistence,
    dm_uniqueness,
    evar_ppad_regime,
    panorama,
    synthesize_counterexample,
)
from .winpair import (
    WinPairResult,
    compute_CR,
    find_winning_pair,
    pair_to_profile,
    scan_pair,
    validate_winning_pair,
)

__version__ = "0.1.0"

__all__ = [
    "CondensedNormalGame",
    "EqforgeError",
    "Game",
    "InputError",
    "InvariantError",
    "MixedStrategy",
    "Profile",
    "TwoValuesGame",
    "expectation",
    "from_condensed",
    "is_E_equilibrium",
    "is_normal",
    "pure_equilibria",
    "to_condensed",
    "x_value",
    "HalfClass",
    "OneParamValuation",
    "ValuationAnalysis",
    "analyze",
    "classify_half",
    "eval_F",
    "is_unimodal",
    "x0_of",
    "x1_of",
    "EquilibriumReport",
    "FEquilibrium",
    "NonExistenceCertificate",
    "atlas_3x3",
    "best_response_cost",
    "certify_no_F_equilibrium",
    "find_F_equilibrium",
    "solve_E_support_enumeration",
    "three_strategy_F_equilibrium",
    "verify_E_equilibrium",
    "verify_F_equilibrium",
    "verify_general_equilibrium",
    "weep_holds",
    "FamilySpec",
    "crawford",
    "gen_C",
    "gen_D",
    "known_equilibrium",
    "nis4_fixtures",
    "random_normal",
    "TheoremVerdict",
    "cm_nonexistence",
    "dm_uniqueness",
    "evar_ppad_regime",
    "panorama",
    "synthesize_counterexample",
    "WinPairResult",
    "compute_CR",
    "find_winning_pair",
    "pair_to_profile",
    "scan_pair",
    "validate_winning_pair",
]
