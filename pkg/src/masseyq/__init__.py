"""Massey product predicates for finitely presented pro-p groups, via
unipotent lifting towers, with the supporting tame arithmetic over Q."""

from .arithq import (
    OO,
    CharacterQ,
    DomainError,
    GoverningBasis,
    GrasMunnierResult,
    LocalDatum,
    ModulusTooLarge,
    NoAuxiliaryPrime,
    PrescribedCharacter,
    character_with_local_data,
    cup_vanishes_p2,
    dirichlet_oracle,
    find_aux_prime,
    global_cup_vanishes,
    governing_basis,
    gras_munnier,
    hilbert_symbol,
    local_restriction,
    pr_lift_required,
    res_index,
    shafarevich_trivializing_set,
    symbol_ledger,
    symbol_places,
    unit_kummer_basis,
    v_p,
)
from .lifting import (
    DEFAULT_NODE_BUDGET,
    CharTuple,
    LiftResult,
    LiftState,
    Outcome,
    StrongMasseyResult,
    Verdict,
    character_space,
    cup_condition,
    decide,
    enumerate_lifts,
    evaluate_word,
    lift_tower,
    strong_massey_check,
    validate_witness,
)
from .presentation import (
    NcSeries,
    ParseError,
    Presentation,
    Word,
    epsilon,
    magnus_expand,
    magnus_representation,
    obstruction_on_relator,
    parse_presentation,
    parse_word_tokens,
    vogel_check,
    word_commutator,
    zassenhaus_depth,
)
from .unipotent import (
    INFINITE_DEPTH,
    DimensionMismatch,
    FiltrationLevel,
    LocalPlan,
    PlanInvalid,
    UniMatrix,
    Unsupported,
    abelian_plan,
    apply_letters,
    block_plan,
    commutator,
    compose,
    enumerate_group,
    exponent_by_enumeration,
    filtration_depth,
    group_exponent,
    near_diagonal,
    order,
    reduce_mod_level,
    sr_plan,
    trivial_plan,
)

__version__ = "0.1.0"

__all__ = [
    "OO",
    "CharacterQ",
    "DomainError",
    "GoverningBasis",
    "GrasMunnierResult",
    "LocalDatum",
    "ModulusTooLarge",
    "NoAuxiliaryPrime",
    "PrescribedCharacter",
    "character_with_local_data",
    "cup_vanishes_p2",
    "dirichlet_oracle",
    "find_aux_prime",
    "global_cup_vanishes",
    "governing_basis",
    "gras_munnier",
    "hilbert_symbol",
    "local_restriction",
    "pr_lift_required",
    "res_index",
    "shafarevich_trivializing_set",
    "symbol_ledger",
    "symbol_places",
    "unit_kummer_basis",
    "v_p",
    "DEFAULT_NODE_BUDGET",
    "CharTuple",
    "LiftResult",
    "LiftState",
    "Outcome",
    "StrongMasseyResult",
    "Verdict",
    "character_space",
    "cup_condition",
    "decide",
    "enumerate_lifts",
    "evaluate_word",
    "lift_tower",
    "strong_massey_check",
    "validate_witness",
    "NcSeries",
    "ParseError",
    "Presentation",
    "Word",
    "epsilon",
    "magnus_expand",
    "magnus_representation",
    "obstruction_on_relator",
    "parse_presentation",
    "parse_word_tokens",
    "vogel_check",
    "word_commutator",
    "zassenhaus_depth",
    "INFINITE_DEPTH",
    "DimensionMismatch",
    "FiltrationLevel",
    "LocalPlan",
    "PlanInvalid",
    "UniMatrix",
    "Unsupported",
    "abelian_plan",
    "apply_letters",
    "block_plan",
    "commutator",
    "compose",
    "enumerate_group",
    "exponent_by_enumeration",
    "filtration_depth",
    "group_exponent",
    "near_diagonal",
    "order",
    "reduce_mod_level",
    "sr_plan",
    "trivial_plan",
]
