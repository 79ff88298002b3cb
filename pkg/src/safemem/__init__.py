"""Memory requirements of safety objectives.

A safety objective, given as a deterministic automaton with a sink, needs
exactly as many memory states as the width of its poset of residuals
(ordered by inclusion). This package computes that poset, its width with a
Dilworth certificate, width-bounded winning strategies on finite arenas,
and games showing the bound is tight.
"""

__version__ = "0.1.0"

from safemem.errors import (
    BudgetExceeded,
    EmptyObjectiveError,
    InputError,
    MalformedStrategyError,
    NotWinningError,
    SafememError,
)
from safemem.games import (
    MealyStrategy,
    MemoryStructure,
    ProductGame,
    Verification,
    build_residual_product,
    reachable_configurations,
    refine_once,
    solve_safety,
    verify_strategy,
    winning_pairs,
)
from safemem.generators import (
    LowerBoundGame,
    gen_counter,
    gen_energy,
    gen_figure1,
    gen_generalized_safety,
    gen_lower_bound_game,
    gen_outbidding,
)
from safemem.model import (
    NEUTRAL,
    Alphabet,
    Arena,
    Edge,
    Lasso,
    Owner,
    Play,
    SafetyAutomaton,
    ValidationReport,
    Vertex,
    eval_lasso,
    reachable_states,
    run_word,
    validate_arena,
    validate_automaton,
    words,
)
from safemem.residuals import (
    Inclusion,
    ResidualPoset,
    WidthCertificate,
    build_poset,
    inclusion_matrix,
    live_states,
    minimize,
    poset_width,
    residual_included,
    width_bruteforce,
)
from safemem.synthesis import (
    SynthesisResult,
    find_strategy_bruteforce,
    minimal_memory_bruteforce,
    synthesize_chain_cover,
    synthesize_min_residual,
)

__all__ = [
    "__version__",
    "BudgetExceeded",
    "EmptyObjectiveError",
    "InputError",
    "MalformedStrategyError",
    "NotWinningError",
    "SafememError",
    "MealyStrategy",
    "MemoryStructure",
    "ProductGame",
    "Verification",
    "build_residual_product",
    "reachable_configurations",
    "refine_once",
    "solve_safety",
    "verify_strategy",
    "winning_pairs",
    "LowerBoundGame",
    "gen_counter",
    "gen_energy",
    "gen_figure1",
    "gen_generalized_safety",
    "gen_lower_bound_game",
    "gen_outbidding",
    "NEUTRAL",
    "Alphabet",
    "Arena",
    "Edge",
    "Lasso",
    "Owner",
    "Play",
    "SafetyAutomaton",
    "ValidationReport",
    "Vertex",
    "eval_lasso",
    "reachable_states",
    "run_word",
    "validate_arena",
    "validate_automaton",
    "words",
    "Inclusion",
    "ResidualPoset",
    "WidthCertificate",
    "build_poset",
    "inclusion_matrix",
    "live_states",
    "minimize",
    "poset_width",
    "residual_included",
    "width_bruteforce",
    "SynthesisResult",
    "find_strategy_bruteforce",
    "minimal_memory_bruteforce",
    "synthesize_chain_cover",
    "synthesize_min_residual",
]
