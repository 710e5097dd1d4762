"""Backward-chaining grounding and neural-symbolic inference toolkit."""

from .logic import (
    ArityConflictError,
    Atom,
    Constant,
    GroundAtom,
    HornClause,
    LogicError,
    Substitution,
    SymbolTable,
    Term,
    Theory,
    Variable,
    apply_substitution,
    atom_from_ground,
    compose,
    ground_tuple,
    herbrand_base_size,
    match_head,
)
from .parsing import ParseError, format_atom, format_clause, format_ground, format_theory, parse_theory
from .facts import FactFormatError, FactStore, intern_triples, load_facts
from .grounding import (
    INF,
    BudgetExceededError,
    GrounderParams,
    GroundingResult,
    GroundingStats,
    GroundRuleInstance,
    ProofTree,
    TruncationEvent,
    full_grounding,
    ground,
    herbrand_universe_size,
    provable_set,
)
from .oracle import enumerate_hu, forward_closure, oracle_ground, oracle_provable
from .gmn import GmnFormatError, GroundedNetwork, build_gmn, export_gmn, gmn_stats, import_gmn
from .reasoner import (
    ScoreError,
    ScoreTable,
    TNORMS,
    initial_scores,
    propagate,
    read_scores,
    tnorm_eval,
    write_scores,
)
from .kge import (
    EmbeddingModel,
    NumericError,
    TrainConfig,
    atom_scorer,
    create_model,
    load_model,
    prob_triple,
    save_model,
    score_triple,
    train,
)
from .evaluation import (
    AblationSplit,
    KgeScorer,
    OverlayScorer,
    RankingReport,
    average_reports,
    build_ablation_split,
    candidate_roots,
    corruption_candidates,
    evaluate,
    rank_query,
)

__version__ = "0.1.0"
