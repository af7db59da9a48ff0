"""Bayesian spatial-voting ideal points from binary roll-call matrices.

The estimation pipeline is: parse a vote matrix (rollcall), fit it with the
Gibbs sampler (sampler) under a probit or logit link (model), then inspect
convergence and fit (diagnostics) and produce tables (summarize). simulate
provides synthetic parliaments and the standard sensitivity scenarios.
"""

from .diagnostics import (
    DegenerateChainWarning,
    InfoCriteria,
    PpcResult,
    PPC_STATISTICS,
    dic,
    effective_sample_size,
    information_criteria,
    pooled_effective_sample_size,
    posterior_predictive_check,
    waic,
)
from .model import (
    ItemParams,
    LinkFunction,
    PriorConfig,
    PriorKind,
    VoteAlternatives,
    alternatives_to_item_params,
    link_eval,
    log_likelihood,
    log_prior,
    sample_votes,
    vote_probability,
)
from .rollcall import (
    MISSING,
    NAY,
    YEA,
    DuplicateIdError,
    EmptyMatrixError,
    LegislatorMeta,
    MissingRates,
    RaggedRowError,
    RollCallError,
    UnknownTokenError,
    VoteMatrix,
    drop_unanimous_motions,
    filter_low_participation,
    missing_rates,
    parse_vote_matrix,
    serialize_vote_matrix,
)
from .sampler import (
    AnchorSpec,
    ChainConfig,
    ChainState,
    IdentificationWarning,
    PosteriorDraws,
    init_state,
    read_draws,
    run_chain,
    run_chains_parallel,
    sample_latent,
    update_hierarchy,
    update_ideal_points,
    update_item_params,
    write_draws,
)
from .simulate import (
    FitSchedule,
    GroupSpec,
    MissingnessWarning,
    ScenarioResult,
    ScenarioSpec,
    SyntheticParliament,
    apply_missingness,
    choose_anchors,
    generate_parliament,
    group_sizes,
    run_scenario,
    scenario_catalog,
)
from .summarize import (
    BlocSummary,
    ParamSummary,
    PivotProbabilities,
    RecoveryMetrics,
    SignificanceReport,
    bloc_summary,
    discrimination_significance,
    ideal_point_significance,
    pivot_probabilities,
    pivot_report,
    posterior_summary,
    recovery_metrics,
    write_summary_table,
)

__version__ = "0.1.0"
