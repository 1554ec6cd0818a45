//! Canonical (fixed-N) Gibbs point processes on periodic windows: exact and
//! Markov-chain samplers, coupling constructions, combinatorial diagnostics
//! and Monte-Carlo estimators for free energies and score tails.
//!
//! The window is the centered cube `W_n = [-w_n/2, w_n/2)^d` with side
//! `w_n = (n/λ)^{1/d}`, so that `|W_n| = n/λ`. All interactions and scores are
//! evaluated on the periodized configuration, i.e. with wraparound distances,
//! unless an explicit boundary condition is selected.
//!
//! Start with [`TorusWindow`] and [`Configuration`], pick an
//! [`InteractionModel`], and sample with [`sample_binomial`] or
//! [`mcmc_canonical`]. The `gibbs-ldp` binary exposes the same machinery as
//! reproducible, seeded experiments.

pub mod cli;
mod coupling;
mod diagnostics;
mod energy;
mod errors;
mod estimation;
mod hamiltonian;
mod interaction;
mod rng;
mod sampling;
mod score;
mod torus;

pub use coupling::{
    build_resample_coupling, build_thin_sprinkle, detect_event_e_delete, detect_event_e_move,
    resample_coupling_conditioned, thin_sprinkle_with_base, MoveEventReport, ResampleCoupling,
    ThinSprinkleCoupling,
};
pub use diagnostics::{
    a_r_eps, binomial_tail_bound, boundary_count, boundary_fraction, count_b_dense,
    derive_r_constants, hc_violations, move_event_log_bound, p_eps, sparse_cubes,
    stirling_log_prob, stirling_normalized, trajectory_bound_check, ClauseOutcome, DenseReport,
    DiagnosticsRecord, HcViolationReport, LocalStatistic, RConstants, SparseCubeSet,
    TrajectoryCheck,
};
pub use energy::Energy;
pub use errors::Error;
pub use estimation::{
    chebyshev_lobatto_grid, convergence_profile, estimate_log_partition_naive,
    estimate_log_partition_ti, estimate_tail_logprob, hamiltonian_variant_gap, ConvergenceProfile,
    Estimate, GapSummary, PartitionEstimate, ProfileTask, TailDirection, TailSampler,
};
pub use hamiltonian::{hamiltonian, BoundaryCondition, HamiltonianSpec};
pub use interaction::{eval_interaction, InteractionKind, InteractionModel, TuplePotential};
pub use rng::RngStream;
pub use sampling::{
    hard_core_feasible_start, mcmc_canonical, sample_binomial, sample_poisson, CanonicalChain,
    McmcConfig,
};
pub use score::{empirical_field_apply, pair_count_sr, score_average, ScoreKind, ScoreModel};
pub use torus::{
    periodic_ball_points, periodic_cube_count, torus_distance, unit_ball_volume, CellIndex,
    Configuration, LocalView, TorusWindow,
};

pub type Result<T> = std::result::Result<T, Error>;

#[cfg(doctest)]
mod book;
