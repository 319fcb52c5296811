//! Heaviest-bin statistics of the Polya urn.
//!
//! Start with `d` bins holding one ball each and add balls one at a time,
//! choosing bin `k` with probability proportional to `count_k^gamma`. At the
//! critical exponent `gamma = 1` the fraction of balls held by the heaviest
//! bin has a nondegenerate limit law. This crate provides:
//!
//! * [`moments`]: every limiting moment of that fraction as an exact
//!   rational, via three independent recurrences, plus the closed-form mean
//!   and second moment.
//! * [`simplex`]: exact finite-`n` ground truth built on the uniform law of
//!   the urn over the discrete simplex.
//! * [`sim`]: a reproducible, parallel Monte Carlo sampler for any
//!   `gamma >= 0`.
//! * [`verify`]: the batched consistency checks behind `heaviest-urn verify`.

pub mod error;
pub mod fenwick;
pub mod format;
pub mod moments;
pub mod quadrature;
pub mod sim;
pub mod simplex;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
pub use moments::{
    coefficient_of_variation, harmonic, limiting_moment, mean_bounds, mean_fraction,
    moment_table, second_moment, MomentTable, Rational, Recurrence, TableLimits,
};
pub use sim::{
    heaviest_fraction, quantile, regime_probe, run_single, simulate_batch, RegimeSummary,
    SampleSummary, SimConfig, UrnState, GENERATOR_ID,
};
pub use simplex::{
    beta_integral, enumerate_simplex, exact_finite_moment, exact_state_distribution,
    partition_finite_moment, partition_identity_check, simplex_cardinality, t_cardinality,
    ExactDistribution, SimplexSpec, TBlockSpec, DEFAULT_ENUMERATION_CAP,
};
