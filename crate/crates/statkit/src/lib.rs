//! Statistics kernel for inter-rater agreement pipelines.
//!
//! Everything here is implemented from first principles on top of a small
//! special-function substrate (regularized incomplete gamma/beta) and a
//! seed-deterministic PRNG, so results reproduce bit-for-bit across runs
//! and thread counts.

pub mod bootstrap;
pub mod describe;
pub mod dist;
pub mod friedman;
pub mod icc;
pub mod levene;
pub mod prng;
pub mod shapiro;
pub mod special;

mod error;
mod result;

pub use bootstrap::{bootstrap_diff_pvalue, bootstrap_mean_sd, BootstrapEstimate};
pub use describe::{mean, mean_absolute_deviation, rms_difference, sample_sd, RmsSummary};
pub use error::StatError;
pub use friedman::{bonferroni, conover_posthoc, friedman, PosthocMatrix};
pub use icc::{icc, IccResult, IccVariant, MeanSquares};
pub use levene::{levene, LeveneCenter};
pub use prng::Rng;
pub use result::TestResult;
pub use shapiro::shapiro_wilk;
