//! Command-line front end for the `wged` estimation library: estimates from
//! data, Monte Carlo studies, verification suites and manifest replay.

// `!(x > 0.0)` rejects NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod suites;

pub use error::{CliError, CliResult};

/// Environment variable that overrides `--seed` when set.
pub const SEED_ENV: &str = "WGED_SEED";

/// `WGED_SEED` if set, otherwise `fallback`.
pub fn resolve_seed(fallback: u64) -> CliResult<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("{} must be an unsigned integer, got {:?}", SEED_ENV, v))),
        Err(_) => Ok(fallback),
    }
}
