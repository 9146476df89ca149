//! Reference values used by the acceptance suite in `tests/acceptance.rs`.
//!
//! The suite lives in its own package so that `cargo test --workspace` runs
//! it after every other test target: a failing criterion then cannot stop the
//! remaining targets from running.

pub mod published;

pub use published::PublishedRow;
