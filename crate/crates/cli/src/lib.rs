//! Batch verification front-end for `qnk-core`.
//!
//! A run expands a [`SuiteConfig`] into checks over `(n, k, eta, tau, M)`,
//! evaluates them in parallel and assembles a JSON [`Report`] whose record
//! order depends only on the configuration and seed.

pub mod config;
pub mod report;
pub mod suites;

pub use config::{Args, ConfigError, Suite, SuiteConfig};
pub use report::{Metric, Record, Report, Summary};
pub use suites::run;

/// Process exit codes.
pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
