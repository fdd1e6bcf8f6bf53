//! Command-line arguments and their validation into a [`SuiteConfig`].

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use num_complex::Complex64;
use qnk_core::modcore::{check_nk, Sl2z};
use qnk_core::theta::MIN_IM_TAU;
use serde::Serialize;
use thiserror::Error;

use crate::suites::{default_tolerances, CHECK_IDS};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("{field}: {message}")]
    Field { field: &'static str, message: String },
    #[error("{path} line {line}: {message}")]
    MatrixFile { path: String, line: usize, message: String },
}

fn field_err(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Field { field, message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Theta,
    Heisenberg,
    Qybe,
    Modular,
    Algebra,
    All,
}

impl Suite {
    /// The concrete suites this selection expands to, in execution order.
    pub fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Theta, Suite::Heisenberg, Suite::Qybe, Suite::Modular, Suite::Algebra],
            s => vec![s],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.to_possible_value().expect("no skipped variants");
        f.write_str(name.get_name())
    }
}

/// Verification runs over grids of `(n, k, eta, tau, M)`.
#[derive(Debug, Parser)]
#[command(name = "qnk", version, about)]
pub struct Args {
    /// Suite to run.
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,

    /// Pair `n,k` with `n > k >= 1` coprime; repeatable.
    #[arg(long = "nk", value_name = "N,K")]
    pub nk: Vec<String>,

    /// Fixed `tau` as `RE,IM`; repeatable. Sampled per check when absent.
    #[arg(long, value_name = "RE,IM", allow_hyphen_values = true)]
    pub tau: Vec<String>,

    /// Fixed `eta` as `RE,IM`; repeatable. Sampled per check when absent.
    #[arg(long, value_name = "RE,IM", allow_hyphen_values = true)]
    pub eta: Vec<String>,

    /// Seed of the ChaCha8 stream all random parameters are drawn from.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,

    /// Replace the tolerance of one check, `CHECK_ID=VALUE`; repeatable.
    #[arg(long = "tol-override", value_name = "CHECK=VALUE")]
    pub tol_override: Vec<String>,

    /// `random:COUNT:BOUND` or `file:PATH` (one `a b c d` per line, `#` comments).
    #[arg(long, value_name = "SPEC")]
    pub matrices: Option<String>,

    /// Report path; the report goes to stdout when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum MatrixSource {
    /// `S`, `T`, `X`, `Y`, `XY` followed by random draws.
    Default { count: usize, bound: i64 },
    Random { count: usize, bound: i64 },
    File { path: String, entries: Vec<[i128; 4]> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub nk: Vec<(i64, i64)>,
    pub tau: Vec<Complex64>,
    pub eta: Vec<Complex64>,
    pub seed: u64,
    pub tolerances: BTreeMap<&'static str, f64>,
    pub overrides: BTreeMap<&'static str, f64>,
    pub matrices: MatrixSource,
    pub out: Option<PathBuf>,
}

fn parse_complex(field: &'static str, s: &str) -> Result<Complex64, ConfigError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [re, im] = parts[..] else {
        return Err(field_err(field, format!("expected RE,IM, got {s:?}")));
    };
    let num = |x: &str| x.parse::<f64>().map_err(|_| field_err(field, format!("not a number: {x:?}")));
    let z = Complex64::new(num(re)?, num(im)?);
    if !z.is_finite() {
        return Err(field_err(field, format!("non-finite value {s:?}")));
    }
    Ok(z)
}

fn parse_nk(s: &str) -> Result<(i64, i64), ConfigError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [n, k] = parts[..] else {
        return Err(field_err("nk", format!("expected N,K, got {s:?}")));
    };
    let int = |x: &str| x.parse::<i64>().map_err(|_| field_err("nk", format!("not an integer: {x:?}")));
    let (n, k) = (int(n)?, int(k)?);
    check_nk(n, k).map_err(|e| field_err("nk", e.to_string()))?;
    Ok((n, k))
}

fn parse_matrix_line(line: &str) -> Result<[i128; 4], String> {
    let entries: Vec<i128> = line
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<i128>().map_err(|_| format!("not an integer: {t:?}")))
        .collect::<Result<_, _>>()?;
    let [a, b, c, d] = entries[..] else {
        return Err(format!("expected 4 entries, got {}", entries.len()));
    };
    Sl2z::new(a, b, c, d).map_err(|e| e.to_string())?;
    Ok([a, b, c, d])
}

fn parse_matrices(spec: Option<&str>) -> Result<MatrixSource, ConfigError> {
    let Some(spec) = spec else {
        return Ok(MatrixSource::Default { count: 5, bound: 5 });
    };
    if let Some(rest) = spec.strip_prefix("random:") {
        let (count, bound) = rest
            .split_once(':')
            .ok_or_else(|| field_err("matrices", format!("expected random:COUNT:BOUND, got {spec:?}")))?;
        let count = count.parse().map_err(|_| field_err("matrices", format!("bad count {count:?}")))?;
        let bound: i64 = bound.parse().map_err(|_| field_err("matrices", format!("bad bound {bound:?}")))?;
        if bound < 1 {
            return Err(field_err("matrices", "bound must be at least 1"));
        }
        return Ok(MatrixSource::Random { count, bound });
    }
    if let Some(path) = spec.strip_prefix("file:") {
        let text = std::fs::read_to_string(path).map_err(|e| field_err("matrices", format!("{path}: {e}")))?;
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let m = parse_matrix_line(line).map_err(|message| ConfigError::MatrixFile {
                path: path.to_string(),
                line: i + 1,
                message,
            })?;
            entries.push(m);
        }
        if entries.is_empty() {
            return Err(field_err("matrices", format!("{path} contains no matrices")));
        }
        return Ok(MatrixSource::File { path: path.to_string(), entries });
    }
    Err(field_err("matrices", format!("expected random:COUNT:BOUND or file:PATH, got {spec:?}")))
}

fn parse_override(s: &str) -> Result<(&'static str, f64), ConfigError> {
    let (id, value) =
        s.split_once('=').ok_or_else(|| field_err("tol-override", format!("expected CHECK=VALUE, got {s:?}")))?;
    let id = CHECK_IDS
        .iter()
        .copied()
        .find(|known| *known == id.trim())
        .ok_or_else(|| field_err("tol-override", format!("unknown check {id:?}; known: {}", CHECK_IDS.join(", "))))?;
    let value: f64 = value.trim().parse().map_err(|_| field_err("tol-override", format!("bad value {value:?}")))?;
    if !(value.is_finite() && value >= 0.0) {
        return Err(field_err("tol-override", format!("tolerance must be finite and non-negative, got {value}")));
    }
    Ok((id, value))
}

impl SuiteConfig {
    pub fn from_args(args: &Args) -> Result<Self, ConfigError> {
        if args.nk.is_empty() {
            return Err(field_err("nk", "at least one --nk pair is required"));
        }
        let nk = args.nk.iter().map(|s| parse_nk(s)).collect::<Result<Vec<_>, _>>()?;
        let tau = args.tau.iter().map(|s| parse_complex("tau", s)).collect::<Result<Vec<_>, _>>()?;
        if let Some(bad) = tau.iter().find(|t| t.im < MIN_IM_TAU) {
            return Err(field_err("tau", format!("Im(tau) = {} is below {MIN_IM_TAU}", bad.im)));
        }
        let eta = args.eta.iter().map(|s| parse_complex("eta", s)).collect::<Result<Vec<_>, _>>()?;
        let overrides = args.tol_override.iter().map(|s| parse_override(s)).collect::<Result<BTreeMap<_, _>, _>>()?;
        let mut tolerances = default_tolerances();
        tolerances.extend(overrides.iter().map(|(k, v)| (*k, *v)));
        Ok(SuiteConfig {
            suite: args.suite,
            nk,
            tau,
            eta,
            seed: args.seed,
            tolerances,
            overrides,
            matrices: parse_matrices(args.matrices.as_deref())?,
            out: args.out.clone(),
        })
    }

    pub fn tol(&self, check: &str) -> f64 {
        self.tolerances[check]
    }

    /// Distinct `n` values in first-appearance order.
    pub fn levels(&self) -> Vec<i64> {
        let mut out: Vec<i64> = Vec::new();
        for &(n, _) in &self.nk {
            if !out.contains(&n) {
                out.push(n);
            }
        }
        out
    }
}
