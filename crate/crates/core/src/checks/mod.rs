//! Verification suites: each check compares a computed quantity with an
//! independent reference and records the measured value against its
//! tolerance. Results depend only on the seed.

mod analytic;
mod fock;
mod matrix;

pub use analytic::finite_difference_gradient;
pub use fock::{ladder_string_oracle, squeezed_moment_formula};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Kernels,
    Fock,
    Berezin,
    Dyson,
    Jellium,
    All,
}

impl Suite {
    pub const EACH: [Suite; 5] = [
        Suite::Kernels,
        Suite::Fock,
        Suite::Berezin,
        Suite::Dyson,
        Suite::Jellium,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Kernels => "kernels",
            Suite::Fock => "fock",
            Suite::Berezin => "berezin",
            Suite::Dyson => "dyson",
            Suite::Jellium => "jellium",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kernels" => Ok(Suite::Kernels),
            "fock" => Ok(Suite::Fock),
            "berezin" => Ok(Suite::Berezin),
            "dyson" => Ok(Suite::Dyson),
            "jellium" => Ok(Suite::Jellium),
            "all" => Ok(Suite::All),
            other => Err(Error::Domain(format!(
                "unknown suite '{other}' (expected kernels, fock, berezin, dyson, jellium or all)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub suite: Suite,
    pub name: String,
    pub passed: bool,
    /// Measured quantity; its meaning is given by `detail`.
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckResult {
    /// Passes when `value ≤ tolerance`.
    pub fn at_most(
        suite: Suite,
        name: &str,
        value: f64,
        tolerance: f64,
        detail: impl Into<String>,
    ) -> Self {
        Self {
            suite,
            name: name.to_string(),
            passed: value <= tolerance,
            value,
            tolerance,
            detail: detail.into(),
        }
    }

    /// Passes when `value ≥ −tolerance`.
    pub fn at_least_minus(
        suite: Suite,
        name: &str,
        value: f64,
        tolerance: f64,
        detail: impl Into<String>,
    ) -> Self {
        Self {
            suite,
            name: name.to_string(),
            passed: value >= -tolerance,
            value,
            tolerance,
            detail: detail.into(),
        }
    }

    pub fn flag(
        suite: Suite,
        name: &str,
        passed: bool,
        value: f64,
        detail: impl Into<String>,
    ) -> Self {
        Self {
            suite,
            name: name.to_string(),
            passed,
            value,
            tolerance: 0.0,
            detail: detail.into(),
        }
    }
}

/// Run one suite, or every suite in a fixed order for [`Suite::All`].
pub fn run_suite(suite: Suite, seed: u64) -> Result<Vec<CheckResult>> {
    match suite {
        Suite::Kernels => analytic::kernels(),
        Suite::Fock => fock::run(seed),
        Suite::Berezin => matrix::berezin(seed),
        Suite::Dyson => analytic::dyson(),
        Suite::Jellium => analytic::jellium(seed),
        Suite::All => {
            let mut out = Vec::new();
            for s in Suite::EACH {
                out.extend(run_suite(s, seed)?);
            }
            Ok(out)
        }
    }
}

pub fn all_passed(results: &[CheckResult]) -> bool {
    results.iter().all(|r| r.passed)
}
