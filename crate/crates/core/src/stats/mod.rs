//! Numerical statistics: distributions, test statistics and verdicts.
//!
//! Everything in here is a pure function of its inputs. The statistical
//! propagators in [`crate::constraints`] and the plot emitters in
//! [`crate::models`] are both built on top of this module.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod distribution;
mod ecdf;
mod kolmogorov;
mod ks;
pub mod special;
mod student_t;
mod ttest;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use distribution::{exponential_cdf, Cdf, Exponential, ExponentialFamily, ParametricFamily};
pub use ecdf::EmpiricalCdf;
pub use kolmogorov::{
    kolmogorov_cdf, kolmogorov_finite_cdf, kolmogorov_finite_inverse, kolmogorov_inverse,
    NullDistribution,
};
pub use ks::{
    confidence_band, ks_one_sample, ks_one_sample_with, ks_two_sample, ks_two_sample_with,
    ks_verdict, KsStatistic, KsTest, SupMode,
};
pub use student_t::{student_t_cdf, student_t_inverse};
pub use ttest::{
    mean_feasible_interval, t_one_sample, t_two_sample_pooled, ttest_one_sample_verdict,
    ttest_two_sample_verdict, MeanInterval,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("sample is empty")]
    EmptySample,
    #[error("sample needs at least {0} values")]
    SampleTooSmall(usize),
    #[error("sample has zero variance")]
    DegenerateSample,
    #[error("significance level {0} is outside (0, 1)")]
    InvalidAlpha(f64),
    #[error("probability {0} is outside the admissible range")]
    InvalidProbability(f64),
    #[error("rate {0} must be positive")]
    InvalidRate(f64),
    #[error("degrees of freedom must be at least 1")]
    InvalidDof,
}

pub type Result<T> = std::result::Result<T, StatsError>;

/// The test direction `w` of a statistical constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Le,
    Ge,
    Eq,
    Ne,
}

impl Relation {
    pub const ALL: [Relation; 4] = [Relation::Le, Relation::Ge, Relation::Eq, Relation::Ne];

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
            Relation::Ne => "!=",
        }
    }
}

impl std::fmt::Display for Relation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.symbol())
    }
}

impl std::str::FromStr for Relation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "le" | "<=" => Ok(Relation::Le),
            "ge" | ">=" => Ok(Relation::Ge),
            "eq" | "=" | "==" => Ok(Relation::Eq),
            "ne" | "!=" => Ok(Relation::Ne),
            other => Err(format!("unknown relation `{other}`")),
        }
    }
}

/// Result of a hypothesis test at a fixed significance level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestOutcome {
    pub statistic: f64,
    pub p_value: f64,
    pub reject: bool,
    pub alpha: f64,
}

impl TestOutcome {
    /// Rejection is strict: `p == alpha` fails to reject.
    pub fn new(statistic: f64, p_value: f64, alpha: f64) -> Self {
        let p_value = p_value.clamp(0.0, 1.0);
        TestOutcome {
            statistic,
            p_value,
            reject: p_value < alpha,
            alpha,
        }
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(StatsError::InvalidAlpha(alpha))
    }
}

pub(crate) fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// Sample mean and (n - 1) standard deviation.
pub(crate) fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|x| (x - mean) * (x - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}
