//! Propagators: statistical constraints plus the arithmetic and resource
//! constraints used by the built-in models.

mod cumulative;
mod ks_nonparametric;
mod ks_parametric;
mod ks_rule;
mod linear;
mod ttest;

pub use cumulative::{Cumulative, Task};
pub use ks_nonparametric::{
    check_ground_ks_nonparametric, check_ground_ks_nonparametric_with, NonParametricKs,
};
pub use ks_parametric::{
    check_ground_ks_parametric, check_ground_ks_parametric_with, ParametricKs,
};
pub use ks_rule::{EqMode, KsOptions};
pub use linear::{LinearEq, LinearRelation};
pub use ttest::{check_ground_ttest, check_ground_ttest_two_sample, TTest, TTestTwoSample};
