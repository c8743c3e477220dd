use std::fmt::Debug;

use super::{Result, StatsError};

/// A cumulative distribution function used as the reference of a KS test.
pub trait Cdf {
    fn cdf(&self, x: f64) -> f64;

    /// Left limit `F(x-)`. Continuous distributions keep the default.
    fn cdf_left(&self, x: f64) -> f64 {
        self.cdf(x)
    }
}

impl<F: Fn(f64) -> f64> Cdf for F {
    fn cdf(&self, x: f64) -> f64 {
        self(x)
    }
}

/// Exponential distribution with the given rate (mean `1 / rate`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponential {
    rate: f64,
}

impl Exponential {
    pub fn new(rate: f64) -> Result<Self> {
        if rate > 0.0 && rate.is_finite() {
            Ok(Exponential { rate })
        } else {
            Err(StatsError::InvalidRate(rate))
        }
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }
}

impl Cdf for Exponential {
    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            -(-self.rate * x).exp_m1()
        }
    }
}

pub fn exponential_cdf(rate: f64, x: f64) -> Result<f64> {
    Ok(Exponential::new(rate)?.cdf(x))
}

/// A one-parameter family of continuous distributions `F_theta`.
///
/// The parametric KS propagator needs to know in which direction the CDF
/// moves with the parameter to pick favourable completions.
pub trait ParametricFamily: Debug + Send + Sync {
    fn name(&self) -> &'static str;

    fn cdf(&self, param: f64, x: f64) -> f64;

    /// `true` when `F_theta(x)` is nondecreasing in `theta` for every `x`.
    fn cdf_increasing_in_param(&self) -> bool;
}

/// The exponential family parameterised by its rate.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExponentialFamily;

impl ParametricFamily for ExponentialFamily {
    fn name(&self) -> &'static str {
        "exponential"
    }

    fn cdf(&self, rate: f64, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            -(-rate * x).exp_m1()
        }
    }

    fn cdf_increasing_in_param(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_values() {
        assert_eq!(exponential_cdf(0.2, 0.0).unwrap(), 0.0);
        assert_eq!(exponential_cdf(0.2, -1.0).unwrap(), 0.0);
        let v = exponential_cdf(0.2, 5.0).unwrap();
        assert!((v - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert!((v - 0.632_12).abs() < 1e-5);
    }

    #[test]
    fn rejects_non_positive_rate() {
        assert_eq!(exponential_cdf(0.0, 1.0), Err(StatsError::InvalidRate(0.0)));
        assert!(Exponential::new(-2.0).is_err());
    }
}
