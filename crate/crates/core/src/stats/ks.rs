//! Kolmogorov-Smirnov statistics.
//!
//! Statistics are reported scaled (`sqrt(n) * sup`, or
//! `sqrt(n1 n2 / (n1 + n2)) * sup` for two samples) so that they can be fed
//! straight into [`kolmogorov_cdf`](super::kolmogorov_cdf).

use serde::{Deserialize, Serialize};

use super::{
    check_alpha, kolmogorov_cdf, kolmogorov_inverse, Cdf, EmpiricalCdf, NullDistribution, Result,
    StatsError, TestOutcome,
};

/// How the supremum of the signed CDF deviation is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SupMode {
    /// Exact supremum over the real line. For a continuous reference this
    /// takes left limits into account when measuring `F - F_s`.
    #[default]
    Exact,
    /// Deviations at the sample points only, using right-continuous values
    /// on both sides. Under-measures `d-` against a continuous reference.
    Pointwise,
    /// Each deviation compares one CDF's value with the other's left limit,
    /// i.e. the vertical distance between the filled step graphs. Equal to
    /// `Exact` against a continuous reference.
    Envelope,
}

/// Scaled one-sided and two-sided KS statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsStatistic {
    pub d_plus: f64,
    pub d_minus: f64,
    pub d: f64,
    /// Effective sample size used for the scaling.
    pub n_eff: f64,
}

impl KsStatistic {
    fn from_raw(plus: f64, minus: f64, n_eff: f64) -> Self {
        let scale = n_eff.sqrt();
        let d_plus = scale * plus.max(0.0);
        let d_minus = scale * minus.max(0.0);
        KsStatistic {
            d_plus,
            d_minus,
            d: d_plus.max(d_minus),
            n_eff,
        }
    }
}

/// Raw (unscaled) `sup f1 - f2` and `sup f2 - f1` over `points`.
fn raw_deviations(points: &[f64], f1: &impl Cdf, f2: &impl Cdf, mode: SupMode) -> (f64, f64) {
    let mut plus = 0.0_f64;
    let mut minus = 0.0_f64;
    for &x in points {
        let (p, m) = match mode {
            SupMode::Exact => (f1.cdf(x) - f2.cdf(x), f2.cdf_left(x) - f1.cdf_left(x)),
            SupMode::Pointwise => (f1.cdf(x) - f2.cdf(x), f2.cdf(x) - f1.cdf(x)),
            SupMode::Envelope => (f1.cdf(x) - f2.cdf_left(x), f2.cdf(x) - f1.cdf_left(x)),
        };
        plus = plus.max(p);
        minus = minus.max(m);
    }
    (plus, minus)
}

/// One-sample statistics against `target`, with exact sup evaluation.
///
/// `d+` measures `F_s - F` (sample stochastically smaller), `d-` measures
/// `F - F_s`.
pub fn ks_one_sample(sample: &[f64], target: &impl Cdf) -> Result<KsStatistic> {
    ks_one_sample_with(sample, target, SupMode::Exact)
}

/// One-sample statistics with an explicit [`SupMode`].
///
/// The reference may only jump at sample points.
pub fn ks_one_sample_with(sample: &[f64], target: &impl Cdf, mode: SupMode) -> Result<KsStatistic> {
    let ecdf = EmpiricalCdf::new(sample)?;
    let (plus, minus) = raw_deviations(ecdf.support(), &ecdf, target, mode);
    Ok(KsStatistic::from_raw(plus, minus, ecdf.n() as f64))
}

/// Two-sample statistics: `d+` measures `F_s1 - F_s2`, `d-` measures
/// `F_s2 - F_s1`, both over the merged sample.
pub fn ks_two_sample(s1: &[f64], s2: &[f64]) -> Result<KsStatistic> {
    ks_two_sample_with(s1, s2, SupMode::Exact)
}

pub fn ks_two_sample_with(s1: &[f64], s2: &[f64], mode: SupMode) -> Result<KsStatistic> {
    let e1 = EmpiricalCdf::new(s1)?;
    let e2 = EmpiricalCdf::new(s2)?;
    let mut points: Vec<f64> = e1.support().iter().chain(e2.support()).copied().collect();
    points.sort_by(|a, b| a.total_cmp(b));
    points.dedup();
    let (plus, minus) = raw_deviations(&points, &e1, &e2, mode);
    let (n1, n2) = (e1.n() as f64, e2.n() as f64);
    Ok(KsStatistic::from_raw(plus, minus, n1 * n2 / (n1 + n2)))
}

/// Verdict under the asymptotic Kolmogorov distribution:
/// `p = 1 - K(d)`, reject iff `p < alpha`.
pub fn ks_verdict(d_stat: f64, alpha: f64) -> Result<TestOutcome> {
    check_alpha(alpha)?;
    Ok(TestOutcome::new(
        d_stat,
        1.0 - kolmogorov_cdf(d_stat),
        alpha,
    ))
}

/// Half-width `K^{-1}(1 - alpha) / sqrt(n)` of the confidence band around a
/// CDF.
pub fn confidence_band(ecdf: &EmpiricalCdf, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(kolmogorov_inverse(1.0 - alpha)? / (ecdf.n() as f64).sqrt())
}

/// A KS rejection rule for fixed sample size(s) and significance level.
///
/// The critical value is computed once; statistics within `1e-9` of it are
/// decided from the p-value directly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsTest {
    pub null: NullDistribution,
    pub n_eff: f64,
    pub alpha: f64,
    pub critical: f64,
}

impl KsTest {
    pub fn new(null: NullDistribution, n_eff: f64, alpha: f64) -> Result<Self> {
        if !(n_eff > 0.0) {
            return Err(StatsError::EmptySample);
        }
        let critical = null.critical_value(n_eff, alpha)?;
        Ok(KsTest {
            null,
            n_eff,
            alpha,
            critical,
        })
    }

    pub fn one_sample(null: NullDistribution, n: usize, alpha: f64) -> Result<Self> {
        Self::new(null, n as f64, alpha)
    }

    pub fn two_sample(null: NullDistribution, n1: usize, n2: usize, alpha: f64) -> Result<Self> {
        let (a, b) = (n1 as f64, n2 as f64);
        Self::new(null, a * b / (a + b), alpha)
    }

    pub fn p_value(&self, d_scaled: f64) -> f64 {
        self.null.p_value(d_scaled, self.n_eff)
    }

    /// `true` iff `Pr{stat > d | H0} < alpha`.
    pub fn rejects(&self, d_scaled: f64) -> bool {
        if (d_scaled - self.critical).abs() < 1e-9 {
            self.p_value(d_scaled) < self.alpha
        } else {
            d_scaled > self.critical
        }
    }

    pub fn outcome(&self, d_scaled: f64) -> TestOutcome {
        let mut o = TestOutcome::new(d_scaled, self.p_value(d_scaled), self.alpha);
        o.reject = self.rejects(d_scaled);
        o
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::Exponential;

    #[test]
    fn single_value_against_exponential() {
        let exp = Exponential::new(0.2).unwrap();
        let s = ks_one_sample(&[5.0], &exp).unwrap();
        let f5 = 1.0 - (-1.0f64).exp();
        assert!((s.d_plus - (1.0 - f5)).abs() < 1e-12);
        assert!((s.d_minus - f5).abs() < 1e-12);
        assert_eq!(s.d, s.d_minus);
    }

    #[test]
    fn quantile_sample_is_symmetric() {
        let exp = Exponential::new(0.5).unwrap();
        let n = 8;
        let sample: Vec<f64> = (1..=n)
            .map(|i| {
                let p = (i as f64 - 0.5) / n as f64;
                -(1.0 - p).ln() / 0.5
            })
            .collect();
        let s = ks_one_sample(&sample, &exp).unwrap();
        let expected = (n as f64).sqrt() * 0.5 / n as f64;
        assert!((s.d_plus - expected).abs() < 1e-12);
        assert!((s.d_minus - expected).abs() < 1e-12);
    }

    #[test]
    fn pointwise_under_measures_d_minus() {
        let exp = Exponential::new(0.2).unwrap();
        let exact = ks_one_sample_with(&[5.0], &exp, SupMode::Exact).unwrap();
        let pointwise = ks_one_sample_with(&[5.0], &exp, SupMode::Pointwise).unwrap();
        assert_eq!(exact.d_plus, pointwise.d_plus);
        assert_eq!(pointwise.d_minus, 0.0);
        assert!(exact.d_minus > 0.6);
    }

    #[test]
    fn two_sample_examples() {
        let s = ks_two_sample(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(s.d, 0.0);
        let s = ks_two_sample(&[0.0], &[1.0]).unwrap();
        assert!((s.d_plus - 0.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(s.d_minus, 0.0);
        assert_eq!(s.n_eff, 0.5);
    }

    #[test]
    fn envelope_two_sample_counts_jumps() {
        // Identical samples: each jump of one ECDF is compared against the
        // other's left limit.
        let s = ks_two_sample_with(&[1.0, 2.0], &[1.0, 2.0], SupMode::Envelope).unwrap();
        assert!((s.d_plus - 1.0 * 0.5).abs() < 1e-12);
        assert!((s.d_minus - 1.0 * 0.5).abs() < 1e-12);
    }

    #[test]
    fn verdict_boundaries() {
        let o = ks_verdict(0.0, 0.05).unwrap();
        assert_eq!(o.p_value, 1.0);
        assert!(!o.reject);
        let o = ks_verdict(1.358, 0.05).unwrap();
        assert!((o.p_value - 0.05).abs() < 1e-4);
        assert!(!o.reject);
        assert!(ks_verdict(2.0, 0.05).unwrap().reject);
        assert!(ks_verdict(1.0, 1.0).is_err());
        assert!(ks_verdict(1.0, 0.0).is_err());
    }

    #[test]
    fn band_half_width() {
        let e = EmpiricalCdf::new(&(0..24).map(f64::from).collect::<Vec<_>>()).unwrap();
        let w = confidence_band(&e, 0.05).unwrap();
        assert!((w - 1.358_098_639_322_550_5 / 24f64.sqrt()).abs() < 1e-9);
        let mid = confidence_band(&e, 0.5).unwrap();
        let tiny = confidence_band(&e, 0.999_999).unwrap();
        assert!(tiny < mid && mid < w);
        assert!(tiny < 0.06);
        assert!(confidence_band(&e, 1.5).is_err());
    }

    #[test]
    fn ks_test_rule_matches_p_value() {
        let t = KsTest::two_sample(NullDistribution::FiniteSample, 10, 10, 0.05).unwrap();
        assert_eq!(t.n_eff, 5.0);
        // D = 0.6 and 0.5 on the unscaled scale.
        assert!(t.rejects(0.6 * 5f64.sqrt()));
        assert!(!t.rejects(0.5 * 5f64.sqrt()));
        let a = KsTest::two_sample(NullDistribution::Asymptotic, 10, 10, 0.05).unwrap();
        assert!(!a.rejects(0.6 * 5f64.sqrt()));
        assert!(a.rejects(0.7 * 5f64.sqrt()));
    }
}
