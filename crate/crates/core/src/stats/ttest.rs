use serde::Serialize;

use super::{
    check_alpha, mean_sd, student_t_cdf, student_t_inverse, Relation, Result, StatsError,
    TestOutcome,
};

/// One-sample t statistic `(mean - mu) / (s / sqrt(n))`.
pub fn t_one_sample(sample: &[f64], mu: f64) -> Result<f64> {
    if sample.len() < 2 {
        return Err(StatsError::SampleTooSmall(2));
    }
    let (mean, sd) = mean_sd(sample);
    if !(sd > 0.0) {
        return Err(StatsError::DegenerateSample);
    }
    Ok((mean - mu) / (sd / (sample.len() as f64).sqrt()))
}

/// Two-sample t statistic with pooled variance and its degrees of freedom.
pub fn t_two_sample_pooled(s1: &[f64], s2: &[f64]) -> Result<(f64, u32)> {
    if s1.is_empty() || s2.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let (n1, n2) = (s1.len(), s2.len());
    if n1 + n2 < 3 {
        return Err(StatsError::SampleTooSmall(3));
    }
    let m1 = s1.iter().sum::<f64>() / n1 as f64;
    let m2 = s2.iter().sum::<f64>() / n2 as f64;
    let ss: f64 = s1.iter().map(|x| (x - m1).powi(2)).sum::<f64>()
        + s2.iter().map(|x| (x - m2).powi(2)).sum::<f64>();
    let dof = (n1 + n2 - 2) as u32;
    let pooled = ss / dof as f64;
    if !(pooled > 0.0) {
        return Err(StatsError::DegenerateSample);
    }
    let t = (m1 - m2) / (pooled * (1.0 / n1 as f64 + 1.0 / n2 as f64)).sqrt();
    Ok((t, dof))
}

/// p-value of a t statistic for the null hypothesis selected by `w`.
///
/// `Le` tests `H0: mean <= mu` (rejected for large `t`), `Ge` tests
/// `H0: mean >= mu`, `Eq`/`Ne` use the two-tailed p-value.
fn t_p_value(dof: u32, t: f64, w: Relation) -> Result<f64> {
    let lower = student_t_cdf(dof, t)?;
    let upper = student_t_cdf(dof, -t)?;
    Ok(match w {
        Relation::Le => upper,
        Relation::Ge => lower,
        Relation::Eq | Relation::Ne => (2.0 * lower.min(upper)).min(1.0),
    })
}

/// One-sample t-test outcome. For `Ne` the two-tailed outcome is returned;
/// callers negate it.
pub fn ttest_one_sample_verdict(
    sample: &[f64],
    mu: f64,
    alpha: f64,
    w: Relation,
) -> Result<TestOutcome> {
    check_alpha(alpha)?;
    let t = t_one_sample(sample, mu)?;
    let p = t_p_value(sample.len() as u32 - 1, t, w)?;
    Ok(TestOutcome::new(t, p, alpha))
}

/// Pooled two-sample t-test outcome for the null hypothesis
/// `mean1 w mean2`.
pub fn ttest_two_sample_verdict(
    s1: &[f64],
    s2: &[f64],
    alpha: f64,
    w: Relation,
) -> Result<TestOutcome> {
    check_alpha(alpha)?;
    let (t, dof) = t_two_sample_pooled(s1, s2)?;
    let p = t_p_value(dof, t, w)?;
    Ok(TestOutcome::new(t, p, alpha))
}

/// Set of means not rejected by a one-sample t-test.
///
/// `lower`/`upper` may be infinite for one-sided tests. With `complement`
/// set (relation `Ne`) the admissible means are those *outside*
/// `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanInterval {
    pub lower: f64,
    pub upper: f64,
    pub complement: bool,
}

impl MeanInterval {
    pub fn admits(&self, mu: f64) -> bool {
        let inside = mu >= self.lower && mu <= self.upper;
        inside != self.complement
    }
}

pub fn mean_feasible_interval(sample: &[f64], alpha: f64, w: Relation) -> Result<MeanInterval> {
    check_alpha(alpha)?;
    if sample.len() < 2 {
        return Err(StatsError::SampleTooSmall(2));
    }
    let (mean, sd) = mean_sd(sample);
    if !(sd > 0.0) {
        return Err(StatsError::DegenerateSample);
    }
    let dof = sample.len() as u32 - 1;
    let se = sd / (sample.len() as f64).sqrt();
    let interval = match w {
        Relation::Eq | Relation::Ne => {
            // student_t_inverse(alpha / 2) < 0
            let q = student_t_inverse(dof, alpha / 2.0)?;
            MeanInterval {
                lower: mean + se * q,
                upper: mean - se * q,
                complement: w == Relation::Ne,
            }
        }
        Relation::Le => MeanInterval {
            lower: mean + se * student_t_inverse(dof, alpha)?,
            upper: f64::INFINITY,
            complement: false,
        },
        Relation::Ge => MeanInterval {
            lower: f64::NEG_INFINITY,
            upper: mean - se * student_t_inverse(dof, alpha)?,
            complement: false,
        },
    };
    Ok(interval)
}
