use super::special::regularized_incomplete_beta;
use super::{Result, StatsError};

/// CDF of Student's t distribution with `dof` degrees of freedom.
pub fn student_t_cdf(dof: u32, t: f64) -> Result<f64> {
    if dof < 1 {
        return Err(StatsError::InvalidDof);
    }
    if t.is_infinite() {
        return Ok(if t > 0.0 { 1.0 } else { 0.0 });
    }
    let nu = dof as f64;
    let x = nu / (nu + t * t);
    let tail = 0.5 * regularized_incomplete_beta(x, 0.5 * nu, 0.5);
    Ok(if t >= 0.0 { 1.0 - tail } else { tail })
}

/// Quantile function of Student's t distribution.
pub fn student_t_inverse(dof: u32, p: f64) -> Result<f64> {
    if dof < 1 {
        return Err(StatsError::InvalidDof);
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(StatsError::InvalidProbability(p));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    let cdf = |t: f64| student_t_cdf(dof, t).expect("dof checked above");
    let (mut lo, mut hi) = (-1.0, 1.0);
    while cdf(lo) > p {
        lo *= 2.0;
    }
    while cdf(hi) < p {
        hi *= 2.0;
    }
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(if (cdf(lo) - p).abs() < (cdf(hi) - p).abs() {
        lo
    } else {
        hi
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centre_and_cauchy() {
        assert_eq!(student_t_cdf(9, 0.0).unwrap(), 0.5);
        // dof = 1 is Cauchy: F(t) = 1/2 + atan(t)/pi.
        for &t in &[-3.0, -0.5, 1.0, 4.0] {
            let exact = 0.5 + f64::atan(t) / std::f64::consts::PI;
            assert!((student_t_cdf(1, t).unwrap() - exact).abs() < 1e-13);
        }
        assert!((student_t_cdf(1, 1.0).unwrap() - 0.75).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert_eq!(student_t_cdf(0, 1.0), Err(StatsError::InvalidDof));
        assert!(student_t_inverse(5, 0.0).is_err());
        assert!(student_t_inverse(5, 1.0).is_err());
    }

    #[test]
    fn known_quantiles() {
        let q = student_t_inverse(9, 0.025).unwrap();
        assert!((q + 2.262_157_162_854_099_7).abs() < 1e-9);
        assert_eq!(student_t_inverse(9, 0.5).unwrap(), 0.0);
        let p = student_t_cdf(9, -2.2622).unwrap();
        assert!((p - 0.024_998_249_658_255_67).abs() < 1e-10);
    }

    #[test]
    fn symmetry() {
        for dof in [1, 2, 5, 9, 30, 200] {
            for &t in &[0.1, 0.7, 2.0, 6.5] {
                let s = student_t_cdf(dof, t).unwrap() + student_t_cdf(dof, -t).unwrap();
                assert!((s - 1.0).abs() < 1e-12);
            }
        }
    }
}
