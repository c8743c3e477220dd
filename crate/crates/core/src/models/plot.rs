use serde::Serialize;

use crate::stats::{confidence_band, Cdf, EmpiricalCdf, Result};

/// What the empirical CDF of a sample is plotted against.
pub enum PlotReference<'a> {
    Distribution(&'a dyn Cdf),
    Sample(&'a [f64]),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CdfRow {
    pub x: f64,
    pub f_emp: f64,
    pub f_ref: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Number of evenly spaced grid points added for a continuous reference.
const GRID_POINTS: usize = 101;

/// Empirical CDF of `values`, the reference CDF and a confidence band of
/// half-width `K^{-1}(1 - alpha) / sqrt(n)` around the reference, on the
/// merged grid of sample points (plus a regular grid for a continuous
/// reference).
pub fn emit_cdf_plot_data(
    values: &[f64],
    reference: PlotReference<'_>,
    alpha: f64,
) -> Result<Vec<CdfRow>> {
    let emp = EmpiricalCdf::new(values)?;
    let half = confidence_band(&emp, alpha)?;
    let mut xs: Vec<f64> = emp.support().to_vec();
    let other;
    let f_ref: &dyn Fn(f64) -> f64 = match reference {
        PlotReference::Distribution(cdf) => {
            let top = xs.last().copied().unwrap_or(0.0).max(1.0);
            let bottom = xs[0].min(0.0);
            let step = (top - bottom) / (GRID_POINTS - 1) as f64;
            xs.extend((0..GRID_POINTS).map(|i| bottom + i as f64 * step));
            &move |x| cdf.cdf(x)
        }
        PlotReference::Sample(sample) => {
            other = EmpiricalCdf::new(sample)?;
            xs.extend_from_slice(other.support());
            &|x| other.eval(x)
        }
    };
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    Ok(xs
        .into_iter()
        .map(|x| {
            let r = f_ref(x);
            CdfRow {
                x,
                f_emp: emp.eval(x),
                f_ref: r,
                lo: (r - half).clamp(0.0, 1.0),
                hi: (r + half).clamp(0.0, 1.0),
            }
        })
        .collect())
}

/// CSV with header `x,f_emp,f_ref,lo,hi`.
pub fn cdf_rows_to_csv(rows: &[CdfRow]) -> String {
    let mut out = String::from("x,f_emp,f_ref,lo,hi\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.x, r.f_emp, r.f_ref, r.lo, r.hi
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::KS_SETS_O1;
    use crate::stats::Exponential;

    fn within(rows: &[CdfRow]) -> bool {
        rows.iter().all(|r| r.lo <= r.f_emp && r.f_emp <= r.hi)
    }

    #[test]
    fn quantile_grid_hugs_reference() {
        let exp = Exponential::new(0.2).unwrap();
        let n = 20;
        let sample: Vec<f64> = (1..=n)
            .map(|i| -5.0 * (1.0 - (i as f64 - 0.5) / n as f64).ln())
            .collect();
        let rows = emit_cdf_plot_data(&sample, PlotReference::Distribution(&exp), 0.1).unwrap();
        for r in rows.iter().filter(|r| sample.contains(&r.x)) {
            assert!((r.f_emp - r.f_ref).abs() <= 1.0 / n as f64 + 1e-12);
        }
        assert!(within(&rows));
        assert!(rows.windows(2).all(|w| w[0].x < w[1].x));
    }

    #[test]
    fn accepted_sample_stays_in_band() {
        let o1: Vec<f64> = KS_SETS_O1.iter().map(|&v| v as f64).collect();
        let a = [5.0, 5.0, 9.0, 9.0, 9.0, 9.0, 9.0, 9.0, 9.0, 9.0];
        let b = [5.0, 5.0, 9.0, 9.0, 9.0, 9.0, 9.0, 10.0, 10.0, 11.0];
        let rows_a = emit_cdf_plot_data(&a, PlotReference::Sample(&o1), 0.05).unwrap();
        let rows_b = emit_cdf_plot_data(&b, PlotReference::Sample(&o1), 0.05).unwrap();
        assert!(!within(&rows_a));
        assert!(within(&rows_b));
        let csv = cdf_rows_to_csv(&rows_a);
        assert!(csv.starts_with("x,f_emp,f_ref,lo,hi\n"));
        assert_eq!(csv.lines().count(), rows_a.len() + 1);
    }
}
