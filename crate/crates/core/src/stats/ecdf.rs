use super::{sorted, Cdf, Result, StatsError};

/// Right-continuous empirical CDF `F_s(x) = #{v <= x} / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    /// Distinct sample values, increasing.
    xs: Vec<f64>,
    /// `counts[k] = #{v <= xs[k]}`.
    counts: Vec<usize>,
    n: usize,
}

impl EmpiricalCdf {
    pub fn new(sample: &[f64]) -> Result<Self> {
        if sample.is_empty() {
            return Err(StatsError::EmptySample);
        }
        let s = sorted(sample);
        let mut xs = Vec::new();
        let mut counts = Vec::new();
        for (i, &v) in s.iter().enumerate() {
            if xs.last() == Some(&v) {
                *counts.last_mut().unwrap() = i + 1;
            } else {
                xs.push(v);
                counts.push(i + 1);
            }
        }
        Ok(EmpiricalCdf {
            xs,
            counts,
            n: s.len(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Distinct values paired with `F_s` at each of them.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let n = self.n as f64;
        self.xs
            .iter()
            .zip(&self.counts)
            .map(move |(&x, &c)| (x, c as f64 / n))
    }

    pub fn support(&self) -> &[f64] {
        &self.xs
    }

    fn count_le(&self, x: f64) -> usize {
        let idx = self.xs.partition_point(|&v| v <= x);
        if idx == 0 {
            0
        } else {
            self.counts[idx - 1]
        }
    }

    fn count_lt(&self, x: f64) -> usize {
        let idx = self.xs.partition_point(|&v| v < x);
        if idx == 0 {
            0
        } else {
            self.counts[idx - 1]
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.count_le(x) as f64 / self.n as f64
    }

    pub fn eval_left(&self, x: f64) -> f64 {
        self.count_lt(x) as f64 / self.n as f64
    }
}

impl Cdf for EmpiricalCdf {
    fn cdf(&self, x: f64) -> f64 {
        self.eval(x)
    }

    fn cdf_left(&self, x: f64) -> f64 {
        self.eval_left(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_function_with_ties() {
        let e = EmpiricalCdf::new(&[3.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!(e.n(), 4);
        assert_eq!(e.support(), &[1.0, 2.0, 3.0]);
        assert_eq!(e.eval(0.5), 0.0);
        assert_eq!(e.eval(1.0), 0.25);
        assert_eq!(e.eval(2.5), 0.5);
        assert_eq!(e.eval(3.0), 1.0);
        assert_eq!(e.eval_left(3.0), 0.5);
        assert_eq!(e.eval_left(1.0), 0.0);
        let pts: Vec<_> = e.points().collect();
        assert_eq!(pts, vec![(1.0, 0.25), (2.0, 0.5), (3.0, 1.0)]);
    }

    #[test]
    fn empty_sample_rejected() {
        assert_eq!(EmpiricalCdf::new(&[]), Err(StatsError::EmptySample));
    }
}
