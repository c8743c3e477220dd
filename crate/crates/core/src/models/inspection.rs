use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constraints::{Cumulative, KsOptions, LinearEq, LinearRelation, ParametricKs, Task};
use crate::solver::{Model, ModelError, SearchConfig, Solution, ValueSelect, VarId, VarSelect};
use crate::stats::{ks_one_sample, Exponential, KsTest, NullDistribution, Relation};

/// A positive rational `numerator / denominator`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rate {
    pub numerator: i64,
    pub denominator: u32,
}

impl Rate {
    pub fn to_f64(self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

impl FromStr for Rate {
    type Err = String;

    /// Accepts `p/q` or an integer.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (n, d) = s.split_once('/').unwrap_or((s, "1"));
        let numerator: i64 = n.trim().parse().map_err(|_| format!("bad rate {s:?}"))?;
        let denominator: u32 = d.trim().parse().map_err(|_| format!("bad rate {s:?}"))?;
        if numerator <= 0 || denominator == 0 {
            return Err(format!("rate {s:?} must be positive"));
        }
        Ok(Rate {
            numerator,
            denominator,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InspectionParams {
    pub units: usize,
    pub inspections: usize,
    pub horizon: i64,
    pub duration: i64,
    pub max_gap: i64,
    pub demand: i64,
    pub capacity: i64,
    pub rate: Rate,
    pub alpha: f64,
}

impl Default for InspectionParams {
    fn default() -> Self {
        InspectionParams {
            units: 10,
            inspections: 25,
            horizon: 365,
            duration: 1,
            max_gap: 36,
            demand: 1,
            capacity: 5,
            rate: Rate {
                numerator: 1,
                denominator: 5,
            },
            alpha: 0.1,
        }
    }
}

impl InspectionParams {
    /// Reduced instance: 4 units, 10 inspections, 150 days.
    pub fn scaled() -> Self {
        InspectionParams {
            units: 4,
            inspections: 10,
            horizon: 150,
            max_gap: 15,
            capacity: 2,
            ..Self::default()
        }
    }

    /// Checks every field. A capacity of zero is accepted; it just makes
    /// the model unsatisfiable.
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |msg: &str| Err(ModelError::InvalidConstraint(msg.to_string()));
        if self.units == 0 {
            return bad("at least one unit is required");
        }
        if self.inspections < 2 {
            return bad("at least two inspections per unit are required");
        }
        if self.duration < 1 || self.horizon <= self.duration {
            return bad("horizon must exceed a positive duration");
        }
        if self.max_gap < 0 || self.max_gap >= self.horizon {
            return bad("max gap must lie in [0, horizon)");
        }
        if self.demand < 1 || self.capacity < 0 {
            return bad("demand must be positive and capacity non-negative");
        }
        if self.rate.numerator <= 0 || self.rate.denominator == 0 {
            return Err(ModelError::NonPositiveRate);
        }
        crate::stats::check_alpha(self.alpha)?;
        Ok(())
    }
}

/// Branching strategy for the inspection model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InspectionHeuristic {
    /// Unit by unit, last inspection first, latest day first.
    #[default]
    LatestFirst,
    /// Unit by unit, first inspection first, earliest day first.
    EarliestFirst,
}

#[derive(Debug)]
pub struct InspectionModel {
    pub model: Model,
    pub params: InspectionParams,
    /// `starts[u][k]`, `ends[u][k]`.
    pub starts: Vec<Vec<VarId>>,
    pub ends: Vec<Vec<VarId>>,
    /// `intervals[u][j]` between inspections `j` and `j + 1`.
    pub intervals: Vec<Vec<VarId>>,
}

impl InspectionModel {
    /// Search over the start variables. `seed` shuffles the value order.
    pub fn search_config(&self, heuristic: InspectionHeuristic, seed: Option<u64>) -> SearchConfig {
        let decision: Vec<VarId> = match heuristic {
            InspectionHeuristic::LatestFirst => self
                .starts
                .iter()
                .flat_map(|u| u.iter().rev().copied())
                .collect(),
            InspectionHeuristic::EarliestFirst => self.starts.iter().flatten().copied().collect(),
        };
        let value_select = match (seed, heuristic) {
            (Some(s), _) => ValueSelect::Shuffle(s),
            (None, InspectionHeuristic::LatestFirst) => ValueSelect::Max,
            (None, InspectionHeuristic::EarliestFirst) => ValueSelect::Min,
        };
        SearchConfig {
            var_select: VarSelect::InputOrder,
            value_select,
            decision_vars: Some(decision),
            ..Default::default()
        }
    }

    pub fn plan(&self, s: &Solution) -> InspectionPlan {
        InspectionPlan {
            units: self
                .starts
                .iter()
                .zip(&self.ends)
                .map(|(st, en)| {
                    st.iter()
                        .zip(en)
                        .map(|(&a, &b)| (s.value(a), s.value(b)))
                        .collect()
                })
                .collect(),
        }
    }
}

pub fn build_inspection_model(params: InspectionParams) -> Result<InspectionModel, ModelError> {
    build_inspection_model_with(params, KsOptions::default())
}

pub fn build_inspection_model_with(
    params: InspectionParams,
    options: KsOptions,
) -> Result<InspectionModel, ModelError> {
    params.validate()?;
    let p = &params;
    let mut model = Model::new();
    let rate = model.new_rate_variable(&[p.rate.numerator], p.rate.denominator)?;
    let mut starts = Vec::with_capacity(p.units);
    let mut ends = Vec::with_capacity(p.units);
    let mut intervals = Vec::with_capacity(p.units);
    let mut tasks = Vec::new();
    for _ in 0..p.units {
        let s: Vec<VarId> = (0..p.inspections)
            .map(|_| model.new_variable(1, p.horizon))
            .collect::<Result<_, _>>()?;
        let e: Vec<VarId> = (0..p.inspections)
            .map(|_| model.new_variable(1, p.horizon))
            .collect::<Result<_, _>>()?;
        let gaps: Vec<VarId> = (1..p.inspections)
            .map(|_| model.new_variable(0, p.max_gap))
            .collect::<Result<_, _>>()?;
        for k in 0..p.inspections {
            model.post(LinearEq::difference(e[k], s[k], p.duration))?;
            tasks.push(Task {
                start: s[k],
                duration: p.duration,
                demand: p.demand,
            });
        }
        for j in 1..p.inspections {
            // gap = s[j] - s[j-1] - 1
            model.post(LinearEq::new(
                vec![(1, gaps[j - 1]), (-1, s[j]), (1, s[j - 1])],
                LinearRelation::Eq,
                -1,
            )?)?;
            model.post(LinearEq::at_least(s[j], s[j - 1], 0))?;
        }
        model.post(LinearEq::new(
            vec![(1, e[p.inspections - 1])],
            LinearRelation::Ge,
            p.horizon - p.max_gap,
        )?)?;
        model.post(ParametricKs::exponential(
            gaps.clone(),
            rate,
            p.alpha,
            Relation::Eq,
            options,
        )?)?;
        starts.push(s);
        ends.push(e);
        intervals.push(gaps);
    }
    model.post(Cumulative::new(tasks, p.capacity)?)?;
    Ok(InspectionModel {
        model,
        params,
        starts,
        ends,
        intervals,
    })
}

/// Per unit, the `(start, end)` of each inspection in order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InspectionPlan {
    pub units: Vec<Vec<(i64, i64)>>,
}

impl InspectionPlan {
    /// `start[j + 1] - start[j] - 1` for each unit.
    pub fn intervals(&self) -> Vec<Vec<i64>> {
        self.units
            .iter()
            .map(|u| u.windows(2).map(|w| w[1].0 - w[0].0 - 1).collect())
            .collect()
    }

    /// CSV with header `unit,k,start,end`; units and indices count from 1.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("unit,k,start,end\n");
        for (u, insp) in self.units.iter().enumerate() {
            for (k, (s, e)) in insp.iter().enumerate() {
                out.push_str(&format!("{},{},{s},{e}\n", u + 1, k + 1));
            }
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, String> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some("unit,k,start,end") {
            return Err("missing header unit,k,start,end".into());
        }
        let mut units: Vec<Vec<(i64, i64)>> = Vec::new();
        for (n, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let f: Vec<i64> = line
                .split(',')
                .map(|x| x.trim().parse::<i64>())
                .collect::<Result<_, _>>()
                .map_err(|e| format!("line {}: {e}", n + 2))?;
            let [u, k, s, e] = f[..] else {
                return Err(format!("line {}: expected 4 fields", n + 2));
            };
            if u < 1 || k < 1 {
                return Err(format!("line {}: unit and k count from 1", n + 2));
            }
            let (u, k) = (u as usize - 1, k as usize - 1);
            if units.len() <= u {
                units.resize(u + 1, Vec::new());
            }
            if units[u].len() != k {
                return Err(format!(
                    "line {}: inspections must be listed in order",
                    n + 2
                ));
            }
            units[u].push((s, e));
        }
        Ok(InspectionPlan { units })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    UnitCount {
        expected: usize,
        found: usize,
    },
    InspectionCount {
        unit: usize,
        expected: usize,
        found: usize,
    },
    OutsideHorizon {
        unit: usize,
        k: usize,
        start: i64,
        end: i64,
    },
    Duration {
        unit: usize,
        k: usize,
        start: i64,
        end: i64,
    },
    Order {
        unit: usize,
        k: usize,
    },
    Gap {
        unit: usize,
        j: usize,
        interval: i64,
    },
    LateStart {
        unit: usize,
        end: i64,
        earliest: i64,
    },
    Overload {
        day: i64,
        usage: i64,
    },
    Ks {
        unit: usize,
        statistic: f64,
        p_value: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanCheck {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

/// Validates a plan against every model property, independently of the
/// propagators. All violations are reported.
pub fn check_plan(plan: &InspectionPlan, params: &InspectionParams) -> PlanCheck {
    check_plan_with(plan, params, NullDistribution::default())
}

pub fn check_plan_with(
    plan: &InspectionPlan,
    params: &InspectionParams,
    null: NullDistribution,
) -> PlanCheck {
    let p = params;
    let mut v = Vec::new();
    if plan.units.len() != p.units {
        v.push(Violation::UnitCount {
            expected: p.units,
            found: plan.units.len(),
        });
    }
    let mut usage = std::collections::BTreeMap::<i64, i64>::new();
    for (u, insp) in plan.units.iter().enumerate() {
        let unit = u + 1;
        if insp.len() != p.inspections {
            v.push(Violation::InspectionCount {
                unit,
                expected: p.inspections,
                found: insp.len(),
            });
        }
        for (k, &(start, end)) in insp.iter().enumerate() {
            if start < 1 || end > p.horizon {
                v.push(Violation::OutsideHorizon {
                    unit,
                    k: k + 1,
                    start,
                    end,
                });
            }
            if end - start != p.duration {
                v.push(Violation::Duration {
                    unit,
                    k: k + 1,
                    start,
                    end,
                });
            }
            for day in start..start + p.duration {
                *usage.entry(day).or_default() += p.demand;
            }
        }
        for (j, w) in insp.windows(2).enumerate() {
            if w[1].0 < w[0].0 {
                v.push(Violation::Order { unit, k: j + 2 });
            }
            let interval = w[1].0 - w[0].0 - 1;
            if !(0..=p.max_gap).contains(&interval) {
                v.push(Violation::Gap {
                    unit,
                    j: j + 1,
                    interval,
                });
            }
        }
        if let Some(&(_, end)) = insp.last() {
            if end < p.horizon - p.max_gap {
                v.push(Violation::LateStart {
                    unit,
                    end,
                    earliest: p.horizon - p.max_gap,
                });
            }
        }
        if insp.len() >= 2 {
            let gaps: Vec<f64> = insp
                .windows(2)
                .map(|w| (w[1].0 - w[0].0 - 1) as f64)
                .collect();
            let reference = Exponential::new(p.rate.to_f64()).expect("validated rate");
            let s = ks_one_sample(&gaps, &reference).expect("non-empty");
            let test = KsTest::one_sample(null, gaps.len(), p.alpha).expect("validated alpha");
            if test.rejects(s.d) {
                v.push(Violation::Ks {
                    unit,
                    statistic: s.d,
                    p_value: test.p_value(s.d),
                });
            }
        }
    }
    for (&day, &used) in &usage {
        if used > p.capacity {
            v.push(Violation::Overload { day, usage: used });
        }
    }
    PlanCheck {
        ok: v.is_empty(),
        violations: v,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_parsing() {
        assert_eq!(
            "1/5".parse::<Rate>().unwrap(),
            Rate {
                numerator: 1,
                denominator: 5
            }
        );
        assert_eq!("2".parse::<Rate>().unwrap().to_f64(), 2.0);
        assert!("0/5".parse::<Rate>().is_err());
        assert!("x".parse::<Rate>().is_err());
    }

    #[test]
    fn params_validation() {
        assert!(InspectionParams::default().validate().is_ok());
        let zero_cap = InspectionParams {
            capacity: 0,
            ..Default::default()
        };
        assert!(zero_cap.validate().is_ok());
        let bad = InspectionParams {
            inspections: 1,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = InspectionParams {
            alpha: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    fn uniform_plan(gap: i64, params: &InspectionParams) -> InspectionPlan {
        let n = params.inspections as i64;
        let first = params.horizon - params.duration - (n - 1) * (gap + 1);
        InspectionPlan {
            units: (0..params.units)
                .map(|_| {
                    (0..n)
                        .map(|k| {
                            let s = first + k * (gap + 1);
                            (s, s + params.duration)
                        })
                        .collect()
                })
                .collect(),
        }
    }

    #[test]
    fn constant_gaps_fail_ks_only() {
        let params = InspectionParams {
            units: 1,
            ..Default::default()
        };
        let check = check_plan(&uniform_plan(4, &params), &params);
        assert!(!check.ok);
        assert_eq!(check.violations.len(), 1);
        assert!(matches!(check.violations[0], Violation::Ks { unit: 1, .. }));
    }

    #[test]
    fn all_violations_are_reported() {
        let params = InspectionParams {
            units: 6,
            ..Default::default()
        };
        let mut plan = uniform_plan(4, &params);
        let last = plan.units[0].len() - 1;
        plan.units[0][last].1 += 1;
        let check = check_plan(&plan, &params);
        let overloads = check
            .violations
            .iter()
            .filter(|v| matches!(v, Violation::Overload { .. }))
            .count();
        assert_eq!(overloads, params.inspections);
        assert!(check
            .violations
            .iter()
            .any(|v| matches!(v, Violation::Duration { unit: 1, .. })));
    }

    #[test]
    fn csv_round_trip() {
        let params = InspectionParams::scaled();
        let plan = uniform_plan(3, &params);
        let csv = plan.to_csv();
        assert!(csv.starts_with("unit,k,start,end\n"));
        assert_eq!(csv.lines().count(), 1 + params.units * params.inspections);
        assert_eq!(InspectionPlan::from_csv(&csv).unwrap(), plan);
        assert!(InspectionPlan::from_csv("a,b\n").is_err());
    }
}
