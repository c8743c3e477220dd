use std::time::{Duration, Instant};

use serde_json::{json, Value};
use statcp::constraints::{check_ground_ttest, KsOptions};
use statcp::models::{
    build_inspection_model_with, build_ks_sets_model, build_ttest_mean_model, cdf_rows_to_csv,
    check_plan_with, emit_cdf_plot_data, enumerate_ks_sets_ground, enumerate_ks_sets_search,
    InspectionParams, InspectionPlan, PlotReference, KS_SETS_O1, TTEST_SAMPLE,
};
use statcp::solver::{
    enumerate, solve, PropagationResult, SearchConfig, SearchStats, SearchStatus, ValueSelect,
};
use statcp::stats::{
    ks_one_sample, ks_two_sample_with, mean_feasible_interval, Exponential, KsTest, Relation,
    SupMode,
};

use crate::args::{Command, Common, InspectArgs, KsSetsArgs, Mode, TtestMeanArgs};
use crate::{CliError, Outcome, Run, RunReport, RunStats};

pub(crate) fn run(cli: &crate::Cli) -> Result<Run, CliError> {
    match &cli.command {
        Command::TtestMean(a) => ttest_mean(a),
        Command::KsSets(a) => ks_sets(a),
        Command::Inspect(a) => inspect(a),
    }
}

fn to_f64(v: &[i64]) -> Vec<f64> {
    v.iter().map(|&x| x as f64).collect()
}

fn stats_of(s: &SearchStats, started: Instant) -> RunStats {
    RunStats {
        nodes: s.nodes,
        failures: s.failures,
        wall_ms: started.elapsed().as_secs_f64() * 1e3,
    }
}

fn no_search(started: Instant) -> RunStats {
    RunStats {
        wall_ms: started.elapsed().as_secs_f64() * 1e3,
        ..Default::default()
    }
}

fn search_config(common: &Common, base: SearchConfig) -> Result<SearchConfig, CliError> {
    let mut config = base;
    if let Some(seed) = common.seed {
        config.value_select = ValueSelect::Shuffle(seed);
    }
    config.node_limit = common.node_limit;
    if let Some(t) = common.time_limit {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::Usage("--time-limit must be positive".into()));
        }
        config.time_limit = Some(Duration::from_secs_f64(t));
    }
    Ok(config)
}

fn status_outcome(status: SearchStatus, found: bool) -> Outcome {
    match (status, found) {
        (SearchStatus::LimitReached(_), false) => Outcome::LimitReached,
        (SearchStatus::LimitReached(statcp::solver::Limit::Solutions), true) => Outcome::Completed,
        (SearchStatus::LimitReached(_), true) => Outcome::LimitReached,
        (SearchStatus::Complete, true) => Outcome::Completed,
        (SearchStatus::Complete, false) => Outcome::Unsatisfiable,
    }
}

fn ks_options_json(o: &KsOptions) -> Value {
    serde_json::to_value(o).expect("options serialize")
}

fn ttest_mean(a: &TtestMeanArgs) -> Result<Run, CliError> {
    let started = Instant::now();
    let alpha = a.common.alpha.unwrap_or(0.05);
    let mode = a.common.mode.unwrap_or(Mode::Propagate);
    let mut m = build_ttest_mean_model(alpha)?;
    let sample = to_f64(&TTEST_SAMPLE);
    let interval = mean_feasible_interval(&sample, alpha, Relation::Eq)?;
    let mut stats = RunStats::default();
    let (domain, mut result) = match mode {
        Mode::Propagate => match m.model.propagate_fixpoint() {
            PropagationResult::Failed => (
                vec![],
                json!({ "status": "failed", "reason": m.model.last_failure() }),
            ),
            r => (m.model.domain(m.mean).to_vec(), json!({ "status": r })),
        },
        Mode::Enumerate => {
            let mut admitted = Vec::new();
            for mu in 0..=20 {
                if check_ground_ttest(&sample, mu as f64, alpha, Relation::Eq)? {
                    admitted.push(mu);
                }
            }
            (admitted, json!({ "total": 21 }))
        }
        Mode::Solve => {
            let config = search_config(&a.common, SearchConfig::default())?;
            let mut values = Vec::new();
            let r = enumerate(&mut m.model, &config, |s| {
                values.push(s.value(m.mean));
                true
            })?;
            stats = stats_of(&r.stats, started);
            if matches!(r.status, SearchStatus::LimitReached(_)) {
                let mut result = json!({ "m_domain": values, "limit_reached": true });
                result["interval"] = json!({ "lower": interval.lower, "upper": interval.upper });
                return Ok(finish_ttest(
                    a,
                    alpha,
                    mode,
                    result,
                    values,
                    stats,
                    Outcome::LimitReached,
                ));
            }
            values.sort_unstable();
            (values, json!({}))
        }
    };
    if stats.wall_ms == 0.0 {
        stats = no_search(started);
    }
    result["m_domain"] = json!(domain);
    result["count"] = json!(domain.len());
    result["interval"] = json!({ "lower": interval.lower, "upper": interval.upper });
    let outcome = if domain.is_empty() {
        Outcome::Unsatisfiable
    } else {
        Outcome::Completed
    };
    Ok(finish_ttest(a, alpha, mode, result, domain, stats, outcome))
}

fn finish_ttest(
    _a: &TtestMeanArgs,
    alpha: f64,
    mode: Mode,
    result: Value,
    domain: Vec<i64>,
    stats: RunStats,
    outcome: Outcome,
) -> Run {
    let mut csv = String::from("m\n");
    for v in &domain {
        csv.push_str(&format!("{v}\n"));
    }
    Run {
        report: RunReport {
            problem: "ttest-mean",
            mode,
            alpha,
            params: json!({ "sample": TTEST_SAMPLE, "m_range": [0, 20], "relation": "eq" }),
            result,
            stats,
            artifacts: vec![],
        },
        csv: Some(csv),
        plot_csv: None,
        outcome,
    }
}

fn ks_sets(a: &KsSetsArgs) -> Result<Run, CliError> {
    let started = Instant::now();
    let alpha = a.common.alpha.unwrap_or(0.05);
    let mode = a.common.mode.unwrap_or(Mode::Enumerate);
    let options = a.ks.options(SupMode::Envelope);
    let o1 = to_f64(&KS_SETS_O1);
    let params = json!({
        "o1": KS_SETS_O1,
        "o2_fixed": statcp::models::KS_SETS_O2_FIXED,
        "o2_values": statcp::models::KS_SETS_O2_VALUES,
        "o2_free": statcp::models::KS_SETS_O2_FREE,
        "relation": "eq",
        "ks": ks_options_json(&options),
    });
    let plot = |o2: &[i64]| -> Result<String, CliError> {
        let rows = emit_cdf_plot_data(&to_f64(o2), PlotReference::Sample(&o1), alpha)?;
        Ok(cdf_rows_to_csv(&rows))
    };
    let report = |result, stats| RunReport {
        problem: "ks-sets",
        mode,
        alpha,
        params: params.clone(),
        result,
        stats,
        artifacts: vec![],
    };

    if let Some(o2) = &a.check {
        if o2.is_empty() {
            return Err(CliError::Usage("--check needs at least one value".into()));
        }
        let s = ks_two_sample_with(&o1, &to_f64(o2), options.sup)?;
        let feasible = statcp::constraints::check_ground_ks_nonparametric_with(
            &o1,
            &to_f64(o2),
            alpha,
            Relation::Eq,
            &options,
        )?;
        let test = KsTest::two_sample(options.null, o1.len(), o2.len(), alpha)?;
        let result = json!({
            "o2": o2,
            "statistic": s,
            "p_value": test.p_value(s.d),
            "feasible": feasible,
        });
        let csv = format!("feasible\n{}\n", feasible as u8);
        return Ok(Run {
            report: report(result, no_search(started)),
            csv: Some(csv),
            plot_csv: Some(plot(o2)?),
            outcome: Outcome::Completed,
        });
    }

    match mode {
        Mode::Enumerate => {
            let mut csv = String::from("o2,feasible\n");
            let mut first: Option<Vec<i64>> = None;
            let counts = enumerate_ks_sets_ground(alpha, &options, |o2, ok| {
                csv.push_str(&format!("{},{}\n", join(o2), ok as u8));
                if ok && first.is_none() {
                    first = Some(o2.to_vec());
                }
            })?;
            let plot_csv = first.as_deref().map(plot).transpose()?;
            let result = json!({
                "total": counts.total,
                "rejected": counts.rejected,
                "feasible": counts.feasible,
                "first_feasible": first,
            });
            Ok(Run {
                report: report(result, no_search(started)),
                csv: Some(csv),
                plot_csv,
                outcome: if counts.feasible > 0 {
                    Outcome::Completed
                } else {
                    Outcome::Unsatisfiable
                },
            })
        }
        Mode::Solve => {
            let mut csv = String::from("o2\n");
            let mut first: Option<Vec<i64>> = None;
            if a.common.seed.is_some()
                || a.common.node_limit.is_some()
                || a.common.time_limit.is_some()
            {
                return ks_sets_search_with(a, alpha, options, params, started);
            }
            let (counts, stats, status) = enumerate_ks_sets_search(alpha, options, |o2| {
                csv.push_str(&format!("{}\n", join(o2)));
                if first.is_none() {
                    first = Some(o2.to_vec());
                }
            })?;
            let plot_csv = first.as_deref().map(plot).transpose()?;
            let result = json!({
                "total": counts.total,
                "rejected": counts.rejected,
                "feasible": counts.feasible,
                "first_feasible": first,
            });
            Ok(Run {
                report: report(result, stats_of(&stats, started)),
                csv: Some(csv),
                plot_csv,
                outcome: status_outcome(status, counts.feasible > 0),
            })
        }
        Mode::Propagate => {
            let mut m = build_ks_sets_model(alpha, options)?;
            let r = m.model.propagate_fixpoint();
            let domains: Vec<Vec<i64>> = if r == PropagationResult::Failed {
                vec![]
            } else {
                m.o2.iter().map(|&v| m.model.domain(v).to_vec()).collect()
            };
            let mut csv = String::from("index,values\n");
            for (i, d) in domains.iter().enumerate() {
                csv.push_str(&format!(
                    "{},{}\n",
                    i + 11,
                    d.iter().map(i64::to_string).collect::<Vec<_>>().join(" ")
                ));
            }
            let result = json!({
                "status": r,
                "reason": m.model.last_failure(),
                "o2_domains": domains,
            });
            Ok(Run {
                report: report(result, no_search(started)),
                csv: Some(csv),
                plot_csv: None,
                outcome: if r == PropagationResult::Failed {
                    Outcome::Unsatisfiable
                } else {
                    Outcome::Completed
                },
            })
        }
    }
}

/// Search enumeration honouring `--seed` and limits.
fn ks_sets_search_with(
    a: &KsSetsArgs,
    alpha: f64,
    options: KsOptions,
    params: Value,
    started: Instant,
) -> Result<Run, CliError> {
    let mut m = build_ks_sets_model(alpha, options)?;
    let config = search_config(&a.common, m.search_config())?;
    let o2 = m.o2.clone();
    let mut rows = Vec::new();
    let r = enumerate(&mut m.model, &config, |s| {
        rows.push(s.values(&o2));
        true
    })?;
    let total = (statcp::models::KS_SETS_O2_VALUES.len() as u64)
        .pow(statcp::models::KS_SETS_O2_FREE as u32);
    let complete = r.status == SearchStatus::Complete;
    let mut csv = String::from("o2\n");
    for row in &rows {
        csv.push_str(&format!("{}\n", join(row)));
    }
    let result = json!({
        "total": total,
        "rejected": if complete { Some(total - r.count) } else { None },
        "feasible": r.count,
        "first_feasible": rows.first(),
        "complete": complete,
    });
    let o1 = to_f64(&KS_SETS_O1);
    let plot_csv = match rows.first() {
        Some(first) => Some(cdf_rows_to_csv(&emit_cdf_plot_data(
            &to_f64(first),
            PlotReference::Sample(&o1),
            alpha,
        )?)),
        None => None,
    };
    Ok(Run {
        report: RunReport {
            problem: "ks-sets",
            mode: Mode::Solve,
            alpha,
            params,
            result,
            stats: stats_of(&r.stats, started),
            artifacts: vec![],
        },
        csv: Some(csv),
        plot_csv,
        outcome: status_outcome(r.status, r.count > 0),
    })
}

fn join(v: &[i64]) -> String {
    v.iter().map(i64::to_string).collect::<Vec<_>>().join(" ")
}

/// Per-unit KS statistic and p-value of a plan's gaps.
fn unit_diagnostics(plan: &InspectionPlan, p: &InspectionParams, options: &KsOptions) -> Value {
    let reference = Exponential::new(p.rate.to_f64()).expect("validated rate");
    let units: Vec<Value> = plan
        .intervals()
        .iter()
        .enumerate()
        .filter(|(_, g)| !g.is_empty())
        .map(|(u, gaps)| {
            let s = ks_one_sample(&to_f64(gaps), &reference).expect("non-empty");
            let test = KsTest::one_sample(options.null, gaps.len(), p.alpha).expect("valid alpha");
            json!({
                "unit": u + 1,
                "intervals": gaps,
                "d_plus": s.d_plus,
                "d_minus": s.d_minus,
                "d": s.d,
                "p_value": test.p_value(s.d),
            })
        })
        .collect();
    Value::Array(units)
}

fn unit1_plot(plan: &InspectionPlan, p: &InspectionParams) -> Result<Option<String>, CliError> {
    let Some(gaps) = plan
        .intervals()
        .into_iter()
        .next()
        .filter(|g| !g.is_empty())
    else {
        return Ok(None);
    };
    let reference = Exponential::new(p.rate.to_f64())?;
    let rows = emit_cdf_plot_data(
        &to_f64(&gaps),
        PlotReference::Distribution(&reference),
        p.alpha,
    )?;
    Ok(Some(cdf_rows_to_csv(&rows)))
}

fn inspect(a: &InspectArgs) -> Result<Run, CliError> {
    let started = Instant::now();
    let alpha = a.common.alpha.unwrap_or(0.1);
    let mode = a.common.mode.unwrap_or(Mode::Solve);
    let options = a.ks.options(SupMode::Exact);
    let params = a.params(alpha);
    params.validate()?;
    let mut params_json = serde_json::to_value(params).expect("params serialize");
    params_json["ks"] = ks_options_json(&options);
    params_json["heuristic"] = json!(match a.heuristic {
        crate::args::HeuristicArg::LatestFirst => "latest-first",
        crate::args::HeuristicArg::EarliestFirst => "earliest-first",
    });
    let report = |result, stats| RunReport {
        problem: "inspect",
        mode,
        alpha,
        params: params_json.clone(),
        result,
        stats,
        artifacts: vec![],
    };

    if let Some(path) = &a.validate {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let plan = InspectionPlan::from_csv(&text).map_err(CliError::Usage)?;
        let check = check_plan_with(&plan, &params, options.null);
        let result = json!({
            "check": check,
            "units": unit_diagnostics(&plan, &params, &options),
        });
        return Ok(Run {
            report: report(result, no_search(started)),
            csv: None,
            plot_csv: unit1_plot(&plan, &params)?,
            outcome: if check.ok {
                Outcome::Completed
            } else {
                Outcome::Unsatisfiable
            },
        });
    }

    let mut m = build_inspection_model_with(params, options)?;
    match mode {
        Mode::Propagate => {
            let r = m.model.propagate_fixpoint();
            let ranges: Vec<Value> = if r == PropagationResult::Failed {
                vec![]
            } else {
                m.starts
                    .iter()
                    .map(|unit| {
                        json!(unit
                            .iter()
                            .map(|&v| [m.model.domain(v).min(), m.model.domain(v).max()])
                            .collect::<Vec<_>>())
                    })
                    .collect()
            };
            let mut csv = String::from("unit,k,start_min,start_max\n");
            for (u, unit) in m.starts.iter().enumerate() {
                if r == PropagationResult::Failed {
                    break;
                }
                for (k, &v) in unit.iter().enumerate() {
                    let d = m.model.domain(v);
                    csv.push_str(&format!("{},{},{},{}\n", u + 1, k + 1, d.min(), d.max()));
                }
            }
            let result = json!({
                "status": r,
                "reason": m.model.last_failure(),
                "start_ranges": ranges,
            });
            Ok(Run {
                report: report(result, no_search(started)),
                csv: Some(csv),
                plot_csv: None,
                outcome: if r == PropagationResult::Failed {
                    Outcome::Unsatisfiable
                } else {
                    Outcome::Completed
                },
            })
        }
        Mode::Solve => {
            let config = search_config(&a.common, m.search_config(a.heuristic(), None))?;
            let r = solve(&mut m.model, &config)?;
            let stats = stats_of(&r.stats, started);
            let Some(solution) = &r.solution else {
                let result = json!({
                    "found": false,
                    "status": r.status,
                    "reason": m.model.last_failure(),
                });
                return Ok(Run {
                    report: report(result, stats),
                    csv: Some(String::from("unit,k,start,end\n")),
                    plot_csv: None,
                    outcome: status_outcome(r.status, false),
                });
            };
            let plan = m.plan(solution);
            let check = check_plan_with(&plan, &params, options.null);
            let result = json!({
                "found": true,
                "plan": plan,
                "check": check,
                "units": unit_diagnostics(&plan, &params, &options),
            });
            Ok(Run {
                report: report(result, stats),
                csv: Some(plan.to_csv()),
                plot_csv: unit1_plot(&plan, &params)?,
                outcome: Outcome::Completed,
            })
        }
        Mode::Enumerate => {
            let mut config = search_config(&a.common, m.search_config(a.heuristic(), None))?;
            config.solution_limit = Some(a.solution_limit.max(1));
            let mut solutions = Vec::new();
            let r = enumerate(&mut m.model, &config, |s| {
                solutions.push(s.clone());
                true
            })?;
            let plans: Vec<InspectionPlan> = solutions.iter().map(|s| m.plan(s)).collect();
            let mut csv = String::from("plan,unit,k,start,end\n");
            for (i, plan) in plans.iter().enumerate() {
                for line in plan.to_csv().lines().skip(1) {
                    csv.push_str(&format!("{},{line}\n", i + 1));
                }
            }
            let all_ok = plans
                .iter()
                .all(|p| check_plan_with(p, &params, options.null).ok);
            let result = json!({
                "count": r.count,
                "status": r.status,
                "all_valid": all_ok,
            });
            let plot_csv = match plans.first() {
                Some(p) => unit1_plot(p, &params)?,
                None => None,
            };
            let outcome = match r.status {
                SearchStatus::Complete if r.count == 0 => Outcome::Unsatisfiable,
                SearchStatus::Complete => Outcome::Completed,
                SearchStatus::LimitReached(_) => Outcome::LimitReached,
            };
            Ok(Run {
                report: report(result, stats_of(&r.stats, started)),
                csv: Some(csv),
                plot_csv,
                outcome,
            })
        }
    }
}
