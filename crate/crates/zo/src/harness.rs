//! Experiment harness: turns an [`ExperimentConfig`] into runs, sweeps and
//! stable CSV output.
//!
//! The iteration budget follows N = ceil(c sigma^2 R^2 / eps^2) with c = 4 and
//! sigma^2 the second-moment bound at the reference noise level delta_max.
//! That constant is a harness calibration, not a theoretical value.

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::estimators::{variance_bound, EstimatorConfig};
use crate::optimizer::{gamma_for_target, max_noise_level, run, RunConfig, Trace};
use crate::oracle::NoiseSpec;
use crate::problems::{make_problem, ProblemParams, ProblemSpec};
use crate::report::fmt_float;
use crate::{exec, stats};

const ITER_BUDGET_CONST: f64 = 4.0;

#[derive(Debug, Clone)]
pub struct RunPlan {
    pub gamma: f64,
    pub delta_max: f64,
    pub n_iters: usize,
    pub sigma2_ref: f64,
}

pub fn build_problem(cfg: &ExperimentConfig) -> Result<ProblemSpec> {
    make_problem(
        cfg.problem,
        cfg.d,
        &ProblemParams {
            b: cfg.b,
            domain_radius: cfg.domain_radius,
            start_offset: cfg.start_offset,
            ..ProblemParams::default()
        },
    )
}

/// Resolve gamma, the noise threshold and the iteration budget for a config.
pub fn plan(cfg: &ExperimentConfig, problem: &ProblemSpec) -> Result<RunPlan> {
    let m2_or_l = match cfg.setting {
        crate::estimators::Setting::Smooth => problem.l.unwrap_or(problem.m2),
        crate::estimators::Setting::Nonsmooth => problem.m2,
    };
    let gamma = gamma_for_target(cfg.scheme, cfg.setting, cfg.epsilon, m2_or_l, cfg.d)?;
    let delta_max = max_noise_level(
        cfg.scheme,
        cfg.setting,
        problem.m2,
        gamma,
        cfg.d,
        cfg.epsilon,
    )?;
    let sigma2_ref = variance_bound(cfg.scheme, cfg.p, cfg.d, problem.m2, delta_max, gamma)?;
    let r = problem.radius(cfg.p);
    let n_iters = cfg.iters.unwrap_or_else(|| {
        (ITER_BUDGET_CONST * sigma2_ref * r * r / (cfg.epsilon * cfg.epsilon)).ceil() as usize
    });
    Ok(RunPlan {
        gamma,
        delta_max,
        n_iters,
        sigma2_ref,
    })
}

/// One optimization run at `delta = delta_multiplier * delta_max`.
pub fn run_single(cfg: &ExperimentConfig) -> Result<Trace> {
    let problem = build_problem(cfg)?;
    let p = plan(cfg, &problem)?;
    let noise = NoiseSpec::new(cfg.noise_kind, cfg.delta_multiplier * p.delta_max)?;
    let ecfg = EstimatorConfig::new(cfg.scheme, p.gamma, cfg.batch, cfg.p)?;
    let rcfg = RunConfig {
        epsilon: cfg.epsilon,
        n_iters: p.n_iters,
        step_rule: cfg.step_rule,
        seed: cfg.seed,
    };
    run(&problem, &rcfg, &ecfg, &noise)
}

/// Trace CSV: per-iteration gap of the averaged solution and cumulative calls.
pub fn trace_csv(trace: &Trace) -> String {
    let mut out = String::from("iter,gap,calls\n");
    let mut calls = 0u64;
    for (k, gap) in trace.avg_gap_history.iter().enumerate() {
        if k > 0 {
            calls += trace.calls_per_iter[k - 1];
        }
        out.push_str(&format!("{k},{},{calls}\n", fmt_float(*gap)));
    }
    out
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub run_id: String,
    pub scheme: crate::estimators::Scheme,
    pub d: usize,
    pub epsilon: f64,
    pub gamma: f64,
    pub delta: f64,
    pub final_gap: f64,
    pub oracle_calls: u64,
}

/// The noise sweep: every (delta multiplier, seed) cell, run with the same
/// gamma and iteration budget (fixed at the reference delta_max), rows in
/// deterministic (multiplier, seed) order. Cells run concurrently.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    let problem = build_problem(cfg)?;
    let p = plan(cfg, &problem)?;
    let mut cells = Vec::new();
    for (mi, &mult) in cfg.delta_multipliers.iter().enumerate() {
        for r in 0..cfg.repeats {
            cells.push((mi, mult, cfg.seed + r as u64));
        }
    }
    let results = exec::map_indexed(cells.len(), |i| {
        let (mi, mult, seed) = cells[i];
        let noise = NoiseSpec::new(cfg.noise_kind, mult * p.delta_max)?;
        let ecfg = EstimatorConfig::new(cfg.scheme, p.gamma, cfg.batch, cfg.p)?;
        let rcfg = RunConfig {
            epsilon: cfg.epsilon,
            n_iters: p.n_iters,
            step_rule: cfg.step_rule,
            seed,
        };
        let trace = run(&problem, &rcfg, &ecfg, &noise)?;
        Ok(SweepRow {
            run_id: format!("m{mi}_s{seed}"),
            scheme: cfg.scheme,
            d: cfg.d,
            epsilon: cfg.epsilon,
            gamma: p.gamma,
            delta: mult * p.delta_max,
            final_gap: trace.final_gap,
            oracle_calls: trace.total_calls,
        })
    });
    results.into_iter().collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("run_id,scheme,d,epsilon,gamma,delta,final_gap,oracle_calls\n");
    for r in rows {
        out.push_str(&format!(
            "{},{:?},{},{},{},{},{},{}\n",
            r.run_id,
            r.scheme,
            r.d,
            fmt_float(r.epsilon),
            fmt_float(r.gamma),
            fmt_float(r.delta),
            fmt_float(r.final_gap),
            r.oracle_calls
        ));
    }
    out
}

/// Median final gap per delta multiplier, in multiplier order.
pub fn median_gaps(cfg: &ExperimentConfig, rows: &[SweepRow]) -> Vec<f64> {
    cfg.delta_multipliers
        .iter()
        .enumerate()
        .map(|(mi, _)| {
            let gaps: Vec<f64> = rows
                .iter()
                .filter(|r| r.run_id.starts_with(&format!("m{mi}_")))
                .map(|r| r.final_gap)
                .collect();
            stats::median(&gaps)
        })
        .collect()
}

/// Oracle calls until the averaged solution first reaches gap <= eps; falls
/// back to the total budget if the run never gets there.
pub fn calls_to_reach(trace: &Trace, eps: f64) -> u64 {
    let mut calls = 0u64;
    for (k, gap) in trace.avg_gap_history.iter().enumerate() {
        if *gap <= eps {
            return calls.max(1);
        }
        if k < trace.calls_per_iter.len() {
            calls += trace.calls_per_iter[k];
        }
    }
    trace.total_calls.max(1)
}

/// Least-squares slope of ln(y) against ln(x).
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn small_cfg() -> ExperimentConfig {
        let mut cfg = parse_config(r#"{"problem": "nonsmooth_norm", "d": 3}"#).unwrap();
        cfg.iters = Some(100);
        cfg.repeats = 2;
        cfg.delta_multipliers = vec![0.0, 1.0];
        cfg
    }

    #[test]
    fn sweep_row_count_and_order() {
        let cfg = small_cfg();
        let rows = run_sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].run_id, "m0_s1");
        assert_eq!(rows[1].run_id, "m0_s2");
        assert_eq!(rows[2].run_id, "m1_s1");
        assert_eq!(rows[0].delta, 0.0);
        assert!(rows[2].delta > 0.0);
    }

    #[test]
    fn sweep_csv_deterministic() {
        let cfg = small_cfg();
        let a = sweep_csv(&run_sweep(&cfg).unwrap());
        let b = sweep_csv(&run_sweep(&cfg).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn trace_csv_shape() {
        let mut cfg = small_cfg();
        cfg.iters = Some(0);
        let trace = run_single(&cfg).unwrap();
        let csv = trace_csv(&trace);
        let lines: Vec<&str> = csv.trim_end().lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "iter,gap,calls");
        assert!(lines[1].starts_with("0,"));
    }

    #[test]
    fn trace_calls_accounting() {
        let mut cfg = small_cfg();
        cfg.iters = Some(17);
        cfg.batch = 3;
        let trace = run_single(&cfg).unwrap();
        assert_eq!(trace.total_calls, 2 * 3 * 17);
        let csv = trace_csv(&trace);
        let last = csv.trim_end().lines().last().unwrap();
        assert!(last.ends_with(&format!(",{}", 2 * 3 * 17)));
    }

    #[test]
    fn slope_of_exact_power_law() {
        let xs: [f64; 3] = [0.2, 0.1, 0.05];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(-2.0)).collect();
        let s = log_log_slope(&xs, &ys);
        assert!((s + 2.0).abs() < 1e-12);
    }
}
