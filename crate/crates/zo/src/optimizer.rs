//! Gradient-free optimization driver.
//!
//! Projected stochastic gradient descent fed by batched two-point estimates,
//! with Polyak-Ruppert averaging as the returned solution. The gamma rules and
//! the maximum-admissible-noise levels are the exact solutions of the
//! variance-domination inequalities behind the convergence guarantee.

use crate::error::{Error, Result};
use crate::estimators::{
    batch_grad, smoothing_lipschitz_grad, variance_bound, EstimatorConfig, Scheme, Setting,
};
use crate::oracle::{NoiseSpec, Oracle};
use crate::problems::{true_gap, ProblemSpec};
use crate::rng::RngStream;
use crate::vector::axpy;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepRule {
    /// eta = 1 / L_{f_gamma}.
    ConstantInvL,
    /// eta = R / (sigma sqrt(N)), the standard averaged-SGD step; constant in k.
    DecreasingRSigma,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub epsilon: f64,
    pub n_iters: usize,
    pub step_rule: StepRule,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct Trace {
    /// f(x_k) - f* for the raw iterates, length N + 1 including x0.
    pub gap_history: Vec<f64>,
    /// f(xbar_k) - f* for the running average, length N + 1.
    pub avg_gap_history: Vec<f64>,
    /// Oracle calls per iteration (2B each), length N.
    pub calls_per_iter: Vec<u64>,
    /// The averaged point returned as the solution.
    pub final_point: Vec<f64>,
    pub final_gap: f64,
    pub total_calls: u64,
}

/// The gamma that balances the smoothing bias against the target accuracy:
/// nonsmooth: sqrt(d) eps / (2 M2) (l1) and eps / (2 M2) (l2);
/// smooth (bias bound = eps / 2): sqrt(d eps) / (2 L) (l1) and
/// sqrt(eps / 2) / L (l2).
pub fn gamma_for_target(
    scheme: Scheme,
    setting: Setting,
    epsilon: f64,
    m2_or_l: f64,
    d: usize,
) -> Result<f64> {
    if !(epsilon > 0.0) || !(m2_or_l > 0.0) {
        return Err(Error::config(
            "epsilon and the Lipschitz constant must be > 0",
        ));
    }
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let df = d as f64;
    Ok(match (scheme, setting) {
        (Scheme::L1, Setting::Nonsmooth) => df.sqrt() * epsilon / (2.0 * m2_or_l),
        (Scheme::L2, Setting::Nonsmooth) => epsilon / (2.0 * m2_or_l),
        (Scheme::L1, Setting::Smooth) => (df * epsilon).sqrt() / (2.0 * m2_or_l),
        (Scheme::L2, Setting::Smooth) => (epsilon / 2.0).sqrt() / m2_or_l,
    })
}

/// The largest noise level for which the noise term does not dominate the
/// second-moment bound. Exact solutions of the domination inequalities:
/// l1: sqrt(12) (1 + sqrt 2) M2 gamma / d; l2: 2^(1/4) M2 gamma / sqrt(d).
/// Smooth setting: sqrt(eps / d) with unit constant (order statement only).
pub fn max_noise_level(
    scheme: Scheme,
    setting: Setting,
    m2: f64,
    gamma: f64,
    d: usize,
    epsilon: f64,
) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let df = d as f64;
    match setting {
        Setting::Nonsmooth => {
            if gamma < 0.0 {
                return Err(Error::config("gamma must be >= 0"));
            }
            Ok(match scheme {
                Scheme::L1 => 12f64.sqrt() * (1.0 + std::f64::consts::SQRT_2) * m2 * gamma / df,
                Scheme::L2 => 2f64.powf(0.25) * m2 * gamma / df.sqrt(),
            })
        }
        Setting::Smooth => {
            if !(epsilon > 0.0) {
                return Err(Error::config("epsilon must be > 0 in the smooth setting"));
            }
            Ok((epsilon / df).sqrt())
        }
    }
}

pub fn step_size(
    rule: StepRule,
    l_fgamma: f64,
    sigma2_bound: f64,
    r: f64,
    n: usize,
    _k: usize,
) -> Result<f64> {
    match rule {
        StepRule::ConstantInvL => {
            if !(l_fgamma > 0.0) {
                return Err(Error::config("L_fgamma must be > 0 for the 1/L step"));
            }
            Ok(1.0 / l_fgamma)
        }
        StepRule::DecreasingRSigma => {
            if n == 0 {
                return Err(Error::config("N must be > 0 for the R/sigma step rule"));
            }
            if !(sigma2_bound > 0.0) || !(r > 0.0) {
                return Err(Error::config(
                    "sigma^2 and R must be > 0 for the R/sigma step rule",
                ));
            }
            Ok(r / (sigma2_bound.sqrt() * (n as f64).sqrt()))
        }
    }
}

/// Projected SGD with iterate averaging. Consumes exactly 2 * batch * N oracle
/// calls; identical inputs give an identical trace.
pub fn run(
    problem: &ProblemSpec,
    rcfg: &RunConfig,
    ecfg: &EstimatorConfig,
    noise: &NoiseSpec,
) -> Result<Trace> {
    ecfg.validate()?;
    noise.validate()?;
    if !problem.q_set.contains(&problem.x0, 1e-9) {
        return Err(Error::config("x0 lies outside the feasible set"));
    }
    let oracle = Oracle::new(problem, *noise);
    let stream = RngStream::new(rcfg.seed, 0);
    let n = rcfg.n_iters;
    let sigma2 = variance_bound(
        ecfg.scheme,
        ecfg.p,
        problem.d,
        problem.m2,
        noise.delta,
        ecfg.gamma,
    )?;
    let l_fg = smoothing_lipschitz_grad(ecfg.scheme, problem.m, ecfg.gamma, problem.d)?;
    let r = problem.radius(ecfg.p).max(f64::MIN_POSITIVE);

    let mut x = problem.x0.clone();
    let mut avg = x.clone();
    let mut gap_history = Vec::with_capacity(n + 1);
    let mut avg_gap_history = Vec::with_capacity(n + 1);
    let mut calls_per_iter = Vec::with_capacity(n);
    gap_history.push(true_gap(problem, &x));
    avg_gap_history.push(true_gap(problem, &avg));

    for k in 0..n {
        let eta = step_size(rcfg.step_rule, l_fg, sigma2, r, n, k)?;
        let before = oracle.calls();
        let g = batch_grad(&oracle, &x, ecfg, &stream.child(k as u64 + 1))?;
        calls_per_iter.push(oracle.calls() - before);
        x = problem.q_set.project(&axpy(&x, -eta, &g));
        debug_assert!(problem.q_set.contains_inflated(&x, ecfg.gamma, ecfg.p));
        // running mean of x_1..x_{k+1}
        let m = (k + 1) as f64;
        for (a, xi) in avg.iter_mut().zip(&x) {
            *a += (xi - *a) / m;
        }
        gap_history.push(true_gap(problem, &x));
        avg_gap_history.push(true_gap(problem, &avg));
    }

    let total_calls = oracle.calls();
    debug_assert_eq!(total_calls, 2 * ecfg.batch as u64 * n as u64);
    let final_gap = true_gap(problem, &avg);
    Ok(Trace {
        gap_history,
        avg_gap_history,
        calls_per_iter,
        final_point: avg,
        final_gap,
        total_calls,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::NoiseKind;
    use crate::problems::{make_problem, FeasibleSet, ProblemKind, ProblemParams};
    use proptest::prelude::*;

    #[test]
    fn gamma_rules() {
        let g = gamma_for_target(Scheme::L1, Setting::Nonsmooth, 0.1, 1.0, 4).unwrap();
        assert!((g - 0.1).abs() < 1e-15);
        let g2 = gamma_for_target(Scheme::L2, Setting::Nonsmooth, 0.1, 1.0, 4).unwrap();
        assert!((g2 - 0.05).abs() < 1e-15);
        let gs = gamma_for_target(Scheme::L2, Setting::Smooth, 0.08, 1.0, 4).unwrap();
        assert!((gs - 0.2).abs() < 1e-15);
        assert!(gamma_for_target(Scheme::L1, Setting::Nonsmooth, -0.1, 1.0, 4).is_err());
    }

    #[test]
    fn noise_thresholds() {
        let d1 = max_noise_level(Scheme::L1, Setting::Nonsmooth, 1.0, 0.1, 4, 0.0).unwrap();
        assert!((d1 - 12f64.sqrt() * (1.0 + 2f64.sqrt()) * 0.1 / 4.0).abs() < 1e-15);
        assert!((d1 - 0.20909).abs() < 1e-4);
        let d2 = max_noise_level(Scheme::L2, Setting::Nonsmooth, 1.0, 0.05, 4, 0.0).unwrap();
        assert!((d2 - 2f64.powf(0.25) * 0.05 / 2.0).abs() < 1e-15);
        assert!((d2 - 0.029730).abs() < 1e-5);
        // gamma = 0 -> no noise budget
        assert_eq!(
            max_noise_level(Scheme::L1, Setting::Nonsmooth, 1.0, 0.0, 4, 0.0).unwrap(),
            0.0
        );
        let ds = max_noise_level(Scheme::L2, Setting::Smooth, 1.0, 0.1, 4, 0.04).unwrap();
        assert!((ds - 0.1).abs() < 1e-15);
    }

    #[test]
    fn step_rules() {
        assert_eq!(
            step_size(StepRule::ConstantInvL, 40.0, 0.0, 0.0, 0, 0).unwrap(),
            0.025
        );
        let s = step_size(StepRule::DecreasingRSigma, 0.0, 100.0, 1.0, 400, 0).unwrap();
        assert!((s - 0.005).abs() < 1e-15);
        assert!(step_size(StepRule::DecreasingRSigma, 0.0, 100.0, 1.0, 0, 0).is_err());
        // nonincreasing in N
        let s2 = step_size(StepRule::DecreasingRSigma, 0.0, 100.0, 1.0, 1600, 0).unwrap();
        assert!(s2 < s);
    }

    #[test]
    fn zero_iterations_at_optimum() {
        let p = make_problem(
            ProblemKind::NonsmoothNorm,
            2,
            &ProblemParams {
                start_offset: 0.0,
                ..ProblemParams::default()
            },
        )
        .unwrap();
        let rcfg = RunConfig {
            epsilon: 0.1,
            n_iters: 0,
            step_rule: StepRule::DecreasingRSigma,
            seed: 1,
        };
        let ecfg = EstimatorConfig::new(Scheme::L2, 0.05, 1, 2.0).unwrap();
        let trace = run(&p, &rcfg, &ecfg, &NoiseSpec::none()).unwrap();
        assert_eq!(trace.final_gap, 0.0);
        assert_eq!(trace.total_calls, 0);
        assert_eq!(trace.gap_history.len(), 1);
    }

    #[test]
    fn smooth_quadratic_run_reaches_target() {
        let p = make_problem(ProblemKind::SmoothQuadratic, 2, &ProblemParams::default()).unwrap();
        let eps = 0.05;
        let gamma = gamma_for_target(Scheme::L2, Setting::Smooth, eps, p.l.unwrap(), 2).unwrap();
        let ecfg = EstimatorConfig::new(Scheme::L2, gamma, 1, 2.0).unwrap();
        let sigma2 = variance_bound(Scheme::L2, 2.0, 2, p.m2, 0.0, gamma).unwrap();
        let r = p.radius(2.0);
        let n = (4.0 * sigma2 * r * r / (eps * eps)).ceil() as usize;
        let rcfg = RunConfig {
            epsilon: eps,
            n_iters: n,
            step_rule: StepRule::DecreasingRSigma,
            seed: 7,
        };
        let trace = run(&p, &rcfg, &ecfg, &NoiseSpec::none()).unwrap();
        assert!(trace.final_gap <= eps, "final gap {}", trace.final_gap);
        assert_eq!(trace.total_calls, 2 * n as u64);
        assert_eq!(trace.calls_per_iter.iter().sum::<u64>(), 2 * n as u64);
    }

    #[test]
    fn identical_configs_identical_traces() {
        let p = make_problem(ProblemKind::NonsmoothNorm, 3, &ProblemParams::default()).unwrap();
        let ecfg = EstimatorConfig::new(Scheme::L1, 0.05, 2, 2.0).unwrap();
        let rcfg = RunConfig {
            epsilon: 0.1,
            n_iters: 50,
            step_rule: StepRule::DecreasingRSigma,
            seed: 11,
        };
        let noise = NoiseSpec::new(NoiseKind::Gaussian, 0.01).unwrap();
        let a = run(&p, &rcfg, &ecfg, &noise).unwrap();
        let b = run(&p, &rcfg, &ecfg, &noise).unwrap();
        assert_eq!(a.gap_history, b.gap_history);
        assert_eq!(a.final_point, b.final_point);
    }

    #[test]
    fn iterates_stay_feasible() {
        let p = make_problem(
            ProblemKind::NonsmoothNorm,
            3,
            &ProblemParams {
                domain_radius: 1.0,
                ..ProblemParams::default()
            },
        )
        .unwrap();
        let ecfg = EstimatorConfig::new(Scheme::L2, 0.05, 1, 2.0).unwrap();
        let rcfg = RunConfig {
            epsilon: 0.1,
            n_iters: 200,
            step_rule: StepRule::ConstantInvL,
            seed: 3,
        };
        let noise = NoiseSpec::new(NoiseKind::Uniform, 0.1).unwrap();
        let trace = run(&p, &rcfg, &ecfg, &noise).unwrap();
        assert!(p.q_set.contains(&trace.final_point, 1e-9));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn projection_is_idempotent_and_feasible(
            x in prop::collection::vec(-5.0f64..5.0, 3),
            radius in 0.5f64..3.0,
        ) {
            let q = FeasibleSet::L2Ball { center: vec![0.0; 3], radius };
            let p1 = q.project(&x);
            prop_assert!(q.contains(&p1, 1e-9));
            let p2 = q.project(&p1);
            for (a, b) in p1.iter().zip(&p2) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }
    }
}
