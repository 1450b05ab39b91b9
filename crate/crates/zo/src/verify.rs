//! Monte Carlo verification of the estimator properties.
//!
//! Each claimed estimator property becomes a pass/fail check with an honest
//! confidence interval, plus two deliberately broken negative controls so the
//! suite can detect a faulty estimator, not only confirm a working one.
//! Every report carries (seed, n), enough to regenerate the exact statistic.

use rand::Rng;

use crate::error::{Error, Result};
use crate::estimators::{
    dual_q, grad_est, smoothed_value_mc, smoothing_bias_bound, variance_bound, EstimatorConfig,
    Scheme, Setting,
};
use crate::oracle::{NoiseKind, NoiseSpec, Objective, Oracle};
use crate::problems::{make_problem, ProblemKind, ProblemParams, ProblemSpec};
use crate::rng::{BaseRng, RngStream};
use crate::sampling::{sample_sphere_l1, sample_sphere_l2};
use crate::stats::mc_vector_summary;
use crate::vector::{axpy, sign_vec};

pub use crate::stats::mc_summary;

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: String,
    pub negative_control: bool,
    pub pass: bool,
    /// The observed statistic; for mean checks, the worst coordinate deviation
    /// in standard-error units.
    pub observed: f64,
    /// The bound or target the statistic is compared against.
    pub bound: f64,
    pub ci_halfwidth: f64,
    pub n: u64,
    pub seed: u64,
}

impl CheckReport {
    /// A negative control succeeds (as a control) when its check fails.
    pub fn ok(&self) -> bool {
        self.pass != self.negative_control
    }
}

/// Monte Carlo mean of the gradient estimator against the analytic smoothed
/// gradient, coordinatewise within 4 standard errors. Needs a problem whose
/// smoothed gradient is known exactly (the quadratic: grad f_gamma(x) = x - x*).
pub fn check_unbiasedness(
    problem: &ProblemSpec,
    scheme: Scheme,
    x: &[f64],
    gamma: f64,
    noise: &NoiseSpec,
    n: usize,
    seed: u64,
) -> Result<CheckReport> {
    let analytic = problem
        .mean_gradient(x)
        .ok_or_else(|| Error::config("unbiasedness check needs an analytic smoothed gradient"))?;
    let cfg = EstimatorConfig::new(scheme, gamma, 1, 2.0)?;
    let oracle = Oracle::new(problem, *noise);
    let base = RngStream::new(seed, 0);
    let summary = mc_vector_summary(
        &|rng: &mut BaseRng| {
            let id = rng.gen::<u64>();
            grad_est(&oracle, x, &cfg, &base.child(id)).expect("estimate")
        },
        problem.d,
        cfg.q(),
        n,
        &base.child(u64::MAX),
    )?;
    let (worst, max_se) = worst_deviation(&summary.mean, &summary.coord_se, &analytic);
    Ok(CheckReport {
        name: format!(
            "unbiasedness/{scheme:?}/{:?}/delta={}",
            noise.kind, noise.delta
        ),
        negative_control: false,
        pass: worst <= 4.0,
        observed: worst,
        bound: 4.0,
        ci_halfwidth: max_se,
        n: summary.n,
        seed,
    })
}

fn worst_deviation(mean: &[f64], se: &[f64], target: &[f64]) -> (f64, f64) {
    let mut worst = 0.0f64;
    let mut max_se = 0.0f64;
    for i in 0..mean.len() {
        let s = se[i].max(f64::MIN_POSITIVE);
        worst = worst.max((mean[i] - target[i]).abs() / s);
        max_se = max_se.max(se[i]);
    }
    (worst, max_se)
}

/// Empirical second moment E||g||_q^2 against the closed-form bound.
#[allow(clippy::too_many_arguments)]
pub fn check_variance_bound(
    problem: &ProblemSpec,
    scheme: Scheme,
    p: f64,
    x: &[f64],
    gamma: f64,
    noise: &NoiseSpec,
    n: usize,
    seed: u64,
) -> Result<CheckReport> {
    let cfg = EstimatorConfig::new(scheme, gamma, 1, p)?;
    let bound = variance_bound(scheme, p, problem.d, problem.m2, noise.delta, gamma)?;
    let oracle = Oracle::new(problem, *noise);
    let base = RngStream::new(seed, 0);
    let summary = mc_vector_summary(
        &|rng: &mut BaseRng| {
            let id = rng.gen::<u64>();
            grad_est(&oracle, x, &cfg, &base.child(id)).expect("estimate")
        },
        problem.d,
        cfg.q(),
        n,
        &base.child(u64::MAX),
    )?;
    let qn = &summary.qnorm_sq;
    let se = (qn.variance / qn.n as f64).sqrt();
    Ok(CheckReport {
        name: format!("variance/{scheme:?}/d={}/delta={}", problem.d, noise.delta),
        negative_control: false,
        pass: qn.mean <= bound + 4.0 * se,
        observed: qn.mean,
        bound,
        ci_halfwidth: 4.0 * se,
        n: qn.n,
        seed,
    })
}

/// Sandwich check: the Monte Carlo smoothing gap f_gamma(x) - f(x) must lie
/// in [-ci, bias bound + ci].
pub fn check_sandwich(
    problem: &ProblemSpec,
    scheme: Scheme,
    setting: Setting,
    x: &[f64],
    gamma: f64,
    n: usize,
    seed: u64,
) -> Result<CheckReport> {
    let m2_or_l = match setting {
        Setting::Nonsmooth => problem.m2,
        Setting::Smooth => problem
            .l
            .ok_or_else(|| Error::config("smooth sandwich check needs L"))?,
    };
    let bound = smoothing_bias_bound(scheme, setting, m2_or_l, gamma, problem.d)?;
    let summary = smoothed_value_mc(problem, x, gamma, scheme, n, &RngStream::new(seed, 0))?;
    let gap = summary.mean - problem.mean(x);
    let ci = summary.ci_halfwidth;
    Ok(CheckReport {
        name: format!("sandwich/{scheme:?}/{setting:?}/d={}", problem.d),
        negative_control: false,
        pass: gap >= -ci && gap <= bound + ci,
        observed: gap,
        bound,
        ci_halfwidth: ci,
        n: summary.n,
        seed,
    })
}

/// Lipschitz continuity of the smoothed value on sampled pairs:
/// |f_gamma(y) - f_gamma(x)| <= M ||y - x||_p + combined CI.
pub fn check_smoothed_lipschitz(
    problem: &ProblemSpec,
    scheme: Scheme,
    p: f64,
    gamma: f64,
    pairs: usize,
    n: usize,
    seed: u64,
) -> Result<CheckReport> {
    let base = RngStream::new(seed, 0);
    let mut rng = base.child(0).rng();
    let mut worst = 0.0f64;
    let mut max_ci = 0.0f64;
    let mut pass = true;
    for i in 0..pairs {
        let x: Vec<f64> = (0..problem.d).map(|_| rng.gen::<f64>() - 0.5).collect();
        let y: Vec<f64> = (0..problem.d).map(|_| rng.gen::<f64>() - 0.5).collect();
        let sx = smoothed_value_mc(problem, &x, gamma, scheme, n, &base.child(2 * i as u64 + 1))?;
        let sy = smoothed_value_mc(problem, &y, gamma, scheme, n, &base.child(2 * i as u64 + 2))?;
        let diff = crate::vector::sub(&y, &x);
        let dist = if p == 1.0 {
            crate::vector::norm_l1(&diff)
        } else {
            crate::vector::norm_l2(&diff)
        };
        let ci = sx.ci_halfwidth + sy.ci_halfwidth;
        let lhs = (sy.mean - sx.mean).abs();
        let slack = lhs - problem.m * dist;
        worst = worst.max(slack);
        max_ci = max_ci.max(ci);
        if slack > ci {
            pass = false;
        }
    }
    Ok(CheckReport {
        name: format!("lipschitz/{scheme:?}/d={}", problem.d),
        negative_control: false,
        pass,
        observed: worst,
        bound: 0.0,
        ci_halfwidth: max_ci,
        n: n as u64,
        seed,
    })
}

/// Negative control: noise correlated with the direction (delta_1 =
/// +Delta sign(e_1), delta_2 = -Delta sign(e_1)), violating the independence
/// assumption. The estimator mean picks up a bias of order d Delta / gamma, so
/// the unbiasedness test must fail.
pub fn check_unbiasedness_e_correlated(
    problem: &ProblemSpec,
    scheme: Scheme,
    x: &[f64],
    gamma: f64,
    delta: f64,
    n: usize,
    seed: u64,
) -> Result<CheckReport> {
    let analytic = problem
        .mean_gradient(x)
        .ok_or_else(|| Error::config("unbiasedness check needs an analytic smoothed gradient"))?;
    let d = problem.d;
    let base = RngStream::new(seed, 0);
    let summary = mc_vector_summary(
        &|rng: &mut BaseRng| {
            let e = match scheme {
                Scheme::L1 => sample_sphere_l1(d, rng).expect("dim"),
                Scheme::L2 => sample_sphere_l2(d, rng).expect("dim"),
            };
            let xi = problem.draw_xi(rng);
            let s = if e[0] >= 0.0 { 1.0 } else { -1.0 };
            let f1 = problem.eval(&axpy(x, gamma, &e), &xi) + delta * s;
            let f2 = problem.eval(&axpy(x, -gamma, &e), &xi) - delta * s;
            let scale = d as f64 / (2.0 * gamma) * (f1 - f2);
            match scheme {
                Scheme::L1 => sign_vec(&e).into_iter().map(|w| scale * w).collect(),
                Scheme::L2 => e.into_iter().map(|ei| scale * ei).collect(),
            }
        },
        d,
        dual_q(2.0),
        n,
        &base.child(0),
    )?;
    let (worst, max_se) = worst_deviation(&summary.mean, &summary.coord_se, &analytic);
    Ok(CheckReport {
        name: format!("negative/unbiasedness-e-correlated/{scheme:?}"),
        negative_control: true,
        pass: worst <= 4.0,
        observed: worst,
        bound: 4.0,
        ci_halfwidth: max_se,
        n: summary.n,
        seed,
    })
}

/// Negative control: the variance bound computed with an understated noise
/// level (Delta/100) while noise is injected at Delta = 10 M2 gamma / d. The
/// injected noise term dominates the misstated bound, so the check must fail.
pub fn check_variance_understated(
    problem: &ProblemSpec,
    scheme: Scheme,
    x: &[f64],
    gamma: f64,
    n: usize,
    seed: u64,
) -> Result<CheckReport> {
    let delta_injected = 10.0 * problem.m2 * gamma / problem.d as f64;
    let noise = NoiseSpec::new(NoiseKind::Gaussian, delta_injected)?;
    let bound = variance_bound(
        scheme,
        2.0,
        problem.d,
        problem.m2,
        delta_injected / 100.0,
        gamma,
    )?;
    let cfg = EstimatorConfig::new(scheme, gamma, 1, 2.0)?;
    let oracle = Oracle::new(problem, noise);
    let base = RngStream::new(seed, 0);
    let summary = mc_vector_summary(
        &|rng: &mut BaseRng| {
            let id = rng.gen::<u64>();
            grad_est(&oracle, x, &cfg, &base.child(id)).expect("estimate")
        },
        problem.d,
        cfg.q(),
        n,
        &base.child(u64::MAX),
    )?;
    let qn = &summary.qnorm_sq;
    let se = (qn.variance / qn.n as f64).sqrt();
    Ok(CheckReport {
        name: format!("negative/variance-understated/{scheme:?}"),
        negative_control: true,
        pass: qn.mean <= bound + 4.0 * se,
        observed: qn.mean,
        bound,
        ci_halfwidth: 4.0 * se,
        n: qn.n,
        seed,
    })
}

/// Which check families to run; `None` means all.
#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Scales every sample count; 1.0 reproduces the reference suite.
    pub mc_scale: f64,
    pub checks: Option<Vec<String>>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: 1,
            mc_scale: 1.0,
            checks: None,
        }
    }
}

impl SuiteOptions {
    fn wants(&self, family: &str) -> bool {
        match &self.checks {
            None => true,
            Some(list) => list.iter().any(|c| c == family),
        }
    }

    fn scaled(&self, n: usize) -> usize {
        ((n as f64 * self.mc_scale).round() as usize).max(2)
    }
}

/// The full check suite: unbiasedness, variance bounds, sandwich bounds,
/// smoothed-value Lipschitz continuity, and the two negative controls.
pub fn run_suite(opts: &SuiteOptions) -> Result<Vec<CheckReport>> {
    let mut reports = Vec::new();
    let seed = opts.seed;

    if opts.wants("unbiasedness") {
        let d = 8;
        let gamma = 0.1;
        let quad = make_problem(ProblemKind::SmoothQuadratic, d, &ProblemParams::default())?;
        let x = point_at_distance(&quad, 1.0);
        let n = opts.scaled(1_000_000);
        for scheme in [Scheme::L1, Scheme::L2] {
            let delta_max = crate::optimizer::max_noise_level(
                scheme,
                Setting::Nonsmooth,
                quad.m2,
                gamma,
                d,
                0.0,
            )?;
            for kind in [
                NoiseKind::None,
                NoiseKind::Uniform,
                NoiseKind::Gaussian,
                NoiseKind::ConstantBias,
            ] {
                let delta = if kind == NoiseKind::None {
                    0.0
                } else {
                    delta_max
                };
                let noise = NoiseSpec::new(kind, delta)?;
                reports.push(check_unbiasedness(
                    &quad, scheme, &x, gamma, &noise, n, seed,
                )?);
            }
        }
    }

    if opts.wants("variance") {
        let n = opts.scaled(100_000);
        for scheme in [Scheme::L1, Scheme::L2] {
            for d in [2usize, 8, 32] {
                let problem =
                    make_problem(ProblemKind::NonsmoothNorm, d, &ProblemParams::default())?;
                let gamma = crate::optimizer::gamma_for_target(
                    scheme,
                    Setting::Nonsmooth,
                    0.1,
                    problem.m2,
                    d,
                )?;
                let delta_max = crate::optimizer::max_noise_level(
                    scheme,
                    Setting::Nonsmooth,
                    problem.m2,
                    gamma,
                    d,
                    0.0,
                )?;
                let x = point_at_distance(&problem, 1.0);
                for delta in [0.0, delta_max] {
                    let noise = NoiseSpec::new(NoiseKind::Gaussian, delta)?;
                    reports.push(check_variance_bound(
                        &problem, scheme, 2.0, &x, gamma, &noise, n, seed,
                    )?);
                }
            }
        }
    }

    if opts.wants("sandwich") {
        let n = opts.scaled(100_000);
        for scheme in [Scheme::L1, Scheme::L2] {
            for d in [2usize, 16] {
                let problem =
                    make_problem(ProblemKind::NonsmoothNorm, d, &ProblemParams::default())?;
                let x = point_at_distance(&problem, 1.0);
                reports.push(check_sandwich(
                    &problem,
                    scheme,
                    Setting::Nonsmooth,
                    &x,
                    0.1,
                    n,
                    seed,
                )?);
            }
            let quad = make_problem(ProblemKind::SmoothQuadratic, 4, &ProblemParams::default())?;
            let x = point_at_distance(&quad, 1.0);
            reports.push(check_sandwich(
                &quad,
                scheme,
                Setting::Smooth,
                &x,
                0.1,
                n,
                seed,
            )?);
        }
    }

    if opts.wants("lipschitz") {
        let n = opts.scaled(50_000);
        for scheme in [Scheme::L1, Scheme::L2] {
            let problem = make_problem(ProblemKind::NonsmoothNorm, 4, &ProblemParams::default())?;
            reports.push(check_smoothed_lipschitz(
                &problem, scheme, 2.0, 0.1, 8, n, seed,
            )?);
        }
    }

    if opts.wants("negative") {
        let d = 8;
        let gamma = 0.1;
        let quad = make_problem(ProblemKind::SmoothQuadratic, d, &ProblemParams::default())?;
        let x = point_at_distance(&quad, 1.0);
        let n = opts.scaled(200_000);
        for scheme in [Scheme::L1, Scheme::L2] {
            reports.push(check_unbiasedness_e_correlated(
                &quad, scheme, &x, gamma, 0.5, n, seed,
            )?);
        }
        let norm4 = make_problem(ProblemKind::NonsmoothNorm, 4, &ProblemParams::default())?;
        let xn = point_at_distance(&norm4, 1.0);
        reports.push(check_variance_understated(
            &norm4,
            Scheme::L2,
            &xn,
            0.05,
            opts.scaled(100_000),
            seed,
        )?);
    }

    Ok(reports)
}

fn point_at_distance(problem: &ProblemSpec, dist: f64) -> Vec<f64> {
    let mut x = problem.x_star.clone();
    x[0] += dist;
    x
}

/// CSV serialization of the reports (stable column order).
pub fn report_csv(reports: &[CheckReport]) -> String {
    let mut out = String::from("name,negative_control,pass,observed,bound,ci_halfwidth,n,seed\n");
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.name,
            r.negative_control,
            r.pass,
            crate::report::fmt_float(r.observed),
            crate::report::fmt_float(r.bound),
            crate::report::fmt_float(r.ci_halfwidth),
            r.n,
            r.seed
        ));
    }
    out
}

/// True iff every positive check passes and every negative control fails.
pub fn suite_ok(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.ok())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_positive_checks_pass_and_negatives_fail() {
        let opts = SuiteOptions {
            seed: 42,
            mc_scale: 0.05,
            checks: None,
        };
        let reports = run_suite(&opts).unwrap();
        assert!(!reports.is_empty());
        for r in &reports {
            assert!(
                r.ok(),
                "{}: pass={} negative={} observed={} bound={}",
                r.name,
                r.pass,
                r.negative_control,
                r.observed,
                r.bound
            );
        }
    }

    #[test]
    fn subset_selection() {
        let opts = SuiteOptions {
            seed: 1,
            mc_scale: 0.01,
            checks: Some(vec!["sandwich".into()]),
        };
        let reports = run_suite(&opts).unwrap();
        assert!(reports.iter().all(|r| r.name.starts_with("sandwich")));
    }

    #[test]
    fn empty_check_list_is_empty_report() {
        let opts = SuiteOptions {
            seed: 1,
            mc_scale: 1.0,
            checks: Some(vec![]),
        };
        let reports = run_suite(&opts).unwrap();
        assert!(reports.is_empty());
        assert!(suite_ok(&reports));
    }

    #[test]
    fn reports_are_reproducible() {
        let opts = SuiteOptions {
            seed: 9,
            mc_scale: 0.02,
            checks: Some(vec!["variance".into()]),
        };
        let a = run_suite(&opts).unwrap();
        let b = run_suite(&opts).unwrap();
        assert_eq!(report_csv(&a), report_csv(&b));
    }
}
