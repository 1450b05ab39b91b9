//! Randomized-smoothing gradient estimators and their closed-form bounds.
//!
//! The two-point estimate is (d / 2 gamma) (f_d1(x + gamma e, xi) -
//! f_d2(x - gamma e, xi)) times sign(e) for l1-sphere directions and times e
//! for l2-sphere directions. Each estimate costs exactly two oracle calls.
//! The module also evaluates the closed-form constants attached to the
//! estimators: kappa(p, d), the second-moment bounds, the smoothing bias
//! bounds and the smoothed-gradient Lipschitz constants.

use crate::error::{Error, Result};
use crate::exec;
use crate::oracle::{Objective, Oracle};
use crate::rng::RngStream;
use crate::sampling::{sample_ball, sample_sphere_l1, sample_sphere_l2, Norm};
use crate::stats::{mc_summary, StatSummary};
use crate::vector::{axpy, sign_vec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    L1,
    L2,
}

impl Scheme {
    pub fn ball_norm(self) -> Norm {
        match self {
            Scheme::L1 => Norm::L1,
            Scheme::L2 => Norm::L2,
        }
    }
}

/// Smooth vs nonsmooth problem setting; selects which bias bound and gamma
/// rule apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Setting {
    Nonsmooth,
    Smooth,
}

#[derive(Debug, Clone, Copy)]
pub struct EstimatorConfig {
    pub scheme: Scheme,
    pub gamma: f64,
    pub batch: usize,
    /// Norm exponent p in {1, 2}; the dual q is derived (q = infinity at p = 1).
    pub p: f64,
}

impl EstimatorConfig {
    pub fn new(scheme: Scheme, gamma: f64, batch: usize, p: f64) -> Result<Self> {
        let cfg = EstimatorConfig {
            scheme,
            gamma,
            batch,
            p,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0) {
            return Err(Error::config(format!(
                "gamma must be > 0, got {}",
                self.gamma
            )));
        }
        if self.batch < 1 {
            return Err(Error::config("batch must be >= 1"));
        }
        if self.p != 1.0 && self.p != 2.0 {
            return Err(Error::config(format!("p must be 1 or 2, got {}", self.p)));
        }
        Ok(())
    }

    /// Dual exponent: 1/p + 1/q = 1, with q = infinity at p = 1.
    pub fn q(&self) -> f64 {
        dual_q(self.p)
    }
}

pub fn dual_q(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

/// One two-point estimate. The direction e and the oracle's (xi, delta) draws
/// come from disjoint child streams, so the noise is independent of e by
/// construction. Consumes exactly 2 oracle calls.
pub fn grad_est(
    oracle: &Oracle,
    x: &[f64],
    cfg: &EstimatorConfig,
    stream: &RngStream,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    let d = oracle.dim();
    if x.len() != d {
        return Err(Error::config(format!(
            "point has dimension {}, oracle expects {}",
            x.len(),
            d
        )));
    }
    let mut dir_rng = stream.child(0).rng();
    let mut noise_rng = stream.child(1).rng();
    let e = match cfg.scheme {
        Scheme::L1 => sample_sphere_l1(d, &mut dir_rng)?,
        Scheme::L2 => sample_sphere_l2(d, &mut dir_rng)?,
    };
    let x_plus = axpy(x, cfg.gamma, &e);
    let x_minus = axpy(x, -cfg.gamma, &e);
    let (f1, f2) = oracle.query_pair(&x_plus, &x_minus, &mut noise_rng)?;
    let scale = d as f64 / (2.0 * cfg.gamma) * (f1 - f2);
    let out = match cfg.scheme {
        Scheme::L1 => sign_vec(&e).into_iter().map(|s| scale * s).collect(),
        Scheme::L2 => e.into_iter().map(|ei| scale * ei).collect(),
    };
    Ok(out)
}

/// l1-randomization estimate; `cfg.scheme` must be `L1`.
pub fn grad_est_l1(
    oracle: &Oracle,
    x: &[f64],
    cfg: &EstimatorConfig,
    stream: &RngStream,
) -> Result<Vec<f64>> {
    if cfg.scheme != Scheme::L1 {
        return Err(Error::config("grad_est_l1 requires scheme = L1"));
    }
    grad_est(oracle, x, cfg, stream)
}

/// l2-randomization estimate; `cfg.scheme` must be `L2`.
pub fn grad_est_l2(
    oracle: &Oracle,
    x: &[f64],
    cfg: &EstimatorConfig,
    stream: &RngStream,
) -> Result<Vec<f64>> {
    if cfg.scheme != Scheme::L2 {
        return Err(Error::config("grad_est_l2 requires scheme = L2"));
    }
    grad_est(oracle, x, cfg, stream)
}

/// Mean of `cfg.batch` independent single estimates; consumes exactly
/// 2 * batch oracle calls. Batch members get child streams by index and are
/// reduced in index order, so the result is identical with and without the
/// `parallel` feature.
pub fn batch_grad(
    oracle: &Oracle,
    x: &[f64],
    cfg: &EstimatorConfig,
    stream: &RngStream,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    let b = cfg.batch;
    let estimates = exec::map_indexed(b, |i| grad_est(oracle, x, cfg, &stream.child(i as u64)));
    let mut sum = vec![0.0; x.len()];
    for est in estimates {
        let g = est?;
        for (s, gi) in sum.iter_mut().zip(&g) {
            *s += gi;
        }
    }
    for s in &mut sum {
        *s /= b as f64;
    }
    Ok(sum)
}

/// Monte Carlo estimate of the smoothed value f_gamma(x) = E[f(x + gamma e~)]
/// with e~ uniform on the matching unit ball, using the noiseless xi-mean
/// objective.
pub fn smoothed_value_mc(
    objective: &dyn Objective,
    x: &[f64],
    gamma: f64,
    scheme: Scheme,
    n: usize,
    stream: &RngStream,
) -> Result<StatSummary> {
    if n < 2 {
        return Err(Error::config("smoothed_value_mc requires n >= 2"));
    }
    if !(gamma >= 0.0) {
        return Err(Error::config("gamma must be >= 0"));
    }
    let d = objective.dim();
    let norm = scheme.ball_norm();
    mc_summary(
        &move |rng: &mut crate::rng::BaseRng| {
            let e = sample_ball(norm, d, rng).expect("dimension checked");
            objective.mean(&axpy(x, gamma, &e))
        },
        n,
        stream,
    )
}

const KAPPA_L1_CONST: f64 =
    48.0 * (1.0 + std::f64::consts::SQRT_2) * (1.0 + std::f64::consts::SQRT_2);

/// The dimension constant in the second-moment bounds:
/// 48 (1 + sqrt 2)^2 d^(2 - 2/p) for the l1 scheme and
/// sqrt(2) min{q, ln d} d^(1 - 2/p) for the l2 scheme.
pub fn kappa(scheme: Scheme, p: f64, d: usize) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    if p != 1.0 && p != 2.0 {
        return Err(Error::config(format!("p must be 1 or 2, got {p}")));
    }
    let df = d as f64;
    Ok(match scheme {
        Scheme::L1 => KAPPA_L1_CONST * df.powf(2.0 - 2.0 / p),
        Scheme::L2 => {
            let q = dual_q(p);
            std::f64::consts::SQRT_2 * q.min(df.ln()) * df.powf(1.0 - 2.0 / p)
        }
    })
}

/// Upper bound on the estimator's second moment E||g||_q^2:
/// kappa (M2^2 + d^2 Delta^2 / (12 (1 + sqrt 2)^2 gamma^2)) for the l1 scheme,
/// kappa (d M2^2 + d^2 Delta^2 / (sqrt 2 gamma^2)) for the l2 scheme.
pub fn variance_bound(
    scheme: Scheme,
    p: f64,
    d: usize,
    m2: f64,
    delta: f64,
    gamma: f64,
) -> Result<f64> {
    if m2 < 0.0 {
        return Err(Error::config("M2 must be >= 0"));
    }
    if delta > 0.0 && !(gamma > 0.0) {
        return Err(Error::config("gamma must be > 0 when delta > 0"));
    }
    let k = kappa(scheme, p, d)?;
    let df = d as f64;
    let noise_term = if delta == 0.0 {
        0.0
    } else {
        match scheme {
            Scheme::L1 => {
                df * df * delta * delta
                    / (12.0 * (1.0 + std::f64::consts::SQRT_2).powi(2) * gamma * gamma)
            }
            Scheme::L2 => df * df * delta * delta / (std::f64::consts::SQRT_2 * gamma * gamma),
        }
    };
    Ok(match scheme {
        Scheme::L1 => k * (m2 * m2 + noise_term),
        Scheme::L2 => k * (df * m2 * m2 + noise_term),
    })
}

/// Upper bound on the smoothing gap f_gamma - f:
/// nonsmooth: 2 gamma M2 / sqrt(d) (l1) and gamma M2 (l2);
/// smooth: (2/d) gamma^2 L^2 (l1) and gamma^2 L^2 (l2).
pub fn smoothing_bias_bound(
    scheme: Scheme,
    setting: Setting,
    m2_or_l: f64,
    gamma: f64,
    d: usize,
) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let df = d as f64;
    Ok(match (scheme, setting) {
        (Scheme::L1, Setting::Nonsmooth) => 2.0 * gamma * m2_or_l / df.sqrt(),
        (Scheme::L2, Setting::Nonsmooth) => gamma * m2_or_l,
        (Scheme::L1, Setting::Smooth) => 2.0 / df * gamma * gamma * m2_or_l * m2_or_l,
        (Scheme::L2, Setting::Smooth) => gamma * gamma * m2_or_l * m2_or_l,
    })
}

/// Lipschitz constant of the smoothed gradient: d M / gamma (l1) and
/// sqrt(d) M / gamma (l2).
pub fn smoothing_lipschitz_grad(scheme: Scheme, m: f64, gamma: f64, d: usize) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::config("gamma must be > 0"));
    }
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let df = d as f64;
    Ok(match scheme {
        Scheme::L1 => df * m / gamma,
        Scheme::L2 => df.sqrt() * m / gamma,
    })
}
