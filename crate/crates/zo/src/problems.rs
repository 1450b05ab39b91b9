//! Convex stochastic test objectives with analytically known constants.
//!
//! Each problem carries its minimizer, optimal value, Lipschitz constants and
//! feasible set, so optimization gaps and every closed-form bound can be
//! checked exactly. The stochastic term enters linearly, which keeps the
//! xi-mean objective available in closed form.

use rand::Rng;

use crate::error::{Error, Result};
use crate::oracle::Objective;
use crate::rng::BaseRng;
use crate::vector::{dot, norm_inf, norm_l1, norm_l2, sub};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    /// f(x, xi) = ||x - x*||_2 + <xi, x>, E[xi] = 0. Nonsmooth, M2 = 1 + b.
    NonsmoothNorm,
    /// f(x, xi) = 0.5 ||x - x* - xi||_2^2, E[xi] = 0. Smooth, L = 1.
    SmoothQuadratic,
    /// f(x, xi) = max_j |x_j - x*_j| + <xi, x>, a max of 2d affine pieces.
    PiecewiseMax,
}

#[derive(Debug, Clone)]
pub enum FeasibleSet {
    L2Ball { center: Vec<f64>, radius: f64 },
    Box { lower: Vec<f64>, upper: Vec<f64> },
}

impl FeasibleSet {
    /// Euclidean projection onto the set.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        match self {
            FeasibleSet::L2Ball { center, radius } => {
                let diff = sub(x, center);
                let norm = norm_l2(&diff);
                if norm <= *radius {
                    x.to_vec()
                } else {
                    let s = radius / norm;
                    center.iter().zip(&diff).map(|(c, d)| c + s * d).collect()
                }
            }
            FeasibleSet::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(&v, (&lo, &hi))| v.clamp(lo, hi))
                .collect(),
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        match self {
            FeasibleSet::L2Ball { center, radius } => norm_l2(&sub(x, center)) <= radius + tol,
            FeasibleSet::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(&v, (&lo, &hi))| v >= lo - tol && v <= hi + tol),
        }
    }

    /// Membership in Q_gamma = Q + B_p(gamma), the gamma-inflated set.
    pub fn contains_inflated(&self, x: &[f64], gamma: f64, p: f64) -> bool {
        // distance from Q in the p-norm is bounded below by the l2 distance
        // for p = 2 and by the l1 distance for p = 1; project and measure.
        let proj = self.project(x);
        let diff = sub(x, &proj);
        let dist = if p == 1.0 {
            norm_l1(&diff)
        } else {
            norm_l2(&diff)
        };
        dist <= gamma + 1e-12
    }
}

#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    pub d: usize,
    pub x_star: Vec<f64>,
    pub f_star: f64,
    /// Lipschitz constant of f(., xi) in the l2 norm, with E[M(xi)^2] <= M2^2.
    pub m2: f64,
    /// Lipschitz constant in the configured lp norm; equals m2 for p = 2.
    pub m: f64,
    /// Gradient Lipschitz constant, smooth kinds only.
    pub l: Option<f64>,
    pub q_set: FeasibleSet,
    pub x0: Vec<f64>,
    /// Half-width parameter b of the xi law: coordinates uniform on
    /// [-b/sqrt(d), b/sqrt(d)], so ||xi||_2 <= b.
    pub xi_b: f64,
}

#[derive(Debug, Clone)]
pub struct ProblemParams {
    pub b: f64,
    pub domain_radius: f64,
    pub x_star: Option<Vec<f64>>,
    pub x0: Option<Vec<f64>>,
    /// Used when x0 is not given: x0 = x* + start_offset * e_1.
    pub start_offset: f64,
}

impl Default for ProblemParams {
    fn default() -> Self {
        ProblemParams {
            b: 0.5,
            domain_radius: 2.0,
            x_star: None,
            x0: None,
            start_offset: 0.5,
        }
    }
}

pub fn make_problem(kind: ProblemKind, d: usize, params: &ProblemParams) -> Result<ProblemSpec> {
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    if params.b < 0.0 {
        return Err(Error::config(format!("b must be >= 0, got {}", params.b)));
    }
    if params.domain_radius <= 0.0 {
        return Err(Error::config("domain_radius must be > 0"));
    }
    let x_star = match &params.x_star {
        Some(v) if v.len() == d => v.clone(),
        Some(v) => {
            return Err(Error::config(format!(
                "x_star has length {}, expected {}",
                v.len(),
                d
            )))
        }
        None => vec![0.0; d],
    };
    let x0 = match &params.x0 {
        Some(v) if v.len() == d => v.clone(),
        Some(v) => {
            return Err(Error::config(format!(
                "x0 has length {}, expected {}",
                v.len(),
                d
            )))
        }
        None => {
            let mut v = x_star.clone();
            v[0] += params.start_offset;
            v
        }
    };
    let q_set = FeasibleSet::L2Ball {
        center: x_star.clone(),
        radius: params.domain_radius,
    };
    if !q_set.contains(&x0, 1e-12) {
        return Err(Error::config("x0 lies outside the feasible set"));
    }
    let b = params.b;
    let (m2, l, f_star) = match kind {
        ProblemKind::NonsmoothNorm => (1.0 + b, None, 0.0),
        // gradient norm on Q_gamma is at most diameter(Q) + ||xi||
        ProblemKind::SmoothQuadratic => (2.0 * params.domain_radius + b, Some(1.0), 0.0),
        ProblemKind::PiecewiseMax => (1.0 + b, None, 0.0),
    };
    Ok(ProblemSpec {
        kind,
        d,
        x_star,
        f_star,
        m2,
        m: m2,
        l,
        q_set,
        x0,
        xi_b: b,
    })
}

impl ProblemSpec {
    /// R = ||x0 - x*||_p.
    pub fn radius(&self, p: f64) -> f64 {
        let diff = sub(&self.x0, &self.x_star);
        if p == 1.0 {
            norm_l1(&diff)
        } else {
            norm_l2(&diff)
        }
    }

    /// Gradient of the xi-mean objective, where defined (smooth quadratic).
    pub fn mean_gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        match self.kind {
            ProblemKind::SmoothQuadratic => Some(sub(x, &self.x_star)),
            _ => None,
        }
    }
}

impl Objective for ProblemSpec {
    fn dim(&self) -> usize {
        self.d
    }

    fn draw_xi(&self, rng: &mut BaseRng) -> Vec<f64> {
        if self.xi_b == 0.0 {
            return vec![0.0; self.d];
        }
        let half = self.xi_b / (self.d as f64).sqrt();
        (0..self.d)
            .map(|_| rng.gen::<f64>() * 2.0 * half - half)
            .collect()
    }

    fn eval(&self, x: &[f64], xi: &[f64]) -> f64 {
        let diff = sub(x, &self.x_star);
        match self.kind {
            ProblemKind::NonsmoothNorm => norm_l2(&diff) + dot(xi, x),
            ProblemKind::SmoothQuadratic => {
                let shifted = sub(&diff, xi);
                0.5 * dot(&shifted, &shifted)
            }
            ProblemKind::PiecewiseMax => norm_inf(&diff) + dot(xi, x),
        }
    }

    fn mean(&self, x: &[f64]) -> f64 {
        let diff = sub(x, &self.x_star);
        match self.kind {
            ProblemKind::NonsmoothNorm => norm_l2(&diff),
            // E||x - x* - xi||^2 = ||x - x*||^2 + E||xi||^2; drop the additive
            // constant so mean(x*) = f_star = 0
            ProblemKind::SmoothQuadratic => 0.5 * dot(&diff, &diff),
            ProblemKind::PiecewiseMax => norm_inf(&diff),
        }
    }
}

/// f(x) - f* from the analytic mean objective.
pub fn true_gap(problem: &ProblemSpec, x: &[f64]) -> f64 {
    problem.mean(x) - problem.f_star
}
