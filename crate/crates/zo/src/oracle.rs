//! The noisy value oracle: f(x, xi) + delta with metered calls.
//!
//! Every query draws a fresh xi and a fresh delta and bumps an atomic call
//! counter, so composite operations can be audited call-for-call. Noise draws
//! never see the randomization direction; estimators hand the oracle a stream
//! disjoint from the one that produced `e`.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{standard_normal, BaseRng};
use crate::vector::all_finite;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    None,
    Uniform,
    Gaussian,
    Rademacher,
    /// Constant offset delta = Delta on every call. E[delta] != 0, but the
    /// second moment still satisfies E[delta^2] <= Delta^2, and independence
    /// from the direction vector keeps the estimators unbiased.
    ConstantBias,
}

#[derive(Debug, Clone, Copy)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub delta: f64,
}

impl NoiseSpec {
    pub fn none() -> Self {
        NoiseSpec {
            kind: NoiseKind::None,
            delta: 0.0,
        }
    }

    pub fn new(kind: NoiseKind, delta: f64) -> Result<Self> {
        let spec = NoiseSpec { kind, delta };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta >= 0.0) {
            return Err(Error::InvalidSpec(format!(
                "noise level delta must be >= 0, got {}",
                self.delta
            )));
        }
        Ok(())
    }

    /// One delta draw. All kinds satisfy E[delta^2] <= delta^2: the uniform
    /// kind is supported on [-sqrt(3) delta, sqrt(3) delta] so its variance is
    /// exactly delta^2.
    pub fn draw(&self, rng: &mut BaseRng) -> f64 {
        if self.delta == 0.0 {
            return 0.0;
        }
        match self.kind {
            NoiseKind::None => 0.0,
            NoiseKind::Uniform => {
                let half = 3f64.sqrt() * self.delta;
                rng.gen::<f64>() * 2.0 * half - half
            }
            NoiseKind::Gaussian => self.delta * standard_normal(rng),
            NoiseKind::Rademacher => {
                if rng.gen::<bool>() {
                    self.delta
                } else {
                    -self.delta
                }
            }
            NoiseKind::ConstantBias => self.delta,
        }
    }
}

/// Validating wrapper around [`NoiseSpec::draw`].
pub fn draw_noise(spec: &NoiseSpec, rng: &mut BaseRng) -> Result<f64> {
    spec.validate()?;
    Ok(spec.draw(rng))
}

/// A stochastic objective f(x, xi) with an analytically known xi-mean.
pub trait Objective: Sync {
    fn dim(&self) -> usize;
    fn draw_xi(&self, rng: &mut BaseRng) -> Vec<f64>;
    fn eval(&self, x: &[f64], xi: &[f64]) -> f64;
    /// E_xi[f(x, xi)], used for gap tracking and smoothed-value checks.
    fn mean(&self, x: &[f64]) -> f64;
}

/// Whether the two evaluations inside one two-point estimate share the xi draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XiMode {
    Shared,
    Independent,
}

/// Whether delta_1 and delta_2 inside one two-point estimate are one draw or two.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaMode {
    Independent,
    Shared,
}

pub struct Oracle<'a> {
    objective: &'a dyn Objective,
    noise: NoiseSpec,
    xi_mode: XiMode,
    delta_mode: DeltaMode,
    calls: AtomicU64,
}

impl<'a> Oracle<'a> {
    pub fn new(objective: &'a dyn Objective, noise: NoiseSpec) -> Self {
        Oracle {
            objective,
            noise,
            xi_mode: XiMode::Shared,
            delta_mode: DeltaMode::Independent,
            calls: AtomicU64::new(0),
        }
    }

    pub fn with_modes(mut self, xi_mode: XiMode, delta_mode: DeltaMode) -> Self {
        self.xi_mode = xi_mode;
        self.delta_mode = delta_mode;
        self
    }

    pub fn noise(&self) -> &NoiseSpec {
        &self.noise
    }

    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn reset_counter(&self) {
        self.calls.store(0, Ordering::Relaxed);
    }

    fn finite(&self, value: f64, x: &[f64]) -> Result<f64> {
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::Eval { point: x.to_vec() })
        }
    }

    /// One metered query: f(x, xi) + delta with fresh independent xi and delta.
    pub fn query(&self, x: &[f64], rng: &mut BaseRng) -> Result<f64> {
        if !all_finite(x) {
            return Err(Error::Eval { point: x.to_vec() });
        }
        let xi = self.objective.draw_xi(rng);
        let value = self.objective.eval(x, &xi) + self.noise.draw(rng);
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.finite(value, x)
    }

    /// The two metered queries of a two-point estimate. xi is shared across
    /// both points by default (common random numbers); delta_1 and delta_2 are
    /// independent by default. Counts exactly 2 calls.
    pub fn query_pair(
        &self,
        x_plus: &[f64],
        x_minus: &[f64],
        rng: &mut BaseRng,
    ) -> Result<(f64, f64)> {
        let xi1 = self.objective.draw_xi(rng);
        let f1 = self.objective.eval(x_plus, &xi1);
        let f2 = match self.xi_mode {
            XiMode::Shared => self.objective.eval(x_minus, &xi1),
            XiMode::Independent => {
                let xi2 = self.objective.draw_xi(rng);
                self.objective.eval(x_minus, &xi2)
            }
        };
        let d1 = self.noise.draw(rng);
        let d2 = match self.delta_mode {
            DeltaMode::Independent => self.noise.draw(rng),
            DeltaMode::Shared => d1,
        };
        self.calls.fetch_add(2, Ordering::Relaxed);
        Ok((
            self.finite(f1 + d1, x_plus)?,
            self.finite(f2 + d2, x_minus)?,
        ))
    }
}
