//! Uniform samplers on the l1/l2 unit spheres and balls.
//!
//! The l1-sphere sampler draws independent standard-exponential magnitudes,
//! normalizes them to sum 1 and attaches independent Rademacher signs, which
//! is exactly uniform on the l1 sphere. The l2-sphere sampler normalizes a
//! standard Gaussian vector. Ball samples scale a sphere sample by U^(1/d).

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{standard_exponential, standard_normal, BaseRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    L1,
    L2,
}

/// Uniform sample on the unit l1 sphere S_1^d(1).
pub fn sample_sphere_l1(d: usize, rng: &mut BaseRng) -> Result<Vec<f64>> {
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let mut v: Vec<f64> = (0..d).map(|_| standard_exponential(rng)).collect();
    let total: f64 = v.iter().sum();
    for x in &mut v {
        *x /= total;
        if rng.gen::<bool>() {
            *x = -*x;
        }
    }
    Ok(v)
}

/// Uniform sample on the unit l2 sphere S_2^d(1).
pub fn sample_sphere_l2(d: usize, rng: &mut BaseRng) -> Result<Vec<f64>> {
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    loop {
        let v: Vec<f64> = (0..d).map(|_| standard_normal(rng)).collect();
        let norm = crate::vector::norm_l2(&v);
        // a zero Gaussian vector has probability zero; loop just in case
        if norm > 0.0 {
            return Ok(v.into_iter().map(|x| x / norm).collect());
        }
    }
}

/// Uniform sample in the unit lp ball B_p^d(1) for p in {1, 2}.
pub fn sample_ball(norm: Norm, d: usize, rng: &mut BaseRng) -> Result<Vec<f64>> {
    let mut v = match norm {
        Norm::L1 => sample_sphere_l1(d, rng)?,
        Norm::L2 => sample_sphere_l2(d, rng)?,
    };
    let u: f64 = rng.gen();
    let radius = u.powf(1.0 / d as f64);
    for x in &mut v {
        *x *= radius;
    }
    Ok(v)
}
