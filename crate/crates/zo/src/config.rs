//! Experiment configuration: a flat JSON schema with documented defaults.
//!
//! Parsing is strict: unknown keys and invalid values produce an error naming
//! the offending key.

use serde_json::Value;

use crate::error::{Error, Result};
use crate::estimators::{Scheme, Setting};
use crate::optimizer::StepRule;
use crate::oracle::NoiseKind;
use crate::problems::ProblemKind;

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub d: usize,
    pub b: f64,
    pub scheme: Scheme,
    pub p: f64,
    pub epsilon: f64,
    pub setting: Setting,
    pub noise_kind: NoiseKind,
    /// Sweep grid: actual noise levels are multiplier * delta_max.
    pub delta_multipliers: Vec<f64>,
    /// Noise level for single runs, as a multiple of delta_max.
    pub delta_multiplier: f64,
    pub repeats: usize,
    pub seed: u64,
    pub batch: usize,
    /// Iteration budget override; the harness rule applies when absent.
    pub iters: Option<usize>,
    pub step_rule: StepRule,
    pub start_offset: f64,
    pub domain_radius: f64,
    /// Scales the verifier's Monte Carlo sample counts.
    pub mc_scale: f64,
    /// Check families for the verify command; None runs all.
    pub checks: Option<Vec<String>>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            problem: ProblemKind::NonsmoothNorm,
            d: 4,
            b: 0.5,
            scheme: Scheme::L2,
            p: 2.0,
            epsilon: 0.05,
            setting: Setting::Nonsmooth,
            noise_kind: NoiseKind::Gaussian,
            delta_multipliers: vec![0.0, 1.0, 10.0, 100.0],
            delta_multiplier: 1.0,
            repeats: 10,
            seed: 1,
            batch: 1,
            iters: None,
            step_rule: StepRule::DecreasingRSigma,
            start_offset: 0.5,
            domain_radius: 2.0,
            mc_scale: 1.0,
            checks: None,
        }
    }
}

const KNOWN_KEYS: &[&str] = &[
    "problem",
    "d",
    "b",
    "scheme",
    "p",
    "epsilon",
    "setting",
    "noise_kind",
    "delta_multipliers",
    "delta_multiplier",
    "repeats",
    "seed",
    "batch",
    "iters",
    "step_rule",
    "start_offset",
    "domain_radius",
    "mc_scale",
    "checks",
];

fn bad(key: &str, why: &str) -> Error {
    Error::config(format!("key \"{key}\": {why}"))
}

fn as_f64(v: &Value, key: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| bad(key, "expected a number"))
}

fn as_usize(v: &Value, key: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| bad(key, "expected a nonnegative integer"))
}

fn as_str<'a>(v: &'a Value, key: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| bad(key, "expected a string"))
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let root: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        msg: e.to_string(),
    })?;
    let obj = root
        .as_object()
        .ok_or_else(|| Error::config("top-level config must be a JSON object"))?;
    for key in obj.keys() {
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(bad(key, "unknown key"));
        }
    }

    let mut cfg = ExperimentConfig::default();
    let mut setting_given = false;

    for (key, v) in obj {
        match key.as_str() {
            "problem" => {
                cfg.problem = match as_str(v, key)? {
                    "nonsmooth_norm" => ProblemKind::NonsmoothNorm,
                    "smooth_quadratic" => ProblemKind::SmoothQuadratic,
                    "piecewise_max" => ProblemKind::PiecewiseMax,
                    other => return Err(bad(key, &format!("unknown problem \"{other}\""))),
                }
            }
            "d" => cfg.d = as_usize(v, key)?,
            "b" => cfg.b = as_f64(v, key)?,
            "scheme" => {
                cfg.scheme = match as_str(v, key)? {
                    "L1" => Scheme::L1,
                    "L2" => Scheme::L2,
                    other => return Err(bad(key, &format!("unknown scheme \"{other}\""))),
                }
            }
            "p" => cfg.p = as_f64(v, key)?,
            "epsilon" => cfg.epsilon = as_f64(v, key)?,
            "setting" => {
                setting_given = true;
                cfg.setting = match as_str(v, key)? {
                    "nonsmooth" => Setting::Nonsmooth,
                    "smooth" => Setting::Smooth,
                    other => return Err(bad(key, &format!("unknown setting \"{other}\""))),
                }
            }
            "noise_kind" => {
                cfg.noise_kind = match as_str(v, key)? {
                    "none" => NoiseKind::None,
                    "uniform" => NoiseKind::Uniform,
                    "gaussian" => NoiseKind::Gaussian,
                    "rademacher" => NoiseKind::Rademacher,
                    "constant_bias" => NoiseKind::ConstantBias,
                    other => return Err(bad(key, &format!("unknown noise kind \"{other}\""))),
                }
            }
            "delta_multipliers" => {
                let arr = v
                    .as_array()
                    .ok_or_else(|| bad(key, "expected an array of numbers"))?;
                cfg.delta_multipliers = arr
                    .iter()
                    .map(|x| as_f64(x, key))
                    .collect::<Result<Vec<_>>>()?;
            }
            "delta_multiplier" => cfg.delta_multiplier = as_f64(v, key)?,
            "repeats" => cfg.repeats = as_usize(v, key)?,
            "seed" => {
                cfg.seed = v
                    .as_u64()
                    .ok_or_else(|| bad(key, "expected a nonnegative integer"))?
            }
            "batch" => cfg.batch = as_usize(v, key)?,
            "iters" => {
                cfg.iters = if v.is_null() {
                    None
                } else {
                    Some(as_usize(v, key)?)
                }
            }
            "step_rule" => {
                cfg.step_rule = match as_str(v, key)? {
                    "constant_inv_L" => StepRule::ConstantInvL,
                    "decreasing_R_sigma" => StepRule::DecreasingRSigma,
                    other => return Err(bad(key, &format!("unknown step rule \"{other}\""))),
                }
            }
            "start_offset" => cfg.start_offset = as_f64(v, key)?,
            "domain_radius" => cfg.domain_radius = as_f64(v, key)?,
            "mc_scale" => cfg.mc_scale = as_f64(v, key)?,
            "checks" => {
                cfg.checks = if v.is_null() {
                    None
                } else {
                    let arr = v
                        .as_array()
                        .ok_or_else(|| bad(key, "expected an array of strings"))?;
                    Some(
                        arr.iter()
                            .map(|x| as_str(x, key).map(String::from))
                            .collect::<Result<Vec<_>>>()?,
                    )
                }
            }
            _ => unreachable!("key set checked above"),
        }
    }

    if !setting_given {
        cfg.setting = match cfg.problem {
            ProblemKind::SmoothQuadratic => Setting::Smooth,
            _ => Setting::Nonsmooth,
        };
    }

    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &ExperimentConfig) -> Result<()> {
    if cfg.d == 0 {
        return Err(bad("d", "must be >= 1"));
    }
    if !(cfg.epsilon > 0.0) {
        return Err(bad("epsilon", "must be > 0"));
    }
    if cfg.p != 1.0 && cfg.p != 2.0 {
        return Err(bad("p", "must be 1 or 2"));
    }
    if cfg.repeats == 0 {
        return Err(bad("repeats", "must be >= 1"));
    }
    if cfg.batch == 0 {
        return Err(bad("batch", "must be >= 1"));
    }
    if cfg.b < 0.0 {
        return Err(bad("b", "must be >= 0"));
    }
    if !(cfg.domain_radius > 0.0) {
        return Err(bad("domain_radius", "must be > 0"));
    }
    if !(cfg.mc_scale > 0.0) {
        return Err(bad("mc_scale", "must be > 0"));
    }
    if cfg.delta_multipliers.iter().any(|&m| m < 0.0) {
        return Err(bad("delta_multipliers", "must all be >= 0"));
    }
    if cfg.delta_multiplier < 0.0 {
        return Err(bad("delta_multiplier", "must be >= 0"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg = parse_config(
            r#"{"problem": "nonsmooth_norm", "d": 4, "scheme": "L2", "epsilon": 0.05}"#,
        )
        .unwrap();
        assert_eq!(cfg.d, 4);
        assert_eq!(cfg.scheme, Scheme::L2);
        assert_eq!(cfg.delta_multipliers, vec![0.0, 1.0, 10.0, 100.0]);
        assert_eq!(cfg.repeats, 10);
        assert_eq!(cfg.setting, Setting::Nonsmooth);
    }

    #[test]
    fn smooth_setting_derived_from_problem() {
        let cfg = parse_config(r#"{"problem": "smooth_quadratic"}"#).unwrap();
        assert_eq!(cfg.setting, Setting::Smooth);
    }

    #[test]
    fn bad_scheme_names_the_key() {
        let err = parse_config(r#"{"scheme": "L3"}"#).unwrap_err();
        assert!(err.to_string().contains("scheme"), "{err}");
    }

    #[test]
    fn bad_epsilon_names_the_key() {
        let err = parse_config(r#"{"epsilon": -1}"#).unwrap_err();
        assert!(err.to_string().contains("epsilon"), "{err}");
    }

    #[test]
    fn unknown_key_rejected() {
        let err = parse_config(r#"{"gamma_override": 0.1}"#).unwrap_err();
        assert!(err.to_string().contains("gamma_override"), "{err}");
    }

    #[test]
    fn invalid_json_is_a_parse_error() {
        assert!(matches!(
            parse_config("{not json"),
            Err(Error::Parse { .. })
        ));
    }
}
