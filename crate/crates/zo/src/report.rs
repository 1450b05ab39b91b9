//! Stable text serialization for results.
//!
//! Numbers are written with 17 significant digits so reruns with identical
//! configs produce byte-identical files.

/// Shortest-exact would vary in width; a fixed 17-significant-digit scientific
/// form round-trips f64 and is stable.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for x in [0.0, 1.0, -0.1, std::f64::consts::PI, 1e-300, 2.5e17] {
            let s = fmt_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }

    #[test]
    fn stable_width() {
        assert_eq!(fmt_float(1.0), "1.0000000000000000e0");
    }
}
