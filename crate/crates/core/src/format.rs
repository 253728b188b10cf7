//! Numeric text format shared by every emitted file.
//!
//! Values are written in scientific notation with 17 significant digits, which
//! round-trips every finite `f64` exactly and is independent of locale.

use sha2::{Digest, Sha256};

pub fn num(v: f64) -> String {
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{v:.16e}")
}

pub fn parse_num(s: &str) -> Option<f64> {
    match s.trim() {
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        t => t.parse().ok(),
    }
}

/// Lowercase hex SHA-256 of `text`.
pub fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fixed_layout() {
        assert_eq!(num(0.25), "2.5000000000000000e-1");
        assert_eq!(num(f64::INFINITY), "inf");
        assert_eq!(sha256_hex("").len(), 64);
    }

    proptest! {
        #[test]
        fn round_trips(v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            prop_assert_eq!(parse_num(&num(v)).unwrap().to_bits(), v.to_bits());
        }
    }
}
