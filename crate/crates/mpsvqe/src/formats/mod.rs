//! Text and binary file formats.

pub mod checkpoint;
pub mod circuit;
pub mod fragment;
pub mod hamiltonian;
pub mod template;

use crate::{Error, Result};

/// Formats like C's `%.16e`: 17 significant digits, signed exponent with at
/// least two digits (`-1.2500000000000000e-01`).
pub fn format_float(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    let s = format!("{v:.16e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

pub(crate) fn parse_float(token: &str, line: usize) -> Result<f64> {
    let v: f64 = token
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid number {token:?}")))?;
    if !v.is_finite() {
        return Err(Error::parse(line, format!("non-finite number {token:?}")));
    }
    Ok(v)
}

pub(crate) fn parse_index(token: &str, n: usize, line: usize) -> Result<usize> {
    let i: usize = token
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid index {token:?}")))?;
    if i >= n {
        return Err(Error::parse(line, format!("index {i} out of range for {n} orbitals")));
    }
    Ok(i)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_style_exponents() {
        assert_eq!(format_float(0.71375399368761816), "7.1375399368761816e-01");
        assert_eq!(format_float(-1.2524635735648981), "-1.2524635735648981e+00");
        assert_eq!(format_float(0.0), "0.0000000000000000e+00");
        assert_eq!(format_float(-0.0), "-0.0000000000000000e+00");
        assert_eq!(format_float(1.5e300), "1.5000000000000001e+300");
        assert_eq!(format_float(1.9087917632560956e-16), "1.9087917632560956e-16");
    }

    proptest::proptest! {
        #[test]
        fn text_round_trip(bits in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let text = format_float(bits);
            let back = parse_float(&text, 1).unwrap();
            proptest::prop_assert_eq!(back.to_bits(), bits.to_bits());
            proptest::prop_assert_eq!(format_float(back), text);
        }
    }
}
