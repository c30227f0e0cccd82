use crate::error::{NjcError, Result};

/// Significant digits written for every exported number.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Locale-independent text form of `x` with 12 significant digits.
///
/// Values with `|x| < 1e-3` or `|x| >= 1e6` (decided after rounding) use
/// lowercase scientific notation (`1.23456789012e-5`), everything else
/// fixed notation. Zero is written as `0`; non-finite values are an error.
pub fn format_number(x: f64) -> Result<String> {
    if !x.is_finite() {
        return Err(NjcError::NonFiniteOutput(format!("{x}")));
    }
    if x == 0.0 {
        return Ok("0".to_string());
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let exponent: i32 = sci
        .rsplit_once('e')
        .and_then(|(_, e)| e.parse().ok())
        .expect("Rust scientific formatting always has an exponent");
    if !(-3..6).contains(&exponent) {
        return Ok(sci);
    }
    let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exponent) as usize;
    Ok(format!("{x:.decimals$}"))
}

/// Round to 12 significant digits, for JSON output.
pub(crate) fn round_significant(x: f64) -> Result<f64> {
    Ok(format_number(x)?.parse().expect("formatted number parses"))
}
