//! Exact rational parsing and rendering.
//!
//! Probabilities and quantitative truth values are arbitrary-precision
//! rationals throughout; decimal literals are converted exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub fn zero() -> BigRational {
    BigRational::zero()
}

pub fn one() -> BigRational {
    BigRational::one()
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `p/q`, a plain integer, or a decimal string such as `0.25`.
pub fn parse_rational(text: &str) -> Result<BigRational, String> {
    let text = text.trim();
    if text.is_empty() {
        return Err("empty rational literal".to_string());
    }
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num
            .trim()
            .parse()
            .map_err(|_| format!("bad numerator in {text:?}"))?;
        let den: BigInt = den
            .trim()
            .parse()
            .map_err(|_| format!("bad denominator in {text:?}"))?;
        if den.is_zero() {
            return Err(format!("zero denominator in {text:?}"));
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((int_part, frac_part)) = text.split_once('.') {
        let int_part = if int_part.is_empty() { "0" } else { int_part };
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("bad decimal literal {text:?}"));
        }
        let negative = int_part.starts_with('-');
        let int: BigInt = int_part
            .parse()
            .map_err(|_| format!("bad decimal literal {text:?}"))?;
        let frac: BigInt = frac_part
            .parse()
            .map_err(|_| format!("bad decimal literal {text:?}"))?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let frac = BigRational::new(frac, scale);
        let int = BigRational::from_integer(int);
        return Ok(if negative { int - frac } else { int + frac });
    }
    let int: BigInt = text
        .parse()
        .map_err(|_| format!("bad rational literal {text:?}"))?;
    Ok(BigRational::from_integer(int))
}

/// Renders in lowest terms as `p/q`, or `p` when the denominator is 1.
pub fn render_rational(r: &BigRational) -> String {
    r.to_string()
}
