//! Exact decimal and fraction handling at the text boundary.
//!
//! Scenario files and flags carry decimal literals (`0.7`, `1.5e-3`) or
//! fraction strings (`"1/3"`); both are converted to exact rationals. Output
//! renders rationals as decimals rounded to [`SIGNIFICANT_DIGITS`] digits,
//! and JSON additionally carries the exact numerator and denominator.

use std::str::FromStr;

use bigdecimal::BigDecimal;
use ebac_core::{Extended, Rational};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Number, Value};
use thiserror::Error;

/// Significant digits used when a value has no short exact decimal form.
pub const SIGNIFICANT_DIGITS: u64 = 15;

/// Decimal exponents beyond this are rejected rather than expanded.
const MAX_EXPONENT: i64 = 1_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumberError {
    #[error("`{0}` is not a decimal number or fraction")]
    Malformed(String),
    #[error("`{0}` has a zero denominator")]
    ZeroDenominator(String),
    #[error("`{0}` has an exponent outside ±{MAX_EXPONENT}")]
    ExponentRange(String),
}

fn parse_decimal(text: &str, whole: &str) -> Result<Rational, NumberError> {
    let decimal = BigDecimal::from_str(text.trim()).map_err(|_| NumberError::Malformed(whole.to_owned()))?;
    let (digits, scale) = decimal.into_bigint_and_exponent();
    if scale.abs() > MAX_EXPONENT {
        return Err(NumberError::ExponentRange(whole.to_owned()));
    }
    let power = BigInt::from(10).pow(scale.unsigned_abs() as u32);
    Ok(if scale >= 0 {
        Rational::new(digits, power)
    } else {
        Rational::from_integer(digits * power)
    })
}

/// Parse `"12.5"`, `"-3e-2"` or `"1/3"` (either side may be decimal) exactly.
pub fn parse_exact(text: &str) -> Result<Rational, NumberError> {
    match text.split_once('/') {
        Some((numer, denom)) => {
            let denom_value = parse_decimal(denom, text)?;
            if denom_value.is_zero() {
                return Err(NumberError::ZeroDenominator(text.to_owned()));
            }
            Ok(parse_decimal(numer, text)? / denom_value)
        }
        None => parse_decimal(text, text),
    }
}

/// Exact decimal expansion when the denominator has no prime factor other
/// than 2 and 5.
pub fn exact_decimal(value: &Rational) -> Option<String> {
    let mut rest = value.denom().clone();
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    let mut places = [0i64; 2];
    for (slot, prime) in [&two, &five].into_iter().enumerate() {
        while (&rest % prime).is_zero() {
            rest /= prime;
            places[slot] += 1;
        }
    }
    if !rest.is_one() {
        return None;
    }
    let scale = places[0].max(places[1]);
    let multiplier = BigInt::from(10).pow(scale as u32) / value.denom();
    let decimal = BigDecimal::new(value.numer() * multiplier, scale);
    Some(decimal.normalized().to_plain_string())
}

/// Decimal rendering: exact when short, otherwise rounded to
/// [`SIGNIFICANT_DIGITS`] significant digits.
pub fn render(value: &Rational) -> String {
    if let Some(text) = exact_decimal(value) {
        if text.chars().filter(char::is_ascii_digit).count() as u64 <= SIGNIFICANT_DIGITS + 5 {
            return text;
        }
    }
    let quotient = BigDecimal::new(value.numer().clone(), 0) / BigDecimal::new(value.denom().clone(), 0);
    quotient.with_prec(SIGNIFICANT_DIGITS).normalized().to_plain_string()
}

/// [`render`] with `unbounded` for an infinite value.
pub fn render_extended(value: &Extended) -> String {
    match value {
        Extended::Finite(v) => render(v),
        Extended::Infinite => "unbounded".to_owned(),
    }
}

/// JSON literal for a rational: a number when the decimal is exact, a
/// `"numer/denom"` string otherwise. Parsing it back gives the same value.
pub fn to_json_literal(value: &Rational) -> Value {
    match exact_decimal(value).and_then(|text| Number::from_str(&text).ok()) {
        Some(number) => Value::Number(number),
        None => Value::String(format!("{}/{}", value.numer(), value.denom())),
    }
}

/// Exact scenario quantity; deserializes from a JSON number or a string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exact(pub Rational);

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        to_json_literal(&self.0).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let parsed = match Value::deserialize(deserializer)? {
            Value::Number(n) => parse_exact(&n.to_string()),
            Value::String(s) => parse_exact(&s),
            other => {
                return Err(serde::de::Error::custom(format_args!(
                    "expected a number or a fraction string, found {other}"
                )))
            }
        };
        parsed.map(Exact).map_err(serde::de::Error::custom)
    }
}

/// Output quantity: rounded decimal plus the exact fraction, or `unbounded`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Quantity {
    pub value: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub num: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub den: Option<String>,
}

impl Quantity {
    pub fn finite(value: &Rational) -> Self {
        Quantity {
            value: render(value),
            num: Some(value.numer().to_string()),
            den: Some(value.denom().to_string()),
        }
    }

    pub fn extended(value: &Extended) -> Self {
        match value {
            Extended::Finite(v) => Quantity::finite(v),
            Extended::Infinite => Quantity {
                value: "unbounded".to_owned(),
                num: None,
                den: None,
            },
        }
    }
}
