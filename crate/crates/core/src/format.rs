//! Rendering of exact values: `a/b` plus a 12 significant digit decimal.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::params::Rational;

pub const SIGNIFICANT_DIGITS: usize = 12;

/// `"a/b"`, or `"a"` for integers.
pub fn exact(x: &Rational) -> String {
    x.to_string()
}

/// `x` rounded to 12 significant digits, `%g` style. Computed exactly, so
/// the output never depends on floating point behaviour.
pub fn decimal(x: &Rational) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let sign = if x.is_negative() { "-" } else { "" };
    let a = x.abs();
    let ten = BigInt::from(10);
    let mut e = a.numer().to_string().len() as i64 - a.denom().to_string().len() as i64;
    // make 10^e <= a < 10^(e+1)
    while pow10(e) > a {
        e -= 1;
    }
    while pow10(e + 1) <= a {
        e += 1;
    }
    let scaled = a / pow10(e - (SIGNIFICANT_DIGITS as i64 - 1));
    let (q, r) = scaled.numer().div_rem(scaled.denom());
    let mut digits = if r * 2 >= *scaled.denom() { q + 1 } else { q };
    if digits == ten.pow(SIGNIFICANT_DIGITS as u32) {
        digits /= &ten;
        e += 1;
    }
    let digits = digits.to_string();
    if !(-5..SIGNIFICANT_DIGITS as i64).contains(&e) {
        let mantissa = trim(&format!("{}.{}", &digits[..1], &digits[1..]));
        return format!("{sign}{mantissa}e{}{:02}", if e < 0 { '-' } else { '+' }, e.abs());
    }
    let body = if e >= 0 {
        let split = e as usize + 1;
        format!("{}.{}", &digits[..split], &digits[split..])
    } else {
        format!("0.{}{}", "0".repeat((-e - 1) as usize), digits)
    };
    format!("{sign}{}", trim(&body))
}

fn pow10(e: i64) -> Rational {
    let p = BigInt::from(10).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new(BigInt::from(1), p)
    }
}

fn trim(s: &str) -> String {
    if !s.contains('.') {
        return s.to_string();
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Serialisable exact value: `{"exact": "a/b", "decimal": "..."}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactValue(pub Rational);

impl Serialize for ExactValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ExactValue", 2)?;
        st.serialize_field("exact", &exact(&self.0))?;
        st.serialize_field("decimal", &decimal(&self.0))?;
        st.end()
    }
}

/// `serialize_with` adapter for a single rational.
pub fn ser_rational<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
    ExactValue(x.clone()).serialize(s)
}

pub fn ser_rationals<S: Serializer>(xs: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|x| ExactValue(x.clone())))
}

pub fn ser_opt_rational<S: Serializer>(x: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(x) => s.serialize_some(&ExactValue(x.clone())),
        None => s.serialize_none(),
    }
}

/// `"a/b (0.123456789012)"`.
pub fn both(x: &Rational) -> String {
    format!("{} ({})", exact(x), decimal(x))
}
