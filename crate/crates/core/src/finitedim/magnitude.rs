//! Exact non-negative reals of the form `Π b_i^{e_i}` with integer bases and
//! rational exponents, enough for every width formula we evaluate.
//!
//! Bases are kept pairwise coprime and free of perfect powers. With coprime
//! bases a product equals 1 only when every exponent vanishes, so `a == b`
//! reduces to canonicalising `a / b`. Strict comparisons decide the sign of
//! `Σ e_i ln b_i`, first in floating point with an error bound, then with
//! rational enclosures of the logarithms.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::format;
use crate::params::Rational;

#[derive(Debug, Clone)]
pub struct Magnitude {
    // `None` is zero
    factors: Option<BTreeMap<BigUint, Rational>>,
}

impl Magnitude {
    pub fn zero() -> Self {
        Magnitude { factors: None }
    }

    pub fn one() -> Self {
        Magnitude { factors: Some(BTreeMap::new()) }
    }

    pub fn from_u64(n: u64) -> Self {
        Self::from_biguint(BigUint::from(n))
    }

    pub fn from_biguint(n: BigUint) -> Self {
        if n.is_zero() {
            return Self::zero();
        }
        Self::from_factors(vec![(n, Rational::one())])
    }

    /// Panics on negative input.
    pub fn from_rational(x: &Rational) -> Self {
        assert!(!x.is_negative(), "magnitudes are non-negative");
        if x.is_zero() {
            return Self::zero();
        }
        let num = x.numer().magnitude().clone();
        let den = x.denom().magnitude().clone();
        Self::from_factors(vec![(num, Rational::one()), (den, -Rational::one())])
    }

    /// `base^exp` for an integer base.
    pub fn power(base: u64, exp: Rational) -> Self {
        Self::from_u64(base).pow(&exp)
    }

    fn from_factors(list: Vec<(BigUint, Rational)>) -> Self {
        Magnitude { factors: Some(canonicalize(list)) }
    }

    pub fn is_zero(&self) -> bool {
        self.factors.is_none()
    }

    pub fn is_one(&self) -> bool {
        self.factors.as_ref().is_some_and(BTreeMap::is_empty)
    }

    /// `self^e`. `0^0 = 1`; a negative power of zero panics.
    pub fn pow(&self, e: &Rational) -> Self {
        match &self.factors {
            None if e.is_zero() => Self::one(),
            None => {
                assert!(e.is_positive(), "negative power of zero");
                Self::zero()
            }
            Some(_) if e.is_zero() => Self::one(),
            Some(f) => Magnitude { factors: Some(f.iter().map(|(b, x)| (b.clone(), x * e)).collect()) },
        }
    }

    pub fn recip(&self) -> Self {
        self.pow(&-Rational::one())
    }

    pub fn mul(&self, other: &Self) -> Self {
        match (&self.factors, &other.factors) {
            (Some(a), Some(b)) => {
                Self::from_factors(a.iter().chain(b.iter()).map(|(b, e)| (b.clone(), e.clone())).collect())
            }
            _ => Self::zero(),
        }
    }

    /// Panics when `other` is zero.
    pub fn div(&self, other: &Self) -> Self {
        self.mul(&other.recip())
    }

    /// The exact rational value when every exponent is an integer.
    pub fn to_rational(&self) -> Option<Rational> {
        let Some(f) = &self.factors else { return Some(Rational::zero()) };
        let mut acc = Rational::one();
        for (b, e) in f {
            if !e.is_integer() {
                return None;
            }
            let k = e.to_integer().to_i64()?;
            let p = Rational::from_integer(BigInt::from(b.clone())).pow(k.unsigned_abs() as i32);
            acc = if k >= 0 { acc * p } else { acc / p };
        }
        Some(acc)
    }

    /// `log2` exactly, when every base is 2.
    pub fn log2_exact(&self) -> Option<Rational> {
        let f = self.factors.as_ref()?;
        match f.len() {
            0 => Some(Rational::zero()),
            1 => f.get(&BigUint::from(2u32)).cloned(),
            _ => None,
        }
    }

    /// Floating point `log2`; `-inf` for zero.
    pub fn log2_f64(&self) -> f64 {
        match &self.factors {
            None => f64::NEG_INFINITY,
            Some(f) => f.iter().map(|(b, e)| rat_f64(e) * ln_f64(b)).sum::<f64>() / std::f64::consts::LN_2,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.log2_f64().exp2()
    }

    /// Smallest integer `k >= self`, if it fits in `u64`.
    pub fn ceil_u64(&self) -> Option<u64> {
        if self.is_zero() {
            return Some(0);
        }
        let est = self.to_f64();
        if !est.is_finite() || est > 1.8e19 {
            return None;
        }
        let mut k = est.ceil() as u64;
        while k > 0 && Magnitude::from_u64(k - 1) >= *self {
            k -= 1;
        }
        while Magnitude::from_u64(k) < *self {
            k = k.checked_add(1)?;
        }
        Some(k)
    }

    /// Largest integer `k <= self`, if it fits in `u64`.
    pub fn floor_u64(&self) -> Option<u64> {
        let c = self.ceil_u64()?;
        if Magnitude::from_u64(c) == *self {
            Some(c)
        } else {
            Some(c - 1)
        }
    }

    /// 12 significant digits; exact when the value is rational.
    pub fn decimal(&self) -> String {
        if let Some(x) = self.to_rational() {
            return format::decimal(&x);
        }
        let l10 = self.log2_f64() * std::f64::consts::LOG10_2;
        let mut e = l10.floor();
        let mut mant = 10f64.powf(l10 - e);
        if mant >= 9.999_999_999_995 {
            mant /= 10.0;
            e += 1.0;
        }
        let m = format!("{:.11}", mant);
        let m = m.trim_end_matches('0').trim_end_matches('.');
        let e = e as i64;
        if (-5..12).contains(&e) {
            // plain notation with the same digits
            let digits: String = m.chars().filter(|c| *c != '.').collect();
            if e >= 0 {
                let split = (e as usize + 1).min(digits.len());
                let (a, b) = digits.split_at(split);
                let a = format!("{a}{}", "0".repeat(e as usize + 1 - split));
                if b.is_empty() {
                    a
                } else {
                    format!("{a}.{b}")
                }
            } else {
                format!("0.{}{}", "0".repeat((-e - 1) as usize), digits)
            }
        } else {
            format!("{m}e{}{:02}", if e < 0 { '-' } else { '+' }, e.abs())
        }
    }

    fn log_sign(&self) -> Ordering {
        let f = self.factors.as_ref().expect("non-zero");
        if f.is_empty() {
            return Ordering::Equal;
        }
        let terms: Vec<f64> = f.iter().map(|(b, e)| rat_f64(e) * ln_f64(b)).collect();
        let sum: f64 = terms.iter().sum();
        let scale: f64 = terms.iter().map(|t| t.abs()).sum();
        if sum.abs() > 1e-9 * scale + 1e-300 {
            return if sum > 0.0 { Ordering::Greater } else { Ordering::Less };
        }
        exact_log_sign(f)
    }
}

fn rat_f64(x: &Rational) -> f64 {
    x.numer().to_f64().unwrap_or(f64::NAN) / x.denom().to_f64().unwrap_or(f64::NAN)
}

fn ln_f64(b: &BigUint) -> f64 {
    let bits = b.bits();
    if bits < 1000 {
        return b.to_f64().expect("finite").ln();
    }
    let shift = bits - 64;
    (b >> shift).to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
}

/// Coprime-base refinement followed by perfect power reduction.
fn canonicalize(list: Vec<(BigUint, Rational)>) -> BTreeMap<BigUint, Rational> {
    let mut basis: Vec<(BigUint, Rational)> = Vec::new();
    let mut stack: Vec<(BigUint, Rational)> = list;
    while let Some((b, e)) = stack.pop() {
        if b.is_one() || e.is_zero() {
            continue;
        }
        match basis.iter().position(|(c, _)| !b.gcd(c).is_one()) {
            None => basis.push((b, e)),
            Some(i) => {
                let (c, f) = basis.swap_remove(i);
                if b == c {
                    stack.push((b, e + f));
                } else {
                    // b·c shrinks to g·(b/g)·(c/g), so this terminates
                    let g = b.gcd(&c);
                    stack.push((&b / &g, e.clone()));
                    stack.push((&c / &g, f.clone()));
                    stack.push((g, e + f));
                }
            }
        }
    }
    basis
        .into_iter()
        .map(|(b, e)| {
            let (root, k) = perfect_power(b);
            (root, e * Rational::from_integer(k.into()))
        })
        .filter(|(_, e)| !e.is_zero())
        .collect()
}

/// `b = root^k` with `k` maximal.
fn perfect_power(mut b: BigUint) -> (BigUint, u64) {
    let mut k_total = 1u64;
    'outer: loop {
        let bits = b.bits();
        for k in 2..=bits.max(2) {
            let r = b.nth_root(k as u32);
            if r > BigUint::one() && num_traits::pow(r.clone(), k as usize) == b {
                b = r;
                k_total *= k;
                continue 'outer;
            }
        }
        return (b, k_total);
    }
}

/// Sign of `Σ e ln b` by rational enclosures, with growing series length.
fn exact_log_sign(f: &BTreeMap<BigUint, Rational>) -> Ordering {
    let mut terms = 16usize;
    loop {
        let ln2 = ln_enclosure_reduced(&Rational::from_integer(2.into()), terms);
        let (mut lo, mut hi) = (Rational::zero(), Rational::zero());
        for (b, e) in f {
            let (l, h) = ln_enclosure(b, &ln2, terms);
            if e.is_positive() {
                lo += e * &l;
                hi += e * &h;
            } else {
                lo += e * &h;
                hi += e * &l;
            }
        }
        if lo.is_positive() {
            return Ordering::Greater;
        }
        if hi.is_negative() {
            return Ordering::Less;
        }
        terms *= 2;
        assert!(terms <= 1 << 16, "logarithm comparison did not separate");
    }
}

/// Enclosure of `ln b` as `k·ln 2 + ln x` with `x = b / 2^k` in `[1, 2)`.
fn ln_enclosure(b: &BigUint, ln2: &(Rational, Rational), terms: usize) -> (Rational, Rational) {
    let k = b.bits() - 1;
    let x = Rational::new(BigInt::from(b.clone()), BigInt::one() << k);
    let (l, h) = ln_enclosure_reduced(&x, terms);
    let k = Rational::from_integer(k.into());
    (&k * &ln2.0 + l, &k * &ln2.1 + h)
}

/// `ln x = 2·atanh((x-1)/(x+1))` for `x` in `[1, 2]`, where the argument is at
/// most 1/3. The truncated series is a lower bound; the tail is at most
/// `z^(2M+1) / ((2M+1)(1-z²))`.
fn ln_enclosure_reduced(x: &Rational, terms: usize) -> (Rational, Rational) {
    let one = Rational::one();
    let z = (x - &one) / (x + &one);
    let z2 = &z * &z;
    let mut pow = z.clone();
    let mut sum = Rational::zero();
    for i in 0..terms {
        sum += &pow / Rational::from_integer((2 * i + 1).into());
        pow = round_down(&(&pow * &z2), 8 * terms as u64 + 64);
    }
    let tail = &pow / (Rational::from_integer((2 * terms + 1).into()) * (&one - &z2));
    let two = Rational::from_integer(2.into());
    let lo = round_down(&(&sum * &two), 8 * terms as u64 + 64);
    let hi = round_up(&((sum + tail) * &two), 8 * terms as u64 + 64) + Rational::new(BigInt::one(), BigInt::one() << (4 * terms + 32));
    (lo, hi)
}

fn round_down(x: &Rational, bits: u64) -> Rational {
    let scale = BigInt::one() << bits;
    Rational::new((x * Rational::from_integer(scale.clone())).floor().to_integer(), scale)
}

fn round_up(x: &Rational, bits: u64) -> Rational {
    let scale = BigInt::one() << bits;
    Rational::new((x * Rational::from_integer(scale.clone())).ceil().to_integer(), scale)
}

impl PartialEq for Magnitude {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Magnitude {}

impl PartialOrd for Magnitude {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Magnitude {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            (false, false) => self.div(other).log_sign(),
        }
    }
}

impl From<u64> for Magnitude {
    fn from(n: u64) -> Self {
        Magnitude::from_u64(n)
    }
}

impl fmt::Display for Magnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(x) = self.to_rational() {
            return write!(f, "{x}");
        }
        let factors = self.factors.as_ref().expect("zero is rational");
        let parts: Vec<String> = factors
            .iter()
            .map(|(b, e)| if e.is_one() { b.to_string() } else { format!("{b}^({e})") })
            .collect();
        write!(f, "{}", parts.join("·"))
    }
}

impl Serialize for Magnitude {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Magnitude", 2)?;
        st.serialize_field("exact", &self.to_string())?;
        st.serialize_field("decimal", &self.decimal())?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{int, rat};

    #[test]
    fn coprime_products_compare_equal() {
        let six = Magnitude::from_u64(6);
        let two_three = Magnitude::from_u64(2).mul(&Magnitude::from_u64(3));
        assert_eq!(six, two_three);
        assert!(six.div(&two_three).is_one());
        assert_eq!(Magnitude::power(4, rat(1, 2)), Magnitude::from_u64(2));
        assert_eq!(Magnitude::power(8, rat(1, 3)).to_rational(), Some(int(2)));
    }

    #[test]
    fn ordering_of_roots() {
        let a = Magnitude::power(2, rat(1, 2));
        let b = Magnitude::power(3, rat(1, 3));
        // 1.4142… against 1.4422…
        assert!(a < b);
        assert!(Magnitude::zero() < Magnitude::power(1000, rat(-7, 1)));
        assert_eq!(Magnitude::from_rational(&rat(3, 4)).to_rational(), Some(rat(3, 4)));
    }

    #[test]
    fn exact_path_separates_close_values() {
        let x: BTreeMap<BigUint, Rational> =
            [(BigUint::from(2u32), rat(1, 2)), (BigUint::from(3u32), rat(-1, 3))].into_iter().collect();
        assert_eq!(exact_log_sign(&x), Ordering::Less);
        let y: BTreeMap<BigUint, Rational> =
            [(BigUint::from(10u32), int(20)), (BigUint::from(3u32), rat(-4191, 100))].into_iter().collect();
        // 10^20 vs 3^41.91: ln ratio = 46.0517 - 46.0427 > 0
        assert_eq!(exact_log_sign(&y), Ordering::Greater);
    }

    #[test]
    fn floor_and_ceil() {
        let s = Magnitude::power(10, rat(1, 2));
        assert_eq!(s.ceil_u64(), Some(4));
        assert_eq!(s.floor_u64(), Some(3));
        assert_eq!(Magnitude::from_u64(16).ceil_u64(), Some(16));
        assert_eq!(Magnitude::power(16, rat(1, 2)).floor_u64(), Some(4));
    }

    #[test]
    fn display_and_decimal() {
        assert_eq!(Magnitude::power(5, rat(1, 2)).to_string(), "5^(1/2)");
        assert_eq!(Magnitude::power(5, rat(1, 2)).decimal(), "2.2360679775");
        assert_eq!(Magnitude::power(16, rat(-1, 4)).to_string(), "1/2");
        assert_eq!(Magnitude::zero().to_string(), "0");
        assert_eq!(Magnitude::power(2, rat(-1, 2)).decimal(), "0.707106781187");
    }
}
