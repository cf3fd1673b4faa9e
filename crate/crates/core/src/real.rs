//! Fixed-precision binary floating point for the real-valued quantities.
//!
//! Values carry 256 bits of mantissa (about 77 decimal digits), comfortably
//! more than the 50 significant digits that are ever reported.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Mantissa bits of every [`Real`].
pub const PRECISION_BITS: usize = 256;

/// Significant digits used when a [`Real`] is rendered without an explicit
/// digit count.
pub const OUTPUT_DIGITS: usize = 50;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RealError {
    #[error("not a decimal number: {0:?}")]
    Parse(String),
    #[error("value is not finite")]
    NotFinite,
}

#[derive(Clone)]
pub struct Real(BigFloat);

impl Real {
    fn wrap(f: BigFloat) -> Self {
        Real(f)
    }

    pub fn from_i64(v: i64) -> Self {
        Real(BigFloat::from_i64(v, PRECISION_BITS))
    }

    pub fn from_f64(v: f64) -> Self {
        Real(BigFloat::from_f64(v, PRECISION_BITS))
    }

    pub fn zero() -> Self {
        Real::from_i64(0)
    }

    pub fn one() -> Self {
        Real::from_i64(1)
    }

    pub fn parse(s: &str) -> Result<Self, RealError> {
        let t = s.trim();
        let valid = !t.is_empty()
            && t.chars().all(|c| c.is_ascii_digit() || "+-.eE".contains(c))
            && t.chars().any(|c| c.is_ascii_digit());
        if !valid {
            return Err(RealError::Parse(s.to_string()));
        }
        let f = with_consts(|cc| BigFloat::parse(t, Radix::Dec, PRECISION_BITS, RM, cc));
        if f.is_nan() || f.is_inf() {
            return Err(RealError::Parse(s.to_string()));
        }
        Ok(Real(f))
    }

    pub fn from_bigint(v: &BigInt) -> Self {
        Real::parse(&v.to_string()).expect("integer literal")
    }

    pub fn from_rational(v: &BigRational) -> Self {
        &Real::from_bigint(v.numer()) / &Real::from_bigint(v.denom())
    }

    pub fn is_finite(&self) -> bool {
        !(self.0.is_nan() || self.0.is_inf())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative() && !self.0.is_zero()
    }

    pub fn abs(&self) -> Self {
        Real(self.0.abs())
    }

    pub fn ln(&self) -> Self {
        Real(with_consts(|cc| self.0.ln(PRECISION_BITS, RM, cc)))
    }

    pub fn sqrt(&self) -> Self {
        Real(self.0.sqrt(PRECISION_BITS, RM))
    }

    pub fn powi(&self, n: usize) -> Self {
        Real(self.0.powi(n, PRECISION_BITS, RM))
    }

    /// `self^e` for `self > 0`.
    pub fn powf(&self, e: &Real) -> Self {
        Real(with_consts(|cc| self.0.pow(&e.0, PRECISION_BITS, RM, cc)))
    }

    pub fn max(&self, other: &Real) -> Self {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    pub fn min(&self, other: &Real) -> Self {
        if self <= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    pub fn pi() -> Self {
        Real(with_consts(|cc| cc.pi(PRECISION_BITS, RM)))
    }

    pub fn ln2() -> Self {
        Real(with_consts(|cc| cc.ln_2(PRECISION_BITS, RM)))
    }

    /// The golden mean `(1 + sqrt 5) / 2`.
    pub fn phi() -> Self {
        &(&Real::one() + &Real::from_i64(5).sqrt()) / &Real::from_i64(2)
    }

    /// Euler's constant.
    pub fn euler_gamma() -> Self {
        static GAMMA: OnceLock<String> = OnceLock::new();
        let digits = GAMMA.get_or_init(|| euler_gamma_brent_mcmillan().to_exact_string());
        Real::parse(digits).expect("cached constant")
    }

    /// The exact binary value as a rational.
    pub fn to_rational(&self) -> Result<BigRational, RealError> {
        if !self.is_finite() {
            return Err(RealError::NotFinite);
        }
        if self.0.is_zero() {
            return Ok(BigRational::zero());
        }
        let text = self.to_exact_string();
        decimal_to_rational(&text).ok_or(RealError::Parse(text))
    }

    pub fn to_f64(&self) -> f64 {
        if self.0.is_zero() {
            return 0.0;
        }
        self.to_exact_string().parse().unwrap_or(f64::NAN)
    }

    /// Rounded half-to-even to `digits` places after the decimal point.
    pub fn to_fixed(&self, digits: usize) -> String {
        let r = self.to_rational().expect("finite value");
        round_fixed(&r, digits)
    }

    /// Rounded half-to-even to `digits` significant digits, scientific form.
    pub fn to_significant(&self, digits: usize) -> String {
        let r = self.to_rational().expect("finite value");
        if r.is_zero() {
            return format!("0.{}e0", "0".repeat(digits.saturating_sub(1)));
        }
        let mut exp = self.exponent10();
        let scaled = |e: i64| -> BigRational {
            let p = BigRational::from_integer(BigInt::from(10u32).pow(e.unsigned_abs() as u32));
            if e >= 0 {
                r.abs() / p
            } else {
                r.abs() * p
            }
        };
        // mantissa in [1, 10) after rounding to `digits` significant digits
        let mut text;
        loop {
            text = round_fixed(&scaled(exp), digits.saturating_sub(1));
            if text.starts_with("10") {
                exp += 1;
            } else if text.starts_with('0') {
                exp -= 1;
            } else {
                break;
            }
        }
        let sign = if r.is_negative() { "-" } else { "" };
        format!("{sign}{text}e{exp}")
    }

    fn exponent10(&self) -> i64 {
        let text = self.to_exact_string();
        let (_, e) = text.split_once('e').unwrap_or((&text, "0"));
        e.parse().unwrap_or(0)
    }

    fn to_exact_string(&self) -> String {
        with_consts(|cc| self.0.format(Radix::Dec, RM, cc)).expect("decimal formatting")
    }
}

/// Rounds half-to-even to exactly `digits` fraction digits.
pub fn round_fixed(r: &BigRational, digits: usize) -> String {
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = r.abs() * BigRational::from_integer(scale);
    let (q, rem) = scaled.numer().div_rem(scaled.denom());
    let twice = rem * 2u32;
    let q = match twice.cmp(scaled.denom()) {
        Ordering::Greater => q + 1u32,
        Ordering::Equal if q.is_odd() => q + 1u32,
        _ => q,
    };
    let mut text = q.to_string();
    if text.len() <= digits {
        text = format!("{}{}", "0".repeat(digits + 1 - text.len()), text);
    }
    let split = text.len() - digits;
    let sign = if r.is_negative() { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{text}")
    } else {
        format!("{sign}{}.{}", &text[..split], &text[split..])
    }
}

/// Exact value of a decimal literal such as `-1.25e-3`.
pub fn decimal_to_rational(text: &str) -> Option<BigRational> {
    let (mantissa, exp) = match text.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.trim_start_matches('+').parse::<i64>().ok()?),
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.trim_start_matches('+')),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let shift = exp - frac.len() as i64;
    let ten = BigInt::from(10u32).pow(shift.unsigned_abs() as u32);
    let mut value = if shift >= 0 {
        BigRational::from_integer(digits * ten)
    } else {
        BigRational::new(digits, ten)
    };
    if negative {
        value = -value;
    }
    Some(value)
}

/// Brent–McMillan with `e^(-4 m)` truncation error, evaluated with guard
/// bits to absorb the growth of the intermediate terms.
fn euler_gamma_brent_mcmillan() -> Real {
    let bits = PRECISION_BITS + 192;
    let m: u64 = (PRECISION_BITS as u64 * 7) / 40 + 8;
    let big = |v: u64| BigFloat::from_u64(v, bits);
    let m2 = big(m * m);
    let ln_m = with_consts(|cc| big(m).ln(bits, RM, cc));
    let mut a = ln_m.neg();
    let mut b = big(1);
    let mut u = a.clone();
    let mut v = b.clone();
    let mut k = 1u64;
    loop {
        let kf = big(k);
        b = b.mul(&m2, bits, RM).div(&big(k * k), bits, RM);
        a = a.mul(&m2, bits, RM).div(&kf, bits, RM).add(&b, bits, RM).div(&kf, bits, RM);
        u = u.add(&a, bits, RM);
        v = v.add(&b, bits, RM);
        // the terms peak near k = m and then decay factorially
        if k > 2 * m && b.exponent().unwrap_or(0) < v.exponent().unwrap_or(0) - bits as i32 {
            break;
        }
        k += 1;
    }
    let mut g = u.div(&v, bits, RM);
    g.set_precision(PRECISION_BITS, RM).expect("precision");
    Real(g)
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_significant(f.precision().unwrap_or(OUTPUT_DIGITS)))
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({})", self.to_significant(OUTPUT_DIGITS))
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.cmp(&other.0).map(|c| c.cmp(&0))
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                Real::wrap(self.0.$method(&rhs.0, PRECISION_BITS, RM))
            }
        }
        impl $trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        let mut f = self.0.clone();
        f.inv_sign();
        Real(f)
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        -&self
    }
}

impl One for Real {
    fn one() -> Self {
        Real::one()
    }
}

impl Zero for Real {
    fn zero() -> Self {
        Real::zero()
    }
    fn is_zero(&self) -> bool {
        Real::is_zero(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GAMMA_50: &str = "0.57721566490153286060651209008240243104215933593992";
    const PI_50: &str = "3.14159265358979323846264338327950288419716939937511";
    const LN2_50: &str = "0.69314718055994530941723212145817656807550013436026";
    const PHI_50: &str = "1.61803398874989484820458683436563811772030917980576";

    fn agrees(x: &Real, published: &str) {
        let digits = published.split_once('.').unwrap().1.len();
        let expect = decimal_to_rational(published).unwrap();
        let err = (x.to_rational().unwrap() - expect).abs();
        let tol = BigRational::new(1.into(), BigInt::from(10u32).pow(digits as u32));
        assert!(err < tol, "{x} vs {published}");
    }

    #[test]
    fn constants_match_published_digits() {
        agrees(&Real::euler_gamma(), GAMMA_50);
        agrees(&Real::pi(), PI_50);
        agrees(&Real::ln2(), LN2_50);
        agrees(&Real::phi(), PHI_50);
    }

    #[test]
    fn arithmetic_and_functions() {
        let two = Real::from_i64(2);
        assert_eq!(two.ln(), Real::ln2());
        assert_eq!((&two * &two).sqrt(), two);
        assert_eq!(Real::from_i64(1024).ln() / Real::ln2(), Real::from_i64(10));
        assert_eq!(two.powi(10), Real::from_i64(1024));
        assert_eq!(two.powf(&Real::parse("0.5").unwrap()), two.sqrt());
        assert!(Real::from_i64(-3).is_negative());
        assert!(!Real::zero().is_negative());
        assert!(Real::from_i64(-3) < Real::zero());
        assert_eq!(Real::from_i64(-3).abs(), Real::from_i64(3));
    }

    #[test]
    fn conversions() {
        let r = BigRational::new(1.into(), 8.into());
        assert_eq!(Real::from_rational(&r).to_rational().unwrap(), r);
        assert_eq!(Real::parse("-0.25").unwrap().to_f64(), -0.25);
        assert_eq!(Real::from_f64(1.5).to_fixed(3), "1.500");
        let big = BigInt::from(3u32).pow(300);
        assert_eq!(Real::from_bigint(&big).to_significant(5), "1.3689e143");
        assert!(Real::parse("abc").is_err());
        assert!(Real::parse("").is_err());
    }

    #[test]
    fn fixed_rounding_is_half_even() {
        let q = |p: i64, d: i64| BigRational::new(p.into(), d.into());
        assert_eq!(round_fixed(&q(1, 8), 2), "0.12");
        assert_eq!(round_fixed(&q(3, 8), 2), "0.38");
        assert_eq!(round_fixed(&q(-1, 8), 2), "-0.12");
        assert_eq!(round_fixed(&q(-1, 1000), 2), "-0.00");
        assert_eq!(round_fixed(&q(5, 2), 0), "2");
        assert_eq!(round_fixed(&q(999, 1000), 2), "1.00");
    }

    #[test]
    fn significant_digits() {
        assert_eq!(Real::from_f64(0.0009996).to_significant(3), "1.00e-3");
        assert_eq!(Real::from_i64(-42).to_significant(2), "-4.2e1");
        assert_eq!(format!("{:.4}", Real::pi()), "3.142e0");
    }

    #[test]
    fn decimal_literals() {
        let q = |p: i64, d: i64| BigRational::new(p.into(), d.into());
        assert_eq!(decimal_to_rational("-1.25e-3"), Some(q(-1, 800)));
        assert_eq!(decimal_to_rational("7e+2"), Some(q(700, 1)));
        assert_eq!(decimal_to_rational(".5"), Some(q(1, 2)));
        assert_eq!(decimal_to_rational("e5"), None);
    }
}
