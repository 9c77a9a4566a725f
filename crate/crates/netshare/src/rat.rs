//! Exact rational arithmetic with a `+inf` sentinel.
//!
//! Every quantity in the engine (costs, shares, price-of-anarchy ratios) is an
//! exact rational so that strict inequalities can be tested without tolerance.
//! `+inf` models capacitated edges; it compares greater than every finite value
//! and absorbs addition and multiplication. Operations that would need
//! `inf - inf` or `inf / inf` panic instead of producing a silent value.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::str::FromStr;

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Rat {
    Finite(BigRational),
    Inf,
}

impl Rat {
    pub fn zero() -> Self {
        Rat::Finite(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat::Finite(BigRational::one())
    }

    pub fn int(n: i64) -> Self {
        Rat::Finite(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rat::Finite(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_big(r: BigRational) -> Self {
        Rat::Finite(r)
    }

    /// 10^(-r) as an exact rational.
    pub fn pow10_neg(r: u32) -> Self {
        Rat::Finite(BigRational::new(BigInt::one(), BigInt::from(10u32).pow(r)))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Rat::Finite(_))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Rat::Inf)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Rat::Finite(r) if r.is_zero())
    }

    pub fn is_negative(&self) -> bool {
        matches!(self, Rat::Finite(r) if r.is_negative())
    }

    pub fn as_finite(&self) -> Option<&BigRational> {
        match self {
            Rat::Finite(r) => Some(r),
            Rat::Inf => None,
        }
    }

    pub fn abs(&self) -> Rat {
        match self {
            Rat::Finite(r) => Rat::Finite(r.abs()),
            Rat::Inf => Rat::Inf,
        }
    }

    pub fn min(self, other: Rat) -> Rat {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Rat) -> Rat {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Smallest multiple of 10^(-r) that is >= self. Finite values only.
    pub fn ceil_to_decimal(&self, r: u32) -> Rat {
        let v = self
            .as_finite()
            .expect("ceil_to_decimal on infinite value");
        let scale = BigInt::from(10u32).pow(r);
        let scaled = v * BigRational::from_integer(scale.clone());
        let n = scaled.ceil().to_integer();
        Rat::Finite(BigRational::new(n, scale))
    }

    /// Decimal rendering with `digits` fractional digits (round toward zero).
    /// Advisory output only; exact comparisons always use the rational form.
    pub fn to_decimal_string(&self, digits: u32) -> String {
        match self {
            Rat::Inf => "inf".to_string(),
            Rat::Finite(r) => {
                let scale = BigInt::from(10u32).pow(digits);
                let scaled = (r * BigRational::from_integer(scale.clone())).trunc();
                let n = scaled.to_integer();
                let sign = if n.sign() == Sign::Minus { "-" } else { "" };
                let n = n.abs();
                let (int, frac) = (n.clone() / &scale, n % &scale);
                let frac_str = format!("{:0width$}", frac, width = digits as usize);
                format!("{}{}.{}", sign, int, frac_str)
            }
        }
    }

    pub fn to_f64_lossy(&self) -> f64 {
        match self {
            Rat::Inf => f64::INFINITY,
            Rat::Finite(r) => r.to_f64().unwrap_or(f64::NAN),
        }
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rat::Inf => write!(f, "inf"),
            Rat::Finite(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[derive(Debug, thiserror::Error)]
#[error("invalid rational literal: {0:?}")]
pub struct ParseRatError(String);

impl FromStr for Rat {
    type Err = ParseRatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "inf" {
            return Ok(Rat::Inf);
        }
        let parse_int = |t: &str| BigInt::from_str(t).map_err(|_| ParseRatError(s.to_string()));
        match s.split_once('/') {
            Some((p, q)) => {
                let num = parse_int(p)?;
                let den = parse_int(q)?;
                if den.is_zero() {
                    return Err(ParseRatError(s.to_string()));
                }
                Ok(Rat::Finite(BigRational::new(num, den)))
            }
            None => Ok(Rat::Finite(BigRational::from_integer(parse_int(s)?))),
        }
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Rat::Inf, Rat::Inf) => Ordering::Equal,
            (Rat::Inf, Rat::Finite(_)) => Ordering::Greater,
            (Rat::Finite(_), Rat::Inf) => Ordering::Less,
            (Rat::Finite(a), Rat::Finite(b)) => a.cmp(b),
        }
    }
}

impl Add for Rat {
    type Output = Rat;
    fn add(self, rhs: Rat) -> Rat {
        match (self, rhs) {
            (Rat::Finite(a), Rat::Finite(b)) => Rat::Finite(a + b),
            _ => Rat::Inf,
        }
    }
}

impl Add for &Rat {
    type Output = Rat;
    fn add(self, rhs: &Rat) -> Rat {
        self.clone() + rhs.clone()
    }
}

impl AddAssign for Rat {
    fn add_assign(&mut self, rhs: Rat) {
        *self = std::mem::replace(self, Rat::Inf) + rhs;
    }
}

impl Sub for Rat {
    type Output = Rat;
    fn sub(self, rhs: Rat) -> Rat {
        match (self, rhs) {
            (Rat::Finite(a), Rat::Finite(b)) => Rat::Finite(a - b),
            (Rat::Inf, Rat::Finite(_)) => Rat::Inf,
            (_, Rat::Inf) => panic!("subtraction of +inf is undefined"),
        }
    }
}

impl Sub for &Rat {
    type Output = Rat;
    fn sub(self, rhs: &Rat) -> Rat {
        self.clone() - rhs.clone()
    }
}

impl Mul for Rat {
    type Output = Rat;
    fn mul(self, rhs: Rat) -> Rat {
        match (self, rhs) {
            (Rat::Finite(a), Rat::Finite(b)) => Rat::Finite(a * b),
            _ => Rat::Inf,
        }
    }
}

impl Mul for &Rat {
    type Output = Rat;
    fn mul(self, rhs: &Rat) -> Rat {
        self.clone() * rhs.clone()
    }
}

impl Div for Rat {
    type Output = Rat;
    fn div(self, rhs: Rat) -> Rat {
        match (self, rhs) {
            (_, Rat::Inf) => panic!("division by +inf is undefined"),
            (Rat::Finite(a), Rat::Finite(b)) => {
                assert!(!b.is_zero(), "division by zero");
                Rat::Finite(a / b)
            }
            (Rat::Inf, Rat::Finite(b)) => {
                assert!(!b.is_zero(), "division by zero");
                Rat::Inf
            }
        }
    }
}

impl Div for &Rat {
    type Output = Rat;
    fn div(self, rhs: &Rat) -> Rat {
        self.clone() / rhs.clone()
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        match self {
            Rat::Finite(a) => Rat::Finite(-a),
            Rat::Inf => panic!("negation of +inf is undefined"),
        }
    }
}

impl std::iter::Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

/// Rational approximation of sqrt(n) with |q - sqrt(n)| < 10^(-digits).
pub fn sqrt_approx(n: u64, digits: u32) -> Rat {
    let scale = BigInt::from(10u32).pow(digits + 1);
    let target = BigInt::from(n) * &scale * &scale;
    let root = target.sqrt();
    Rat::Finite(BigRational::new(root, scale))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inf_ordering() {
        assert!(Rat::Inf > Rat::int(1_000_000));
        assert_eq!(Rat::Inf, Rat::Inf);
        assert!(Rat::ratio(1, 2) < Rat::one());
    }

    #[test]
    fn inf_absorbs_add_mul() {
        assert_eq!(Rat::Inf + Rat::int(3), Rat::Inf);
        assert_eq!(Rat::int(0) * Rat::Inf, Rat::Inf);
    }

    #[test]
    #[should_panic]
    fn inf_minus_inf_is_error() {
        let _ = Rat::Inf - Rat::Inf;
    }

    #[test]
    #[should_panic]
    fn inf_over_inf_is_error() {
        let _ = Rat::Inf / Rat::Inf;
    }

    #[test]
    fn parse_display_roundtrip() {
        for s in ["0", "3/2", "-7/3", "inf", "42"] {
            let r: Rat = s.parse().unwrap();
            assert_eq!(r.to_string(), s);
        }
    }

    #[test]
    fn ceil_to_decimal() {
        let v: Rat = "1234/10000".parse().unwrap(); // 0.1234
        assert_eq!(v.ceil_to_decimal(3), "124/1000".parse().unwrap());
        // already on the grid
        assert_eq!(Rat::ratio(1, 8).ceil_to_decimal(3), Rat::ratio(125, 1000));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(Rat::ratio(3, 2).to_decimal_string(4), "1.5000");
        assert_eq!(Rat::ratio(-1, 3).to_decimal_string(3), "-0.333");
        assert_eq!(Rat::Inf.to_decimal_string(2), "inf");
    }

    #[test]
    fn sqrt_approx_precision() {
        let q = sqrt_approx(33, 12);
        let q2 = &q * &q;
        let err = (q2 - Rat::int(33)).abs();
        // |q^2 - 33| <= 2*sqrt(33)*|q - sqrt(33)| + |q - sqrt(33)|^2 < 13e-12
        assert!(err < Rat::ratio(13, 1) * Rat::pow10_neg(12));
    }

    proptest::proptest! {
        #[test]
        fn roundtrip_any_finite(n in -9999i64..9999, d in 1i64..9999) {
            let r = Rat::ratio(n, d);
            let back: Rat = r.to_string().parse().unwrap();
            proptest::prop_assert_eq!(back, r);
        }

        #[test]
        fn field_laws(a in -99i64..99, b in 1i64..99, c in -99i64..99, d in 1i64..99) {
            let x = Rat::ratio(a, b);
            let y = Rat::ratio(c, d);
            proptest::prop_assert_eq!(&x + &y, &y + &x);
            proptest::prop_assert_eq!(&x * &y, &y * &x);
            proptest::prop_assert_eq!(x.clone() - y.clone(), -(y.clone() - x.clone()));
            if !y.is_zero() {
                proptest::prop_assert_eq!(&(&x / &y) * &y, x);
            }
        }

        #[test]
        fn ceil_dominates_and_stays_close(n in 0i64..100_000, d in 1i64..100_000, r in 0u32..6) {
            let v = Rat::ratio(n, d);
            let up = v.ceil_to_decimal(r);
            proptest::prop_assert!(up >= v);
            proptest::prop_assert!(&up - &v < Rat::pow10_neg(r));
        }
    }
}
