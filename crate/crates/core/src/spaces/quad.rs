//! Exact arithmetic in ℚ(√2): numbers of the form a + b√2 with a, b rational.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// a + b√2, exact.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadRational {
    pub a: BigRational,
    pub b: BigRational,
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact rational value of a finite float.
pub fn rational_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

impl QuadRational {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        QuadRational { a, b }
    }

    pub fn from_ratios(a: (i64, i64), b: (i64, i64)) -> Self {
        QuadRational::new(ratio(a.0, a.1), ratio(b.0, b.1))
    }

    pub fn rational(a: BigRational) -> Self {
        QuadRational::new(a, BigRational::zero())
    }

    pub fn zero() -> Self {
        QuadRational::rational(BigRational::zero())
    }

    pub fn one() -> Self {
        QuadRational::rational(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Rational iff the √2 component vanishes.
    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Exact sign of a + b√2.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&BigRational::zero());
        let sb = self.b.cmp(&BigRational::zero());
        match (sa, sb) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (x, y) if x == y => x,
            _ => {
                // opposite signs: compare a² with 2b²
                let a2 = &self.a * &self.a;
                let b2 = &self.b * &self.b * BigRational::from_integer(BigInt::from(2));
                if a2 > b2 {
                    sa
                } else {
                    sb
                }
            }
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() == Ordering::Less {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.a.to_f64().unwrap_or(f64::NAN) + self.b.to_f64().unwrap_or(f64::NAN) * std::f64::consts::SQRT_2
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        QuadRational::new(&self.a * k, &self.b * k)
    }
}

impl Ord for QuadRational {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.clone() - other.clone()).signum()
    }
}

impl PartialOrd for QuadRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for QuadRational {
    type Output = QuadRational;
    fn add(self, rhs: Self) -> Self {
        QuadRational::new(self.a + rhs.a, self.b + rhs.b)
    }
}

impl Sub for QuadRational {
    type Output = QuadRational;
    fn sub(self, rhs: Self) -> Self {
        QuadRational::new(self.a - rhs.a, self.b - rhs.b)
    }
}

impl Neg for QuadRational {
    type Output = QuadRational;
    fn neg(self) -> Self {
        QuadRational::new(-self.a, -self.b)
    }
}

impl Mul for QuadRational {
    type Output = QuadRational;
    fn mul(self, rhs: Self) -> Self {
        let two = BigRational::from_integer(BigInt::from(2));
        QuadRational::new(
            &self.a * &rhs.a + two * &self.b * &rhs.b,
            &self.a * &rhs.b + &self.b * &rhs.a,
        )
    }
}

impl fmt::Display for QuadRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}·√2", self.a, self.b)
    }
}

#[derive(Serialize, Deserialize)]
struct QuadRepr {
    a: String,
    b: String,
}

fn parse_ratio(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n.trim().parse().ok()?, d))
        }
        None => Some(BigRational::from_integer(s.trim().parse().ok()?)),
    }
}

fn format_ratio(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl Serialize for QuadRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        QuadRepr { a: format_ratio(&self.a), b: format_ratio(&self.b) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuadRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = QuadRepr::deserialize(d)?;
        let a = parse_ratio(&r.a).ok_or_else(|| D::Error::custom(format!("bad rational {:?}", r.a)))?;
        let b = parse_ratio(&r.b).ok_or_else(|| D::Error::custom(format!("bad rational {:?}", r.b)))?;
        Ok(QuadRational::new(a, b))
    }
}

/// A rational r with |r - √2| < tol, tol > 0, from Newton steps on r² = 2.
/// Every iterate satisfies r ≥ √2, so r - √2 ≤ (r² - 2) / (2√2) < (r² - 2) / 2.
pub fn sqrt2_upper_approx(tol: &BigRational) -> BigRational {
    let two = BigRational::from_integer(BigInt::from(2));
    let mut r = ratio(3, 2);
    loop {
        let err = (&r * &r - &two) / &two;
        if &err < tol {
            return r;
        }
        r = (&r + &two / &r) / &two;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_of_mixed_terms() {
        // 3 - 2√2 ≈ 0.17 > 0
        assert_eq!(QuadRational::from_ratios((3, 1), (-2, 1)).signum(), Ordering::Greater);
        // 1 - √2 < 0
        assert_eq!(QuadRational::from_ratios((1, 1), (-1, 1)).signum(), Ordering::Less);
        assert_eq!(QuadRational::zero().signum(), Ordering::Equal);
    }

    #[test]
    fn product_uses_sqrt2_squared() {
        let s = QuadRational::from_ratios((0, 1), (1, 1));
        assert_eq!(s.clone() * s, QuadRational::from_ratios((2, 1), (0, 1)));
    }

    #[test]
    fn sqrt2_approximation_brackets_from_above() {
        let tol = ratio(1, 1_000_000_000);
        let r = sqrt2_upper_approx(&tol);
        let q = QuadRational::new(r, ratio(-1, 1));
        assert_eq!(q.signum(), Ordering::Greater);
        assert!(q.to_f64() < 1e-9);
    }

    #[test]
    fn serde_uses_fraction_strings() {
        let q = QuadRational::from_ratios((1, 3), (-2, 5));
        let s = serde_json::to_string(&q).unwrap();
        assert_eq!(s, r#"{"a":"1/3","b":"-2/5"}"#);
        let back: QuadRational = serde_json::from_str(&s).unwrap();
        assert_eq!(back, q);
    }
}
