//! Exact coefficient fields.
//!
//! Everything in the crate is generic over [`Field`]. Two families are
//! provided: arbitrary-precision rationals ([`Rat`]) and prime fields
//! ([`Fp`]). There is no floating point anywhere.

use std::fmt::{self, Debug, Display};
use std::hash::Hash;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Arbitrary-precision rational numbers, always in reduced form.
pub type Rat = BigRational;

/// An exact field of scalars.
pub trait Field:
    Clone
    + Debug
    + Display
    + PartialEq
    + Eq
    + Hash
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + Send
    + Sync
    + 'static
{
    /// Characteristic of the field (0 for the rationals).
    fn characteristic() -> u64;

    /// Short name used in reports: `Q` or `F<p>`.
    fn field_name() -> String {
        match Self::characteristic() {
            0 => "Q".to_string(),
            p => format!("F{p}"),
        }
    }

    fn from_i64(n: i64) -> Self;

    /// Multiplicative inverse; `None` for zero.
    fn inverse(&self) -> Option<Self>;

    /// Parses `n` or `n/d`.
    fn parse_scalar(s: &str) -> Option<Self>;

    /// `(-1)^k`.
    fn sign(k: usize) -> Self {
        if k.is_multiple_of(2) {
            Self::one()
        } else {
            -Self::one()
        }
    }

    fn is_minus_one(&self) -> bool {
        (self.clone() + Self::one()).is_zero()
    }
}

impl Field for BigRational {
    fn characteristic() -> u64 {
        0
    }

    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn parse_scalar(s: &str) -> Option<Self> {
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let n = BigInt::from_str(n.trim()).ok()?;
                let d = BigInt::from_str(d.trim()).ok()?;
                if d.is_zero() {
                    return None;
                }
                Some(BigRational::new(n, d))
            }
            None => Some(BigRational::from_integer(BigInt::from_str(s).ok()?)),
        }
    }
}

/// The prime field `F_P`. `P` must be prime; this is checked when the
/// first element is built through [`Fp::new`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fp<const P: u64>(u64);

const fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl<const P: u64> Fp<P> {
    const CHECK: () = assert!(is_prime(P), "Fp modulus must be prime");

    pub fn new(v: i64) -> Self {
        #[allow(clippy::let_unit_value)]
        let _ = Self::CHECK;
        Fp(v.rem_euclid(P as i64) as u64)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    fn pow(self, mut e: u64) -> Self {
        let mut base = self.0 as u128;
        let mut acc: u128 = 1;
        let p = P as u128;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        Fp(acc as u64)
    }
}

impl<const P: u64> Debug for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> Display for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> Zero for Fp<P> {
    fn zero() -> Self {
        Fp(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl<const P: u64> One for Fp<P> {
    fn one() -> Self {
        Fp::new(1)
    }
}

impl<const P: u64> Add for Fp<P> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Fp(((self.0 as u128 + rhs.0 as u128) % P as u128) as u64)
    }
}

impl<const P: u64> Sub for Fp<P> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Fp(((self.0 as u128 + P as u128 - rhs.0 as u128) % P as u128) as u64)
    }
}

impl<const P: u64> Mul for Fp<P> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Fp(((self.0 as u128 * rhs.0 as u128) % P as u128) as u64)
    }
}

impl<const P: u64> Div for Fp<P> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self * rhs.inverse().expect("division by zero in prime field")
    }
}

impl<const P: u64> Neg for Fp<P> {
    type Output = Self;
    fn neg(self) -> Self {
        Fp((P - self.0) % P)
    }
}

impl<const P: u64> AddAssign for Fp<P> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<const P: u64> SubAssign for Fp<P> {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl<const P: u64> MulAssign for Fp<P> {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl<const P: u64> Field for Fp<P> {
    fn characteristic() -> u64 {
        P
    }

    fn from_i64(n: i64) -> Self {
        Fp::new(n)
    }

    fn inverse(&self) -> Option<Self> {
        if self.0 == 0 {
            None
        } else {
            Some(self.pow(P - 2))
        }
    }

    fn parse_scalar(s: &str) -> Option<Self> {
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let n = Self::new(n.trim().parse::<i64>().ok()?);
                let d = Self::new(d.trim().parse::<i64>().ok()?);
                Some(n * d.inverse()?)
            }
            None => Some(Self::new(s.parse::<i64>().ok()?)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type F7 = Fp<7>;

    #[test]
    fn rationals_are_reduced() {
        let a = Rat::parse_scalar("6/4").unwrap();
        assert_eq!(a, Rat::parse_scalar("3/2").unwrap());
        assert_eq!(format!("{a}"), "3/2");
        let b = Rat::parse_scalar("2/-4").unwrap();
        assert_eq!(format!("{b}"), "-1/2");
    }

    #[test]
    fn prime_field_inverse() {
        for v in 1..7 {
            let x = F7::new(v);
            assert_eq!(x * x.inverse().unwrap(), F7::one());
        }
        assert!(F7::zero().inverse().is_none());
        assert_eq!(F7::new(-1), F7::new(6));
        assert_eq!(F7::parse_scalar("1/2").unwrap(), F7::new(4));
    }

    #[test]
    fn signs() {
        assert!(Rat::sign(3).is_minus_one());
        assert_eq!(F7::sign(2), F7::one());
    }
}
