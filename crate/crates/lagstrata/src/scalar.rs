//! Exact coefficient fields: arbitrary-precision rationals and small prime fields.

use std::fmt::{self, Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde_json::Value;

use crate::error::{Error, Result};

/// An exact field. Elements carry enough context (`Ctx`) to build zero and one.
pub trait Field:
    Clone
    + PartialEq
    + Debug
    + Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    type Ctx: Copy + Debug + PartialEq + Send + Sync + 'static;

    fn ctx(&self) -> Self::Ctx;
    fn zero(ctx: Self::Ctx) -> Self;
    fn one(ctx: Self::Ctx) -> Self;
    fn from_i64(ctx: Self::Ctx, value: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn inv(&self) -> Option<Self>;
    fn random<R: Rng + ?Sized>(ctx: Self::Ctx, rng: &mut R) -> Self;
    fn to_json(&self) -> Value;
    /// 0 for the rationals.
    fn characteristic(ctx: Self::Ctx) -> u32;

    fn is_one(&self) -> bool {
        *self == Self::one(self.ctx())
    }

    fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|inverse| self.clone() * inverse)
    }
}

/// Fails with `FieldMismatch` unless both contexts agree.
pub fn same_field<F: Field>(a: F::Ctx, b: F::Ctx) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::FieldMismatch(format!("{a:?} vs {b:?}")))
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational(pub BigRational);

impl Rational {
    pub fn new(numer: i64, denom: i64) -> Self {
        Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn to_i64(&self) -> Option<i64> {
        if self.0.is_integer() {
            self.0.to_integer().to_i64()
        } else {
            None
        }
    }
}

impl Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        Rational(self.0 + rhs.0)
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        Rational(self.0 - rhs.0)
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        Rational(self.0 * rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Field for Rational {
    type Ctx = ();

    fn ctx(&self) {}

    fn zero(_: ()) -> Self {
        Rational(BigRational::zero())
    }

    fn one(_: ()) -> Self {
        Rational(BigRational::one())
    }

    fn from_i64(_: (), value: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(value)))
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn inv(&self) -> Option<Self> {
        if self.0.is_zero() {
            None
        } else {
            Some(Rational(self.0.recip()))
        }
    }

    /// Small numerators and denominators so that denominators actually occur.
    fn random<R: Rng + ?Sized>(_: (), rng: &mut R) -> Self {
        let numer: i64 = rng.gen_range(-20..=20);
        let denom: i64 = rng.gen_range(1..=6);
        Rational::new(numer, denom)
    }

    fn to_json(&self) -> Value {
        Value::String(format!("{}/{}", self.0.numer(), self.0.denom()))
    }

    fn characteristic(_: ()) -> u32 {
        0
    }
}

impl Rational {
    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }
}

/// A prime modulus, validated at construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Prime(u32);

pub const MAX_PRIME: u32 = 1000;

impl Prime {
    pub fn new(p: u32) -> Result<Prime> {
        if p < 2 || p > MAX_PRIME || !(2..p).take_while(|d| d * d <= p).all(|d| p % d != 0) {
            return Err(Error::InvalidPrime(p));
        }
        Ok(Prime(p))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn element(self, value: i64) -> Fp {
        Fp::from_i64(self, value)
    }
}

/// Element of F_p; the modulus travels with the value.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    value: u32,
    modulus: u32,
}

impl Fp {
    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.modulus
    }

    #[inline]
    fn check(self, rhs: Fp) {
        assert_eq!(self.modulus, rhs.modulus, "field mismatch: F_{} vs F_{}", self.modulus, rhs.modulus);
    }

    fn pow(self, mut exp: u32) -> Fp {
        let p = self.modulus as u64;
        let mut base = self.value as u64;
        let mut acc = 1u64 % p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            exp >>= 1;
        }
        Fp { value: acc as u32, modulus: self.modulus }
    }
}

impl Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

impl Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for Fp {
    type Output = Fp;
    #[inline]
    fn add(self, rhs: Fp) -> Fp {
        self.check(rhs);
        let sum = self.value + rhs.value;
        Fp { value: if sum >= self.modulus { sum - self.modulus } else { sum }, modulus: self.modulus }
    }
}

impl Sub for Fp {
    type Output = Fp;
    #[inline]
    fn sub(self, rhs: Fp) -> Fp {
        self.check(rhs);
        let value = if self.value >= rhs.value { self.value - rhs.value } else { self.value + self.modulus - rhs.value };
        Fp { value, modulus: self.modulus }
    }
}

impl Mul for Fp {
    type Output = Fp;
    #[inline]
    fn mul(self, rhs: Fp) -> Fp {
        self.check(rhs);
        Fp { value: self.value * rhs.value % self.modulus, modulus: self.modulus }
    }
}

impl Neg for Fp {
    type Output = Fp;
    #[inline]
    fn neg(self) -> Fp {
        Fp { value: if self.value == 0 { 0 } else { self.modulus - self.value }, modulus: self.modulus }
    }
}

impl Field for Fp {
    type Ctx = Prime;

    fn ctx(&self) -> Prime {
        Prime(self.modulus)
    }

    fn zero(ctx: Prime) -> Self {
        Fp { value: 0, modulus: ctx.0 }
    }

    fn one(ctx: Prime) -> Self {
        Fp { value: 1, modulus: ctx.0 }
    }

    fn from_i64(ctx: Prime, value: i64) -> Self {
        Fp { value: value.rem_euclid(ctx.0 as i64) as u32, modulus: ctx.0 }
    }

    fn is_zero(&self) -> bool {
        self.value == 0
    }

    /// Fermat inverse.
    fn inv(&self) -> Option<Self> {
        if self.value == 0 {
            None
        } else {
            Some(self.pow(self.modulus - 2))
        }
    }

    fn random<R: Rng + ?Sized>(ctx: Prime, rng: &mut R) -> Self {
        Fp { value: rng.gen_range(0..ctx.0), modulus: ctx.0 }
    }

    fn to_json(&self) -> Value {
        Value::from(self.value)
    }

    fn characteristic(ctx: Prime) -> u32 {
        ctx.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn prime_validation() {
        assert!(Prime::new(101).is_ok());
        assert!(Prime::new(2).is_ok());
        assert!(Prime::new(997).is_ok());
        assert!(Prime::new(1).is_err());
        assert!(Prime::new(91).is_err());
        assert!(Prime::new(1009).is_err());
    }

    #[test]
    fn fermat_inverse_is_inverse() {
        let p = Prime::new(101).unwrap();
        for v in 1..101 {
            let x = p.element(v);
            assert!((x * x.inv().unwrap()).is_one());
        }
        assert!(p.element(0).inv().is_none());
    }

    #[test]
    fn exactness_over_both_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = Prime::new(13).unwrap();
        for _ in 0..200 {
            let a = Fp::random(p, &mut rng);
            let b = Fp::random(p, &mut rng);
            assert_eq!((a + b) - b, a);
            if !b.is_zero() {
                assert_eq!((a * b).div(&b).unwrap(), a);
            }
            let x = Rational::random((), &mut rng);
            let y = Rational::random((), &mut rng);
            assert_eq!((x.clone() + y.clone()) - y.clone(), x);
            if !y.is_zero() {
                assert_eq!((x.clone() * y.clone()).div(&y).unwrap(), x);
            }
        }
    }

    #[test]
    #[should_panic(expected = "field mismatch")]
    fn mixing_moduli_panics() {
        let _ = Prime::new(5).unwrap().element(1) + Prime::new(7).unwrap().element(1);
    }

    #[test]
    fn json_forms() {
        assert_eq!(Rational::new(-3, 6).to_json(), Value::String("-1/2".into()));
        assert_eq!(Prime::new(7).unwrap().element(-1).to_json(), Value::from(6));
    }
}
