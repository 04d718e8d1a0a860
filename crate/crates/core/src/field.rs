//! Prime field arithmetic with a runtime modulus.
//!
//! Scalars are stored as canonical representatives in `[0, p)` and every
//! operation reduces eagerly. The modulus is validated once, when a
//! [`PrimeField`] is constructed; everything downstream carries the
//! validated field and trusts it.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest modulus accepted by the library.
pub const MAX_PRIME: u64 = 1 << 31;

/// A validated odd prime modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PrimeField {
    p: u32,
    /// `floor(2^64 / p)`, for Barrett reduction.
    m: u64,
}

impl TryFrom<u64> for PrimeField {
    type Error = Error;
    fn try_from(p: u64) -> Result<Self> {
        PrimeField::new(p)
    }
}

impl From<PrimeField> for u64 {
    fn from(f: PrimeField) -> u64 {
        f.p as u64
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !(3..MAX_PRIME).contains(&p) || !is_prime(p) {
            return Err(Error::BadPrime(p));
        }
        Ok(PrimeField::from_raw(p as u32))
    }

    #[inline]
    pub(crate) fn from_raw(p: u32) -> Self {
        PrimeField {
            p,
            // p is odd, so this equals floor(2^64 / p)
            m: u64::MAX / p as u64,
        }
    }

    #[inline]
    pub fn p(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce(self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        let p = self.p as u64;
        (if s >= p { s - p } else { s }) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            (a as u64 + self.p as u64 - b as u64) as u32
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        self.reduce_u64(a as u64 * b as u64)
    }

    /// `x mod p` for `x < 2^63`. The Barrett quotient is at most one short,
    /// so one conditional subtraction finishes the reduction.
    #[inline]
    pub fn reduce_u64(self, x: u64) -> u32 {
        debug_assert!(x < 1 << 63);
        let q = ((x as u128 * self.m as u128) >> 64) as u64;
        let r = x - q * self.p as u64;
        (if r >= self.p as u64 { r - self.p as u64 } else { r }) as u32
    }

    /// Inverse by the extended Euclidean algorithm.
    pub fn inv(self, a: u32) -> Result<u32> {
        let a = a % self.p;
        if a == 0 {
            return Err(Error::NoInverse);
        }
        let (mut r0, mut r1) = (self.p as i64, a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(self.reduce(t0))
    }

    pub fn pow(self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1 % self.p;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn scalar(self, v: i64) -> FpScalar {
        FpScalar {
            value: self.reduce(v),
            p: self.p,
        }
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(self, a: u32) -> u64 {
        let a = a % self.p;
        assert!(a != 0, "order of 0 is undefined");
        let n = self.p as u64 - 1;
        let mut order = n;
        for q in prime_factors(n) {
            while order.is_multiple_of(q) && self.pow(a, order / q) == 1 {
                order /= q;
            }
        }
        order
    }

    pub fn is_primitive_root(self, g: u32) -> bool {
        !g.is_multiple_of(self.p) && self.order(g) == self.p as u64 - 1
    }

    /// Smallest primitive root, found by trial order checking.
    pub fn primitive_root(self) -> u32 {
        (2..self.p)
            .find(|&g| self.is_primitive_root(g))
            .expect("every prime field has a primitive root")
    }

    /// `1/m!` for `m = 0..=n`. Fails when some factorial vanishes mod p.
    pub fn inverse_factorials(self, n: usize) -> Result<Vec<u32>> {
        let mut out = Vec::with_capacity(n + 1);
        let mut fact = 1u32;
        out.push(1);
        for m in 1..=n {
            fact = self.mul(fact, (m as u64 % self.p as u64) as u32);
            out.push(
                self.inv(fact)
                    .map_err(|_| Error::Precondition(format!("{m}! is not invertible modulo {}", self.p)))?,
            );
        }
        Ok(out)
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

/// A single element of F_p, tagged with its modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FpScalar {
    value: u32,
    p: u32,
}

impl FpScalar {
    pub fn new(field: PrimeField, value: i64) -> Self {
        field.scalar(value)
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn field(self) -> PrimeField {
        PrimeField::from_raw(self.p)
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn inverse(self) -> Result<FpScalar> {
        fp_inverse(self)
    }
}

/// Multiplicative inverse in F_p.
pub fn fp_inverse(a: FpScalar) -> Result<FpScalar> {
    let field = a.field();
    Ok(FpScalar {
        value: field.inv(a.value)?,
        p: a.p,
    })
}

impl fmt::Display for FpScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

macro_rules! scalar_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for FpScalar {
            type Output = FpScalar;
            #[inline]
            fn $method(self, rhs: FpScalar) -> FpScalar {
                assert_eq!(self.p, rhs.p, "mixed moduli");
                FpScalar {
                    value: self.field().$method(self.value, rhs.value),
                    p: self.p,
                }
            }
        }
    };
}

scalar_binop!(Add, add);
scalar_binop!(Sub, sub);
scalar_binop!(Mul, mul);

impl Neg for FpScalar {
    type Output = FpScalar;
    fn neg(self) -> FpScalar {
        FpScalar {
            value: self.field().neg(self.value),
            p: self.p,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    proptest::proptest! {
        #[test]
        fn barrett_matches_remainder(x in 0u64..1 << 63, pi in 0usize..5) {
            let p = [3u64, 11, 65_537, 1_000_003, 2_147_483_647][pi];
            proptest::prop_assert_eq!(f(p).reduce_u64(x) as u64, x % p);
        }
    }

    #[test]
    fn inverse_examples() {
        let f7 = f(7);
        assert_eq!(fp_inverse(f7.scalar(1)).unwrap().value(), 1);
        assert_eq!(fp_inverse(f7.scalar(3)).unwrap().value(), 5);
        assert_eq!(fp_inverse(f7.scalar(6)).unwrap().value(), 6);
        assert!(matches!(fp_inverse(f7.scalar(0)), Err(Error::NoInverse)));
        assert_eq!(Error::NoInverse.to_string(), "no inverse of 0");
    }

    #[test]
    fn inverse_all_small_primes() {
        for p in [5u64, 7, 11, 13] {
            let field = f(p);
            for a in 1..p as i64 {
                let s = field.scalar(a);
                assert_eq!((s * s.inverse().unwrap()).value(), 1);
            }
        }
    }

    #[test]
    fn rejects_non_primes() {
        for p in [0u64, 1, 2, 4, 9, 15, 1 << 31, 4294967311] {
            assert!(PrimeField::new(p).is_err(), "{p}");
        }
        assert!(PrimeField::new(2147483647).is_ok());
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(f(5).primitive_root(), 2);
        assert_eq!(f(7).primitive_root(), 3);
        assert_eq!(f(11).primitive_root(), 2);
        assert_eq!(f(13).primitive_root(), 2);
        assert!(!f(11).is_primitive_root(3));
        assert_eq!(f(11).order(3), 5);
    }

    #[test]
    fn inverse_factorials_stop_at_p() {
        let field = f(7);
        let inv = field.inverse_factorials(6).unwrap();
        assert_eq!(inv[2], 4);
        assert!(field.inverse_factorials(7).is_err());
    }

    #[test]
    fn large_modulus_arithmetic() {
        let field = f(2147483647);
        let a = field.p() - 1;
        assert_eq!(field.mul(a, a), 1);
        assert_eq!(field.add(a, a), a - 1);
        assert_eq!(field.mul(field.inv(12345).unwrap(), 12345), 1);
    }
}
