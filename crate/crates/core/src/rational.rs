//! Exact rationals as strings (`"12"`, `"-5/2"`) at the I/O boundary.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = |e: String| Error::Parse(format!("rational `{s}`: {e}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|e| bad(format!("{e}")))?;
            let d: BigInt = d.trim().parse().map_err(|e| bad(format!("{e}")))?;
            if d.is_zero() {
                return Err(bad("zero denominator".into()));
            }
            Ok(BigRational::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|e| bad(format!("{e}")))?;
            Ok(BigRational::from_integer(n))
        }
    }
}

pub fn from_i64(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn from_u64(n: u64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn format(r: &Rational) -> String {
    r.to_string()
}

/// `p^n` as a rational, for any integer `n`.
pub fn prime_power(p: u64, n: i64) -> Rational {
    let base = from_u64(p);
    let pos = num_traits::pow(base, n.unsigned_abs() as usize);
    if n >= 0 {
        pos
    } else {
        pos.recip()
    }
}

/// Split a nonzero rational as `p^v · (a/b)` with `p ∤ a·b`.
pub fn split_valuation(x: &Rational, p: u64) -> (i64, Rational) {
    assert!(!x.is_zero());
    let pb = BigInt::from(p);
    let mut num = x.numer().clone();
    let mut den = x.denom().clone();
    let mut v = 0i64;
    while (&num % &pb).is_zero() {
        num /= &pb;
        v += 1;
    }
    while (&den % &pb).is_zero() {
        den /= &pb;
        v -= 1;
    }
    (v, BigRational::new(num, den))
}

/// Residue of a `p`-adic unit rational `a/b` modulo `modulus` (a power of `p`).
pub fn unit_residue(x: &Rational, modulus: u64) -> u64 {
    let m = BigInt::from(modulus);
    let a = x.numer().mod_floor_big(&m);
    let b = x.denom().mod_floor_big(&m);
    let a: u64 = a.try_into().expect("reduced");
    let b: u64 = b.try_into().expect("reduced");
    let binv = crate::arith::inv_mod(b, modulus).expect("denominator is a unit");
    crate::arith::mul_mod(a, binv, modulus)
}

trait ModFloor {
    fn mod_floor_big(&self, m: &BigInt) -> BigInt;
}

impl ModFloor for BigInt {
    fn mod_floor_big(&self, m: &BigInt) -> BigInt {
        let r = self % m;
        if r.is_negative() {
            r + m
        } else {
            r
        }
    }
}

pub fn is_one(x: &Rational) -> bool {
    x.is_one()
}

pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(r)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
    let s = String::deserialize(d)?;
    parse(&s).map_err(serde::de::Error::custom)
}
