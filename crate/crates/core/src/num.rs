//! Scalar helpers over arbitrary-precision integers and rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(v: i64) -> Int {
    Int::from(v)
}

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(Int::from(num), Int::from(den))
}

pub fn rat_from_int(v: &Int) -> Rat {
    Rat::from_integer(v.clone())
}

/// Nonnegative gcd of a sequence; zero for an all-zero (or empty) sequence.
pub fn gcd_all<'a>(values: impl IntoIterator<Item = &'a Int>) -> Int {
    values
        .into_iter()
        .fold(Int::zero(), |acc, v| acc.gcd(v))
}

pub fn lcm(a: &Int, b: &Int) -> Int {
    if a.is_zero() || b.is_zero() {
        return Int::zero();
    }
    a.lcm(b)
}

/// Floor of the square root of a nonnegative integer.
pub fn isqrt(v: &Int) -> Int {
    assert!(!v.is_negative(), "isqrt of negative value");
    v.sqrt()
}

/// Exact integer square root, if `v` is a perfect square.
pub fn exact_sqrt(v: &Int) -> Option<Int> {
    if v.is_negative() {
        return None;
    }
    let r = v.sqrt();
    if &(&r * &r) == v {
        Some(r)
    } else {
        None
    }
}

/// Exact square root of a rational, if it is the square of a rational.
pub fn exact_sqrt_rat(v: &Rat) -> Option<Rat> {
    let n = exact_sqrt(v.numer())?;
    let d = exact_sqrt(v.denom())?;
    Some(Rat::new(n, d))
}

/// Floor of sqrt(v) for a nonnegative rational.
pub fn floor_sqrt_rat(v: &Rat) -> Int {
    assert!(!v.is_negative(), "sqrt of negative rational");
    isqrt(&v.floor().to_integer())
}

/// Reduce `x` into the half-open interval `[0, modulus)`.
pub fn rat_mod(x: &Rat, modulus: &Rat) -> Rat {
    let q = (x / modulus).floor();
    x - q * modulus
}

pub fn int_mod(x: &Int, modulus: &Int) -> Int {
    x.mod_floor(modulus)
}

/// Rationals print as `p/q`, or `p` when integral.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: `{s}`"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: Int = p.trim().parse().map_err(|_| bad())?;
            let q: Int = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(p, q))
        }
        None => Ok(Rat::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Scale a rational vector by the lcm of its denominators, giving an integer vector.
pub fn clear_denominators(v: &[Rat]) -> (Vec<Int>, Int) {
    let den = v
        .iter()
        .fold(Int::one(), |acc, x| lcm(&acc, x.denom()));
    let ints = v
        .iter()
        .map(|x| (x * Rat::from_integer(den.clone())).to_integer())
        .collect();
    (ints, den)
}

pub fn ints_to_rats(v: &[Int]) -> Vec<Rat> {
    v.iter().map(rat_from_int).collect()
}
