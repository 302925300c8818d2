//! Small helpers around `BigRational`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Parse `"p/q"` or `"p"`.  A zero denominator is an error.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| Error::Parse(format!("bad rational '{s}'")))?;
    let d: BigInt = d.parse().map_err(|_| Error::Parse(format!("bad rational '{s}'")))?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in '{s}'")));
    }
    Ok(Q::new(n, d))
}

/// Always `num/den`, even for integers.
pub fn fmt_q(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // huge numerators: go through the logarithm-free route
        let n = x.numer().to_f64().unwrap_or(f64::NAN);
        let d = x.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn is_int(x: &Q) -> bool {
    x.is_integer()
}

pub fn as_i64(x: &Q) -> Option<i64> {
    if x.is_integer() {
        x.numer().to_i64()
    } else {
        None
    }
}

/// `2x` integer?
pub fn is_half_int(x: &Q) -> bool {
    (x * qi(2)).is_integer()
}

pub fn factorial(n: u64) -> Q {
    let mut r = BigInt::one();
    for i in 2..=n {
        r *= i;
    }
    Q::from_integer(r)
}

/// Rising factorial `(a)_n`.
pub fn poch(a: &Q, n: u64) -> Q {
    let mut r = Q::one();
    let mut t = a.clone();
    for _ in 0..n {
        r *= &t;
        t += Q::one();
    }
    r
}

pub fn binom(n: u64, k: u64) -> Q {
    if k > n {
        return Q::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// `2^e` for a signed integer exponent.
pub fn pow2(e: i64) -> Q {
    let b = Q::from_integer(BigInt::one() << e.unsigned_abs());
    if e >= 0 {
        b
    } else {
        b.recip()
    }
}

pub fn powi(x: &Q, e: u32) -> Q {
    let mut r = Q::one();
    for _ in 0..e {
        r *= x;
    }
    r
}

pub fn floor_q(x: &Q) -> BigInt {
    x.numer().div_floor(x.denom())
}

pub fn floor_i64(x: &Q) -> i64 {
    floor_q(x).to_i64().expect("floor fits in i64")
}

pub fn abs_f(x: &Q) -> Q {
    x.abs()
}
