//! Rational scalars and their string form.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

/// `p/q`, or just `p` when the denominator is one.
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * BigInt::from(k))
}

pub fn binomial(n: i64, k: i64) -> Q {
    if k < 0 || k > n {
        return zero();
    }
    let mut r = one();
    for i in 0..k {
        r = r * q(n - i) / q(i + 1);
    }
    r
}

/// Generalized binomial coefficient for a rational top entry.
pub fn binomial_q(a: &Q, k: u32) -> Q {
    let mut r = one();
    for i in 0..k {
        r = r * (a - q(i as i64)) / q(i as i64 + 1);
    }
    r
}

pub fn sign_str(x: &Q) -> &'static str {
    if x.is_negative() {
        "-"
    } else {
        "+"
    }
}

/// Bernoulli numbers with B_1 = -1/2.
pub fn bernoulli_numbers(n: usize) -> Vec<Q> {
    let mut b = vec![one()];
    for m in 1..=n {
        let mut s = zero();
        for k in 0..m {
            s += binomial(m as i64 + 1, k as i64) * &b[k];
        }
        b.push(-s / q(m as i64 + 1));
    }
    b
}

pub mod serde_q {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).map_err(serde::de::Error::custom)
    }
}

pub mod serde_vec_q {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(x.iter().map(fmt_q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Q>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| parse_q(s).map_err(serde::de::Error::custom)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_roundtrip() {
        for s in ["0", "-3", "1/2", "-6/7", "12345678901234567890/7"] {
            assert_eq!(fmt_q(&parse_q(s).unwrap()), s);
        }
        assert_eq!(fmt_q(&parse_q("4/6").unwrap()), "2/3");
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn bernoulli_small() {
        let b = bernoulli_numbers(4);
        assert_eq!(b[1], qf(-1, 2));
        assert_eq!(b[2], qf(1, 6));
        assert_eq!(b[3], zero());
        assert_eq!(b[4], qf(-1, 30));
    }
}
