//! Dense univariate polynomials over Q.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rational::{fmt_q, parse_q, q, Q};

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    c: Vec<Q>,
}

impl Poly {
    pub fn new(mut c: Vec<Q>) -> Self {
        while c.last().map_or(false, |x| x.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Poly::new(c.iter().map(|&x| q(x)).collect())
    }

    pub fn zero() -> Self {
        Poly { c: vec![] }
    }

    pub fn one() -> Self {
        Poly::constant(Q::one())
    }

    pub fn constant(a: Q) -> Self {
        Poly::new(vec![a])
    }

    pub fn x() -> Self {
        Poly::from_ints(&[0, 1])
    }

    /// `x - a`
    pub fn linear_root(a: &Q) -> Self {
        Poly::new(vec![-a.clone(), Q::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree, with -1 for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.c.len() as i64 - 1
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.c
    }

    pub fn coeff(&self, k: usize) -> Q {
        self.c.get(k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn lead(&self) -> Q {
        self.c.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn scale(&self, a: &Q) -> Self {
        Poly::new(self.c.iter().map(|x| x * a).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&(Q::one() / self.lead()))
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, x)| x * q(k as i64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut r = Q::zero();
        for a in self.c.iter().rev() {
            r = r * x + a;
        }
        r
    }

    /// `self(other(x))`
    pub fn compose(&self, other: &Poly) -> Poly {
        let mut r = Poly::zero();
        for a in self.c.iter().rev() {
            r = &(&r * other) + &Poly::constant(a.clone());
        }
        r
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut r = Poly::one();
        for _ in 0..e {
            r = &r * self;
        }
        r
    }

    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.c.len() - 1;
        if self.c.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let inv = Q::one() / d.lead();
        let mut r = self.c.clone();
        let mut quo = vec![Q::zero(); self.c.len() - dd];
        for i in (0..quo.len()).rev() {
            let f = &r[i + dd] * &inv;
            if !f.is_zero() {
                for j in 0..=dd {
                    let t = &f * &d.c[j];
                    r[i + j] -= t;
                }
            }
            quo[i] = f;
        }
        r.truncate(dd);
        (Poly::new(quo), Poly::new(r))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.div_rem(d).1
    }

    /// Monic gcd.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns (g, s, t) with s·a + t·b = g, g monic.
    pub fn ext_gcd(a: &Poly, b: &Poly) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (qq, r) = r0.div_rem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = &s0 - &(&qq * &s1);
            s0 = std::mem::replace(&mut s1, s);
            let t = &t0 - &(&qq * &t1);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let l = Q::one() / r0.lead();
        (r0.scale(&l), s0.scale(&l), t0.scale(&l))
    }

    pub fn is_squarefree(&self) -> bool {
        self.degree() <= 0 || Poly::gcd(self, &self.derivative()).degree() == 0
    }

    /// Distinct rational roots, ascending.
    pub fn rational_roots(&self) -> Vec<Q> {
        if self.degree() < 1 {
            return vec![];
        }
        // clear denominators and strip zero roots
        let mut roots = vec![];
        let mut c = self.c.clone();
        if c[0].is_zero() {
            roots.push(Q::zero());
            while c[0].is_zero() {
                c.remove(0);
            }
        }
        let den = c.iter().fold(BigInt::one(), |a, x| a.lcm(x.denom()));
        let ints: Vec<BigInt> = c.iter().map(|x| (x * Q::from_integer(den.clone())).to_integer()).collect();
        if ints.len() > 1 {
            let p0 = ints[0].abs();
            let pn = ints.last().unwrap().abs();
            let dp = divisors(&p0);
            let dq = divisors(&pn);
            let p = Poly::new(c.clone());
            for a in &dp {
                for b in &dq {
                    for sgn in [1i64, -1] {
                        let r = Q::new(a * BigInt::from(sgn), b.clone());
                        if p.eval(&r).is_zero() && !roots.contains(&r) {
                            roots.push(r);
                        }
                    }
                }
            }
        }
        roots.sort();
        roots
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut out = vec![];
    let mut i = BigInt::one();
    while &i * &i <= *n {
        if (n % &i).is_zero() {
            out.push(i.clone());
            let j = n / &i;
            if j != i {
                out.push(j);
            }
        }
        i += 1;
    }
    out
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.c.iter().map(|x| -x).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut r = vec![Q::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                r[i + j] += a * b;
            }
        }
        Poly::new(r)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{}", fmt_q(a))?,
                1 => write!(f, "({})t", fmt_q(a))?,
                _ => write!(f, "({})t^{}", fmt_q(a), k)?,
            }
        }
        Ok(())
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_zero() {
            return s.collect_seq(["0"]);
        }
        s.collect_seq(self.c.iter().map(fmt_q))
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        let c: std::result::Result<Vec<Q>, _> = v.iter().map(|s| parse_q(s)).collect();
        Ok(Poly::new(c.map_err(serde::de::Error::custom)?))
    }
}
