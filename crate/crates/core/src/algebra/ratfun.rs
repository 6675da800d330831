//! Rational functions.

use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::Serialize;

use super::mpoly::MPoly;
use super::poly::Poly;
use super::rational::Q;
use crate::error::{Error, Result};

/// Reduced univariate fraction with monic denominator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RatFun {
    pub numerator: Poly,
    pub denominator: Poly,
}

impl RatFun {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        if num.is_zero() {
            return Ok(RatFun { numerator: num, denominator: Poly::one() });
        }
        let g = Poly::gcd(&num, &den);
        let (n, _) = num.div_rem(&g);
        let (d, _) = den.div_rem(&g);
        let l = d.lead();
        let inv = Q::one() / l;
        Ok(RatFun { numerator: n.scale(&inv), denominator: d.scale(&inv) })
    }

    pub fn poly(p: Poly) -> Self {
        RatFun { numerator: p, denominator: Poly::one() }
    }

    pub fn eval(&self, x: &Q) -> Result<Q> {
        let d = self.denominator.eval(x);
        if d.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        Ok(self.numerator.eval(x) / d)
    }

    pub fn derivative(&self) -> RatFun {
        let n = &(&self.numerator.derivative() * &self.denominator) - &(&self.numerator * &self.denominator.derivative());
        RatFun::new(n, self.denominator.pow(2)).unwrap()
    }

    pub fn inv(&self) -> Result<RatFun> {
        RatFun::new(self.denominator.clone(), self.numerator.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }
}

impl Add for &RatFun {
    type Output = RatFun;
    fn add(self, o: &RatFun) -> RatFun {
        let n = &(&self.numerator * &o.denominator) + &(&o.numerator * &self.denominator);
        RatFun::new(n, &self.denominator * &o.denominator).unwrap()
    }
}

impl Sub for &RatFun {
    type Output = RatFun;
    fn sub(self, o: &RatFun) -> RatFun {
        self + &(-o)
    }
}

impl Neg for &RatFun {
    type Output = RatFun;
    fn neg(self) -> RatFun {
        RatFun { numerator: -&self.numerator, denominator: self.denominator.clone() }
    }
}

impl Mul for &RatFun {
    type Output = RatFun;
    fn mul(self, o: &RatFun) -> RatFun {
        RatFun::new(&self.numerator * &o.numerator, &self.denominator * &o.denominator).unwrap()
    }
}

/// Multivariate fraction; no gcd reduction, equality by cross-multiplication.
#[derive(Clone, Debug)]
pub struct MRatFun {
    pub num: MPoly,
    pub den: MPoly,
}

impl MRatFun {
    pub fn new(num: MPoly, den: MPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        Ok(MRatFun { num, den })
    }

    pub fn same_as(&self, o: &MRatFun) -> bool {
        (&self.num * &o.den) == (&o.num * &self.den)
    }

    pub fn add(&self, o: &MRatFun) -> MRatFun {
        MRatFun { num: &(&self.num * &o.den) + &(&o.num * &self.den), den: &self.den * &o.den }
    }

    pub fn mul(&self, o: &MRatFun) -> MRatFun {
        MRatFun { num: &self.num * &o.num, den: &self.den * &o.den }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::q;

    #[test]
    fn reduce_and_differentiate() {
        let r = RatFun::new(Poly::from_ints(&[-1, 0, 1]), Poly::from_ints(&[-2, 2])).unwrap();
        assert_eq!(r.numerator, Poly::new(vec![Q::one() / q(2), Q::one() / q(2)]));
        assert_eq!(r.denominator, Poly::one());
        // X = z/(1+z²), X' = (1−z²)/(1+z²)²
        let x = RatFun::new(Poly::x(), Poly::from_ints(&[1, 0, 1])).unwrap();
        let d = x.derivative();
        assert_eq!(d.numerator, Poly::from_ints(&[1, 0, -1]));
        assert_eq!(d.denominator, Poly::from_ints(&[1, 0, 2, 0, 1]));
    }
}
