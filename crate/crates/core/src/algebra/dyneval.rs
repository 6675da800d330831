//! Arithmetic in Q[t]/(P) for squarefree P, with splitting on zero divisors,
//! and traces over the root set of P.

use std::sync::Arc;

use num_traits::{One, Zero};

use super::poly::Poly;
use super::rational::{q, Q};
use super::ring::Ring;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct DynEval {
    pub modulus: Arc<Poly>,
    pub value: Poly,
}

/// Outcome of an inversion attempt.
#[derive(Clone, Debug, PartialEq)]
pub enum Inverse {
    Unit(DynEval),
    Split(Poly, Poly),
}

impl DynEval {
    /// `modulus` is made monic; it must be squarefree.
    pub fn new(modulus: Arc<Poly>, value: Poly) -> Self {
        let value = value.rem(&modulus);
        DynEval { modulus, value }
    }

    pub fn ring(modulus: &Poly) -> Result<Arc<Poly>> {
        if modulus.degree() < 1 {
            return Err(Error::Invalid("modulus must have positive degree".into()));
        }
        if !modulus.is_squarefree() {
            return Err(Error::NonSimpleRamification);
        }
        Ok(Arc::new(modulus.monic()))
    }

    pub fn generator(modulus: &Arc<Poly>) -> Self {
        DynEval::new(modulus.clone(), Poly::x())
    }

    pub fn constant(modulus: &Arc<Poly>, c: Q) -> Self {
        DynEval::new(modulus.clone(), Poly::constant(c))
    }

    pub fn invert(&self) -> Inverse {
        let (g, s, _) = Poly::ext_gcd(&self.value, &self.modulus);
        if g.degree() == 0 {
            Inverse::Unit(DynEval::new(self.modulus.clone(), s))
        } else {
            let other = self.modulus.div_rem(&g).0.monic();
            Inverse::Split(g, other)
        }
    }

    /// Σ over roots a of P of value(a).
    pub fn trace(&self) -> Q {
        let p = power_sums(&self.modulus, self.value.degree().max(0) as usize);
        self.value.coeffs().iter().enumerate().map(|(k, c)| c * &p[k]).sum()
    }
}

impl Ring for DynEval {
    fn zero_like(&self) -> Self {
        DynEval { modulus: self.modulus.clone(), value: Poly::zero() }
    }
    fn from_q(&self, c: Q) -> Self {
        DynEval { modulus: self.modulus.clone(), value: Poly::constant(c) }
    }
    fn is_zero(&self) -> bool {
        self.value.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        DynEval { modulus: self.modulus.clone(), value: &self.value + &o.value }
    }
    fn sub(&self, o: &Self) -> Self {
        DynEval { modulus: self.modulus.clone(), value: &self.value - &o.value }
    }
    fn mul(&self, o: &Self) -> Self {
        DynEval::new(self.modulus.clone(), &self.value * &o.value)
    }
    fn neg(&self) -> Self {
        DynEval { modulus: self.modulus.clone(), value: -&self.value }
    }
    fn try_inv(&self) -> Result<Self> {
        match self.invert() {
            Inverse::Unit(x) => Ok(x),
            Inverse::Split(a, b) => Err(Error::Split(a, b)),
        }
    }
    fn scale_q(&self, c: &Q) -> Self {
        DynEval { modulus: self.modulus.clone(), value: self.value.scale(c) }
    }
}

/// Newton power sums p_0..=p_n of the roots of a polynomial.
pub fn power_sums(p: &Poly, n: usize) -> Vec<Q> {
    let p = p.monic();
    let d = p.degree().max(0) as usize;
    // elementary symmetric functions of the roots
    let e: Vec<Q> = (0..=d)
        .map(|k| {
            let c = p.coeff(d - k);
            if k % 2 == 0 {
                c
            } else {
                -c
            }
        })
        .collect();
    let mut ps = vec![q(d as i64)];
    for k in 1..=n {
        let mut s = Q::zero();
        for i in 1..k.min(d + 1) {
            let t = &e[i] * &ps[k - i];
            if i % 2 == 1 {
                s += t;
            } else {
                s -= t;
            }
        }
        if k <= d {
            let t = &e[k] * q(k as i64);
            if k % 2 == 1 {
                s += t;
            } else {
                s -= t;
            }
        }
        ps.push(s);
    }
    ps
}

/// Σ over roots a of P of num(a)/den(a).
pub fn trace_over_roots(p: &Poly, num: &Poly, den: &Poly) -> Result<Q> {
    let m = DynEval::ring(p)?;
    let d = DynEval::new(m.clone(), den.clone());
    match d.invert() {
        Inverse::Unit(inv) => Ok(DynEval::new(m, num.clone()).mul(&inv).trace()),
        Inverse::Split(_, _) => Err(Error::ZeroDivisor),
    }
}

/// Runs `f` on each factor of `p`, splitting further whenever `f` reports a
/// zero divisor, and sums the results.
pub fn sum_over_factors<T>(
    p: &Poly,
    mut f: impl FnMut(&Arc<Poly>) -> Result<T>,
    mut acc: impl FnMut(T),
) -> Result<()> {
    let mut work = vec![p.monic()];
    let mut guard = 0;
    while let Some(m) = work.pop() {
        guard += 1;
        if guard > 64 {
            return Err(Error::Invalid("modulus kept splitting".into()));
        }
        let ring = DynEval::ring(&m)?;
        match f(&ring) {
            Ok(v) => acc(v),
            Err(Error::Split(a, b)) => {
                work.push(b);
                work.push(a);
            }
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

/// Split off rational roots of P as linear factors; the rest is one factor.
pub fn rational_split(p: &Poly) -> Vec<Poly> {
    let mut rest = p.monic();
    let mut out = vec![];
    for r in p.rational_roots() {
        let l = Poly::linear_root(&r);
        rest = rest.div_rem(&l).0;
        out.push(l);
    }
    if rest.degree() >= 1 {
        out.push(rest.monic());
    }
    out
}

impl DynEval {
    pub fn is_one(&self) -> bool {
        self.value == Poly::one() || (self.value.degree() == 0 && self.value.coeff(0).is_one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::qf;

    fn p2() -> Poly {
        Poly::from_ints(&[-2, 0, 1])
    }

    #[test]
    fn traces() {
        assert_eq!(trace_over_roots(&p2(), &Poly::x(), &Poly::one()).unwrap(), q(0));
        assert_eq!(trace_over_roots(&p2(), &Poly::from_ints(&[0, 0, 1]), &Poly::one()).unwrap(), q(4));
        assert_eq!(trace_over_roots(&p2(), &Poly::one(), &Poly::from_ints(&[-3, 1])).unwrap(), qf(-6, 7));
        assert!(matches!(
            trace_over_roots(&Poly::from_ints(&[-1, 0, 1]), &Poly::one(), &Poly::from_ints(&[-1, 1])),
            Err(Error::ZeroDivisor)
        ));
    }

    #[test]
    fn inversion() {
        let m = DynEval::ring(&p2()).unwrap();
        let one = DynEval::constant(&m, q(1));
        assert_eq!(one.invert(), Inverse::Unit(one.clone()));
        let t = DynEval::generator(&m);
        assert_eq!(t.invert(), Inverse::Unit(DynEval::new(m.clone(), Poly::new(vec![q(0), qf(1, 2)]))));
        let m = DynEval::ring(&Poly::from_ints(&[-1, 0, 1])).unwrap();
        let e = DynEval::new(m, Poly::from_ints(&[-1, 1]));
        assert_eq!(e.invert(), Inverse::Split(Poly::from_ints(&[-1, 1]), Poly::from_ints(&[1, 1])));
    }

    #[test]
    fn power_sums_cubic() {
        // roots 1, 2, 3
        let p = Poly::from_ints(&[-6, 11, -6, 1]);
        let ps = power_sums(&p, 4);
        assert_eq!(ps, vec![q(3), q(6), q(14), q(36), q(98)]);
    }
}
