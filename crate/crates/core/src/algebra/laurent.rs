//! Truncated univariate Laurent series with explicit precision tracking.
//!
//! `val` is the exponent of `c[0]`; every coefficient at exponent
//! `>= val + c.len()` is unknown.

use super::rational::{binomial_q, q, qf, Q};
use super::ring::Ring;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Laurent<R: Ring> {
    pub val: i32,
    pub c: Vec<R>,
    pub zero: R,
}

impl<R: Ring> Laurent<R> {
    /// Exact polynomial `Σ p[k] ε^k`, kept to absolute precision `prec`.
    pub fn from_poly(p: &[R], zero: &R, prec: i32) -> Self {
        let n = prec.max(0) as usize;
        let c = (0..n).map(|k| p.get(k).cloned().unwrap_or_else(|| zero.zero_like())).collect();
        let mut s = Laurent { val: 0, c, zero: zero.zero_like() };
        if prec < 0 {
            s.val = prec;
        }
        s
    }

    pub fn constant(a: R, prec: i32) -> Self {
        let z = a.zero_like();
        Laurent::from_poly(&[a], &z, prec)
    }

    /// The local parameter ε itself.
    pub fn eps(zero: &R, prec: i32) -> Self {
        Laurent::from_poly(&[zero.zero_like(), zero.one_like()], zero, prec)
    }

    pub fn prec(&self) -> i32 {
        self.val + self.c.len() as i32
    }

    pub fn coeff(&self, e: i32) -> R {
        assert!(e < self.prec(), "coefficient ε^{e} beyond precision {}", self.prec());
        if e < self.val {
            self.zero.zero_like()
        } else {
            self.c[(e - self.val) as usize].clone()
        }
    }

    pub fn normalized(mut self) -> Self {
        let k = self.c.iter().take_while(|x| x.is_zero()).count();
        self.c.drain(..k);
        self.val += k as i32;
        self
    }

    /// Lowest exponent with a nonzero coefficient, if any is known.
    pub fn valuation(&self) -> Option<i32> {
        self.c.iter().position(|x| !x.is_zero()).map(|k| self.val + k as i32)
    }

    pub fn truncate(&self, prec: i32) -> Self {
        let mut s = self.clone();
        if prec < s.prec() {
            let n = (prec - s.val).max(0) as usize;
            s.c.truncate(n);
            if n == 0 {
                s.val = prec;
            }
        }
        s
    }

    pub fn add(&self, o: &Self) -> Self {
        let val = self.val.min(o.val);
        let prec = self.prec().min(o.prec());
        if prec <= val {
            return Laurent { val: prec, c: vec![], zero: self.zero.clone() };
        }
        let c = (val..prec)
            .map(|e| {
                let a = if e >= self.val { Some(&self.c[(e - self.val) as usize]) } else { None };
                let b = if e >= o.val { Some(&o.c[(e - o.val) as usize]) } else { None };
                match (a, b) {
                    (Some(a), Some(b)) => a.add(b),
                    (Some(a), None) => a.clone(),
                    (None, Some(b)) => b.clone(),
                    (None, None) => self.zero.zero_like(),
                }
            })
            .collect();
        Laurent { val, c, zero: self.zero.clone() }
    }

    pub fn neg(&self) -> Self {
        Laurent { val: self.val, c: self.c.iter().map(|x| x.neg()).collect(), zero: self.zero.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, a: &R) -> Self {
        Laurent { val: self.val, c: self.c.iter().map(|x| x.mul(a)).collect(), zero: self.zero.clone() }
    }

    pub fn scale_q(&self, a: &Q) -> Self {
        Laurent { val: self.val, c: self.c.iter().map(|x| x.scale_q(a)).collect(), zero: self.zero.clone() }
    }

    /// Multiply by ε^k.
    pub fn shift(&self, k: i32) -> Self {
        let mut s = self.clone();
        s.val += k;
        s
    }

    pub fn mul(&self, o: &Self) -> Self {
        let a = self.clone().normalized();
        let b = o.clone().normalized();
        let n = a.c.len().min(b.c.len());
        let val = a.val + b.val;
        let mut c = vec![self.zero.zero_like(); n];
        for i in 0..n {
            if a.c[i].is_zero() {
                continue;
            }
            for j in 0..(n - i) {
                if b.c[j].is_zero() {
                    continue;
                }
                c[i + j] = c[i + j].add(&a.c[i].mul(&b.c[j]));
            }
        }
        Laurent { val, c, zero: self.zero.clone() }
    }

    pub fn inv(&self) -> Result<Self> {
        let a = self.clone().normalized();
        if a.c.is_empty() {
            return Err(Error::InsufficientLocalOrder("inverting a series with no known nonzero term".into()));
        }
        let l = a.c[0].try_inv()?;
        let n = a.c.len();
        let mut b: Vec<R> = Vec::with_capacity(n);
        b.push(l.clone());
        for k in 1..n {
            let mut s = self.zero.zero_like();
            for i in 1..=k {
                if !a.c[i].is_zero() {
                    s = s.add(&a.c[i].mul(&b[k - i]));
                }
            }
            b.push(s.mul(&l).neg());
        }
        Ok(Laurent { val: -a.val, c: b, zero: self.zero.clone() })
    }

    pub fn pow(&self, e: u32) -> Self {
        if e == 0 {
            return Laurent::constant(self.zero.one_like(), self.prec().max(1));
        }
        let mut r = self.clone();
        for _ in 1..e {
            r = r.mul(self);
        }
        r
    }

    /// Add a constant to the ε⁰ coefficient.
    pub fn add_const(&self, a: &R) -> Self {
        let mut s = self.clone();
        if s.prec() <= 0 || a.is_zero() {
            return s;
        }
        if s.val > 0 {
            let mut c = vec![a.clone()];
            c.extend((1..s.val).map(|_| s.zero.zero_like()));
            c.extend(s.c);
            return Laurent { val: 0, c, zero: s.zero };
        }
        let i = (-s.val) as usize;
        s.c[i] = s.c[i].add(a);
        s
    }

    pub fn deriv(&self) -> Self {
        let c = self
            .c
            .iter()
            .enumerate()
            .map(|(k, x)| x.scale_q(&q((self.val + k as i32) as i64)))
            .collect();
        Laurent { val: self.val - 1, c, zero: self.zero.clone() }
    }

    /// `Σ p[k] self^k` for an exact polynomial `p`; requires valuation ≥ 1.
    pub fn compose_into_poly(&self, p: &[R]) -> Self {
        let g = self.clone().normalized();
        assert!(g.val >= 1, "composition needs g(0) = 0");
        let mut r = Laurent::constant(self.zero.zero_like(), g.prec());
        for a in p.iter().rev() {
            r = r.mul(&g).add_const(a);
        }
        r
    }

    /// `f(g)` for a power series `f` (val ≥ 0); requires g of valuation ≥ 1.
    pub fn compose(f: &Laurent<R>, g: &Laurent<R>) -> Self {
        let gv = g.clone().normalized();
        assert!(gv.val >= 1 && f.val >= 0, "compose needs f a power series and g(0) = 0");
        // the tail of f starts at f.prec, i.e. at g^{f.prec} = O(ε^{f.prec·val})
        let prec = (f.prec() * gv.val).min(gv.prec());
        let mut r = Laurent::constant(f.zero.zero_like(), prec);
        for e in (0..f.prec()).rev() {
            r = r.mul(&gv).add_const(&f.coeff(e));
        }
        r.truncate(prec)
    }

    /// Compositional inverse of a series `a₁ε + a₂ε² + …` with a₁ invertible.
    pub fn reverse(&self) -> Result<Self> {
        let u = self.clone();
        if u.val > 1 || u.prec() < 2 || u.val < 0 && (u.val..0).any(|e| !u.coeff(e).is_zero()) {
            return Err(Error::NotInvertible);
        }
        let a1 = u.coeff(1);
        if !u.coeff(0).is_zero() {
            return Err(Error::NotInvertible);
        }
        let inv1 = a1.try_inv().map_err(|_| Error::NotInvertible)?;
        let prec = u.prec();
        let z = &self.zero;
        // v ← (ε − (u(v) − a₁v))/a₁, gaining one order per pass
        let mut v = Laurent::eps(z, prec).scale(&inv1);
        for _ in 0..prec {
            let uv = Laurent::compose(&u, &v);
            let corr = uv.sub(&v.scale(&a1));
            v = Laurent::eps(z, prec).sub(&corr).scale(&inv1).truncate(prec);
        }
        Ok(v)
    }

    /// `(1 + h)^{1/2}` for h of valuation ≥ 1.
    pub fn sqrt_one_plus(h: &Laurent<R>) -> Self {
        let n = h.prec();
        let half = qf(1, 2);
        let mut r = Laurent::constant(h.zero.one_like(), n);
        let mut p = Laurent::constant(h.zero.one_like(), n);
        for k in 1..n.max(1) {
            p = p.mul(h);
            r = r.add(&p.scale_q(&binomial_q(&half, k as u32)));
        }
        r
    }

    pub fn map<S: Ring>(&self, zero: &S, f: impl Fn(&R) -> S) -> Laurent<S> {
        Laurent { val: self.val, c: self.c.iter().map(f).collect(), zero: zero.zero_like() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::q;

    fn series(v: &[i64], prec: i32) -> Laurent<Q> {
        let c: Vec<Q> = v.iter().map(|&x| q(x)).collect();
        Laurent::from_poly(&c, &q(0), prec)
    }

    #[test]
    fn geometric() {
        let one_minus = series(&[1, -1], 8);
        let g = one_minus.inv().unwrap();
        for k in 0..8 {
            assert_eq!(g.coeff(k), q(1));
        }
    }

    #[test]
    fn reversion_catalan() {
        // z/(1+z²) reverses to x + x³ + 2x⁵ + 5x⁷
        let den = series(&[1, 0, 1], 9).inv().unwrap();
        let f = den.shift(1).truncate(9);
        let g = f.reverse().unwrap();
        let want = [0, 1, 0, 1, 0, 2, 0, 5, 0];
        for (k, w) in want.iter().enumerate() {
            assert_eq!(g.coeff(k as i32), q(*w));
        }
        let id = Laurent::compose(&f, &g);
        assert_eq!(id.coeff(1), q(1));
        for k in 2..id.prec() {
            assert_eq!(id.coeff(k), q(0));
        }
    }

    #[test]
    fn sqrt_series() {
        let h = series(&[0, 1], 6);
        let r = Laurent::sqrt_one_plus(&h);
        let sq = r.mul(&r);
        assert_eq!(sq.coeff(0), q(1));
        assert_eq!(sq.coeff(1), q(1));
        for k in 2..6 {
            assert_eq!(sq.coeff(k), q(0));
        }
    }

    #[test]
    fn precision_tracking() {
        let a = series(&[0, 0, 1], 5).shift(-4); // ε^-2 + O(ε)
        let b = series(&[1, 2, 3], 6);
        let p = a.mul(&b);
        assert_eq!(p.val, -2);
        assert_eq!(p.prec(), 1);
    }
}
