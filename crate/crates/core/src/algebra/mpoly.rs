//! Sparse multivariate Laurent polynomials over Q.
//!
//! Every symbol of the engine (β, γ, g_k, s_k, t_k, x_i, z_i, ...) is a
//! [`Var`]. Exponents are signed so β can carry a Laurent grading.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

use super::poly::Poly;
use super::rational::{fmt_q, q, Q};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Var {
    Beta,
    Gamma,
    /// Coefficient g_k of G.
    G(u8),
    /// Root parameter c_i of G = Π(1 + c_i z).
    C(u8),
    S(u8),
    T(u8),
    X(u8),
    Xp(u8),
    Z(u8),
    /// Stands for 1/φ̂(z_i).
    W(u8),
    Y,
    /// Stands for 1/(a - z_i) during residue assembly.
    U(u8),
    /// Generator of a quotient ring Q[t]/(P).
    Tq,
    R,
    Tt,
    Eps,
}

impl Var {
    pub fn name(&self) -> String {
        match self {
            Var::Beta => "beta".into(),
            Var::Gamma => "gamma".into(),
            Var::G(k) => format!("g{k}"),
            Var::C(k) => format!("c{k}"),
            Var::S(k) => format!("s{k}"),
            Var::T(k) => format!("t{k}"),
            Var::X(k) => format!("x{k}"),
            Var::Xp(k) => format!("xp{k}"),
            Var::Z(k) => format!("z{k}"),
            Var::W(k) => format!("w{k}"),
            Var::Y => "y".into(),
            Var::U(k) => format!("u{k}"),
            Var::Tq => "t".into(),
            Var::R => "r".into(),
            Var::Tt => "tt".into(),
            Var::Eps => "eps".into(),
        }
    }

    pub fn parse(s: &str) -> Option<Var> {
        let idx = |p: &str| s.strip_prefix(p).and_then(|r| r.parse::<u8>().ok());
        Some(match s {
            "beta" => Var::Beta,
            "gamma" => Var::Gamma,
            "y" => Var::Y,
            "t" => Var::Tq,
            "r" => Var::R,
            "tt" => Var::Tt,
            "eps" => Var::Eps,
            _ => {
                if let Some(k) = idx("xp") {
                    Var::Xp(k)
                } else if let Some(k) = idx("g") {
                    Var::G(k)
                } else if let Some(k) = idx("c") {
                    Var::C(k)
                } else if let Some(k) = idx("s") {
                    Var::S(k)
                } else if let Some(k) = idx("t") {
                    Var::T(k)
                } else if let Some(k) = idx("x") {
                    Var::X(k)
                } else if let Some(k) = idx("z") {
                    Var::Z(k)
                } else if let Some(k) = idx("w") {
                    Var::W(k)
                } else if let Some(k) = idx("u") {
                    Var::U(k)
                } else {
                    return None;
                }
            }
        })
    }
}

/// Sorted (variable, nonzero exponent) pairs.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Mono(pub Vec<(Var, i32)>);

impl Mono {
    pub fn one() -> Self {
        Mono(vec![])
    }

    pub fn var(v: Var, e: i32) -> Self {
        if e == 0 {
            Mono(vec![])
        } else {
            Mono(vec![(v, e)])
        }
    }

    pub fn exp(&self, v: Var) -> i32 {
        self.0.iter().find(|(w, _)| *w == v).map_or(0, |x| x.1)
    }

    pub fn mul(&self, o: &Mono) -> Mono {
        let (a, b) = (&self.0, &o.0);
        let mut r = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            if a[i].0 < b[j].0 {
                r.push(a[i]);
                i += 1;
            } else if a[i].0 > b[j].0 {
                r.push(b[j]);
                j += 1;
            } else {
                let e = a[i].1 + b[j].1;
                if e != 0 {
                    r.push((a[i].0, e));
                }
                i += 1;
                j += 1;
            }
        }
        r.extend_from_slice(&a[i..]);
        r.extend_from_slice(&b[j..]);
        Mono(r)
    }

    pub fn without(&self, v: Var) -> Mono {
        Mono(self.0.iter().filter(|(w, _)| *w != v).cloned().collect())
    }

    pub fn with(&self, v: Var, e: i32) -> Mono {
        self.without(v).mul(&Mono::var(v, e))
    }

    pub fn total(&self, pred: impl Fn(Var) -> bool) -> i32 {
        self.0.iter().filter(|(v, _)| pred(*v)).map(|x| x.1).sum()
    }

    pub fn rename(&self, f: impl Fn(Var) -> Var) -> Mono {
        let mut m = Mono::one();
        for &(v, e) in &self.0 {
            m = m.mul(&Mono::var(f(v), e));
        }
        m
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MPoly {
    pub terms: BTreeMap<Mono, Q>,
}

impl MPoly {
    pub fn zero() -> Self {
        MPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        MPoly::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        MPoly::term(Mono::one(), c)
    }

    pub fn int(n: i64) -> Self {
        MPoly::constant(q(n))
    }

    pub fn term(m: Mono, c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MPoly { terms }
    }

    pub fn var(v: Var) -> Self {
        MPoly::term(Mono::var(v, 1), Q::one())
    }

    pub fn var_pow(v: Var, e: i32) -> Self {
        MPoly::term(Mono::var(v, e), Q::one())
    }

    /// Univariate polynomial in `v`.
    pub fn from_poly(p: &Poly, v: Var) -> Self {
        let mut r = MPoly::zero();
        for (k, c) in p.coeffs().iter().enumerate() {
            r.add_term(Mono::var(v, k as i32), c.clone());
        }
        r
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Mono, c: Q) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn constant_term(&self) -> Q {
        self.terms.get(&Mono::one()).cloned().unwrap_or_else(Q::zero)
    }

    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => self.terms.get(&Mono::one()).cloned(),
            _ => None,
        }
    }

    pub fn coeff(&self, m: &Mono) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn scale(&self, c: &Q) -> MPoly {
        if c.is_zero() {
            return MPoly::zero();
        }
        MPoly { terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    pub fn mul_mono(&self, m: &Mono) -> MPoly {
        MPoly { terms: self.terms.iter().map(|(k, x)| (k.mul(m), x.clone())).collect() }
    }

    pub fn pow(&self, e: u32) -> MPoly {
        let mut r = MPoly::one();
        let mut b = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                r = &r * &b;
            }
            e >>= 1;
            if e > 0 {
                b = &b * &b;
            }
        }
        r
    }

    pub fn retain(&self, f: impl Fn(&Mono) -> bool) -> MPoly {
        MPoly { terms: self.terms.iter().filter(|(m, _)| f(m)).map(|(m, c)| (m.clone(), c.clone())).collect() }
    }

    /// Product keeping only monomials of weight at most `max`, for an
    /// additive weight function.
    pub fn mul_trunc(&self, o: &MPoly, weight: impl Fn(&Mono) -> i32, max: i32) -> MPoly {
        let mut r = MPoly::zero();
        let wb: Vec<(i32, &Mono, &Q)> = o.terms.iter().map(|(m, c)| (weight(m), m, c)).collect();
        for (ma, a) in &self.terms {
            let wa = weight(ma);
            for (w, mb, b) in &wb {
                if wa + w <= max {
                    r.add_term(ma.mul(mb), a * *b);
                }
            }
        }
        r
    }

    /// Keep monomials whose exponent of `v` is at most `max`.
    pub fn trunc_var(&self, v: Var, max: i32) -> MPoly {
        self.retain(|m| m.exp(v) <= max)
    }

    /// Keep monomials whose summed exponent over `pred` is at most `max`.
    pub fn trunc_total(&self, pred: impl Fn(Var) -> bool, max: i32) -> MPoly {
        self.retain(|m| m.total(&pred) <= max)
    }

    pub fn degree(&self, v: Var) -> i32 {
        self.terms.keys().map(|m| m.exp(v)).max().unwrap_or(i32::MIN)
    }

    pub fn min_degree(&self, v: Var) -> i32 {
        self.terms.keys().map(|m| m.exp(v)).min().unwrap_or(i32::MAX)
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut v: Vec<Var> = self.terms.keys().flat_map(|m| m.0.iter().map(|x| x.0)).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn contains(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.exp(v) != 0)
    }

    /// Group by the exponent of `v`.
    pub fn collect(&self, v: Var) -> BTreeMap<i32, MPoly> {
        let mut out: BTreeMap<i32, MPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.exp(v)).or_default().add_term(m.without(v), c.clone());
        }
        out
    }

    /// Coefficient of v^e, as a polynomial free of `v`.
    pub fn coeff_of(&self, v: Var, e: i32) -> MPoly {
        let mut r = MPoly::zero();
        for (m, c) in &self.terms {
            if m.exp(v) == e {
                r.add_term(m.without(v), c.clone());
            }
        }
        r
    }

    pub fn deriv(&self, v: Var) -> MPoly {
        let mut r = MPoly::zero();
        for (m, c) in &self.terms {
            let e = m.exp(v);
            if e != 0 {
                r.add_term(m.with(v, e - 1), c * q(e as i64));
            }
        }
        r
    }

    /// Substitute a polynomial for `v`. Negative exponents of `v` are not allowed.
    pub fn subs(&self, v: Var, val: &MPoly) -> MPoly {
        let groups = self.collect(v);
        let top = groups.keys().last().cloned().unwrap_or(0);
        assert!(groups.keys().next().map_or(true, |&e| e >= 0), "negative power in substitution");
        let mut r = MPoly::zero();
        let mut p = MPoly::one();
        let mut e = 0;
        while e <= top {
            if let Some(c) = groups.get(&e) {
                r += &(c * &p);
            }
            e += 1;
            if e <= top {
                p = &p * val;
            }
        }
        r
    }

    pub fn subs_q(&self, v: Var, val: &Q) -> MPoly {
        let mut r = MPoly::zero();
        for (m, c) in &self.terms {
            let e = m.exp(v);
            let f = pow_q(val, e);
            r.add_term(m.without(v), c * f);
        }
        r
    }

    pub fn rename(&self, f: impl Fn(Var) -> Var + Copy) -> MPoly {
        let mut r = MPoly::zero();
        for (m, c) in &self.terms {
            r.add_term(m.rename(f), c.clone());
        }
        r
    }

    /// Exact quotient by (a − b); `None` if not divisible.
    pub fn div_difference(&self, a: Var, b: Var) -> Option<MPoly> {
        let groups = self.collect(a);
        let lo = *groups.keys().next()?;
        if lo < 0 {
            return None;
        }
        let top = *groups.keys().last().unwrap();
        let bv = MPoly::var(b);
        let mut quo = MPoly::zero();
        let mut carry = MPoly::zero();
        for k in (0..=top).rev() {
            let c = groups.get(&k).cloned().unwrap_or_default();
            let cur = &c + &carry;
            if k == 0 {
                if !cur.is_zero() {
                    return None;
                }
            } else {
                quo += &cur.mul_mono(&Mono::var(a, k - 1));
                carry = &cur * &bv;
            }
        }
        Some(quo)
    }

    /// Reduce the degree in `v` modulo a monic univariate polynomial.
    pub fn reduce_mod(&self, v: Var, modulus: &Poly) -> MPoly {
        let d = modulus.degree() as i32;
        if d < 1 || self.degree(v) < d {
            return self.clone();
        }
        let groups = self.collect(v);
        let mut coeffs: BTreeMap<i32, MPoly> = groups;
        let top = *coeffs.keys().last().unwrap();
        let lc = modulus.lead();
        for e in (d..=top).rev() {
            let Some(c) = coeffs.remove(&e) else { continue };
            if c.is_zero() {
                continue;
            }
            // t^e = t^{e-d} t^d and t^d = -(P - lc t^d)/lc
            for k in 0..d {
                let f = -modulus.coeff(k as usize) / &lc;
                if f.is_zero() {
                    continue;
                }
                let ent = coeffs.entry(e - d + k).or_default();
                *ent += &c.scale(&f);
            }
        }
        let mut r = MPoly::zero();
        for (e, c) in coeffs {
            for (m, x) in c.terms {
                r.add_term(m.mul(&Mono::var(v, e)), x);
            }
        }
        r
    }

    pub fn map_coeffs(&self, f: impl Fn(&Q) -> Q) -> MPoly {
        let mut r = MPoly::zero();
        for (m, c) in &self.terms {
            r.add_term(m.clone(), f(c));
        }
        r
    }

    /// Univariate view; panics if other variables occur.
    pub fn to_poly(&self, v: Var) -> Poly {
        let mut c = vec![];
        for (m, x) in &self.terms {
            let e = m.exp(v);
            assert!(e >= 0 && m.0.len() <= 1 && (m.0.is_empty() || m.0[0].0 == v), "not univariate in {v:?}");
            let e = e as usize;
            if c.len() <= e {
                c.resize(e + 1, Q::zero());
            }
            c[e] += x;
        }
        Poly::new(c)
    }
}

pub fn pow_q(x: &Q, e: i32) -> Q {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        Q::one() / num_traits::pow(x.clone(), (-e) as usize)
    }
}

impl Add for &MPoly {
    type Output = MPoly;
    fn add(self, o: &MPoly) -> MPoly {
        let mut r = self.clone();
        r += o;
        r
    }
}

impl Sub for &MPoly {
    type Output = MPoly;
    fn sub(self, o: &MPoly) -> MPoly {
        let mut r = self.clone();
        r -= o;
        r
    }
}

impl AddAssign<&MPoly> for MPoly {
    fn add_assign(&mut self, o: &MPoly) {
        for (m, c) in &o.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&MPoly> for MPoly {
    fn sub_assign(&mut self, o: &MPoly) {
        for (m, c) in &o.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        MPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }
}

impl Mul for &MPoly {
    type Output = MPoly;
    fn mul(self, o: &MPoly) -> MPoly {
        let mut r = MPoly::zero();
        if self.is_zero() || o.is_zero() {
            return r;
        }
        for (ma, a) in &self.terms {
            for (mb, b) in &o.terms {
                r.add_term(ma.mul(mb), a * b);
            }
        }
        r
    }
}

impl From<Q> for MPoly {
    fn from(c: Q) -> Self {
        MPoly::constant(c)
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mono: Vec<String> = m
                .0
                .iter()
                .map(|(v, e)| if *e == 1 { v.name() } else { format!("{}^{}", v.name(), e) })
                .collect();
            if mono.is_empty() {
                write!(f, "{}", fmt_q(c))?;
            } else if c.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "({})*{}", fmt_q(c), mono.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> MPoly {
        MPoly::var(Var::X(1))
    }
    fn y() -> MPoly {
        MPoly::var(Var::X(2))
    }

    #[test]
    fn arithmetic() {
        let a = &x() + &y();
        let b = &x() - &y();
        let p = &a * &b;
        assert_eq!(p, &x().pow(2) - &y().pow(2));
        assert_eq!(p.div_difference(Var::X(1), Var::X(2)).unwrap(), a);
        assert!(a.div_difference(Var::X(1), Var::X(2)).is_none());
    }

    #[test]
    fn laurent_and_subs() {
        let b = MPoly::var(Var::Beta);
        let bi = MPoly::var_pow(Var::Beta, -1);
        assert_eq!(&b * &bi, MPoly::one());
        let p = &x().pow(3) + &MPoly::int(1);
        assert_eq!(p.subs(Var::X(1), &MPoly::int(2)), MPoly::int(9));
        assert_eq!(p.deriv(Var::X(1)), x().pow(2).scale(&q(3)));
    }

    #[test]
    fn reduce() {
        let t = MPoly::var(Var::Tq);
        let m = Poly::from_ints(&[-2, 0, 1]);
        assert_eq!(t.pow(3).reduce_mod(Var::Tq, &m), t.scale(&q(2)));
        assert_eq!(t.pow(4).reduce_mod(Var::Tq, &m), MPoly::int(4));
    }
}
