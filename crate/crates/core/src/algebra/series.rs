//! Multivariate truncated series with a Laurent β grading.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::laurent::Laurent;
use super::mpoly::{MPoly, Mono, Var};
use super::rational::{fmt_q, parse_q, Q};
use crate::error::{Error, Result};

/// A polynomial together with per-variable truncation orders. β is never
/// truncated here; it is the Laurent grading.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries {
    pub orders: Vec<(Var, i32)>,
    pub poly: MPoly,
}

impl TruncatedSeries {
    pub fn new(orders: Vec<(Var, i32)>, poly: MPoly) -> Self {
        let mut s = TruncatedSeries { orders, poly };
        s.orders.sort();
        s.poly = s.clip(&s.poly);
        s
    }

    fn clip(&self, p: &MPoly) -> MPoly {
        p.retain(|m| self.orders.iter().all(|&(v, o)| m.exp(v) <= o))
    }

    fn common(&self, o: &Self) -> Result<Vec<(Var, i32)>> {
        let a: Vec<Var> = self.orders.iter().map(|x| x.0).collect();
        let b: Vec<Var> = o.orders.iter().map(|x| x.0).collect();
        if a != b {
            return Err(Error::Invalid("incompatible variable sets".into()));
        }
        Ok(self.orders.iter().zip(&o.orders).map(|(x, y)| (x.0, x.1.min(y.1))).collect())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        Ok(TruncatedSeries::new(self.common(o)?, &self.poly + &o.poly))
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        Ok(TruncatedSeries::new(self.common(o)?, &self.poly - &o.poly))
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        let orders = self.common(o)?;
        let t = TruncatedSeries { orders: orders.clone(), poly: MPoly::zero() };
        let mut r = MPoly::zero();
        for (ma, a) in &self.poly.terms {
            for (mb, b) in &o.poly.terms {
                let m = ma.mul(mb);
                if t.orders.iter().all(|&(v, ord)| m.exp(v) <= ord) {
                    r.add_term(m, a * b);
                }
            }
        }
        Ok(TruncatedSeries { orders, poly: r })
    }

    fn truncated_degree(&self, m: &Mono) -> i32 {
        self.orders.iter().map(|&(v, _)| m.exp(v)).sum()
    }

    /// Multiplicative inverse. The part of lowest truncated degree must be a
    /// single monomial (a unit up to a leading monomial in the free variables).
    pub fn inverse(&self) -> Result<Self> {
        if self.poly.terms.keys().any(|m| self.orders.iter().any(|&(v, _)| m.exp(v) < 0)) {
            return Err(Error::DivisionByNonUnit);
        }
        let lead: Vec<(&Mono, &Q)> =
            self.poly.terms.iter().filter(|(m, _)| self.truncated_degree(m) == 0).collect();
        if lead.len() != 1 {
            return Err(Error::DivisionByNonUnit);
        }
        let (m0, c0) = lead[0];
        let inv_lead = MPoly::term(Mono(m0.0.iter().map(|&(v, e)| (v, -e)).collect()), Q::from_integer(1.into()) / c0);
        // f = lead·(1 + h) with h nilpotent under truncation
        let h = &(&self.poly * &inv_lead) - &MPoly::one();
        let h = TruncatedSeries { orders: self.orders.clone(), poly: h };
        let steps: i32 = self.orders.iter().map(|x| x.1.max(0)).sum::<i32>() + 1;
        let mut acc = TruncatedSeries { orders: self.orders.clone(), poly: MPoly::one() };
        let mut p = acc.clone();
        for k in 1..=steps {
            p = p.mul(&h)?;
            if p.poly.is_zero() {
                break;
            }
            let term = if k % 2 == 1 { -&p.poly } else { p.poly.clone() };
            acc.poly += &term;
        }
        Ok(TruncatedSeries { orders: self.orders.clone(), poly: &acc.poly * &inv_lead })
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        self.mul(&o.inverse()?)
    }

    /// Coefficient tables keyed by β exponent.
    pub fn beta_graded(&self) -> BTreeMap<i32, MPoly> {
        self.poly.collect(Var::Beta)
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn to_json(&self) -> SeriesJson {
        let variables: Vec<String> = self.orders.iter().map(|x| x.0.name()).collect();
        let orders = self.orders.iter().map(|x| x.1).collect();
        let mut extra: Vec<Var> = self.poly.vars().into_iter().filter(|v| *v != Var::Beta && !self.orders.iter().any(|x| x.0 == *v)).collect();
        extra.sort();
        let mut all_vars = variables.clone();
        all_vars.extend(extra.iter().map(|v| v.name()));
        let ordered: Vec<Var> = self.orders.iter().map(|x| x.0).chain(extra.iter().cloned()).collect();
        let terms = self
            .poly
            .terms
            .iter()
            .map(|(m, c)| TermJson {
                exponents: ordered.iter().map(|v| m.exp(*v)).collect(),
                beta_exp: m.exp(Var::Beta),
                coeff: fmt_q(c),
            })
            .collect();
        SeriesJson { variables: all_vars, orders, terms }
    }

    pub fn from_json(j: &SeriesJson) -> Result<Self> {
        let vars: Vec<Var> = j
            .variables
            .iter()
            .map(|s| Var::parse(s).ok_or_else(|| Error::Parse(format!("unknown variable {s}"))))
            .collect::<Result<_>>()?;
        let mut poly = MPoly::zero();
        for t in &j.terms {
            let mut m = Mono::var(Var::Beta, t.beta_exp);
            for (v, e) in vars.iter().zip(&t.exponents) {
                m = m.mul(&Mono::var(*v, *e));
            }
            poly.add_term(m, parse_q(&t.coeff)?);
        }
        let orders = vars.iter().zip(&j.orders).map(|(v, o)| (*v, *o)).collect();
        Ok(TruncatedSeries::new(orders, poly))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TermJson {
    pub exponents: Vec<i32>,
    #[serde(rename = "betaExp")]
    pub beta_exp: i32,
    pub coeff: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SeriesJson {
    pub variables: Vec<String>,
    pub orders: Vec<i32>,
    pub terms: Vec<TermJson>,
}

/// Compositional inverse of a univariate series in `v` with f(0) = 0.
pub fn series_reversion(f: &TruncatedSeries, order: i32) -> Result<TruncatedSeries> {
    if f.orders.len() != 1 || f.poly.contains(Var::Beta) {
        return Err(Error::Invalid("reversion needs a univariate series".into()));
    }
    let v = f.orders[0].0;
    let p = f.poly.to_poly(v);
    let prec = order.min(f.orders[0].1) + 1;
    let l = Laurent::from_poly(p.coeffs(), &Q::zero(), prec);
    if !l.coeff(0).is_zero() {
        return Err(Error::NotInvertible);
    }
    let g = l.reverse()?;
    // internal check: f(g(x)) = x
    let id = Laurent::compose(&l, &g);
    for k in 0..id.prec() {
        let want = if k == 1 { Q::from_integer(1.into()) } else { Q::zero() };
        if id.coeff(k) != want {
            return Err(Error::CrossCheckFailure("reversion does not compose to the identity".into()));
        }
    }
    let mut out = MPoly::zero();
    for k in 0..g.prec() {
        out.add_term(Mono::var(v, k), g.coeff(k));
    }
    Ok(TruncatedSeries::new(vec![(v, prec - 1)], out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{q, qf};

    fn gam(order: i32, p: MPoly) -> TruncatedSeries {
        TruncatedSeries::new(vec![(Var::Gamma, order)], p)
    }

    #[test]
    fn difference_of_squares() {
        let g = MPoly::var(Var::Gamma);
        let a = gam(4, &MPoly::one() + &g);
        let b = gam(4, &MPoly::one() - &g);
        assert_eq!(a.mul(&b).unwrap().poly, &MPoly::one() - &g.pow(2));
    }

    #[test]
    fn geometric_series_times_one_minus() {
        let g = MPoly::var(Var::Gamma);
        let mut geo = MPoly::zero();
        for k in 0..=6 {
            geo += &g.pow(k);
        }
        let r = gam(6, geo).mul(&gam(6, &MPoly::one() - &g)).unwrap();
        assert_eq!(r.poly, MPoly::one());
    }

    #[test]
    fn unit_division_with_beta_lead() {
        let b = MPoly::var(Var::Beta);
        let g = MPoly::var(Var::Gamma);
        let f = gam(5, &b.scale(&q(3)) + &(&g * &b.pow(2)));
        let r = f.div(&f).unwrap();
        assert_eq!(r.poly, MPoly::one());
        let bad = gam(5, &b + &MPoly::one());
        assert!(matches!(bad.inverse(), Err(Error::DivisionByNonUnit)));
    }

    #[test]
    fn reversion_examples() {
        let x = MPoly::var(Var::X(1));
        let id = series_reversion(&TruncatedSeries::new(vec![(Var::X(1), 6)], x.clone()), 6).unwrap();
        assert_eq!(id.poly, x);
        let lin = series_reversion(&TruncatedSeries::new(vec![(Var::X(1), 6)], x.scale(&q(2))), 6).unwrap();
        assert_eq!(lin.poly, x.scale(&qf(1, 2)));
        let flat = TruncatedSeries::new(vec![(Var::X(1), 6)], x.pow(2));
        assert!(matches!(series_reversion(&flat, 6), Err(Error::NotInvertible)));
    }

    #[test]
    fn json_roundtrip() {
        let x = MPoly::var(Var::X(1));
        let s = TruncatedSeries::new(vec![(Var::X(1), 3)], &x.pow(2) + &MPoly::var_pow(Var::Beta, -1));
        let j = s.to_json();
        assert_eq!(TruncatedSeries::from_json(&j).unwrap(), s);
    }
}
