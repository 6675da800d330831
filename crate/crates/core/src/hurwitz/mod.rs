//! Pure and weighted double Hurwitz numbers by counting factorizations of
//! the identity in S_N.

pub mod perm;

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

pub use perm::{Components, Perm, SymGroup};

use crate::algebra::mpoly::{MPoly, Mono, Var};
use crate::algebra::rational::{factorial, Q};
use crate::error::{Error, Result};
use crate::symfun::{character, content_product, partitions_of, subst_g, sym_to_elementary, weight_wg, Partition, Weight};

pub const DEFAULT_N_CAP: u32 = 7;
pub const DEFAULT_K_CAP: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FactorizationQuery {
    pub n: u32,
    pub profiles: Vec<Partition>,
    pub require_transitive: bool,
}

impl FactorizationQuery {
    pub fn new(profiles: Vec<Partition>, require_transitive: bool) -> Self {
        let n = profiles.first().map(|p| p.weight()).unwrap_or(0);
        FactorizationQuery { n, profiles, require_transitive }
    }

    fn validate(&self, n_cap: u32, k_cap: usize) -> Result<()> {
        if self.n > n_cap || self.n as usize > perm::MAX_N {
            return Err(Error::CapExceeded(format!("N = {} exceeds cap {}", self.n, n_cap)));
        }
        if self.profiles.len() > k_cap {
            return Err(Error::CapExceeded(format!("{} profiles exceed cap {}", self.profiles.len(), k_cap)));
        }
        for p in &self.profiles {
            if p.weight() != self.n {
                return Err(Error::SizeMismatch(p.weight(), self.n));
            }
        }
        Ok(())
    }
}

/// Number of tuples (h_1..h_k) with h_i in the given classes and product the
/// identity. Classes are reordered: the smallest are enumerated first, the
/// largest is determined by the others. With `fix_first`, the first enumerated
/// factor is replaced by a class representative and the count is scaled by
/// the class size.
fn count_factorizations(q: &FactorizationQuery, fix_first: bool) -> BigInt {
    let n = q.n as usize;
    if q.profiles.is_empty() {
        return BigInt::from((!q.require_transitive || n <= 1) as u32);
    }
    let g = SymGroup::get(n);
    let mut idx: Vec<usize> = q.profiles.iter().map(|p| g.index_of(p)).collect();
    idx.sort_by_key(|&t| (g.by_type[t].len(), t));
    let last = idx.pop().unwrap();
    let transitive = q.require_transitive;

    if idx.is_empty() {
        let ok = last == g.index_of(&Partition::ones(n as u32)) && (!transitive || n <= 1);
        return BigInt::from(ok as u32);
    }

    let (start, scale, rest): (Vec<(Perm, Components)>, usize, &[usize]) = if fix_first {
        let big = *idx.last().unwrap();
        let rep = Perm::representative(&g.types[big]);
        let mut c = Components::new(n);
        c.join(&rep);
        (vec![(rep, c)], g.by_type[big].len(), &idx[..idx.len() - 1])
    } else {
        (vec![(Perm::identity(n), Components::new(n))], 1, &idx[..])
    };

    let classes: Vec<&[Perm]> = rest.iter().map(|&t| g.by_type[t].as_slice()).collect();

    fn rec(g: &SymGroup, classes: &[&[Perm]], prod: Perm, comp: Components, last: usize, transitive: bool) -> u64 {
        match classes.split_first() {
            None => {
                let l = prod.inverse();
                if g.type_of(&l) != last {
                    return 0;
                }
                let mut c = comp;
                (!transitive || c.connected()) as u64
            }
            Some((cls, rest)) => cls
                .iter()
                .map(|h| {
                    let mut c = comp;
                    if transitive {
                        c.join(h);
                    }
                    rec(g, rest, prod.compose(h), c, last, transitive)
                })
                .sum(),
        }
    }

    let total: u64 = start
        .into_iter()
        .map(|(p0, c0)| match classes.split_first() {
            None => rec(&g, &[], p0, c0, last, transitive),
            Some((cls, rest)) => cls
                .par_iter()
                .map(|h| {
                    let mut c = c0;
                    if transitive {
                        c.join(h);
                    }
                    rec(&g, rest, p0.compose(h), c, last, transitive)
                })
                .sum::<u64>(),
        })
        .sum();
    BigInt::from(total) * BigInt::from(scale)
}

/// (1/N!)·#{(h_1..h_k): h_1⋯h_k = 1, h_i ∈ C_{μ^(i)}}, enumerating full tuples.
pub fn pure_hurwitz(q: &FactorizationQuery) -> Result<Q> {
    pure_hurwitz_capped(q, DEFAULT_N_CAP, DEFAULT_K_CAP)
}

pub fn pure_hurwitz_capped(q: &FactorizationQuery, n_cap: u32, k_cap: usize) -> Result<Q> {
    q.validate(n_cap, k_cap)?;
    Ok(Q::new(count_factorizations(q, false), factorial(q.n)))
}

/// Same count with the largest enumerated class fixed to a representative.
pub fn pure_hurwitz_fast(q: &FactorizationQuery) -> Result<Q> {
    q.validate(DEFAULT_N_CAP, DEFAULT_K_CAP)?;
    Ok(Q::new(count_factorizations(q, true), factorial(q.n)))
}

/// Genus from 2 − 2g = ℓ(μ) + ℓ(ν) − d. May be negative.
pub fn genus_of(mu: &Partition, nu: &Partition, d: u32) -> Result<i64> {
    let num = 2 - mu.len() as i64 - nu.len() as i64 + d as i64;
    if num % 2 != 0 {
        return Err(Error::NonIntegral);
    }
    Ok(num / 2)
}

#[derive(Clone, Debug, PartialEq)]
pub struct HurwitzTable {
    pub connected: bool,
    /// Values as polynomials in g_1..g_M (constants for numeric weights).
    pub entries: BTreeMap<(Partition, Partition, u32), MPoly>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HurwitzRow {
    pub mu: Partition,
    pub nu: Partition,
    pub d: u32,
    pub value: String,
    pub genus: Option<i64>,
    pub connected: bool,
}

impl HurwitzTable {
    pub fn get(&self, mu: &Partition, nu: &Partition, d: u32) -> Option<&MPoly> {
        self.entries.get(&(mu.clone(), nu.clone(), d))
    }

    pub fn rows(&self) -> Vec<HurwitzRow> {
        self.entries
            .iter()
            .map(|((mu, nu, d), v)| HurwitzRow {
                mu: mu.clone(),
                nu: nu.clone(),
                d: *d,
                value: v.to_string(),
                genus: genus_of(mu, nu, *d).ok(),
                connected: self.connected,
            })
            .collect()
    }

    pub fn merge(&mut self, other: HurwitzTable) {
        self.entries.extend(other.entries);
    }
}

type Memo = HashMap<(Vec<Partition>, bool), Q>;

fn memo_count(memo: &mut Memo, mut profiles: Vec<Partition>, transitive: bool, fast: bool) -> Result<Q> {
    profiles.sort();
    let key = (profiles, transitive);
    if let Some(v) = memo.get(&key) {
        return Ok(v.clone());
    }
    let q = FactorizationQuery::new(key.0.clone(), transitive);
    let v = if fast { pure_hurwitz_fast(&q)? } else { pure_hurwitz(&q)? };
    memo.insert(key, v.clone());
    Ok(v)
}

/// Ordered k-tuples of nontrivial partitions of n with total colength d.
fn nontrivial_tuples(n: u32, k: usize, d: u32) -> Vec<Vec<Partition>> {
    let parts: Vec<Partition> = partitions_of(n, None).into_iter().filter(|p| !p.is_trivial()).collect();
    let mut out = vec![];
    fn go(parts: &[Partition], k: usize, d: u32, cur: &mut Vec<Partition>, out: &mut Vec<Vec<Partition>>) {
        if cur.len() == k {
            if d == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for p in parts {
            if p.colength() <= d {
                cur.push(p.clone());
                go(parts, k, d - p.colength(), cur, out);
                cur.pop();
            }
        }
    }
    go(&parts, k, d, &mut vec![], &mut out);
    out
}

/// M-slot tuples of partitions of n, trivial allowed, with total colength d.
fn slot_tuples(n: u32, m: usize, d: u32) -> Vec<Vec<Partition>> {
    let parts = partitions_of(n, None);
    let mut out = vec![];
    fn go(parts: &[Partition], m: usize, d: u32, cur: &mut Vec<Partition>, out: &mut Vec<Vec<Partition>>) {
        if cur.len() == m {
            if d == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for p in parts {
            if p.colength() <= d {
                cur.push(p.clone());
                go(parts, m, d - p.colength(), cur, out);
                cur.pop();
            }
        }
    }
    go(&parts, m, d, &mut vec![], &mut out);
    out
}

struct Routes {
    fast: Memo,
    naive: Memo,
}

impl Routes {
    fn new() -> Self {
        Routes { fast: HashMap::new(), naive: HashMap::new() }
    }

    /// Sum over ordered tuples of nontrivial profiles weighted by 𝒲_G.
    fn tuple_sum(&mut self, w: &Weight, mu: &Partition, nu: &Partition, d: u32, transitive: bool) -> Result<MPoly> {
        let n = mu.weight();
        let mut total = MPoly::zero();
        for k in 0..=w.degree().min(d as usize) {
            for tuple in nontrivial_tuples(n, k, d) {
                let wg = weight_wg(&tuple, w)?;
                if wg.is_zero() {
                    continue;
                }
                let mut profiles = tuple;
                profiles.push(mu.clone());
                profiles.push(nu.clone());
                let h = memo_count(&mut self.fast, profiles, transitive, true)?;
                if !h.is_zero() {
                    total += &wg.scale(&h);
                }
            }
        }
        Ok(total)
    }

    /// Sum over M slots, trivial profiles allowed, weighted by Π c_i^{ℓ*},
    /// then rewritten in g_k = e_k(c).
    fn slot_sum(&mut self, w: &Weight, mu: &Partition, nu: &Partition, d: u32, transitive: bool) -> Result<MPoly> {
        let n = mu.weight();
        let m = w.degree();
        let mut in_c = MPoly::zero();
        for tuple in slot_tuples(n, m, d) {
            let mono = Mono(
                tuple
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| p.colength() > 0)
                    .map(|(i, p)| (Var::C(i as u8 + 1), p.colength() as i32))
                    .collect(),
            );
            let mut profiles = tuple;
            profiles.push(mu.clone());
            profiles.push(nu.clone());
            let h = memo_count(&mut self.naive, profiles, transitive, false)?;
            if !h.is_zero() {
                in_c.add_term(mono, h);
            }
        }
        Ok(subst_g(&sym_to_elementary(&in_c, m)?, w))
    }

    fn entry(&mut self, w: &Weight, mu: &Partition, nu: &Partition, d: u32, transitive: bool, both: bool) -> Result<MPoly> {
        let a = self.tuple_sum(w, mu, nu, d, transitive)?;
        if !both {
            return Ok(a);
        }
        let b = self.slot_sum(w, mu, nu, d, transitive)?;
        if a != b {
            return Err(Error::InconsistentDefinitions(format!(
                "H^{d}({mu:?},{nu:?}): tuple sum {a} vs slot sum {b}"
            )));
        }
        Ok(a)
    }
}

fn table(w: &Weight, pairs: &[(Partition, Partition)], d_max: u32, transitive: bool, both: bool) -> Result<HurwitzTable> {
    let mut routes = Routes::new();
    let mut entries = BTreeMap::new();
    for (mu, nu) in pairs {
        if mu.weight() != nu.weight() {
            return Err(Error::SizeMismatch(mu.weight(), nu.weight()));
        }
        if mu.weight() > DEFAULT_N_CAP {
            return Err(Error::CapExceeded(format!("N = {} exceeds cap {}", mu.weight(), DEFAULT_N_CAP)));
        }
        for d in 0..=d_max {
            let v = routes.entry(w, mu, nu, d, transitive, both)?;
            entries.insert((mu.clone(), nu.clone(), d), v);
        }
    }
    Ok(HurwitzTable { connected: transitive, entries })
}

/// H^d_G(μ,ν) for 0 ≤ d ≤ d_max, computed by both the nontrivial k-tuple sum
/// and the M-slot sum.
pub fn weighted_hurwitz(w: &Weight, mu: &Partition, nu: &Partition, d_max: u32) -> Result<HurwitzTable> {
    table(w, &[(mu.clone(), nu.clone())], d_max, false, true)
}

/// Connected (transitive) counterpart of [`weighted_hurwitz`].
pub fn connected_weighted_hurwitz(w: &Weight, mu: &Partition, nu: &Partition, d_max: u32) -> Result<HurwitzTable> {
    table(w, &[(mu.clone(), nu.clone())], d_max, true, true)
}

/// Tables for every pair μ, ν ⊢ N with 1 ≤ N ≤ n_max, both routes.
pub fn full_table(w: &Weight, n_max: u32, d_max: u32, connected: bool) -> Result<HurwitzTable> {
    full_table_with(w, n_max, d_max, connected, true)
}

/// As [`full_table`]; with `both_routes = false` only the tuple sum is used.
pub fn full_table_with(w: &Weight, n_max: u32, d_max: u32, connected: bool, both_routes: bool) -> Result<HurwitzTable> {
    let mut pairs = vec![];
    for n in 1..=n_max {
        let ps = partitions_of(n, None);
        for mu in &ps {
            for nu in &ps {
                pairs.push((mu.clone(), nu.clone()));
            }
        }
    }
    table(w, &pairs, d_max, connected, both_routes)
}

/// Σ γ^{|μ|} β^d H^d(μ,ν) p_μ(t) p_ν(s), with p_i(t) = i·T(i) and p_i(s) = i·S(i).
pub fn generating_function(t: &HurwitzTable) -> MPoly {
    let mut z = MPoly::zero();
    for ((mu, nu, d), v) in &t.entries {
        let mut m = Mono::var(Var::Gamma, mu.weight() as i32).mul(&Mono::var(Var::Beta, *d as i32));
        let mut c = BigInt::from(1);
        for &p in mu.parts() {
            m = m.mul(&Mono::var(Var::T(p as u8), 1));
            c *= p;
        }
        for &p in nu.parts() {
            m = m.mul(&Mono::var(Var::S(p as u8), 1));
            c *= p;
        }
        z += &v.mul_mono(&m).scale(&Q::from_integer(c));
    }
    z
}

/// H^d_G(μ,ν) as a polynomial in β via the character sum
/// Σ_λ r_λ χ_λ(μ) χ_λ(ν) / (z_μ z_ν), with γ = 1.
pub fn frobenius_weighted(w: &Weight, mu: &Partition, nu: &Partition) -> Result<MPoly> {
    if mu.weight() != nu.weight() {
        return Err(Error::SizeMismatch(mu.weight(), nu.weight()));
    }
    let mut r = MPoly::zero();
    for l in partitions_of(mu.weight(), None) {
        let c = character(&l, mu)? * character(&l, nu)?;
        if !c.is_zero() {
            r += &content_product(&l, w).scale(&c);
        }
    }
    Ok(r.scale(&(Q::from_integer(BigInt::from(1)) / (mu.z_q() * nu.z_q()))))
}

/// Pure Hurwitz number by Frobenius' formula
/// Σ_λ (dim λ / N!)² Π_i |C_i| χ_λ(μ^(i)) / dim λ.
pub fn frobenius_pure(profiles: &[Partition]) -> Result<Q> {
    let n = profiles.first().map(|p| p.weight()).unwrap_or(0);
    let nf = Q::from_integer(factorial(n));
    let mut total = Q::zero();
    for l in partitions_of(n, None) {
        let dim = character(&l, &Partition::ones(n))?;
        let mut t = &dim * &dim / (&nf * &nf);
        for p in profiles {
            if p.weight() != n {
                return Err(Error::SizeMismatch(p.weight(), n));
            }
            t = t * Q::from_integer(p.size_of_class()) * character(&l, p)? / &dim;
        }
        total += t;
    }
    Ok(total)
}

/// log(1 + f) truncated in γ and β, for f without constant term.
pub fn log_one_plus(f: &MPoly, gamma_max: i32, beta_max: i32) -> MPoly {
    let trunc = |p: MPoly| p.trunc_var(Var::Gamma, gamma_max).trunc_var(Var::Beta, beta_max);
    let mut r = MPoly::zero();
    let mut p = MPoly::one();
    for k in 1..=gamma_max.max(1) {
        p = trunc(&p * f);
        if p.is_zero() {
            break;
        }
        let c = Q::new(BigInt::from(if k % 2 == 1 { 1 } else { -1 }), BigInt::from(k));
        r += &p.scale(&c);
    }
    r
}

/// Checks that the transitive counts are the coefficients of the logarithm
/// of the disconnected generating function.
pub fn exp_log_check(w: &Weight, n_max: u32, d_max: u32) -> Result<()> {
    let dis = full_table(w, n_max, d_max, false)?;
    let con = full_table(w, n_max, d_max, true)?;
    let log = log_one_plus(&generating_function(&dis), n_max as i32, d_max as i32);
    let expected = generating_function(&con);
    let diff = &log - &expected;
    if !diff.is_zero() {
        return Err(Error::CrossCheckFailure(format!("log of disconnected series differs from connected: {diff}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{q, qf};

    fn p(v: &[u32]) -> Partition {
        Partition::new(v.to_vec())
    }

    fn h(profiles: &[&[u32]], tr: bool) -> Q {
        pure_hurwitz(&FactorizationQuery::new(profiles.iter().map(|x| p(x)).collect(), tr)).unwrap()
    }

    #[test]
    fn pure_examples() {
        assert_eq!(h(&[&[1, 1, 1]], false), qf(1, 6));
        assert_eq!(h(&[&[2], &[2]], false), qf(1, 2));
        assert_eq!(h(&[&[2], &[2], &[2]], false), q(0));
    }

    #[test]
    fn caps() {
        let big = FactorizationQuery::new(vec![Partition::ones(8)], false);
        assert!(matches!(pure_hurwitz(&big), Err(Error::CapExceeded(_))));
        let many = FactorizationQuery::new(vec![p(&[2]); 7], false);
        assert!(matches!(pure_hurwitz(&many), Err(Error::CapExceeded(_))));
    }

    #[test]
    fn fast_matches_naive() {
        for n in 1..=5 {
            let ps = partitions_of(n, None);
            for a in &ps {
                for b in &ps {
                    for c in &ps {
                        for tr in [false, true] {
                            let q = FactorizationQuery::new(vec![a.clone(), b.clone(), c.clone()], tr);
                            assert_eq!(pure_hurwitz(&q).unwrap(), pure_hurwitz_fast(&q).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn weighted_examples() {
        let w = Weight::symbolic(1);
        let t = weighted_hurwitz(&w, &p(&[2]), &p(&[1, 1]), 1).unwrap();
        assert_eq!(t.get(&p(&[2]), &p(&[1, 1]), 1).unwrap(), &MPoly::var(Var::G(1)).scale(&qf(1, 2)));
        let t = weighted_hurwitz(&w, &p(&[1, 1]), &p(&[1, 1]), 0).unwrap();
        assert_eq!(t.get(&p(&[1, 1]), &p(&[1, 1]), 0).unwrap(), &MPoly::constant(qf(1, 2)));
    }

    #[test]
    fn connected_examples() {
        let w = Weight::symbolic(2);
        let t = connected_weighted_hurwitz(&w, &p(&[1]), &p(&[1]), 0).unwrap();
        assert_eq!(t.get(&p(&[1]), &p(&[1]), 0).unwrap(), &MPoly::one());
        let t = connected_weighted_hurwitz(&w, &p(&[1, 1]), &p(&[1, 1]), 0).unwrap();
        assert!(t.get(&p(&[1, 1]), &p(&[1, 1]), 0).unwrap().is_zero());
        let t = connected_weighted_hurwitz(&w, &p(&[2]), &p(&[2]), 0).unwrap();
        assert_eq!(t.get(&p(&[2]), &p(&[2]), 0).unwrap(), &MPoly::constant(qf(1, 2)));
        assert_eq!(genus_of(&p(&[2]), &p(&[2]), 0).unwrap(), 0);
    }

    #[test]
    fn genus() {
        assert_eq!(genus_of(&p(&[3]), &p(&[3]), 0).unwrap(), 0);
        assert_eq!(genus_of(&p(&[3]), &p(&[2, 1]), 1).unwrap(), 0);
        assert!(matches!(genus_of(&p(&[3]), &p(&[3]), 1), Err(Error::NonIntegral)));
    }

    #[test]
    fn frobenius_agrees() {
        for n in 1..=5 {
            let ps = partitions_of(n, None);
            for a in &ps {
                for b in &ps {
                    for c in &ps {
                        let pr = vec![a.clone(), b.clone(), c.clone()];
                        assert_eq!(frobenius_pure(&pr).unwrap(), pure_hurwitz(&FactorizationQuery::new(pr, false)).unwrap());
                    }
                }
            }
        }
        let w = Weight::symbolic(2);
        for n in 1..=4 {
            let ps = partitions_of(n, None);
            let t = full_table(&w, n, 2 * (n - 1), false).unwrap();
            for a in &ps {
                for b in &ps {
                    let f = frobenius_weighted(&w, a, b).unwrap();
                    for d in 0..=2 * (n - 1) {
                        assert_eq!(&f.coeff_of(Var::Beta, d as i32), t.get(a, b, d).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn exp_log_small() {
        exp_log_check(&Weight::symbolic(2), 3, 3).unwrap();
    }
}
