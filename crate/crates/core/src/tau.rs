//! The hypergeometric tau function, adapted bases, pair correlators and the
//! correlators W_n, W̃_n, F_n, F̃_n as truncated exact series.

use std::collections::BTreeMap;

use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::mpoly::{MPoly, Mono, Var};
use crate::algebra::rational::{factorial, q, Q};
use crate::error::{Error, Result};
use crate::hurwitz::{frobenius_weighted, full_table_with};
use crate::symfun::{
    complete_h_all, content_product, flow_p, gamma_pow, monomial_sym, partitions_of, rho_coeff, rho_inv, s_power_sums,
    schur_p, Partition, Weight,
};

pub const TAU_ORDER_CAP: u32 = 6;

/// Weight, s-parameters (s_1..s_L, numeric or symbolic) and γ.
#[derive(Clone, Debug)]
pub struct Model {
    pub weight: Weight,
    pub s: Vec<MPoly>,
    pub gamma: MPoly,
    /// Truncation for β-series arising from 1/G(−kβ).
    pub beta_order: i32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl Model {
    pub fn new(weight: Weight, s: Vec<MPoly>, gamma: MPoly) -> Self {
        let mut s = s;
        while s.last().map_or(false, |x| x.is_zero()) {
            s.pop();
        }
        Model { weight, s, gamma, beta_order: 8 }
    }

    /// Numeric s-values and γ.
    pub fn numeric(g: &[Q], s: &[Q], gamma: Q) -> Self {
        Model::new(Weight::numeric(g), s.iter().cloned().map(MPoly::constant).collect(), MPoly::constant(gamma))
    }

    /// Symbolic s_1..s_l and symbolic γ.
    pub fn symbolic(weight: Weight, l: u8) -> Self {
        Model::new(weight, (1..=l).map(|i| MPoly::var(Var::S(i))).collect(), MPoly::var(Var::Gamma))
    }

    pub fn l(&self) -> usize {
        self.s.len()
    }

    pub fn m(&self) -> usize {
        self.weight.degree()
    }

    pub fn beta_inv() -> MPoly {
        MPoly::var_pow(Var::Beta, -1)
    }

    /// h_0..=h_n of ±β⁻¹s.
    pub fn h(&self, sign: Sign, n: u32) -> Vec<MPoly> {
        let scale = Model::beta_inv().scale(&q(sign.value()));
        complete_h_all(n, &s_power_sums(&self.s, scale))
    }

    pub fn rho(&self, j: i32) -> MPoly {
        rho_coeff(j, &self.weight, &self.gamma, self.beta_order)
    }

    pub fn rho_inv(&self, j: i32) -> MPoly {
        rho_inv(j, &self.weight, &self.gamma, self.beta_order)
    }

    /// r_λ including the γ^{|λ|} factor.
    pub fn r(&self, l: &Partition) -> MPoly {
        &gamma_pow(&self.gamma, l.weight() as i32) * &content_product(l, &self.weight)
    }

    /// S(z) = Σ k s_k z^k.
    pub fn s_poly(&self, z: &MPoly) -> MPoly {
        let mut r = MPoly::zero();
        let mut zp = MPoly::one();
        for (k, sk) in self.s.iter().enumerate() {
            zp = &zp * z;
            r += &(&zp * sk).scale(&q(k as i64 + 1));
        }
        r
    }
}

/// Total degree in the x-type variables.
pub fn x_degree(m: &Mono) -> i32 {
    m.total(|v| matches!(v, Var::X(_) | Var::Xp(_)))
}

/// Σ i·e_i over the flow variables T(i).
pub fn t_weight(m: &Mono) -> i32 {
    m.0.iter().map(|(v, e)| if let Var::T(i) = v { *i as i32 * e } else { 0 }).sum()
}

pub fn x(i: u8) -> Var {
    Var::X(i)
}

pub fn xp(i: u8) -> Var {
    Var::Xp(i)
}

/// exp(f) for f without constant term, truncated at weight `max`.
pub fn exp_trunc(f: &MPoly, weight: impl Fn(&Mono) -> i32 + Copy, max: i32) -> MPoly {
    let mut r = MPoly::one();
    let mut p = MPoly::one();
    for k in 1..=max.max(0) + 1 {
        p = p.mul_trunc(f, weight, max).scale(&(Q::one() / q(k as i64)));
        if p.is_zero() {
            break;
        }
        r += &p;
    }
    r
}

/// log(f) for f with constant term 1, truncated at weight `max`; every
/// non-constant monomial of f must have positive weight.
pub fn log_trunc(f: &MPoly, weight: impl Fn(&Mono) -> i32 + Copy, max: i32) -> MPoly {
    let g = f - &MPoly::one();
    let mut r = MPoly::zero();
    let mut p = MPoly::one();
    for k in 1..=max.max(0) + 1 {
        p = p.mul_trunc(&g, weight, max);
        if p.is_zero() {
            break;
        }
        let c = if k % 2 == 1 { q(1) } else { q(-1) } / q(k as i64);
        r += &p.scale(&c);
    }
    r
}

// ---------------------------------------------------------------- tau

#[derive(Clone, Debug)]
pub struct TauSeries {
    pub order: u32,
    /// Whether s has been replaced by β⁻¹s.
    pub scaled: bool,
    /// Polynomial in the flow variables T(i), s, β, γ.
    pub expansion: MPoly,
}

fn s_scale(scaled: bool) -> MPoly {
    if scaled {
        Model::beta_inv()
    } else {
        MPoly::one()
    }
}

/// r_λ s_λ(s) (or s_λ(β⁻¹s)) for every |λ| ≤ order.
fn lambda_coeffs(model: &Model, order: u32, scaled: bool) -> Vec<(Partition, MPoly)> {
    let scale = s_scale(scaled);
    let ps = s_power_sums(&model.s, scale);
    let lams: Vec<Partition> = (0..=order).flat_map(|n| partitions_of(n, None)).collect();
    lams.into_par_iter()
        .map(|l| {
            let c = &model.r(&l) * &schur_p(&l, &ps);
            (l, c)
        })
        .filter(|(_, c)| !c.is_zero())
        .collect()
}

/// Σ_{|λ|≤order} r_λ s_λ(t) s_λ(s).
pub fn tau_schur(model: &Model, order: u32, scaled: bool) -> MPoly {
    let t = flow_p(Var::T);
    let terms: Vec<MPoly> =
        lambda_coeffs(model, order, scaled).into_par_iter().map(|(l, c)| &c * &schur_p(&l, &t)).collect();
    terms.iter().fold(MPoly::zero(), |a, b| &a + b)
}

/// Σ γ^{|μ|} β^d H^d_G(μ,ν) p_μ(t) p_ν(s) from the enumeration oracle.
pub fn tau_hurwitz(model: &Model, order: u32, scaled: bool) -> Result<MPoly> {
    let m = model.m() as u32;
    let table = full_table_with(&model.weight, order, m * order.saturating_sub(1), false, false)?;
    let pt = flow_p(Var::T);
    let ps = s_power_sums(&model.s, s_scale(scaled));
    let mut r = MPoly::one();
    for ((mu, nu, d), v) in &table.entries {
        if v.is_zero() {
            continue;
        }
        let pn = nu.parts().iter().fold(MPoly::one(), |a, &i| &a * &ps(i));
        if pn.is_zero() {
            continue;
        }
        let pm = mu.parts().iter().fold(MPoly::one(), |a, &i| &a * &pt(i));
        let g = gamma_pow(&model.gamma, mu.weight() as i32);
        r += &(&(&(&g * v) * &pm) * &pn).mul_mono(&Mono::var(Var::Beta, *d as i32));
    }
    Ok(r)
}

/// Schur and Hurwitz expansions of τ(t, s), asserted equal.
pub fn tau_expand(model: &Model, order: u32) -> Result<TauSeries> {
    if order > TAU_ORDER_CAP {
        return Err(Error::CapExceeded(format!("γ-order {order} exceeds cap {TAU_ORDER_CAP}")));
    }
    let a = tau_schur(model, order, false);
    let b = tau_hurwitz(model, order, false)?;
    let diff = &a - &b;
    if !diff.is_zero() {
        return Err(Error::CrossCheckFailure(format!("Schur and Hurwitz expansions of τ differ by {diff}")));
    }
    Ok(TauSeries { order, scaled: false, expansion: a })
}

/// τ(Σ ε_i [x_i], β⁻¹s) through total x-degree `order`.
pub fn tau_at(model: &Model, points: &[(Var, i64)], order: u32) -> MPoly {
    let p = |i: u32| {
        let mut r = MPoly::zero();
        for &(v, e) in points {
            r += &MPoly::var_pow(v, i as i32).scale(&q(e));
        }
        r
    };
    let terms: Vec<MPoly> =
        lambda_coeffs(model, order, true).into_par_iter().map(|(l, c)| &c * &schur_p(&l, &p)).collect();
    terms.iter().fold(MPoly::zero(), |a, b| &a + b)
}

// ---------------------------------------------------------------- bases

#[derive(Clone, Debug)]
pub struct AdaptedBasisElement {
    pub k: i32,
    pub sign: Sign,
    /// Exact through this power of x.
    pub order: i32,
    /// Set when truncated β-series entered; coefficients of x^{k+j} are
    /// then exact through β^{beta_order − j}.
    pub beta_order: Option<i32>,
    /// Series in X(1).
    pub series: MPoly,
}

/// Ψ±_0(x) = τ(±[x], β⁻¹s), checked against the Hurwitz-number sum.
pub fn baker_psi0(sign: Sign, order: u32, model: &Model) -> Result<AdaptedBasisElement> {
    let a = tau_at(model, &[(x(1), sign.value())], order);
    let b = psi0_hurwitz_sum(sign, order, model)?;
    let diff = &a - &b;
    if !diff.is_zero() {
        return Err(Error::CrossCheckFailure(format!("Ψ0 paths differ by {diff}")));
    }
    Ok(AdaptedBasisElement { k: 0, sign, order: order as i32, beta_order: None, series: a })
}

/// Σ (xγ)^{|μ|} (±1)^{ℓ(μ)} β^{d−ℓ(ν)} H^d_G(μ,ν) p_ν(s), with H^d_G from
/// the character formula.
pub fn psi0_hurwitz_sum(sign: Sign, order: u32, model: &Model) -> Result<MPoly> {
    let ps = s_power_sums(&model.s, Model::beta_inv());
    let mut r = MPoly::zero();
    for n in 0..=order {
        let parts = partitions_of(n, None);
        let xg = &gamma_pow(&model.gamma, n as i32) * &MPoly::var_pow(x(1), n as i32);
        for nu in &parts {
            let pn = nu.parts().iter().fold(MPoly::one(), |a, &i| &a * &ps(i));
            if pn.is_zero() {
                continue;
            }
            for mu in &parts {
                let h = frobenius_weighted(&model.weight, mu, nu)?;
                let sg = if sign == Sign::Minus && mu.len() % 2 == 1 { q(-1) } else { q(1) };
                r += &(&(&h * &pn) * &xg).scale(&sg);
            }
        }
    }
    Ok(r)
}

/// Ψ⁺_k = γ Σ_j x^{j+k} h_j(β⁻¹s) ρ_{j+k−1};  Ψ⁻_k = Σ_j x^{j+k} h_j(−β⁻¹s) ρ⁻¹_{−j−k}.
pub fn adapted_basis(k: i32, sign: Sign, order: i32, model: &Model) -> AdaptedBasisElement {
    let n = (order - k).max(-1);
    let mut series = MPoly::zero();
    let mut uses_series = false;
    if n >= 0 {
        let h = model.h(sign, n as u32);
        for j in 0..=n {
            let xm = MPoly::var_pow(x(1), j + k);
            let c = match sign {
                Sign::Plus => {
                    uses_series |= j + k - 1 <= -2;
                    &model.rho(j + k - 1) * &model.gamma
                }
                Sign::Minus => {
                    uses_series |= -j - k >= 1;
                    model.rho_inv(-j - k)
                }
            };
            series += &(&(&c * &h[j as usize]) * &xm);
        }
    }
    AdaptedBasisElement { k, sign, order, beta_order: uses_series.then_some(model.beta_order), series }
}

fn lowest_x(p: &MPoly, v: Var) -> Option<i32> {
    if p.is_zero() {
        None
    } else {
        Some(p.min_degree(v))
    }
}

/// Coefficient of x¹ in f·g: the formal ζ-residue after ζ = 1/x.
pub fn pair_series(f: &MPoly, g: &MPoly) -> MPoly {
    let fc = f.collect(x(1));
    let gc = g.collect(x(1));
    let mut r = MPoly::zero();
    for (a, ca) in &fc {
        if let Some(cb) = gc.get(&(1 - a)) {
            r += &(ca * cb);
        }
    }
    r
}

/// Hirota pairing ⟨f, g⟩, β-truncated when either side carries β-series.
pub fn hirota_pairing(f: &AdaptedBasisElement, g: &AdaptedBasisElement) -> Result<MPoly> {
    let vf = lowest_x(&f.series, x(1)).unwrap_or(f.k).min(f.k);
    let vg = lowest_x(&g.series, x(1)).unwrap_or(g.k).min(g.k);
    if f.order < 1 - vg || g.order < 1 - vf {
        return Err(Error::InsufficientTruncation);
    }
    let r = pair_series(&f.series, &g.series);
    let span = 1 - f.k - g.k;
    let bo = match (f.beta_order, g.beta_order) {
        (None, None) => None,
        (a, b) => Some(a.unwrap_or(i32::MAX).min(b.unwrap_or(i32::MAX)) - span.max(0)),
    };
    Ok(match bo {
        Some(b) => r.trunc_var(Var::Beta, b),
        None => r,
    })
}

// ---------------------------------------------------------------- pair correlators

/// K(x,x′) = 1/(x − x′) + Kreg(x,x′); Kreg exact through total degree `order`.
#[derive(Clone, Debug)]
pub struct PairCorrelator {
    pub order: u32,
    pub regular: MPoly,
}

impl PairCorrelator {
    /// Kreg with (X(1), Xp(1)) renamed to (a, b).
    pub fn at(&self, a: Var, b: Var) -> MPoly {
        let tmp_a = Var::Z(101);
        let tmp_b = Var::Z(102);
        self.regular
            .rename(|v| match v {
                Var::X(1) => tmp_a,
                Var::Xp(1) => tmp_b,
                o => o,
            })
            .rename(|v| {
                if v == tmp_a {
                    a
                } else if v == tmp_b {
                    b
                } else {
                    v
                }
            })
    }
}

/// Kreg via (τ([x] − [x′]) − 1)/(x − x′).
pub fn pair_correlator_tau(order: u32, model: &Model) -> Result<MPoly> {
    let t = tau_at(model, &[(x(1), 1), (xp(1), -1)], order + 1);
    (&t - &MPoly::one())
        .div_difference(x(1), xp(1))
        .ok_or_else(|| Error::CrossCheckFailure("τ([x]−[x′]) − 1 not divisible by x − x′".into()))
}

/// Kreg via the hook expansion Σ ρ_a ρ⁻¹_{−b−1} h_{a+j}(β⁻¹s) h_{b−j+1}(−β⁻¹s) x^a x′^b.
pub fn pair_correlator_hook(order: u32, model: &Model) -> MPoly {
    hook_terms(order, order, Some(order), model)
}

/// Kreg through bidegree (amax, bmax).
pub fn pair_correlator_hook_bi(amax: u32, bmax: u32, model: &Model) -> MPoly {
    hook_terms(amax, bmax, None, model)
}

fn hook_terms(amax: u32, bmax: u32, total: Option<u32>, model: &Model) -> MPoly {
    let hp = model.h(Sign::Plus, amax + bmax + 1);
    let hm = model.h(Sign::Minus, bmax + 1);
    let mut r = MPoly::zero();
    for a in 0..=amax as i32 {
        let ra = model.rho(a);
        let top = total.map_or(bmax as i32, |t| (t as i32 - a).min(bmax as i32));
        for b in 0..=top {
            let mut s = MPoly::zero();
            for j in 1..=b + 1 {
                s += &(&hp[(a + j) as usize] * &hm[(b - j + 1) as usize]);
            }
            let c = &(&ra * &model.rho_inv(-b - 1)) * &s;
            r += &c.mul_mono(&Mono::var(x(1), a).mul(&Mono::var(xp(1), b)));
        }
    }
    r
}

pub fn pair_correlator(order: u32, model: &Model) -> Result<PairCorrelator> {
    let a = pair_correlator_tau(order, model)?;
    let b = pair_correlator_hook(order, model);
    let diff = &a - &b;
    if !diff.is_zero() {
        return Err(Error::CrossCheckFailure(format!("pair correlator paths differ by {diff}")));
    }
    Ok(PairCorrelator { order, regular: a })
}

fn det(m: &[Vec<MPoly>], weight: impl Fn(&Mono) -> i32 + Copy, max: i32) -> MPoly {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut r = MPoly::zero();
    for j in 0..n {
        let minor: Vec<Vec<MPoly>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, e)| e.clone()).collect()).collect();
        let t = m[0][j].mul_trunc(&det(&minor, weight, max), weight, max);
        if j % 2 == 0 {
            r += &t;
        } else {
            r -= &t;
        }
    }
    r
}

/// Π_{i<j} (x_i − x_j)(x′_j − x′_i), the numerator of the Cauchy determinant.
fn vandermonde_pair(n: u8) -> MPoly {
    let mut r = MPoly::one();
    for i in 1..=n {
        for j in i + 1..=n {
            r = &r * &(&MPoly::var(x(i)) - &MPoly::var(x(j)));
            r = &r * &(&MPoly::var(xp(j)) - &MPoly::var(xp(i)));
        }
    }
    r
}

/// Residual of K_n = det K(x_i, x′_j), both sides multiplied by Π(x_i − x′_j),
/// through total degree n(n−1) + order.
pub fn n_pair_residual(n: u8, order: u32, model: &Model) -> Result<MPoly> {
    if n == 0 || n > 4 {
        return Err(Error::Invalid("n-pair correlator needs 1 ≤ n ≤ 4".into()));
    }
    let cut = (n as i32) * (n as i32 - 1) + order as i32;
    let pts: Vec<(Var, i64)> = (1..=n).flat_map(|i| [(x(i), 1), (xp(i), -1)]).collect();
    let t = tau_at(model, &pts, order);
    let lhs = vandermonde_pair(n).mul_trunc(&t, x_degree, cut);
    let k = pair_correlator(order + 1, model)?;
    let mut m = vec![];
    for i in 1..=n {
        // row i scaled by Π_j (x_i − x′_j)
        let mut di = MPoly::one();
        for j in 1..=n {
            di = &di * &(&MPoly::var(x(i)) - &MPoly::var(xp(j)));
        }
        let mut row = vec![];
        for j in 1..=n {
            let cof = di.div_difference(x(i), xp(j)).unwrap();
            row.push(&cof + &di.mul_trunc(&k.at(x(i), xp(j)), x_degree, cut));
        }
        m.push(row);
    }
    let rhs = det(&m, x_degree, cut).trunc_total(|v| matches!(v, Var::X(_) | Var::Xp(_)), cut);
    Ok(&lhs - &rhs)
}

pub fn n_pair_correlator_check(n: u8, order: u32, model: &Model) -> Result<()> {
    let r = n_pair_residual(n, order, model)?;
    if r.is_zero() {
        Ok(())
    } else {
        Err(Error::CrossCheckFailure(format!("K_{n} determinant identity residual {r}")))
    }
}

// ---------------------------------------------------------------- correlators

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CorrelatorKind {
    W,
    TildeW,
    F,
    TildeF,
    TildeFgn,
}

#[derive(Clone, Debug)]
pub struct CorrelatorSet {
    pub n: u8,
    pub kind: CorrelatorKind,
    /// Exact through this total x-degree.
    pub order: u32,
    pub genus: Option<u32>,
    pub data: MPoly,
}

/// Apply Π ∇(x_i) (or ∇̃ when `tilde`) to f and set t = 0.
pub fn apply_nablas(f: &MPoly, vars: &[Var], tilde: bool) -> MPoly {
    let n = vars.len() as i32;
    let mut cur = f.retain(|m| m.total(|v| matches!(v, Var::T(_))) == n);
    for &v in vars {
        let mut next = MPoly::zero();
        for (m, c) in &cur.terms {
            for &(tv, e) in &m.0 {
                if let Var::T(i) = tv {
                    let shift = if tilde { i as i32 } else { i as i32 - 1 };
                    let mut coef = c * q(e as i64);
                    if tilde {
                        coef /= q(i as i64);
                    }
                    let mm = m.with(tv, e - 1).mul(&Mono::var(v, shift));
                    next.add_term(mm, coef);
                }
            }
        }
        cur = next;
    }
    cur
}

fn scaled_tau(model: &Model, weight: u32) -> MPoly {
    tau_schur(model, weight, true)
}

fn log_tau(model: &Model, weight: u32) -> MPoly {
    log_trunc(&scaled_tau(model, weight), t_weight, weight as i32)
}

fn xs(n: u8) -> Vec<Var> {
    (1..=n).map(x).collect()
}

/// W_n exact through total x-degree `order`.
pub fn w_derivation(n: u8, order: u32, model: &Model) -> MPoly {
    apply_nablas(&scaled_tau(model, order + n as u32), &xs(n), false)
}

pub fn wtilde_derivation(n: u8, order: u32, model: &Model) -> MPoly {
    apply_nablas(&log_tau(model, order + n as u32), &xs(n), false)
}

/// W̃_n from single n-cycles of pair correlators (n ≤ 3).
pub fn wtilde_cycles(n: u8, order: u32, model: &Model) -> Result<MPoly> {
    let k = pair_correlator(order + 2, model)?;
    let d = |i: u8, j: u8| &MPoly::var(x(i)) - &MPoly::var(x(j));
    let trunc = |p: MPoly, o: u32| p.trunc_total(|v| matches!(v, Var::X(_)), o as i32);
    match n {
        1 => Ok(trunc(k.at(x(1), x(1)), order)),
        2 => {
            let a = k.at(x(1), x(2));
            let b = k.at(x(2), x(1));
            let num = (&a - &b).div_difference(x(1), x(2)).ok_or(Error::CrossCheckFailure("W̃2 division".into()))?;
            Ok(trunc(&num - &a.mul_trunc(&b, x_degree, order as i32), order))
        }
        3 => {
            let cut = order as i32 + 3;
            let one = MPoly::one();
            let f = |i: u8, j: u8| &one + &d(i, j).mul_trunc(&k.at(x(i), x(j)), x_degree, cut);
            let p1 = f(1, 2).mul_trunc(&f(2, 3), x_degree, cut).mul_trunc(&f(3, 1), x_degree, cut);
            let p2 = f(1, 3).mul_trunc(&f(3, 2), x_degree, cut).mul_trunc(&f(2, 1), x_degree, cut);
            let num = &p1 - &p2;
            let err = || Error::CrossCheckFailure("W̃3 division".into());
            let q1 = num.div_difference(x(1), x(2)).ok_or_else(err)?;
            let q2 = q1.div_difference(x(2), x(3)).ok_or_else(err)?;
            let q3 = q2.div_difference(x(3), x(1)).ok_or_else(err)?;
            Ok(trunc(q3, order))
        }
        _ => Err(Error::Invalid("cycle formula implemented for n ≤ 3".into())),
    }
}

/// Set partitions of {0..n}.
pub fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = vec![];
    for p in set_partitions(n - 1) {
        for i in 0..p.len() {
            let mut q = p.clone();
            q[i].push(n - 1);
            out.push(q);
        }
        let mut q = p.clone();
        q.push(vec![n - 1]);
        out.push(q);
    }
    out
}

/// W̃_n from W_1..W_n by the moment-cumulant inversion.
pub fn wtilde_cumulant(n: u8, order: u32, model: &Model) -> MPoly {
    let ws: Vec<MPoly> = (1..=n).map(|k| w_derivation(k, order, model)).collect();
    let mut r = MPoly::zero();
    for p in set_partitions(n as usize) {
        let b = p.len();
        let mut term = MPoly::constant(Q::from_integer(factorial(b as u32 - 1)) * q(if b % 2 == 1 { 1 } else { -1 }));
        for block in &p {
            let w = ws[block.len() - 1].rename(|v| match v {
                Var::X(i) => Var::Xp(block[i as usize - 1] as u8 + 1),
                o => o,
            });
            term = term.mul_trunc(&w, x_degree, order as i32);
        }
        r += &term;
    }
    r.rename(|v| match v {
        Var::Xp(i) => Var::X(i),
        o => o,
    })
}

pub fn correlators(n: u8, kind: CorrelatorKind, order: u32, model: &Model) -> Result<CorrelatorSet> {
    let data = match kind {
        CorrelatorKind::W => w_derivation(n, order, model),
        CorrelatorKind::F => apply_nablas(&scaled_tau(model, order), &xs(n), true),
        CorrelatorKind::TildeF => apply_nablas(&log_tau(model, order), &xs(n), true),
        CorrelatorKind::TildeW => {
            let a = wtilde_derivation(n, order, model);
            if n <= 4 {
                let c = wtilde_cumulant(n, order, model);
                if a != c {
                    return Err(Error::CrossCheckFailure(format!("W̃_{n}: derivation and cumulant routes differ")));
                }
            }
            if n <= 3 {
                let b = wtilde_cycles(n, order, model)?;
                if a != b {
                    return Err(Error::CrossCheckFailure(format!("W̃_{n}: derivation and cycle routes differ")));
                }
            }
            a
        }
        CorrelatorKind::TildeFgn => return Err(Error::Invalid("use fgn_extract".into())),
    };
    Ok(CorrelatorSet { n, kind, order, genus: None, data })
}

/// β^{2g−2+n} piece of F̃_n, checked against connected oracle numbers.
pub fn fgn_extract(g: u32, n: u8, order: u32, model: &Model) -> Result<CorrelatorSet> {
    let f = apply_nablas(&log_tau(model, order), &xs(n), true);
    let e = 2 * g as i32 - 2 + n as i32;
    let data = f.coeff_of(Var::Beta, e);
    let expected = fgn_oracle(g, n, order, model)?;
    let diff = &data - &expected;
    if !diff.is_zero() {
        return Err(Error::CrossCheckFailure(format!("F̃_{{{g},{n}}} differs from the oracle by {diff}")));
    }
    Ok(CorrelatorSet { n, kind: CorrelatorKind::TildeFgn, order, genus: Some(g), data })
}

/// Σ γ^{|μ|} H̃^{2g−2+n+ℓ(ν)}(μ,ν) |aut μ| m_μ(x) p_ν(s) over ℓ(μ) = n, |μ| ≤ order.
pub fn fgn_oracle(g: u32, n: u8, order: u32, model: &Model) -> Result<MPoly> {
    let xsv = xs(n);
    let ps = s_power_sums(&model.s, MPoly::one());
    let m = model.m() as u32;
    let table = full_table_with(&model.weight, order, m * order.saturating_sub(1) + 2 * g + n as u32, true, false)?;
    let mut r = MPoly::zero();
    for ((mu, nu, d), v) in &table.entries {
        if mu.len() != n as usize || v.is_zero() {
            continue;
        }
        if *d as i64 != 2 * g as i64 - 2 + n as i64 + nu.len() as i64 {
            continue;
        }
        let pn = nu.parts().iter().fold(MPoly::one(), |a, &i| &a * &ps(i));
        let c = &(&(v * &pn) * &gamma_pow(&model.gamma, mu.weight() as i32)) * &monomial_sym(mu, &xsv);
        r += &c.scale(&Q::from_integer(mu.aut()));
    }
    Ok(r)
}

// ---------------------------------------------------------------- boson/fermion

#[derive(Clone, Debug, Serialize)]
pub struct BosonFermionReport {
    pub order: u32,
    pub psi_plus_sum: bool,
    pub psi_plus_exp: bool,
    pub psi_minus_sum: bool,
    pub psi_minus_exp: bool,
    pub k_sum: bool,
    pub k_exp: bool,
}

impl BosonFermionReport {
    pub fn ok(&self) -> bool {
        self.psi_plus_sum && self.psi_plus_exp && self.psi_minus_sum && self.psi_minus_exp && self.k_sum && self.k_exp
    }
}

/// ∇̃(x)^n ∇̃(x′)^m f at t = 0, i.e. F_{n+m}(x,…,x,x′,…,x′).
fn diag(f: &MPoly, n: usize, m: usize) -> MPoly {
    let mut vars = vec![x(1); n];
    vars.extend(std::iter::repeat(xp(1)).take(m));
    apply_nablas(f, &vars, true)
}

pub fn boson_fermion_check(model: &Model, order: u32) -> Result<BosonFermionReport> {
    let tau = scaled_tau(model, order);
    let ltau = log_trunc(&tau, t_weight, order as i32);
    let o = order as i32;
    let mut rep = BosonFermionReport {
        order,
        psi_plus_sum: false,
        psi_plus_exp: false,
        psi_minus_sum: false,
        psi_minus_exp: false,
        k_sum: false,
        k_exp: false,
    };
    for sign in [Sign::Plus, Sign::Minus] {
        let psi = tau_at(model, &[(x(1), sign.value())], order);
        let mut sum = MPoly::zero();
        let mut expo = MPoly::zero();
        for n in 0..=order as usize {
            let c = q(sign.value()).pow(n as i32) / Q::from_integer(factorial(n as u32));
            sum += &diag(&tau, n, 0).scale(&c);
            if n > 0 {
                expo += &diag(&ltau, n, 0).scale(&c);
            }
        }
        let e = exp_trunc(&expo, x_degree, o);
        let (a, b) = (psi == sum, psi == e);
        match sign {
            Sign::Plus => (rep.psi_plus_sum, rep.psi_plus_exp) = (a, b),
            Sign::Minus => (rep.psi_minus_sum, rep.psi_minus_exp) = (a, b),
        }
    }
    let t = tau_at(model, &[(x(1), 1), (xp(1), -1)], order);
    let mut sum = MPoly::zero();
    let mut expo = MPoly::zero();
    for n in 0..=order as usize {
        for m in 0..=(order as usize - n) {
            let c = q(if m % 2 == 0 { 1 } else { -1 })
                / (Q::from_integer(factorial(n as u32)) * Q::from_integer(factorial(m as u32)));
            sum += &diag(&tau, n, m).scale(&c);
            if n + m > 0 {
                expo += &diag(&ltau, n, m).scale(&c);
            }
        }
    }
    rep.k_sum = t == sum;
    rep.k_exp = t == exp_trunc(&expo, x_degree, o);
    if !rep.ok() {
        return Err(Error::CrossCheckFailure(format!("boson/fermion identities failed: {rep:?}")));
    }
    Ok(rep)
}

/// Coefficients of an MPoly as sorted rows, for JSON dumps.
pub fn mpoly_rows(p: &MPoly) -> Vec<BTreeMap<String, String>> {
    p.terms
        .iter()
        .map(|(m, c)| {
            let mut row = BTreeMap::new();
            for (v, e) in &m.0 {
                row.insert(v.name(), e.to_string());
            }
            row.insert("coeff".into(), crate::algebra::rational::fmt_q(c));
            row
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::qf;
    use num_traits::Zero;

    fn t(i: u8) -> MPoly {
        MPoly::var(Var::T(i))
    }
    fn s(i: u8) -> MPoly {
        MPoly::var(Var::S(i))
    }
    fn beta() -> MPoly {
        MPoly::var(Var::Beta)
    }

    #[test]
    fn tau_low_orders() {
        let m = Model::symbolic(Weight::numeric(&[q(1)]), 2);
        let tau = tau_expand(&m, 2).unwrap().expansion;
        let g = |k| tau.coeff_of(Var::Gamma, k);
        assert_eq!(g(0), MPoly::one());
        assert_eq!(g(1), &t(1) * &s(1));
        // s_(2) = t1²/2 + t2, s_(11) = t1²/2 − t2
        let s2 = |f: &dyn Fn(u8) -> MPoly| &(&f(1) * &f(1)).scale(&qf(1, 2)) + &f(2);
        let s11 = |f: &dyn Fn(u8) -> MPoly| &(&f(1) * &f(1)).scale(&qf(1, 2)) - &f(2);
        let want = &(&(&(&MPoly::one() + &beta()) * &s2(&t)) * &s2(&s))
            + &(&(&(&MPoly::one() - &beta()) * &s11(&t)) * &s11(&s));
        assert_eq!(g(2), want);
    }

    #[test]
    fn psi0_examples() {
        let m = Model::symbolic(Weight::numeric(&[q(1), q(2)]), 2);
        let p = baker_psi0(Sign::Plus, 4, &m).unwrap().series;
        assert_eq!(p.coeff_of(Var::X(1), 0), MPoly::one());
        let x1 = p.coeff_of(Var::X(1), 1);
        assert_eq!(x1, &(&MPoly::var(Var::Gamma) * &s(1)) * &MPoly::var_pow(Var::Beta, -1));
        baker_psi0(Sign::Minus, 4, &m).unwrap();
        for sign in [Sign::Plus, Sign::Minus] {
            let a = adapted_basis(0, sign, 4, &m).series;
            assert_eq!(a, tau_at(&m, &[(x(1), sign.value())], 4));
        }
    }

    #[test]
    fn sderiv() {
        let m = Model::symbolic(Weight::numeric(&[q(1), q(2)]), 3);
        for k in -1..=2 {
            for mm in 1..=3u8 {
                let o = 6;
                let a = adapted_basis(k, Sign::Plus, o, &m).series.deriv(Var::S(mm)).mul_mono(&Mono::var(Var::Beta, 1));
                let b = adapted_basis(k + mm as i32, Sign::Plus, o, &m).series;
                assert_eq!(a, b);
                let a = adapted_basis(k, Sign::Minus, o, &m).series.deriv(Var::S(mm)).mul_mono(&Mono::var(Var::Beta, 1));
                let b = adapted_basis(k + mm as i32, Sign::Minus, o, &m).series;
                assert_eq!(a.scale(&q(-1)), b);
            }
        }
    }

    #[test]
    fn hirota_orthogonality() {
        let m = Model::numeric(&[q(1), q(2)], &[q(1), qf(1, 2)], q(1));
        for j in -3..=3 {
            for k in -3..=3 {
                let f = adapted_basis(j, Sign::Plus, 1 - k, &m);
                let g = adapted_basis(k, Sign::Minus, 1 - j, &m);
                let p = hirota_pairing(&f, &g).unwrap();
                let want = if j + k == 1 { m.gamma.clone() } else { MPoly::zero() };
                assert_eq!(p, want, "j={j} k={k}");
            }
        }
        let f = adapted_basis(0, Sign::Plus, 0, &m);
        let g = adapted_basis(0, Sign::Minus, 0, &m);
        assert!(matches!(hirota_pairing(&f, &g), Err(Error::InsufficientTruncation)));
        assert_eq!(pair_series(&MPoly::var_pow(x(1), 3), &MPoly::var_pow(x(1), -2)), MPoly::one());
        assert!(pair_series(&MPoly::var_pow(x(1), 3), &MPoly::var_pow(x(1), -1)).is_zero());
    }

    #[test]
    fn pair_correlator_paths() {
        let m = Model::symbolic(Weight::numeric(&[q(1), q(2)]), 2);
        let k = pair_correlator(4, &m).unwrap();
        let c00 = k.regular.coeff(&Mono::one());
        assert!(c00.is_zero());
        let lead = k.regular.retain(|mm| x_degree(mm) == 0);
        assert_eq!(lead, &(&MPoly::var(Var::Gamma) * &s(1)) * &MPoly::var_pow(Var::Beta, -1));
    }

    #[test]
    fn n_pair_determinant() {
        let m = Model::numeric(&[q(1)], &[q(1), qf(1, 2)], q(1));
        n_pair_correlator_check(1, 4, &m).unwrap();
        n_pair_correlator_check(2, 3, &m).unwrap();
        n_pair_correlator_check(3, 2, &m).unwrap();
    }

    #[test]
    fn wtilde_routes() {
        let m = Model::numeric(&[q(1)], &[q(0), qf(1, 2)], q(1));
        for n in 1..=3 {
            correlators(n, CorrelatorKind::TildeW, 5, &m).unwrap();
        }
        // y(x) = x + 2x³ + 5x⁵ for CURVE-A, as the γ-lowest β⁻¹ part of x W̃1
        let w1 = correlators(1, CorrelatorKind::TildeW, 5, &m).unwrap().data;
        let y = w1.coeff_of(Var::Beta, -1).mul_mono(&Mono::var(x(1), 1));
        let want = &MPoly::var_pow(x(1), 2) + &MPoly::var_pow(x(1), 4).scale(&q(2));
        assert_eq!(y.trunc_total(|v| matches!(v, Var::X(_)), 5), want);
    }

    #[test]
    fn fgn_oracle_small() {
        let m = Model::symbolic(Weight::numeric(&[q(1)]), 2);
        let f = fgn_extract(0, 1, 4, &m).unwrap().data;
        let c = f.coeff(&Mono::var(Var::Gamma, 1).mul(&Mono::var(x(1), 1)).mul(&Mono::var(Var::S(1), 1)));
        assert_eq!(c, q(1));
        fgn_extract(0, 2, 4, &m).unwrap();
        fgn_extract(1, 1, 4, &m).unwrap();
    }

    #[test]
    fn boson_fermion() {
        let m = Model::numeric(&[q(1), q(2)], &[q(1), qf(1, 3)], q(1));
        assert!(boson_fermion_check(&m, 4).unwrap().ok());
    }

    #[test]
    fn cumulant_partitions() {
        assert_eq!(set_partitions(4).len(), 15);
    }
}
