//! Euler-operator calculus on the adapted basis: the T-series, recursion
//! operators, quantum curve, P/Q systems, the Christoffel–Darboux matrix,
//! the folded system and the projector M.

use num_traits::One;
use serde::Serialize;

use crate::algebra::mpoly::{MPoly, Mono, Var};
use crate::algebra::rational::{bernoulli_numbers, binomial, q, Q};
use crate::error::{Error, Result};
use crate::symfun::{gamma_pow, Weight};
use crate::tau::{adapted_basis, pair_correlator_hook_bi, AdaptedBasisElement, Model, Sign};

fn xv() -> Var {
    Var::X(1)
}

// ---------------------------------------------------------------- T-series

/// T(x) = x·log γ + series; `series` ∈ Q[x][[β]] truncated at β^beta_order.
#[derive(Clone, Debug)]
pub struct TSeries {
    pub beta_order: i32,
    /// Coefficient of log γ (always x).
    pub log_gamma_coeff: MPoly,
    pub series: MPoly,
}

/// A_k = (1/k) Σ c_i^k from log G(z) = Σ (−1)^{k−1} A_k z^k.
pub fn a_coeffs(w: &Weight, n: usize) -> Vec<MPoly> {
    // log(1 + u) with u = G(z) − 1, in a formal variable z = Eps
    let z = MPoly::var(Var::Eps);
    let u = &w.eval(&z) - &MPoly::one();
    let mut log = MPoly::zero();
    let mut p = MPoly::one();
    for k in 1..=n {
        p = (&p * &u).trunc_var(Var::Eps, n as i32);
        let c = if k % 2 == 1 { q(1) } else { q(-1) } / q(k as i64);
        log += &p.scale(&c);
    }
    (0..=n)
        .map(|k| {
            let c = log.coeff_of(Var::Eps, k as i32);
            if k % 2 == 1 {
                c
            } else {
                c.scale(&q(-1))
            }
        })
        .collect()
}

/// Bernoulli polynomial B_n(y) for y an MPoly, with B_1 = −1/2.
pub fn bernoulli_poly(n: usize, y: &MPoly) -> MPoly {
    let b = bernoulli_numbers(n);
    let mut r = MPoly::zero();
    for k in 0..=n {
        r += &y.pow((n - k) as u32).scale(&(binomial(n as i64, k as i64) * &b[k]));
    }
    r
}

/// T(x) = x log γ + Σ_k A_k β^k (B_{k+1}(−x) − B_{k+1}(0))/(k+1).
pub fn t_series(w: &Weight, beta_order: i32) -> TSeries {
    let a = a_coeffs(w, beta_order.max(0) as usize);
    let x = MPoly::var(xv());
    let mx = x.scale(&q(-1));
    let mut s = MPoly::zero();
    for k in 1..=beta_order.max(0) as usize {
        let b = &bernoulli_poly(k + 1, &mx) - &bernoulli_poly(k + 1, &MPoly::zero());
        s += &(&a[k] * &b).scale(&(Q::one() / q(k as i64 + 1))).mul_mono(&Mono::var(Var::Beta, k as i32));
    }
    TSeries { beta_order, log_gamma_coeff: x, series: s }
}

impl TSeries {
    /// The series part at x ↦ y.
    pub fn at(&self, y: &MPoly) -> MPoly {
        self.series.subs(xv(), y)
    }

    /// exp(T(x) − T(x−1) − log γ) − G(βx), truncated; zero when TGrel holds.
    pub fn tgrel_residual(&self, w: &Weight) -> MPoly {
        let x = MPoly::var(xv());
        let d = &self.series - &self.at(&(&x - &MPoly::one()));
        let e = crate::tau::exp_trunc(&d, |m| m.exp(Var::Beta), self.beta_order);
        let g = w.eval(&x.mul_mono(&Mono::var(Var::Beta, 1)));
        (&e - &g).trunc_var(Var::Beta, self.beta_order)
    }
}

// ---------------------------------------------------------------- recursion operators

/// R± f = γ x G(±βD) f, termwise on x^k.
pub fn apply_recursion(sign: Sign, f: &MPoly, model: &Model) -> MPoly {
    let mut r = MPoly::zero();
    for (k, c) in f.collect(xv()) {
        let g = model.weight.eval(&MPoly::var(Var::Beta).scale(&q(sign.value() * k as i64)));
        r += &(&(&g * &c) * &model.gamma).mul_mono(&Mono::var(xv(), k + 1));
    }
    r
}

/// D f = x f′.
pub fn euler(f: &MPoly) -> MPoly {
    let mut r = MPoly::zero();
    for (m, c) in &f.terms {
        let e = m.exp(xv());
        if e != 0 {
            r.add_term(m.clone(), c * q(e as i64));
        }
    }
    r
}

/// Keep coefficients that are determined: x exponent ≤ order and, for
/// elements built from β-series, β exponent ≤ beta_order − (x exponent − k).
pub fn valid_part(p: &MPoly, k: i32, order: i32, beta_order: Option<i32>) -> MPoly {
    p.retain(|m| {
        let e = m.exp(xv());
        e <= order && beta_order.map_or(true, |b| m.exp(Var::Beta) <= b - (e - k))
    })
}

/// (βD ∓ S(R±))Ψ±_k − βkΨ±_k, restricted to its determined part.
pub fn quantum_curve_residual(sign: Sign, k: i32, order: i32, model: &Model) -> MPoly {
    let psi = adapted_basis(k, sign, order, model);
    let beta = MPoly::var(Var::Beta);
    let mut sr = MPoly::zero();
    let mut cur = psi.series.clone();
    for (m, sm) in model.s.iter().enumerate() {
        cur = apply_recursion(sign, &cur, model);
        sr += &(&cur * sm).scale(&q(m as i64 + 1));
    }
    let lhs = &(&beta * &euler(&psi.series)) - &sr.scale(&q(sign.value()));
    let res = &lhs - &(&beta * &psi.series).scale(&q(k as i64));
    valid_part(&res, k, order, psi.beta_order)
}

// ---------------------------------------------------------------- P, Q

#[derive(Clone, Debug)]
pub struct BandSystem {
    pub sign: Sign,
    pub lo: i32,
    pub hi: i32,
    pub p: Vec<Vec<MPoly>>,
    pub q: Vec<Vec<MPoly>>,
    pub interior_p: Vec<i32>,
    pub interior_q: Vec<i32>,
    pub residual_zero: bool,
}

/// P±_{ij} = ±βjδ_{ij} + (j−i)s_{j−i}.
pub fn p_entry(sign: Sign, i: i32, j: i32, model: &Model) -> MPoly {
    let mut r = MPoly::zero();
    if i == j {
        r = MPoly::var(Var::Beta).scale(&q(sign.value() * j as i64));
    }
    let m = j - i;
    if m >= 1 && (m as usize) <= model.l() {
        r += &model.s[m as usize - 1].scale(&q(m as i64));
    }
    r
}

/// Q±_{ij} = Σ_{k=i−1}^{j} G(±kβ) h_{k−i+1}(±β⁻¹s) h_{j−k}(∓β⁻¹s).
pub fn q_entry(sign: Sign, i: i32, j: i32, model: &Model) -> MPoly {
    if j < i - 1 {
        return MPoly::zero();
    }
    let n = (j - i + 1) as u32;
    let (ha, hb) = match sign {
        Sign::Plus => (model.h(Sign::Plus, n), model.h(Sign::Minus, n)),
        Sign::Minus => (model.h(Sign::Minus, n), model.h(Sign::Plus, n)),
    };
    let mut r = MPoly::zero();
    for k in (i - 1)..=j {
        let g = model.weight.eval(&MPoly::var(Var::Beta).scale(&q(sign.value() * k as i64)));
        r += &(&(&g * &ha[(k - i + 1) as usize]) * &hb[(j - k) as usize]);
    }
    r
}

/// P and Q on the window [lo, hi] with residuals of (1/γx)Ψ = QΨ and
/// ±βDΨ = PΨ on interior rows.
pub fn build_pq(sign: Sign, lo: i32, hi: i32, order: i32, model: &Model) -> Result<BandSystem> {
    let l = model.l() as i32;
    let lm = l * model.m() as i32;
    let idx: Vec<i32> = (lo..=hi).collect();
    let p: Vec<Vec<MPoly>> = idx.iter().map(|&i| idx.iter().map(|&j| p_entry(sign, i, j, model)).collect()).collect();
    let qm: Vec<Vec<MPoly>> = idx.iter().map(|&i| idx.iter().map(|&j| q_entry(sign, i, j, model)).collect()).collect();
    let interior_p: Vec<i32> = idx.iter().cloned().filter(|&i| i + l <= hi).collect();
    let interior_q: Vec<i32> = idx.iter().cloned().filter(|&i| i - 1 >= lo && i - 1 + lm <= hi).collect();
    if interior_p.is_empty() || interior_q.is_empty() {
        return Err(Error::WindowTooSmall);
    }
    let psi: Vec<AdaptedBasisElement> = idx.iter().map(|&k| adapted_basis(k, sign, order, model)).collect();
    let gamma_inv = gamma_pow(&model.gamma, -1);
    // coefficients of x^{i+n} in either residual are exact through β^{B−n}
    let bo = psi.iter().any(|p| p.beta_order.is_some()).then_some(model.beta_order);
    let mut zero = true;
    for &i in &interior_p {
        let r = (i - lo) as usize;
        let mut res = euler(&psi[r].series).mul_mono(&Mono::var(Var::Beta, 1)).scale(&q(sign.value()));
        for (c, e) in p[r].iter().enumerate() {
            res -= &(e * &psi[c].series);
        }
        zero &= valid_part(&res, i, order, bo).is_zero();
    }
    for &i in &interior_q {
        let r = (i - lo) as usize;
        let mut res = (&psi[r].series * &gamma_inv).mul_mono(&Mono::var(xv(), -1));
        for (c, e) in qm[r].iter().enumerate() {
            res -= &(e * &psi[c].series);
        }
        zero &= valid_part(&res, i - 1, order - 1, bo).is_zero();
    }
    Ok(BandSystem { sign, lo, hi, p, q: qm, interior_p, interior_q, residual_zero: zero })
}

// ---------------------------------------------------------------- matrices

pub type Mat = Vec<Vec<MPoly>>;

pub fn mat_zero(n: usize) -> Mat {
    vec![vec![MPoly::zero(); n]; n]
}

pub fn transpose(a: &Mat) -> Mat {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[j][i].clone()).collect()).collect()
}

pub fn mat_mul(a: &Mat, b: &Mat, trunc: &dyn Fn(&MPoly, &MPoly) -> MPoly) -> Mat {
    let n = a.len();
    let mut r = mat_zero(n);
    for i in 0..n {
        for j in 0..n {
            let mut s = MPoly::zero();
            for k in 0..n {
                s += &trunc(&a[i][k], &b[k][j]);
            }
            r[i][j] = s;
        }
    }
    r
}

pub fn mat_sub(a: &Mat, b: &Mat) -> Mat {
    a.iter().zip(b).map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x - y).collect()).collect()
}

pub fn trace(a: &Mat) -> MPoly {
    (0..a.len()).fold(MPoly::zero(), |s, i| &s + &a[i][i])
}

pub fn is_zero_mat(a: &Mat) -> bool {
    a.iter().all(|r| r.iter().all(|e| e.is_zero()))
}

pub fn det(a: &Mat) -> MPoly {
    let n = a.len();
    match n {
        0 => MPoly::one(),
        1 => a[0][0].clone(),
        _ => {
            let mut r = MPoly::zero();
            for j in 0..n {
                if a[0][j].is_zero() {
                    continue;
                }
                let t = &a[0][j] * &det(&minor(a, 0, j));
                if j % 2 == 0 {
                    r += &t;
                } else {
                    r -= &t;
                }
            }
            r
        }
    }
}

fn minor(a: &Mat, r: usize, c: usize) -> Mat {
    a.iter()
        .enumerate()
        .filter(|(i, _)| *i != r)
        .map(|(_, row)| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, e)| e.clone()).collect())
        .collect()
}

/// Inverse by the adjugate; the determinant must be a single term.
pub fn inverse(a: &Mat) -> Result<Mat> {
    let d = det(a);
    if d.len() != 1 {
        return Err(Error::Invalid(format!("determinant {d} is not a monomial")));
    }
    let (m, c) = d.terms.iter().next().unwrap();
    let inv_m = Mono(m.0.iter().map(|(v, e)| (*v, -e)).collect());
    let inv_c = Q::one() / c;
    let n = a.len();
    let mut r = mat_zero(n);
    for i in 0..n {
        for j in 0..n {
            let cof = det(&minor(a, j, i));
            let s = if (i + j) % 2 == 0 { inv_c.clone() } else { -inv_c.clone() };
            r[i][j] = cof.mul_mono(&inv_m).scale(&s);
        }
    }
    Ok(r)
}

// ---------------------------------------------------------------- symbols

/// Δ±(v) f = S(v) f ± β v ∂_v f.
fn delta(sign: Sign, v: Var, f: &MPoly, model: &Model) -> MPoly {
    let s = model.s_poly(&MPoly::var(v));
    let mut d = MPoly::zero();
    for (m, c) in &f.terms {
        let e = m.exp(v);
        if e != 0 {
            d.add_term(m.mul(&Mono::var(Var::Beta, 1)), c * q(e as i64 * sign.value()));
        }
    }
    &(&s * f) + &d
}

/// V±(v) f = G(Δ±(v)) f.
fn vop(sign: Sign, v: Var, f: &MPoly, model: &Model) -> MPoly {
    let mut r = f.clone();
    let mut cur = f.clone();
    for g in &model.weight.g {
        cur = delta(sign, v, &cur, model);
        r += &(g * &cur);
    }
    r
}

/// 1/(r − t) expanded in t/r (`in_r = true`) or in r/t, through `terms` terms.
fn cauchy_kernel(in_r: bool, terms: i32) -> MPoly {
    let mut r = MPoly::zero();
    for k in 0..terms {
        if in_r {
            r.add_term(Mono::var(Var::Tt, k).mul(&Mono::var(Var::R, -k - 1)), Q::one());
        } else {
            r.add_term(Mono::var(Var::R, k).mul(&Mono::var(Var::Tt, -k - 1)), -Q::one());
        }
    }
    r
}

fn polynomial_part(p: &MPoly) -> MPoly {
    p.retain(|m| m.exp(Var::R) >= 0 && m.exp(Var::Tt) >= 0)
}

/// Apply a bilinear symbol to 1/(r − t) in both expansions and check the
/// polynomial parts agree.
fn symbol_polynomial(f: &dyn Fn(&MPoly) -> MPoly, terms: i32, what: &str) -> Result<MPoly> {
    let a = polynomial_part(&f(&cauchy_kernel(true, terms)));
    let b = polynomial_part(&f(&cauchy_kernel(false, terms)));
    if a != b {
        return Err(Error::CrossCheckFailure(format!("{what}: expansions in t/r and r/t disagree")));
    }
    Ok(a)
}

fn coeff_matrix(p: &MPoly, n: usize) -> Result<Mat> {
    let mut a = mat_zero(n);
    for (m, c) in &p.terms {
        let (i, j) = (m.exp(Var::R), m.exp(Var::Tt));
        if i as usize >= n || j as usize >= n {
            return Err(Error::CrossCheckFailure(format!("symbol has degree beyond {n}: r^{i} t^{j}")));
        }
        let rest = m.without(Var::R).without(Var::Tt);
        a[i as usize][j as usize].add_term(rest, c.clone());
    }
    Ok(a)
}

// ---------------------------------------------------------------- CD matrix

#[derive(Clone, Debug)]
pub struct CdMatrix {
    pub size: usize,
    pub a: Mat,
    pub det: MPoly,
    pub generating_polynomial_check: bool,
}

fn lm(model: &Model) -> Result<usize> {
    let n = model.l() * model.m();
    if n <= 1 {
        return Err(Error::DegenerateModel);
    }
    Ok(n)
}

/// A(r,t) = (r V₋(t) − t V₊(r)) 1/(r − t).
pub fn a_generating(model: &Model) -> Result<Mat> {
    let n = lm(model)?;
    let r = MPoly::var(Var::R);
    let t = MPoly::var(Var::Tt);
    let f = |k: &MPoly| &(&r * &vop(Sign::Minus, Var::Tt, k, model)) - &(&t * &vop(Sign::Plus, Var::R, k, model));
    let p = symbol_polynomial(&f, n as i32 + 2, "A(r,t)")?;
    coeff_matrix(&p, n)
}

/// A_ij = −Σ_{k=−i}^{j} G(kβ) h_{j−k}(−β⁻¹s) h_{i+k}(β⁻¹s), A_00 = 1.
pub fn a_formula(model: &Model) -> Result<Mat> {
    let n = lm(model)?;
    let hp = model.h(Sign::Plus, 2 * n as u32);
    let hm = model.h(Sign::Minus, 2 * n as u32);
    let mut a = mat_zero(n);
    a[0][0] = MPoly::one();
    for i in 1..n as i32 {
        for j in 1..n as i32 {
            let mut s = MPoly::zero();
            for k in -i..=j {
                let g = model.weight.eval(&MPoly::var(Var::Beta).scale(&q(k as i64)));
                s += &(&(&g * &hm[(j - k) as usize]) * &hp[(i + k) as usize]);
            }
            a[i as usize][j as usize] = s.scale(&q(-1));
        }
    }
    Ok(a)
}

/// (−1)^{LM(LM−1)/2} g_M^{LM−1} (L s_L)^{M(LM−1)}.
pub fn det_formula(model: &Model) -> Result<MPoly> {
    let n = lm(model)? as u32;
    let (l, m) = (model.l(), model.m() as u32);
    let sign = if (n * (n - 1) / 2) % 2 == 0 { q(1) } else { q(-1) };
    let gm = model.weight.g[m as usize - 1].pow(n - 1);
    let ls = model.s[l - 1].scale(&q(l as i64)).pow(m * (n - 1));
    Ok((&gm * &ls).scale(&sign))
}

pub fn build_a(model: &Model) -> Result<CdMatrix> {
    let a = a_generating(model)?;
    let b = a_formula(model)?;
    if a != b {
        return Err(Error::CrossCheckFailure("generating polynomial and closed formula for A differ".into()));
    }
    let d = det(&a);
    if d != det_formula(model)? {
        return Err(Error::CrossCheckFailure(format!("det A = {d} differs from the closed formula")));
    }
    Ok(CdMatrix { size: a.len(), a, det: d, generating_polynomial_check: true })
}

/// (x − x′)K(x,x′) − Σ A_ij Ψ⁺_i(x)Ψ⁻_j(x′) through bidegree (order, order).
pub fn cd_residual(model: &Model, order: i32) -> Result<MPoly> {
    let cd = build_a(model)?;
    let n = cd.size;
    let kreg = pair_correlator_hook_bi(order as u32, order as u32, model);
    let xx = &MPoly::var(Var::X(1)) - &MPoly::var(Var::Xp(1));
    let lhs = &MPoly::one() + &(&xx * &kreg);
    let plus: Vec<MPoly> = (0..n as i32).map(|i| adapted_basis(i, Sign::Plus, order, model).series).collect();
    let minus: Vec<MPoly> = (0..n as i32)
        .map(|j| adapted_basis(j, Sign::Minus, order, model).series.rename(|v| if v == Var::X(1) { Var::Xp(1) } else { v }))
        .collect();
    let mut rhs = MPoly::zero();
    for i in 0..n {
        for j in 0..n {
            if !cd.a[i][j].is_zero() {
                rhs += &(&(&cd.a[i][j] * &plus[i]) * &minus[j]);
            }
        }
    }
    let bi = |p: MPoly| p.retain(|m| m.exp(Var::X(1)) <= order && m.exp(Var::Xp(1)) <= order);
    Ok(bi(&lhs - &rhs))
}

// ---------------------------------------------------------------- folded system

#[derive(Clone, Debug)]
pub struct FoldedSystem {
    pub a: Mat,
    pub e_tilde: Mat,
    pub e_minus: Mat,
    pub e_plus: Mat,
    pub duality_zero: bool,
    /// Some(true) when Ẽ was also read off the generating symbol.
    pub symbol_agrees: Option<bool>,
}

/// C(r,t) = (Δ₊(r) r V₋(t) − Δ₋(t) t V₊(r)) 1/(r − t).
pub fn c_generating(model: &Model) -> Result<Mat> {
    let n = lm(model)?;
    let r = MPoly::var(Var::R);
    let t = MPoly::var(Var::Tt);
    let f = |k: &MPoly| {
        let a = delta(Sign::Plus, Var::R, &(&r * &vop(Sign::Minus, Var::Tt, k, model)), model);
        let b = delta(Sign::Minus, Var::Tt, &(&t * &vop(Sign::Plus, Var::R, k, model)), model);
        &a - &b
    };
    let p = symbol_polynomial(&f, (n + model.l()) as i32 + 2, "C(r,t)")?;
    coeff_matrix(&p, n)
}

/// B(r,t) = rt (S(r) − S(t))/(r − t).
pub fn b_matrix(model: &Model) -> Result<Mat> {
    let n = lm(model)?;
    let r = MPoly::var(Var::R);
    let t = MPoly::var(Var::Tt);
    let diff = &model.s_poly(&r) - &model.s_poly(&t);
    let quo = diff.div_difference(Var::R, Var::Tt).ok_or(Error::Invalid("S(r) − S(t) not divisible".into()))?;
    coeff_matrix(&(&(&r * &t) * &quo), n)
}

/// 1/p for p a single term.
fn monomial_inverse(p: &MPoly) -> Result<MPoly> {
    if p.len() != 1 {
        return Err(Error::Invalid(format!("{p} is not a monomial")));
    }
    let (m, c) = p.terms.iter().next().unwrap();
    let inv_m = Mono(m.0.iter().map(|(v, e)| (*v, -e)).collect());
    Ok(MPoly::term(inv_m, Q::one() / c))
}

/// Coordinates of Ψ±_n (n ≤ upto) in Ψ±_0..Ψ±_{LM−1}, obtained by solving
/// (1/γx)Ψ_i = Σ_j Q_ij Ψ_j for its top index i − 1 + LM.
pub fn reduction_table(sign: Sign, upto: usize, model: &Model) -> Result<Vec<Vec<MPoly>>> {
    let n = lm(model)?;
    let gx = gamma_pow(&model.gamma, -1).mul_mono(&Mono::var(xv(), -1));
    let mut t: Vec<Vec<MPoly>> = vec![];
    for k in 0..=upto.max(n - 1) {
        if k < n {
            let mut e = vec![MPoly::zero(); n];
            e[k] = MPoly::one();
            t.push(e);
            continue;
        }
        let i = (k - n + 1) as i32;
        let top = monomial_inverse(&q_entry(sign, i, k as i32, model))?;
        let mut v: Vec<MPoly> = t[i as usize].iter().map(|c| c * &gx).collect();
        for j in (i - 1)..(k as i32) {
            let qij = q_entry(sign, i, j, model);
            if qij.is_zero() {
                continue;
            }
            for (a, c) in t[j as usize].iter().enumerate() {
                v[a] -= &(&qij * c);
            }
        }
        t.push(v.iter().map(|c| c * &top).collect());
    }
    Ok(t)
}

/// E± with ±βDΨ⃗± = E±Ψ⃗±, from the P± rows and the Q± reduction.
pub fn folded_matrix(sign: Sign, model: &Model) -> Result<Mat> {
    let n = lm(model)?;
    let red = reduction_table(sign, n - 1 + model.l(), model)?;
    let mut e = mat_zero(n);
    for k in 0..n {
        e[k][k] = MPoly::var(Var::Beta).scale(&q(sign.value() * k as i64));
        for (m, sm) in model.s.iter().enumerate() {
            let c = sm.scale(&q(m as i64 + 1));
            for (a, r) in red[k + m + 1].iter().enumerate() {
                e[k][a] += &(&c * r);
            }
        }
    }
    Ok(e)
}

/// Ẽ from the generating symbol C(r,t) − (1/γx)B(r,t); `None` when the
/// symbols do not fit in LM × LM (this happens for M = 1).
pub fn e_tilde_symbol(model: &Model) -> Result<Option<Mat>> {
    let (c, b) = match (c_generating(model), b_matrix(model)) {
        (Ok(c), Ok(b)) => (c, b),
        (Err(Error::CrossCheckFailure(m)), _) | (_, Err(Error::CrossCheckFailure(m))) if m.contains("beyond") => {
            return Ok(None)
        }
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    let gx = gamma_pow(&model.gamma, -1).mul_mono(&Mono::var(xv(), -1));
    let n = c.len();
    let mut et = mat_zero(n);
    for i in 0..n {
        for j in 0..n {
            et[i][j] = &c[i][j] - &(&gx * &b[i][j]);
        }
    }
    Ok(Some(et))
}

pub fn build_folded(model: &Model) -> Result<FoldedSystem> {
    let cd = build_a(model)?;
    let em = folded_matrix(Sign::Minus, model)?;
    let ep = folded_matrix(Sign::Plus, model)?;
    let full = |x: &MPoly, y: &MPoly| x * y;
    let et = mat_mul(&cd.a, &em, &full);
    let symbol_agrees = match e_tilde_symbol(model)? {
        Some(s) => {
            if s != et {
                return Err(Error::CrossCheckFailure("Ẽ from symbols differs from A E⁻".into()));
            }
            Some(true)
        }
        None => None,
    };
    let dual = mat_sub(&et, &mat_mul(&transpose(&ep), &cd.a, &full));
    Ok(FoldedSystem { a: cd.a, e_tilde: et, e_minus: em, e_plus: ep, duality_zero: is_zero_mat(&dual), symbol_agrees })
}

/// Lowest power of x among the entries of E⁻ and E⁺.
pub fn pole_order(f: &FoldedSystem) -> i32 {
    f.e_minus
        .iter()
        .chain(f.e_plus.iter())
        .flatten()
        .filter(|e| !e.is_zero())
        .map(|e| e.min_degree(xv()))
        .min()
        .unwrap_or(0)
        .min(0)
}

fn psi_vec(sign: Sign, n: usize, order: i32, model: &Model, var: Var) -> Vec<MPoly> {
    (0..n as i32)
        .map(|k| adapted_basis(k, sign, order, model).series.rename(|v| if v == Var::X(1) { var } else { v }))
        .collect()
}

fn x_trunc(var: Var, order: i32) -> impl Fn(&MPoly) -> MPoly {
    move |p: &MPoly| p.retain(|m| m.exp(var) <= order)
}

/// Residuals ±βDΨ⃗± − E±Ψ⃗± through x-order `order + pole_order`.
pub fn folded_residuals(model: &Model, order: i32) -> Result<(MPoly, MPoly)> {
    let f = build_folded(model)?;
    let cut = order + pole_order(&f);
    let n = f.a.len();
    let mut out = vec![];
    for (sign, e) in [(Sign::Plus, &f.e_plus), (Sign::Minus, &f.e_minus)] {
        let psi = psi_vec(sign, n, order, model, xv());
        let mut total = MPoly::zero();
        for i in 0..n {
            let mut r = euler(&psi[i]).mul_mono(&Mono::var(Var::Beta, 1)).scale(&q(sign.value()));
            for j in 0..n {
                r -= &(&e[i][j] * &psi[j]);
            }
            total += &x_trunc(xv(), cut)(&r).mul_mono(&Mono::var(Var::Z(i as u8), 1));
        }
        out.push(total);
    }
    Ok((out.remove(0), out.remove(0)))
}

// ---------------------------------------------------------------- projector

#[derive(Clone, Debug, Serialize)]
pub struct ProjectorReport {
    pub order: i32,
    pub idempotent: bool,
    pub trace_one: bool,
    pub adjoint_ode: bool,
    pub no_negative_beta: bool,
}

impl ProjectorReport {
    pub fn ok(&self) -> bool {
        self.idempotent && self.trace_one && self.adjoint_ode && self.no_negative_beta
    }
}

/// M(x) = Ψ⃗⁻(x) Ψ⃗⁺(x)ᵀ A, exact through x^order, in the variable `var`.
pub fn projector(model: &Model, a: &Mat, order: i32, var: Var) -> Mat {
    let n = a.len();
    let pm = psi_vec(Sign::Minus, n, order, model, var);
    let pp = psi_vec(Sign::Plus, n, order, model, var);
    let tr = x_trunc(var, order);
    let mut row = vec![MPoly::zero(); n];
    for (j, rj) in row.iter_mut().enumerate() {
        for k in 0..n {
            if !a[k][j].is_zero() {
                *rj += &(&pp[k] * &a[k][j]);
            }
        }
    }
    (0..n).map(|i| (0..n).map(|j| tr(&(&pm[i] * &row[j]))).collect()).collect()
}

pub fn projector_m(model: &Model, order: i32) -> Result<ProjectorReport> {
    let f = build_folded(model)?;
    let m = projector(model, &f.a, order, xv());
    let tr = x_trunc(xv(), order);
    let mul = |a: &MPoly, b: &MPoly| tr(&(a * b));
    let m2 = mat_mul(&m, &m, &mul);
    let idempotent = is_zero_mat(&mat_sub(&m2, &m));
    let trace_one = (&trace(&m) - &MPoly::one()).is_zero();
    let tr1 = x_trunc(xv(), order + pole_order(&f));
    let mul1 = |a: &MPoly, b: &MPoly| tr1(&(a * b));
    let comm = mat_sub(&mat_mul(&m, &f.e_minus, &mul1), &mat_mul(&f.e_minus, &m, &mul1));
    let lhs: Mat = m.iter().map(|r| r.iter().map(|e| tr1(&euler(e).mul_mono(&Mono::var(Var::Beta, 1)))).collect()).collect();
    let adjoint_ode = is_zero_mat(&mat_sub(&lhs, &comm));
    let no_negative_beta = m.iter().all(|r| r.iter().all(|e| e.is_zero() || e.min_degree(Var::Beta) >= 0));
    Ok(ProjectorReport { order, idempotent, trace_one, adjoint_ode, no_negative_beta })
}

/// W̃_n (n ≤ 3) from traces of M. W̃₁ is exact through x-degree
/// order + pole_order − 1, W̃₂ and W̃₃ through total degree order − n.
pub fn w_via_traces(n: u8, model: &Model, order: i32) -> Result<MPoly> {
    let f = build_folded(model)?;
    let deg = |p: &MPoly, o: i32| p.trunc_total(|v| matches!(v, Var::X(_)), o);
    match n {
        1 => {
            let m = projector(model, &f.a, order, xv());
            let cut = order + pole_order(&f);
            let tr = x_trunc(xv(), cut);
            let mul = |a: &MPoly, b: &MPoly| tr(&(a * b));
            let t = trace(&mat_mul(&m, &f.e_minus, &mul));
            let w = t.mul_mono(&Mono::var(Var::Beta, -1).mul(&Mono::var(xv(), -1)));
            Ok(deg(&w, cut - 1))
        }
        2 | 3 => {
            let ms: Vec<Mat> = (1..=n).map(|i| projector(model, &f.a, order, Var::X(i))).collect();
            let mul = |a: &MPoly, b: &MPoly| a.mul_trunc(b, crate::tau::x_degree, order);
            let err = || Error::CrossCheckFailure("trace formula division".into());
            if n == 2 {
                let t = trace(&mat_mul(&ms[0], &ms[1], &mul));
                let num = &deg(&t, order) - &MPoly::one();
                let q1 = num.div_difference(Var::X(1), Var::X(2)).ok_or_else(err)?;
                let q2 = q1.div_difference(Var::X(1), Var::X(2)).ok_or_else(err)?;
                Ok(deg(&q2, order - 2))
            } else {
                let t123 = trace(&mat_mul(&mat_mul(&ms[0], &ms[1], &mul), &ms[2], &mul));
                let t132 = trace(&mat_mul(&mat_mul(&ms[0], &ms[2], &mul), &ms[1], &mul));
                let num = deg(&(&t123 - &t132), order);
                let q1 = num.div_difference(Var::X(1), Var::X(2)).ok_or_else(err)?;
                let q2 = q1.div_difference(Var::X(2), Var::X(3)).ok_or_else(err)?;
                let q3 = q2.div_difference(Var::X(3), Var::X(1)).ok_or_else(err)?;
                Ok(deg(&q3, order - 3))
            }
        }
        _ => Err(Error::Invalid("trace formulas implemented for n ≤ 3".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::qf;

    fn curve_a() -> Model {
        Model::numeric(&[q(1)], &[q(0), qf(1, 2)], q(1))
    }
    fn curve_b() -> Model {
        Model::numeric(&[q(3), q(2)], &[q(1)], q(1))
    }

    #[test]
    fn t_series_relation() {
        for w in [Weight::numeric(&[q(1)]), Weight::numeric(&[q(3), q(2)]), Weight::symbolic(2)] {
            let t = t_series(&w, 5);
            assert!(t.tgrel_residual(&w).is_zero());
            assert!(t.at(&MPoly::zero()).is_zero());
        }
        // β¹ coefficient is A₁(x² + x)/2
        let w = Weight::symbolic(2);
        let t = t_series(&w, 3);
        let x = MPoly::var(Var::X(1));
        let want = (&(&x * &x) + &x).scale(&qf(1, 2));
        assert_eq!(t.series.coeff_of(Var::Beta, 1), &MPoly::var(Var::G(1)) * &want);
    }

    #[test]
    fn bernoulli_at_plus_x_fails_relation() {
        // (−1)^k A_k β^k (B_{k+1}(x) − B_{k+1}(0))/(k+1) at k = 1 gives −A₁(x² − x)/2,
        // whose first difference is −A₁(x − 1) rather than A₁x.
        let x = MPoly::var(Var::X(1));
        let f = |y: &MPoly| (&(y * y) - y).scale(&qf(-1, 2));
        let d = &f(&x) - &f(&(&x - &MPoly::one()));
        assert_ne!(d, x);
    }

    #[test]
    fn recursion_operators() {
        let m = Model::symbolic(Weight::symbolic(2), 2);
        let r = apply_recursion(Sign::Minus, &MPoly::one(), &m);
        assert_eq!(r, &MPoly::var(Var::Gamma) * &MPoly::var(Var::X(1)));
        let xk = MPoly::var_pow(Var::X(1), 3);
        let want = &(&m.weight.eval(&MPoly::var(Var::Beta).scale(&q(3))) * &m.gamma) * &MPoly::var_pow(Var::X(1), 4);
        assert_eq!(apply_recursion(Sign::Plus, &xk, &m), want);
        for sign in [Sign::Plus, Sign::Minus] {
            let p0 = adapted_basis(0, sign, 5, &m).series;
            let p1 = adapted_basis(1, sign, 6, &m).series;
            let r = apply_recursion(sign, &p0, &m);
            assert_eq!(r.retain(|mm| mm.exp(Var::X(1)) <= 6), p1);
            // [D, R]f = Rf
            let lhs = &euler(&r) - &apply_recursion(sign, &euler(&p0), &m);
            assert_eq!(lhs, r);
        }
    }

    #[test]
    fn quantum_curve() {
        for m in [curve_a(), curve_b(), Model::symbolic(Weight::symbolic(2), 2)] {
            for sign in [Sign::Plus, Sign::Minus] {
                for k in -1..=2 {
                    assert!(quantum_curve_residual(sign, k, 8, &m).is_zero(), "k={k} {sign:?}");
                }
            }
        }
    }

    #[test]
    fn pq_system() {
        let mut m = Model::symbolic(Weight::numeric(&[q(1), q(2)]), 2);
        m.beta_order = 10;
        for sign in [Sign::Plus, Sign::Minus] {
            let b = build_pq(sign, -2, 6, 6, &m).unwrap();
            assert!(b.residual_zero, "{sign:?}");
            assert_eq!(b.p[3][3], MPoly::var(Var::Beta).scale(&q(sign.value())));
            assert_eq!(b.p[3][5], MPoly::var(Var::S(2)).scale(&q(2)));
        }
        assert!(matches!(build_pq(Sign::Plus, 0, 1, 4, &m), Err(Error::WindowTooSmall)));
    }

    #[test]
    fn cd_matrix() {
        let m = Model::symbolic(Weight::symbolic(2), 2);
        let a = build_a(&m).unwrap();
        let s1 = MPoly::var(Var::S(1));
        let s2 = MPoly::var(Var::S(2));
        let g1 = MPoly::var(Var::G(1));
        let g2 = MPoly::var(Var::G(2));
        let a11 = &(&s2 * &g1).scale(&q(-2)) - &(&(&s1 * &s1) * &g2);
        assert_eq!(a.a[1][1], a11);
        assert_eq!(a.a[1][2], (&(&s1 * &s2) * &g2).scale(&q(-4)));
        assert_eq!(a.a[3][1], (&(&s2 * &s2) * &g2).scale(&q(-4)));
        assert!(a.a[2][3].is_zero() && a.a[3][3].is_zero());
        assert_eq!(build_a(&curve_a()).unwrap().det, MPoly::int(-1));
        let degenerate = Model::numeric(&[q(1)], &[q(1)], q(1));
        assert!(matches!(build_a(&degenerate), Err(Error::DegenerateModel)));
    }

    #[test]
    fn cd_relation() {
        for m in [curve_a(), curve_b()] {
            assert!(cd_residual(&m, 5).unwrap().is_zero());
        }
    }

    #[test]
    fn folded_and_projector() {
        for m in [curve_a(), curve_b(), Model::symbolic(Weight::numeric(&[q(1)]), 2), Model::symbolic(Weight::symbolic(2), 1)] {
            let f = build_folded(&m).unwrap();
            assert!(f.duality_zero);
            assert_eq!(f.symbol_agrees.is_some(), m.m() > 1);
            let (rp, rm) = folded_residuals(&m, 5).unwrap();
            assert!(rp.is_zero() && rm.is_zero());
            assert!(projector_m(&m, 4).unwrap().ok());
        }
    }

    #[test]
    fn e_tilde_beta_zero_part() {
        let m = Model::symbolic(Weight::symbolic(2), 1);
        let f = build_folded(&m).unwrap();
        let n = f.a.len();
        let r = MPoly::var(Var::R);
        let t = MPoly::var(Var::Tt);
        let mut gen = MPoly::zero();
        for i in 0..n {
            for j in 0..n {
                let e = f.e_tilde[i][j].retain(|mm| mm.exp(Var::Beta) <= 0);
                gen += &e.mul_mono(&Mono::var(Var::R, i as i32).mul(&Mono::var(Var::Tt, j as i32)));
            }
        }
        let sr = m.s_poly(&r);
        let st = m.s_poly(&t);
        let num = &(&(&r * &sr) * &m.weight.eval(&st)) - &(&(&t * &st) * &m.weight.eval(&sr));
        let first = num.div_difference(Var::R, Var::Tt).unwrap();
        let second = (&(&r * &t) * &(&sr - &st).div_difference(Var::R, Var::Tt).unwrap())
            .mul_mono(&Mono::var(Var::Gamma, -1).mul(&Mono::var(Var::X(1), -1)));
        assert_eq!(gen, &first - &second);
    }

    #[test]
    fn m_one_has_double_pole() {
        // CURVE-A: −βDΨ⁻₁ = −Ψ⁻₀/x + (x⁻² − 1)Ψ⁻₁
        let f = build_folded(&curve_a()).unwrap();
        assert_eq!(pole_order(&f), -2);
        let x = |e: i32| MPoly::var_pow(Var::X(1), e);
        assert_eq!(f.e_minus[1][1], &x(-2) - &MPoly::one());
        assert_eq!(f.e_minus[1][0], x(-1).scale(&q(-1)));
        assert_eq!(pole_order(&build_folded(&curve_b()).unwrap()), -1);
    }

    #[test]
    fn traces_match_correlators() {
        let m = curve_b();
        let w1 = crate::tau::wtilde_derivation(1, 4, &m);
        assert_eq!(w_via_traces(1, &m, 6).unwrap(), w1);
        let w2 = crate::tau::wtilde_derivation(2, 3, &m);
        assert_eq!(w_via_traces(2, &m, 5).unwrap(), w2);
    }
}
