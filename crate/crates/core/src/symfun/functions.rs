//! Schur, complete, and monomial symmetric functions; content products,
//! ρ-coefficients, and the weights 𝒲_G.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::character::character_int;
use super::partition::{partitions_of, Partition};
use crate::algebra::mpoly::{pow_q, MPoly, Mono, Var};
use crate::algebra::rational::{q, Q};
use crate::error::{Error, Result};

/// Weight generating function G(z) = 1 + Σ g_k z^k, optionally with its
/// factorization Π(1 + c_i z).
#[derive(Clone, Debug, PartialEq)]
pub struct Weight {
    pub g: Vec<MPoly>,
    pub c: Option<Vec<Q>>,
}

impl Weight {
    pub fn numeric(g: &[Q]) -> Self {
        Weight { g: g.iter().map(|x| MPoly::constant(x.clone())).collect(), c: None }
    }

    /// Symbolic g_1..g_M.
    pub fn symbolic(m: u8) -> Self {
        Weight { g: (1..=m).map(|k| MPoly::var(Var::G(k))).collect(), c: None }
    }

    /// From the roots parameters: G = Π(1 + c_i z).
    pub fn from_c(c: &[Q]) -> Self {
        let mut coeffs = vec![Q::one()];
        for ci in c {
            let mut next = vec![Q::zero(); coeffs.len() + 1];
            for (k, a) in coeffs.iter().enumerate() {
                next[k] += a;
                next[k + 1] += a * ci;
            }
            coeffs = next;
        }
        Weight { g: coeffs[1..].iter().map(|x| MPoly::constant(x.clone())).collect(), c: Some(c.to_vec()) }
    }

    pub fn degree(&self) -> usize {
        self.g.len()
    }

    pub fn is_numeric(&self) -> bool {
        self.g.iter().all(|x| x.as_constant().is_some())
    }

    pub fn numeric_coeffs(&self) -> Option<Vec<Q>> {
        self.g.iter().map(|x| x.as_constant()).collect()
    }

    /// G(z) for a polynomial argument.
    pub fn eval(&self, z: &MPoly) -> MPoly {
        let mut r = MPoly::zero();
        for g in self.g.iter().rev() {
            r = &(&r + g) * z;
        }
        &r + &MPoly::one()
    }

    /// Check that e_k(c) reproduces g_k when c is given.
    pub fn consistent(&self) -> bool {
        match &self.c {
            None => true,
            Some(c) => Weight::from_c(c).g == self.g,
        }
    }
}

/// WeightData as it appears in configuration files.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeightData {
    #[serde(rename = "gCoeffs", with = "crate::algebra::rational::serde_vec_q")]
    pub g_coeffs: Vec<Q>,
    #[serde(rename = "cParams", default, skip_serializing_if = "Option::is_none")]
    pub c_params: Option<Vec<String>>,
}

/// γ^k for γ a rational constant or a bare variable.
pub fn gamma_pow(gamma: &MPoly, k: i32) -> MPoly {
    if let Some(c) = gamma.as_constant() {
        return MPoly::constant(pow_q(&c, k));
    }
    assert!(gamma.len() == 1, "γ must be a constant or a single variable");
    let (m, c) = gamma.terms.iter().next().unwrap();
    assert!(c.is_one() && m.0.len() == 1, "γ must be a constant or a single variable");
    MPoly::var_pow(m.0[0].0, m.0[0].1 * k)
}

/// 1/f as a power series in β, for f with constant term 1 and only
/// positive β powers otherwise, truncated at β^max.
pub fn inv_beta_series(f: &MPoly, max: i32) -> MPoly {
    assert!(f.constant_term().is_one() && f.min_degree(Var::Beta) >= 0);
    let h = &MPoly::one() - f;
    let mut r = MPoly::one();
    let mut p = MPoly::one();
    for _ in 0..=max.max(0) {
        p = (&p * &h).trunc_var(Var::Beta, max);
        if p.is_zero() {
            break;
        }
        r += &p;
    }
    r
}

/// Schur function in terms of power sums p_i supplied by `p`.
pub fn schur_p(l: &Partition, p: &dyn Fn(u32) -> MPoly) -> MPoly {
    let n = l.weight();
    let mut r = MPoly::zero();
    for mu in partitions_of(n, None) {
        let ch = character_int(l, &mu);
        if ch == 0 {
            continue;
        }
        let mut term = MPoly::constant(q(ch) / mu.z_q());
        for &m in mu.parts() {
            term = &term * &p(m);
        }
        r += &term;
    }
    r
}

/// Power sum p_i = i·v_i in a family of flow variables.
pub fn flow_p(family: fn(u8) -> Var) -> impl Fn(u32) -> MPoly {
    move |i| MPoly::var(family(i as u8)).scale(&q(i as i64))
}

/// s_λ expanded in the scaled power sums t_i = p_i/i.
pub fn schur_in_powersums(l: &Partition) -> MPoly {
    schur_p(l, &flow_p(Var::T))
}

/// p_μ in flow variables, Π μ_i v_{μ_i}.
pub fn p_mu(mu: &Partition, p: &dyn Fn(u32) -> MPoly) -> MPoly {
    mu.parts().iter().fold(MPoly::one(), |a, &m| &a * &p(m))
}

/// h_0..=h_n from power sums p_i by Newton's identity h_j = (1/j)Σ p_i h_{j−i}.
pub fn complete_h_all(n: u32, p: &dyn Fn(u32) -> MPoly) -> Vec<MPoly> {
    let mut h = vec![MPoly::one()];
    let ps: Vec<MPoly> = (1..=n).map(p).collect();
    for j in 1..=n as usize {
        let mut s = MPoly::zero();
        for i in 1..=j {
            s += &(&ps[i - 1] * &h[j - i]);
        }
        h.push(s.scale(&(Q::one() / q(j as i64))));
    }
    h
}

/// Power sums p_i = scale·i·s_i for given s-values (s_1, s_2, ...).
pub fn s_power_sums(s: &[MPoly], scale: MPoly) -> impl Fn(u32) -> MPoly + '_ {
    move |i| match s.get(i as usize - 1) {
        Some(v) => (&(v * &scale)).scale(&q(i as i64)),
        None => MPoly::zero(),
    }
}

/// h_j(scale·s).
pub fn complete_h(j: u32, s: &[MPoly], scale: &MPoly) -> MPoly {
    complete_h_all(j, &s_power_sums(s, scale.clone())).pop().unwrap()
}

/// s_{(a|b)}([x] − [x′]) = (x − x′) x^a (−x′)^b.
pub fn hook_schur_eval(a: u32, b: u32, x: Var, xp: Var) -> MPoly {
    let d = &MPoly::var(x) - &MPoly::var(xp);
    let sign = if b % 2 == 0 { q(1) } else { q(-1) };
    &d * &MPoly::term(Mono::var(x, a as i32).mul(&Mono::var(xp, b as i32)), sign)
}

/// s_λ([x] − [x′]) by substituting p_i = x^i − x′^i into Frobenius' formula.
pub fn schur_at_difference(l: &Partition, x: Var, xp: Var) -> MPoly {
    schur_p(l, &|i| &MPoly::var_pow(x, i as i32) - &MPoly::var_pow(xp, i as i32))
}

/// m_μ(x_1, ..., x_n); zero when ℓ(μ) > n.
pub fn monomial_sym(mu: &Partition, xs: &[Var]) -> MPoly {
    let mut r = MPoly::zero();
    if mu.len() > xs.len() {
        return r;
    }
    let mut exps: Vec<u32> = mu.parts().to_vec();
    exps.resize(xs.len(), 0);
    exps.sort();
    // iterate over distinct permutations of the exponent vector
    loop {
        let m = xs.iter().zip(&exps).fold(Mono::one(), |a, (v, &e)| a.mul(&Mono::var(*v, e as i32)));
        r.add_term(m, Q::one());
        if !next_permutation(&mut exps) {
            break;
        }
    }
    r
}

fn next_permutation(v: &mut [u32]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// r_λ = Π_{(i,j)∈λ} G((j − i)β).
pub fn content_product(l: &Partition, w: &Weight) -> MPoly {
    let beta = MPoly::var(Var::Beta);
    let mut r = MPoly::one();
    for (i, j) in l.cells() {
        r = &r * &w.eval(&beta.scale(&q(j - i)));
    }
    r
}

/// ρ_j; for j < −1 the inverse factors are β-series truncated at β^beta_order.
pub fn rho_coeff(j: i32, w: &Weight, gamma: &MPoly, beta_order: i32) -> MPoly {
    let beta = MPoly::var(Var::Beta);
    let mut r = gamma_pow(gamma, j);
    if j > 0 {
        for i in 1..=j {
            r = &r * &w.eval(&beta.scale(&q(i as i64)));
        }
    } else {
        for i in 0..(-j) {
            let f = w.eval(&beta.scale(&q(-(i as i64))));
            r = (&r * &inv_beta_series(&f, beta_order)).trunc_var(Var::Beta, beta_order);
        }
    }
    r
}

/// 1/ρ_j; a polynomial for j ≤ 0.
pub fn rho_inv(j: i32, w: &Weight, gamma: &MPoly, beta_order: i32) -> MPoly {
    let beta = MPoly::var(Var::Beta);
    let mut r = gamma_pow(gamma, -j);
    if j <= 0 {
        for i in 0..(-j) {
            r = &r * &w.eval(&beta.scale(&q(-(i as i64))));
        }
    } else {
        for i in 1..=j {
            let f = w.eval(&beta.scale(&q(i as i64)));
            r = (&r * &inv_beta_series(&f, beta_order)).trunc_var(Var::Beta, beta_order);
        }
    }
    r
}

/// Elementary symmetric polynomial e_k(c_1..c_m) in the C variables.
pub fn elementary_c(k: usize, m: usize) -> MPoly {
    let vars: Vec<Var> = (1..=m as u8).map(Var::C).collect();
    monomial_sym(&Partition::ones(k as u32), &vars)
}

/// Rewrite a symmetric polynomial in c_1..c_m in the basis g_k = e_k(c).
pub fn sym_to_elementary(p: &MPoly, m: usize) -> Result<MPoly> {
    let es: Vec<MPoly> = (0..=m).map(|k| elementary_c(k, m)).collect();
    let mut rest = p.clone();
    let mut out = MPoly::zero();
    let cvars: Vec<Var> = (1..=m as u8).map(Var::C).collect();
    let mut guard = 0usize;
    while !rest.is_zero() {
        guard += 1;
        if guard > 100_000 {
            return Err(Error::Invalid("symmetric reduction did not terminate".into()));
        }
        let (lead, coeff) = rest
            .terms
            .iter()
            .max_by(|a, b| {
                let ea: Vec<i32> = cvars.iter().map(|v| a.0.exp(*v)).collect();
                let eb: Vec<i32> = cvars.iter().map(|v| b.0.exp(*v)).collect();
                ea.cmp(&eb).then_with(|| b.0.cmp(a.0))
            })
            .map(|(a, b)| (a.clone(), b.clone()))
            .unwrap();
        let alpha: Vec<i32> = cvars.iter().map(|v| lead.exp(*v)).collect();
        if alpha.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Invalid("polynomial is not symmetric in c".into()));
        }
        let other = lead.0.iter().filter(|(v, _)| !matches!(v, Var::C(_))).cloned().collect::<Vec<_>>();
        let mut sub = MPoly::term(Mono(other.clone()), coeff.clone());
        let mut gm = Mono(other);
        for k in 1..=m {
            let e = alpha[k - 1] - if k < m { alpha[k] } else { 0 };
            if e > 0 {
                sub = &sub * &es[k].pow(e as u32);
                gm = gm.mul(&Mono::var(Var::G(k as u8), e));
            }
        }
        rest -= &sub;
        out.add_term(gm, coeff);
    }
    Ok(out)
}

/// 𝒲_G(μ^(1),…,μ^(k)) = (|aut λ|/k!) m_λ(c), λ the sorted colengths, in the g basis.
pub fn weight_wg(profiles: &[Partition], w: &Weight) -> Result<MPoly> {
    if profiles.iter().any(|p| p.is_trivial()) {
        return Err(Error::TrivialProfile);
    }
    let k = profiles.len();
    if k == 0 {
        return Ok(MPoly::one());
    }
    let m = w.degree();
    if k > m {
        return Ok(MPoly::zero());
    }
    let lam = Partition::new(profiles.iter().map(|p| p.colength()).collect());
    let cvars: Vec<Var> = (1..=m as u8).map(Var::C).collect();
    let mlam = monomial_sym(&lam, &cvars);
    let coeff = Q::from_integer(lam.aut()) / Q::from_integer(crate::algebra::rational::factorial(k as u32));
    let in_g = sym_to_elementary(&mlam, m)?.scale(&coeff);
    Ok(subst_g(&in_g, w))
}

/// Replace the symbols g_k by the weight's actual coefficients.
pub fn subst_g(p: &MPoly, w: &Weight) -> MPoly {
    let mut r = p.clone();
    for (k, g) in w.g.iter().enumerate() {
        let v = Var::G(k as u8 + 1);
        if *g != MPoly::var(v) {
            r = r.subs(v, g);
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::qf;

    fn t(k: u8) -> MPoly {
        MPoly::var(Var::T(k))
    }

    #[test]
    fn schur_examples() {
        assert_eq!(schur_in_powersums(&Partition::new(vec![1])), t(1));
        let half_t1sq = t(1).pow(2).scale(&qf(1, 2));
        assert_eq!(schur_in_powersums(&Partition::new(vec![2])), &half_t1sq + &t(2));
        assert_eq!(schur_in_powersums(&Partition::new(vec![1, 1])), &half_t1sq - &t(2));
    }

    #[test]
    fn hook_lemma_matches_frobenius() {
        for n in 1..=5 {
            for l in partitions_of(n, None) {
                let got = schur_at_difference(&l, Var::X(1), Var::Xp(1));
                match l.as_hook() {
                    Some((a, b)) => assert_eq!(got, hook_schur_eval(a, b, Var::X(1), Var::Xp(1)), "{l:?}"),
                    None => assert!(got.is_zero(), "{l:?}"),
                }
            }
        }
    }

    #[test]
    fn complete_h_examples() {
        let s: Vec<MPoly> = (1..=3).map(|k| MPoly::var(Var::S(k))).collect();
        let bi = MPoly::var_pow(Var::Beta, -1);
        assert_eq!(complete_h(0, &s, &bi), MPoly::one());
        assert_eq!(complete_h(1, &s, &bi), &MPoly::var(Var::S(1)) * &bi);
        let want = &(&MPoly::var(Var::S(1)).pow(2) * &bi.pow(2)).scale(&qf(1, 2)) + &(&MPoly::var(Var::S(2)) * &bi);
        assert_eq!(complete_h(2, &s, &bi), want);
    }

    #[test]
    fn monomials() {
        let x = [Var::X(1), Var::X(2)];
        assert_eq!(monomial_sym(&Partition::new(vec![1]), &x[..1]), MPoly::var(Var::X(1)));
        assert_eq!(monomial_sym(&Partition::new(vec![1, 1]), &x), &MPoly::var(Var::X(1)) * &MPoly::var(Var::X(2)));
        let m21 = monomial_sym(&Partition::new(vec![2, 1]), &x);
        let a = &MPoly::var(Var::X(1)).pow(2) * &MPoly::var(Var::X(2));
        let b = &MPoly::var(Var::X(2)).pow(2) * &MPoly::var(Var::X(1));
        assert_eq!(m21, &a + &b);
    }

    #[test]
    fn weights() {
        let w = Weight::symbolic(3);
        assert_eq!(weight_wg(&[], &w).unwrap(), MPoly::one());
        let p2 = Partition::new(vec![2]);
        assert_eq!(weight_wg(&[p2.clone()], &w).unwrap(), MPoly::var(Var::G(1)));
        assert_eq!(weight_wg(&[p2.clone(), p2.clone()], &w).unwrap(), MPoly::var(Var::G(2)));
        assert!(matches!(weight_wg(&[Partition::ones(2)], &w), Err(Error::TrivialProfile)));
        // m_(2)(c) = e1² − 2e2
        let p3 = Partition::new(vec![3]);
        let want = &MPoly::var(Var::G(1)).pow(2) - &MPoly::var(Var::G(2)).scale(&q(2));
        assert_eq!(weight_wg(&[p3], &w).unwrap(), want);
    }

    #[test]
    fn content_and_rho() {
        let w = Weight::numeric(&[q(1)]);
        let b = MPoly::var(Var::Beta);
        assert_eq!(content_product(&Partition::empty(), &w), MPoly::one());
        assert_eq!(content_product(&Partition::new(vec![1]), &w), MPoly::one());
        let want = &(&MPoly::one() + &b) * &(&MPoly::one() - &b);
        assert_eq!(content_product(&Partition::new(vec![2, 1]), &w), want);
        let g = MPoly::var(Var::Gamma);
        assert_eq!(rho_coeff(0, &w, &g, 6), MPoly::one());
        assert_eq!(rho_coeff(1, &w, &g, 6), &g * &(&MPoly::one() + &b));
        assert_eq!(rho_coeff(-1, &w, &g, 6), MPoly::var_pow(Var::Gamma, -1));
        let r = &rho_coeff(-3, &w, &g, 8) * &rho_inv(-3, &w, &g, 8);
        assert_eq!(r.trunc_var(Var::Beta, 8), MPoly::one());
    }
}
