//! Topological recursion on the rational spectral curve.
//!
//! Residues at the zeros of φ are taken in Q[t]/(P) for each factor P of φ
//! and summed over the roots by traces. ω_{g,n}/(dz₁…dz_n) comes out with
//! rational coefficients as num(z)/Π φ̂(z_i)^E, φ̂ the monic φ.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::dyneval::{power_sums, sum_over_factors};
use crate::algebra::rational::{fmt_q, q, qf};
use crate::algebra::{DynEval, Laurent, MPoly, Mono, Poly, RatFun, Ring, Var, Q};
use crate::curve::SpectralCurve;
use crate::error::{Error, Result};
use crate::operators::{build_folded, trace};
use crate::tau::fgn_oracle;

// ---------------------------------------------------------------- coefficient ring

/// Coefficients once the outer points enter: polynomials in t (reduced
/// modulo P) and in z_j, 1/(a − z_j) = U(j), 1/φ̂(z_j) = W(j).
#[derive(Clone, Debug, PartialEq)]
pub struct Tc {
    pub p: MPoly,
    pub m: Arc<Poly>,
}

impl Ring for Tc {
    fn zero_like(&self) -> Self {
        Tc { p: MPoly::zero(), m: self.m.clone() }
    }
    fn from_q(&self, c: Q) -> Self {
        Tc { p: MPoly::constant(c), m: self.m.clone() }
    }
    fn is_zero(&self) -> bool {
        self.p.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        Tc { p: &self.p + &o.p, m: self.m.clone() }
    }
    fn sub(&self, o: &Self) -> Self {
        Tc { p: &self.p - &o.p, m: self.m.clone() }
    }
    fn mul(&self, o: &Self) -> Self {
        Tc { p: (&self.p * &o.p).reduce_mod(Var::Tq, &self.m), m: self.m.clone() }
    }
    fn neg(&self) -> Self {
        Tc { p: -&self.p, m: self.m.clone() }
    }
    fn try_inv(&self) -> Result<Self> {
        if self.p.vars().iter().any(|v| *v != Var::Tq) {
            return Err(Error::Invalid("only elements of Q[t]/(P) are inverted".into()));
        }
        let d = DynEval::new(self.m.clone(), self.p.to_poly(Var::Tq)).try_inv()?;
        Ok(lift(&d, &MPoly::one()))
    }
}

/// c·d for c free of t.
fn lift(d: &DynEval, c: &MPoly) -> Tc {
    Tc { p: c * &MPoly::from_poly(&d.value, Var::Tq), m: d.modulus.clone() }
}

fn lift_series(s: &Ser, c: &MPoly) -> Laurent<Tc> {
    let zero = Tc { p: MPoly::zero(), m: s.zero.modulus.clone() };
    s.map(&zero, |d| lift(d, c))
}

// ---------------------------------------------------------------- local data

pub type Ser = Laurent<DynEval>;

fn poly_at(p: &Poly, s: &Ser) -> Ser {
    let zero = s.zero.zero_like();
    let mut r = Laurent::constant(zero.clone(), s.prec());
    for c in p.coeffs().iter().rev() {
        r = r.mul(s).add_const(&zero.from_q(c.clone()));
    }
    r
}

fn x_at(c: &SpectralCurve, z: &Ser) -> Result<Ser> {
    Ok(z.mul(&poly_at(&c.gs, z).scale_q(&c.gamma).inv()?))
}

fn all_zero(s: &Ser) -> bool {
    s.c.iter().all(|x| x.is_zero())
}

/// σ_a(a + ε) − a as a series in ε, a the generator of Q[t]/(m), exact
/// through ε^prec.
pub fn involution_series(c: &SpectralCurve, m: &Arc<Poly>, prec: i32) -> Result<Ser> {
    let zero = DynEval::constant(m, Q::zero());
    let a = DynEval::generator(m);
    let z = Laurent::eps(&zero, prec + 3).add_const(&a);
    let xz = x_at(c, &z)?;
    if !xz.coeff(1).is_zero() {
        return Err(Error::CrossCheckFailure("X′ does not vanish at the branch point".into()));
    }
    let x2 = xz.coeff(2);
    if x2.is_zero() {
        return Err(Error::NonSimpleRamification);
    }
    let inv2 = x2.try_inv()?;
    // X(a+ε) − X(a) = X₂ ε²(1 + h), and u = ε(1 + h)^{1/2} is odd under σ
    let h = xz.add_const(&xz.coeff(0).neg()).shift(-2).scale(&inv2).add_const(&a.from_q(-Q::one())).normalized();
    let u = Laurent::eps(&zero, prec + 2).mul(&Laurent::sqrt_one_plus(&h));
    let sigma = Laurent::compose(&u.reverse()?, &u.neg()).truncate(prec + 1);
    if !(sigma.coeff(1).add(&a.one_like())).is_zero() || !sigma.coeff(0).is_zero() {
        return Err(Error::CrossCheckFailure("σ′(a) ≠ −1".into()));
    }
    let xs = x_at(c, &sigma.add_const(&a))?;
    if !all_zero(&xs.sub(&xz).truncate(prec + 1)) {
        return Err(Error::CrossCheckFailure("X(σ(z)) ≠ X(z)".into()));
    }
    if !all_zero(&Laurent::compose(&sigma, &sigma).sub(&Laurent::eps(&zero, prec + 1))) {
        return Err(Error::CrossCheckFailure("σ∘σ ≠ id".into()));
    }
    Ok(sigma)
}

struct Local {
    m: Arc<Poly>,
    /// ε and σ̂(ε) = σ(a + ε) − a.
    e: [Ser; 2],
    /// a + ε and a + σ̂.
    z: [Ser; 2],
    /// 1 and σ̂′.
    dz: [Ser; 2],
    inv_phi: [Ser; 2],
    /// zG(S(z))/((S(z) − S(σz))φ(z)).
    kfac: Ser,
    /// σ̂′/(ε − σ̂)².
    w02: Ser,
}

impl Local {
    fn new(c: &SpectralCurve, m: &Arc<Poly>, prec: i32) -> Result<Local> {
        let zero = DynEval::constant(m, Q::zero());
        let a = DynEval::generator(m);
        let sig = involution_series(c, m, prec)?;
        let eps = Laurent::eps(&zero, prec + 1);
        let z0 = eps.add_const(&a);
        let z1 = sig.add_const(&a);
        let one = Laurent::constant(a.one_like(), prec);
        let dz1 = sig.deriv();
        let phi_hat = &c.branch.modulus;
        let inv_phi = [poly_at(phi_hat, &z0).inv()?, poly_at(phi_hat, &z1).inv()?];
        let ds = poly_at(&c.s_poly, &z0).sub(&poly_at(&c.s_poly, &z1));
        let den = ds.mul(&poly_at(&c.phi, &z0));
        let kfac = z0.mul(&poly_at(&c.gs, &z0)).mul(&den.inv()?);
        let w02 = dz1.mul(&eps.sub(&sig).pow(2).inv()?);
        Ok(Local {
            m: m.clone(),
            e: [eps.truncate(prec), sig.truncate(prec)],
            z: [z0.truncate(prec), z1.truncate(prec)],
            dz: [one, dz1],
            inv_phi,
            kfac,
            w02,
        })
    }

    fn zero_tc(&self) -> Tc {
        Tc { p: MPoly::zero(), m: self.m.clone() }
    }

    fn prec(&self) -> i32 {
        self.e[0].prec()
    }

    /// ½[1/(z − z₁) − 1/(σz − z₁)]·kfac with 1/(a − z₁) = U(1).
    fn kernel(&self) -> Laurent<Tc> {
        let p = self.prec();
        let mut b = Laurent::constant(self.zero_tc(), p);
        let (mut e0, mut e1) = (Laurent::constant(self.m_one(), p), Laurent::constant(self.m_one(), p));
        for k in 1..p {
            e0 = e0.mul(&self.e[0]);
            e1 = e1.mul(&self.e[1]);
            let sign = if k % 2 == 0 { qf(1, 2) } else { qf(-1, 2) };
            let c = MPoly::var_pow(Var::U(1), k + 1).scale(&sign);
            b = b.add(&lift_series(&e0.sub(&e1), &c));
        }
        b.mul(&lift_series(&self.kfac, &MPoly::one()))
    }

    fn m_one(&self) -> DynEval {
        DynEval::constant(&self.m, Q::one())
    }

    /// ω₀,₂(slot, z_j)/dz_j = Σ (k+1)(−1)^k U(j)^{k+2} e^k, times the slot's dz.
    fn w02_ext(&self, slot: usize, j: u8) -> Laurent<Tc> {
        let p = self.prec();
        let mut r = Laurent::constant(self.zero_tc(), p);
        let mut e = self.dz[slot].clone();
        for k in 0..p {
            let c = MPoly::var_pow(Var::U(j), k + 2).scale(&q(if k % 2 == 0 { k as i64 + 1 } else { -(k as i64 + 1) }));
            r = r.add(&lift_series(&e, &c));
            e = e.mul(&self.e[slot]);
        }
        r
    }
}

/// 𝒦(z₁; z, σ_a(z)) as a series in ε = z − a, with 1/(a − z₁) written U(1).
pub fn recursion_kernel(c: &SpectralCurve, m: &Arc<Poly>, prec: i32) -> Result<Laurent<Tc>> {
    Ok(Local::new(c, m, prec)?.kernel())
}

// ---------------------------------------------------------------- ω_{g,n}

/// ω_{g,n}/(dz₁…dz_n) = num(z₁,…,z_n)/Π φ̂(z_i)^exp, φ̂ the monic φ.
#[derive(Clone, Debug, PartialEq)]
pub struct Omega {
    pub g: u32,
    pub n: usize,
    pub num: MPoly,
    pub exp: i32,
}

#[derive(Clone, Debug, Serialize)]
pub struct OmegaJson {
    pub g: u32,
    pub n: usize,
    pub numerator: String,
    pub denominator: String,
    pub variables: Vec<String>,
}

fn zv(i: usize) -> Var {
    Var::Z(i as u8)
}

fn phi_in(phi_hat: &Poly, v: Var) -> MPoly {
    MPoly::from_poly(phi_hat, v)
}

impl Omega {
    pub fn to_json(&self, phi_hat: &Poly) -> OmegaJson {
        let vars: Vec<String> = (1..=self.n).map(|i| zv(i).name()).collect();
        let den = (1..=self.n).map(|i| format!("({})", phi_in(phi_hat, zv(i)))).collect::<Vec<_>>().join("*");
        OmegaJson {
            g: self.g,
            n: self.n,
            numerator: self.num.to_string(),
            denominator: match (self.exp, self.n) {
                (0, _) => "1".into(),
                (e, 1) => format!("{den}^{e}"),
                (e, _) => format!("({den})^{e}"),
            },
            variables: vars,
        }
    }

    /// Equality as rational functions.
    pub fn same_as(&self, o: &Omega, phi_hat: &Poly) -> bool {
        let scale = |p: &MPoly, e: i32| {
            (1..=self.n).fold(p.clone(), |acc, i| &acc * &phi_in(phi_hat, zv(i)).pow(e.max(0) as u32))
        };
        self.n == o.n && scale(&self.num, o.exp) == scale(&o.num, self.exp)
    }

    pub fn is_symmetric(&self) -> bool {
        (2..=self.n).all(|j| {
            let sw = self.num.rename(|v| match v {
                Var::Z(1) => zv(j),
                Var::Z(k) if k as usize == j => Var::Z(1),
                o => o,
            });
            sw == self.num
        })
    }

    /// Regular at z_i = ∞ as a differential in each argument.
    pub fn regular_at_infinity(&self, phi_hat: &Poly) -> bool {
        let d = phi_hat.degree() as i32;
        (1..=self.n).all(|i| self.num.is_zero() || self.num.degree(zv(i)) - self.exp * d <= -2)
    }

    /// Apply ∂_{z_1}…∂_{z_n}, raising the exponent by one.
    pub fn differentiate_all(&self, phi_hat: &Poly) -> Omega {
        let dphi = phi_hat.derivative();
        let mut p = self.num.clone();
        for i in 1..=self.n {
            let v = zv(i);
            p = &(&phi_in(phi_hat, v) * &p.deriv(v)) - &(&phi_in(&dphi, v) * &p).scale(&q(self.exp as i64));
        }
        Omega { g: self.g, n: self.n, num: p, exp: self.exp + 1 }
    }
}

/// One product in 𝒲_{g,n}(z, σz; z₂,…). `Joint` is ω_{g,n}(z, σz, z₂,…);
/// `Split` is ω_{g1}(z, z_{i1})·ω_{g2}(σz, z_{i2}).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WTerm {
    Joint { g: u32, n: usize },
    Split { g1: u32, i1: Vec<u8>, g2: u32, i2: Vec<u8> },
}

/// The terms of 𝒲_{g,n}; products containing ω₀,₁ are left out.
pub fn w_terms(g: u32, n: usize) -> Vec<WTerm> {
    let rest: Vec<u8> = (2..=n as u8).collect();
    let mut out = vec![];
    if g >= 1 {
        out.push(WTerm::Joint { g: g - 1, n: n + 1 });
    }
    for g1 in 0..=g {
        for mask in 0..(1u32 << rest.len()) {
            let (mut i1, mut i2) = (vec![], vec![]);
            for (b, &j) in rest.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    i1.push(j)
                } else {
                    i2.push(j)
                }
            }
            let g2 = g - g1;
            if (g1 == 0 && i1.is_empty()) || (g2 == 0 && i2.is_empty()) {
                continue;
            }
            out.push(WTerm::Split { g1, i1, g2, i2 });
        }
    }
    out
}

fn term_deps(t: &WTerm) -> Vec<(u32, usize)> {
    match t {
        WTerm::Joint { g, n } => vec![(*g, *n)],
        WTerm::Split { g1, i1, g2, i2 } => vec![(*g1, 1 + i1.len()), (*g2, 1 + i2.len())],
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Arg {
    Local(usize),
    Ext(u8),
}

struct FactorPart {
    m: Poly,
    num: MPoly,
    /// Power of P(z_i) in the denominator, per argument.
    k: Vec<i32>,
}

type Memo = BTreeMap<(u32, usize), Arc<Omega>>;

pub struct TopRec {
    pub curve: SpectralCurve,
    /// Recompute with local order + 2 and demand the same answer.
    pub check_stability: bool,
    memo: Mutex<Memo>,
    locals: Mutex<Vec<(Poly, i32, Arc<Local>)>>,
    /// Local order actually used, per (g, n).
    pub orders: Mutex<BTreeMap<(u32, usize), i32>>,
}

impl TopRec {
    pub fn new(curve: SpectralCurve) -> Self {
        TopRec {
            curve,
            check_stability: true,
            memo: Mutex::new(BTreeMap::new()),
            locals: Mutex::new(vec![]),
            orders: Mutex::new(BTreeMap::new()),
        }
    }

    pub fn phi_hat(&self) -> &Poly {
        &self.curve.branch.modulus
    }

    fn local(&self, m: &Arc<Poly>, prec: i32) -> Result<Arc<Local>> {
        if let Some((_, _, l)) = self.locals.lock().unwrap().iter().find(|(p, o, _)| p == m.as_ref() && *o == prec) {
            return Ok(l.clone());
        }
        let l = Arc::new(Local::new(&self.curve, m, prec)?);
        self.locals.lock().unwrap().push(((**m).clone(), prec, l.clone()));
        Ok(l)
    }

    /// ω_{g,n} for 2g − 2 + n > 0, computing and caching what it needs.
    pub fn omega(&self, g: u32, n: usize) -> Result<Arc<Omega>> {
        if 2 * g as i64 - 2 + n as i64 <= 0 || n == 0 {
            return Err(Error::Invalid(format!("ω_{{{g},{n}}} is not produced by the recursion")));
        }
        if let Some(w) = self.memo.lock().unwrap().get(&(g, n)) {
            return Ok(w.clone());
        }
        for t in w_terms(g, n) {
            for d in term_deps(&t) {
                if d != (0, 2) {
                    self.omega(d.0, d.1)?;
                }
            }
        }
        let deps = self.memo.lock().unwrap().clone();
        let mut order = 6 * g as i32 + 2 * n as i32 + 6;
        let limit = order + 24;
        let w = loop {
            match self.compute(g, n, order, &deps) {
                Ok(w) => break w,
                Err(Error::InsufficientLocalOrder(_)) if order < limit => order += 2,
                Err(e) => return Err(e),
            }
        };
        if self.check_stability {
            let again = self.compute(g, n, order + 2, &deps)?;
            if again != w {
                return Err(Error::InsufficientLocalOrder(format!(
                    "ω_{{{g},{n}}} changed between local orders {order} and {}",
                    order + 2
                )));
            }
        }
        self.check_shape(&w)?;
        self.orders.lock().unwrap().insert((g, n), order);
        let w = Arc::new(w);
        self.memo.lock().unwrap().insert((g, n), w.clone());
        Ok(w)
    }

    fn check_shape(&self, w: &Omega) -> Result<()> {
        let bound = 6 * w.g as i32 - 4 + 2 * w.n as i32;
        if w.exp > bound {
            return Err(Error::CrossCheckFailure(format!("ω_{{{},{}}} has poles of order {} > {bound}", w.g, w.n, w.exp)));
        }
        if !w.is_symmetric() {
            return Err(Error::CrossCheckFailure(format!("ω_{{{},{}}} is not symmetric", w.g, w.n)));
        }
        if !w.regular_at_infinity(self.phi_hat()) {
            return Err(Error::CrossCheckFailure(format!("ω_{{{},{}}} is singular at z = ∞", w.g, w.n)));
        }
        Ok(())
    }

    fn compute(&self, g: u32, n: usize, order: i32, deps: &Memo) -> Result<Omega> {
        let parts: Vec<Vec<FactorPart>> = self
            .curve
            .branch
            .factors
            .par_iter()
            .map(|f| {
                let mut out = vec![];
                sum_over_factors(f, |m| self.residue_on(m, g, n, order, deps), |p| out.push(p))?;
                Ok(out)
            })
            .collect::<Result<_>>()?;
        let (num, exp) = assemble(parts.into_iter().flatten().collect(), n, self.phi_hat())?;
        Ok(Omega { g, n, num, exp })
    }

    fn residue_on(&self, m: &Arc<Poly>, g: u32, n: usize, order: i32, deps: &Memo) -> Result<FactorPart> {
        let loc = self.local(m, order)?;
        let mut w = Laurent::constant(loc.zero_tc(), order);
        for t in w_terms(g, n) {
            let term = match &t {
                WTerm::Joint { g, n } => {
                    let mut args = vec![Arg::Local(0), Arg::Local(1)];
                    args.extend((2..*n).map(|j| Arg::Ext(j as u8)));
                    eval_omega(&loc, (*g, *n), &args, deps)?
                }
                WTerm::Split { g1, i1, g2, i2 } => {
                    let mut a1 = vec![Arg::Local(0)];
                    a1.extend(i1.iter().map(|&j| Arg::Ext(j)));
                    let mut a2 = vec![Arg::Local(1)];
                    a2.extend(i2.iter().map(|&j| Arg::Ext(j)));
                    let x = eval_omega(&loc, (*g1, a1.len()), &a1, deps)?;
                    let y = eval_omega(&loc, (*g2, a2.len()), &a2, deps)?;
                    x.mul(&y)
                }
            };
            w = w.add(&term);
        }
        let r = loc.kernel().mul(&w);
        if r.prec() <= -1 {
            return Err(Error::InsufficientLocalOrder(format!("residue of ω_{{{g},{n}}} at order {order}")));
        }
        to_rational(m, &(-&r.coeff(-1).p), n)
    }
}

fn pows(s: &Ser, n: i32) -> Vec<Ser> {
    let mut v = vec![Laurent::constant(s.zero.one_like(), s.prec())];
    for _ in 0..n {
        let next = v.last().unwrap().mul(s);
        v.push(next);
    }
    v
}

fn eval_omega(loc: &Local, key: (u32, usize), args: &[Arg], deps: &Memo) -> Result<Laurent<Tc>> {
    if key == (0, 2) {
        return Ok(match (args[0], args[1]) {
            (Arg::Local(_), Arg::Local(_)) => lift_series(&loc.w02, &MPoly::one()),
            (Arg::Local(s), Arg::Ext(j)) | (Arg::Ext(j), Arg::Local(s)) => loc.w02_ext(s, j),
            _ => return Err(Error::Invalid("ω₀,₂ with no local argument".into())),
        });
    }
    let om = deps.get(&key).ok_or_else(|| Error::Invalid(format!("ω_{{{},{}}} not yet computed", key.0, key.1)))?;
    let slot_var = |s: usize| if s == 0 { Var::R } else { Var::Tt };
    let p = om.num.rename(|v| match v {
        Var::Z(k) => match args[k as usize - 1] {
            Arg::Local(s) => slot_var(s),
            Arg::Ext(j) => Var::Z(j),
        },
        o => o,
    });
    let mut ext = Mono::default();
    let mut slots = vec![];
    for a in args {
        match a {
            Arg::Ext(j) => ext = ext.mul(&Mono::var(Var::W(*j), om.exp)),
            Arg::Local(s) => slots.push(*s),
        }
    }
    // z^e φ̂(z)^{−E} dz in each local slot
    let factor = |s: usize| -> Vec<Ser> {
        let base = loc.inv_phi[s].pow(om.exp as u32).mul(&loc.dz[s]);
        pows(&loc.z[s], p.degree(slot_var(s)).max(0)).iter().map(|z| z.mul(&base)).collect()
    };
    let mut r = Laurent::constant(loc.zero_tc(), loc.prec());
    match slots.as_slice() {
        [s] => {
            let f = factor(*s);
            for (e, c) in p.collect(slot_var(*s)) {
                r = r.add(&lift_series(&f[e as usize], &c.mul_mono(&ext)));
            }
        }
        [s, t] => {
            let (f, h) = (factor(*s), factor(*t));
            for (e, c) in p.collect(slot_var(*s)) {
                for (e2, c2) in c.collect(slot_var(*t)) {
                    r = r.add(&lift_series(&f[e as usize].mul(&h[e2 as usize]), &c2.mul_mono(&ext)));
                }
            }
        }
        _ => return Err(Error::Invalid("unexpected number of local arguments".into())),
    }
    Ok(r)
}

/// Sum over the roots a of m of a residue r(a, U(i) = 1/(a − z_i)).
fn to_rational(m: &Poly, r: &MPoly, n: usize) -> Result<FactorPart> {
    let mut p = r.clone();
    let mut ks = vec![0; n];
    let pt = MPoly::from_poly(m, Var::Tq);
    for i in 1..=n {
        let u = Var::U(i as u8);
        if !p.contains(u) {
            continue;
        }
        let kmax = p.degree(u);
        if p.min_degree(u) < 0 {
            return Err(Error::Invalid("negative power of 1/(a − z)".into()));
        }
        ks[i - 1] = kmax;
        let pz = MPoly::from_poly(m, zv(i));
        let qq = (&pt - &pz).div_difference(Var::Tq, zv(i)).ok_or(Error::Invalid("P(t) − P(z)".into()))?;
        // 1/(t − z) = −Q(t, z)/P(z) modulo P(t)
        let negq = -&qq;
        let mut qp = vec![MPoly::one()];
        let mut pp = vec![MPoly::one()];
        for _ in 0..kmax {
            let a = (qp.last().unwrap() * &negq).reduce_mod(Var::Tq, m);
            qp.push(a);
            let b = pp.last().unwrap() * &pz;
            pp.push(b);
        }
        let mut acc = MPoly::zero();
        for (k, c) in p.collect(u) {
            let k = k as usize;
            acc += &(&(&c * &qp[k]).reduce_mod(Var::Tq, m) * &pp[kmax as usize - k]);
        }
        p = acc;
    }
    let d = m.degree() as usize;
    let ps = power_sums(m, d);
    let mut num = MPoly::zero();
    for (e, c) in p.reduce_mod(Var::Tq, m).collect(Var::Tq) {
        num += &c.scale(&ps[e as usize]);
    }
    Ok(FactorPart { m: m.clone(), num, k: ks })
}

/// Exact quotient by the monic univariate d(v).
pub fn div_exact(p: &MPoly, v: Var, d: &Poly) -> Option<MPoly> {
    let n = d.degree() as i32;
    let mut groups = p.collect(v);
    if groups.keys().next().map_or(false, |&e| e < 0) {
        return None;
    }
    let top = groups.keys().last().cloned().unwrap_or(-1);
    let mut quo = MPoly::zero();
    for e in (n..=top).rev() {
        let Some(c) = groups.remove(&e) else { continue };
        if c.is_zero() {
            continue;
        }
        quo += &c.mul_mono(&Mono::var(v, e - n));
        for k in 0..n {
            let f = d.coeff(k as usize);
            if !Zero::is_zero(&f) {
                *groups.entry(e - n + k).or_default() -= &c.scale(&f);
            }
        }
    }
    if groups.values().all(|c| c.is_zero()) {
        Some(quo)
    } else {
        None
    }
}

/// Σ over factors of N_f/Π P_f(z_i)^{k_i}·Π W(i)^{w_i}, brought over
/// Π φ̂(z_i)^E and reduced.
fn assemble(parts: Vec<FactorPart>, n: usize, phi_hat: &Poly) -> Result<(MPoly, i32)> {
    let mut entries: Vec<(Vec<i32>, MPoly)> = vec![];
    for part in parts {
        let (cof, rem) = phi_hat.div_rem(&part.m);
        if !rem.is_zero() {
            return Err(Error::Invalid("factor does not divide φ".into()));
        }
        let mut num = part.num;
        for i in 1..=n {
            if part.k[i - 1] > 0 {
                num = &num * &phi_in(&cof, zv(i)).pow(part.k[i - 1] as u32);
            }
        }
        let mut by_w: BTreeMap<Vec<i32>, MPoly> = BTreeMap::new();
        for (mono, c) in &num.terms {
            let w: Vec<i32> = (1..=n).map(|i| mono.exp(Var::W(i as u8)) + part.k[i - 1]).collect();
            let stripped = (1..=n).fold(mono.clone(), |m, i| m.without(Var::W(i as u8)));
            by_w.entry(w).or_default().add_term(stripped, c.clone());
        }
        entries.extend(by_w);
    }
    let mut e = vec![0; n];
    for (w, _) in &entries {
        for i in 0..n {
            e[i] = e[i].max(w[i]);
        }
    }
    let mut total = MPoly::zero();
    for (w, c) in entries {
        let mut t = c;
        for i in 0..n {
            if e[i] > w[i] {
                t = &t * &phi_in(phi_hat, zv(i + 1)).pow((e[i] - w[i]) as u32);
            }
        }
        total += &t;
    }
    for i in 0..n {
        while e[i] > 0 {
            match div_exact(&total, zv(i + 1), phi_hat) {
                Some(t) => {
                    total = t;
                    e[i] -= 1;
                }
                None => break,
            }
        }
    }
    let top = e.iter().cloned().max().unwrap_or(0);
    for i in 0..n {
        if e[i] < top {
            total = &total * &phi_in(phi_hat, zv(i + 1)).pow((top - e[i]) as u32);
        }
    }
    Ok((total, top))
}

// ---------------------------------------------------------------- F₀,₃

/// F₀,₃ = −Σ_i z_i²G′(S(z_i))/(φ(z_i)Π_{j≠i}(z_i − z_j)), returned as a
/// function (not a differential) over Π φ̂(z_i).
pub fn f03_closed(c: &SpectralCurve) -> Result<Omega> {
    let phi_hat = &c.branch.modulus;
    let lead = c.phi.lead();
    let cz = |i: usize| MPoly::from_poly(&(&(&Poly::x() * &Poly::x()) * &c.g_poly.derivative().compose(&c.s_poly)), zv(i));
    let ph = |i: usize| phi_in(phi_hat, zv(i));
    let z = |i: usize| MPoly::var(zv(i));
    let t1 = &(&(&cz(1) * &ph(2)) * &ph(3)) * &(&z(2) - &z(3));
    let t2 = &(&(&cz(2) * &ph(1)) * &ph(3)) * &(&z(1) - &z(3));
    let t3 = &(&(&cz(3) * &ph(1)) * &ph(2)) * &(&z(1) - &z(2));
    let mut a = &(&t1 - &t2) + &t3;
    for (x, y) in [(1, 2), (1, 3), (2, 3)] {
        a = a.div_difference(zv(x), zv(y)).ok_or(Error::CrossCheckFailure("F₀,₃ numerator".into()))?;
    }
    Ok(Omega { g: 0, n: 3, num: a.scale(&(-Q::one() / lead)), exp: 1 })
}

#[derive(Clone, Debug, Serialize)]
pub struct F03Report {
    /// d₁d₂d₃F₀,₃ = ω₀,₃ for the closed form with its leading minus sign.
    pub minus_sign: bool,
    /// The same with the sign flipped.
    pub plus_sign: bool,
}

/// d₁d₂d₃F₀,₃ compared with the recursion's ω₀,₃.
pub fn f03_matches(tr: &TopRec) -> Result<F03Report> {
    let closed = f03_closed(&tr.curve)?.differentiate_all(tr.phi_hat());
    let w = tr.omega(0, 3)?;
    let neg = Omega { num: -&closed.num, ..closed.clone() };
    Ok(F03Report { minus_sign: closed.same_as(&w, tr.phi_hat()), plus_sign: neg.same_as(&w, tr.phi_hat()) })
}

// ---------------------------------------------------------------- Hurwitz numbers

fn x_weight(m: &Mono) -> i32 {
    m.total(|v| matches!(v, Var::X(_)))
}

fn series_to_mpoly(s: &Laurent<Q>, v: Var, max: i32) -> MPoly {
    let mut p = MPoly::zero();
    for e in s.val.max(0)..=max.min(s.prec() - 1) {
        p.add_term(Mono::var(v, e), s.coeff(e));
    }
    p
}

/// x^a ↦ Π x_i^{a_i+1}/(a_i+1) over X(1..n).
pub fn integrate_all(p: &MPoly, n: usize) -> MPoly {
    let mut r = MPoly::zero();
    for (m, c) in &p.terms {
        let mut mono = m.clone();
        let mut den = Q::one();
        for i in 1..=n {
            let v = Var::X(i as u8);
            let a = m.exp(v);
            mono = mono.with(v, a + 1);
            den *= q(a as i64 + 1);
        }
        r.add_term(mono, c / den);
    }
    r
}

/// F̃_{g,n} through |μ| ≤ order, read off ω_{g,n} on the physical sheet.
pub fn hurwitz_from_omega(c: &SpectralCurve, om: &Omega, order: i32) -> Result<MPoly> {
    let n = om.n;
    if order < n as i32 {
        return Err(Error::OrderMismatch(format!("order {order} below n = {n}")));
    }
    let d = order - n as i32;
    let zt = c.physical_sheet(d + 1)?;
    let coeffs: Vec<Q> = (0..=d + 1).map(|k| zt.coeff(&Mono::var(Var::X(1), k))).collect();
    let zl = Laurent::from_poly(&coeffs, &Q::zero(), d + 2);
    let phiz = zl.compose_into_poly(c.branch.modulus.coeffs());
    let jac = zl.deriv().mul(&phiz.inv()?.pow(om.exp.max(0) as u32));
    let mut p = om.num.clone();
    for i in 1..=n {
        let v = Var::X(i as u8);
        let zi = series_to_mpoly(&zl, v, d);
        let top = p.degree(zv(i)).max(0);
        let mut powers = vec![MPoly::one()];
        for _ in 0..top {
            let next = powers.last().unwrap().mul_trunc(&zi, x_weight, d);
            powers.push(next);
        }
        let mut acc = MPoly::zero();
        for (e, cf) in p.collect(zv(i)) {
            acc += &cf.mul_trunc(&powers[e as usize], x_weight, d);
        }
        p = acc.mul_trunc(&series_to_mpoly(&jac, v, d), x_weight, d);
    }
    Ok(integrate_all(&p, n))
}

/// F̃₀,₂ from ω₀,₂ = dz₁dz₂/(z₁ − z₂)² minus dx₁dx₂/(x₁ − x₂)².
pub fn hurwitz_w02(c: &SpectralCurve, order: i32) -> Result<MPoly> {
    let d = order - 2;
    let zt = c.physical_sheet(order + 1)?;
    let (x1, x2) = (Var::X(1), Var::X(2));
    let z1 = zt.clone();
    let z2 = zt.rename(|v| if v == x1 { x2 } else { v });
    let dd = (&z1 - &z2).div_difference(x1, x2).ok_or(Error::CrossCheckFailure("z̃₁ − z̃₂".into()))?;
    let dd2 = &dd * &dd;
    let top = &(&z1.deriv(x1) * &z2.deriv(x2)) - &dd2;
    let quo = top
        .div_difference(x1, x2)
        .and_then(|t| t.div_difference(x1, x2))
        .ok_or(Error::CrossCheckFailure("W̃₀,₂ is singular on the diagonal".into()))?;
    let inv = crate::algebra::TruncatedSeries::new(vec![(x1, d), (x2, d)], dd2).inverse()?;
    let w = quo.mul_trunc(&inv.poly, x_weight, d);
    Ok(integrate_all(&w, 2))
}

#[derive(Clone, Debug, Serialize)]
pub struct HurwitzCheck {
    pub g: u32,
    pub n: usize,
    pub order: i32,
    pub rows: Vec<HurwitzCoeff>,
    pub agrees: bool,
}

/// A coefficient of F̃_{g,n}: μ read from the exponents of x_1..x_n (sorted
/// terms only), the coefficient summing γ^{|μ|}|aut μ| H p_ν(s) over ν and d.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HurwitzCoeff {
    pub mu: Vec<i32>,
    pub coeff: String,
}

pub fn hurwitz_rows(p: &MPoly, n: usize) -> Vec<HurwitzCoeff> {
    p.terms
        .iter()
        .filter(|(m, _)| (1..n).all(|i| m.exp(Var::X(i as u8)) >= m.exp(Var::X(i as u8 + 1))))
        .map(|(m, c)| HurwitzCoeff { mu: (1..=n).map(|i| m.exp(Var::X(i as u8))).collect(), coeff: fmt_q(c) })
        .collect()
}

/// Compare F̃_{g,n} from the recursion with the connected oracle.
pub fn oracle_check(tr: &TopRec, g: u32, n: usize, order: i32) -> Result<HurwitzCheck> {
    let f = if (g, n) == (0, 2) {
        hurwitz_w02(&tr.curve, order)?
    } else {
        hurwitz_from_omega(&tr.curve, &*tr.omega(g, n)?, order)?
    };
    let expected = fgn_oracle(g, n as u8, order as u32, &tr.curve.model())?;
    Ok(HurwitzCheck { g, n, order, agrees: f == expected, rows: hurwitz_rows(&f, n) })
}

// ---------------------------------------------------------------- loop equations

/// Monic numerator of X(w) − x₀, checked to be squarefree and prime to φ.
pub fn sample_modulus(c: &SpectralCurve, x0: &Q) -> Result<Poly> {
    if Zero::is_zero(x0) {
        return Err(Error::NonGenericSamplePoint);
    }
    let p = &Poly::x() - &c.gs.scale(&(&c.gamma * x0));
    if p.degree() != c.gs.degree() || !p.is_squarefree() || Poly::gcd(&p, &c.phi).degree() > 0 {
        return Err(Error::NonGenericSamplePoint);
    }
    Ok(p.monic())
}

fn trace_in(p: &MPoly, v: Var, m: &Poly) -> MPoly {
    let ps = power_sums(m, m.degree() as usize);
    let mut r = MPoly::zero();
    for (e, c) in p.reduce_mod(v, m).collect(v) {
        r += &c.scale(&ps[e as usize]);
    }
    r
}

/// γG(S(w))²/(φ(w)φ̂(w)^e) modulo P, so that Σ_k f(w_k)/X′(w_k) is a trace.
fn sheet_weight(c: &SpectralCurve, pm: &Arc<Poly>, e: i32) -> Result<Poly> {
    let den = &c.phi * &c.branch.modulus.pow(e.max(0) as u32);
    let inv = DynEval::new(pm.clone(), den).try_inv().map_err(|_| Error::NonGenericSamplePoint)?;
    let num = DynEval::new(pm.clone(), (&c.gs * &c.gs).scale(&c.gamma));
    Ok(num.mul(&inv).value)
}

#[derive(Clone, Debug, Serialize)]
pub struct LoopReport {
    pub g: u32,
    pub n: usize,
    pub x0: String,
    pub residual_zero: bool,
}

/// Σ over the sheets above x₀ of ω_{g,n}(·, z₂, …)/dX, against the right
/// side of the first loop equation. For n = 1 both sides are compared as
/// β-Laurent polynomials through β³.
pub fn loop_check_linear(tr: &TopRec, g: u32, n: usize, x0: &Q) -> Result<LoopReport> {
    let c = &tr.curve;
    let pm = DynEval::ring(&sample_modulus(c, x0)?)?;
    let w = Var::Z(1);
    let residual_zero = match (g, n) {
        (0, 2) => {
            let h = MPoly::from_poly(&sheet_weight(c, &pm, 0)?, w);
            let pw = MPoly::from_poly(&pm, w);
            let pz = MPoly::from_poly(&pm, Var::Z(2));
            let qq = (&pw - &pz).div_difference(w, Var::Z(2)).ok_or(Error::NonGenericSamplePoint)?;
            let lhs = trace_in(&(&h * &(&qq * &qq)), w, &pm);
            let lhs = RatFun::new(lhs.to_poly(Var::Z(2)), pm.pow(2))?;
            let xm = &RatFun::poly(Poly::constant(x0.clone())) - &c.x;
            let rhs = &c.x.derivative() * &(&xm * &xm).inv()?;
            lhs == rhs
        }
        (_, 1) => first_loop_n1(tr, x0, 3)?,
        _ => {
            let om = tr.omega(g, n)?;
            let h = MPoly::from_poly(&sheet_weight(c, &pm, om.exp)?, w);
            trace_in(&(&om.num * &h), w, &pm).is_zero()
        }
    };
    Ok(LoopReport { g, n, x0: fmt_q(x0), residual_zero })
}


/// The n = 1 loop equation summed over genera, compared through β^beta_order.
pub fn first_loop_n1(tr: &TopRec, x0: &Q, beta_order: i32) -> Result<bool> {
    let c = &tr.curve;
    let pm = DynEval::ring(&sample_modulus(c, x0)?)?;
    let w = Var::Z(1);
    let mut lhs = MPoly::zero();
    let y = MPoly::from_poly(&c.y, w);
    lhs += &trace_in(&y, w, &pm).mul_mono(&Mono::var(Var::Beta, -1));
    for gg in 1..=((beta_order + 1) / 2).max(0) as u32 {
        let om = tr.omega(gg, 1)?;
        let h = MPoly::from_poly(&sheet_weight(c, &pm, om.exp)?, w);
        lhs += &trace_in(&(&om.num * &h), w, &pm).mul_mono(&Mono::var(Var::Beta, 2 * gg as i32 - 1));
    }
    let f = build_folded(&c.model())?;
    let rhs = trace(&f.e_minus).subs_q(Var::X(1), x0).mul_mono(&Mono::var(Var::Beta, -1)).scale(&(Q::one() / x0));
    let cut = |p: &MPoly| p.retain(|m| m.exp(Var::Beta) <= beta_order);
    Ok(cut(&rhs) == cut(&lhs))
}

/// f_{g,1}(w)/X′(w) (Y(w) for g = 0) modulo the sample modulus.
fn sheet_values(tr: &TopRec, g: u32, pm: &Arc<Poly>) -> Result<Poly> {
    let c = &tr.curve;
    if g == 0 {
        return Ok(c.y.rem(pm));
    }
    let om = tr.omega(g, 1)?;
    let h = sheet_weight(c, pm, om.exp)?;
    Ok(DynEval::new(pm.clone(), &om.num.to_poly(Var::Z(1)) * &h).value)
}

fn trace_poly(p: &Poly, m: &Poly) -> Q {
    DynEval::new(Arc::new(m.monic()), p.clone()).trace()
}

/// Σ_{k≠l} F(w_k, w_l) for F polynomial in Z(1), Z(2) on pairs of distinct roots.
fn pair_trace(f: &MPoly, pm: &Poly) -> Q {
    let (w1, w2) = (Var::Z(1), Var::Z(2));
    let full = trace_in(&trace_in(f, w2, pm), w1, pm);
    let diag = trace_in(&f.subs(w2, &MPoly::var(w1)), w1, pm);
    (&full - &diag).constant_term()
}

/// Q_{g,2}(x₀): the sum over unordered pairs of sheets above x₀ of the
/// second-loop-equation integrand, divided by dX².
pub fn second_loop_value(tr: &TopRec, g: u32, x0: &Q) -> Result<Q> {
    let c = &tr.curve;
    let pm = DynEval::ring(&sample_modulus(c, x0)?)?;
    let (w1, w2) = (Var::Z(1), Var::Z(2));
    let mut total = Q::zero();
    if g >= 1 {
        let f = if g == 1 {
            // 1/(w_l − w_k) = −D(w_k, w_l)/P′(w_k) on distinct roots
            let pw1 = MPoly::from_poly(&pm, w1);
            let pw2 = MPoly::from_poly(&pm, w2);
            let qd = (&pw2 - &pw1).div_difference(w2, w1).ok_or(Error::NonGenericSamplePoint)?;
            let qdiag = qd.subs(w2, &MPoly::var(w1));
            let d = (&qd - &qdiag).div_difference(w2, w1).ok_or(Error::NonGenericSamplePoint)?;
            let ip = DynEval::new(pm.clone(), pm.derivative()).try_inv().map_err(|_| Error::NonGenericSamplePoint)?;
            let h = sheet_weight(c, &pm, 0)?;
            let hp = MPoly::from_poly(&(&h * &(&ip.value * &ip.value)).rem(&pm), w1);
            let h2 = MPoly::from_poly(&h, w2);
            &(&hp * &h2) * &(&d * &d)
        } else {
            let om = tr.omega(g - 1, 2)?;
            let h = sheet_weight(c, &pm, om.exp)?;
            &(&om.num * &MPoly::from_poly(&h, w1)) * &MPoly::from_poly(&h, w2)
        };
        let f = f.reduce_mod(w1, &pm).reduce_mod(w2, &pm);
        total += pair_trace(&f, &pm) / q(2);
    }
    let a: Vec<Poly> = (0..=g).map(|k| sheet_values(tr, k, &pm)).collect::<Result<_>>()?;
    for g1 in 0..=g {
        let g2 = (g - g1) as usize;
        let (x, y) = (&a[g1 as usize], &a[g2]);
        let same = trace_poly(&(x * y).rem(&pm), &pm);
        total += (trace_poly(x, &pm) * trace_poly(y, &pm) - same) / q(2);
    }
    Ok(total)
}

/// ½((Tr D)² − Tr D²) with D = E⁻/(βx), as a Laurent polynomial in x and β.
pub fn second_loop_trace_side(tr: &TopRec) -> Result<MPoly> {
    let f = build_folded(&tr.curve.model())?;
    let inv = Mono::var(Var::Beta, -1).mul(&Mono::var(Var::X(1), -1));
    let d: Vec<Vec<MPoly>> = f.e_minus.iter().map(|r| r.iter().map(|e| e.mul_mono(&inv)).collect()).collect();
    let full = |a: &MPoly, b: &MPoly| a * b;
    let t2 = trace(&crate::operators::mat_mul(&d, &d, &full));
    let t = trace(&d);
    Ok((&(&t * &t) - &t2).scale(&qf(1, 2)))
}

#[derive(Clone, Debug, Serialize)]
pub struct SecondLoopReport {
    pub g: u32,
    pub points: Vec<String>,
    /// Q_{g,2}(x₀) equals the β^{2g−2} part of ½((Tr D)² − Tr D²) at every point.
    pub matches_trace_side: bool,
    /// That rational function of x has poles only at x = 0, which is not a branch value.
    pub no_branch_poles: bool,
}

pub fn second_loop_check(tr: &TopRec, g: u32, points: &[Q]) -> Result<SecondLoopReport> {
    let side = second_loop_trace_side(tr)?.coeff_of(Var::Beta, 2 * g as i32 - 2);
    let mut matches = true;
    for x0 in points {
        let want = side.subs_q(Var::X(1), x0).constant_term();
        matches &= second_loop_value(tr, g, x0)? == want;
    }
    let only_x = side.vars().iter().all(|v| *v == Var::X(1));
    let no_branch_poles = only_x && !Zero::is_zero(&tr.curve.phi.eval(&Q::zero()));
    Ok(SecondLoopReport { g, points: points.iter().map(fmt_q).collect(), matches_trace_side: matches, no_branch_poles })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::curve_data;

    fn curve_a() -> SpectralCurve {
        curve_data(&[q(1)], &[q(0), qf(1, 2)], &q(1)).unwrap()
    }
    fn curve_b() -> SpectralCurve {
        curve_data(&[q(3), q(2)], &[q(1)], &q(1)).unwrap()
    }

    #[test]
    fn unstable_terms_are_excluded() {
        assert_eq!(w_terms(1, 1), vec![WTerm::Joint { g: 0, n: 2 }]);
        assert_eq!(
            w_terms(0, 3),
            vec![
                WTerm::Split { g1: 0, i1: vec![2], g2: 0, i2: vec![3] },
                WTerm::Split { g1: 0, i1: vec![3], g2: 0, i2: vec![2] },
            ]
        );
        let t = w_terms(2, 1);
        assert_eq!(t.len(), 2);
        assert!(t.contains(&WTerm::Split { g1: 1, i1: vec![], g2: 1, i2: vec![] }));
        for (g, n) in [(0, 4), (1, 2), (2, 2)] {
            for t in w_terms(g, n) {
                if let WTerm::Split { g1, i1, g2, i2 } = t {
                    assert!(!(g1 == 0 && i1.is_empty()) && !(g2 == 0 && i2.is_empty()));
                }
            }
        }
    }

    #[test]
    fn involution() {
        let c = curve_a();
        for f in &c.branch.factors {
            let m = DynEval::ring(f).unwrap();
            let s = involution_series(&c, &m, 8).unwrap();
            // X = z/(1+z²) is invariant under z ↦ 1/z, so σ(z) = 1/z exactly
            let a = -f.coeffs()[0].clone();
            for k in 1..8 {
                let want = if a == q(1) { q(if k % 2 == 1 { -1 } else { 1 }) } else { q(-1) };
                assert_eq!(s.coeff(k).value, Poly::constant(want), "k = {k}, a = {a}");
            }
        }
    }

    #[test]
    fn kernel_has_a_simple_pole() {
        for c in [curve_a(), curve_b()] {
            for f in &c.branch.factors {
                let m = DynEval::ring(f).unwrap();
                let k = recursion_kernel(&c, &m, 8).unwrap().normalized();
                assert_eq!(k.val, -1);
                if f.degree() == 1 {
                    assert!(k.c.iter().all(|x| !x.p.contains(Var::Tq)));
                }
            }
        }
    }

    #[test]
    fn f03_closed_curve_a() {
        let c = curve_a();
        let f = f03_closed(&c).unwrap();
        // −Σ z_i²/((1 − z_i²)Π(z_i − z_j)) at (2, 3, 5)
        let pts = [q(2), q(3), q(5)];
        let mut want = Q::zero();
        for i in 0..3 {
            let mut d = q(1) - &pts[i] * &pts[i];
            for j in 0..3 {
                if j != i {
                    d *= &pts[i] - &pts[j];
                }
            }
            want -= &pts[i] * &pts[i] / d;
        }
        let mut num = f.num.clone();
        let mut den = Q::one();
        for (i, p) in pts.iter().enumerate() {
            num = num.subs_q(zv(i + 1), p);
            den *= c.branch.modulus.eval(p);
        }
        assert_eq!(num.constant_term() / den, want);
    }

    #[test]
    fn omega03_and_f03() {
        for c in [curve_a(), curve_b()] {
            let tr = TopRec::new(c);
            let r = f03_matches(&tr).unwrap();
            assert!(!r.minus_sign && r.plus_sign);
        }
    }

    #[test]
    fn minus_sign_f03_gives_negative_hurwitz_numbers() {
        // on CURVE-A the x₁²x₂x₃ coefficient is a positive count (μ = (2,1,1), ν = (2,2))
        let c = curve_a();
        let closed = f03_closed(&c).unwrap().differentiate_all(&c.branch.modulus);
        let f = hurwitz_from_omega(&c, &closed, 5).unwrap();
        let m = Mono::var(Var::X(1), 2).mul(&Mono::var(Var::X(2), 1)).mul(&Mono::var(Var::X(3), 1));
        let oracle = fgn_oracle(0, 3, 5, &c.model()).unwrap();
        assert!(oracle.coeff(&m) > Q::zero());
        assert_eq!(f, -&oracle);
    }

    #[test]
    fn omega11_curve_a() {
        let tr = TopRec::new(curve_a());
        let w = tr.omega(1, 1).unwrap();
        assert!(w.exp <= 4);
        assert!(oracle_check(&tr, 1, 1, 6).unwrap().agrees);
        assert!(oracle_check(&tr, 0, 3, 6).unwrap().agrees);
        assert!(oracle_check(&tr, 0, 2, 6).unwrap().agrees);
    }

    #[test]
    fn omega11_curve_b() {
        let tr = TopRec::new(curve_b());
        assert!(oracle_check(&tr, 1, 1, 5).unwrap().agrees);
    }

    #[test]
    fn first_loop_equation() {
        let tr = TopRec::new(curve_a());
        for (g, n) in [(0, 2), (0, 3), (1, 2)] {
            assert!(loop_check_linear(&tr, g, n, &qf(1, 3)).unwrap().residual_zero, "({g},{n})");
        }
        assert!(loop_check_linear(&tr, 0, 1, &qf(1, 3)).unwrap().residual_zero);
    }

    #[test]
    fn second_loop_equation() {
        let tr = TopRec::new(curve_a());
        let pts = [qf(1, 3), qf(2, 7), qf(-1, 5), qf(3, 11), qf(1, 4)];
        for g in 0..=1 {
            let r = second_loop_check(&tr, g, &pts).unwrap();
            assert!(r.matches_trace_side && r.no_branch_poles, "g = {g}");
        }
        assert_eq!(second_loop_value(&tr, 0, &qf(2, 7)).unwrap(), qf(49, 4));
    }

    #[test]
    fn non_generic_sample_point() {
        // X(±1) = ±1/2 are the branch values of CURVE-A
        assert!(matches!(sample_modulus(&curve_a(), &qf(1, 2)), Err(Error::NonGenericSamplePoint)));
    }
}
