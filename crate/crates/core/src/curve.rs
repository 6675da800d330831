//! The rational spectral curve xy = S(γxG(xy)): X, Y, φ, branch points,
//! the physical sheet, ω₀,₁ and ω₀,₂.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::rational::{parse_q, q};
use crate::algebra::{series_reversion, Laurent, MPoly, MRatFun, Mono, Poly, RatFun, TruncatedSeries, Var, Q};
use crate::error::{Error, Result};
use crate::symfun::Weight;
use crate::tau::Model;

/// Curve configuration as read from JSON. `S` lists s_0, s_1, …, s_L
/// (s_0 must be 0) so that S(z) = Σ k s_k z^k; `Spoly` instead gives the
/// coefficients of S(z) directly. Exactly one of the two must be present.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveConfig {
    #[serde(rename = "G")]
    pub g: Vec<String>,
    #[serde(rename = "S", default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<String>>,
    #[serde(rename = "Spoly", default, skip_serializing_if = "Option::is_none")]
    pub s_poly: Option<Vec<String>>,
    pub gamma: String,
}

fn parse_all(v: &[String]) -> Result<Vec<Q>> {
    v.iter().map(|s| parse_q(s)).collect()
}

impl CurveConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// (g_1..g_M, s_1..s_L, γ).
    pub fn parameters(&self) -> Result<(Vec<Q>, Vec<Q>, Q)> {
        let g = parse_all(&self.g)?;
        if g.first().map_or(true, |c| !c.is_one()) {
            return Err(Error::Parse("G must start with the constant term 1".into()));
        }
        let s = match (&self.s, &self.s_poly) {
            (Some(s), None) => {
                let s = parse_all(s)?;
                if s.first().map_or(false, |c| !c.is_zero()) {
                    return Err(Error::Parse("s_0 must be 0".into()));
                }
                s.into_iter().skip(1).collect()
            }
            (None, Some(p)) => {
                let p = parse_all(p)?;
                if p.first().map_or(false, |c| !c.is_zero()) {
                    return Err(Error::Parse("S(0) must be 0".into()));
                }
                p.iter().enumerate().skip(1).map(|(k, c)| c / q(k as i64)).collect()
            }
            _ => return Err(Error::Parse("give exactly one of S and Spoly".into())),
        };
        let gamma = parse_q(&self.gamma)?;
        if gamma.is_zero() {
            return Err(Error::Parse("gamma must be nonzero".into()));
        }
        Ok((g[1..].to_vec(), s, gamma))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BranchData {
    /// φ made monic.
    pub modulus: Poly,
    /// Linear factors for rational roots, then the remaining factor.
    pub factors: Vec<Poly>,
    #[serde(with = "crate::algebra::rational::serde_vec_q")]
    pub rational_roots: Vec<Q>,
    /// z = ∞ is a ramification point of X when LM > 2; it is not a residue point.
    pub infinity_ramified: bool,
}

#[derive(Clone, Debug)]
pub struct SpectralCurve {
    /// g_1..g_M.
    pub g: Vec<Q>,
    /// s_1..s_L.
    pub s: Vec<Q>,
    pub gamma: Q,
    pub s_poly: Poly,
    pub g_poly: Poly,
    /// G(S(z)).
    pub gs: Poly,
    pub x: RatFun,
    /// Y is a polynomial since S(0) = 0.
    pub y: Poly,
    pub phi: Poly,
    pub branch: BranchData,
}

fn trim(v: &[Q]) -> Vec<Q> {
    let mut v = v.to_vec();
    while v.last().map_or(false, |c| c.is_zero()) {
        v.pop();
    }
    v
}

/// Build the curve and assert xyrel, difX, deg φ = LM and simplicity.
pub fn curve_data(g: &[Q], s: &[Q], gamma: &Q) -> Result<SpectralCurve> {
    let g = trim(g);
    let s = trim(s);
    let (l, m) = (s.len(), g.len());
    if l * m <= 1 {
        return Err(Error::DegenerateModel);
    }
    if gamma.is_zero() {
        return Err(Error::Invalid("γ must be nonzero".into()));
    }
    let mut sc = vec![Q::zero()];
    sc.extend(s.iter().enumerate().map(|(k, c)| c * q(k as i64 + 1)));
    let s_poly = Poly::new(sc);
    let mut gc = vec![Q::one()];
    gc.extend(g.iter().cloned());
    let g_poly = Poly::new(gc);
    let gs = g_poly.compose(&s_poly);
    let x = RatFun::new(Poly::x(), gs.scale(gamma))?;
    let y = (&s_poly.div_rem(&Poly::x()).0 * &gs).scale(gamma);
    let phi = &gs - &(&(&Poly::x() * &g_poly.derivative().compose(&s_poly)) * &s_poly.derivative());

    // X Y = S
    let xy = &x * &RatFun::poly(y.clone());
    if xy != RatFun::poly(s_poly.clone()) {
        return Err(Error::CrossCheckFailure("X·Y ≠ S".into()));
    }
    // X′ = φ/(γ G(S)²)
    if x.derivative() != RatFun::new(phi.clone(), gs.pow(2).scale(gamma))? {
        return Err(Error::CrossCheckFailure("X′ ≠ φ/(γG(S)²)".into()));
    }
    if phi.degree() != (l * m) as i64 {
        return Err(Error::CrossCheckFailure(format!("deg φ = {} ≠ LM = {}", phi.degree(), l * m)));
    }
    let branch = branch_points_of(&phi, l * m)?;
    if Poly::gcd(&phi, &gs).degree() > 0 {
        return Err(Error::Invalid("a zero of φ is a pole of X; only zeros of X′ are supported".into()));
    }
    Ok(SpectralCurve { g, s, gamma: gamma.clone(), s_poly, g_poly, gs, x, y, phi, branch })
}

fn branch_points_of(phi: &Poly, lm: usize) -> Result<BranchData> {
    if !phi.is_squarefree() {
        return Err(Error::NonSimpleRamification);
    }
    let modulus = phi.monic();
    let factors = crate::algebra::dyneval::rational_split(&modulus);
    Ok(BranchData { rational_roots: modulus.rational_roots(), modulus, factors, infinity_ramified: lm > 2 })
}

/// Branch data for a bare φ; used to exercise the simplicity check directly.
pub fn branch_points(phi: &Poly) -> Result<BranchData> {
    branch_points_of(phi, phi.degree().max(0) as usize)
}

impl SpectralCurve {
    pub fn from_config(c: &CurveConfig) -> Result<Self> {
        let (g, s, gamma) = c.parameters()?;
        curve_data(&g, &s, &gamma)
    }

    pub fn from_model(m: &Model) -> Result<Self> {
        let g = m.weight.numeric_coeffs().ok_or_else(|| Error::Invalid("curve needs numeric G".into()))?;
        let s: Option<Vec<Q>> = m.s.iter().map(|x| x.as_constant()).collect();
        let s = s.ok_or_else(|| Error::Invalid("curve needs numeric s".into()))?;
        let gamma = m.gamma.as_constant().ok_or_else(|| Error::Invalid("curve needs numeric γ".into()))?;
        curve_data(&g, &s, &gamma)
    }

    pub fn model(&self) -> Model {
        Model::numeric(&self.g, &self.s, self.gamma.clone())
    }

    pub fn lm(&self) -> usize {
        self.s.len() * self.g.len()
    }

    /// ω₀,₁/dz = Y X′.
    pub fn omega01(&self) -> RatFun {
        &RatFun::poly(self.y.clone()) * &self.x.derivative()
    }

    /// (S/z)(1 − zS′G′(S)/G(S)), the form of W̃₀,₁ dx written in z.
    pub fn omega01_corollary(&self) -> Result<RatFun> {
        let sz = RatFun::poly(self.s_poly.div_rem(&Poly::x()).0);
        let gp = self.g_poly.derivative().compose(&self.s_poly);
        let corr = RatFun::new(&(&Poly::x() * &self.s_poly.derivative()) * &gp, self.gs.clone())?;
        Ok(&sz * &(&RatFun::poly(Poly::one()) - &corr))
    }

    /// Checks that X(z₂) = X(z₁) with z₂ ≠ z₁ forces Y(z₂) ≠ Y(z₁).
    pub fn no_self_intersection_at(&self, z1: &Q) -> Result<bool> {
        let x1 = self.x.eval(z1)?;
        // numerator of X(z) − x1 = (z − γ x1 G(S(z)))/(γG(S(z)))
        let num = &Poly::x() - &self.gs.scale(&(&self.gamma * &x1));
        let (rest, r) = num.div_rem(&Poly::linear_root(z1));
        if !r.is_zero() {
            return Err(Error::CrossCheckFailure("z₁ is not a root of X(z) − X(z₁)".into()));
        }
        let dy = &self.y - &Poly::constant(self.y.eval(z1));
        // remove z₁ itself when it is a repeated root
        let mut rest = rest;
        while rest.eval(z1).is_zero() && rest.degree() > 0 {
            rest = rest.div_rem(&Poly::linear_root(z1)).0;
        }
        Ok(Poly::gcd(&rest, &dy).degree() == 0)
    }
}

// ---------------------------------------------------------------- series

fn horner(p: &[MPoly], z: &MPoly, v: Var, order: i32) -> MPoly {
    let mut r = MPoly::zero();
    for c in p.iter().rev() {
        r = (&(&r * z) + c).trunc_var(v, order);
    }
    r
}

fn g_coeffs(m: &Model) -> Vec<MPoly> {
    let mut g = vec![MPoly::one()];
    g.extend(m.weight.g.iter().cloned());
    g
}

fn s_coeffs(m: &Model) -> Vec<MPoly> {
    let mut s = vec![MPoly::zero()];
    s.extend(m.s.iter().enumerate().map(|(k, c)| c.scale(&q(k as i64 + 1))));
    s
}

/// Iterate `step` from 0 until it stabilises modulo x^{order+1}, asserting
/// that each round fixes at least one more coefficient.
fn fixed_point(order: i32, step: impl Fn(&MPoly) -> MPoly) -> Result<MPoly> {
    let v = Var::X(1);
    let mut cur = MPoly::zero();
    let mut agree = -1;
    for _ in 0..order + 3 {
        let next = step(&cur).trunc_var(v, order);
        let diff = &next - &cur;
        if diff.is_zero() {
            return Ok(next);
        }
        let low = diff.min_degree(v);
        if low <= agree {
            return Err(Error::CrossCheckFailure("fixed-point iteration is not contracting".into()));
        }
        agree = low;
        cur = next;
    }
    Err(Error::CrossCheckFailure("fixed-point iteration did not stabilise".into()))
}

/// y(x) solving x y = S(γ x G(x y)), exact through x^order.
pub fn solve_y(m: &Model, order: i32) -> Result<MPoly> {
    let v = Var::X(1);
    let x = MPoly::var(v);
    let (g, s) = (g_coeffs(m), s_coeffs(m));
    fixed_point(order, |y| {
        let inner = horner(&g, &(&x * y), v, order + 1);
        let z = (&(&x * &m.gamma) * &inner).trunc_var(v, order + 1);
        horner(&s, &z, v, order + 1).mul_mono(&Mono::var(v, -1))
    })
}

/// The physical sheet z̃⁽⁰⁾(x): the power-series solution of z = γ x G(S(z)).
pub fn physical_sheet(m: &Model, order: i32) -> Result<MPoly> {
    let v = Var::X(1);
    let x = MPoly::var(v);
    let (g, s) = (g_coeffs(m), s_coeffs(m));
    let step = |z: &MPoly| (&(&x * &m.gamma) * &horner(&g, &horner(&s, z, v, order), v, order)).trunc_var(v, order);
    let z = fixed_point(order, step)?;
    if &step(&z) - &z != MPoly::zero() {
        return Err(Error::CrossCheckFailure("X(z̃) ≠ x".into()));
    }
    Ok(z)
}

/// Taylor coefficients of a rational function regular at 0.
pub fn ratfun_series(r: &RatFun, prec: i32) -> Result<Laurent<Q>> {
    let n = Laurent::from_poly(r.numerator.coeffs(), &Q::zero(), prec);
    let d = Laurent::from_poly(r.denominator.coeffs(), &Q::zero(), prec);
    Ok(n.mul(&d.inv()?))
}

impl SpectralCurve {
    /// z̃⁽⁰⁾ by fixed point, cross-checked against reversion of X.
    pub fn physical_sheet(&self, order: i32) -> Result<MPoly> {
        let z = physical_sheet(&self.model(), order)?;
        let xs = ratfun_series(&self.x, order + 1)?;
        let mut p = MPoly::zero();
        for k in 0..=order {
            p.add_term(Mono::var(Var::X(1), k), xs.coeff(k));
        }
        let rev = series_reversion(&TruncatedSeries::new(vec![(Var::X(1), order)], p), order)?;
        if rev.poly != z {
            return Err(Error::CrossCheckFailure("physical sheet: fixed point and reversion differ".into()));
        }
        Ok(z)
    }

    /// Y(z̃⁽⁰⁾(x)) − y(x) through x^order.
    pub fn sheet_residual(&self, order: i32) -> Result<MPoly> {
        let m = self.model();
        let z = self.physical_sheet(order + 1)?;
        let yc: Vec<MPoly> = self.y.coeffs().iter().cloned().map(MPoly::constant).collect();
        let yz = horner(&yc, &z, Var::X(1), order);
        Ok(&yz - &solve_y(&m, order)?)
    }
}

#[derive(Clone, Debug)]
pub struct OmegaBase {
    /// ω₀,₁/dz.
    pub omega01: RatFun,
    /// ω₀,₂/(dz₁dz₂).
    pub omega02: MRatFun,
}

/// ω₀,₁ and ω₀,₂ with the corollary form and the pullback y(X(z)) = Y(z)
/// checked on the physical sheet.
pub fn omega_base(c: &SpectralCurve, order: i32) -> Result<OmegaBase> {
    let w = c.omega01();
    if w != c.omega01_corollary()? {
        return Err(Error::CrossCheckFailure("ω₀,₁ differs from the corollary form".into()));
    }
    if !c.sheet_residual(order)?.is_zero() {
        return Err(Error::CrossCheckFailure("y(X(z)) ≠ Y(z) on the physical sheet".into()));
    }
    let d = &MPoly::var(Var::Z(1)) - &MPoly::var(Var::Z(2));
    Ok(OmegaBase { omega01: w, omega02: MRatFun::new(MPoly::one(), d.pow(2))? })
}

pub fn weight_of(c: &SpectralCurve) -> Weight {
    Weight::numeric(&c.g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::qf;

    pub fn curve_a() -> SpectralCurve {
        curve_data(&[q(1)], &[q(0), qf(1, 2)], &q(1)).unwrap()
    }
    pub fn curve_b() -> SpectralCurve {
        curve_data(&[q(3), q(2)], &[q(1)], &q(1)).unwrap()
    }

    #[test]
    fn base_data() {
        let a = curve_a();
        assert_eq!(a.x, RatFun::new(Poly::x(), Poly::from_ints(&[1, 0, 1])).unwrap());
        assert_eq!(a.y, Poly::from_ints(&[0, 1, 0, 1]));
        assert_eq!(a.phi, Poly::from_ints(&[1, 0, -1]));
        assert_eq!(a.branch.rational_roots, vec![q(-1), q(1)]);
        assert!(!a.branch.infinity_ramified);
        let b = curve_b();
        assert_eq!(b.phi, Poly::from_ints(&[1, 0, -2]));
        assert_eq!(b.branch.factors, vec![Poly::new(vec![qf(-1, 2), q(0), q(1)])]);
        assert!(matches!(curve_data(&[q(1)], &[q(1)], &q(1)), Err(Error::DegenerateModel)));
        assert!(matches!(branch_points(&Poly::from_ints(&[1, -2, 1])), Err(Error::NonSimpleRamification)));
    }

    #[test]
    fn y_series() {
        let y = solve_y(&curve_a().model(), 8).unwrap();
        let want = [(1, 1), (3, 2), (5, 5), (7, 14)];
        let mut p = MPoly::zero();
        for (e, c) in want {
            p.add_term(Mono::var(Var::X(1), e), q(c));
        }
        assert_eq!(y, p);
        // constant term γ s₁
        let m = Model::symbolic(Weight::symbolic(2), 2);
        let y = solve_y(&m, 3).unwrap();
        assert_eq!(y.coeff_of(Var::X(1), 0), &MPoly::var(Var::Gamma) * &MPoly::var(Var::S(1)));
    }

    #[test]
    fn sheet() {
        let z = curve_a().physical_sheet(6).unwrap();
        let x = |e| MPoly::var_pow(Var::X(1), e);
        assert_eq!(z, &(&x(1) + &x(3)) + &x(5).scale(&q(2)));
        let m = Model::symbolic(Weight::symbolic(2), 2);
        let z = physical_sheet(&m, 2).unwrap();
        let gm = MPoly::var(Var::Gamma);
        let second = &(&(&(&gm * &gm) * &MPoly::var(Var::G(1))) * &MPoly::var(Var::S(1))) * &x(2);
        let want = &(&gm * &x(1)) + &second;
        assert_eq!(z, want);
        for c in [curve_a(), curve_b()] {
            assert!(c.sheet_residual(8).unwrap().is_zero());
        }
    }

    #[test]
    fn omegas() {
        let a = curve_a();
        let b = omega_base(&a, 6).unwrap();
        assert_eq!(b.omega01, RatFun::new(Poly::from_ints(&[0, 1, 0, -1]), Poly::from_ints(&[1, 0, 1])).unwrap());
        omega_base(&curve_b(), 6).unwrap();
        for z in [q(2), qf(1, 3), q(-5)] {
            assert!(a.no_self_intersection_at(&z).unwrap());
            assert!(curve_b().no_self_intersection_at(&z).unwrap());
        }
    }

    #[test]
    fn config() {
        let c = CurveConfig::from_json(r#"{"G": ["1","1"], "S": ["0","0","1/2"], "gamma": "1"}"#).unwrap();
        assert_eq!(SpectralCurve::from_config(&c).unwrap().phi, Poly::from_ints(&[1, 0, -1]));
        let c = CurveConfig::from_json(r#"{"G": ["1","1"], "Spoly": ["0","0","1"], "gamma": "1"}"#).unwrap();
        assert_eq!(SpectralCurve::from_config(&c).unwrap().s, vec![q(0), qf(1, 2)]);
        assert!(CurveConfig::from_json(r#"{"G": ["1"], "gamma": "1"}"#).unwrap().parameters().is_err());
        let c = CurveConfig::from_json(r#"{"G": ["2","1"], "S": ["0","1"], "gamma": "1"}"#).unwrap();
        assert!(c.parameters().is_err());
    }
}
