//! Verification suites, one per acceptance criterion, with deterministic
//! JSON reports. A failing suite names the first identity that did not hold.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::rational::{fmt_q, q, qf};
use crate::algebra::{MPoly, Mono, Poly, Var, Q};
use crate::curve::{curve_data, omega_base, physical_sheet, solve_y, SpectralCurve};
use crate::error::{Error, Result};
use crate::hurwitz::{exp_log_check, full_table, genus_of};
use crate::operators::{build_folded, cd_residual, folded_residuals, projector_m, quantum_curve_residual, w_via_traces};
use crate::symfun::Weight;
use crate::tau::{boson_fermion_check, tau_expand, wtilde_derivation, Model, Sign, TAU_ORDER_CAP};
use crate::toprec::{f03_matches, first_loop_n1, loop_check_linear, oracle_check, sample_modulus, second_loop_check, TopRec};

/// Suite names in the order `all` runs them.
pub const SUITES: [&str; 11] =
    ["tau", "oracle", "cd", "qc", "folded", "projector", "curve", "toprec", "f03", "loop", "bosonfermion"];

/// Acceptance criterion a suite implements; `folded` and `projector` share
/// one, `bosonfermion` backs none.
pub fn criterion(suite: &str) -> Option<u8> {
    Some(match suite {
        "tau" => 1,
        "oracle" => 2,
        "cd" => 3,
        "qc" => 4,
        "folded" | "projector" => 5,
        "curve" => 6,
        "toprec" => 7,
        "f03" => 8,
        "loop" => 9,
        _ => return None,
    })
}

/// d ≤ 4 in the oracle route comparison.
pub const ORACLE_D_MAX: u32 = 4;

/// Truncation caps. Each can be overridden from the environment
/// (`HURWITZ_TR_GAMMA_ORDER` and so on) or by a CLI flag.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Caps {
    /// τ order in γ, and the largest |μ| compared against the oracle.
    pub gamma_order: u32,
    /// x-order for the quantum curve, folded system and projector.
    pub x_order: i32,
    /// x-bidegree of the Christoffel–Darboux residual.
    pub bidegree: i32,
    /// β truncation of the n = 1 loop equation.
    pub beta_order: i32,
    /// Largest N in the oracle route comparison.
    pub oracle_n_max: u32,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { gamma_order: 6, x_order: 10, bidegree: 8, beta_order: 3, oracle_n_max: 5 }
    }
}

pub const ENV_GAMMA_ORDER: &str = "HURWITZ_TR_GAMMA_ORDER";
pub const ENV_X_ORDER: &str = "HURWITZ_TR_X_ORDER";
pub const ENV_BIDEGREE: &str = "HURWITZ_TR_BIDEGREE";
pub const ENV_BETA_ORDER: &str = "HURWITZ_TR_BETA_ORDER";
pub const ENV_ORACLE_N_MAX: &str = "HURWITZ_TR_ORACLE_N_MAX";

fn env_num<T: std::str::FromStr>(key: &str) -> Result<Option<T>> {
    match std::env::var(key) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| Error::Parse(format!("{key}={v} is not a number"))),
        Err(_) => Ok(None),
    }
}

impl Caps {
    /// Defaults overridden by whichever environment variables are set.
    pub fn from_env() -> Result<Caps> {
        let mut c = Caps::default();
        if let Some(v) = env_num(ENV_GAMMA_ORDER)? {
            c.gamma_order = v;
        }
        if let Some(v) = env_num(ENV_X_ORDER)? {
            c.x_order = v;
        }
        if let Some(v) = env_num(ENV_BIDEGREE)? {
            c.bidegree = v;
        }
        if let Some(v) = env_num(ENV_BETA_ORDER)? {
            c.beta_order = v;
        }
        if let Some(v) = env_num(ENV_ORACLE_N_MAX)? {
            c.oracle_n_max = v;
        }
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: i64, hi: i64| {
            if v < 1 || v > hi {
                Err(Error::Parse(format!("{what} = {v} must lie in 1..={hi}")))
            } else {
                Ok(())
            }
        };
        bad("gammaOrder", self.gamma_order as i64, TAU_ORDER_CAP as i64)?;
        bad("xOrder", self.x_order as i64, 16)?;
        bad("bidegree", self.bidegree as i64, 12)?;
        bad("betaOrder", self.beta_order as i64, 5)?;
        bad("oracleNMax", self.oracle_n_max as i64, 7)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SuiteReport {
    pub suite: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub criterion: Option<u8>,
    pub seed: u64,
    pub max_order_checked: u32,
    pub residual_zero: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
    pub checks: Vec<Check>,
}

/// The `all` report: every suite, and the first failure across them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VerifyReport {
    pub suite: String,
    pub seed: u64,
    pub caps: Caps,
    pub max_order_checked: u32,
    pub residual_zero: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
    pub suites: Vec<SuiteReport>,
}

struct Checks(Vec<Check>);

impl Checks {
    fn push(&mut self, name: impl Into<String>, r: Result<bool>) {
        let (ok, note) = match r {
            Ok(b) => (b, None),
            Err(e) => (false, Some(e.to_string())),
        };
        self.0.push(Check { name: name.into(), ok, note });
    }

    fn note(&mut self, name: impl Into<String>, ok: bool, note: &str) {
        self.0.push(Check { name: name.into(), ok, note: Some(note.into()) });
    }

    fn report(self, suite: &str, seed: u64, order: u32) -> SuiteReport {
        let first_failure = self.0.iter().find(|c| !c.ok).map(|c| c.name.clone());
        SuiteReport {
            suite: suite.into(),
            criterion: criterion(suite),
            seed,
            max_order_checked: order,
            residual_zero: first_failure.is_none(),
            first_failure,
            checks: self.0,
        }
    }
}

/// A named numeric curve.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: String,
    pub g: Vec<Q>,
    pub s: Vec<Q>,
    pub gamma: Q,
}

impl Fixture {
    fn new(name: &str, g: Vec<Q>, s: Vec<Q>) -> Self {
        Fixture { name: name.into(), g, s, gamma: q(1) }
    }

    pub fn model(&self) -> Model {
        Model::numeric(&self.g, &self.s, self.gamma.clone())
    }

    /// Same G and s with γ a free variable.
    pub fn model_symbolic_gamma(&self) -> Model {
        Model::new(Weight::numeric(&self.g), self.s.iter().cloned().map(MPoly::constant).collect(), MPoly::var(Var::Gamma))
    }

    pub fn curve(&self) -> Result<SpectralCurve> {
        curve_data(&self.g, &self.s, &self.gamma)
    }
}

/// G = 1 + z, S = z².
pub fn curve_a() -> Fixture {
    Fixture::new("CURVE-A", vec![q(1)], vec![q(0), qf(1, 2)])
}

/// G = (1 + z)(1 + 2z), S = z.
pub fn curve_b() -> Fixture {
    Fixture::new("CURVE-B", vec![q(3), q(2)], vec![q(1)])
}

fn s_label(s: &[Q]) -> String {
    s.iter().map(fmt_q).collect::<Vec<_>>().join(",")
}

/// Three s-evaluations for each of the two weights, then one curve with LM = 3.
pub fn toprec_fixtures() -> Vec<Fixture> {
    let mut v = vec![];
    for s in [vec![q(0), qf(1, 2)], vec![q(1), qf(1, 2)], vec![qf(1, 2), qf(-1, 3)]] {
        v.push(Fixture::new(&format!("G=1+z, s=({})", s_label(&s)), vec![q(1)], s));
    }
    for s in [vec![q(1)], vec![qf(1, 2)], vec![qf(-2, 3)]] {
        v.push(Fixture::new(&format!("G=(1+z)(1+2z), s=({})", s_label(&s)), vec![q(3), q(2)], s));
    }
    let s = vec![q(1), qf(1, 2), qf(1, 3)];
    v.push(Fixture::new(&format!("G=1+z, s=({})", s_label(&s)), vec![q(1)], s));
    v
}

fn weights() -> Vec<(&'static str, Weight)> {
    vec![("G=1+z", Weight::numeric(&[q(1)])), ("G=(1+z)(1+2z)", Weight::numeric(&[q(3), q(2)]))]
}

fn tau_suite(caps: &Caps, seed: u64) -> SuiteReport {
    let mut c = Checks(vec![]);
    let o = caps.gamma_order;
    for (name, w) in weights() {
        let m = Model::symbolic(w, o as u8);
        c.push(format!("Schur and Hurwitz expansions of tau agree through gamma^{o}, {name}, s symbolic"), tau_expand(&m, o).map(|_| true));
    }
    c.report("tau", seed, o)
}

fn oracle_suite(caps: &Caps, seed: u64) -> SuiteReport {
    let mut c = Checks(vec![]);
    let (n, d) = (caps.oracle_n_max, ORACLE_D_MAX);
    let mut ws = weights();
    ws.push(("G symbolic, M=2", Weight::symbolic(2)));
    for (name, w) in ws {
        c.push(format!("k-tuple and M-slot routes agree, disconnected, |mu| <= {n}, d <= {d}, {name}"), full_table(&w, n, d, false).map(|_| true));
        let vanish = full_table(&w, n, d, true).map(|t| {
            t.entries.iter().all(|((mu, nu, dd), v)| match genus_of(mu, nu, *dd) {
                Ok(g) if g >= 0 => true,
                _ => v.is_zero(),
            })
        });
        c.push(format!("k-tuple and M-slot routes agree, connected, with vanishing off integral genus >= 0, {name}"), vanish);
        c.push(format!("connected counts are the logarithm of the disconnected series, {name}"), exp_log_check(&w, n, d).map(|_| true));
    }
    c.report("oracle", seed, n)
}

fn cd_suite(caps: &Caps, seed: u64) -> SuiteReport {
    let mut c = Checks(vec![]);
    let b = caps.bidegree;
    for f in [curve_a(), curve_b()] {
        c.push(
            format!("Christoffel-Darboux residual vanishes through bidegree ({b},{b}), {}, gamma symbolic", f.name),
            cd_residual(&f.model_symbolic_gamma(), b).map(|r| r.is_zero()),
        );
        c.push(format!("Christoffel-Darboux residual vanishes through bidegree ({b},{b}), {}, gamma = 1", f.name), cd_residual(&f.model(), b).map(|r| r.is_zero()));
    }
    c.report("cd", seed, b as u32)
}

fn sign_name(s: Sign) -> &'static str {
    match s {
        Sign::Plus => "+",
        Sign::Minus => "-",
    }
}

fn qc_suite(caps: &Caps, seed: u64) -> SuiteReport {
    let mut c = Checks(vec![]);
    let o = caps.x_order;
    for f in [curve_a(), curve_b()] {
        let m = f.model();
        for sign in [Sign::Plus, Sign::Minus] {
            for k in -1..=2 {
                let name = format!("quantum curve residual for Psi{}_{k} vanishes through x^{o}, {}", sign_name(sign), f.name);
                c.push(name, Ok(quantum_curve_residual(sign, k, o, &m).is_zero()));
            }
        }
    }
    c.report("qc", seed, o as u32)
}

fn folded_suite(caps: &Caps, seed: u64) -> SuiteReport {
    let mut c = Checks(vec![]);
    let o = caps.x_order;
    for f in [curve_a(), curve_b()] {
        let m = f.model();
        c.push(format!("duality A E- = E+^T A, {}", f.name), build_folded(&m).map(|s| s.duality_zero));
        let r = folded_residuals(&m, o);
        c.push(format!("folded system residual for Psi+ vanishes through x^{o}, {}", f.name), r.as_ref().map(|r| r.0.is_zero()).map_err(Clone::clone));
        c.push(format!("folded system residual for Psi- vanishes through x^{o}, {}", f.name), r.map(|r| r.1.is_zero()));
    }
    c.report("folded", seed, o as u32)
}

fn projector_suite(caps: &Caps, seed: u64) -> SuiteReport {
    let mut c = Checks(vec![]);
    let o = caps.x_order;
    for f in [curve_a(), curve_b()] {
        let m = f.model();
        match projector_m(&m, o) {
            Ok(r) => {
                c.push(format!("M^2 = M through x^{o}, {}", f.name), Ok(r.idempotent));
                c.push(format!("tr M = 1 through x^{o}, {}", f.name), Ok(r.trace_one));
                c.push(format!("beta D M = [M, E-] through x^{o}, {}", f.name), Ok(r.adjoint_ode));
                c.push(format!("M has no negative powers of beta, {}", f.name), Ok(r.no_negative_beta));
            }
            Err(e) => c.push(format!("projector M through x^{o}, {}", f.name), Err(e)),
        }
        let w1 = w_via_traces(1, &m, o).map(|w| w.trunc_total(|v| matches!(v, Var::X(_)), o - 4) == wtilde_derivation(1, (o - 4) as u32, &m));
        c.push(format!("W1 from tr(M E-) equals the tau correlator, {}", f.name), w1);
    }
    c.report("projector", seed, o as u32)
}

/// Random admissible curves: small integer-over-small-integer coefficients,
/// redrawn until φ is squarefree of degree LM ≥ 2 and prime to G(S).
pub fn random_curves(seed: u64, count: usize) -> Vec<Fixture> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![];
    while out.len() < count {
        let coef = |rng: &mut ChaCha8Rng| Q::new(rng.gen_range(-3i64..=3).into(), rng.gen_range(1i64..=3).into());
        let m = rng.gen_range(1..=2);
        let l = rng.gen_range(1..=2);
        let mut g: Vec<Q> = (0..m).map(|_| coef(&mut rng)).collect();
        let mut s: Vec<Q> = (0..l).map(|_| coef(&mut rng)).collect();
        if g[m - 1].is_zero() {
            g[m - 1] = q(1);
        }
        if s[l - 1].is_zero() {
            s[l - 1] = q(1);
        }
        let gamma = Q::new(rng.gen_range(1i64..=3).into(), rng.gen_range(1i64..=3).into());
        if curve_data(&g, &s, &gamma).is_ok() {
            let name = format!("random G=({}), s=({}), gamma={}", s_label(&g), s_label(&s), fmt_q(&gamma));
            out.push(Fixture { name, g, s, gamma });
        }
    }
    out
}

fn curve_suite(_caps: &Caps, seed: u64) -> SuiteReport {
    let mut c = Checks(vec![]);
    let a = curve_a().curve();
    c.push("phi = 1 - z^2 on CURVE-A", a.as_ref().map(|a| a.phi == Poly::from_ints(&[1, 0, -1])).map_err(Clone::clone));
    c.push("branch points of CURVE-A are -1, 1", a.as_ref().map(|a| a.branch.rational_roots == vec![q(-1), q(1)]).map_err(Clone::clone));
    let y = solve_y(&curve_a().model(), 7).map(|y| {
        let mut want = MPoly::zero();
        for (e, k) in [(1, 1), (3, 2), (5, 5), (7, 14)] {
            want.add_term(Mono::var(Var::X(1), e), q(k));
        }
        y == want
    });
    c.push("y(x) = x + 2x^3 + 5x^5 + 14x^7 on CURVE-A", y);
    c.push("Y(z(x)) = y(x) on the physical sheet of CURVE-A through x^8", a.and_then(|a| a.sheet_residual(8)).map(|r| r.is_zero()));
    let m = Model::symbolic(Weight::symbolic(2), 2);
    let z0 = physical_sheet(&m, 2).map(|z| {
        let gm = MPoly::var(Var::Gamma);
        let x = |e| MPoly::var_pow(Var::X(1), e);
        let second = &(&(&(&gm * &gm) * &MPoly::var(Var::G(1))) * &MPoly::var(Var::S(1))) * &x(2);
        z == &(&gm * &x(1)) + &second
    });
    c.push("physical sheet starts gamma x + g1 s1 gamma^2 x^2", z0);
    for f in random_curves(seed, 5) {
        let r = f.curve().and_then(|cv| omega_base(&cv, 6).map(|_| true));
        c.push(format!("xy relation, dX, omega01 and the physical sheet, {}", f.name), r);
    }
    c.report("curve", seed, 8)
}

const TOPREC_CASES: [(u32, usize); 5] = [(0, 2), (0, 3), (1, 1), (1, 2), (0, 4)];

fn toprec_suite(caps: &Caps, seed: u64) -> SuiteReport {
    let o = caps.gamma_order as i32;
    let per: Vec<Vec<(String, Result<bool>)>> = toprec_fixtures()
        .par_iter()
        .map(|f| {
            let tr = match f.curve() {
                Ok(cv) => TopRec::new(cv),
                Err(e) => return vec![(format!("curve data, {}", f.name), Err(e))],
            };
            TOPREC_CASES
                .iter()
                .map(|&(g, n)| {
                    let name = format!("omega_{g},{n} gives the oracle's connected Hurwitz numbers for |mu| <= {o}, {}", f.name);
                    (name, oracle_check(&tr, g, n, o).map(|r| r.agrees))
                })
                .collect()
        })
        .collect();
    let mut c = Checks(vec![]);
    for (name, r) in per.into_iter().flatten() {
        c.push(name, r);
    }
    c.report("toprec", seed, o as u32)
}

fn f03_suite(_caps: &Caps, seed: u64) -> SuiteReport {
    let mut c = Checks(vec![]);
    for f in [curve_a(), curve_b()] {
        match f.curve().and_then(|cv| f03_matches(&TopRec::new(cv))) {
            Ok(r) => {
                c.push(format!("d1 d2 d3 F03 = omega03, closed form with leading minus, {}", f.name), Ok(r.minus_sign));
                c.note(
                    format!("d1 d2 d3 F03 = omega03, closed form with leading plus, {}", f.name),
                    r.plus_sign,
                    "the leading-minus closed form has the opposite overall sign",
                );
            }
            Err(e) => c.push(format!("F03 closed form, {}", f.name), Err(e)),
        }
    }
    c.report("f03", seed, 3)
}

/// Three distinct generic sample points x₀ for the loop equations.
pub fn sample_points(c: &SpectralCurve, seed: u64) -> Vec<Q> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Q> = vec![];
    while out.len() < 3 {
        let mut p: i64 = rng.gen_range(-9..=9);
        if p == 0 {
            p = 1;
        }
        let x0 = Q::new(p.into(), rng.gen_range(2i64..=13).into());
        if !out.contains(&x0) && sample_modulus(c, &x0).is_ok() {
            out.push(x0);
        }
    }
    out
}

fn loop_suite(caps: &Caps, seed: u64) -> SuiteReport {
    let mut c = Checks(vec![]);
    let b = caps.beta_order;
    for f in [curve_a(), curve_b()] {
        let tr = match f.curve() {
            Ok(cv) => TopRec::new(cv),
            Err(e) => {
                c.push(format!("curve data, {}", f.name), Err(e));
                continue;
            }
        };
        let pts = sample_points(&tr.curve, seed);
        for x0 in &pts {
            for (g, n) in [(0, 2), (1, 2), (0, 3)] {
                let name = format!("first loop equation for ({g},{n}) at x0 = {}, {}", fmt_q(x0), f.name);
                c.push(name, loop_check_linear(&tr, g, n, x0).map(|r| r.residual_zero));
            }
            let name = format!("first loop equation for n = 1 through beta^{b} at x0 = {}, {}", fmt_q(x0), f.name);
            c.push(name, first_loop_n1(&tr, x0, b));
        }
        for g in 0..=1 {
            let r = second_loop_check(&tr, g, &pts).map(|r| r.matches_trace_side && r.no_branch_poles);
            c.note(
                format!("second loop equation Q_{g},2 against the trace side, {}", f.name),
                r.as_ref().map_or(false, |b| *b),
                "compared with the normalisation sum_g beta^(2g-2) Q_g,2 = ((tr D)^2 - tr D^2)/2",
            );
        }
    }
    c.report("loop", seed, b as u32)
}

fn bosonfermion_suite(caps: &Caps, seed: u64) -> SuiteReport {
    let mut c = Checks(vec![]);
    let o = caps.gamma_order.min(4);
    for f in [curve_a(), curve_b()] {
        c.push(format!("boson-fermion correspondence for Psi0 and K through order {o}, {}", f.name), boson_fermion_check(&f.model(), o).map(|r| r.ok()));
    }
    c.report("bosonfermion", seed, o)
}

/// Runs one suite by name.
pub fn run_suite(name: &str, caps: &Caps, seed: u64) -> Result<SuiteReport> {
    caps.validate()?;
    Ok(match name {
        "tau" => tau_suite(caps, seed),
        "oracle" => oracle_suite(caps, seed),
        "cd" => cd_suite(caps, seed),
        "qc" => qc_suite(caps, seed),
        "folded" => folded_suite(caps, seed),
        "projector" => projector_suite(caps, seed),
        "curve" => curve_suite(caps, seed),
        "toprec" => toprec_suite(caps, seed),
        "f03" => f03_suite(caps, seed),
        "loop" => loop_suite(caps, seed),
        "bosonfermion" => bosonfermion_suite(caps, seed),
        other => return Err(Error::Parse(format!("unknown suite {other}; expected all or one of {}", SUITES.join(", ")))),
    })
}

/// Runs every suite in [`SUITES`] order.
pub fn run_all(caps: &Caps, seed: u64) -> Result<VerifyReport> {
    let suites = SUITES.iter().map(|s| run_suite(s, caps, seed)).collect::<Result<Vec<_>>>()?;
    let first_failure = suites.iter().find_map(|s| s.first_failure.as_ref().map(|f| format!("{}: {f}", s.suite)));
    Ok(VerifyReport {
        suite: "all".into(),
        seed,
        caps: caps.clone(),
        max_order_checked: suites.iter().map(|s| s.max_order_checked).max().unwrap_or(0),
        residual_zero: first_failure.is_none(),
        first_failure,
        suites,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn criteria_numbering() {
        assert_eq!(criterion("tau"), Some(1));
        assert_eq!(criterion("projector"), Some(5));
        assert_eq!(criterion("loop"), Some(9));
        assert_eq!(criterion("bosonfermion"), None);
    }

    #[test]
    fn caps_are_bounded() {
        assert!(Caps::default().validate().is_ok());
        let c = Caps { gamma_order: 7, ..Caps::default() };
        assert!(matches!(c.validate(), Err(Error::Parse(_))));
        assert!(run_suite("nope", &Caps::default(), 0).is_err());
    }

    #[test]
    fn sample_points_are_generic_and_seeded() {
        let c = curve_a().curve().unwrap();
        let a = sample_points(&c, 7);
        assert_eq!(a, sample_points(&c, 7));
        assert_eq!(a.len(), 3);
        assert!(a.iter().all(|x| sample_modulus(&c, x).is_ok()));
    }

    #[test]
    fn random_curves_are_admissible() {
        for f in random_curves(3, 4) {
            let c = f.curve().unwrap();
            assert!(c.lm() >= 2, "{}", f.name);
        }
    }

    #[test]
    fn failures_are_named() {
        let mut c = Checks(vec![]);
        c.push("first", Ok(true));
        c.push("second", Err(Error::NonGenericSamplePoint));
        c.push("third", Ok(false));
        let r = c.report("cd", 0, 1);
        assert!(!r.residual_zero);
        assert_eq!(r.first_failure.as_deref(), Some("second"));
    }
}
