use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use hurwitz_tr::algebra::rational::{fmt_q, parse_q};
use hurwitz_tr::algebra::Q;
use hurwitz_tr::curve::{CurveConfig, SpectralCurve};
use hurwitz_tr::hurwitz::{connected_weighted_hurwitz, weighted_hurwitz, HurwitzRow};
use hurwitz_tr::symfun::{partitions_of, Partition, Weight};
use hurwitz_tr::tau::{correlators, fgn_extract, mpoly_rows, tau_expand, CorrelatorKind};
use hurwitz_tr::toprec::{oracle_check, TopRec};
use hurwitz_tr::verify::{run_all, run_suite, Caps, SUITES};
use hurwitz_tr::Error;

/// Weighted Hurwitz numbers by enumeration and by topological recursion.
#[derive(Parser)]
#[command(name = "hurwitz-tr", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Size of the worker pool (defaults to rayon's choice).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(flatten)]
    caps: CapFlags,
}

/// Overrides for the truncation caps; each mirrors an environment variable.
#[derive(Args)]
struct CapFlags {
    /// HURWITZ_TR_GAMMA_ORDER
    #[arg(long, global = true)]
    gamma_order: Option<u32>,
    /// HURWITZ_TR_X_ORDER
    #[arg(long, global = true)]
    x_order: Option<i32>,
    /// HURWITZ_TR_BIDEGREE
    #[arg(long, global = true)]
    bidegree: Option<i32>,
    /// HURWITZ_TR_BETA_ORDER
    #[arg(long, global = true)]
    beta_order: Option<i32>,
    /// HURWITZ_TR_ORACLE_N_MAX
    #[arg(long, global = true)]
    oracle_n_max: Option<u32>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Weighted Hurwitz numbers H^d_G(mu, nu) for d <= dmax.
    Oracle {
        #[arg(long = "N")]
        n: u32,
        /// Comma-separated parts; all partitions of N when omitted.
        #[arg(long)]
        mu: Option<String>,
        #[arg(long)]
        nu: Option<String>,
        #[arg(long, default_value_t = 0)]
        dmax: u32,
        /// g_1,...,g_M of G(z) = 1 + g_1 z + ... (default G = 1 + z).
        #[arg(long = "G", default_value = "1")]
        g: String,
        /// Count transitive factorizations only.
        #[arg(long)]
        connected: bool,
    },
    /// Expansion of tau or of its correlators for a numeric curve.
    Tau {
        #[arg(long)]
        curve: String,
        #[arg(long, value_enum, default_value_t = Kind::Tau)]
        kind: Kind,
        #[arg(long, default_value_t = 1)]
        n: u8,
        #[arg(long, default_value_t = 0)]
        g: u32,
        /// Total x-degree (γ-order for tau); defaults to the gammaOrder cap.
        #[arg(long)]
        order: Option<u32>,
    },
    /// X, Y, phi and branch data of the spectral curve.
    Curve {
        #[arg(long)]
        curve: String,
    },
    /// omega_{g,n} by topological recursion.
    Toprec {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        curve: String,
        /// Also expand on the physical sheet and compare with the oracle.
        #[arg(long)]
        emit_hurwitz: bool,
    },
    /// Run cross-check suites.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Tau,
    W,
    TildeW,
    F,
    TildeF,
    Fgn,
}

enum Failure {
    Config(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_)
            | Error::Invalid(_)
            | Error::DegenerateModel
            | Error::NonSimpleRamification
            | Error::CapExceeded(_)
            | Error::SizeMismatch(..)
            | Error::TrivialProfile => Failure::Config(e.to_string()),
            _ => Failure::Check(e.to_string()),
        }
    }
}

type Outcome = std::result::Result<(Value, bool), Failure>;

fn caps(f: &CapFlags) -> Result<Caps, Failure> {
    let mut c = Caps::from_env()?;
    if let Some(v) = f.gamma_order {
        c.gamma_order = v;
    }
    if let Some(v) = f.x_order {
        c.x_order = v;
    }
    if let Some(v) = f.bidegree {
        c.bidegree = v;
    }
    if let Some(v) = f.beta_order {
        c.beta_order = v;
    }
    if let Some(v) = f.oracle_n_max {
        c.oracle_n_max = v;
    }
    c.validate()?;
    Ok(c)
}

/// A path to a JSON file, or the JSON itself when it starts with `{`.
fn load_curve(arg: &str) -> Result<SpectralCurve, Failure> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| Failure::Config(format!("{arg}: {e}")))?
    };
    Ok(SpectralCurve::from_config(&CurveConfig::from_json(&text)?)?)
}

fn parse_list(s: &str) -> Result<Vec<Q>, Failure> {
    Ok(s.split(',').map(|x| parse_q(x.trim())).collect::<hurwitz_tr::Result<Vec<_>>>()?)
}

fn parse_partition(s: &str, n: u32) -> Result<Partition, Failure> {
    let parts = s
        .split(',')
        .map(|x| x.trim().parse::<u32>().map_err(|_| Failure::Config(format!("bad part {x:?} in {s:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let p = Partition::new(parts);
    if p.weight() != n {
        return Err(Failure::Config(format!("partition {s} is not a partition of N = {n}")));
    }
    Ok(p)
}

fn oracle(n: u32, mu: Option<&str>, nu: Option<&str>, dmax: u32, g: &str, connected: bool) -> Outcome {
    let w = Weight::numeric(&parse_list(g)?);
    let all = || partitions_of(n, None);
    let mus = match mu {
        Some(s) => vec![parse_partition(s, n)?],
        None => all(),
    };
    let nus = match nu {
        Some(s) => vec![parse_partition(s, n)?],
        None => all(),
    };
    let mut rows: Vec<HurwitzRow> = vec![];
    for m in &mus {
        for v in &nus {
            let t = if connected { connected_weighted_hurwitz(&w, m, v, dmax)? } else { weighted_hurwitz(&w, m, v, dmax)? };
            rows.extend(t.rows());
        }
    }
    Ok((json!({ "N": n, "G": g, "connected": connected, "rows": rows }), true))
}

fn tau(c: &SpectralCurve, kind: Kind, n: u8, g: u32, order: u32) -> Outcome {
    let m = c.model();
    let (name, data) = match kind {
        Kind::Tau => ("tau", tau_expand(&m, order)?.expansion),
        Kind::W => ("W", correlators(n, CorrelatorKind::W, order, &m)?.data),
        Kind::TildeW => ("tildeW", correlators(n, CorrelatorKind::TildeW, order, &m)?.data),
        Kind::F => ("F", correlators(n, CorrelatorKind::F, order, &m)?.data),
        Kind::TildeF => ("tildeF", correlators(n, CorrelatorKind::TildeF, order, &m)?.data),
        Kind::Fgn => ("tildeFgn", fgn_extract(g, n, order, &m)?.data),
    };
    let mut out = json!({ "kind": name, "order": order, "terms": mpoly_rows(&data) });
    if !matches!(kind, Kind::Tau) {
        out["n"] = json!(n);
    }
    if matches!(kind, Kind::Fgn) {
        out["g"] = json!(g);
    }
    Ok((out, true))
}

fn curve(c: &SpectralCurve) -> Outcome {
    let qs = |v: &[Q]| v.iter().map(fmt_q).collect::<Vec<_>>();
    Ok((
        json!({
            "G": qs(&c.g),
            "s": qs(&c.s),
            "gamma": fmt_q(&c.gamma),
            "X": c.x,
            "Y": c.y,
            "phi": c.phi,
            "LM": c.lm(),
            "branch": c.branch,
        }),
        true,
    ))
}

fn toprec(c: SpectralCurve, g: u32, n: usize, emit: bool, order: u32) -> Outcome {
    if 2 * g as i64 - 2 + n as i64 <= 0 {
        return Err(Failure::Config(format!("(g, n) = ({g}, {n}) is not stable")));
    }
    let tr = TopRec::new(c);
    let om = tr.omega(g, n)?;
    let mut out = json!({ "omega": om.to_json(tr.phi_hat()) });
    let mut ok = true;
    if emit {
        let h = oracle_check(&tr, g, n, order as i32)?;
        ok = h.agrees;
        out["hurwitz"] = serde_json::to_value(&h).expect("serialisable");
    }
    Ok((out, ok))
}

fn verify(suite: &str, seed: u64, caps: &Caps) -> Outcome {
    fn value<T: Serialize>(t: &T) -> Value {
        serde_json::to_value(t).expect("serialisable")
    }
    if suite == "all" {
        let r = run_all(caps, seed)?;
        Ok((value(&r), r.residual_zero))
    } else if SUITES.contains(&suite) {
        let r = run_suite(suite, caps, seed)?;
        Ok((value(&r), r.residual_zero))
    } else {
        Err(Failure::Config(format!("unknown suite {suite}; expected all or one of {}", SUITES.join(", "))))
    }
}

fn run(cli: &Cli) -> Outcome {
    let caps = caps(&cli.caps)?;
    match &cli.cmd {
        Cmd::Oracle { n, mu, nu, dmax, g, connected } => oracle(*n, mu.as_deref(), nu.as_deref(), *dmax, g, *connected),
        Cmd::Tau { curve, kind, n, g, order } => tau(&load_curve(curve)?, *kind, *n, *g, order.unwrap_or(caps.gamma_order)),
        Cmd::Curve { curve: path } => curve(&load_curve(path)?),
        Cmd::Toprec { g, n, curve, emit_hurwitz } => toprec(load_curve(curve)?, *g, *n, *emit_hurwitz, caps.gamma_order),
        Cmd::Verify { suite, seed } => verify(suite, *seed, &caps),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok((v, ok)) => {
            println!("{}", serde_json::to_string_pretty(&v).expect("serialisable"));
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Check(m)) => {
            eprintln!("check failed: {m}");
            ExitCode::from(1)
        }
    }
}
