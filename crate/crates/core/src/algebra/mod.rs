pub mod dyneval;
pub mod laurent;
pub mod mpoly;
pub mod poly;
pub mod ratfun;
pub mod rational;
pub mod ring;
pub mod series;

pub use dyneval::{trace_over_roots, DynEval, Inverse};
pub use laurent::Laurent;
pub use mpoly::{MPoly, Mono, Var};
pub use poly::Poly;
pub use ratfun::{MRatFun, RatFun};
pub use rational::{fmt_q, parse_q, q, qf, Q};
pub use ring::Ring;
pub use series::{series_reversion, TruncatedSeries};
