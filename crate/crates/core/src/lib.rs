//! Contagion source detection on graphs.
//!
//! The crate is organized around a single exact primitive: the probability of
//! an observed infection order under susceptible-infected spreading where each
//! susceptible node is chosen proportionally to its number of infected
//! neighbors. Everything else (per-source likelihoods, centrality-based
//! estimators, detection-probability asymptotics, protection-set selection)
//! is built on top of that primitive plus message passing over trees.
//!
//! Numeric regimes: exact `BigRational` for order probabilities and
//! likelihood tables, big integers for order counts up to the documented
//! cutoff, log-space reals beyond it. All randomized routines take explicit
//! `u64` seeds and are bit-reproducible.

pub mod asymptotics;
pub mod centrality;
pub mod estimators;
pub mod experiment;
pub mod graph;
pub mod likelihood;
pub mod numeric;
pub mod rng;
pub mod spread;
pub mod vaccine;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("self-loop at line {line}: node {node}")]
    SelfLoop { line: usize, node: u64 },
    #[error("duplicate edge at line {line}: {u} {v}")]
    DuplicateEdge { line: usize, u: u64, v: u64 },
    #[error("node {0} out of range")]
    NodeOutOfRange(usize),
    #[error("graph is not a tree")]
    NotATree,
    #[error("graph is not unicyclic")]
    NotUnicyclic,
    #[error("graph is not connected")]
    Disconnected,
    #[error("{what} cap exceeded: limit {limit}")]
    CapExceeded { what: &'static str, limit: usize },
    #[error("invalid spreading order: {0}")]
    InvalidOrder(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Documented numeric tolerances used across the crate.
pub mod tol {
    /// Tie tolerance for log-space score comparisons.
    pub const LOG_TIE: f64 = 1e-9;
    /// L1 tolerance for stationary-distribution checks.
    pub const STATIONARY_L1: f64 = 1e-8;
    /// Relative tolerance of the regularized incomplete beta function.
    pub const INCOMPLETE_BETA_REL: f64 = 1e-12;
    /// Absolute tolerance for closed-form vs. quadrature/limit cross-checks.
    pub const LIMIT_ABS: f64 = 1e-9;
    /// Node-count cutoff: exact big-integer order counts at or below, log-space above.
    pub const BIGINT_NODE_CUTOFF: usize = 150;
}
