//! Evaluation of translation systems on the accuracy-naturalness plane.
//!
//! A translation system is modelled as a conditional distribution `Q(y|x)`.
//! Two orthogonal qualities are measured:
//!
//! - **accuracy**: how close outputs stay to references, as the negated
//!   expected distortion `A(Q) = -E[Δ(x, y_ref, y_cand)]`;
//! - **naturalness**: how close the system's output marginal `Q_y` is to a
//!   monolingual reference distribution `R_y`, as a negated statistical
//!   distance `N(Q) = -D(Q_y, R_y)`.
//!
//! The crate provides:
//!
//! - [`data`] — probability objects (finite distributions, joint instances,
//!   conditional systems, distortion tables) and dataset records (scored
//!   candidate pools, corpus log-perplexity stats), plus file ingestion.
//! - [`divergence`] — exact finite-support distances (total variation, KL),
//!   the critic-averaged `D_p` family (exact quadratic form and unbiased
//!   U-statistic), log-perplexity distances, and normalized no-reference
//!   scores (cross-entropy, own-model KL, compressor-normalized).
//! - [`critic`] — Gaussian-process–type critic distributions with identity,
//!   log, and probit links: effective kernels, closed-form `D_p` values,
//!   seeded critic sampling, and the language-model pure-noise distance.
//! - [`frontier`] — exact/near-exact accuracy-naturalness frontiers on small
//!   synthetic instances: scalarization sweeps, a brute-force grid oracle,
//!   shape verification (monotone + concave), and the demonstration that a
//!   distortion-minimizing system distorts its output marginal.
//! - [`sweep`] — the candidate-pool pipeline: per-segment oracle selection
//!   under a one-shot scalarized objective, β-swept curves, system points on
//!   the plane, and curve-vs-system dominance checks.
//! - [`mqm`] — MQM annotation parsing and per-system adequacy/fluency
//!   scoring under a configurable severity-weight table.
//! - [`special`] — the required special functions (log-gamma, normal CDF,
//!   Kummer's M on the needed domain, bivariate normal CDF).
//!
//! Conventions: probabilities are linear-space `f64`; log-probabilities are
//! natural logs (nats); accuracy is oriented higher-is-better everywhere
//! after ingestion.

// Matrix and LP code reads more clearly with explicit indices.
#![allow(clippy::needless_range_loop)]
// `!(x >= y)` deliberately treats NaN as a failure; `x < y` would not.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod critic;
pub mod data;
pub mod divergence;
pub mod frontier;
pub mod mqm;
pub mod rng;
pub mod simplex;
pub mod special;
pub mod sweep;

pub use data::{
    CandidateRecord, ConditionalSystem, CorpusLppStats, DistortionTable, FiniteDistribution,
    JointInstance, SegmentRecord,
};
pub use divergence::{DivergenceFamily, DivergenceValue};
pub use frontier::{CurvePoint, FrontierResult, FrontierSolver};
pub use sweep::{SweepResult, SystemPoint};

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid {field}: {msg}")]
    Invalid { field: String, msg: String },
    #[error("probabilities sum to {sum} (deviation {deviation:+e} from 1)")]
    Normalization { sum: f64, deviation: f64 },
    #[error("shape mismatch: {msg}")]
    Shape { msg: String },
    #[error("supports differ: {msg}")]
    SupportMismatch { msg: String },
    #[error("absolute continuity violated: q = 0 at label {label} where p = {p}")]
    AbsoluteContinuity { label: String, p: f64 },
    #[error("kernel table is not symmetric at ({i}, {j}): {a} vs {b}")]
    AsymmetricKernel { i: usize, j: usize, a: f64, b: f64 },
    #[error("kernel gram matrix is not positive semidefinite (eigenvalue bound {bound:e})")]
    NotPsd { bound: f64 },
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("empty input: {msg}")]
    Empty { msg: String },
    #[error("matrix factorization failed: {msg}")]
    Factorization { msg: String },
    #[error("parameter out of range: {msg}")]
    OutOfRange { msg: String },
    #[error("instance too large for grid enumeration: {msg}")]
    TooLarge { msg: String },
    #[error("missing column {name} in header")]
    MissingColumn { name: String },
    #[error("line {line}: unknown severity {value:?}")]
    UnknownSeverity { line: usize, value: String },
    #[error("missing weight for severity {severity}")]
    MissingWeight { severity: String },
    #[error("linear program infeasible (phase-1 residual {residual:e})")]
    Infeasible { residual: f64 },
    #[error("linear program unbounded on column {col}")]
    Unbounded { col: usize },
    #[error("compression failed: {msg}")]
    Compression { msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
