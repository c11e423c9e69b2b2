//! Python bindings for the accuracy-naturalness evaluation library.
//!
//! The module mirrors the Rust API with plain Python data: distributions and
//! joint instances are classes, frontiers come back as point lists, and the
//! sweep/MQM entry points accept lists of dicts. Build with
//! `cargo build -p anplane-py`, then load `target/debug/lib_anplane.so` as
//! the module `_anplane` (see python/smoke_test.py).

// `!(x >= y)` deliberately treats NaN as a failure; `x < y` would not.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use anplane::critic::{self, CriticProcess, CriticSampler, Link};
use anplane::data::{CandidateRecord, DistortionTable, SegmentRecord};
use anplane::divergence;
use anplane::frontier::{self, FrontierDivergence};
use anplane::mqm::{self, ErrorTaxonomy, MqmAnnotation, Severity, SeverityWeights};
use anplane::rng;
use anplane::special;
use anplane::sweep;

fn to_py(e: anplane::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_link(link: &str) -> PyResult<Link> {
    match link {
        "identity" => Ok(Link::Identity),
        "log" => Ok(Link::Log),
        "probit" => Ok(Link::Probit),
        other => Err(PyValueError::new_err(format!(
            "link {other:?}: want identity, log, or probit"
        ))),
    }
}

fn parse_taxonomy(schema: &str) -> PyResult<ErrorTaxonomy> {
    match schema {
        "ende" | "ende_jazh" | "jazh" => Ok(ErrorTaxonomy::builtin_ende_jazh()),
        "enes" => Ok(ErrorTaxonomy::builtin_enes()),
        other => Err(PyValueError::new_err(format!(
            "schema {other:?}: want ende or enes"
        ))),
    }
}

// ============================================================================
// distributions and joint instances
// ============================================================================

/// Probability distribution over labeled atoms.
#[pyclass(frozen, name = "FiniteDistribution", module = "_anplane")]
struct PyFiniteDistribution {
    inner: anplane::data::FiniteDistribution,
}

#[pymethods]
impl PyFiniteDistribution {
    #[new]
    fn new(labels: Vec<String>, probs: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: anplane::data::FiniteDistribution::new(labels, probs).map_err(to_py)?,
        })
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.labels().to_vec()
    }

    #[getter]
    fn probs(&self) -> Vec<f64> {
        self.inner.probs().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "FiniteDistribution({:?}, {:?})",
            self.inner.labels(),
            self.inner.probs()
        )
    }
}

/// Joint source-output distribution P(x, y).
#[pyclass(frozen, name = "JointInstance", module = "_anplane")]
struct PyJointInstance {
    inner: anplane::data::JointInstance,
}

#[pymethods]
impl PyJointInstance {
    #[new]
    fn new(x_labels: Vec<String>, y_labels: Vec<String>, joint: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(Self {
            inner: anplane::data::JointInstance::new(x_labels, y_labels, joint).map_err(to_py)?,
        })
    }

    #[getter]
    fn nx(&self) -> usize {
        self.inner.nx()
    }

    #[getter]
    fn ny(&self) -> usize {
        self.inner.ny()
    }

    /// Output marginal P_y as a FiniteDistribution.
    fn p_y(&self) -> PyFiniteDistribution {
        PyFiniteDistribution {
            inner: self.inner.p_y_distribution(),
        }
    }

    /// H[y|x] in nats; zero iff every source has a deterministic output.
    fn conditional_entropy(&self) -> f64 {
        frontier::conditional_entropy(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("JointInstance(nx={}, ny={})", self.inner.nx(), self.inner.ny())
    }
}

// ============================================================================
// frontiers
// ============================================================================

/// Solved tradeoff frontier: points are (naturalness, accuracy, beta) with
/// beta None for grid buckets.
#[pyclass(frozen, name = "Frontier", module = "_anplane")]
struct PyFrontier {
    inner: frontier::FrontierResult,
}

#[pymethods]
impl PyFrontier {
    #[getter]
    fn points(&self) -> Vec<(f64, f64, Option<f64>)> {
        self.inner
            .points
            .iter()
            .map(|p| (p.naturalness, p.accuracy, p.beta))
            .collect()
    }

    #[getter]
    fn unconverged_betas(&self) -> Vec<f64> {
        self.inner.unconverged_betas.clone()
    }

    /// Best accuracy among points with naturalness >= n, or None.
    fn accuracy_at(&self, n: f64) -> Option<f64> {
        self.inner.accuracy_at(n)
    }

    /// (passes, worst_monotonicity_violation, worst_concavity_violation)
    /// for the non-increasing + concave shape checks at tolerance `tol`.
    #[pyo3(signature = (tol = 1e-9))]
    fn verify_shape(&self, tol: f64) -> (bool, f64, f64) {
        let report = frontier::verify_an_properties(&self.inner, tol);
        (
            report.passes(),
            report.worst_monotonicity_violation,
            report.worst_concavity_violation,
        )
    }

    fn __len__(&self) -> usize {
        self.inner.points.len()
    }

    fn __repr__(&self) -> String {
        format!("Frontier({} points)", self.inner.points.len())
    }
}

fn parse_frontier_divergence(
    divergence: &str,
    kernel: Option<Vec<Vec<f64>>>,
) -> PyResult<FrontierDivergence> {
    match (divergence, kernel) {
        ("tv", None) => Ok(FrontierDivergence::Tv),
        ("kl", None) => Ok(FrontierDivergence::Kl),
        ("d2", Some(k)) => Ok(FrontierDivergence::D2(k)),
        ("d2", None) => Err(PyValueError::new_err("divergence d2 needs a kernel table")),
        (other, _) => Err(PyValueError::new_err(format!(
            "divergence {other:?}: want tv, kl, or d2 (tv/kl take no kernel)"
        ))),
    }
}

/// Frontier traced by maximizing accuracy − β·divergence per β.
/// `delta[x][y_ref][y_cand]` is the distortion table.
#[pyfunction]
#[pyo3(signature = (inst, delta, r_y, betas, divergence = "tv", kernel = None, restarts = 8, seed = 0))]
#[allow(clippy::too_many_arguments)]
fn scalarization_frontier(
    inst: &PyJointInstance,
    delta: Vec<Vec<Vec<f64>>>,
    r_y: &PyFiniteDistribution,
    betas: Vec<f64>,
    divergence: &str,
    kernel: Option<Vec<Vec<f64>>>,
    restarts: usize,
    seed: u64,
) -> PyResult<PyFrontier> {
    let delta = DistortionTable::new(delta).map_err(to_py)?;
    let div = parse_frontier_divergence(divergence, kernel)?;
    let inner = frontier::scalarization_frontier(
        &inst.inner,
        &delta,
        &r_y.inner,
        &div,
        &betas,
        restarts,
        seed,
    )
    .map_err(to_py)?;
    Ok(PyFrontier { inner })
}

/// Exhaustive staircase over per-source simplex grids; exact up to the grid
/// resolution and exponential in the instance size, so keep instances tiny.
#[pyfunction]
#[pyo3(signature = (inst, delta, r_y, divergence = "tv", kernel = None, resolution = 100))]
fn brute_force_frontier(
    inst: &PyJointInstance,
    delta: Vec<Vec<Vec<f64>>>,
    r_y: &PyFiniteDistribution,
    divergence: &str,
    kernel: Option<Vec<Vec<f64>>>,
    resolution: usize,
) -> PyResult<PyFrontier> {
    let delta = DistortionTable::new(delta).map_err(to_py)?;
    let div = parse_frontier_divergence(divergence, kernel)?;
    let inner =
        frontier::brute_force_frontier(&inst.inner, &delta, &r_y.inner, &div, resolution)
            .map_err(to_py)?;
    Ok(PyFrontier { inner })
}

/// (conditional_entropy, tv_to_data_marginal, tradeoff_present) for the
/// distortion-minimizing system against the data marginal.
#[pyfunction]
fn no_two_birds_demo(
    inst: &PyJointInstance,
    delta: Vec<Vec<Vec<f64>>>,
) -> PyResult<(f64, f64, bool)> {
    let delta = DistortionTable::new(delta).map_err(to_py)?;
    let report = frontier::no_two_birds_demo(&inst.inner, &delta).map_err(to_py)?;
    Ok((
        report.conditional_entropy,
        report.tv_to_data_marginal,
        report.tradeoff_present,
    ))
}

// ============================================================================
// divergences
// ============================================================================

/// Total variation distance.
#[pyfunction]
fn total_variation(p: &PyFiniteDistribution, q: &PyFiniteDistribution) -> PyResult<f64> {
    Ok(divergence::total_variation(&p.inner, &q.inner)
        .map_err(to_py)?
        .value)
}

/// KL(p‖q); errors where q has a zero that p does not.
#[pyfunction]
fn kl_divergence(p: &PyFiniteDistribution, q: &PyFiniteDistribution) -> PyResult<f64> {
    Ok(divergence::kl_divergence(&p.inner, &q.inner)
        .map_err(to_py)?
        .value)
}

/// Exact kernelized distance sqrt((q−p)ᵀ K (q−p)) over a shared support.
#[pyfunction]
fn d2_exact(
    p: &PyFiniteDistribution,
    q: &PyFiniteDistribution,
    kernel: Vec<Vec<f64>>,
) -> PyResult<f64> {
    Ok(divergence::d2_exact(&p.inner, &q.inner, &kernel)
        .map_err(to_py)?
        .value)
}

/// Critic kernel C(i, j) = E[f(i)f(j)] for a zero-mean process under the
/// given link; feeding it to d2_exact reproduces the sampled-critic limit.
#[pyfunction]
#[pyo3(signature = (kernel, link = "identity", mean = None))]
fn effective_kernel(
    kernel: Vec<Vec<f64>>,
    link: &str,
    mean: Option<Vec<f64>>,
) -> PyResult<Vec<Vec<f64>>> {
    let link = parse_link(link)?;
    let proc = match mean {
        Some(m) => CriticProcess::new(m, kernel, link),
        None => CriticProcess::zero_mean(kernel, link),
    }
    .map_err(to_py)?;
    critic::effective_kernel(&proc).map_err(to_py)
}

/// Monte Carlo critic-averaged distance: draws `n_critics` critics from a
/// zero-mean process over the shared support and averages |Q(f)−P(f)|^p.
/// Returns (value, std_error).
#[pyfunction]
#[pyo3(signature = (q, p, kernel, link = "identity", exponent = 2.0, n_critics = 20_000, seed = 0))]
fn dp_sampled(
    q: &PyFiniteDistribution,
    p: &PyFiniteDistribution,
    kernel: Vec<Vec<f64>>,
    link: &str,
    exponent: f64,
    n_critics: usize,
    seed: u64,
) -> PyResult<(f64, Option<f64>)> {
    q.inner.check_same_support(&p.inner).map_err(to_py)?;
    let proc = CriticProcess::zero_mean(kernel, parse_link(link)?).map_err(to_py)?;
    let draws = critic::sample_critics(&proc, n_critics, seed).map_err(to_py)?;
    let est = divergence::dp_monte_carlo(q.inner.probs(), p.inner.probs(), &draws, exponent)
        .map_err(to_py)?;
    Ok((est.value, est.std_error))
}

/// Unbiased two-sample estimate of the squared kernelized distance.
/// `kernel` is "indicator" or "rbf:GAMMA". Returns (signed, std_error);
/// the signed statistic may be negative near zero.
#[pyfunction]
#[pyo3(signature = (samples_q, samples_p, kernel = "indicator"))]
fn d2_ustat(samples_q: Vec<f64>, samples_p: Vec<f64>, kernel: &str) -> PyResult<(f64, Option<f64>)> {
    let est = if kernel == "indicator" {
        divergence::d2_ustat(&samples_q, &samples_p, |a, b| if a == b { 1.0 } else { 0.0 })
    } else if let Some(g) = kernel.strip_prefix("rbf:") {
        let gamma: f64 = g
            .parse()
            .map_err(|_| PyValueError::new_err(format!("kernel {kernel:?}: bad gamma")))?;
        if !(gamma > 0.0) {
            return Err(PyValueError::new_err("rbf gamma must be > 0"));
        }
        divergence::d2_ustat(&samples_q, &samples_p, move |a, b| {
            (-gamma * (a - b) * (a - b)).exp()
        })
    } else {
        return Err(PyValueError::new_err(format!(
            "kernel {kernel:?}: want indicator or rbf:GAMMA"
        )));
    }
    .map_err(to_py)?;
    Ok((est.signed.unwrap_or(0.0), est.std_error))
}

/// Chain check −D_∞ ≤ −D_1 ≤ expected risk with RBF-process critics drawn
/// over the pooled samples. Returns (neg_d_inf, neg_d1, risk, chain_holds).
#[pyfunction]
#[pyo3(signature = (samples_p, samples_q, epsilon = 0.3, n_critics = 60, gamma = 0.5, seed = 0))]
fn risk_chain(
    samples_p: Vec<f64>,
    samples_q: Vec<f64>,
    epsilon: f64,
    n_critics: usize,
    gamma: f64,
    seed: u64,
) -> PyResult<(f64, f64, f64, bool)> {
    if !(gamma > 0.0) {
        return Err(PyValueError::new_err("gamma must be > 0"));
    }
    let mut calls = 0u64;
    let report = divergence::classification_risk_check(
        epsilon,
        &samples_p,
        &samples_q,
        n_critics,
        |points| {
            let gram: Vec<Vec<f64>> = points
                .iter()
                .map(|&a| {
                    points
                        .iter()
                        .map(|&b| (-gamma * (a - b) * (a - b)).exp())
                        .collect()
                })
                .collect();
            let proc = CriticProcess::zero_mean(gram, Link::Identity)?;
            let sampler = CriticSampler::new(&proc)?;
            let mut draw_rng = rng::stream(seed, calls);
            calls += 1;
            Ok(sampler.draw(&mut draw_rng))
        },
    )
    .map_err(to_py)?;
    Ok((report.neg_d_inf, report.neg_d1, report.risk, report.chain_holds))
}

/// Closed form for the critic-averaged distance when the critic gap is
/// Gaussian with standard deviation `mmd` and mean `mean_diff`.
#[pyfunction]
fn dp_gaussian(exponent: f64, mmd: f64, mean_diff: f64) -> PyResult<f64> {
    Ok(critic::dp_gaussian_closed_form(exponent, mmd, mean_diff)
        .map_err(to_py)?
        .value)
}

/// Direct p = 1 Gaussian form (folded-normal mean).
#[pyfunction]
fn d1_gaussian(mmd: f64, mean_diff: f64) -> f64 {
    critic::d1_gaussian_closed_form(mmd, mean_diff)
}

/// sqrt(e/(p+1))·D_p at zero mean for each exponent; converges to `mmd`.
#[pyfunction]
fn dp_limit_check(mmd: f64, exponents: Vec<f64>) -> PyResult<Vec<f64>> {
    critic::dp_limit_check(mmd, &exponents).map_err(to_py)
}

// ============================================================================
// oracle sweeps over candidate pools
// ============================================================================

#[derive(FromPyObject)]
#[pyo3(from_item_all)]
struct CandidateIn {
    system: String,
    accuracy: f64,
    logprob: f64,
    token_count: u64,
}

#[derive(FromPyObject)]
#[pyo3(from_item_all)]
struct SegmentIn {
    segment_id: String,
    candidates: Vec<CandidateIn>,
}

fn to_segments(segments: Vec<SegmentIn>) -> Vec<SegmentRecord> {
    segments
        .into_iter()
        .map(|s| SegmentRecord {
            segment_id: s.segment_id,
            source: String::new(),
            reference: String::new(),
            candidates: s
                .candidates
                .into_iter()
                .map(|c| CandidateRecord {
                    text: String::new(),
                    system_id: c.system,
                    accuracy: c.accuracy,
                    logprob: c.logprob,
                    token_count: c.token_count,
                })
                .collect(),
        })
        .collect()
}

/// β-swept oracle curve over candidate pools. Segments are dicts with
/// `segment_id` and `candidates` (dicts with system, accuracy, logprob,
/// token_count). Returns (beta, accuracy, mean_nll_per_token) rows.
#[pyfunction]
fn oracle_curve(segments: Vec<SegmentIn>, betas: Vec<f64>) -> PyResult<Vec<(f64, f64, f64)>> {
    let segs = to_segments(segments);
    let curve = sweep::sweep_curve(&segs, &betas).map_err(to_py)?;
    Ok(curve
        .points
        .iter()
        .map(|p| (p.beta, p.accuracy, p.mean_nll_per_token))
        .collect())
}

type SystemRow = (String, f64, f64, f64, usize);

/// Per-system means across the pools. Returns rows of
/// (system, mean_accuracy, mean_lpp, lpp_distance_to_ref, n_segments).
#[pyfunction]
fn system_points(segments: Vec<SegmentIn>, ref_mean_lpp: f64) -> PyResult<Vec<SystemRow>> {
    let segs = to_segments(segments);
    Ok(sweep::system_points(&segs, ref_mean_lpp)
        .map_err(to_py)?
        .into_iter()
        .map(|s| {
            (
                s.system_id,
                s.mean_accuracy,
                s.mean_lpp,
                s.lpp_distance_to_ref,
                s.n_segments,
            )
        })
        .collect())
}

// ============================================================================
// MQM annotation scoring
// ============================================================================

#[derive(FromPyObject)]
#[pyo3(from_item_all)]
struct AnnotationIn {
    system: String,
    doc: String,
    segment_id: String,
    rater: String,
    category: String,
    severity: String,
}

type ScoreRow = (String, f64, f64, usize, usize);

/// Scores MQM annotations (list of dicts with system, doc, segment_id,
/// rater, category, severity) under a builtin schema. `weights` overrides
/// the per-severity base weights. Returns (scores, unknown_categories) where
/// scores rows are (system, adequacy, fluency, n_pairs, n_annotations).
#[pyfunction]
#[pyo3(signature = (annotations, schema = "ende", weights = None))]
fn score_mqm(
    annotations: Vec<AnnotationIn>,
    schema: &str,
    weights: Option<BTreeMap<String, f64>>,
) -> PyResult<(Vec<ScoreRow>, BTreeMap<String, u64>)> {
    let taxonomy = parse_taxonomy(schema)?;
    let weights = match weights {
        None => SeverityWeights::default(),
        Some(map) => {
            let mut base = BTreeMap::new();
            for (name, w) in map {
                let sev = Severity::parse(&name).ok_or_else(|| {
                    PyValueError::new_err(format!("severity {name:?}: want major, minor, neutral, or non-translation"))
                })?;
                base.insert(sev, w);
            }
            SeverityWeights::new(base, vec![]).map_err(to_py)?
        }
    };
    let rows: Vec<MqmAnnotation> = annotations
        .into_iter()
        .map(|a| {
            let severity = Severity::parse(&a.severity).ok_or_else(|| {
                PyValueError::new_err(format!("severity {:?} on segment {:?}", a.severity, a.segment_id))
            })?;
            Ok(MqmAnnotation {
                system: a.system,
                doc: a.doc,
                segment_id: a.segment_id,
                rater: a.rater,
                category: a.category,
                severity,
            })
        })
        .collect::<PyResult<_>>()?;
    let report = mqm::score_annotations(&rows, &taxonomy, &weights).map_err(to_py)?;
    Ok((
        report
            .scores
            .into_iter()
            .map(|s| (s.system, s.adequacy, s.fluency, s.n_pairs, s.n_annotations))
            .collect(),
        report.unknown_categories,
    ))
}

// ============================================================================
// special functions
// ============================================================================

/// ln Γ(x) for x > 0.
#[pyfunction]
fn log_gamma(x: f64) -> f64 {
    special::log_gamma(x)
}

/// Complementary error function.
#[pyfunction]
fn erfc(x: f64) -> f64 {
    special::erfc(x)
}

/// Standard normal CDF.
#[pyfunction]
fn normal_cdf(x: f64) -> f64 {
    special::normal_cdf(x)
}

/// Confluent hypergeometric function M(a, b, z).
#[pyfunction]
fn kummer_m(a: f64, b: f64, z: f64) -> PyResult<f64> {
    special::kummer_m(a, b, z).map_err(to_py)
}

/// P(X ≤ x, Y ≤ y) for standard bivariate normal with correlation rho.
#[pyfunction]
fn bivariate_normal_cdf(x: f64, y: f64, rho: f64) -> PyResult<f64> {
    special::bivariate_normal_cdf(x, y, rho).map_err(to_py)
}

// ============================================================================
// module
// ============================================================================

#[pymodule]
fn _anplane(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyFiniteDistribution>()?;
    m.add_class::<PyJointInstance>()?;
    m.add_class::<PyFrontier>()?;
    m.add_function(wrap_pyfunction!(scalarization_frontier, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_frontier, m)?)?;
    m.add_function(wrap_pyfunction!(no_two_birds_demo, m)?)?;
    m.add_function(wrap_pyfunction!(total_variation, m)?)?;
    m.add_function(wrap_pyfunction!(kl_divergence, m)?)?;
    m.add_function(wrap_pyfunction!(d2_exact, m)?)?;
    m.add_function(wrap_pyfunction!(effective_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(dp_sampled, m)?)?;
    m.add_function(wrap_pyfunction!(d2_ustat, m)?)?;
    m.add_function(wrap_pyfunction!(risk_chain, m)?)?;
    m.add_function(wrap_pyfunction!(dp_gaussian, m)?)?;
    m.add_function(wrap_pyfunction!(d1_gaussian, m)?)?;
    m.add_function(wrap_pyfunction!(dp_limit_check, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_curve, m)?)?;
    m.add_function(wrap_pyfunction!(system_points, m)?)?;
    m.add_function(wrap_pyfunction!(score_mqm, m)?)?;
    m.add_function(wrap_pyfunction!(log_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(erfc, m)?)?;
    m.add_function(wrap_pyfunction!(normal_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(kummer_m, m)?)?;
    m.add_function(wrap_pyfunction!(bivariate_normal_cdf, m)?)?;
    Ok(())
}
