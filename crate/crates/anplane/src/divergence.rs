//! Statistical distances between distributions: exact finite-support
//! divergences, critic-averaged distances (exact and estimator forms),
//! log-perplexity distances, and no-reference normalized scores.
//!
//! Sign conventions: every exposed `value` is ≥ 0; estimators that can go
//! negative in finite samples keep the raw number in `signed` and clamp
//! `value`. All log quantities are in nats.

use serde::{Deserialize, Serialize};
use std::io::Write as _;

use crate::data::FiniteDistribution;
use crate::{Error, Result};

/// Which distance a [`DivergenceValue`] carries.
///
/// Value conventions per family:
/// - `Tv`, `Kl`, `D1`, `Dp`, `LppDist`: `value` is the distance itself.
/// - `D2`: `value` is D_2, `squared` is D_2².
/// - `Mmd2`: `value` is the zero-clamped squared estimate, `signed` the raw
///   (possibly negative) unbiased estimate.
/// - `Xent`: `value` is the mean reference-model NLL; `incomparable` is set
///   because the score mixes the distance with the entropy of the system.
/// - `KlNorm`, `ZipNorm`: `value` is |mean|, `signed` the raw mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DivergenceFamily {
    #[serde(rename = "TV")]
    Tv,
    #[serde(rename = "KL")]
    Kl,
    #[serde(rename = "MMD2")]
    Mmd2,
    D1,
    D2,
    #[serde(rename = "DP")]
    Dp,
    #[serde(rename = "LPP_DIST")]
    LppDist,
    #[serde(rename = "XENT")]
    Xent,
    #[serde(rename = "KL_NORM")]
    KlNorm,
    #[serde(rename = "ZIP_NORM")]
    ZipNorm,
}

impl std::fmt::Display for DivergenceFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            DivergenceFamily::Tv => "TV",
            DivergenceFamily::Kl => "KL",
            DivergenceFamily::Mmd2 => "MMD2",
            DivergenceFamily::D1 => "D1",
            DivergenceFamily::D2 => "D2",
            DivergenceFamily::Dp => "DP",
            DivergenceFamily::LppDist => "LPP_DIST",
            DivergenceFamily::Xent => "XENT",
            DivergenceFamily::KlNorm => "KL_NORM",
            DivergenceFamily::ZipNorm => "ZIP_NORM",
        };
        f.write_str(s)
    }
}

/// A computed distance with optional estimator metadata.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceValue {
    /// Non-negative headline number; see [`DivergenceFamily`] for the
    /// per-family convention.
    pub value: f64,
    pub family: DivergenceFamily,
    /// Standard error of `value` for Monte Carlo estimates (for `Mmd2` the
    /// error is on the squared scale, matching `signed`).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub std_error: Option<f64>,
    /// Raw signed number behind `value` where the estimate or score can be
    /// negative.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub signed: Option<f64>,
    /// D_2² alongside D_2 for the `D2` family.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub squared: Option<f64>,
    /// Set when the score must not be compared across systems.
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub incomparable: bool,
}

impl DivergenceValue {
    fn new(family: DivergenceFamily, value: f64) -> Self {
        Self {
            value,
            family,
            std_error: None,
            signed: None,
            squared: None,
            incomparable: false,
        }
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard error of the mean (unbiased variance, n ≥ 1).
fn std_error_of_mean(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    let var = xs.iter().map(|&x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}

// ============================================================================
// Exact finite-support divergences
// ============================================================================

/// Total variation distance ½ Σ|p_i − q_i| ∈ [0, 1].
pub fn total_variation(p: &FiniteDistribution, q: &FiniteDistribution) -> Result<DivergenceValue> {
    p.check_same_support(q)?;
    let v = tv_slices(p.probs(), q.probs());
    Ok(DivergenceValue::new(DivergenceFamily::Tv, v))
}

/// TV on raw probability slices of equal length (callers guarantee validity).
pub fn tv_slices(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p
        .iter()
        .zip(q)
        .map(|(&a, &b)| (a - b).abs())
        .sum::<f64>()
}

/// KL(P ‖ Q) = Σ p_i ln(p_i/q_i) in nats, with 0·ln 0 = 0.
///
/// A support cell with q = 0 but p > 0 is a hard error naming the label:
/// surfacing the data problem beats returning an infinity.
pub fn kl_divergence(p: &FiniteDistribution, q: &FiniteDistribution) -> Result<DivergenceValue> {
    p.check_same_support(q)?;
    let mut acc = 0.0;
    for ((&pi, &qi), label) in p.probs().iter().zip(q.probs()).zip(p.labels()) {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return Err(Error::AbsoluteContinuity {
                label: label.clone(),
                p: pi,
            });
        }
        acc += pi * (pi / qi).ln();
    }
    // Roundoff can push a true zero slightly negative.
    Ok(DivergenceValue::new(DivergenceFamily::Kl, acc.max(0.0)))
}

/// Checks C is symmetric within 1e-9 relative tolerance.
fn check_symmetric(c: &[Vec<f64>]) -> Result<()> {
    let n = c.len();
    for (i, row) in c.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Shape {
                msg: format!("kernel row {i} has {} cols, want {n}", row.len()),
            });
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (c[i][j], c[j][i]);
            if (a - b).abs() > 1e-9 * (1.0 + a.abs().max(b.abs())) {
                return Err(Error::AsymmetricKernel { i, j, a, b });
            }
        }
    }
    Ok(())
}

/// Exact D_2 for a kernel table C on a shared finite support:
/// D_2² = Σ_ij (q−p)_i C_ij (q−p)_j = E_QQ[C] − 2 E_QP[C] + E_PP[C].
///
/// Returns both D_2² (`squared`) and D_2 (`value`), clamping tiny negative
/// quadratic forms (roundoff under a PSD kernel) at zero. A substantially
/// negative form means C was not positive semidefinite and is an error.
pub fn d2_exact(
    p: &FiniteDistribution,
    q: &FiniteDistribution,
    kernel: &[Vec<f64>],
) -> Result<DivergenceValue> {
    p.check_same_support(q)?;
    d2_exact_slices(p.probs(), q.probs(), kernel)
}

/// [`d2_exact`] on raw probability slices.
pub fn d2_exact_slices(p: &[f64], q: &[f64], kernel: &[Vec<f64>]) -> Result<DivergenceValue> {
    if kernel.len() != p.len() {
        return Err(Error::Shape {
            msg: format!("kernel is {}×·, support is {}", kernel.len(), p.len()),
        });
    }
    check_symmetric(kernel)?;
    let d: Vec<f64> = q.iter().zip(p).map(|(&a, &b)| a - b).collect();
    let mut sq = 0.0;
    for (i, &di) in d.iter().enumerate() {
        if di == 0.0 {
            continue;
        }
        let mut row = 0.0;
        for (j, &dj) in d.iter().enumerate() {
            row += kernel[i][j] * dj;
        }
        sq += di * row;
    }
    let max_k = kernel
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, &v| m.max(v.abs()));
    if sq < -1e-9 * (1.0 + max_k) {
        return Err(Error::NotPsd { bound: sq });
    }
    let sq = sq.max(0.0);
    let mut out = DivergenceValue::new(DivergenceFamily::D2, sq.sqrt());
    out.squared = Some(sq);
    Ok(out)
}

/// Unbiased estimator of D_2² from two i.i.d. sample sets:
/// within-set averages over ordered pairs i ≠ j, minus twice the full cross
/// average. The raw estimate may be negative; `signed` keeps it, `value`
/// clamps at zero.
pub fn d2_ustat<K>(samples_q: &[f64], samples_p: &[f64], kernel: K) -> Result<DivergenceValue>
where
    K: Fn(f64, f64) -> f64,
{
    let n = samples_q.len();
    let m = samples_p.len();
    if n < 2 || m < 2 {
        return Err(Error::TooFewSamples {
            need: 2,
            got: n.min(m),
        });
    }
    let mut qq = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                qq += kernel(samples_q[i], samples_q[j]);
            }
        }
    }
    qq /= (n * (n - 1)) as f64;
    let mut pp = 0.0;
    for i in 0..m {
        for j in 0..m {
            if i != j {
                pp += kernel(samples_p[i], samples_p[j]);
            }
        }
    }
    pp /= (m * (m - 1)) as f64;
    let mut qp = 0.0;
    for &a in samples_q {
        for &b in samples_p {
            qp += kernel(a, b);
        }
    }
    qp /= (n * m) as f64;

    let est = qq - 2.0 * qp + pp;
    let mut out = DivergenceValue::new(DivergenceFamily::Mmd2, est.max(0.0));
    out.signed = Some(est);
    Ok(out)
}

// ============================================================================
// Critic-averaged Monte Carlo estimators
// ============================================================================

/// Monte Carlo D_1 between two sample sets: mean over sampled critics f of
/// |mean_q f − mean_p f|, with the standard error over critics.
///
/// `sample_critic` receives the concatenated point list
/// `[samples_q..., samples_p...]` and returns one fresh draw of critic values
/// at those points.
pub fn d1_monte_carlo<F>(
    samples_q: &[f64],
    samples_p: &[f64],
    n_critics: usize,
    mut sample_critic: F,
) -> Result<DivergenceValue>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    if n_critics < 1 {
        return Err(Error::Invalid {
            field: "n_critics".into(),
            msg: "is 0, want >= 1".into(),
        });
    }
    if samples_q.is_empty() || samples_p.is_empty() {
        return Err(Error::Empty {
            msg: "d1_monte_carlo needs non-empty sample sets".into(),
        });
    }
    let mut points = Vec::with_capacity(samples_q.len() + samples_p.len());
    points.extend_from_slice(samples_q);
    points.extend_from_slice(samples_p);
    let nq = samples_q.len();
    let mut gaps = Vec::with_capacity(n_critics);
    for _ in 0..n_critics {
        let f = sample_critic(&points)?;
        if f.len() != points.len() {
            return Err(Error::Shape {
                msg: format!("critic returned {} values, want {}", f.len(), points.len()),
            });
        }
        let mq = mean(&f[..nq]);
        let mp = mean(&f[nq..]);
        gaps.push((mq - mp).abs());
    }
    let mut out = DivergenceValue::new(DivergenceFamily::D1, mean(&gaps));
    if n_critics >= 2 {
        out.std_error = Some(std_error_of_mean(&gaps));
    }
    Ok(out)
}

/// Monte Carlo D_p on a shared finite support from precomputed critic draws:
/// D_p ≈ (mean over draws of |Σ_i (q−p)_i f_i|^p)^{1/p}.
///
/// Each draw is a vector of critic values over the support. `std_error` is
/// the delta-method standard error of the reported value. Families line up
/// with the exponent: p = 1 → D1, p = 2 → D2 (with `squared`), else Dp.
pub fn dp_monte_carlo(
    q: &[f64],
    p: &[f64],
    critic_draws: &[Vec<f64>],
    exponent: f64,
) -> Result<DivergenceValue> {
    if exponent < 1.0 {
        return Err(Error::OutOfRange {
            msg: format!("exponent is {exponent}, want >= 1"),
        });
    }
    if q.len() != p.len() {
        return Err(Error::Shape {
            msg: format!("q has {} entries, p has {}", q.len(), p.len()),
        });
    }
    if critic_draws.is_empty() {
        return Err(Error::Empty {
            msg: "dp_monte_carlo needs at least one critic draw".into(),
        });
    }
    let mut powers = Vec::with_capacity(critic_draws.len());
    for f in critic_draws {
        if f.len() != q.len() {
            return Err(Error::Shape {
                msg: format!("critic draw has {} values, want {}", f.len(), q.len()),
            });
        }
        let gap: f64 = f
            .iter()
            .zip(q.iter().zip(p))
            .map(|(&fv, (&qi, &pi))| (qi - pi) * fv)
            .sum();
        powers.push(gap.abs().powf(exponent));
    }
    let m = mean(&powers);
    let value = m.powf(1.0 / exponent);
    let family = if exponent == 1.0 {
        DivergenceFamily::D1
    } else if exponent == 2.0 {
        DivergenceFamily::D2
    } else {
        DivergenceFamily::Dp
    };
    let mut out = DivergenceValue::new(family, value);
    if family == DivergenceFamily::D2 {
        out.squared = Some(m);
    }
    if powers.len() >= 2 {
        let se_m = std_error_of_mean(&powers);
        // d/dm m^{1/p} = m^{1/p − 1}/p; zero mean has zero spread too.
        out.std_error = Some(if m > 0.0 {
            se_m * value / (m * exponent)
        } else {
            0.0
        });
    }
    Ok(out)
}

// ============================================================================
// Log-perplexity distances and no-reference scores
// ============================================================================

use crate::data::CorpusLppStats;

/// |LPP(Q) − LPP(R)| between two corpus summaries; the signed difference
/// LPP(Q) − LPP(R) is kept in `signed` (system minus reference).
pub fn lpp_distance(stats_q: &CorpusLppStats, stats_r: &CorpusLppStats) -> DivergenceValue {
    let diff = stats_q.mean_lpp - stats_r.mean_lpp;
    let mut out = DivergenceValue::new(DivergenceFamily::LppDist, diff.abs());
    out.signed = Some(diff);
    out
}

/// Mean reference-model NLL over samples. Carries `incomparable: true`:
/// the score equals the distance plus the entropy of the scored system, so
/// systems with different entropies cannot be ranked by it.
pub fn cross_entropy_score(neg_log_f: &[f64]) -> Result<DivergenceValue> {
    if neg_log_f.is_empty() {
        return Err(Error::Empty {
            msg: "cross_entropy_score needs at least one sample".into(),
        });
    }
    let mut out = DivergenceValue::new(DivergenceFamily::Xent, mean(neg_log_f));
    out.incomparable = true;
    if neg_log_f.len() >= 2 {
        out.std_error = Some(std_error_of_mean(neg_log_f));
    }
    Ok(out)
}

/// Mean of (log q − log f) over samples, where log q is the scored system's
/// own logprob and log f the reference model's. Finite-sample estimates can
/// be negative; `signed` keeps the raw mean, `value` is its magnitude.
pub fn kl_normalized_score(own_logprob: &[f64], ref_logprob: &[f64]) -> Result<DivergenceValue> {
    if own_logprob.len() != ref_logprob.len() {
        return Err(Error::Shape {
            msg: format!(
                "{} own-model scores vs {} reference-model scores",
                own_logprob.len(),
                ref_logprob.len()
            ),
        });
    }
    if own_logprob.is_empty() {
        return Err(Error::Empty {
            msg: "kl_normalized_score needs at least one sample".into(),
        });
    }
    let diffs: Vec<f64> = own_logprob
        .iter()
        .zip(ref_logprob)
        .map(|(&lq, &lf)| lq - lf)
        .collect();
    let m = mean(&diffs);
    let mut out = DivergenceValue::new(DivergenceFamily::KlNorm, m.abs());
    out.signed = Some(m);
    if diffs.len() >= 2 {
        out.std_error = Some(std_error_of_mean(&diffs));
    }
    Ok(out)
}

/// Compressed length in bits of the UTF-8 text under raw DEFLATE at maximum
/// effort.
pub fn zip_bits(text: &str) -> Result<u64> {
    let mut enc =
        flate2::write::DeflateEncoder::new(Vec::new(), flate2::Compression::best());
    enc.write_all(text.as_bytes())
        .and_then(|_| enc.finish())
        .map(|buf| buf.len() as u64 * 8)
        .map_err(|e| Error::Compression { msg: e.to_string() })
}

/// Compressor-normalized score: −mean over samples of
/// (log f(y) + ℓ^zip(y)·ln 2), with ℓ^zip from [`zip_bits`]. The compressed
/// length stands in for the unknown −log q(y); bits are converted to nats
/// before mixing with log-probabilities. `signed` keeps the raw mean.
pub fn zip_normalized_score(samples: &[(&str, f64)]) -> Result<DivergenceValue> {
    if samples.is_empty() {
        return Err(Error::Empty {
            msg: "zip_normalized_score needs at least one sample".into(),
        });
    }
    let ln2 = std::f64::consts::LN_2;
    let mut terms = Vec::with_capacity(samples.len());
    for &(text, log_f) in samples {
        let bits = zip_bits(text)? as f64;
        terms.push(-(log_f + bits * ln2));
    }
    let m = mean(&terms);
    let mut out = DivergenceValue::new(DivergenceFamily::ZipNorm, m.abs());
    out.signed = Some(m);
    if terms.len() >= 2 {
        out.std_error = Some(std_error_of_mean(&terms));
    }
    Ok(out)
}

// ============================================================================
// Classification-risk chain
// ============================================================================

/// Monte Carlo report for the risk-bound chain −D_∞ ≤ −D_1 ≤ R^L.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RiskChainReport {
    /// −max over sampled critics of |mean_q f − mean_p f| (D_∞ proxy).
    pub neg_d_inf: f64,
    /// −mean over sampled critics of |mean_q f − mean_p f|.
    pub neg_d1: f64,
    /// Mean expected risk of the critic-derived classifiers.
    pub risk: f64,
    pub d1_std_error: f64,
    pub risk_std_error: f64,
    /// Chain held within 3 combined standard errors.
    pub chain_holds: bool,
    pub n_critics: usize,
}

/// Estimates the classification-risk chain with linear losses
/// L_{+1}(α) = −α/ε and L_{−1}(α) = α/(1−ε), where class +1 (prior ε) draws
/// from P and class −1 (prior 1−ε) draws from Q. With these losses the
/// per-critic expected risk collapses to mean_q f − mean_p f, so
/// −max|gap| ≤ −mean|gap| ≤ mean gap holds draw by draw.
///
/// `sample_critic` receives `[samples_p..., samples_q...]` concatenated.
pub fn classification_risk_check<F>(
    epsilon: f64,
    samples_p: &[f64],
    samples_q: &[f64],
    n_critics: usize,
    mut sample_critic: F,
) -> Result<RiskChainReport>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::OutOfRange {
            msg: format!("epsilon is {epsilon}, want in (0, 1)"),
        });
    }
    if n_critics < 1 {
        return Err(Error::Invalid {
            field: "n_critics".into(),
            msg: "is 0, want >= 1".into(),
        });
    }
    if samples_p.is_empty() || samples_q.is_empty() {
        return Err(Error::Empty {
            msg: "classification_risk_check needs non-empty sample sets".into(),
        });
    }
    let mut points = Vec::with_capacity(samples_p.len() + samples_q.len());
    points.extend_from_slice(samples_p);
    points.extend_from_slice(samples_q);
    let np = samples_p.len();

    let mut abs_gaps = Vec::with_capacity(n_critics);
    let mut risks = Vec::with_capacity(n_critics);
    for _ in 0..n_critics {
        let f = sample_critic(&points)?;
        if f.len() != points.len() {
            return Err(Error::Shape {
                msg: format!("critic returned {} values, want {}", f.len(), points.len()),
            });
        }
        let mp = mean(&f[..np]);
        let mq = mean(&f[np..]);
        abs_gaps.push((mq - mp).abs());
        // Explicit loss evaluation; ε cancels analytically.
        let loss_pos = -mp / epsilon;
        let loss_neg = mq / (1.0 - epsilon);
        risks.push(epsilon * loss_pos + (1.0 - epsilon) * loss_neg);
    }
    let neg_d_inf = -abs_gaps.iter().fold(0.0f64, |m, &g| m.max(g));
    let neg_d1 = -mean(&abs_gaps);
    let risk = mean(&risks);
    let d1_se = if n_critics >= 2 {
        std_error_of_mean(&abs_gaps)
    } else {
        0.0
    };
    let risk_se = if n_critics >= 2 {
        std_error_of_mean(&risks)
    } else {
        0.0
    };
    let combined = 3.0 * (d1_se * d1_se + risk_se * risk_se).sqrt();
    let chain_holds = neg_d_inf <= neg_d1 + 1e-12 && neg_d1 <= risk + combined + 1e-12;
    Ok(RiskChainReport {
        neg_d_inf,
        neg_d1,
        risk,
        d1_std_error: d1_se,
        risk_std_error: risk_se,
        chain_holds,
        n_critics,
    })
}

// ============================================================================
// tests
// ============================================================================
