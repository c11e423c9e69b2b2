//! Random critic processes over finite supports: identity/log/probit links,
//! their effective second-moment kernels C(x, y) = E[f(x)f(y)], closed-form
//! critic-averaged distances for Gaussian critic gaps, critic sampling for
//! Monte Carlo validation, and language-model noise-process distances.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::divergence::{d2_exact_slices, DivergenceFamily, DivergenceValue};
use crate::special::{bivariate_normal_cdf, kummer_m_log, log_gamma, normal_cdf};
use crate::{rng, Error, Result};

/// Pointwise transform applied to a Gaussian process draw g to form the
/// critic f: identity f = g, log f = exp(g), probit f = Φ(g).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Link {
    Identity,
    Log,
    Probit,
}

/// A critic distribution on a finite support: the transformed process
/// link(g) with g Gaussian, tabulated mean m and covariance k.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticProcess {
    mean: Vec<f64>,
    kernel: Vec<Vec<f64>>,
    link: Link,
}

/// Cholesky factor of a symmetric PSD matrix; fails on a non-positive pivot.
fn cholesky(mat: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = mat.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = mat[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if !(s > 0.0) {
                    return None;
                }
                l[i][j] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Some(l)
}

/// Factors kernel + jitter·I, starting jitter at 1e-10·trace/n and
/// escalating ×10 up to 3 times after the jitterless attempt.
fn cholesky_with_jitter(kernel: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    if let Some(l) = cholesky(kernel) {
        return Ok(l);
    }
    let n = kernel.len();
    let trace: f64 = (0..n).map(|i| kernel[i][i]).sum();
    let base = 1e-10 * trace.abs().max(1e-300) / n as f64;
    let mut jitter = base;
    for _ in 0..=3 {
        let mut bumped = kernel.to_vec();
        for (i, row) in bumped.iter_mut().enumerate() {
            row[i] += jitter;
        }
        if let Some(l) = cholesky(&bumped) {
            return Ok(l);
        }
        jitter *= 10.0;
    }
    Err(Error::Factorization {
        msg: format!(
            "kernel of size {n} (trace {trace:.6e}) not factorizable up to jitter {:.3e}",
            jitter / 10.0
        ),
    })
}

impl CriticProcess {
    /// Validates symmetry and positive semidefiniteness (within a small
    /// diagonal tolerance) of the tabulated covariance.
    pub fn new(mean: Vec<f64>, kernel: Vec<Vec<f64>>, link: Link) -> Result<Self> {
        let n = mean.len();
        if kernel.len() != n || kernel.iter().any(|r| r.len() != n) {
            return Err(Error::Shape {
                msg: format!("kernel shape does not match mean length {n}"),
            });
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (kernel[i][j], kernel[j][i]);
                if (a - b).abs() > 1e-9 * (1.0 + a.abs().max(b.abs())) {
                    return Err(Error::AsymmetricKernel { i, j, a, b });
                }
            }
        }
        // PSD within a −1e-8-scaled eigenvalue tolerance: the shifted matrix
        // must factor.
        let max_diag = (0..n).map(|i| kernel[i][i].abs()).fold(0.0f64, f64::max);
        let tol = 1e-8 * (1.0 + max_diag);
        let mut shifted = kernel.clone();
        for (i, row) in shifted.iter_mut().enumerate() {
            row[i] += tol;
        }
        if cholesky(&shifted).is_none() {
            return Err(Error::NotPsd { bound: -tol });
        }
        Ok(Self { mean, kernel, link })
    }

    /// Zero-mean process with the given covariance.
    pub fn zero_mean(kernel: Vec<Vec<f64>>, link: Link) -> Result<Self> {
        let n = kernel.len();
        Self::new(vec![0.0; n], kernel, link)
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn kernel(&self) -> &[Vec<f64>] {
        &self.kernel
    }

    pub fn link(&self) -> Link {
        self.link
    }

    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }
}

// ============================================================================
// Effective kernels
// ============================================================================

/// Second-moment table C(x, y) = E[f(x)f(y)] of the critic process on its
/// support:
/// - identity: C = k(x,y) + m(x)m(y)
/// - log:      C = μ(x)μ(y)·exp(k(x,y)) with μ(x) = exp(m(x) + k(x,x)/2)
/// - probit:   C = Φ₂(m(x)/s(x), m(y)/s(y); k(x,y)/(s(x)s(y))) with
///   s(x) = sqrt(1 + k(x,x))
///
/// Built from the upper triangle and mirrored, so the result is exactly
/// symmetric.
pub fn effective_kernel(proc: &CriticProcess) -> Result<Vec<Vec<f64>>> {
    let n = proc.len();
    let m = &proc.mean;
    let k = &proc.kernel;
    let mut c = vec![vec![0.0; n]; n];
    match proc.link {
        Link::Identity => {
            for i in 0..n {
                for j in i..n {
                    c[i][j] = k[i][j] + m[i] * m[j];
                    c[j][i] = c[i][j];
                }
            }
        }
        Link::Log => {
            let mu: Vec<f64> = (0..n).map(|i| (m[i] + 0.5 * k[i][i]).exp()).collect();
            for i in 0..n {
                for j in i..n {
                    c[i][j] = mu[i] * mu[j] * k[i][j].exp();
                    c[j][i] = c[i][j];
                }
            }
        }
        Link::Probit => {
            let s: Vec<f64> = (0..n).map(|i| (1.0 + k[i][i]).sqrt()).collect();
            for i in 0..n {
                for j in i..n {
                    // Cauchy-Schwarz keeps |ρ| < 1; clamp residual roundoff.
                    let rho = (k[i][j] / (s[i] * s[j])).clamp(-1.0, 1.0);
                    c[i][j] = bivariate_normal_cdf(m[i] / s[i], m[j] / s[j], rho)?;
                    c[j][i] = c[i][j];
                }
            }
        }
    }
    Ok(c)
}

// ============================================================================
// Gaussian-gap closed forms
// ============================================================================

/// Closed-form critic-averaged distance when the per-critic gap
/// Q(f) − P(f) is Gaussian with standard deviation `mmd` and mean
/// `mean_diff`: the p-th root of the p-th absolute moment,
///
/// D_p^p = σ^p · 2^{p/2} · Γ((1+p)/2)/√π · M(−p/2, ½, −μ²/(2σ²)).
///
/// Evaluated in log space; σ = 0 degenerates to |μ|. Requires p ≥ 1, σ ≥ 0.
pub fn dp_gaussian_closed_form(exponent: f64, mmd: f64, mean_diff: f64) -> Result<DivergenceValue> {
    if !(exponent >= 1.0) {
        return Err(Error::OutOfRange {
            msg: format!("exponent is {exponent}, want >= 1"),
        });
    }
    if !(mmd >= 0.0) || !mmd.is_finite() || !mean_diff.is_finite() {
        return Err(Error::OutOfRange {
            msg: format!("mmd {mmd}, mean_diff {mean_diff}: want finite, mmd >= 0"),
        });
    }
    let p = exponent;
    let value = if mmd == 0.0 {
        mean_diff.abs()
    } else {
        let z = -(mean_diff * mean_diff) / (2.0 * mmd * mmd);
        let ln_m = kummer_m_log(-p / 2.0, 0.5, z)?;
        let ln_dp_p = p * mmd.ln() + 0.5 * p * std::f64::consts::LN_2
            + log_gamma(0.5 * (1.0 + p))
            - 0.5 * std::f64::consts::PI.ln()
            + ln_m;
        (ln_dp_p / p).exp()
    };
    let family = if p == 1.0 {
        DivergenceFamily::D1
    } else if p == 2.0 {
        DivergenceFamily::D2
    } else {
        DivergenceFamily::Dp
    };
    let mut out = DivergenceValue {
        value,
        family,
        std_error: None,
        signed: None,
        squared: None,
        incomparable: false,
    };
    if family == DivergenceFamily::D2 {
        out.squared = Some(value * value);
    }
    Ok(out)
}

/// Direct p = 1 form (mean of a folded Gaussian):
/// σ·sqrt(2/π)·exp(−μ²/(2σ²)) + μ·(2Φ(μ/σ) − 1); σ = 0 → |μ|.
pub fn d1_gaussian_closed_form(mmd: f64, mean_diff: f64) -> f64 {
    if mmd == 0.0 {
        return mean_diff.abs();
    }
    let r = mean_diff / mmd;
    mmd * (2.0 / std::f64::consts::PI).sqrt() * (-0.5 * r * r).exp()
        + mean_diff * (2.0 * normal_cdf(r) - 1.0)
}

/// Direct p = 2 form: sqrt(mmd² + mean_diff²).
pub fn d2_gaussian_closed_form(mmd: f64, mean_diff: f64) -> f64 {
    mmd.hypot(mean_diff)
}

/// Evaluates sqrt(e/(p+1))·D_p for each p with zero mean gap; the sequence
/// approaches `mmd` from below as p grows.
pub fn dp_limit_check(mmd: f64, p_sequence: &[f64]) -> Result<Vec<f64>> {
    let e = std::f64::consts::E;
    p_sequence
        .iter()
        .map(|&p| {
            let dp = dp_gaussian_closed_form(p, mmd, 0.0)?.value;
            Ok((e / (p + 1.0)).sqrt() * dp)
        })
        .collect()
}

// ============================================================================
// Critic sampling
// ============================================================================

/// Holds the factored covariance so repeated draws skip refactorization.
pub struct CriticSampler<'a> {
    proc: &'a CriticProcess,
    chol: Vec<Vec<f64>>,
}

impl<'a> CriticSampler<'a> {
    pub fn new(proc: &'a CriticProcess) -> Result<Self> {
        if proc.is_empty() {
            return Err(Error::Empty {
                msg: "critic process needs at least one support point".into(),
            });
        }
        let chol = cholesky_with_jitter(&proc.kernel)?;
        Ok(Self { proc, chol })
    }

    /// One critic draw: f = link(m + L·z), z standard normal.
    pub fn draw<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let n = self.proc.len();
        let mut z = vec![0.0; n];
        rng::fill_standard_normal(rng, &mut z);
        let mut f = Vec::with_capacity(n);
        for i in 0..n {
            let mut g = self.proc.mean[i];
            for j in 0..=i {
                g += self.chol[i][j] * z[j];
            }
            f.push(match self.proc.link {
                Link::Identity => g,
                Link::Log => g.exp(),
                Link::Probit => normal_cdf(g),
            });
        }
        f
    }
}

/// Single reproducible critic draw for a root seed.
pub fn sample_critic(proc: &CriticProcess, seed: u64) -> Result<Vec<f64>> {
    let sampler = CriticSampler::new(proc)?;
    let mut rng = rng::stream(seed, 0);
    Ok(sampler.draw(&mut rng))
}

/// `n` reproducible critic draws; draw i uses the stream derived from
/// (seed, i), so the result is independent of thread scheduling.
pub fn sample_critics(proc: &CriticProcess, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let sampler = CriticSampler::new(proc)?;
    Ok((0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(seed, i as u64);
            sampler.draw(&mut rng)
        })
        .collect())
}

// ============================================================================
// Language-model noise-process distances
// ============================================================================

/// max + ln(mean exp(x − max)); NEG_INFINITY on all-empty handled by caller.
fn log_mean_exp(xs: &[f64]) -> f64 {
    let hi = xs.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x));
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let s: f64 = xs.iter().map(|&x| (x - hi).exp()).sum();
    hi + (s / xs.len() as f64).ln()
}

fn nll_values<I: IntoIterator<Item = (f64, u64)>>(items: I) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (logprob, token_count) in items {
        if token_count < 1 {
            return Err(Error::Invalid {
                field: "token_count".into(),
                msg: format!("is {token_count}, want >= 1"),
            });
        }
        out.push(-logprob / token_count as f64);
    }
    if out.is_empty() {
        return Err(Error::Empty {
            msg: "noise-process distance needs non-empty sample sets".into(),
        });
    }
    Ok(out)
}

/// Noise-process distance between two candidate pools scored by a language
/// model: e · |mean_q exp(−logprob/token_count) − mean_p exp(...)|.
///
/// Intermediate means are kept in log space; only the final difference is
/// exponentiated. Items are (logprob, token_count) pairs.
pub fn lm_noise_d2<I, J>(samples_q: I, samples_p: J) -> Result<f64>
where
    I: IntoIterator<Item = (f64, u64)>,
    J: IntoIterator<Item = (f64, u64)>,
{
    let a = log_mean_exp(&nll_values(samples_q)?);
    let b = log_mean_exp(&nll_values(samples_p)?);
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == hi {
        return Ok(0.0);
    }
    // ln|e^a − e^b| = hi + ln(1 − e^{lo−hi}); the leading e adds 1 in logs.
    let ln_diff = hi + (-((lo - hi).exp())).ln_1p();
    Ok((1.0 + ln_diff).exp())
}

/// Exact finite-support D_2 for the same noise process, keeping the
/// diagonal second-moment terms that duplicate texts contribute. Candidates
/// with identical (logprob, token_count) pairs are treated as the same text.
pub fn lm_noise_d2_exact<I, J>(samples_q: I, samples_p: J) -> Result<DivergenceValue>
where
    I: IntoIterator<Item = (f64, u64)>,
    J: IntoIterator<Item = (f64, u64)>,
{
    let nq = nll_values(samples_q)?;
    let np = nll_values(samples_p)?;
    // Union support of distinct per-token NLL atoms, deterministic order.
    let mut atoms: Vec<f64> = Vec::new();
    for &v in nq.iter().chain(&np) {
        if !atoms.contains(&v) {
            atoms.push(v);
        }
    }
    atoms.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let weight = |samples: &[f64]| -> Vec<f64> {
        atoms
            .iter()
            .map(|&a| samples.iter().filter(|&&v| v == a).count() as f64 / samples.len() as f64)
            .collect()
    };
    let q = weight(&nq);
    let p = weight(&np);
    // Unit-variance log-link critic on text atoms: m = NLL, covariance the
    // indicator, so C(x,y) = exp(m_x + m_y + 1) off-diagonal and
    // exp(2m_x + 2) on the diagonal.
    let n = atoms.len();
    let mut c = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let boost = if i == j { 1.0 } else { 0.0 };
            c[i][j] = (atoms[i] + atoms[j] + 1.0 + boost).exp();
        }
    }
    d2_exact_slices(&p, &q, &c)
}

// ============================================================================
// tests
// ============================================================================
