//! Oracle accuracy-naturalness sweeps over real candidate pools.
//!
//! Each segment offers a pool of scored candidates. The oracle at tradeoff
//! weight β picks the candidate maximizing accuracy + β·logprob/token_count
//! (equivalently accuracy − β·NLL/token); sweeping β traces the empirical
//! tradeoff curve along with per-system reference points. "lpp" throughout
//! means mean per-token negative log-probability (lower is more fluent).

use rayon::prelude::*;
use serde::Serialize;

use crate::data::{CandidateRecord, SegmentRecord};
use crate::{Error, Result};

/// One β slot of the swept curve: means over segments of the selected
/// candidates' accuracy and per-token NLL.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub beta: f64,
    pub accuracy: f64,
    pub mean_nll_per_token: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
    pub n_segments: usize,
}

/// Fixed-system reference point: per-system means across its candidates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemPoint {
    pub system_id: String,
    pub mean_accuracy: f64,
    pub mean_lpp: f64,
    pub lpp_distance_to_ref: f64,
    pub n_segments: usize,
}

fn check_beta(beta: f64) -> Result<()> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::OutOfRange {
            msg: format!("beta {beta}: want finite and >= 0"),
        });
    }
    Ok(())
}

/// Index of the oracle's pick at weight β: maximizes
/// accuracy + β·logprob/token_count, ties broken toward the lowest index.
pub fn oracle_select_index(candidates: &[CandidateRecord], beta: f64) -> Result<usize> {
    check_beta(beta)?;
    if candidates.is_empty() {
        return Err(Error::Empty {
            msg: "oracle selection needs at least one candidate".into(),
        });
    }
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (i, c) in candidates.iter().enumerate() {
        let score = c.accuracy + beta * c.logprob / c.token_count as f64;
        if score > best_score {
            best = i;
            best_score = score;
        }
    }
    Ok(best)
}

pub fn oracle_select(candidates: &[CandidateRecord], beta: f64) -> Result<&CandidateRecord> {
    Ok(&candidates[oracle_select_index(candidates, beta)?])
}

/// Sum with pairwise splitting: error grows O(log n) instead of O(n).
fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 32 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

fn pairwise_mean(values: &[f64]) -> f64 {
    pairwise_sum(values) / values.len() as f64
}

/// Default β grid: 50 log-spaced points on [1e-4, 1e4].
pub fn default_beta_grid() -> Vec<f64> {
    let n = 50;
    (0..n)
        .map(|i| 10f64.powf(-4.0 + 8.0 * i as f64 / (n - 1) as f64))
        .collect()
}

/// Sweeps the oracle over β, averaging the selected candidates per segment.
pub fn sweep_curve(segments: &[SegmentRecord], betas: &[f64]) -> Result<SweepResult> {
    if segments.is_empty() {
        return Err(Error::Empty {
            msg: "sweep needs at least one segment".into(),
        });
    }
    if betas.is_empty() {
        return Err(Error::Empty {
            msg: "sweep needs at least one beta".into(),
        });
    }
    for &b in betas {
        check_beta(b)?;
    }
    for seg in segments {
        if seg.candidates.is_empty() {
            return Err(Error::Empty {
                msg: format!("segment {:?} has no candidates", seg.segment_id),
            });
        }
    }
    let points: Vec<SweepPoint> = betas
        .par_iter()
        .map(|&beta| {
            let mut accs = Vec::with_capacity(segments.len());
            let mut nlls = Vec::with_capacity(segments.len());
            for seg in segments {
                let c = &seg.candidates[oracle_select_index(&seg.candidates, beta).unwrap()];
                accs.push(c.accuracy);
                nlls.push(c.nll_per_token());
            }
            SweepPoint {
                beta,
                accuracy: pairwise_mean(&accs),
                mean_nll_per_token: pairwise_mean(&nlls),
            }
        })
        .collect();
    Ok(SweepResult {
        points,
        n_segments: segments.len(),
    })
}

/// Per-system means across all segments where the system fielded a
/// candidate, with the distance of its mean per-token NLL to a monolingual
/// reference value. Sorted by system id.
pub fn system_points(segments: &[SegmentRecord], ref_mean_lpp: f64) -> Result<Vec<SystemPoint>> {
    if segments.is_empty() {
        return Err(Error::Empty {
            msg: "system summary needs at least one segment".into(),
        });
    }
    if !ref_mean_lpp.is_finite() {
        return Err(Error::Invalid {
            field: "ref_mean_lpp".into(),
            msg: format!("is {ref_mean_lpp}, want finite"),
        });
    }
    let mut by_system: std::collections::BTreeMap<&str, (Vec<f64>, Vec<f64>)> =
        std::collections::BTreeMap::new();
    for seg in segments {
        for c in &seg.candidates {
            let entry = by_system.entry(&c.system_id).or_default();
            entry.0.push(c.accuracy);
            entry.1.push(c.nll_per_token());
        }
    }
    Ok(by_system
        .into_iter()
        .map(|(id, (accs, lpps))| {
            let mean_lpp = pairwise_mean(&lpps);
            SystemPoint {
                system_id: id.to_string(),
                mean_accuracy: pairwise_mean(&accs),
                mean_lpp,
                lpp_distance_to_ref: (mean_lpp - ref_mean_lpp).abs(),
                n_segments: accs.len(),
            }
        })
        .collect())
}

/// One system whose scalarized value beats the swept curve at some β.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceViolation {
    pub system_id: String,
    pub beta: f64,
    /// system dual − curve dual at that β (positive means the curve lost).
    pub gap: f64,
}

/// Outcome of checking that the swept curve dominates every fixed system:
/// at each β the curve's accuracy − β·NLL must be at least every system's.
/// A per-segment maximum always beats a fixed column on the same segments,
/// so violations beyond tolerance indicate mismatched inputs; systems whose
/// segment coverage differs from the sweep are listed, since means over
/// different segment sets are not comparable.
#[derive(Debug, Clone, Serialize)]
pub struct DominanceReport {
    pub dominates: bool,
    /// Worst violation per offending system, sorted by system id.
    pub violations: Vec<DominanceViolation>,
    /// Systems aggregated over a different segment count than the curve.
    pub coverage_mismatch: Vec<String>,
}

pub fn dominance_check(
    curve: &SweepResult,
    systems: &[SystemPoint],
    tol: f64,
) -> DominanceReport {
    let mut violations: Vec<DominanceViolation> = Vec::new();
    let mut coverage = Vec::new();
    for sys in systems {
        if sys.n_segments != curve.n_segments {
            coverage.push(sys.system_id.clone());
        }
        let mut worst: Option<DominanceViolation> = None;
        for pt in &curve.points {
            let curve_dual = pt.accuracy - pt.beta * pt.mean_nll_per_token;
            let system_dual = sys.mean_accuracy - pt.beta * sys.mean_lpp;
            let gap = system_dual - curve_dual;
            if gap > tol && worst.as_ref().is_none_or(|w| gap > w.gap) {
                worst = Some(DominanceViolation {
                    system_id: sys.system_id.clone(),
                    beta: pt.beta,
                    gap,
                });
            }
        }
        if let Some(v) = worst {
            violations.push(v);
        }
    }
    DominanceReport {
        dominates: violations.is_empty(),
        violations,
        coverage_mismatch: coverage,
    }
}

// ============================================================================
// tests
// ============================================================================
