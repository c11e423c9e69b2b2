//! Probability objects and dataset records, plus ingestion of the external
//! file formats.
//!
//! Synthetic-instance objects ([`FiniteDistribution`], [`JointInstance`],
//! [`ConditionalSystem`], [`DistortionTable`]) validate their invariants at
//! construction with a 1e-9 sum-to-one tolerance; file ingestion relaxes the
//! tolerance to 1e-6 because files may carry rounded values. All types are
//! immutable after construction and safe to share across threads.
//!
//! File formats (all UTF-8):
//!
//! - **Segment file** (`*.jsonl`): first line is a header object
//!   `{"accuracy_orientation": "higher"|"lower"}`; each following line is a
//!   segment `{"segment_id", "source", "reference", "candidates": [{"text",
//!   "system", "accuracy", "logprob", "token_count"}]}`. Accuracy is
//!   sign-normalized to higher-is-better at load time using the header.
//! - **Instance file** (`*.json`): one object with `x_labels`, `y_labels`,
//!   `joint` (row-major, indexed `[x][y]`), `delta` (indexed
//!   `[x][y_ref][y_cand]`), `r_y` (reference distribution over `y_labels`),
//!   and an optional `kernel` spec for kernel-based divergences.
//! - **Monolingual stats file**: either JSONL lines of `{"text", "logprob",
//!   "token_count"}` or a single summary object `{"mean_lpp", "n_texts"}`.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::io::BufRead;
use std::path::Path;

use crate::{Error, Result};

/// Sum-to-one tolerance for programmatically built objects.
pub const SYNTHETIC_TOL: f64 = 1e-9;
/// Sum-to-one tolerance for objects read from files.
pub const INGEST_TOL: f64 = 1e-6;

fn check_simplex(probs: &[f64], tol: f64, what: &str) -> Result<()> {
    for (i, &p) in probs.iter().enumerate() {
        if !(p >= 0.0) || !p.is_finite() {
            return Err(Error::Invalid {
                field: what.to_string(),
                msg: format!("entry {i} is {p}, want a finite value >= 0"),
            });
        }
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > tol {
        return Err(Error::Normalization {
            sum,
            deviation: sum - 1.0,
        });
    }
    Ok(())
}

fn check_unique(labels: &[String], what: &str) -> Result<()> {
    let mut seen = HashSet::new();
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::Invalid {
                field: what.to_string(),
                msg: format!("duplicate label {l:?}"),
            });
        }
    }
    Ok(())
}

// ============================================================================
// FiniteDistribution
// ============================================================================

/// A probability distribution on a finite, ordered, uniquely-labelled support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution")]
pub struct FiniteDistribution {
    labels: Vec<String>,
    probs: Vec<f64>,
}

#[derive(Deserialize)]
struct RawDistribution {
    labels: Vec<String>,
    probs: Vec<f64>,
}

impl TryFrom<RawDistribution> for FiniteDistribution {
    type Error = Error;
    fn try_from(raw: RawDistribution) -> Result<Self> {
        FiniteDistribution::with_tol(raw.labels, raw.probs, INGEST_TOL)
    }
}

impl FiniteDistribution {
    /// Validates and builds a distribution (1e-9 sum tolerance).
    pub fn new(labels: Vec<String>, probs: Vec<f64>) -> Result<Self> {
        Self::with_tol(labels, probs, SYNTHETIC_TOL)
    }

    /// Validates and builds a distribution with an explicit sum tolerance.
    pub fn with_tol(labels: Vec<String>, probs: Vec<f64>, tol: f64) -> Result<Self> {
        if labels.len() != probs.len() {
            return Err(Error::Shape {
                msg: format!("{} labels vs {} probs", labels.len(), probs.len()),
            });
        }
        if labels.is_empty() {
            return Err(Error::Empty {
                msg: "distribution needs at least one label".into(),
            });
        }
        check_unique(&labels, "labels")?;
        check_simplex(&probs, tol, "probs")?;
        Ok(Self { labels, probs })
    }

    /// Uniform distribution over generated labels `"0" .. "n-1"`.
    pub fn uniform(n: usize) -> Self {
        let labels = (0..n).map(|i| i.to_string()).collect();
        let probs = vec![1.0 / n as f64; n];
        Self { labels, probs }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Probability of a label, or None if the label is not in the support.
    pub fn get(&self, label: &str) -> Option<f64> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.probs[i])
    }

    /// Errors unless both distributions share the same ordered support.
    pub fn check_same_support(&self, other: &Self) -> Result<()> {
        if self.labels != other.labels {
            return Err(Error::SupportMismatch {
                msg: format!("{:?} vs {:?}", self.labels, other.labels),
            });
        }
        Ok(())
    }
}

// ============================================================================
// JointInstance
// ============================================================================

/// A joint distribution over (x, y) pairs on finite label sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawJoint")]
pub struct JointInstance {
    x_labels: Vec<String>,
    y_labels: Vec<String>,
    joint: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct RawJoint {
    x_labels: Vec<String>,
    y_labels: Vec<String>,
    joint: Vec<Vec<f64>>,
}

impl TryFrom<RawJoint> for JointInstance {
    type Error = Error;
    fn try_from(raw: RawJoint) -> Result<Self> {
        JointInstance::with_tol(raw.x_labels, raw.y_labels, raw.joint, INGEST_TOL)
    }
}

impl JointInstance {
    pub fn new(x_labels: Vec<String>, y_labels: Vec<String>, joint: Vec<Vec<f64>>) -> Result<Self> {
        Self::with_tol(x_labels, y_labels, joint, SYNTHETIC_TOL)
    }

    pub fn with_tol(
        x_labels: Vec<String>,
        y_labels: Vec<String>,
        joint: Vec<Vec<f64>>,
        tol: f64,
    ) -> Result<Self> {
        check_unique(&x_labels, "x_labels")?;
        check_unique(&y_labels, "y_labels")?;
        if joint.len() != x_labels.len() {
            return Err(Error::Shape {
                msg: format!("joint has {} rows, want {}", joint.len(), x_labels.len()),
            });
        }
        let mut sum = 0.0;
        for (xi, row) in joint.iter().enumerate() {
            if row.len() != y_labels.len() {
                return Err(Error::Shape {
                    msg: format!("joint row {xi} has {} cols, want {}", row.len(), y_labels.len()),
                });
            }
            for (yi, &v) in row.iter().enumerate() {
                if !(v >= 0.0) || !v.is_finite() {
                    return Err(Error::Invalid {
                        field: "joint".into(),
                        msg: format!("entry [{xi}][{yi}] is {v}, want a finite value >= 0"),
                    });
                }
                sum += v;
            }
        }
        if (sum - 1.0).abs() > tol {
            return Err(Error::Normalization {
                sum,
                deviation: sum - 1.0,
            });
        }
        Ok(Self {
            x_labels,
            y_labels,
            joint,
        })
    }

    pub fn x_labels(&self) -> &[String] {
        &self.x_labels
    }

    pub fn y_labels(&self) -> &[String] {
        &self.y_labels
    }

    pub fn nx(&self) -> usize {
        self.x_labels.len()
    }

    pub fn ny(&self) -> usize {
        self.y_labels.len()
    }

    /// Joint mass P(x, y), indexed by position.
    pub fn mass(&self, xi: usize, yi: usize) -> f64 {
        self.joint[xi][yi]
    }

    pub fn joint(&self) -> &[Vec<f64>] {
        &self.joint
    }

    /// Input marginal P_x as raw weights (valid simplex by construction).
    pub fn p_x(&self) -> Vec<f64> {
        self.joint.iter().map(|row| row.iter().sum()).collect()
    }

    /// Output marginal P_y.
    pub fn p_y(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.ny()];
        for row in &self.joint {
            for (yi, &v) in row.iter().enumerate() {
                out[yi] += v;
            }
        }
        out
    }

    /// Conditional row P(y | x = xi), or None when P_x(xi) = 0.
    pub fn y_given_x(&self, xi: usize) -> Option<Vec<f64>> {
        let px: f64 = self.joint[xi].iter().sum();
        if px <= 0.0 {
            return None;
        }
        Some(self.joint[xi].iter().map(|&v| v / px).collect())
    }

    /// Output marginal as a labelled distribution.
    pub fn p_y_distribution(&self) -> FiniteDistribution {
        FiniteDistribution {
            labels: self.y_labels.clone(),
            probs: self.p_y(),
        }
    }
}

// ============================================================================
// ConditionalSystem
// ============================================================================

/// A translation system: one distribution over y per input x.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSystem")]
pub struct ConditionalSystem {
    x_labels: Vec<String>,
    y_labels: Vec<String>,
    rows: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct RawSystem {
    x_labels: Vec<String>,
    y_labels: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl TryFrom<RawSystem> for ConditionalSystem {
    type Error = Error;
    fn try_from(raw: RawSystem) -> Result<Self> {
        ConditionalSystem::with_tol(raw.x_labels, raw.y_labels, raw.rows, INGEST_TOL)
    }
}

impl ConditionalSystem {
    pub fn new(x_labels: Vec<String>, y_labels: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::with_tol(x_labels, y_labels, rows, SYNTHETIC_TOL)
    }

    pub fn with_tol(
        x_labels: Vec<String>,
        y_labels: Vec<String>,
        rows: Vec<Vec<f64>>,
        tol: f64,
    ) -> Result<Self> {
        check_unique(&x_labels, "x_labels")?;
        check_unique(&y_labels, "y_labels")?;
        if rows.len() != x_labels.len() {
            return Err(Error::Shape {
                msg: format!("{} rows, want {}", rows.len(), x_labels.len()),
            });
        }
        for (xi, row) in rows.iter().enumerate() {
            if row.len() != y_labels.len() {
                return Err(Error::Shape {
                    msg: format!("row {xi} has {} cols, want {}", row.len(), y_labels.len()),
                });
            }
            check_simplex(row, tol, &format!("row {xi}"))?;
        }
        Ok(Self {
            x_labels,
            y_labels,
            rows,
        })
    }

    pub fn x_labels(&self) -> &[String] {
        &self.x_labels
    }

    pub fn y_labels(&self) -> &[String] {
        &self.y_labels
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Errors unless the system's label sets match the instance's.
    pub fn check_compatible(&self, inst: &JointInstance) -> Result<()> {
        if self.x_labels != inst.x_labels || self.y_labels != inst.y_labels {
            return Err(Error::Shape {
                msg: "system label sets do not match the instance".into(),
            });
        }
        Ok(())
    }
}

// ============================================================================
// DistortionTable
// ============================================================================

/// Distortion values Δ[x][y_ref][y_cand]; finite, hence bounded below on the
/// finite index set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDelta")]
pub struct DistortionTable {
    values: Vec<Vec<Vec<f64>>>,
}

#[derive(Deserialize)]
struct RawDelta {
    values: Vec<Vec<Vec<f64>>>,
}

impl TryFrom<RawDelta> for DistortionTable {
    type Error = Error;
    fn try_from(raw: RawDelta) -> Result<Self> {
        DistortionTable::new(raw.values)
    }
}

impl DistortionTable {
    pub fn new(values: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        for (xi, per_ref) in values.iter().enumerate() {
            for (ri, row) in per_ref.iter().enumerate() {
                for (ci, &v) in row.iter().enumerate() {
                    if !v.is_finite() {
                        return Err(Error::Invalid {
                            field: "delta".into(),
                            msg: format!("entry [{xi}][{ri}][{ci}] is {v}, want finite"),
                        });
                    }
                }
            }
        }
        Ok(Self { values })
    }

    /// 0-1 exact-match distortion: Δ = 1[y_cand ≠ y_ref], shared across x.
    pub fn exact_match(nx: usize, ny: usize) -> Self {
        let per_x: Vec<Vec<f64>> = (0..ny)
            .map(|r| (0..ny).map(|c| if r == c { 0.0 } else { 1.0 }).collect())
            .collect();
        Self {
            values: vec![per_x; nx],
        }
    }

    pub fn get(&self, xi: usize, y_ref: usize, y_cand: usize) -> f64 {
        self.values[xi][y_ref][y_cand]
    }

    pub fn values(&self) -> &[Vec<Vec<f64>>] {
        &self.values
    }

    /// Errors unless the table shape is (nx, ny, ny).
    pub fn check_shape(&self, nx: usize, ny: usize) -> Result<()> {
        if self.values.len() != nx
            || self
                .values
                .iter()
                .any(|p| p.len() != ny || p.iter().any(|r| r.len() != ny))
        {
            return Err(Error::Shape {
                msg: format!("delta table shape does not match ({nx}, {ny}, {ny})"),
            });
        }
        Ok(())
    }
}

// ============================================================================
// Candidate pools
// ============================================================================

/// One scored candidate translation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateRecord {
    pub text: String,
    #[serde(rename = "system")]
    pub system_id: String,
    /// Higher is better (negated distortion); sign-normalized at load.
    pub accuracy: f64,
    /// Sequence log-probability in nats; ≤ 0.
    pub logprob: f64,
    /// Token count |y|; ≥ 1.
    pub token_count: u64,
}

impl CandidateRecord {
    /// Per-token negative log-probability in nats.
    pub fn nll_per_token(&self) -> f64 {
        -self.logprob / self.token_count as f64
    }

    fn validate(&self) -> std::result::Result<(), String> {
        if self.token_count < 1 {
            return Err(format!("token_count is {}, want >= 1", self.token_count));
        }
        if !(self.logprob <= 0.0) {
            return Err(format!("logprob is {}, want <= 0", self.logprob));
        }
        if !self.accuracy.is_finite() {
            return Err(format!("accuracy is {}, want finite", self.accuracy));
        }
        Ok(())
    }
}

/// A source sentence with its reference and candidate pool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentRecord {
    pub segment_id: String,
    pub source: String,
    pub reference: String,
    pub candidates: Vec<CandidateRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AccuracyOrientation {
    Higher,
    Lower,
}

#[derive(Deserialize)]
struct SegmentHeader {
    accuracy_orientation: AccuracyOrientation,
}

/// Loads a segment file: header line, then one segment per line.
///
/// All invariants are validated; failures report the 1-based line number and
/// the offending field. When the header declares `"lower"`, accuracy values
/// are negated so that higher is better everywhere downstream.
pub fn load_segments(path: impl AsRef<Path>) -> Result<Vec<SegmentRecord>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let reader = std::io::BufReader::new(file);
    let mut lines = reader.lines().enumerate();

    let header: SegmentHeader = match lines.next() {
        None => {
            return Err(Error::Parse {
                line: 1,
                msg: "empty file, want a header line".into(),
            })
        }
        Some((_, line)) => {
            let line = line.map_err(|source| Error::Io {
                path: path.display().to_string(),
                source,
            })?;
            serde_json::from_str(&line).map_err(|e| Error::Parse {
                line: 1,
                msg: format!("bad header (want {{\"accuracy_orientation\": \"higher\"|\"lower\"}}): {e}"),
            })?
        }
    };

    let mut out = Vec::new();
    let mut seen_ids = HashSet::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line.map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let mut seg: SegmentRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: line_no,
            msg: e.to_string(),
        })?;
        if seg.candidates.is_empty() {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("segment {:?}: empty candidate list", seg.segment_id),
            });
        }
        for cand in &mut seg.candidates {
            if header.accuracy_orientation == AccuracyOrientation::Lower {
                cand.accuracy = -cand.accuracy;
            }
            cand.validate().map_err(|msg| Error::Parse {
                line: line_no,
                msg: format!("candidate {:?}: {msg}", cand.system_id),
            })?;
        }
        if !seen_ids.insert(seg.segment_id.clone()) {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("duplicate segment_id {:?}", seg.segment_id),
            });
        }
        out.push(seg);
    }
    Ok(out)
}

// ============================================================================
// Instance files
// ============================================================================

/// Kernel choice carried by instance files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "lowercase")]
pub enum KernelSpec {
    /// k(i, j) = 1[i = j]
    Indicator,
    /// k(i, j) = c
    Constant { c: f64 },
    /// k(i, j) = exp(−gamma·(points[i] − points[j])²) over numeric points
    /// (defaults to the support index when points are omitted)
    Rbf {
        gamma: f64,
        #[serde(default)]
        points: Option<Vec<f64>>,
    },
    /// Explicit symmetric table over the support
    Table { values: Vec<Vec<f64>> },
}

impl KernelSpec {
    /// Materializes the kernel as a dense table over a support of size n.
    pub fn table(&self, n: usize) -> Result<Vec<Vec<f64>>> {
        match self {
            KernelSpec::Indicator => Ok((0..n)
                .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect()),
            KernelSpec::Constant { c } => Ok(vec![vec![*c; n]; n]),
            KernelSpec::Rbf { gamma, points } => {
                let pts: Vec<f64> = match points {
                    Some(p) => {
                        if p.len() != n {
                            return Err(Error::Shape {
                                msg: format!("{} rbf points, want {n}", p.len()),
                            });
                        }
                        p.clone()
                    }
                    None => (0..n).map(|i| i as f64).collect(),
                };
                Ok(pts
                    .iter()
                    .map(|&a| {
                        pts.iter()
                            .map(|&b| (-gamma * (a - b) * (a - b)).exp())
                            .collect()
                    })
                    .collect())
            }
            KernelSpec::Table { values } => {
                if values.len() != n || values.iter().any(|r| r.len() != n) {
                    return Err(Error::Shape {
                        msg: format!("kernel table shape does not match support size {n}"),
                    });
                }
                Ok(values.clone())
            }
        }
    }
}

#[derive(Deserialize)]
struct RawInstanceFile {
    x_labels: Vec<String>,
    y_labels: Vec<String>,
    joint: Vec<Vec<f64>>,
    delta: Vec<Vec<Vec<f64>>>,
    r_y: Vec<f64>,
    #[serde(default)]
    kernel: Option<KernelSpec>,
}

/// Everything an instance file carries.
#[derive(Debug, Clone)]
pub struct InstanceSpec {
    pub instance: JointInstance,
    pub delta: DistortionTable,
    pub r_y: FiniteDistribution,
    pub kernel: Option<KernelSpec>,
}

/// Loads an instance file (joint, distortion table, reference marginal,
/// optional kernel spec), validating shapes against the label sets.
pub fn load_instance(path: impl AsRef<Path>) -> Result<InstanceSpec> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let raw: RawInstanceFile = serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: e.line(),
        msg: e.to_string(),
    })?;
    let instance = JointInstance::with_tol(raw.x_labels, raw.y_labels, raw.joint, INGEST_TOL)?;
    let delta = DistortionTable::new(raw.delta)?;
    delta.check_shape(instance.nx(), instance.ny())?;
    let r_y = FiniteDistribution::with_tol(instance.y_labels().to_vec(), raw.r_y, INGEST_TOL)?;
    if let Some(k) = &raw.kernel {
        k.table(instance.ny())?;
    }
    Ok(InstanceSpec {
        instance,
        delta,
        r_y,
        kernel: raw.kernel,
    })
}

/// Loads an instance file and returns the (instance, distortion, reference)
/// triple, dropping any kernel spec.
pub fn load_joint_instance(
    path: impl AsRef<Path>,
) -> Result<(JointInstance, DistortionTable, FiniteDistribution)> {
    let spec = load_instance(path)?;
    Ok((spec.instance, spec.delta, spec.r_y))
}

// ============================================================================
// Corpus log-perplexity stats
// ============================================================================

/// Mean per-token negative log-probability over a corpus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorpusLppStats {
    pub mean_lpp: f64,
    pub n_texts: u64,
}

/// Averages −logprob/token_count over (logprob, token_count) records.
pub fn corpus_lpp<I>(items: I) -> Result<CorpusLppStats>
where
    I: IntoIterator<Item = (f64, u64)>,
{
    let mut sum = 0.0;
    let mut n = 0u64;
    for (logprob, token_count) in items {
        if token_count < 1 {
            return Err(Error::Invalid {
                field: "token_count".into(),
                msg: format!("is {token_count}, want >= 1"),
            });
        }
        sum += -logprob / token_count as f64;
        n += 1;
    }
    if n == 0 {
        return Err(Error::Empty {
            msg: "corpus_lpp needs at least one record".into(),
        });
    }
    let mean_lpp = sum / n as f64;
    if !mean_lpp.is_finite() {
        return Err(Error::Invalid {
            field: "mean_lpp".into(),
            msg: format!("is {mean_lpp}, want finite"),
        });
    }
    Ok(CorpusLppStats { mean_lpp, n_texts: n })
}

#[derive(Deserialize)]
struct ScoredTextLine {
    #[allow(dead_code)]
    #[serde(default)]
    text: String,
    logprob: f64,
    token_count: u64,
}

/// Loads monolingual reference stats: either a single `{"mean_lpp",
/// "n_texts"}` summary line or JSONL `{"text", "logprob", "token_count"}`
/// records to aggregate.
pub fn load_ref_stats(path: impl AsRef<Path>) -> Result<CorpusLppStats> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let first = text
        .lines()
        .find(|l| !l.trim().is_empty())
        .ok_or_else(|| Error::Empty {
            msg: "reference stats file has no records".into(),
        })?;
    if let Ok(summary) = serde_json::from_str::<CorpusLppStats>(first) {
        if summary.n_texts < 1 {
            return Err(Error::Invalid {
                field: "n_texts".into(),
                msg: "is 0, want >= 1".into(),
            });
        }
        if !summary.mean_lpp.is_finite() {
            return Err(Error::Invalid {
                field: "mean_lpp".into(),
                msg: format!("is {}, want finite", summary.mean_lpp),
            });
        }
        return Ok(summary);
    }
    let mut items = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: ScoredTextLine = serde_json::from_str(line).map_err(|e| Error::Parse {
            line: idx + 1,
            msg: e.to_string(),
        })?;
        items.push((rec.logprob, rec.token_count));
    }
    corpus_lpp(items)
}

// ============================================================================
// tests
// ============================================================================
