//! MQM annotation scoring: severity-weighted error penalties split into
//! adequacy and fluency by an error-category taxonomy.
//!
//! A system's score on a dimension is the mean over observed
//! (doc, segment, rater) pairs of minus the summed penalty of that pair's
//! errors in the dimension. A pair is observed once any annotation row for
//! the system mentions it, so error-free pairs (severity `neutral` /
//! `no-error`) enter the denominator at zero penalty.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::BufRead;
use std::path::Path;

use crate::{Error, Result};

// ============================================================================
// Severity and weights
// ============================================================================

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Major,
    Minor,
    Neutral,
    NonTranslation,
}

impl Severity {
    /// Case-insensitive parse accepting the common spellings; `no-error`
    /// rows are neutral observations.
    pub fn parse(value: &str) -> Option<Self> {
        let v = value.trim().to_ascii_lowercase();
        match v.as_str() {
            "major" => Some(Severity::Major),
            "minor" => Some(Severity::Minor),
            "neutral" | "no-error" | "no_error" | "noerror" | "none" => Some(Severity::Neutral),
            "non-translation" | "non_translation" | "nontranslation" | "non-translation!" => {
                Some(Severity::NonTranslation)
            }
            _ => None,
        }
    }
}

impl std::fmt::Display for Severity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Severity::Major => "major",
            Severity::Minor => "minor",
            Severity::Neutral => "neutral",
            Severity::NonTranslation => "non_translation",
        };
        f.write_str(s)
    }
}

/// One (severity, category) weight exception.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightOverride {
    pub severity: Severity,
    pub category: String,
    pub weight: f64,
}

/// Severity → penalty table with per-category exceptions. The default is
/// the conventional MQM table: major 5, minor 1, neutral 0,
/// non-translation 25, and minor fluency punctuation discounted to 0.1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeverityWeights {
    base: BTreeMap<Severity, f64>,
    overrides: Vec<WeightOverride>,
}

impl Default for SeverityWeights {
    fn default() -> Self {
        let base = BTreeMap::from([
            (Severity::Major, 5.0),
            (Severity::Minor, 1.0),
            (Severity::Neutral, 0.0),
            (Severity::NonTranslation, 25.0),
        ]);
        let overrides = vec![WeightOverride {
            severity: Severity::Minor,
            category: "Fluency/Punctuation".into(),
            weight: 0.1,
        }];
        Self { base, overrides }
    }
}

impl SeverityWeights {
    pub fn new(base: BTreeMap<Severity, f64>, overrides: Vec<WeightOverride>) -> Result<Self> {
        for (&sev, &w) in &base {
            check_weight(sev, w)?;
        }
        for ov in &overrides {
            check_weight(ov.severity, ov.weight)?;
        }
        Ok(Self { base, overrides })
    }

    /// Penalty for one error: category exception first, then the severity's
    /// base weight; a severity absent from the table is a hard error.
    pub fn weight_for(&self, severity: Severity, category: &str) -> Result<f64> {
        for ov in &self.overrides {
            if ov.severity == severity && ov.category.eq_ignore_ascii_case(category.trim()) {
                return Ok(ov.weight);
            }
        }
        self.base
            .get(&severity)
            .copied()
            .ok_or(Error::MissingWeight { severity: severity.to_string() })
    }

    pub fn base(&self) -> &BTreeMap<Severity, f64> {
        &self.base
    }

    pub fn overrides(&self) -> &[WeightOverride] {
        &self.overrides
    }
}

fn check_weight(severity: Severity, w: f64) -> Result<()> {
    if !w.is_finite() || w < 0.0 {
        return Err(Error::Invalid {
            field: "weight".into(),
            msg: format!("{w} for severity {severity}, want finite and >= 0"),
        });
    }
    Ok(())
}

#[derive(Deserialize)]
struct WeightsFile {
    major: Option<f64>,
    minor: Option<f64>,
    neutral: Option<f64>,
    non_translation: Option<f64>,
    /// When present, replaces the default override list entirely.
    overrides: Option<Vec<WeightOverride>>,
}

/// Loads a weights JSON file; absent fields keep their default values.
pub fn load_weights(path: impl AsRef<Path>) -> Result<SeverityWeights> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let file: WeightsFile = serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: 1,
        msg: format!("weights file: {e}"),
    })?;
    let defaults = SeverityWeights::default();
    let mut base = defaults.base.clone();
    for (sev, value) in [
        (Severity::Major, file.major),
        (Severity::Minor, file.minor),
        (Severity::Neutral, file.neutral),
        (Severity::NonTranslation, file.non_translation),
    ] {
        if let Some(w) = value {
            base.insert(sev, w);
        }
    }
    let overrides = file.overrides.unwrap_or(defaults.overrides);
    SeverityWeights::new(base, overrides)
}

// ============================================================================
// Taxonomy
// ============================================================================

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    Adequacy,
    Fluency,
    Other,
}

/// Maps error categories to scoring dimensions. Lookups are
/// case-insensitive on the full `Group/Subcategory` string.
#[derive(Debug, Clone)]
pub struct ErrorTaxonomy {
    name: String,
    adequacy: HashSet<String>,
    fluency: HashSet<String>,
    other: HashSet<String>,
}

fn lower_set(items: &[&str]) -> HashSet<String> {
    items.iter().map(|s| s.to_ascii_lowercase()).collect()
}

impl ErrorTaxonomy {
    /// Category schema used by the EnDe and JaZh annotation campaigns.
    pub fn builtin_ende_jazh() -> Self {
        Self {
            name: "ende_jazh".into(),
            adequacy: lower_set(&[
                "Accuracy/Addition",
                "Accuracy/Creative Reinterpretation",
                "Accuracy/Gender Mismatch",
                "Accuracy/Mistranslation",
                "Accuracy/Omission",
                "Accuracy/Source language fragment",
                "Non-translation!",
            ]),
            fluency: lower_set(&[
                "Fluency/Grammar",
                "Fluency/Inconsistency",
                "Fluency/Punctuation",
                "Fluency/Register",
                "Fluency/Spelling",
                "Fluency/Text-Breaking",
                "Locale convention/Address format",
                "Locale convention/Currency format",
                "Locale convention/Time format",
                "Style/Archaic or obscure word choice",
                "Style/Bad sentence structure",
                "Style/Unnatural or awkward",
                "Terminology/Inappropriate for context",
                "Terminology/Inconsistent",
            ]),
            other: lower_set(&["Other", "Source issue"]),
        }
    }

    /// Flat category schema used by the EnEs annotation campaign.
    pub fn builtin_enes() -> Self {
        Self {
            name: "enes".into(),
            adequacy: lower_set(&[
                "Addition",
                "Agreement",
                "Do not translate",
                "Mistranslation",
                "MT hallucination",
                "Omission",
                "Untranslated",
                "Wrong named entity",
                "Wrong term",
            ]),
            fluency: lower_set(&[
                "Capitalization",
                "Date-time format",
                "Inconsistency",
                "Lacks creativity",
                "Grammar",
                "Measurement format",
                "Number format",
                "Punctuation",
                "Register",
                "Spelling",
                "Unnatural flow",
                "Whitespace",
                "Word order",
                "Wrong language variety",
            ]),
            other: lower_set(&["Other", "Source issue"]),
        }
    }

    /// Custom taxonomy from JSON: `{"adequacy": [...], "fluency": [...],
    /// "other": [...]}`; a category may appear in only one list.
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        #[derive(Deserialize)]
        struct TaxonomyFile {
            adequacy: Vec<String>,
            fluency: Vec<String>,
            #[serde(default)]
            other: Vec<String>,
        }
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let file: TaxonomyFile = serde_json::from_str(&text).map_err(|e| Error::Parse {
            line: 1,
            msg: format!("taxonomy file: {e}"),
        })?;
        let t = Self {
            name: "custom".into(),
            adequacy: file.adequacy.iter().map(|s| s.to_ascii_lowercase()).collect(),
            fluency: file.fluency.iter().map(|s| s.to_ascii_lowercase()).collect(),
            other: file.other.iter().map(|s| s.to_ascii_lowercase()).collect(),
        };
        if let Some(c) = t.adequacy.intersection(&t.fluency).next() {
            return Err(Error::Invalid {
                field: "taxonomy".into(),
                msg: format!("category {c:?} appears in both adequacy and fluency"),
            });
        }
        Ok(t)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Dimension of a category, or None when the taxonomy does not know it.
    pub fn classify(&self, category: &str) -> Option<Dimension> {
        let key = category.trim().to_ascii_lowercase();
        if self.adequacy.contains(&key) {
            Some(Dimension::Adequacy)
        } else if self.fluency.contains(&key) {
            Some(Dimension::Fluency)
        } else if self.other.contains(&key) {
            Some(Dimension::Other)
        } else {
            None
        }
    }
}

// ============================================================================
// Annotations and scoring
// ============================================================================

/// One annotation row: an error (or a no-error observation) recorded by a
/// rater for a system's translation of one segment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MqmAnnotation {
    pub system: String,
    /// Document id; empty when the source format has none.
    pub doc: String,
    pub segment_id: String,
    pub rater: String,
    pub category: String,
    pub severity: Severity,
}

/// Per-system dimension scores (means of minus penalty per observed pair).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemScore {
    pub system: String,
    pub adequacy: f64,
    pub fluency: f64,
    /// Observed (doc, segment, rater) pairs.
    pub n_pairs: usize,
    pub n_annotations: usize,
}

/// Scores plus everything needed to audit them: the categories the
/// taxonomy did not know (scored as neither dimension) and the weight
/// table that was applied.
#[derive(Debug, Clone, Serialize)]
pub struct ScoringReport {
    pub scores: Vec<SystemScore>,
    pub unknown_categories: BTreeMap<String, u64>,
    pub weights: SeverityWeights,
    pub taxonomy: String,
}

/// Aggregates annotations into per-system adequacy and fluency scores.
/// `neutral` rows only mark their pair as observed; unknown categories are
/// counted and reported rather than silently dropped.
pub fn score_annotations(
    annotations: &[MqmAnnotation],
    taxonomy: &ErrorTaxonomy,
    weights: &SeverityWeights,
) -> Result<ScoringReport> {
    if annotations.is_empty() {
        return Err(Error::Empty {
            msg: "scoring needs at least one annotation".into(),
        });
    }
    struct Tally {
        pairs: BTreeSet<(String, String, String)>,
        adequacy_penalty: f64,
        fluency_penalty: f64,
        n_annotations: usize,
    }
    let mut by_system: BTreeMap<&str, Tally> = BTreeMap::new();
    let mut unknown: BTreeMap<String, u64> = BTreeMap::new();
    for ann in annotations {
        let tally = by_system.entry(&ann.system).or_insert_with(|| Tally {
            pairs: BTreeSet::new(),
            adequacy_penalty: 0.0,
            fluency_penalty: 0.0,
            n_annotations: 0,
        });
        tally.n_annotations += 1;
        tally
            .pairs
            .insert((ann.doc.clone(), ann.segment_id.clone(), ann.rater.clone()));
        if ann.severity == Severity::Neutral {
            continue;
        }
        match taxonomy.classify(&ann.category) {
            Some(Dimension::Adequacy) => {
                tally.adequacy_penalty += weights.weight_for(ann.severity, &ann.category)?;
            }
            Some(Dimension::Fluency) => {
                tally.fluency_penalty += weights.weight_for(ann.severity, &ann.category)?;
            }
            Some(Dimension::Other) => {}
            None => {
                *unknown.entry(ann.category.trim().to_string()).or_insert(0) += 1;
            }
        }
    }
    let scores = by_system
        .into_iter()
        .map(|(system, t)| {
            let n = t.pairs.len() as f64;
            SystemScore {
                system: system.to_string(),
                adequacy: -t.adequacy_penalty / n,
                fluency: -t.fluency_penalty / n,
                n_pairs: t.pairs.len(),
                n_annotations: t.n_annotations,
            }
        })
        .collect();
    Ok(ScoringReport {
        scores,
        unknown_categories: unknown,
        weights: weights.clone(),
        taxonomy: taxonomy.name().to_string(),
    })
}

// ============================================================================
// TSV ingestion
// ============================================================================

fn find_column(header: &[String], aliases: &[&str]) -> Option<usize> {
    header
        .iter()
        .position(|h| aliases.iter().any(|a| h.eq_ignore_ascii_case(a)))
}

/// Parses tab-separated annotations. The header may order columns freely;
/// recognized names (case-insensitive): system/system_id/model,
/// doc/doc_id/document (optional), seg_id/segment_id/segment/seg,
/// rater/annotator/rater_id, category/error_category, severity/error_severity.
pub fn parse_mqm_tsv(reader: impl BufRead) -> Result<Vec<MqmAnnotation>> {
    let mut lines = reader.lines().enumerate();
    let header_line = loop {
        match lines.next() {
            Some((idx, line)) => {
                let line = line.map_err(|source| Error::Io {
                    path: "<mqm tsv>".into(),
                    source,
                })?;
                if !line.trim().is_empty() {
                    break (idx, line);
                }
            }
            None => {
                return Err(Error::Empty {
                    msg: "annotation file has no header".into(),
                })
            }
        }
    };
    let header: Vec<String> = header_line
        .1
        .trim_start_matches('\u{feff}')
        .split('\t')
        .map(|h| h.trim().to_string())
        .collect();
    let col = |aliases: &[&str], name: &str| -> Result<usize> {
        find_column(&header, aliases).ok_or_else(|| Error::MissingColumn { name: name.into() })
    };
    let c_system = col(&["system", "system_id", "model"], "system")?;
    let c_seg = col(&["seg_id", "segment_id", "segment", "seg"], "seg_id")?;
    let c_rater = col(&["rater", "annotator", "rater_id"], "rater")?;
    let c_category = col(&["category", "error_category"], "category")?;
    let c_severity = col(&["severity", "error_severity"], "severity")?;
    let c_doc = find_column(&header, &["doc", "doc_id", "document"]);

    let mut out = Vec::new();
    for (idx, line) in lines {
        let line = line.map_err(|source| Error::Io {
            path: "<mqm tsv>".into(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split('\t').collect();
        let need = [c_system, c_seg, c_rater, c_category, c_severity]
            .into_iter()
            .chain(c_doc)
            .max()
            .unwrap();
        if fields.len() <= need {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("{} fields, want at least {}", fields.len(), need + 1),
            });
        }
        let severity_raw = fields[c_severity].trim();
        let severity = Severity::parse(severity_raw).ok_or_else(|| Error::UnknownSeverity {
            line: lineno,
            value: severity_raw.to_string(),
        })?;
        out.push(MqmAnnotation {
            system: fields[c_system].trim().to_string(),
            doc: c_doc.map_or(String::new(), |i| fields[i].trim().to_string()),
            segment_id: fields[c_seg].trim().to_string(),
            rater: fields[c_rater].trim().to_string(),
            category: fields[c_category].trim().to_string(),
            severity,
        });
    }
    if out.is_empty() {
        return Err(Error::Empty {
            msg: "annotation file has no rows".into(),
        });
    }
    Ok(out)
}

pub fn load_mqm_tsv(path: impl AsRef<Path>) -> Result<Vec<MqmAnnotation>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_mqm_tsv(std::io::BufReader::new(file))
}

// ============================================================================
// tests
// ============================================================================
