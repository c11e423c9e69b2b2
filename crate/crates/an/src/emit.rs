//! Deterministic CSV and SVG emitters: fixed column order, 9 significant
//! digits, trailing newline, byte-identical re-runs for identical inputs.

use anplane::frontier::FrontierResult;
use anplane::mqm::ScoringReport;
use anplane::{Error, SweepResult, SystemPoint};
use std::io::BufRead;
use std::path::Path;

type Result<T> = std::result::Result<T, Error>;

// ============================================================================
// Number formatting
// ============================================================================

/// Shortest decimal with `sig` significant digits (printf %g semantics):
/// plain notation while the exponent fits, scientific otherwise, trailing
/// zeros trimmed.
pub fn fmt_sig(v: f64, sig: usize) -> String {
    debug_assert!(sig >= 1);
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let prec = sig - 1;
    let sci = format!("{v:.prec$e}");
    let (mant, exp) = sci.split_once('e').expect("exponential format");
    let exp: i32 = exp.parse().expect("exponent digits");
    if exp >= sig as i32 || exp < -4 {
        let mant = mant.trim_end_matches('0').trim_end_matches('.');
        format!("{mant}e{exp}")
    } else {
        let decimals = (prec as i32 - exp).max(0) as usize;
        let plain = format!("{v:.decimals$}");
        if plain.contains('.') {
            plain
                .trim_end_matches('0')
                .trim_end_matches('.')
                .to_string()
        } else {
            plain
        }
    }
}

/// 9 significant digits; the emitter-wide default.
pub fn fmt_g(v: f64) -> String {
    fmt_sig(v, 9)
}

/// Quotes a CSV field only when it contains a delimiter, quote, or newline.
pub fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

// ============================================================================
// CSV writers
// ============================================================================

fn require_rows(n: usize, what: &str) -> Result<()> {
    if n == 0 {
        return Err(Error::Empty {
            msg: format!("{what} has no rows to emit"),
        });
    }
    Ok(())
}

pub fn curve_csv(result: &SweepResult) -> Result<String> {
    require_rows(result.points.len(), "swept curve")?;
    let mut out = String::from("beta,accuracy,mean_nll_per_token,n_segments\n");
    for p in &result.points {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_g(p.beta),
            fmt_g(p.accuracy),
            fmt_g(p.mean_nll_per_token),
            result.n_segments
        ));
    }
    Ok(out)
}

pub fn systems_csv(points: &[SystemPoint]) -> Result<String> {
    require_rows(points.len(), "system table")?;
    let mut out = String::from("system,mean_accuracy,mean_lpp,lpp_distance,n_segments\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            csv_field(&p.system_id),
            fmt_g(p.mean_accuracy),
            fmt_g(p.mean_lpp),
            fmt_g(p.lpp_distance_to_ref),
            p.n_segments
        ));
    }
    Ok(out)
}

pub fn frontier_csv(fr: &FrontierResult) -> Result<String> {
    require_rows(fr.points.len(), "frontier")?;
    let mut out = String::from("naturalness,accuracy,beta\n");
    for p in &fr.points {
        let beta = p.beta.map(fmt_g).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{}\n",
            fmt_g(p.naturalness),
            fmt_g(p.accuracy),
            beta
        ));
    }
    Ok(out)
}

pub fn mqm_csv(report: &ScoringReport) -> Result<String> {
    require_rows(report.scores.len(), "score table")?;
    let mut out = String::from("system,adequacy,fluency,n_pairs,n_annotations\n");
    for s in &report.scores {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            csv_field(&s.system),
            fmt_g(s.adequacy),
            fmt_g(s.fluency),
            s.n_pairs,
            s.n_annotations
        ));
    }
    Ok(out)
}

// ============================================================================
// CSV readers (plot inputs)
// ============================================================================

/// Splits one CSV line, honoring double-quoted fields with "" escapes.
fn split_csv_line(line: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut in_quotes = false;
    let mut chars = line.chars().peekable();
    while let Some(c) = chars.next() {
        if in_quotes {
            if c == '"' {
                if chars.peek() == Some(&'"') {
                    cur.push('"');
                    chars.next();
                } else {
                    in_quotes = false;
                }
            } else {
                cur.push(c);
            }
        } else if c == '"' {
            in_quotes = true;
        } else if c == ',' {
            out.push(std::mem::take(&mut cur));
        } else {
            cur.push(c);
        }
    }
    out.push(cur);
    out
}

struct CsvTable {
    header: Vec<String>,
    rows: Vec<(usize, Vec<String>)>, // (1-based line number, fields)
}

impl CsvTable {
    fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let reader = std::io::BufReader::new(file);
        let mut header = Vec::new();
        let mut rows = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line.map_err(|source| Error::Io {
                path: path.display().to_string(),
                source,
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let fields = split_csv_line(line.trim_end_matches('\r'));
            if header.is_empty() {
                header = fields.iter().map(|f| f.trim().to_string()).collect();
            } else {
                rows.push((idx + 1, fields));
            }
        }
        if header.is_empty() {
            return Err(Error::Empty {
                msg: format!("{}: no header row", path.display()),
            });
        }
        Ok(Self { header, rows })
    }

    fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    fn any_column(&self, names: &[&str]) -> Result<usize> {
        names
            .iter()
            .find_map(|n| self.column(n))
            .ok_or_else(|| Error::MissingColumn {
                name: names.join("|"),
            })
    }

    fn number(&self, line: usize, fields: &[String], col: usize) -> Result<f64> {
        let raw = fields.get(col).map(|s| s.trim()).unwrap_or("");
        raw.parse::<f64>().map_err(|_| Error::Parse {
            line,
            msg: format!("field {:?} is not a number", raw),
        })
    }
}

/// Which quantity a curve file carries on its x axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveAxis {
    /// Mean per-token NLL of the selections; lower is better.
    NllPerToken,
    /// Negated marginal divergence; higher is better.
    Naturalness,
}

pub struct LoadedCurve {
    pub name: String,
    pub axis: CurveAxis,
    pub points: Vec<(f64, f64)>, // (x, accuracy)
}

/// Reads a swept-curve or frontier CSV; the x column is detected from the
/// header (`mean_nll_per_token` vs `naturalness`).
pub fn read_curve_csv(path: &Path) -> Result<LoadedCurve> {
    let table = CsvTable::load(path)?;
    let (axis, xcol) = if let Some(c) = table.column("mean_nll_per_token") {
        (CurveAxis::NllPerToken, c)
    } else if let Some(c) = table.column("naturalness") {
        (CurveAxis::Naturalness, c)
    } else {
        return Err(Error::MissingColumn {
            name: "mean_nll_per_token|naturalness".into(),
        });
    };
    let ycol = table.any_column(&["accuracy"])?;
    let mut points = Vec::with_capacity(table.rows.len());
    for (line, fields) in &table.rows {
        points.push((
            table.number(*line, fields, xcol)?,
            table.number(*line, fields, ycol)?,
        ));
    }
    if points.is_empty() {
        return Err(Error::Empty {
            msg: format!("{}: no curve points", path.display()),
        });
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    Ok(LoadedCurve { name, axis, points })
}

pub struct LoadedSystem {
    pub system_id: String,
    pub mean_lpp: f64,
    pub mean_accuracy: f64,
}

pub fn read_systems_csv(path: &Path) -> Result<Vec<LoadedSystem>> {
    let table = CsvTable::load(path)?;
    let scol = table.any_column(&["system", "system_id"])?;
    let xcol = table.any_column(&["mean_lpp"])?;
    let ycol = table.any_column(&["mean_accuracy"])?;
    let mut out = Vec::with_capacity(table.rows.len());
    for (line, fields) in &table.rows {
        out.push(LoadedSystem {
            system_id: fields.get(scol).map(|s| s.trim().to_string()).unwrap_or_default(),
            mean_lpp: table.number(*line, fields, xcol)?,
            mean_accuracy: table.number(*line, fields, ycol)?,
        });
    }
    if out.is_empty() {
        return Err(Error::Empty {
            msg: format!("{}: no system rows", path.display()),
        });
    }
    Ok(out)
}

// ============================================================================
// SVG plane plots
// ============================================================================

/// Marker class per system provenance; shapes follow one fixed scheme so
/// plots from different runs stay comparable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarkerCategory {
    Llm,
    MtTrained,
    Online,
    Human,
}

impl MarkerCategory {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "llm" => Some(Self::Llm),
            "mt-trained" | "mt_trained" | "mt" => Some(Self::MtTrained),
            "online" => Some(Self::Online),
            "human" => Some(Self::Human),
            _ => None,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Self::Llm => "llm",
            Self::MtTrained => "mt-trained",
            Self::Online => "online",
            Self::Human => "human",
        }
    }

    fn color(self) -> &'static str {
        match self {
            Self::Llm => "#9467bd",
            Self::MtTrained => "#d62728",
            Self::Online => "#ff7f0e",
            Self::Human => "#2ca02c",
        }
    }
}

pub struct PlotMarker {
    pub label: String,
    pub x: f64,
    pub y: f64,
    pub category: MarkerCategory,
}

pub struct PlotSpec {
    pub curves: Vec<LoadedCurve>,
    pub markers: Vec<PlotMarker>,
    pub x_label: String,
    /// True when smaller x means better naturalness (per-token NLL axes).
    pub x_lower_is_better: bool,
}

const VIEW_W: f64 = 800.0;
const VIEW_H: f64 = 600.0;
const M_LEFT: f64 = 72.0;
const M_RIGHT: f64 = 24.0;
const M_TOP: f64 = 42.0;
const M_BOTTOM: f64 = 58.0;

const CURVE_COLORS: [&str; 4] = ["#1f77b4", "#e377c2", "#17becf", "#bcbd22"];

fn fmt_px(v: f64) -> String {
    format!("{v:.2}")
}

struct Extents {
    xmin: f64,
    xmax: f64,
    ymin: f64,
    ymax: f64,
}

impl Extents {
    fn of(spec: &PlotSpec) -> Self {
        let mut xs: Vec<f64> = Vec::new();
        let mut ys: Vec<f64> = Vec::new();
        for c in &spec.curves {
            for &(x, y) in &c.points {
                xs.push(x);
                ys.push(y);
            }
        }
        for m in &spec.markers {
            xs.push(m.x);
            ys.push(m.y);
        }
        let pad = |lo: f64, hi: f64| -> (f64, f64) {
            let span = hi - lo;
            if span <= 0.0 {
                (lo - 1.0, hi + 1.0)
            } else {
                (lo - 0.05 * span, hi + 0.05 * span)
            }
        };
        let (xmin, xmax) = pad(
            xs.iter().cloned().fold(f64::INFINITY, f64::min),
            xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        );
        let (ymin, ymax) = pad(
            ys.iter().cloned().fold(f64::INFINITY, f64::min),
            ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        );
        Self { xmin, xmax, ymin, ymax }
    }

    fn sx(&self, x: f64) -> f64 {
        M_LEFT + (x - self.xmin) / (self.xmax - self.xmin) * (VIEW_W - M_LEFT - M_RIGHT)
    }

    fn sy(&self, y: f64) -> f64 {
        VIEW_H - M_BOTTOM - (y - self.ymin) / (self.ymax - self.ymin) * (VIEW_H - M_TOP - M_BOTTOM)
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Best curve accuracy available at naturalness equal to or better than the
/// marker's: the pointwise max over qualifying points plus the linear
/// interpolation at the marker's own x. Returns None when no curve covers
/// that naturalness (the marker then trivially dominates).
fn curve_cap_at(curve: &LoadedCurve, x: f64, lower_is_better: bool) -> Option<f64> {
    let qualifies = |px: f64| if lower_is_better { px <= x } else { px >= x };
    let mut cap: Option<f64> = None;
    for &(px, py) in &curve.points {
        if qualifies(px) {
            cap = Some(cap.map_or(py, |c: f64| c.max(py)));
        }
    }
    // Interpolated value exactly at x, when x lies inside a segment.
    for w in curve.points.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        let (lo, hi) = if x0 <= x1 { (x0, x1) } else { (x1, x0) };
        if lo <= x && x <= hi && hi > lo {
            let t = (x - x0) / (x1 - x0);
            let y = y0 + t * (y1 - y0);
            cap = Some(cap.map_or(y, |c: f64| c.max(y)));
        }
    }
    cap
}

fn marker_shape(cat: MarkerCategory, cx: f64, cy: f64) -> String {
    let color = cat.color();
    match cat {
        MarkerCategory::MtTrained => format!(
            "<circle class=\"marker\" cx=\"{}\" cy=\"{}\" r=\"5.5\" fill=\"{color}\"/>",
            fmt_px(cx),
            fmt_px(cy)
        ),
        MarkerCategory::Online => format!(
            "<rect class=\"marker\" x=\"{}\" y=\"{}\" width=\"10\" height=\"10\" fill=\"{color}\"/>",
            fmt_px(cx - 5.0),
            fmt_px(cy - 5.0)
        ),
        MarkerCategory::Llm => format!(
            "<path class=\"marker\" d=\"M {} {} L {} {} L {} {} L {} {} Z\" fill=\"{color}\"/>",
            fmt_px(cx),
            fmt_px(cy - 7.0),
            fmt_px(cx + 7.0),
            fmt_px(cy),
            fmt_px(cx),
            fmt_px(cy + 7.0),
            fmt_px(cx - 7.0),
            fmt_px(cy)
        ),
        MarkerCategory::Human => format!(
            "<path class=\"marker\" d=\"M {} {} L {} {} L {} {} Z\" fill=\"{color}\"/>",
            fmt_px(cx),
            fmt_px(cy - 6.5),
            fmt_px(cx + 6.0),
            fmt_px(cy + 5.0),
            fmt_px(cx - 6.0),
            fmt_px(cy + 5.0)
        ),
    }
}

/// Renders the plane; also returns the labels of systems that dominate every
/// loaded curve (better accuracy at equal-or-better naturalness).
pub fn plane_svg(spec: &PlotSpec) -> Result<(String, Vec<String>)> {
    if spec.curves.is_empty() && spec.markers.is_empty() {
        return Err(Error::Empty {
            msg: "plot needs at least one curve or systems input".into(),
        });
    }
    let ext = Extents::of(spec);
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {VIEW_W} {VIEW_H}\" \
         width=\"{VIEW_W}\" height=\"{VIEW_H}\" font-family=\"Helvetica, Arial, sans-serif\" \
         font-size=\"12pt\">\n"
    ));
    svg.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{VIEW_W}\" height=\"{VIEW_H}\" fill=\"#ffffff\"/>\n"
    ));

    // Grid and ticks: 5 per axis.
    for i in 0..5 {
        let t = i as f64 / 4.0;
        let xv = ext.xmin + t * (ext.xmax - ext.xmin);
        let yv = ext.ymin + t * (ext.ymax - ext.ymin);
        let sx = ext.sx(xv);
        let sy = ext.sy(yv);
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n",
            fmt_px(sx),
            fmt_px(M_TOP),
            fmt_px(sx),
            fmt_px(VIEW_H - M_BOTTOM)
        ));
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n",
            fmt_px(M_LEFT),
            fmt_px(sy),
            fmt_px(VIEW_W - M_RIGHT),
            fmt_px(sy)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            fmt_px(sx),
            fmt_px(VIEW_H - M_BOTTOM + 22.0),
            xml_escape(&fmt_sig(xv, 4))
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n",
            fmt_px(M_LEFT - 8.0),
            fmt_px(sy + 5.0),
            xml_escape(&fmt_sig(yv, 4))
        ));
    }

    // Axis lines and titles; the labels carry the orientation of each metric.
    svg.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#000000\" stroke-width=\"1.5\"/>\n",
        fmt_px(M_LEFT),
        fmt_px(VIEW_H - M_BOTTOM),
        fmt_px(VIEW_W - M_RIGHT),
        fmt_px(VIEW_H - M_BOTTOM)
    ));
    svg.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#000000\" stroke-width=\"1.5\"/>\n",
        fmt_px(M_LEFT),
        fmt_px(M_TOP),
        fmt_px(M_LEFT),
        fmt_px(VIEW_H - M_BOTTOM)
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
        fmt_px((M_LEFT + VIEW_W - M_RIGHT) / 2.0),
        fmt_px(VIEW_H - 12.0),
        xml_escape(&spec.x_label)
    ));
    svg.push_str(&format!(
        "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">accuracy (higher is better)</text>\n",
        fmt_px((M_TOP + VIEW_H - M_BOTTOM) / 2.0),
        fmt_px((M_TOP + VIEW_H - M_BOTTOM) / 2.0)
    ));
    let corner = if spec.x_lower_is_better {
        "upper left"
    } else {
        "upper right"
    };
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"26\" text-anchor=\"middle\" fill=\"#555555\">better toward the {corner}</text>\n",
        fmt_px(VIEW_W / 2.0)
    ));

    for (i, curve) in spec.curves.iter().enumerate() {
        let color = CURVE_COLORS[i % CURVE_COLORS.len()];
        let pts: Vec<String> = curve
            .points
            .iter()
            .map(|&(x, y)| format!("{},{}", fmt_px(ext.sx(x)), fmt_px(ext.sy(y))))
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            pts.join(" ")
        ));
    }

    let mut dominating = Vec::new();
    for m in &spec.markers {
        let cx = ext.sx(m.x);
        let cy = ext.sy(m.y);
        svg.push_str(&marker_shape(m.category, cx, cy));
        svg.push('\n');
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\">{}</text>\n",
            fmt_px(cx + 9.0),
            fmt_px(cy + 4.0),
            xml_escape(&m.label)
        ));
        if !spec.curves.is_empty() {
            let beats_all = spec.curves.iter().all(|c| {
                match curve_cap_at(c, m.x, spec.x_lower_is_better) {
                    Some(cap) => m.y > cap + 1e-9,
                    None => true,
                }
            });
            if beats_all {
                svg.push_str(&format!(
                    "<text x=\"{}\" y=\"{}\" fill=\"#cc0000\">! dominates curve</text>\n",
                    fmt_px(cx + 9.0),
                    fmt_px(cy - 10.0)
                ));
                dominating.push(m.label.clone());
            }
        }
    }

    // Legend: curves, then the marker classes actually present.
    let mut ly = M_TOP + 18.0;
    let lx = VIEW_W - M_RIGHT - 190.0;
    for (i, curve) in spec.curves.iter().enumerate() {
        let color = CURVE_COLORS[i % CURVE_COLORS.len()];
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            fmt_px(lx),
            fmt_px(ly - 4.0),
            fmt_px(lx + 24.0),
            fmt_px(ly - 4.0)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\">{}</text>\n",
            fmt_px(lx + 32.0),
            fmt_px(ly),
            xml_escape(&curve.name)
        ));
        ly += 20.0;
    }
    for cat in [
        MarkerCategory::Llm,
        MarkerCategory::MtTrained,
        MarkerCategory::Online,
        MarkerCategory::Human,
    ] {
        if spec.markers.iter().any(|m| m.category == cat) {
            svg.push_str(&marker_shape(cat, lx + 12.0, ly - 5.0));
            svg.push('\n');
            svg.push_str(&format!(
                "<text x=\"{}\" y=\"{}\">{}</text>\n",
                fmt_px(lx + 32.0),
                fmt_px(ly),
                cat.label()
            ));
            ly += 20.0;
        }
    }

    svg.push_str("</svg>\n");
    Ok((svg, dominating))
}

// ============================================================================
// tests
// ============================================================================

#[cfg(test)]
mod tests {
    use super::*;
    use anplane::sweep::SweepPoint;

    #[test]
    fn nine_digit_formatting_round_trips_cleanly() {
        assert_eq!(fmt_g(0.0), "0");
        assert_eq!(fmt_g(0.05), "0.05");
        assert_eq!(fmt_g(-0.5), "-0.5");
        assert_eq!(fmt_g(2.5), "2.5");
        assert_eq!(fmt_g(123456789.0), "123456789");
        assert_eq!(fmt_g(1234567890.0), "1.23456789e9");
        assert_eq!(fmt_g(0.0001), "0.0001");
        assert_eq!(fmt_g(0.00001), "1e-5");
        assert_eq!(fmt_g(1.0), "1");
        assert_eq!(fmt_g(1e-4 * 1.00000000001), "0.0001");
        assert_eq!(fmt_sig(1234.5678, 4), "1235");
        assert_eq!(fmt_sig(0.12349, 4), "0.1235");
    }

    #[test]
    fn formatted_values_reparse_to_nine_digits() {
        for &v in &[
            std::f64::consts::PI,
            -1.2345e-9,
            6.02214076e23,
            0.1 + 0.2,
            1e8 + 0.5,
        ] {
            let s = fmt_g(v);
            let back: f64 = s.parse().unwrap();
            let rel = ((back - v) / v).abs();
            assert!(rel < 5e-9, "{v} -> {s} -> {back} (rel {rel})");
        }
    }

    #[test]
    fn csv_fields_quote_only_when_needed() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
        assert_eq!(
            split_csv_line("a,\"b,c\",\"d\"\"e\""),
            vec!["a", "b,c", "d\"e"]
        );
    }

    fn small_sweep() -> SweepResult {
        SweepResult {
            points: vec![
                SweepPoint {
                    beta: 0.01,
                    accuracy: 0.8,
                    mean_nll_per_token: 3.0,
                },
                SweepPoint {
                    beta: 1.0,
                    accuracy: 0.6,
                    mean_nll_per_token: 1.0,
                },
            ],
            n_segments: 2,
        }
    }

    #[test]
    fn curve_csv_has_header_rows_and_trailing_newline() {
        let csv = curve_csv(&small_sweep()).unwrap();
        assert_eq!(
            csv,
            "beta,accuracy,mean_nll_per_token,n_segments\n0.01,0.8,3,2\n1,0.6,1,2\n"
        );
        assert_eq!(curve_csv(&small_sweep()).unwrap(), csv);
        let empty = SweepResult {
            points: vec![],
            n_segments: 0,
        };
        assert!(curve_csv(&empty).is_err());
    }

    fn demo_spec() -> PlotSpec {
        PlotSpec {
            curves: vec![LoadedCurve {
                name: "oracle".into(),
                axis: CurveAxis::NllPerToken,
                points: vec![(1.0, 0.9), (2.0, 0.7), (3.0, 0.4)],
            }],
            markers: vec![
                PlotMarker {
                    label: "sys-a".into(),
                    x: 2.0,
                    y: 0.5,
                    category: MarkerCategory::MtTrained,
                },
                PlotMarker {
                    label: "sys-b".into(),
                    x: 2.5,
                    y: 0.95,
                    category: MarkerCategory::Llm,
                },
            ],
            x_label: "mean NLL per token (lower is better)".into(),
            x_lower_is_better: true,
        }
    }

    #[test]
    fn svg_is_deterministic_with_expected_elements() {
        let (a, doms) = plane_svg(&demo_spec()).unwrap();
        let (b, _) = plane_svg(&demo_spec()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.matches("<polyline").count(), 1);
        // Two data markers plus two legend swatches.
        assert_eq!(a.matches("class=\"marker\"").count(), 4);
        assert!(a.starts_with("<svg"));
        assert!(a.contains("viewBox=\"0 0 800 600\""));
        assert!(a.contains("font-size=\"12pt\""));
        assert!(a.contains("sys-a") && a.contains("sys-b"));
        // sys-b sits above the interpolated curve (0.55 at x=2.5); sys-a below.
        assert_eq!(doms, vec!["sys-b".to_string()]);
        assert_eq!(a.matches("! dominates curve").count(), 1);
    }

    #[test]
    fn dominance_cap_interpolates_between_points() {
        let curve = LoadedCurve {
            name: "c".into(),
            axis: CurveAxis::NllPerToken,
            points: vec![(1.0, 0.9), (3.0, 0.5)],
        };
        // Lower-is-better axis: at x=2 the qualifying set is {(1,0.9)} plus
        // the interpolated 0.7; the cap is their max.
        assert!((curve_cap_at(&curve, 2.0, true).unwrap() - 0.9).abs() < 1e-12);
        // Higher-is-better axis: qualifying set is {(3,0.5)} plus interp 0.7.
        assert!((curve_cap_at(&curve, 2.0, false).unwrap() - 0.7).abs() < 1e-12);
        assert!(curve_cap_at(&curve, 0.5, true).is_none());
    }
}
