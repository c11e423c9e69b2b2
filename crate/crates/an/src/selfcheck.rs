//! Built-in consistency checks over embedded fixtures. Each check prints one
//! `ok <name>` line; the first failure aborts with a message naming the check.

use anplane::critic::{
    d1_gaussian_closed_form, d2_gaussian_closed_form, dp_gaussian_closed_form, dp_limit_check,
    effective_kernel, sample_critics, CriticProcess, CriticSampler, Link,
};
use anplane::data::{DistortionTable, FiniteDistribution, JointInstance};
use anplane::divergence::{classification_risk_check, d2_exact_slices, dp_monte_carlo};
use anplane::frontier::{
    brute_force_frontier, scalarization_frontier, selection_weights, verify_an_properties,
    FrontierDivergence,
};
use anplane::mqm::{score_annotations, ErrorTaxonomy, MqmAnnotation, Severity, SeverityWeights};
use anplane::sweep::{default_beta_grid, oracle_select_index, sweep_curve, SweepResult};
use anplane::{rng, CandidateRecord, SegmentRecord};

use crate::emit;

type Check = (&'static str, fn(u64) -> Result<(), String>);

pub fn run(seed: u64) -> Result<(), String> {
    let checks: [Check; 10] = [
        ("special-function values", special_values),
        ("gaussian critic closed forms", gaussian_closed_forms),
        ("tv frontier endpoints", tv_frontier_endpoints),
        ("brute-force staircase shape", staircase_shape),
        ("effective kernel vs sampled critics", kernel_vs_monte_carlo),
        ("classification risk chain", risk_chain),
        ("oracle sweep switch point", sweep_switch),
        ("mqm hand-scored fixture", mqm_fixture),
        ("csv emitter determinism", csv_determinism),
        ("svg emitter determinism", svg_determinism),
    ];
    for (i, (name, f)) in checks.iter().enumerate() {
        f(rng::derive_seed(seed, i as u64)).map_err(|e| format!("check `{name}` failed: {e}"))?;
        println!("ok {name}");
    }
    println!("selfcheck: {} checks passed", checks.len());
    Ok(())
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn close(got: f64, want: f64, tol: f64, what: &str) -> Result<(), String> {
    ensure(
        (got - want).abs() <= tol,
        format!("{what}: got {got}, want {want} (tol {tol})"),
    )
}

fn special_values(_seed: u64) -> Result<(), String> {
    use anplane::special::{bivariate_normal_cdf, erfc, kummer_m, log_gamma, normal_cdf};
    close(
        log_gamma(0.5),
        0.5 * std::f64::consts::PI.ln(),
        1e-12,
        "log_gamma(1/2)",
    )?;
    close(erfc(0.0), 1.0, 1e-15, "erfc(0)")?;
    close(normal_cdf(0.0), 0.5, 1e-15, "normal_cdf(0)")?;
    close(
        normal_cdf(1.959963984540054),
        0.975,
        1e-9,
        "normal_cdf at the 97.5% quantile",
    )?;
    // M(-1, 1/2, -2) terminates: 1 + (-1 / 0.5)(-2) = 5.
    close(
        kummer_m(-1.0, 0.5, -2.0).map_err(|e| e.to_string())?,
        5.0,
        1e-10,
        "kummer_m(-1,1/2,-2)",
    )?;
    // Zero-mean orthant mass: 1/4 + asin(rho)/(2 pi).
    close(
        bivariate_normal_cdf(0.0, 0.0, 0.5).map_err(|e| e.to_string())?,
        1.0 / 3.0,
        1e-10,
        "bivariate_normal_cdf(0,0,1/2)",
    )
}

fn gaussian_closed_forms(_seed: u64) -> Result<(), String> {
    for &(mmd, gap) in &[(1e-3, 0.0), (1.0, 0.5), (10.0, 3.0), (0.2, 7.0)] {
        let d1 = dp_gaussian_closed_form(1.0, mmd, gap).map_err(|e| e.to_string())?;
        let want1 = d1_gaussian_closed_form(mmd, gap);
        close(d1.value, want1, 1e-10 * want1.max(1.0), "p=1 special case")?;
        let d2 = dp_gaussian_closed_form(2.0, mmd, gap).map_err(|e| e.to_string())?;
        let want2 = d2_gaussian_closed_form(mmd, gap);
        close(d2.value, want2, 1e-10 * want2.max(1.0), "p=2 special case")?;
    }
    let scaled = dp_limit_check(1.0, &[1024.0]).map_err(|e| e.to_string())?;
    ensure(
        (scaled[0] - 1.0).abs() < 0.02,
        format!("sqrt(e/(p+1))·D_p at p=1024 is {} per unit mmd", scaled[0]),
    )
}

fn demo_instance() -> (JointInstance, DistortionTable, FiniteDistribution) {
    let inst = JointInstance::new(
        vec!["x0".into(), "x1".into()],
        vec!["y0".into(), "y1".into()],
        vec![vec![0.3, 0.2], vec![0.1, 0.4]],
    )
    .unwrap();
    let delta = DistortionTable::new(vec![
        vec![vec![0.0, 0.6], vec![0.5, 0.0]],
        vec![vec![0.0, 0.4], vec![0.7, 0.0]],
    ])
    .unwrap();
    let r_y = FiniteDistribution::new(vec!["y0".into(), "y1".into()], vec![0.35, 0.65]).unwrap();
    (inst, delta, r_y)
}

fn tv_frontier_endpoints(seed: u64) -> Result<(), String> {
    let (inst, delta, r_y) = demo_instance();
    let fr = scalarization_frontier(
        &inst,
        &delta,
        &r_y,
        &FrontierDivergence::Tv,
        &[0.0, 1e6],
        2,
        seed,
    )
    .map_err(|e| e.to_string())?;
    ensure(fr.unconverged_betas.is_empty(), "LP left unconverged betas")?;
    // Unconstrained optimum: each input row puts all mass on its cheapest y.
    let w = selection_weights(&inst, &delta).map_err(|e| e.to_string())?;
    let best: f64 = -w
        .iter()
        .map(|row| row.iter().cloned().fold(f64::INFINITY, f64::min))
        .sum::<f64>();
    let a_max = fr
        .points
        .iter()
        .map(|p| p.accuracy)
        .fold(f64::NEG_INFINITY, f64::max);
    close(a_max, best, 1e-9, "beta=0 accuracy")?;
    // Huge beta pins the output marginal onto the reference.
    let n_max = fr
        .points
        .iter()
        .map(|p| p.naturalness)
        .fold(f64::NEG_INFINITY, f64::max);
    ensure(
        n_max >= -1e-6,
        format!("beta=1e6 leaves TV {} from the reference", -n_max),
    )
}

fn staircase_shape(_seed: u64) -> Result<(), String> {
    let inst = JointInstance::new(
        vec!["x0".into()],
        vec!["y0".into(), "y1".into(), "y2".into()],
        vec![vec![0.5, 0.3, 0.2]],
    )
    .map_err(|e| e.to_string())?;
    let delta = DistortionTable::new(vec![vec![
        vec![0.0, 0.8, 0.3],
        vec![0.8, 0.0, 0.6],
        vec![0.3, 0.6, 0.0],
    ]])
    .map_err(|e| e.to_string())?;
    let r_y = FiniteDistribution::new(
        vec!["y0".into(), "y1".into(), "y2".into()],
        vec![0.2, 0.5, 0.3],
    )
    .map_err(|e| e.to_string())?;
    let fr = brute_force_frontier(&inst, &delta, &r_y, &FrontierDivergence::Tv, 80)
        .map_err(|e| e.to_string())?;
    let shape = verify_an_properties(&fr, 3.0 / 80.0);
    ensure(
        shape.worst_monotonicity_violation == 0.0,
        "staircase accuracy increased with naturalness",
    )?;
    ensure(
        shape.passes(),
        format!(
            "staircase shape check failed (concavity violation {})",
            shape.worst_concavity_violation
        ),
    )?;
    let first = fr.points[0];
    close(
        fr.accuracy_at(first.naturalness).unwrap_or(f64::NAN),
        first.accuracy,
        0.0,
        "accuracy_at on the first staircase point",
    )
}

fn rbf_gram(pts: &[f64], gamma: f64) -> Vec<Vec<f64>> {
    pts.iter()
        .map(|&a| {
            pts.iter()
                .map(|&b| (-gamma * (a - b) * (a - b)).exp())
                .collect()
        })
        .collect()
}

fn kernel_vs_monte_carlo(seed: u64) -> Result<(), String> {
    let pts = [0.0, 1.0, 2.5];
    let q = [0.5, 0.3, 0.2];
    let p = [0.2, 0.3, 0.5];
    let proc = CriticProcess::zero_mean(rbf_gram(&pts, 0.5), Link::Log).map_err(|e| e.to_string())?;
    let c = effective_kernel(&proc).map_err(|e| e.to_string())?;
    let exact = d2_exact_slices(&p, &q, &c).map_err(|e| e.to_string())?;
    let draws = sample_critics(&proc, 6000, seed).map_err(|e| e.to_string())?;
    let mc = dp_monte_carlo(&q, &p, &draws, 2.0).map_err(|e| e.to_string())?;
    let se = mc.std_error.unwrap_or(0.0);
    close(
        mc.value,
        exact.value,
        4.0 * se + 1e-3,
        "Monte Carlo D_2 vs effective-kernel closed form",
    )
}

fn risk_chain(seed: u64) -> Result<(), String> {
    let samples_p = [0.0, 0.4, 0.9, 1.4, 2.0];
    let samples_q = [1.1, 1.6, 2.2, 2.7, 3.3];
    let pts: Vec<f64> = samples_p.iter().chain(&samples_q).cloned().collect();
    let proc = CriticProcess::zero_mean(rbf_gram(&pts, 0.7), Link::Identity)
        .map_err(|e| e.to_string())?;
    let sampler = CriticSampler::new(&proc).map_err(|e| e.to_string())?;
    let mut stream = rng::stream(seed, 0);
    let report = classification_risk_check(0.3, &samples_p, &samples_q, 60, |_| {
        Ok(sampler.draw(&mut stream))
    })
    .map_err(|e| e.to_string())?;
    ensure(
        report.chain_holds,
        format!(
            "-D_inf {} <= -D_1 {} <= risk {} chain broke",
            report.neg_d_inf, report.neg_d1, report.risk
        ),
    )
}

fn switch_fixture() -> Vec<SegmentRecord> {
    let cand = |system: &str, accuracy: f64, nll_per_token: f64| CandidateRecord {
        text: String::new(),
        system_id: system.into(),
        accuracy,
        logprob: -nll_per_token * 10.0,
        token_count: 10,
    };
    vec![SegmentRecord {
        segment_id: "s0".into(),
        source: "src".into(),
        reference: "ref".into(),
        candidates: vec![cand("a", 0.8, 3.0), cand("b", 0.6, 1.0)],
    }]
}

fn sweep_switch(_seed: u64) -> Result<(), String> {
    let segs = switch_fixture();
    let lo = oracle_select_index(&segs[0].candidates, 0.05).map_err(|e| e.to_string())?;
    let hi = oracle_select_index(&segs[0].candidates, 0.2).map_err(|e| e.to_string())?;
    ensure(lo == 0 && hi == 1, format!("selections were {lo} then {hi}"))?;
    let curve = sweep_curve(&segs, &default_beta_grid()).map_err(|e| e.to_string())?;
    for pair in curve.points.windows(2) {
        ensure(
            pair[1].accuracy <= pair[0].accuracy + 1e-12
                && pair[1].mean_nll_per_token <= pair[0].mean_nll_per_token + 1e-12,
            "sweep was not monotone in beta",
        )?;
    }
    Ok(())
}

fn mqm_fixture(_seed: u64) -> Result<(), String> {
    let ann = |system: &str, seg: &str, rater: &str, category: &str, severity: Severity| {
        MqmAnnotation {
            system: system.into(),
            doc: "d0".into(),
            segment_id: seg.into(),
            rater: rater.into(),
            category: category.into(),
            severity,
        }
    };
    let annotations = vec![
        ann("sys", "1", "r1", "Accuracy/Omission", Severity::Major),
        ann("sys", "1", "r1", "Fluency/Grammar", Severity::Minor),
        ann("sys", "2", "r1", "Accuracy/Mistranslation", Severity::Minor),
        ann("sys", "2", "r1", "Fluency/Punctuation", Severity::Minor),
    ];
    let report = score_annotations(
        &annotations,
        &ErrorTaxonomy::builtin_ende_jazh(),
        &SeverityWeights::default(),
    )
    .map_err(|e| e.to_string())?;
    let s = &report.scores[0];
    // Two (doc, seg, rater) pairs: adequacy (5+1)/2, fluency (1+0.1)/2.
    close(s.adequacy, -3.0, 1e-12, "adequacy")?;
    close(s.fluency, -0.55, 1e-12, "fluency")?;
    ensure(s.n_pairs == 2, format!("n_pairs is {}", s.n_pairs))?;
    ensure(
        report.unknown_categories.is_empty(),
        "fixture categories should all classify",
    )
}

fn csv_determinism(_seed: u64) -> Result<(), String> {
    for (v, want) in [
        (0.0, "0"),
        (0.05, "0.05"),
        (-0.5, "-0.5"),
        (123456789.0, "123456789"),
        (1234567890.0, "1.23456789e9"),
        (1e-5, "1e-5"),
    ] {
        ensure(
            emit::fmt_g(v) == want,
            format!("fmt_g({v}) = {:?}, want {want:?}", emit::fmt_g(v)),
        )?;
    }
    let segs = switch_fixture();
    let curve = sweep_curve(&segs, &[0.05, 0.2]).map_err(|e| e.to_string())?;
    let a = emit::curve_csv(&curve).map_err(|e| e.to_string())?;
    let b = emit::curve_csv(&curve).map_err(|e| e.to_string())?;
    ensure(a == b, "curve CSV differed between runs")?;
    ensure(a.ends_with('\n'), "curve CSV missing trailing newline")?;
    ensure(a.lines().count() == 3, "curve CSV row count")?;
    ensure(
        emit::curve_csv(&SweepResult {
            points: vec![],
            n_segments: 0,
        })
        .is_err(),
        "empty result must refuse to emit",
    )
}

fn svg_determinism(_seed: u64) -> Result<(), String> {
    let spec = emit::PlotSpec {
        curves: vec![emit::LoadedCurve {
            name: "oracle".into(),
            axis: emit::CurveAxis::NllPerToken,
            points: vec![(1.0, 0.9), (2.0, 0.7), (3.0, 0.4)],
        }],
        markers: vec![
            emit::PlotMarker {
                label: "base".into(),
                x: 2.0,
                y: 0.5,
                category: emit::MarkerCategory::MtTrained,
            },
            emit::PlotMarker {
                label: "super".into(),
                x: 2.5,
                y: 0.95,
                category: emit::MarkerCategory::Llm,
            },
        ],
        x_label: "mean NLL per token (lower is better)".into(),
        x_lower_is_better: true,
    };
    let (a, doms) = emit::plane_svg(&spec).map_err(|e| e.to_string())?;
    let (b, _) = emit::plane_svg(&spec).map_err(|e| e.to_string())?;
    ensure(a == b, "SVG differed between runs")?;
    ensure(a.matches("<polyline").count() == 1, "polyline count")?;
    ensure(
        doms == vec!["super".to_string()],
        format!("dominating systems reported as {doms:?}"),
    )?;
    ensure(a.contains("! dominates curve"), "missing dominance annotation")
}
