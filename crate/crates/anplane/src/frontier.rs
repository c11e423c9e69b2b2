//! Accuracy-naturalness frontiers A(N) on small synthetic instances.
//!
//! Accuracy of a system Q given a joint instance and distortion table is
//! A(Q) = −Σ_x Σ_{y_r} P(x, y_r) Σ_{y_c} Q(y_c|x) Δ(x, y_r, y_c); naturalness
//! is N(Q) = −D(Q_y, R_y) for the system's output marginal Q_y. The frontier
//! A(N) is traced by scalarization: maximize A − β·D over row-stochastic Q
//! for a β grid. For TV the scalarized problem is a linear program and is
//! solved exactly; for KL and kernel distances it is solved by multiplicative
//! weights (exponentiated gradient) ascent with restarts. A brute-force
//! simplex-grid staircase serves as an independent oracle.

use rayon::prelude::*;
use serde::Serialize;
use std::collections::VecDeque;

use crate::data::{ConditionalSystem, DistortionTable, FiniteDistribution, JointInstance};
use crate::divergence::DivergenceFamily;
use crate::simplex::{self, LinearProgram};
use crate::{rng, Error, Result};

/// One frontier point: N = −D(Q_y, R_y), A = accuracy, and the β that
/// produced it when swept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub naturalness: f64,
    pub accuracy: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FrontierSolver {
    Scalarization,
    BruteForce,
}

/// Marginal divergence used on the naturalness axis.
#[derive(Debug, Clone)]
pub enum FrontierDivergence {
    Tv,
    Kl,
    /// Kernel table C over the y support; D = sqrt((Q_y−R_y)ᵀ C (Q_y−R_y)).
    D2(Vec<Vec<f64>>),
}

impl FrontierDivergence {
    pub fn family(&self) -> DivergenceFamily {
        match self {
            FrontierDivergence::Tv => DivergenceFamily::Tv,
            FrontierDivergence::Kl => DivergenceFamily::Kl,
            FrontierDivergence::D2(_) => DivergenceFamily::D2,
        }
    }
}

/// A swept or enumerated frontier: points sorted strictly increasing in
/// naturalness with non-increasing accuracy (within solver tolerance).
#[derive(Debug, Clone, Serialize)]
pub struct FrontierResult {
    pub points: Vec<CurvePoint>,
    pub solver: FrontierSolver,
    pub family: DivergenceFamily,
    /// β values whose ascent exhausted the iteration budget; their
    /// best-found points are still included.
    pub unconverged_betas: Vec<f64>,
}

impl FrontierResult {
    /// Staircase value max{A_i : N_i ≥ n}, or None when no point reaches n.
    /// Points are sorted by N with non-increasing A, so this is the A of the
    /// first point at or above n.
    pub fn accuracy_at(&self, n: f64) -> Option<f64> {
        self.points
            .iter()
            .find(|p| p.naturalness >= n)
            .map(|p| p.accuracy)
    }
}

// ============================================================================
// Instance-level quantities
// ============================================================================

/// Per-candidate expected distortion weights W[x][y_c] =
/// Σ_{y_r} P(x, y_r)·Δ(x, y_r, y_c), so A(Q) = −Σ_{x,y} Q(y|x)·W[x][y].
pub fn selection_weights(inst: &JointInstance, delta: &DistortionTable) -> Result<Vec<Vec<f64>>> {
    delta.check_shape(inst.nx(), inst.ny())?;
    let (nx, ny) = (inst.nx(), inst.ny());
    let mut w = vec![vec![0.0; ny]; nx];
    for x in 0..nx {
        for yc in 0..ny {
            let mut s = 0.0;
            for yr in 0..ny {
                s += inst.mass(x, yr) * delta.get(x, yr, yc);
            }
            w[x][yc] = s;
        }
    }
    Ok(w)
}

/// A(Q) for a concrete system.
pub fn system_accuracy(
    q: &ConditionalSystem,
    inst: &JointInstance,
    delta: &DistortionTable,
) -> Result<f64> {
    q.check_compatible(inst)?;
    let w = selection_weights(inst, delta)?;
    Ok(accuracy_of(&w, q.rows()))
}

fn accuracy_of(w: &[Vec<f64>], rows: &[Vec<f64>]) -> f64 {
    let mut a = 0.0;
    for (wr, qr) in w.iter().zip(rows) {
        for (&wv, &qv) in wr.iter().zip(qr) {
            a -= wv * qv;
        }
    }
    a
}

/// Output marginal Q_y(y) = Σ_x P_x(x)·Q(y|x).
pub fn system_marginal(q: &ConditionalSystem, p_x: &[f64]) -> Result<FiniteDistribution> {
    if p_x.len() != q.rows().len() {
        return Err(Error::Shape {
            msg: format!("{} input weights vs {} rows", p_x.len(), q.rows().len()),
        });
    }
    let probs = marginal_of(q.rows(), p_x);
    FiniteDistribution::with_tol(q.y_labels().to_vec(), probs, 1e-6)
}

fn marginal_of(rows: &[Vec<f64>], p_x: &[f64]) -> Vec<f64> {
    let ny = rows.first().map_or(0, |r| r.len());
    let mut out = vec![0.0; ny];
    for (row, &px) in rows.iter().zip(p_x) {
        if px == 0.0 {
            continue;
        }
        for (o, &v) in out.iter_mut().zip(row) {
            *o += px * v;
        }
    }
    out
}

/// H[y|x] in nats: Σ_{x,y} P(x,y)·ln(P_x(x)/P(x,y)).
pub fn conditional_entropy(inst: &JointInstance) -> f64 {
    let px = inst.p_x();
    let mut h = 0.0;
    for (x, row) in inst.joint().iter().enumerate() {
        for &m in row {
            if m > 0.0 {
                h += m * (px[x] / m).ln();
            }
        }
    }
    h.max(0.0)
}

// ============================================================================
// Marginal divergences and gradients
// ============================================================================

fn quadform(c: &[Vec<f64>], d: &[f64]) -> f64 {
    let mut s = 0.0;
    for (i, &di) in d.iter().enumerate() {
        if di == 0.0 {
            continue;
        }
        let mut row = 0.0;
        for (j, &dj) in d.iter().enumerate() {
            row += c[i][j] * dj;
        }
        s += di * row;
    }
    s
}

fn marginal_divergence(div: &FrontierDivergence, q_y: &[f64], r_y: &[f64]) -> f64 {
    match div {
        FrontierDivergence::Tv => {
            0.5 * q_y
                .iter()
                .zip(r_y)
                .map(|(&q, &r)| (q - r).abs())
                .sum::<f64>()
        }
        FrontierDivergence::Kl => {
            let mut s = 0.0;
            for (&q, &r) in q_y.iter().zip(r_y) {
                if q > 0.0 {
                    s += q * (q / r).ln();
                }
            }
            s.max(0.0)
        }
        FrontierDivergence::D2(c) => {
            let d: Vec<f64> = q_y.iter().zip(r_y).map(|(&q, &r)| q - r).collect();
            quadform(c, &d).max(0.0).sqrt()
        }
    }
}

/// ∂D/∂Q_y for the smooth families (KL, D2); TV is solved exactly instead.
fn marginal_gradient(div: &FrontierDivergence, q_y: &[f64], r_y: &[f64]) -> Vec<f64> {
    match div {
        FrontierDivergence::Tv => q_y
            .iter()
            .zip(r_y)
            .map(|(&q, &r)| 0.5 * (q - r).signum() * f64::from(u8::from(q != r)))
            .collect(),
        FrontierDivergence::Kl => q_y
            .iter()
            .zip(r_y)
            .map(|(&q, &r)| (q.max(1e-300) / r).ln() + 1.0)
            .collect(),
        FrontierDivergence::D2(c) => {
            let d: Vec<f64> = q_y.iter().zip(r_y).map(|(&q, &r)| q - r).collect();
            let dist = quadform(c, &d).max(0.0).sqrt();
            if dist <= 1e-15 {
                return vec![0.0; q_y.len()];
            }
            (0..q_y.len())
                .map(|y| {
                    let mut s = 0.0;
                    for (j, &dj) in d.iter().enumerate() {
                        s += c[y][j] * dj;
                    }
                    s / dist
                })
                .collect()
        }
    }
}

fn check_frontier_inputs(
    inst: &JointInstance,
    delta: &DistortionTable,
    r_y: &FiniteDistribution,
    div: &FrontierDivergence,
) -> Result<()> {
    delta.check_shape(inst.nx(), inst.ny())?;
    if r_y.labels() != inst.y_labels() {
        return Err(Error::SupportMismatch {
            msg: "reference marginal labels do not match the instance".into(),
        });
    }
    match div {
        FrontierDivergence::Kl => {
            if let Some(i) = r_y.probs().iter().position(|&v| v <= 0.0) {
                return Err(Error::Invalid {
                    field: "r_y".into(),
                    msg: format!(
                        "label {:?} has zero mass; the KL naturalness axis needs a strictly positive reference",
                        r_y.labels()[i]
                    ),
                });
            }
        }
        FrontierDivergence::D2(c) => {
            let ny = inst.ny();
            if c.len() != ny || c.iter().any(|r| r.len() != ny) {
                return Err(Error::Shape {
                    msg: format!("kernel table shape does not match support size {ny}"),
                });
            }
            for i in 0..ny {
                for j in (i + 1)..ny {
                    let (a, b) = (c[i][j], c[j][i]);
                    if (a - b).abs() > 1e-9 * (1.0 + a.abs().max(b.abs())) {
                        return Err(Error::AsymmetricKernel { i, j, a, b });
                    }
                }
            }
        }
        FrontierDivergence::Tv => {}
    }
    Ok(())
}

// ============================================================================
// Scalarized solvers
// ============================================================================

/// Exact solve of max A(Q) − β·TV(Q_y, R_y) as a linear program with one
/// slack per output label for the absolute values.
fn tv_scalarized_lp(
    w: &[Vec<f64>],
    p_x: &[f64],
    r_y: &[f64],
    beta: f64,
) -> Result<Vec<Vec<f64>>> {
    let nx = w.len();
    let ny = r_y.len();
    let nv = nx * ny + ny;
    let mut objective = vec![0.0; nv];
    for x in 0..nx {
        for y in 0..ny {
            objective[x * ny + y] = w[x][y];
        }
    }
    for y in 0..ny {
        objective[nx * ny + y] = 0.5 * beta;
    }
    let mut le = Vec::with_capacity(2 * ny);
    for y in 0..ny {
        // Σ_x P_x q_{xy} − t_y ≤ R_y and −Σ_x P_x q_{xy} − t_y ≤ −R_y
        let mut pos = vec![0.0; nv];
        let mut neg = vec![0.0; nv];
        for x in 0..nx {
            pos[x * ny + y] = p_x[x];
            neg[x * ny + y] = -p_x[x];
        }
        pos[nx * ny + y] = -1.0;
        neg[nx * ny + y] = -1.0;
        le.push((pos, r_y[y]));
        le.push((neg, -r_y[y]));
    }
    let mut eq = Vec::with_capacity(nx);
    for x in 0..nx {
        let mut row = vec![0.0; nv];
        for y in 0..ny {
            row[x * ny + y] = 1.0;
        }
        eq.push((row, 1.0));
    }
    let sol = simplex::solve(&LinearProgram { objective, le, eq })?;
    let mut q = vec![vec![0.0; ny]; nx];
    for x in 0..nx {
        let mut sum = 0.0;
        for y in 0..ny {
            let v = sol.x[x * ny + y].max(0.0);
            q[x][y] = v;
            sum += v;
        }
        // Row sums hold to LP precision; renormalize the roundoff away.
        if sum > 0.0 {
            for v in q[x].iter_mut() {
                *v /= sum;
            }
        } else {
            q[x] = vec![1.0 / ny as f64; ny];
        }
    }
    Ok(q)
}

const EG_MAX_ITERS: usize = 20_000;
const EG_WINDOW: usize = 50;
const EG_WINDOW_TOL: f64 = 1e-10;

fn scalarized_objective(
    w: &[Vec<f64>],
    p_x: &[f64],
    r_y: &[f64],
    div: &FrontierDivergence,
    beta: f64,
    q: &[Vec<f64>],
) -> f64 {
    let q_y = marginal_of(q, p_x);
    accuracy_of(w, q) - beta * marginal_divergence(div, &q_y, r_y)
}

fn eg_step(q: &[Vec<f64>], grad: &[Vec<f64>], step: f64) -> Vec<Vec<f64>> {
    q.iter()
        .zip(grad)
        .map(|(row, g)| {
            let logits: Vec<f64> = row
                .iter()
                .zip(g)
                .map(|(&qv, &gv)| qv.max(1e-300).ln() + step * gv)
                .collect();
            let m = logits.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
            let mut e: Vec<f64> = logits.iter().map(|&l| (l - m).exp()).collect();
            let s: f64 = e.iter().sum();
            for v in e.iter_mut() {
                *v /= s;
            }
            e
        })
        .collect()
}

/// Multiplicative-weights ascent of A − β·D from one starting point.
/// Returns (best Q, best objective, converged).
fn eg_run(
    w: &[Vec<f64>],
    p_x: &[f64],
    r_y: &[f64],
    div: &FrontierDivergence,
    beta: f64,
    init: Vec<Vec<f64>>,
) -> (Vec<Vec<f64>>, f64, bool) {
    let step0 = 0.1 / (1.0 + beta);
    let mut q = init;
    let mut f_cur = scalarized_objective(w, p_x, r_y, div, beta, &q);
    let mut best_f = f_cur;
    let mut best_q = q.clone();
    let mut history: VecDeque<f64> = VecDeque::with_capacity(EG_WINDOW + 1);
    history.push_back(best_f);
    for _ in 0..EG_MAX_ITERS {
        let q_y = marginal_of(&q, p_x);
        let gd = marginal_gradient(div, &q_y, r_y);
        let grad: Vec<Vec<f64>> = w
            .iter()
            .enumerate()
            .map(|(x, wr)| {
                wr.iter()
                    .enumerate()
                    .map(|(y, &wv)| -wv - beta * p_x[x] * gd[y])
                    .collect()
            })
            .collect();
        // Fixed step first, then backtrack on the rare non-ascent step.
        let mut step = step0;
        let mut improved = false;
        for _ in 0..30 {
            let q_try = eg_step(&q, &grad, step);
            let f_try = scalarized_objective(w, p_x, r_y, div, beta, &q_try);
            if f_try > f_cur {
                q = q_try;
                f_cur = f_try;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if f_cur > best_f {
            best_f = f_cur;
            best_q = q.clone();
        }
        if !improved {
            // No step length ascends: stationary within line-search reach.
            return (best_q, best_f, true);
        }
        history.push_back(best_f);
        if history.len() > EG_WINDOW + 1 {
            history.pop_front();
        }
        if history.len() == EG_WINDOW + 1 && best_f - history.front().unwrap() < EG_WINDOW_TOL {
            return (best_q, best_f, true);
        }
    }
    (best_q, best_f, false)
}

fn eg_maximize(
    w: &[Vec<f64>],
    p_x: &[f64],
    r_y: &[f64],
    div: &FrontierDivergence,
    beta: f64,
    restarts: usize,
    seed: u64,
) -> (Vec<Vec<f64>>, bool) {
    let nx = w.len();
    let ny = r_y.len();
    let mut best: Option<(Vec<Vec<f64>>, f64, bool)> = None;
    for restart in 0..restarts.max(1) {
        let init: Vec<Vec<f64>> = match restart {
            // Deterministic anchors: uniform rows, then the reference rows.
            0 => vec![vec![1.0 / ny as f64; ny]; nx],
            1 => vec![r_y.to_vec(); nx],
            _ => {
                let mut r = rng::stream(seed, restart as u64);
                (0..nx)
                    .map(|_| {
                        let mut z = vec![0.0; ny];
                        rng::fill_standard_normal(&mut r, &mut z);
                        let m = z.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
                        let mut e: Vec<f64> = z.iter().map(|&v| (v - m).exp()).collect();
                        let s: f64 = e.iter().sum();
                        for v in e.iter_mut() {
                            *v /= s;
                        }
                        e
                    })
                    .collect()
            }
        };
        // KL needs a strictly positive reference start; replace exact zeros.
        let init = if matches!(div, FrontierDivergence::Kl) && restart == 1 {
            init.iter()
                .map(|row| {
                    let mut r: Vec<f64> = row.iter().map(|&v| v.max(1e-12)).collect();
                    let s: f64 = r.iter().sum();
                    for v in r.iter_mut() {
                        *v /= s;
                    }
                    r
                })
                .collect()
        } else {
            init
        };
        let (q, f, conv) = eg_run(w, p_x, r_y, div, beta, init);
        let better = match &best {
            None => true,
            Some((_, bf, _)) => f > *bf,
        };
        if better {
            best = Some((q, f, conv));
        }
    }
    let (q, _, conv) = best.unwrap();
    (q, conv)
}

// ============================================================================
// Frontier sweeps
// ============================================================================

/// Scalarization sweep: one frontier point per β, maximizing A − β·D.
/// TV is solved exactly (linear program); KL and kernel distances by
/// exponentiated-gradient ascent with `restarts` starting points. Points are
/// returned sorted strictly increasing in naturalness, merging duplicates by
/// best accuracy.
pub fn scalarization_frontier(
    inst: &JointInstance,
    delta: &DistortionTable,
    r_y: &FiniteDistribution,
    divergence: &FrontierDivergence,
    betas: &[f64],
    restarts: usize,
    seed: u64,
) -> Result<FrontierResult> {
    check_frontier_inputs(inst, delta, r_y, divergence)?;
    if betas.is_empty() {
        return Err(Error::Empty {
            msg: "scalarization needs at least one beta".into(),
        });
    }
    if let Some(&b) = betas.iter().find(|&&b| !(b >= 0.0) || !b.is_finite()) {
        return Err(Error::OutOfRange {
            msg: format!("beta {b}: want finite and >= 0"),
        });
    }
    let w = selection_weights(inst, delta)?;
    let p_x = inst.p_x();
    let r = r_y.probs();

    let solved: Vec<Result<(CurvePoint, bool)>> = betas
        .par_iter()
        .enumerate()
        .map(|(bi, &beta)| {
            let (q, converged) = match divergence {
                FrontierDivergence::Tv => (tv_scalarized_lp(&w, &p_x, r, beta)?, true),
                _ => {
                    let s = rng::derive_seed(seed, bi as u64);
                    eg_maximize(&w, &p_x, r, divergence, beta, restarts, s)
                }
            };
            let q_y = marginal_of(&q, &p_x);
            let d = marginal_divergence(divergence, &q_y, r).max(0.0);
            Ok((
                CurvePoint {
                    naturalness: -d,
                    accuracy: accuracy_of(&w, &q),
                    beta: Some(beta),
                },
                converged,
            ))
        })
        .collect();

    let mut points = Vec::with_capacity(betas.len());
    let mut unconverged = Vec::new();
    for item in solved {
        let (pt, conv) = item?;
        if !conv {
            unconverged.push(pt.beta.unwrap());
        }
        points.push(pt);
    }
    points.sort_by(|a, b| a.naturalness.partial_cmp(&b.naturalness).unwrap());
    let mut merged: Vec<CurvePoint> = Vec::with_capacity(points.len());
    for p in points {
        match merged.last_mut() {
            Some(last) if (p.naturalness - last.naturalness).abs() <= 1e-12 => {
                if p.accuracy > last.accuracy {
                    *last = p;
                }
            }
            _ => merged.push(p),
        }
    }
    Ok(FrontierResult {
        points: merged,
        solver: FrontierSolver::Scalarization,
        family: divergence.family(),
        unconverged_betas: unconverged,
    })
}

/// Largest instance the brute-force grid accepts: |X|·(|Y|−1) ≤ 6.
pub const BRUTE_FORCE_BUDGET: usize = 6;

/// Exhaustive simplex-grid staircase: every system whose rows are
/// compositions of `resolution` is evaluated; the naturalness axis is
/// bucketed at width 1/(4·resolution) and each bucket keeps its best
/// accuracy; a right-to-left running maximum turns buckets into the
/// dominant staircase. Bucket points use the bucket's lower naturalness
/// edge, so every reported (N, A) is achievable at naturalness ≥ N.
pub fn brute_force_frontier(
    inst: &JointInstance,
    delta: &DistortionTable,
    r_y: &FiniteDistribution,
    divergence: &FrontierDivergence,
    resolution: usize,
) -> Result<FrontierResult> {
    check_frontier_inputs(inst, delta, r_y, divergence)?;
    let (nx, ny) = (inst.nx(), inst.ny());
    if nx * (ny - 1) > BRUTE_FORCE_BUDGET {
        return Err(Error::TooLarge {
            msg: format!(
                "|X|·(|Y|−1) = {} exceeds the grid budget {BRUTE_FORCE_BUDGET}",
                nx * (ny - 1)
            ),
        });
    }
    if resolution < 1 {
        return Err(Error::OutOfRange {
            msg: "resolution must be >= 1".into(),
        });
    }
    let w = selection_weights(inst, delta)?;
    let p_x = inst.p_x();
    let r = r_y.probs();

    // The divergence is convex in Q_y, so its maximum over achievable
    // marginals is attained at a vertex of the simplex.
    let mut d_max = 0.0f64;
    for y in 0..ny {
        let mut vertex = vec![0.0; ny];
        vertex[y] = 1.0;
        d_max = d_max.max(marginal_divergence(divergence, &vertex, r));
    }
    let width = 1.0 / (4.0 * resolution as f64);
    let nb = (d_max / width).ceil() as usize + 2;

    let res_f = resolution as f64;
    let neg_w_scaled: Vec<Vec<f64>> = w
        .iter()
        .map(|row| row.iter().map(|&v| -v / res_f).collect())
        .collect();
    let px_scaled: Vec<f64> = p_x.iter().map(|&v| v / res_f).collect();

    struct Walker<'a> {
        nx: usize,
        ny: usize,
        resolution: usize,
        neg_w_scaled: &'a [Vec<f64>],
        px_scaled: &'a [f64],
        div: &'a FrontierDivergence,
        r: &'a [f64],
        width: f64,
        nb: usize,
    }

    impl Walker<'_> {
        fn leaf(&self, a: f64, q_y: &[f64], best: &mut [f64]) {
            let d = marginal_divergence(self.div, q_y, self.r);
            let idx = ((d / self.width) as usize).min(self.nb - 1);
            if a > best[idx] {
                best[idx] = a;
            }
        }

        fn next_row(&self, x: usize, a: f64, q_y: &mut [f64], best: &mut [f64]) {
            if x == self.nx {
                self.leaf(a, q_y, best);
            } else {
                self.enum_row(x, 0, self.resolution, a, q_y, best);
            }
        }

        /// Enumerates compositions of `remaining` over coordinates y.. of
        /// row x, accumulating accuracy and marginal incrementally.
        fn enum_row(
            &self,
            x: usize,
            y: usize,
            remaining: usize,
            a: f64,
            q_y: &mut [f64],
            best: &mut [f64],
        ) {
            let ua = self.neg_w_scaled[x][y];
            let uq = self.px_scaled[x];
            let saved = q_y[y];
            if y == self.ny - 1 {
                let a2 = a + ua * remaining as f64;
                q_y[y] += uq * remaining as f64;
                self.next_row(x + 1, a2, q_y, best);
                q_y[y] = saved;
                return;
            }
            let mut a2 = a;
            for c in 0..=remaining {
                if c > 0 {
                    a2 += ua;
                    q_y[y] += uq;
                }
                self.enum_row(x, y + 1, remaining - c, a2, q_y, best);
            }
            q_y[y] = saved;
        }
    }

    let walker = Walker {
        nx,
        ny,
        resolution,
        neg_w_scaled: &neg_w_scaled,
        px_scaled: &px_scaled,
        div: divergence,
        r,
        width,
        nb,
    };

    // Parallel split on the first coordinate of the first row; per-bucket
    // maxima merge associatively, so the result is schedule-independent.
    let best: Vec<f64> = (0..=resolution)
        .into_par_iter()
        .fold(
            || vec![f64::NEG_INFINITY; nb],
            |mut best, c00| {
                let mut q_y = vec![0.0; ny];
                let a = neg_w_scaled[0][0] * c00 as f64;
                q_y[0] = px_scaled[0] * c00 as f64;
                if ny == 1 {
                    if c00 == resolution {
                        walker.next_row(1, a, &mut q_y, &mut best);
                    }
                } else {
                    walker.enum_row(0, 1, resolution - c00, a, &mut q_y, &mut best);
                }
                best
            },
        )
        .reduce(
            || vec![f64::NEG_INFINITY; nb],
            |mut a, b| {
                for (av, bv) in a.iter_mut().zip(b) {
                    if bv > *av {
                        *av = bv;
                    }
                }
                a
            },
        );

    // Right-to-left running maximum over buckets (high naturalness first),
    // then collapse runs of equal accuracy to their most natural point.
    let mut staircase: Vec<CurvePoint> = Vec::new();
    let mut run_max = f64::NEG_INFINITY;
    for (idx, &a) in best.iter().enumerate() {
        if a > run_max {
            run_max = a;
        }
        if run_max > f64::NEG_INFINITY {
            staircase.push(CurvePoint {
                naturalness: -((idx + 1) as f64) * width,
                accuracy: run_max,
                beta: None,
            });
        }
    }
    staircase.reverse();
    let mut points: Vec<CurvePoint> = Vec::new();
    for p in staircase {
        match points.last() {
            Some(last) if (last.accuracy - p.accuracy).abs() <= 1e-15 => {
                let kept = points.last_mut().unwrap();
                *kept = p;
            }
            _ => points.push(p),
        }
    }
    Ok(FrontierResult {
        points,
        solver: FrontierSolver::BruteForce,
        family: divergence.family(),
        unconverged_betas: Vec::new(),
    })
}

// ============================================================================
// Shape verification and the copy-vs-marginal demo
// ============================================================================

/// Outcome of the monotonicity and concavity checks on a frontier.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ShapeReport {
    pub n_points: usize,
    pub monotone: bool,
    pub concave: bool,
    /// Largest accuracy increase along increasing naturalness (0 if none).
    pub worst_monotonicity_violation: f64,
    /// Largest gap by which a middle point fell below its chord (0 if none).
    pub worst_concavity_violation: f64,
}

impl ShapeReport {
    pub fn passes(&self) -> bool {
        self.monotone && self.concave
    }
}

/// Checks that accuracies are non-increasing in naturalness and that every
/// consecutive triple keeps the middle point on or above its chord, both
/// within `tol`. Fewer than three points make concavity vacuous; fewer than
/// two make monotonicity vacuous.
pub fn verify_an_properties(fr: &FrontierResult, tol: f64) -> ShapeReport {
    let pts = &fr.points;
    let mut worst_mono = 0.0f64;
    for pair in pts.windows(2) {
        worst_mono = worst_mono.max(pair[1].accuracy - pair[0].accuracy);
    }
    let mut worst_conc = 0.0f64;
    for triple in pts.windows(3) {
        let (p1, p2, p3) = (triple[0], triple[1], triple[2]);
        let span = p3.naturalness - p1.naturalness;
        if span <= 0.0 {
            continue;
        }
        let t = (p2.naturalness - p1.naturalness) / span;
        let chord = p1.accuracy + t * (p3.accuracy - p1.accuracy);
        worst_conc = worst_conc.max(chord - p2.accuracy);
    }
    ShapeReport {
        n_points: pts.len(),
        monotone: worst_mono <= tol,
        concave: worst_conc <= tol,
        worst_monotonicity_violation: worst_mono,
        worst_concavity_violation: worst_conc,
    }
}

/// Report of the copy-vs-marginal tension: the distortion-minimizing system
/// Q* cannot match the data marginal when outputs are non-deterministic.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NoTwoBirdsReport {
    /// H[y|x] in nats.
    pub conditional_entropy: f64,
    /// D_TV(Q*_y, P_y) for the distortion-minimizing Q*.
    pub tv_to_data_marginal: f64,
    /// Both positive: best-accuracy behavior provably distorts the marginal.
    pub tradeoff_present: bool,
}

/// Builds the distortion-minimizing system (per-x uniform over the argmin
/// set of expected distortion, a tie-symmetric choice) and measures how far
/// its output marginal sits from the data marginal.
pub fn no_two_birds_demo(inst: &JointInstance, delta: &DistortionTable) -> Result<NoTwoBirdsReport> {
    let w = selection_weights(inst, delta)?;
    let (nx, ny) = (inst.nx(), inst.ny());
    let p_x = inst.p_x();
    let mut q = vec![vec![0.0; ny]; nx];
    for x in 0..nx {
        let lo = w[x].iter().cloned().fold(f64::INFINITY, f64::min);
        let ties: Vec<usize> = (0..ny)
            .filter(|&y| w[x][y] <= lo + 1e-12 * (1.0 + lo.abs()))
            .collect();
        for &y in &ties {
            q[x][y] = 1.0 / ties.len() as f64;
        }
    }
    let q_y = marginal_of(&q, &p_x);
    let p_y = inst.p_y();
    let tv = 0.5
        * q_y
            .iter()
            .zip(&p_y)
            .map(|(&a, &b)| (a - b).abs())
            .sum::<f64>();
    let h = conditional_entropy(inst);
    Ok(NoTwoBirdsReport {
        conditional_entropy: h,
        tv_to_data_marginal: tv,
        tradeoff_present: h > 0.0 && tv > 0.0,
    })
}

// ============================================================================
// tests
// ============================================================================

#[cfg(test)]
mod tests {
    use super::*;

    fn inst_2x2_uniform() -> JointInstance {
        JointInstance::new(
            vec!["x0".into(), "x1".into()],
            vec!["y0".into(), "y1".into()],
            vec![vec![0.25, 0.25], vec![0.25, 0.25]],
        )
        .unwrap()
    }

    fn uniform_system(nx: usize, ny: usize) -> ConditionalSystem {
        ConditionalSystem::new(
            (0..nx).map(|i| format!("x{i}")).collect(),
            (0..ny).map(|i| format!("y{i}")).collect(),
            vec![vec![1.0 / ny as f64; ny]; nx],
        )
        .unwrap()
    }

    #[test]
    fn accuracy_examples() {
        let inst = inst_2x2_uniform();
        let zero = DistortionTable::new(vec![vec![vec![0.0; 2]; 2]; 2]).unwrap();
        let q = uniform_system(2, 2);
        assert_eq!(system_accuracy(&q, &inst, &zero).unwrap(), 0.0);

        // Noiseless joint, copy system, exact-match distortion → 0.
        let noiseless = JointInstance::new(
            vec!["x0".into(), "x1".into()],
            vec!["y0".into(), "y1".into()],
            vec![vec![0.5, 0.0], vec![0.0, 0.5]],
        )
        .unwrap();
        let copy = ConditionalSystem::new(
            vec!["x0".into(), "x1".into()],
            vec!["y0".into(), "y1".into()],
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        )
        .unwrap();
        let zero_one = DistortionTable::exact_match(2, 2);
        assert_eq!(system_accuracy(&copy, &noiseless, &zero_one).unwrap(), 0.0);

        // Uniform system under 0-1 distortion on the uniform joint: −0.5.
        let a = system_accuracy(&q, &inst, &zero_one).unwrap();
        assert!((a + 0.5).abs() < 1e-15);
    }

    #[test]
    fn marginal_examples() {
        let r = vec![0.3, 0.7];
        let sys = ConditionalSystem::new(
            vec!["x0".into(), "x1".into()],
            vec!["y0".into(), "y1".into()],
            vec![r.clone(), r.clone()],
        )
        .unwrap();
        let m = system_marginal(&sys, &[0.6, 0.4]).unwrap();
        assert!((m.probs()[0] - 0.3).abs() < 1e-15);

        let point_mass = system_marginal(
            &ConditionalSystem::new(
                vec!["x0".into(), "x1".into()],
                vec!["y0".into(), "y1".into()],
                vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            )
            .unwrap(),
            &[1.0, 0.0],
        )
        .unwrap();
        assert_eq!(point_mass.probs(), &[1.0, 0.0]);

        let mixed = system_marginal(
            &ConditionalSystem::new(
                vec!["x0".into(), "x1".into()],
                vec!["y0".into(), "y1".into()],
                vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            )
            .unwrap(),
            &[0.5, 0.5],
        )
        .unwrap();
        assert_eq!(mixed.probs(), &[0.5, 0.5]);
    }

    #[test]
    fn conditional_entropy_examples() {
        let noiseless = JointInstance::new(
            vec!["x0".into(), "x1".into()],
            vec!["y0".into(), "y1".into()],
            vec![vec![0.5, 0.0], vec![0.0, 0.5]],
        )
        .unwrap();
        assert_eq!(conditional_entropy(&noiseless), 0.0);

        let indep = inst_2x2_uniform();
        assert!((conditional_entropy(&indep) - std::f64::consts::LN_2).abs() < 1e-12);

        let skewed = JointInstance::new(
            vec!["x0".into()],
            vec!["y0".into(), "y1".into()],
            vec![vec![0.75, 0.25]],
        )
        .unwrap();
        let want = 0.75 * (4.0f64 / 3.0).ln() + 0.25 * 4.0f64.ln();
        assert!((conditional_entropy(&skewed) - want).abs() < 1e-12);
    }

    fn simple_instance() -> (JointInstance, DistortionTable, FiniteDistribution) {
        let inst = JointInstance::new(
            vec!["x0".into(), "x1".into()],
            vec!["y0".into(), "y1".into()],
            vec![vec![0.4, 0.1], vec![0.1, 0.4]],
        )
        .unwrap();
        let delta = DistortionTable::exact_match(2, 2);
        let r_y = FiniteDistribution::new(vec!["y0".into(), "y1".into()], vec![0.5, 0.5]).unwrap();
        (inst, delta, r_y)
    }

    #[test]
    fn beta_zero_hits_unconstrained_optimum() {
        let (inst, delta, r_y) = simple_instance();
        // Unconstrained optimum: per-x point mass on the argmin column.
        let w = selection_weights(&inst, &delta).unwrap();
        let best: f64 = -w
            .iter()
            .map(|row| row.iter().cloned().fold(f64::INFINITY, f64::min))
            .sum::<f64>();
        for div in [
            FrontierDivergence::Tv,
            FrontierDivergence::Kl,
            FrontierDivergence::D2(vec![vec![1.0, 0.0], vec![0.0, 1.0]]),
        ] {
            let fr =
                scalarization_frontier(&inst, &delta, &r_y, &div, &[0.0], 4, 11).unwrap();
            let got = fr.points[0].accuracy;
            assert!(
                (got - best).abs() < 1e-7,
                "{:?}: {got} vs {best}",
                div.family()
            );
        }
    }

    #[test]
    fn huge_beta_pins_marginal_to_reference() {
        let (inst, delta, r_y) = simple_instance();
        let fr = scalarization_frontier(
            &inst,
            &delta,
            &r_y,
            &FrontierDivergence::Tv,
            &[1e6],
            4,
            11,
        )
        .unwrap();
        // N = −TV(Q_y, R_y) must sit at 0 within LP precision.
        assert!(fr.points[0].naturalness.abs() < 1e-3);
    }

    #[test]
    fn zero_distortion_collapses_curve() {
        let (inst, _, r_y) = simple_instance();
        let zero = DistortionTable::new(vec![vec![vec![0.0; 2]; 2]; 2]).unwrap();
        let fr = scalarization_frontier(
            &inst,
            &zero,
            &r_y,
            &FrontierDivergence::Tv,
            &[0.5, 2.0, 8.0],
            4,
            11,
        )
        .unwrap();
        for p in &fr.points {
            assert!(p.accuracy.abs() < 1e-12);
            assert!(p.naturalness.abs() < 1e-9);
        }
        let fr = scalarization_frontier(
            &inst,
            &zero,
            &r_y,
            &FrontierDivergence::Kl,
            &[0.5, 2.0],
            4,
            11,
        )
        .unwrap();
        for p in &fr.points {
            assert!(p.accuracy.abs() < 1e-12);
            assert!(p.naturalness.abs() < 1e-5, "{}", p.naturalness);
        }
    }

    #[test]
    fn kl_requires_positive_reference() {
        let (inst, delta, _) = simple_instance();
        let r0 = FiniteDistribution::new(vec!["y0".into(), "y1".into()], vec![1.0, 0.0]).unwrap();
        assert!(scalarization_frontier(
            &inst,
            &delta,
            &r0,
            &FrontierDivergence::Kl,
            &[1.0],
            2,
            1
        )
        .is_err());
    }

    #[test]
    fn brute_force_staircase_is_monotone() {
        let inst = JointInstance::new(
            vec!["x0".into()],
            vec!["y0".into(), "y1".into()],
            vec![vec![0.75, 0.25]],
        )
        .unwrap();
        let delta = DistortionTable::exact_match(1, 2);
        let r_y = FiniteDistribution::new(vec!["y0".into(), "y1".into()], vec![0.1, 0.9]).unwrap();
        let fr =
            brute_force_frontier(&inst, &delta, &r_y, &FrontierDivergence::Tv, 100).unwrap();
        assert!(fr.points.len() >= 3);
        for pair in fr.points.windows(2) {
            assert!(pair[0].naturalness < pair[1].naturalness);
            assert!(pair[0].accuracy >= pair[1].accuracy);
        }
        let report = verify_an_properties(&fr, 3.0 / 100.0);
        assert!(report.passes(), "{report:?}");
    }

    #[test]
    fn brute_force_zero_distortion_single_point() {
        let (inst, _, r_y) = simple_instance();
        let zero = DistortionTable::new(vec![vec![vec![0.0; 2]; 2]; 2]).unwrap();
        let fr =
            brute_force_frontier(&inst, &zero, &r_y, &FrontierDivergence::Tv, 50).unwrap();
        assert_eq!(fr.points.len(), 1);
        assert_eq!(fr.points[0].accuracy, 0.0);
        assert!(fr.points[0].naturalness > -0.01);
    }

    #[test]
    fn brute_force_rejects_large_instances() {
        let inst = JointInstance::new(
            (0..4).map(|i| format!("x{i}")).collect(),
            (0..3).map(|i| format!("y{i}")).collect(),
            vec![vec![1.0 / 12.0; 3]; 4],
        )
        .unwrap();
        let delta = DistortionTable::exact_match(4, 3);
        let r_y = FiniteDistribution::uniform(3);
        let r_y = FiniteDistribution::new(
            vec!["y0".into(), "y1".into(), "y2".into()],
            r_y.probs().to_vec(),
        )
        .unwrap();
        assert!(matches!(
            brute_force_frontier(&inst, &delta, &r_y, &FrontierDivergence::Tv, 10),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn shape_report_flags_convex_curves() {
        let convex = FrontierResult {
            points: vec![
                CurvePoint { naturalness: -1.0, accuracy: 1.0, beta: None },
                CurvePoint { naturalness: -0.5, accuracy: 0.1, beta: None },
                CurvePoint { naturalness: 0.0, accuracy: 0.0, beta: None },
            ],
            solver: FrontierSolver::Scalarization,
            family: DivergenceFamily::Tv,
            unconverged_betas: vec![],
        };
        let report = verify_an_properties(&convex, 1e-9);
        assert!(report.monotone);
        assert!(!report.concave);
        assert!(report.worst_concavity_violation > 0.3);

        let two = FrontierResult {
            points: convex.points[..2].to_vec(),
            ..convex.clone()
        };
        assert!(verify_an_properties(&two, 1e-9).passes());
    }

    #[test]
    fn no_two_birds_examples() {
        // Deterministic joint: copying is optimal and marginal-preserving.
        let noiseless = JointInstance::new(
            vec!["x0".into(), "x1".into()],
            vec!["y0".into(), "y1".into()],
            vec![vec![0.5, 0.0], vec![0.0, 0.5]],
        )
        .unwrap();
        let r = no_two_birds_demo(&noiseless, &DistortionTable::exact_match(2, 2)).unwrap();
        assert_eq!(r.conditional_entropy, 0.0);
        assert!(r.tv_to_data_marginal < 1e-12);
        assert!(!r.tradeoff_present);

        // Skewed 1×2 rows: argmin is the mode, marginal collapses.
        let skewed = JointInstance::new(
            vec!["x0".into()],
            vec!["y0".into(), "y1".into()],
            vec![vec![0.75, 0.25]],
        )
        .unwrap();
        let delta = DistortionTable::exact_match(1, 2);
        let r = no_two_birds_demo(&skewed, &delta).unwrap();
        assert!((r.tv_to_data_marginal - 0.25).abs() < 1e-12);
        assert!(r.tradeoff_present);

        // Scaling Δ by a positive constant leaves the report unchanged.
        let scaled = DistortionTable::new(
            delta
                .values()
                .iter()
                .map(|p| {
                    p.iter()
                        .map(|r| r.iter().map(|&v| 7.5 * v).collect())
                        .collect()
                })
                .collect(),
        )
        .unwrap();
        let r2 = no_two_birds_demo(&skewed, &scaled).unwrap();
        assert_eq!(r.tv_to_data_marginal, r2.tv_to_data_marginal);
    }

    #[test]
    fn accuracy_at_walks_the_staircase() {
        let fr = FrontierResult {
            points: vec![
                CurvePoint { naturalness: -0.8, accuracy: 0.9, beta: None },
                CurvePoint { naturalness: -0.4, accuracy: 0.5, beta: None },
                CurvePoint { naturalness: -0.1, accuracy: 0.2, beta: None },
            ],
            solver: FrontierSolver::BruteForce,
            family: DivergenceFamily::Tv,
            unconverged_betas: vec![],
        };
        assert_eq!(fr.accuracy_at(-0.9), Some(0.9));
        assert_eq!(fr.accuracy_at(-0.5), Some(0.5));
        assert_eq!(fr.accuracy_at(-0.4), Some(0.5));
        assert_eq!(fr.accuracy_at(-0.05), None);
    }
}
