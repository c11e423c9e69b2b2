//! Dense two-phase simplex solver for the small linear programs that exact
//! frontier sweeps produce (tens of variables and rows).
//!
//! Minimizes c·x subject to a_le·x ≤ b_le, a_eq·x = b_eq, x ≥ 0. Bland's
//! rule on both the entering and leaving choices guarantees termination
//! without cycling; problems here are tiny, so the anti-cycling cost is
//! irrelevant.

use crate::{Error, Result};

/// Minimize `objective`·x over x ≥ 0 with ≤ and = rows.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    /// Rows (a, b) meaning a·x ≤ b.
    pub le: Vec<(Vec<f64>, f64)>,
    /// Rows (a, b) meaning a·x = b.
    pub eq: Vec<(Vec<f64>, f64)>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

const PIVOT_TOL: f64 = 1e-11;
const FEAS_TOL: f64 = 1e-7;
const MAX_PIVOTS: usize = 200_000;

struct Tableau {
    /// m rows × (ncols + 1); last column is the rhs.
    rows: Vec<Vec<f64>>,
    /// Reduced-cost row, same width; last entry is −(current objective).
    z: Vec<f64>,
    /// Basic variable per row.
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= piv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, &p) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
                row[c] = 0.0;
            }
        }
        let f = self.z[c];
        if f != 0.0 {
            for (v, &p) in self.z.iter_mut().zip(&pivot_row) {
                *v -= f * p;
            }
            self.z[c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// Runs simplex iterations until optimal (no negative reduced cost).
    /// `allowed` bounds the entering-column range.
    fn optimize(&mut self, allowed: usize) -> Result<()> {
        for _ in 0..MAX_PIVOTS {
            // Bland: smallest-index column with negative reduced cost.
            let mut enter = None;
            for j in 0..allowed {
                if self.z[j] < -PIVOT_TOL {
                    enter = Some(j);
                    break;
                }
            }
            let Some(c) = enter else {
                return Ok(());
            };
            // Ratio test; ties broken by smallest basic variable index.
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][c];
                if a > PIVOT_TOL {
                    let ratio = self.rows[i][self.ncols] / a;
                    let better = match leave {
                        None => true,
                        Some((bi, br)) => {
                            ratio < br - 1e-12
                                || (ratio < br + 1e-12 && self.basis[i] < self.basis[bi])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else {
                return Err(Error::Unbounded { col: c });
            };
            self.pivot(r, c);
        }
        Err(Error::Shape {
            msg: "simplex exceeded the pivot budget".into(),
        })
    }
}

/// Solves the LP; errors on infeasible or unbounded problems.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution> {
    let n = lp.objective.len();
    for (i, (a, _)) in lp.le.iter().chain(&lp.eq).enumerate() {
        if a.len() != n {
            return Err(Error::Shape {
                msg: format!("constraint {i} has {} coefficients, want {n}", a.len()),
            });
        }
    }
    let m_le = lp.le.len();
    let m = m_le + lp.eq.len();
    let ncols_real = n + m_le;

    // Assemble equality-form rows with slacks; negate rows to make rhs ≥ 0.
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(m);
    for (i, (a, b)) in lp.le.iter().enumerate() {
        let mut row = vec![0.0; ncols_real + 1];
        row[..n].copy_from_slice(a);
        row[n + i] = 1.0;
        row[ncols_real] = *b;
        rows.push(row);
    }
    for (a, b) in &lp.eq {
        let mut row = vec![0.0; ncols_real + 1];
        row[..n].copy_from_slice(a);
        row[ncols_real] = *b;
        rows.push(row);
    }
    for row in rows.iter_mut() {
        if row[ncols_real] < 0.0 {
            for v in row.iter_mut() {
                *v = -*v;
            }
        }
    }

    // Initial basis: a slack where its coefficient stayed +1, else an
    // artificial variable.
    let mut basis = vec![usize::MAX; m];
    let mut needs_artificial = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        if i < m_le && row[n + i] == 1.0 {
            basis[i] = n + i;
        } else {
            needs_artificial.push(i);
        }
    }
    let n_art = needs_artificial.len();
    let ncols1 = ncols_real + n_art;
    for row in rows.iter_mut() {
        let rhs = row[ncols_real];
        row.truncate(ncols_real);
        row.extend(std::iter::repeat_n(0.0, n_art));
        row.push(rhs);
    }
    for (k, &i) in needs_artificial.iter().enumerate() {
        rows[i][ncols_real + k] = 1.0;
        basis[i] = ncols_real + k;
    }

    // Phase 1: minimize the artificial sum. Reduced costs c_j − Σ c_B T_ij
    // with c = 1 on artificials only.
    let mut z1 = vec![0.0; ncols1 + 1];
    for j in ncols1 - n_art..ncols1 {
        z1[j] = 1.0;
    }
    for &i in &needs_artificial {
        for (zj, &tij) in z1.iter_mut().zip(&rows[i]) {
            *zj -= tij;
        }
    }
    let mut t = Tableau {
        rows,
        z: z1,
        basis,
        ncols: ncols1,
    };
    if n_art > 0 {
        t.optimize(ncols1)?;
        let phase1 = -t.z[ncols1];
        if phase1 > FEAS_TOL {
            return Err(Error::Infeasible { residual: phase1 });
        }
        // Drive artificial variables out of the basis; an all-zero row is a
        // redundant constraint and is dropped.
        let mut r = 0;
        while r < t.rows.len() {
            if t.basis[r] >= ncols_real {
                let mut pivoted = false;
                for j in 0..ncols_real {
                    if t.rows[r][j].abs() > 1e-9 {
                        t.pivot(r, j);
                        pivoted = true;
                        break;
                    }
                }
                if !pivoted {
                    t.rows.remove(r);
                    t.basis.remove(r);
                    continue;
                }
            }
            r += 1;
        }
    }

    // Phase 2: drop artificial columns, install the real objective.
    let mut rows2: Vec<Vec<f64>> = t
        .rows
        .iter()
        .map(|row| {
            let mut r: Vec<f64> = row[..ncols_real].to_vec();
            r.push(row[ncols1]);
            r
        })
        .collect();
    // Restore exact unit columns for the basis (roundoff hygiene).
    for (i, row) in rows2.iter_mut().enumerate() {
        let b = t.basis[i];
        let piv = row[b];
        if (piv - 1.0).abs() > 1e-12 {
            for v in row.iter_mut() {
                *v /= piv;
            }
        }
    }
    let mut z2 = vec![0.0; ncols_real + 1];
    z2[..n].copy_from_slice(&lp.objective);
    for (i, row) in rows2.iter().enumerate() {
        let cb = if t.basis[i] < n {
            lp.objective[t.basis[i]]
        } else {
            0.0
        };
        if cb != 0.0 {
            for (zj, &tij) in z2.iter_mut().zip(row) {
                *zj -= cb * tij;
            }
        }
    }
    let mut t2 = Tableau {
        rows: rows2,
        z: z2,
        basis: t.basis,
        ncols: ncols_real,
    };
    t2.optimize(ncols_real)?;

    let mut x = vec![0.0; n];
    for (i, &b) in t2.basis.iter().enumerate() {
        if b < n {
            x[b] = t2.rows[i][ncols_real].max(0.0);
        }
    }
    let objective = lp
        .objective
        .iter()
        .zip(&x)
        .map(|(&c, &v)| c * v)
        .sum::<f64>();
    Ok(LpSolution { x, objective })
}
