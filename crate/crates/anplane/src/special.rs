//! Special functions needed by the closed-form critic distances.
//!
//! Only the domains that actually occur are supported, each with an explicit
//! accuracy contract checked by the frozen-oracle tests:
//!
//! | function | domain | contract |
//! |---|---|---|
//! | [`log_gamma`] | x > 0 | 1e-10 relative |
//! | [`normal_cdf`] | all finite x | 1e-10 relative, both tails |
//! | [`kummer_m_log`] | a ≤ 0, b = ½, z ≤ 0 | 1e-8 relative on ln M |
//! | [`bivariate_normal_cdf`] | ρ ∈ [−1, 1] | 1e-7 absolute |
//!
//! `M(-p/2, ½, z)` with z ≤ 0 is strictly positive, so its logarithm is
//! always defined; the closed forms combine everything in log space to keep
//! extreme arguments (|z| up to ~1e18) finite.

use crate::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const SQRT_2: f64 = std::f64::consts::SQRT_2;
const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

// ============================================================================
// log-gamma (Lanczos, g = 7, 9 terms)
// ============================================================================

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function.
///
/// Poles (x = 0, -1, -2, ...) return infinity. Negative non-integer x goes
/// through the reflection formula.
pub fn log_gamma(x: f64) -> f64 {
    if x <= 0.0 {
        if x == x.floor() {
            return f64::INFINITY;
        }
        // reflection: ln Γ(x) = ln(π / |sin(πx)|) − ln Γ(1 − x)
        let s = (std::f64::consts::PI * x).sin().abs();
        return std::f64::consts::PI.ln() - s.ln() - log_gamma(1.0 - x);
    }
    if x < 0.5 {
        // shift up once to keep the Lanczos sum well conditioned
        return log_gamma(x + 1.0) - x.ln();
    }
    let z = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + acc.ln()
}

// ============================================================================
// standard normal CDF
// ============================================================================

/// erf by the non-alternating confluent series; stable for z in [0, ~3].
fn erf_series(z: f64) -> f64 {
    // erf(z) = (2/√π)·z·e^{−z²}·Σ_k (2z²)^k / (1·3·5···(2k+1))
    let zz2 = 2.0 * z * z;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut denom = 1.0;
    for _ in 1..200 {
        denom += 2.0;
        term *= zz2 / denom;
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    FRAC_2_SQRT_PI * z * (-z * z).exp() * sum
}

/// erfc by the Legendre continued fraction (modified Lentz); for z ≥ 1.5.
fn erfc_cf(z: f64) -> f64 {
    // erfc(z) = e^{−z²}/√π · 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))
    let tiny = 1e-300;
    let mut f = z.max(tiny);
    let mut c = f;
    let mut d = 0.0;
    let mut a = 0.5;
    for _ in 0..500 {
        d = z + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = z + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
        a += 0.5;
    }
    (-z * z).exp() / (std::f64::consts::PI.sqrt() * f)
}

/// Complementary error function, accurate in the far tail.
pub fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 1.5 {
        1.0 - erf_series(x)
    } else {
        erfc_cf(x)
    }
}

/// Standard normal CDF Φ(x), relative accuracy 1e-10 in both tails.
pub fn normal_cdf(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 - 0.5 * erfc(x / SQRT_2)
    } else {
        0.5 * erfc(-x / SQRT_2)
    }
}

// ============================================================================
// Kummer's M(a, ½, z) on a ≤ 0, z ≤ 0
// ============================================================================

/// Online log-sum-exp accumulator for positive-term series.
fn log_add(ls: f64, lt: f64) -> f64 {
    if ls == f64::NEG_INFINITY {
        return lt;
    }
    let (hi, lo) = if ls >= lt { (ls, lt) } else { (lt, ls) };
    hi + (lo - hi).exp().ln_1p()
}

fn check_kummer_domain(a: f64, b: f64, z: f64) -> Result<()> {
    if !(a <= 0.0 && b == 0.5 && z <= 0.0) || !a.is_finite() || !z.is_finite() {
        return Err(Error::OutOfRange {
            msg: format!("kummer_m supports a <= 0, b = 1/2, z <= 0; got ({a}, {b}, {z})"),
        });
    }
    Ok(())
}

/// Terminating polynomial for a = −n (n a non-negative integer).
///
/// Every term (−n)_k z^k / ((½)_k k!) is non-negative when z ≤ 0, so summing
/// their logs is cancellation-free at any |z|.
fn kummer_log_poly(n: u32, z: f64) -> f64 {
    let mut ls = 0.0; // log of the k = 0 term
    let mut lt = 0.0;
    for k in 0..n {
        let kf = k as f64;
        let ratio = (kf - n as f64) * z / ((0.5 + kf) * (kf + 1.0));
        debug_assert!(ratio >= 0.0);
        if ratio == 0.0 {
            break;
        }
        lt += ratio.ln();
        ls = log_add(ls, lt);
    }
    ls
}

/// Convergent branch via Kummer's transformation M(a,b,z) = e^z·M(b−a, b, −z).
///
/// With b − a > 0 and −z ≥ 0 every term of the transformed series is
/// positive; accumulation happens in log space so large parameters cannot
/// overflow. Cost grows like O(|z| + √((b−a)·|z|)) iterations.
fn kummer_log_transformed(a: f64, z: f64) -> f64 {
    let big_a = 0.5 - a;
    let x = -z;
    let mut ls = 0.0;
    let mut lt = 0.0;
    let mut k = 0.0_f64;
    let settle = 2.0 + x + 2.0 * ((big_a + 1.0) * x).sqrt();
    loop {
        let ratio = (big_a + k) * x / ((0.5 + k) * (k + 1.0));
        if ratio == 0.0 {
            break;
        }
        lt += ratio.ln();
        ls = log_add(ls, lt);
        k += 1.0;
        if k > settle && lt < ls - 40.0 {
            break;
        }
    }
    z + ls
}

/// Large-|z| branch: M(a,b,z) ≈ Γ(b)/Γ(b−a)·(−z)^{−a}·Σ_n (a)_n(a−b+1)_n/(n!(−z)^n).
///
/// Truncated at the smallest term; chosen only when |z| ≥ max(50, 5p²), so
/// the leading term ratio is ≤ ~1/16, the partial sums stay within f64
/// range, and both the truncation and the dropped e^z branch sit far below
/// the 1e-8 contract. For odd integer p the series terminates exactly.
fn kummer_log_asymptotic(a: f64, b: f64, z: f64) -> f64 {
    let x = -z;
    let mut sum = 1.0;
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    for n in 0..400 {
        let nf = n as f64;
        let factor = (a + nf) * (a - b + 1.0 + nf) / ((nf + 1.0) * x);
        term *= factor;
        if term == 0.0 || term.abs() >= prev {
            break;
        }
        prev = term.abs();
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    log_gamma(b) - log_gamma(b - a) + (-a) * x.ln() + sum.ln()
}

/// Natural log of Kummer's M(a, b, z) on the supported domain
/// (a ≤ 0, b = ½, z ≤ 0, where M is strictly positive).
pub fn kummer_m_log(a: f64, b: f64, z: f64) -> Result<f64> {
    check_kummer_domain(a, b, z)?;
    if z == 0.0 || a == 0.0 {
        return Ok(0.0);
    }
    let p = -2.0 * a;
    let half_p = p / 2.0;
    if half_p == half_p.floor() && half_p <= u32::MAX as f64 {
        return Ok(kummer_log_poly(half_p as u32, z));
    }
    if -z >= 50.0_f64.max(5.0 * p * p) {
        return Ok(kummer_log_asymptotic(a, b, z));
    }
    Ok(kummer_log_transformed(a, z))
}

/// Kummer's M(a, b, z) on the supported domain. Overflows to infinity when
/// ln M exceeds ~709; use [`kummer_m_log`] for extreme arguments.
pub fn kummer_m(a: f64, b: f64, z: f64) -> Result<f64> {
    Ok(kummer_m_log(a, b, z)?.exp())
}

// ============================================================================
// bivariate normal CDF
// ============================================================================

/// Gauss-Legendre nodes/weights on [-1, 1], generated once by Newton
/// iteration on the Legendre polynomial.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    let nf = n as f64;
    for i in 0..n {
        // Chebyshev-based initial guess for the i-th root
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            // evaluate P_n and P_n' by upward recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            pp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / pp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * pp * pp);
        out.push((x, w));
    }
    out
}

fn gl_nodes_96() -> &'static [(f64, f64)] {
    use std::sync::OnceLock;
    static NODES: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    NODES.get_or_init(|| gauss_legendre(96))
}

/// ∫_lo^hi f via the fixed 96-point Gauss-Legendre rule.
fn gl96<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> f64 {
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut acc = 0.0;
    for &(x, w) in gl_nodes_96() {
        acc += w * f(mid + half * x);
    }
    acc * half
}

#[allow(clippy::too_many_arguments)] // cached endpoint/midpoint values avoid re-evaluating f
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    flo: f64,
    fmid: f64,
    fhi: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let mid = 0.5 * (lo + hi);
    let lmid = 0.5 * (lo + mid);
    let rmid = 0.5 * (mid + hi);
    let flm = f(lmid);
    let frm = f(rmid);
    let left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
    let right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_rec(f, lo, mid, flo, flm, fmid, left, tol / 2.0, depth - 1)
        + simpson_rec(f, mid, hi, fmid, frm, fhi, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature with absolute tolerance.
fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> f64 {
    let mid = 0.5 * (lo + hi);
    let (flo, fmid, fhi) = (f(lo), f(mid), f(hi));
    let whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    simpson_rec(&f, lo, hi, flo, fmid, fhi, whole, tol, 40)
}

/// Standard bivariate normal CDF: P(X ≤ a, Y ≤ b) with correlation rho.
///
/// Moderate correlations integrate the single-integral arcsin reduction with
/// a fixed 96-point Gauss-Legendre rule; |rho| near 1 switches to the
/// complement of the tail integral toward rho = 1, where the integrand stays
/// bounded. Absolute accuracy 1e-7 (typically far better).
pub fn bivariate_normal_cdf(a: f64, b: f64, rho: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&rho) {
        return Err(Error::OutOfRange {
            msg: format!("correlation must lie in [-1, 1], got {rho}"),
        });
    }
    let pa = normal_cdf(a);
    let pb = normal_cdf(b);
    let raw = if rho == 0.0 {
        pa * pb
    } else if rho == 1.0 {
        pa.min(pb)
    } else if rho == -1.0 {
        (pa + pb - 1.0).max(0.0)
    } else if rho.abs() <= 0.925 {
        // Φ(a)Φ(b) + (1/2π)·∫_0^{asin ρ} exp(−(a²+b²−2ab·sinθ)/(2cos²θ)) dθ
        let g = |theta: f64| {
            let s = theta.sin();
            let c2 = 1.0 - s * s;
            (-(a * a + b * b - 2.0 * a * b * s) / (2.0 * c2)).exp()
        };
        pa * pb + gl96(g, 0.0, rho.asin()) / (2.0 * std::f64::consts::PI)
    } else if rho > 0.925 {
        // Φ2(a,b,ρ) = Φ(min(a,b)) − (1/2π)·∫_0^{π/2−asin ρ} h(u) du,
        // h(u) = exp(−(a−b)²/(2sin²u) − ab/(2cos²(u/2))), h(0+) well defined
        let c = (a - b) * (a - b);
        let h = move |u: f64| {
            if u == 0.0 {
                return if c == 0.0 { (-a * b / 2.0).exp() } else { 0.0 };
            }
            let s = u.sin();
            let ch = (u / 2.0).cos();
            (-c / (2.0 * s * s) - a * b / (2.0 * ch * ch)).exp()
        };
        let umax = std::f64::consts::FRAC_PI_2 - rho.asin();
        pa.min(pb) - adaptive_simpson(h, 0.0, umax, 1e-11) / (2.0 * std::f64::consts::PI)
    } else {
        // flip the sign of rho: P(X≤a, Y≤b) = Φ(a) − P(X≤a, −Y≤−b)
        pa - bivariate_normal_cdf(a, -b, -rho)?
    };
    // Fréchet bounds absorb quadrature round-off at the extremes
    Ok(raw.max((pa + pb - 1.0).max(0.0)).min(pa.min(pb)))
}

// ============================================================================
// tests
// ============================================================================
