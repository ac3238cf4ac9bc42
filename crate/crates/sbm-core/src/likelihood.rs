//! Likelihood of the skewness parameter from one discretely observed path.
//!
//! With grid spacing D = T/n, each step contributes the factor
//!     q_theta / q_0 = 1 + sgn(X_{i+1}) theta exp(-2 (X_i X_{i+1})^+ / D)
//! to the likelihood ratio Z_n(theta), so the whole object is driven by the
//! per-step pairs (s_i, r_i) = (sgn(X_{i+1}), exp(-2 (X_i X_{i+1})^+ / D)).
//! Steps far from zero have r_i below the underflow threshold and drop out;
//! crossing steps have r_i = 1 exactly. The scaled derivatives at zero,
//!     L^(k) = (-1)^{k-1} sum_i (s_i r_i)^k,
//! feed the simple estimator alpha_n = -n^{1/4} L^(1)/L^(2), the Newton
//! solve for the maximum likelihood root, and the higher-order expansion of
//! the root in powers of alpha_n n^{-1/4}.

use crate::error::{Error, Result};
use crate::sim::GridPath;
use crate::special::normal_pdf;
use serde::{Deserialize, Serialize};

/// Scaled log-likelihood derivatives at theta = 0: `l[j]` = L^(j+1), j = 0..K-1.
#[derive(Clone, Debug)]
pub struct DerivativeStack {
    pub n: usize,
    pub t: f64,
    pub l: Vec<f64>,
    pub k_max: usize,
}

/// Default number of derivative orders kept (supports expansions up to p = 4).
pub const K_DEFAULT: usize = 6;

/// Full estimation output for one path. Serializes to JSON with exactly
/// these field names.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EstimateReport {
    pub theta_mle: f64,
    pub alpha_scaled: f64,
    pub alpha_n: f64,
    /// d^(2) .. d^(p+1) from the root expansion (p = 4 with the default stack).
    pub expansion: Vec<f64>,
    /// Expansion estimate of the root using every available order.
    pub theta_expansion: f64,
    pub crossed: bool,
    pub boundary: bool,
    pub solver_iters: u32,
    pub score_residual: f64,
}

fn sgn(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Skew transition density q_theta(delta, x, y).
pub fn transition_density(theta: f64, delta: f64, x: f64, y: f64) -> f64 {
    assert!(delta > 0.0, "delta must be positive");
    assert!(theta.abs() <= 1.0, "theta {theta} outside [-1, 1]");
    normal_pdf(y - x, delta) + sgn(y) * theta * normal_pdf(x.abs() + y.abs(), delta)
}

/// Step kernel [sgn(x+y) exp(-(2/T)(x(x+y))^+)]^k on the scaled grid.
pub fn h_k(k: u32, x: f64, y: f64, t: f64) -> f64 {
    assert!(k >= 1, "k must be >= 1");
    assert!(t > 0.0, "T must be positive");
    let s = x + y;
    let base = sgn(s) * (-(2.0 / t) * (x * s).max(0.0)).exp();
    base.powi(k as i32)
}

/// Per-step factors (s_i, r_i); steps whose r underflows to zero or whose
/// endpoint sits exactly at zero contribute nothing anywhere and are dropped.
fn step_terms(path: &GridPath) -> Vec<(f64, f64)> {
    let delta = path.delta();
    let mut terms = Vec::new();
    for w in path.values.windows(2) {
        let s = sgn(w[1]);
        if s == 0.0 {
            continue;
        }
        let r = (-2.0 * (w[0] * w[1]).max(0.0) / delta).exp();
        if r > 0.0 {
            terms.push((s, r));
        }
    }
    terms
}

/// L^(k)(theta) = (-1)^{k-1} sum_i (s r)^k / (1 + s theta r)^k.
fn derivative_at(terms: &[(f64, f64)], k: u32, theta: f64) -> f64 {
    let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
    let mut sum = 0.0;
    for &(s, r) in terms {
        sum += (s * r / (1.0 + s * theta * r)).powi(k as i32);
    }
    sign * sum
}

/// Derivatives at theta = 0 via the kernel-sum form on the sqrt(n)-scaled grid.
pub fn log_likelihood_derivatives(path: &GridPath, k_max: usize) -> DerivativeStack {
    assert!(k_max >= 2, "need at least two derivative orders");
    let n = path.n();
    let t = path.params.t;
    let sqrt_n = (n as f64).sqrt();
    let mut l = vec![0.0; k_max];
    for w in path.values.windows(2) {
        let x = sqrt_n * w[0];
        let y = sqrt_n * (w[1] - w[0]);
        let s = sgn(x + y);
        if s == 0.0 {
            continue;
        }
        let base = s * (-(2.0 / t) * (x * (x + y)).max(0.0)).exp();
        let mut pow = 1.0;
        for lk in l.iter_mut() {
            pow *= base;
            *lk += pow;
        }
    }
    for (j, lk) in l.iter_mut().enumerate() {
        if j % 2 == 1 {
            *lk = -*lk;
        }
    }
    DerivativeStack { n, t, l, k_max }
}

/// log Z_n(theta); -inf is a legitimate value at theta = +-1 with a crossing.
pub fn log_likelihood_ratio(path: &GridPath, theta: f64) -> f64 {
    assert!(theta.abs() <= 1.0, "theta {theta} outside [-1, 1]");
    step_terms(path)
        .iter()
        .map(|&(s, r)| (s * theta * r).ln_1p())
        .sum()
}

/// Likelihood ratio Z_n(theta) = prod_i (1 + sgn(X_{i+1}) theta r_i).
pub fn likelihood_ratio(path: &GridPath, theta: f64) -> f64 {
    log_likelihood_ratio(path, theta).exp()
}

/// Simple estimator scale: alpha_n = -n^{1/4} L^(1)/L^(2); the skewness
/// estimate itself is alpha_n / n^{1/4}.
pub fn alpha_n(stack: &DerivativeStack) -> Result<f64> {
    if stack.l[1] == 0.0 {
        return Err(Error::Degenerate(
            "L^(2) = 0: no step carries likelihood information".into(),
        ));
    }
    Ok(-(stack.n as f64).powf(0.25) * stack.l[0] / stack.l[1])
}

/// log Z_n(theta / n^{1/4}), the contrast used for the n^{1/4}-rate analysis.
pub fn contrast_log(path: &GridPath, theta: f64) -> Result<f64> {
    let scaled = theta / (path.n() as f64).powf(0.25);
    if scaled.abs() >= 1.0 {
        return Err(Error::Domain(format!(
            "contrast argument {theta} maps to {scaled} outside (-1, 1)"
        )));
    }
    Ok(log_likelihood_ratio(path, scaled))
}

/// Root expansion coefficients d^(1) .. d^(p+1).
///
/// d^(1) = 1 and
///   d^(m+1) = - sum_{k=1}^{m+1} (L^(k+1)/L^(2))
///             sum_{i_1+..+i_k = m+1, 1 <= i_j <= m} d^(i_1) .. d^(i_k),
/// with the composition sum evaluated by dynamic programming over
/// (parts count, target sum).
pub fn expansion_coefficients(stack: &DerivativeStack, p: usize) -> Result<Vec<f64>> {
    if stack.k_max < p + 2 {
        return Err(Error::Domain(format!(
            "expansion order p = {p} needs K >= {}, stack has {}",
            p + 2,
            stack.k_max
        )));
    }
    let l2 = stack.l[1];
    if l2 == 0.0 {
        return Err(Error::Degenerate("L^(2) = 0: expansion undefined".into()));
    }
    let mut d: Vec<f64> = vec![1.0];
    for m in 1..=p {
        let target = m + 1;
        // row[s] = sum over compositions of s into k parts, parts in 1..=m
        let mut row = vec![0.0; target + 1];
        for (s, slot) in row.iter_mut().enumerate().take(m + 1).skip(1) {
            *slot = d[s - 1];
        }
        let mut total = stack.l[1] / l2 * row[target]; // k = 1 (always zero: target > m)
        for k in 2..=target {
            let mut next = vec![0.0; target + 1];
            for s in k..=target {
                let mut acc = 0.0;
                for j in 1..=m.min(s + 1 - k) {
                    acc += d[j - 1] * row[s - j];
                }
                next[s] = acc;
            }
            row = next;
            total += stack.l[k] / l2 * row[target];
        }
        d.push(-total);
    }
    Ok(d)
}

/// Expansion estimate Theta_n = sum_{m=1}^{p+1} d^(m) alpha_n^m n^{-m/4}.
pub fn theta_expansion(stack: &DerivativeStack, p: usize) -> Result<f64> {
    let alpha = alpha_n(stack)?;
    let d = expansion_coefficients(stack, p)?;
    let q = (stack.n as f64).powf(-0.25);
    let mut acc = 0.0;
    let mut pow = 1.0;
    for dm in d {
        pow *= alpha * q;
        acc += dm * pow;
    }
    Ok(acc)
}

const SCORE_EDGE: f64 = 1e-12;
const MAX_ITERS: u32 = 200;

/// Maximum likelihood estimate of the skewness with the full report.
///
/// The score L^(1)(theta) is strictly decreasing wherever some step carries
/// information, so a sign check at the two edges decides between an interior
/// root (Newton with a maintained bisection bracket) and a boundary report
/// at the endpoint maximizing log Z_n.
pub fn mle(path: &GridPath) -> EstimateReport {
    let stack = log_likelihood_derivatives(path, K_DEFAULT);
    let terms = step_terms(path);
    let n = path.n() as f64;

    let (alpha, alpha_scaled, expansion, theta_exp) = match alpha_n(&stack) {
        Ok(a) => {
            let d = expansion_coefficients(&stack, K_DEFAULT - 2).expect("L2 nonzero");
            let te = theta_expansion(&stack, K_DEFAULT - 2).expect("L2 nonzero");
            (a, a / n.powf(0.25), d[1..].to_vec(), te)
        }
        Err(_) => (f64::NAN, f64::NAN, Vec::new(), f64::NAN),
    };

    let mut report = EstimateReport {
        theta_mle: 0.0,
        alpha_scaled,
        alpha_n: alpha,
        expansion,
        theta_expansion: theta_exp,
        crossed: path.crossed,
        boundary: false,
        solver_iters: 0,
        score_residual: 0.0,
    };

    if terms.is_empty() {
        // Every step underflowed: the likelihood is flat. Only reachable for
        // paths pinned away from zero, which also never cross.
        report.theta_mle = if path.crossed { -1.0 } else { 1.0 };
        report.boundary = true;
        return report;
    }

    let lo_edge = -1.0 + SCORE_EDGE;
    let hi_edge = 1.0 - SCORE_EDGE;
    let f_lo = derivative_at(&terms, 1, lo_edge);
    let f_hi = derivative_at(&terms, 1, hi_edge);
    if f_lo <= 0.0 {
        // Score nonpositive on all of (-1, 1): log Z_n is maximal at -1.
        report.theta_mle = -1.0;
        report.boundary = true;
        report.score_residual = f_lo;
        return report;
    }
    if f_hi >= 0.0 {
        report.theta_mle = 1.0;
        report.boundary = true;
        report.score_residual = f_hi;
        return report;
    }

    let mut lo = lo_edge;
    let mut hi = hi_edge;
    let start = if alpha_scaled.is_finite() { alpha_scaled.clamp(-0.99, 0.99) } else { 0.0 };
    let mut theta = start.clamp(lo, hi);
    let mut iters = 0;
    let mut f = derivative_at(&terms, 1, theta);
    while iters < MAX_ITERS {
        iters += 1;
        if f > 0.0 {
            lo = theta;
        } else {
            hi = theta;
        }
        if f.abs() <= 1e-12 || (hi - lo) <= 4.0 * f64::EPSILON {
            break;
        }
        let curvature = derivative_at(&terms, 2, theta);
        let newton = theta - f / curvature;
        theta = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        f = derivative_at(&terms, 1, theta);
    }
    report.theta_mle = theta;
    report.solver_iters = iters;
    report.score_residual = f;
    report
}

/// Score residual helper for tests and diagnostics: L^(1)(theta) on a path.
pub fn score(path: &GridPath, theta: f64) -> f64 {
    derivative_at(&step_terms(path), 1, theta)
}

/// L^(k)(theta) on a path (general theta; k = 1 is the score).
pub fn derivative(path: &GridPath, k: u32, theta: f64) -> f64 {
    derivative_at(&step_terms(path), k, theta)
}
