//! Monte Carlo studies of the skewness estimators on simulated paths.
//!
//! Every study draws one RNG stream per replication, keyed by
//! (n index << 32) | replication, and aggregates in index order, so the
//! output is byte-identical for a fixed (config, seed) no matter how many
//! workers run the replications. Auxiliary pools (the Upsilon pool, the
//! null reference of the histogram study) live in stream-id blocks far
//! above the path block to keep draws disjoint.

use crate::error::{Error, Result};
use crate::ks::{ks_one_sample, ks_two_sample};
use crate::likelihood::{mle, EstimateReport};
use crate::limit::draw_upsilon;
use crate::quad::integrate_interval;
use crate::rng::RngStream;
use crate::sim::{simulate_path, GridPath, SbmParams};
use crate::special::normal_cdf;
use crate::stats::{mean, ols_slope, quantile, std_dev, variance};
use rayon::prelude::*;
use serde::Serialize;

/// Stream-id block for draws that are not tied to one replication.
const POOL_STREAM_BASE: u64 = 1 << 48;
/// Stream-id block for the null reference run of the histogram study.
const NULL_STREAM_BASE: u64 = 1 << 40;

#[derive(Clone, Debug, Serialize)]
pub struct StudyConfig {
    pub n_list: Vec<usize>,
    pub replications: usize,
    pub seed: u64,
    pub theta: f64,
    pub x0: f64,
    pub t: f64,
}

/// One study run: raw per-replication rows plus the aggregated table that
/// the CSV export renders.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentResult {
    pub name: String,
    pub config: StudyConfig,
    pub record_columns: Vec<String>,
    /// replications x |n_list| rows, ordered by (n index, replication).
    pub records: Vec<Vec<f64>>,
    pub table_columns: Vec<String>,
    pub table: Vec<Vec<f64>>,
    pub summary: Vec<(String, f64)>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PowerLawFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

fn columns(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// MLE reports for `reps` paths at each n, ordered by (n index, rep).
fn reports_over_grid(
    n_list: &[usize],
    reps: usize,
    seed: u64,
    theta: f64,
    stream_base: u64,
) -> Result<Vec<Vec<EstimateReport>>> {
    n_list
        .iter()
        .enumerate()
        .map(|(ni, &n)| {
            let params = SbmParams::new(theta, 0.0, 1.0, n)?;
            Ok((0..reps as u64)
                .into_par_iter()
                .map(|rep| {
                    let id = stream_base + ((ni as u64) << 32) + rep;
                    let mut stream = RngStream::new(seed, id);
                    let path = simulate_path(&params, &mut stream).expect("validated params");
                    mle(&path)
                })
                .collect())
        })
        .collect()
}

/// Spread between the MLE and the first-order estimator alpha_n / n^{1/4}
/// at theta = 0, aggregated per n.
///
/// Every replication enters the statistics. One-sided paths put the MLE on
/// the boundary while alpha_n / n^{1/4} overshoots past it; those few large
/// gaps dominate the mean and the standard deviation, which is why both sit
/// well above the median. The boundary replication count is reported per n.
pub fn table1_study(n_list: &[usize], reps: usize, seed: u64) -> Result<ExperimentResult> {
    if reps < 2 {
        return Err(Error::Domain(format!("table1 needs reps >= 2, got {reps}")));
    }
    let grid = reports_over_grid(n_list, reps, seed, 0.0, 0)?;
    let mut records = Vec::with_capacity(n_list.len() * reps);
    let mut table = Vec::with_capacity(n_list.len());
    let mut summary = Vec::new();
    for (ni, &n) in n_list.iter().enumerate() {
        let scale34 = (n as f64).powf(0.75);
        let mut gaps = Vec::with_capacity(reps);
        let mut boundary = 0usize;
        for (rep, report) in grid[ni].iter().enumerate() {
            let u = report.alpha_scaled;
            if report.boundary {
                boundary += 1;
            }
            // u is non-finite only when no step carries information, which
            // needs a path pinned away from zero; unreachable from x0 = 0
            if u.is_finite() {
                gaps.push((report.theta_mle - u).abs());
            }
            records.push(vec![
                n as f64,
                rep as f64,
                report.theta_mle,
                u,
                if report.boundary { 1.0 } else { 0.0 },
            ]);
        }
        if gaps.is_empty() {
            return Err(Error::InsufficientData(format!(
                "no usable replication at n = {n}"
            )));
        }
        let m = mean(&gaps);
        table.push(vec![
            n as f64,
            m,
            (n as f64).sqrt() * m,
            scale34 * m,
            std_dev(&gaps),
            quantile(&gaps, 0.9),
            boundary as f64,
        ]);
        summary.push((format!("boundary_frac_n{n}"), boundary as f64 / reps as f64));
        summary.push((format!("mean_gap_n{n}"), m));
    }
    Ok(ExperimentResult {
        name: "table1".into(),
        config: StudyConfig {
            n_list: n_list.to_vec(),
            replications: reps,
            seed,
            theta: 0.0,
            x0: 0.0,
            t: 1.0,
        },
        record_columns: columns(&["n", "rep", "theta_mle", "alpha_scaled", "boundary"]),
        records,
        table_columns: columns(&[
            "n",
            "mean",
            "mean_n12",
            "mean_n34",
            "std",
            "q90",
            "boundary_count",
        ]),
        table,
        summary,
    })
}

/// Distribution of alpha_n at theta = 0 against the limit law and against
/// a normal with the same variance, per n.
///
/// The Upsilon pool is rescaled to the sample variance of alpha_n before
/// the two-sample comparison; the normal comparison is one-sample against
/// N(0, Var(alpha_n)). All finite alpha values enter, including those from
/// one-sided paths: both laws share the same heavy tail, and dropping the
/// large alpha values while keeping the pool's tail would skew the scale
/// match. Boundary and outside-(-1,1) counts are still reported per n.
pub fn table2_study(
    n_list: &[usize],
    reps: usize,
    upsilon_pool_size: usize,
    seed: u64,
) -> Result<ExperimentResult> {
    if reps < 100 {
        return Err(Error::Domain(format!("table2 needs reps >= 100, got {reps}")));
    }
    if upsilon_pool_size < 100 {
        return Err(Error::Domain("table2 needs an Upsilon pool of at least 100".into()));
    }
    let mut pool_stream = RngStream::new(seed, POOL_STREAM_BASE);
    let pool: Vec<f64> = (0..upsilon_pool_size)
        .map(|_| draw_upsilon(&mut pool_stream).value)
        .collect();
    let pool_var = variance(&pool);
    let grid = reports_over_grid(n_list, reps, seed, 0.0, 0)?;
    let mut records = Vec::with_capacity(n_list.len() * reps);
    let mut table = Vec::with_capacity(n_list.len());
    let mut summary = vec![("upsilon_pool".to_string(), upsilon_pool_size as f64)];
    for (ni, &n) in n_list.iter().enumerate() {
        let mut alphas = Vec::with_capacity(reps);
        let mut excluded = 0usize;
        let mut boundary = 0usize;
        let mut outside = 0usize;
        for (rep, report) in grid[ni].iter().enumerate() {
            let kept = report.alpha_n.is_finite();
            if kept {
                alphas.push(report.alpha_n);
            } else {
                excluded += 1;
            }
            if report.boundary {
                boundary += 1;
            }
            if !(report.alpha_scaled.abs() < 1.0) {
                outside += 1;
            }
            records.push(vec![
                n as f64,
                rep as f64,
                report.alpha_n,
                if kept { 1.0 } else { 0.0 },
            ]);
        }
        if alphas.len() < 100 {
            return Err(Error::InsufficientData(format!(
                "only {} usable alpha values at n = {n}",
                alphas.len()
            )));
        }
        let alpha_var = variance(&alphas);
        let s = (alpha_var / pool_var).sqrt();
        let scaled: Vec<f64> = pool.iter().map(|v| v * s).collect();
        let ks_u = ks_two_sample(&alphas, &scaled)?;
        let sd = alpha_var.sqrt();
        let ks_n = ks_one_sample(&alphas, |x| normal_cdf(x / sd))?;
        table.push(vec![
            n as f64,
            ks_u.d,
            ks_u.p_value,
            ks_n.d,
            ks_n.p_value,
            excluded as f64,
        ]);
        summary.push((format!("d_upsilon_n{n}"), ks_u.d));
        summary.push((format!("d_normal_n{n}"), ks_n.d));
        summary.push((format!("boundary_n{n}"), boundary as f64));
        summary.push((format!("inside_frac_n{n}"), 1.0 - outside as f64 / reps as f64));
    }
    Ok(ExperimentResult {
        name: "table2".into(),
        config: StudyConfig {
            n_list: n_list.to_vec(),
            replications: reps,
            seed,
            theta: 0.0,
            x0: 0.0,
            t: 1.0,
        },
        record_columns: columns(&["n", "rep", "alpha_n", "kept"]),
        records,
        table_columns: columns(&[
            "n",
            "d_upsilon",
            "p_upsilon",
            "d_normal",
            "p_normal",
            "excluded",
        ]),
        table,
        summary,
    })
}

/// OLS fit of log y on log x for strictly positive points.
pub fn power_law_slope(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 3 {
        return Err(Error::Domain(format!(
            "power-law fit needs >= 3 points, got {}",
            points.len()
        )));
    }
    let mut xs = Vec::with_capacity(points.len());
    let mut ys = Vec::with_capacity(points.len());
    for &(x, y) in points {
        if !(x > 0.0 && y > 0.0) {
            return Err(Error::Domain(format!(
                "power-law fit needs positive points, got ({x}, {y})"
            )));
        }
        xs.push(x.ln());
        ys.push(y.ln());
    }
    let (slope, intercept, r2) = ols_slope(&xs, &ys)?;
    Ok(PowerLawFit { slope, intercept, r2 })
}

/// Empirical convergence rate of the MLE: slope of log std(theta_n) in
/// log n over theta = 0 paths. Boundary estimates are excluded per n and
/// counted in the table.
pub fn rate_regression(
    n_list: &[usize],
    reps: usize,
    seed: u64,
) -> Result<(PowerLawFit, ExperimentResult)> {
    if n_list.len() < 3 {
        return Err(Error::Domain("rate regression needs at least 3 values of n".into()));
    }
    if reps < 10 {
        return Err(Error::Domain(format!("rate regression needs reps >= 10, got {reps}")));
    }
    let grid = reports_over_grid(n_list, reps, seed, 0.0, 0)?;
    let mut records = Vec::with_capacity(n_list.len() * reps);
    let mut table = Vec::with_capacity(n_list.len());
    let mut points = Vec::with_capacity(n_list.len());
    for (ni, &n) in n_list.iter().enumerate() {
        let mut kept = Vec::with_capacity(reps);
        let mut excluded = 0usize;
        for (rep, report) in grid[ni].iter().enumerate() {
            if report.boundary {
                excluded += 1;
            } else {
                kept.push(report.theta_mle);
            }
            records.push(vec![
                n as f64,
                rep as f64,
                report.theta_mle,
                if report.boundary { 0.0 } else { 1.0 },
            ]);
        }
        if kept.len() < 10 {
            return Err(Error::InsufficientData(format!(
                "only {} interior estimates at n = {n}",
                kept.len()
            )));
        }
        let sd = std_dev(&kept);
        points.push((n as f64, sd));
        table.push(vec![n as f64, sd, excluded as f64]);
    }
    let fit = power_law_slope(&points)?;
    let summary = vec![
        ("slope".to_string(), fit.slope),
        ("intercept".to_string(), fit.intercept),
        ("r2".to_string(), fit.r2),
    ];
    Ok((
        fit,
        ExperimentResult {
            name: "rate".into(),
            config: StudyConfig {
                n_list: n_list.to_vec(),
                replications: reps,
                seed,
                theta: 0.0,
                x0: 0.0,
                t: 1.0,
            },
            record_columns: columns(&["n", "rep", "theta_mle", "kept"]),
            records,
            table_columns: columns(&["n", "std_theta", "boundary_count"]),
            table,
            summary,
        },
    ))
}

/// Growth of Var(alpha_n) with n: slope of log Var(alpha_n) in log n.
pub fn variance_scaling(
    n_list: &[usize],
    reps: usize,
    seed: u64,
) -> Result<(PowerLawFit, ExperimentResult)> {
    if n_list.len() < 3 {
        return Err(Error::Domain("variance scaling needs at least 3 values of n".into()));
    }
    if reps < 10 {
        return Err(Error::Domain(format!("variance scaling needs reps >= 10, got {reps}")));
    }
    let grid = reports_over_grid(n_list, reps, seed, 0.0, 0)?;
    let mut records = Vec::with_capacity(n_list.len() * reps);
    let mut table = Vec::with_capacity(n_list.len());
    let mut points = Vec::with_capacity(n_list.len());
    for (ni, &n) in n_list.iter().enumerate() {
        let mut alphas = Vec::with_capacity(reps);
        let mut excluded = 0usize;
        for (rep, report) in grid[ni].iter().enumerate() {
            let kept = report.alpha_n.is_finite();
            if kept {
                alphas.push(report.alpha_n);
            } else {
                excluded += 1;
            }
            records.push(vec![
                n as f64,
                rep as f64,
                report.alpha_n,
                if kept { 1.0 } else { 0.0 },
            ]);
        }
        if alphas.len() < 10 {
            return Err(Error::InsufficientData(format!(
                "only {} usable alpha values at n = {n}",
                alphas.len()
            )));
        }
        let var = variance(&alphas);
        points.push((n as f64, var));
        table.push(vec![n as f64, var, excluded as f64]);
    }
    let fit = power_law_slope(&points)?;
    let summary = vec![
        ("slope".to_string(), fit.slope),
        ("intercept".to_string(), fit.intercept),
        ("r2".to_string(), fit.r2),
    ];
    Ok((
        fit,
        ExperimentResult {
            name: "var-scaling".into(),
            config: StudyConfig {
                n_list: n_list.to_vec(),
                replications: reps,
                seed,
                theta: 0.0,
                x0: 0.0,
                t: 1.0,
            },
            record_columns: columns(&["n", "rep", "alpha_n", "kept"]),
            records,
            table_columns: columns(&["n", "var_alpha", "excluded"]),
            table,
            summary,
        },
    ))
}

/// Binned density of alpha_n / n^{1/4} under the given theta next to the
/// theta = 0 reference at the same n, on a fixed [-1.5, 1.5] grid.
///
/// Values outside the grid are dropped and counted in the summary;
/// non-finite alpha values are dropped the same way.
pub fn power_histogram(
    theta: f64,
    n: usize,
    reps: usize,
    bins: usize,
    seed: u64,
) -> Result<ExperimentResult> {
    if bins < 3 {
        return Err(Error::Domain(format!("histogram needs bins >= 3, got {bins}")));
    }
    if reps < 100 {
        return Err(Error::Domain(format!("histogram needs reps >= 100, got {reps}")));
    }
    let n_list = [n];
    let run = reports_over_grid(&n_list, reps, seed, theta, 0)?;
    let null = reports_over_grid(&n_list, reps, seed, 0.0, NULL_STREAM_BASE)?;
    let lo = -1.5;
    let hi = 1.5;
    let width = (hi - lo) / bins as f64;
    let mut counts_run = vec![0usize; bins];
    let mut counts_null = vec![0usize; bins];
    let mut dropped_run = 0usize;
    let mut dropped_null = 0usize;
    let mut records = Vec::with_capacity(reps);
    let tally = |u: f64, counts: &mut Vec<usize>, dropped: &mut usize| {
        if u.is_finite() && u >= lo && u < hi {
            counts[((u - lo) / width) as usize] += 1;
        } else {
            *dropped += 1;
        }
    };
    let mut null_values = Vec::with_capacity(reps);
    for rep in 0..reps {
        let u_run = run[0][rep].alpha_scaled;
        let u_null = null[0][rep].alpha_scaled;
        tally(u_run, &mut counts_run, &mut dropped_run);
        tally(u_null, &mut counts_null, &mut dropped_null);
        if u_null.is_finite() && u_null.abs() <= hi {
            null_values.push(u_null);
        }
        records.push(vec![n as f64, rep as f64, u_run, u_null]);
    }
    let kept_run = reps - dropped_run;
    let kept_null = reps - dropped_null;
    if kept_run == 0 || kept_null == 0 {
        return Err(Error::InsufficientData("every replication fell outside the grid".into()));
    }
    let mut table = Vec::with_capacity(bins);
    let mut mode_bin = 0usize;
    for b in 0..bins {
        let center = lo + (b as f64 + 0.5) * width;
        table.push(vec![
            center,
            counts_run[b] as f64 / (kept_run as f64 * width),
            counts_null[b] as f64 / (kept_null as f64 * width),
        ]);
        if counts_run[b] > counts_run[mode_bin] {
            mode_bin = b;
        }
    }
    // Skewness over the grid-supported values only: the raw alpha_scaled
    // tail is too heavy for the third moment to settle.
    let m = mean(&null_values);
    let sd = std_dev(&null_values);
    let skew = null_values.iter().map(|v| ((v - m) / sd).powi(3)).sum::<f64>()
        / null_values.len() as f64;
    let summary = vec![
        ("bins".to_string(), bins as f64),
        ("mode_center".to_string(), lo + (mode_bin as f64 + 0.5) * width),
        ("dropped_run".to_string(), dropped_run as f64),
        ("dropped_null".to_string(), dropped_null as f64),
        ("null_skewness".to_string(), skew),
    ];
    Ok(ExperimentResult {
        name: "power".into(),
        config: StudyConfig {
            n_list: vec![n],
            replications: reps,
            seed,
            theta,
            x0: 0.0,
            t: 1.0,
        },
        record_columns: columns(&["n", "rep", "alpha_scaled", "alpha_scaled_null"]),
        records,
        table_columns: columns(&["bin_center", "density", "density_null"]),
        table,
        summary,
    })
}

/// Normalized occupation-style sum n^{-1/2} sum_i h(sqrt(n/T) X_i,
/// sqrt(n/T) (X_{i+1} - X_i)). For integrable h this tracks c(h) times
/// the local time at 0 of the time-rescaled path (ell_T / sqrt(T)).
pub fn jacod_sum(path: &GridPath, h: impl Fn(f64, f64) -> f64) -> f64 {
    let n = path.n();
    let root = (n as f64 / path.params.t).sqrt();
    let mut sum = 0.0;
    for i in 0..n {
        let x = path.values[i];
        let dx = path.values[i + 1] - x;
        sum += h(root * x, root * dx);
    }
    sum / (n as f64).sqrt()
}

/// The constant c(h) = integral of h(x, y) against dx and the standard
/// normal law of y, by nested quadrature over [-x_bound, x_bound] x [-10, 10].
pub fn jacod_constant(h: impl Fn(f64, f64) -> f64, x_bound: f64, tol: f64) -> Result<f64> {
    if !(x_bound > 0.0) || !(tol > 0.0) {
        return Err(Error::Domain("jacod_constant needs positive bound and tolerance".into()));
    }
    let outer = integrate_interval(
        |x| {
            integrate_interval(|y| h(x, y) * crate::special::normal_pdf(y, 1.0), -10.0, 10.0, tol)
                .map(|r| r.value)
                .unwrap_or(f64::NAN)
        },
        -x_bound,
        x_bound,
        tol,
    )?;
    if !outer.value.is_finite() {
        return Err(Error::Accuracy { value: outer.value, error_bound: f64::NAN });
    }
    Ok(outer.value)
}
