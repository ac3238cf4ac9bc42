//! Two-sided test of zero skewness from one observed path.
//!
//! The statistic is n^{1/4} theta_n. Because Var(alpha_n) drifts visibly
//! with n at practical sample sizes, the preferred calibration simulates
//! the null at the observed n rather than trusting the limit law; the
//! asymptotic mode rescales the Upsilon quantile by a variance table the
//! caller obtained from such simulations.

use crate::error::{Error, Result};
use crate::likelihood::mle;
use crate::limit::upsilon_quantile;
use crate::rng::RngStream;
use crate::sim::{simulate_path, GridPath, SbmParams};
use crate::stats::quantile;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Var(alpha_n) by n, plus the sample variance of the Upsilon pool the
/// alpha variances are compared against.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VarianceTable {
    pub entries: Vec<(usize, f64)>,
    pub upsilon_variance: f64,
}

#[derive(Clone, Debug)]
pub enum Calibration {
    /// Simulate `reps` null paths at the observed n and take the empirical
    /// quantile of the signed statistic.
    MonteCarlo { reps: usize, seed: u64 },
    /// Externally supplied critical value for |statistic|.
    Threshold { value: f64 },
    /// Upsilon quantile rescaled by sqrt(Var(alpha_n)/Var(Upsilon)) using
    /// the table entry nearest to the observed n.
    Asymptotic { table: VarianceTable },
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TestOutcome {
    pub reject: bool,
    pub statistic: f64,
    pub threshold: f64,
    pub level: f64,
    /// True when the MLE sat on the boundary and alpha_n was tested instead.
    pub used_alpha: bool,
}

/// Signed null statistics n^{1/4} theta_n from `reps` paths at theta = 0;
/// one-sided paths enter as +-n^{1/4} (their MLE is +-1). One RNG stream
/// per replication, so any worker count gives the same set.
///
/// The quantiles of this sample carry an atom at +-n^{1/4} of mass about
/// 0.8/sqrt(n) per side; `reps` must be large enough to resolve the
/// requested quantile against it (a few thousand at n = 1000).
pub fn null_statistic_sample(n: usize, t: f64, x0: f64, reps: usize, seed: u64) -> Vec<f64> {
    let params = SbmParams::new(0.0, x0, t, n).expect("null simulation parameters");
    let scale = (n as f64).powf(0.25);
    (0..reps as u64)
        .into_par_iter()
        .map(|rep| {
            let mut stream = RngStream::new(seed, rep);
            let path = simulate_path(&params, &mut stream).expect("validated params");
            scale * mle(&path).theta_mle
        })
        .collect()
}

/// Test H0: theta = 0 against theta != 0 at the given level.
pub fn hypothesis_test(path: &GridPath, level: f64, calibration: &Calibration) -> Result<TestOutcome> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Domain(format!("test level {level} outside (0, 1)")));
    }
    let n = path.n();
    let scale = (n as f64).powf(0.25);
    let report = mle(path);
    let (statistic, used_alpha) = if report.boundary && report.alpha_n.is_finite() {
        (report.alpha_n, true)
    } else {
        (scale * report.theta_mle, false)
    };
    let threshold = match calibration {
        Calibration::MonteCarlo { reps, seed } => {
            if *reps < 20 {
                return Err(Error::Domain("Monte Carlo calibration needs reps >= 20".into()));
            }
            let null = null_statistic_sample(n, path.params.t, path.values[0].abs(), *reps, *seed);
            quantile(&null, 1.0 - level / 2.0)
        }
        Calibration::Threshold { value } => {
            if !(*value >= 0.0) {
                return Err(Error::Domain(format!("threshold {value} must be >= 0")));
            }
            *value
        }
        Calibration::Asymptotic { table } => {
            if table.entries.is_empty() {
                return Err(Error::InsufficientData("empty variance table".into()));
            }
            if !(table.upsilon_variance > 0.0) {
                return Err(Error::Domain("upsilon_variance must be positive".into()));
            }
            let (_, var_alpha) = table
                .entries
                .iter()
                .min_by_key(|(m, _)| m.abs_diff(n))
                .copied()
                .expect("nonempty table");
            upsilon_quantile(1.0 - level / 2.0)? * (var_alpha / table.upsilon_variance).sqrt()
        }
    };
    Ok(TestOutcome { reject: statistic.abs() > threshold, statistic, threshold, level, used_alpha })
}
