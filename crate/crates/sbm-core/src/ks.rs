//! Kolmogorov-Smirnov distances and asymptotic p-values.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct KsResult {
    pub d: f64,
    pub p_value: f64,
    pub n_eff: f64,
}

/// Survival function of the Kolmogorov distribution,
/// Q(x) = 2 sum_{j>=1} (-1)^{j-1} e^{-2 j^2 x^2}.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100u32 {
        let term = (-2.0 * (j * j) as f64 * x * x).exp();
        if j % 2 == 1 {
            sum += term;
        } else {
            sum -= term;
        }
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("NaN in KS input"));
    v
}

fn ks_from_cdf_values(sorted_cdf: &[f64]) -> f64 {
    let n = sorted_cdf.len() as f64;
    let mut d: f64 = 0.0;
    for (i, f) in sorted_cdf.iter().enumerate() {
        d = d.max(f - i as f64 / n);
        d = d.max((i + 1) as f64 / n - f);
    }
    d
}

/// One-sample KS test of `samples` against the distribution with CDF `cdf`.
pub fn ks_one_sample(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<KsResult> {
    if samples.is_empty() {
        return Err(Error::Domain("KS test on empty sample".into()));
    }
    let xs = sorted(samples);
    let fs: Vec<f64> = xs.iter().map(|&x| cdf(x)).collect();
    let d = ks_from_cdf_values(&fs);
    let n_eff = samples.len() as f64;
    Ok(KsResult { d, p_value: kolmogorov_sf(n_eff.sqrt() * d), n_eff })
}

/// One-sample KS from precomputed CDF values at the sorted sample points;
/// for reference CDFs that are expensive to evaluate pointwise.
pub fn ks_one_sample_precomputed(sorted_cdf_values: &[f64]) -> Result<KsResult> {
    if sorted_cdf_values.is_empty() {
        return Err(Error::Domain("KS test on empty sample".into()));
    }
    let d = ks_from_cdf_values(sorted_cdf_values);
    let n_eff = sorted_cdf_values.len() as f64;
    Ok(KsResult { d, p_value: kolmogorov_sf(n_eff.sqrt() * d), n_eff })
}

/// Two-sample KS test; ties are handled by comparing the two empirical CDFs
/// only after all equal values have been consumed.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Domain("KS test on empty sample".into()));
    }
    let xs = sorted(a);
    let ys = sorted(b);
    let (n, m) = (xs.len(), ys.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let v = xs[i].min(ys[j]);
        while i < n && xs[i] <= v {
            i += 1;
        }
        while j < m && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let n_eff = (n * m) as f64 / (n + m) as f64;
    Ok(KsResult { d, p_value: kolmogorov_sf(n_eff.sqrt() * d), n_eff })
}
