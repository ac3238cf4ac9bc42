//! The n^{1/4} limit law of the skewness estimators.
//!
//! Two ingredients. First the constants mu_k: semi-infinite Gaussian-tail
//! integrals that normalize the scaled derivative sums L^(k). Second the
//! limit variable Upsilon = W(l_1)/l_1, a centered normal with random
//! precision equal to the Brownian local time at zero. Since
//! l_1 equals in law the running maximum of B on the unit interval, hence
//! also |N(0,1)|, Upsilon is sampled from the explicit
//! representation H = (U + sqrt(V + U^2))/2 and Upsilon = Z/sqrt(H), and its
//! density is the half-normal scale mixture
//!     f(x) = (2/pi) Int_0^inf u^2 exp(-x^2 u^2 / 2 - u^4 / 2) du.
//! The tail of f decays only cubically, so the second moment is marginal:
//! sample variances near 3 are a finite-sample artifact, not a constant of
//! the law.

use crate::error::{Error, Result};
use crate::quad::{integrate_interval, integrate_semi_infinite, DecayCertificate, Integrand};
use crate::rng::RngStream;
use crate::special::{log_normal_sf, SQRT_2PI};
use std::sync::OnceLock;

/// mu_k for k = 1..=k_max with quadrature error bounds.
#[derive(Clone, Debug)]
pub struct MuTable {
    pub k_max: usize,
    pub mu: Vec<f64>,
    pub err: Vec<f64>,
}

/// One draw of the limit variable together with its local-time surrogate.
#[derive(Clone, Copy, Debug)]
pub struct UpsilonSample {
    pub value: f64,
    pub h: f64,
}

/// mu_k = -+2 Int_0^inf [1 + a^{-1} exp(c x^2)] Phi(-x) dx, with
/// (a, c, sign) = (2k-1, 2k(k-1)/(2k-1)^2, -) for even k and
/// (4k-1, 4k(2k-1)/(4k-1)^2, +) for odd k. Returns (value, error bound).
pub fn mu_constant(k: usize) -> Result<(f64, f64)> {
    if k < 1 {
        return Err(Error::Domain("mu_constant requires k >= 1".into()));
    }
    let kf = k as f64;
    let (a, c, sign) = if k % 2 == 0 {
        let a = 2.0 * kf - 1.0;
        (a, 2.0 * kf * (kf - 1.0) / (a * a), -1.0)
    } else {
        let a = 4.0 * kf - 1.0;
        (a, 4.0 * kf * (2.0 * kf - 1.0) / (a * a), 1.0)
    };
    // 1/2 - c equals 1/(2a^2) for both parities, so the integrand always
    // decays; the log-space form never overflows for large x.
    assert!(c < 0.5);
    let ln_a = a.ln();
    let log_f = |x: f64| {
        let g = c * x * x - ln_a;
        let softplus = if g > 36.0 { g } else { g.exp().ln_1p() };
        softplus + log_normal_sf(x)
    };
    // 1 + a^{-1} e^{cx^2} <= (1 + 1/a) e^{cx^2} and Phi(-x) <= e^{-x^2/2}/2.
    let cert = DecayCertificate::GaussianTail {
        scale: 0.5 * (1.0 + 1.0 / a),
        rate: 0.5 - c,
        from: 0.0,
    };
    let q = integrate_semi_infinite(&Integrand::LogSpace(&log_f), &cert)?;
    Ok((sign * 2.0 * q.value, 2.0 * q.abs_error_bound))
}

/// mu_1..mu_k_max as a table.
pub fn mu_table(k_max: usize) -> Result<MuTable> {
    let mut mu = Vec::with_capacity(k_max);
    let mut err = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let (v, e) = mu_constant(k)?;
        mu.push(v);
        err.push(e);
    }
    Ok(MuTable { k_max, mu, err })
}

/// Monte Carlo estimate of c(h_j) = Int dx Int phi(y) h_j(x, y) dy by
/// importance sampling x ~ N(0, 4) (the x-marginal of h_j decays like
/// e^{-x^2/2}, so any proposal variance > 1 keeps the variance finite).
/// Returns (estimate, standard error).
pub fn c_h_mc(j: u32, samples: usize, stream: &mut RngStream) -> (f64, f64) {
    assert!(j >= 1 && samples >= 2);
    let sigma = 2.0;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..samples {
        let x = sigma * stream.draw_gaussian();
        let y = stream.draw_gaussian();
        let h = crate::likelihood::h_k(j, x, y, 1.0);
        // weight 1/g(x) with g the N(0, sigma^2) density
        let w = sigma * SQRT_2PI * (x * x / (2.0 * sigma * sigma)).exp();
        let v = h * w;
        sum += v;
        sum_sq += v * v;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum_sq - n * mean * mean) / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// One draw of (Upsilon, H): H = (U + sqrt(V + U^2))/2 with U standard
/// normal and V exponential of rate 1/2, then Upsilon = Z/sqrt(H).
pub fn draw_upsilon(stream: &mut RngStream) -> UpsilonSample {
    let u = stream.draw_gaussian();
    let v = stream.draw_exponential(0.5);
    let h = 0.5 * (u + (v + u * u).sqrt());
    let z = stream.draw_gaussian();
    UpsilonSample { value: z / h.sqrt(), h }
}

/// Density of Upsilon; even in x, cubic tails.
///
/// For |x| > 1 the integrand peaks at u ~ sqrt(2)/x, which an adaptive rule
/// on a fixed interval can step over entirely; substituting v = x u pins the
/// peak at sqrt(2) for every x.
pub fn upsilon_density(x: f64) -> f64 {
    let s = x.abs().max(1.0);
    let r = x.abs() / s;
    let s4 = s * s * s * s;
    let f = |v: f64| v * v * (-0.5 * r * r * v * v - 0.5 * v * v * v * v / s4).exp();
    let cert = if x.abs() >= 1.0 {
        // v^2 e^{-v^2/2} <= 0.95 e^{-v^2/4} for v >= 3
        DecayCertificate::GaussianTail { scale: 0.95, rate: 0.25, from: 3.0 }
    } else {
        // v^2 e^{-v^4/2} <= 4 e^{-4} e^{-v^2} for v >= 2
        DecayCertificate::GaussianTail { scale: 4.0 * (-4.0f64).exp(), rate: 1.0, from: 2.0 }
    };
    let q = integrate_semi_infinite(&Integrand::Plain(&f), &cert)
        .expect("upsilon density integrand is smooth and certified");
    core::f64::consts::FRAC_2_PI * q.value / (s * s * s)
}

// Beyond this point the CDF uses the asymptotic tail
//   1 - F(x) = 1/(sqrt(2 pi) x^2) - B/x^6 + O(x^{-10}),   B = 5 sqrt(2/pi)/8 * ...
// obtained by expanding e^{-u^4/2} inside the density integral; the x^{-10}
// term is below 1e-16 here.
const TAIL_SWITCH: f64 = 60.0;
const CDF_STEP: f64 = 0.01;

fn tail_sf(x: f64) -> f64 {
    // Int u^2 e^{-x^2 u^2/2} du = sqrt(2 pi)/(2 x^3); next order from -u^4/2.
    let a = 1.0 / SQRT_2PI;
    let b = core::f64::consts::FRAC_2_PI * 9.399855956606362 / 6.0;
    a / (x * x) - b / x.powi(6)
}

/// Precomputed CDF of Upsilon on [0, 60]: nodes every 0.01, cumulative cell
/// integrals of the density, cubic Hermite interpolation with the exact
/// density as derivative (interpolation error ~ 1e-10).
pub struct UpsilonCdf {
    values: Vec<f64>,
    density: Vec<f64>,
}

impl UpsilonCdf {
    fn build() -> UpsilonCdf {
        let cells = (TAIL_SWITCH / CDF_STEP) as usize;
        let mut density = Vec::with_capacity(cells + 1);
        for i in 0..=cells {
            density.push(upsilon_density(i as f64 * CDF_STEP));
        }
        let mut values = Vec::with_capacity(cells + 1);
        values.push(0.5);
        let mut acc = 0.5;
        for i in 0..cells {
            let a = i as f64 * CDF_STEP;
            let cell = integrate_interval(upsilon_density, a, a + CDF_STEP, 2e-13)
                .expect("density cell integral");
            acc += cell.value;
            values.push(acc);
        }
        UpsilonCdf { values, density }
    }

    pub fn shared() -> &'static UpsilonCdf {
        static TABLE: OnceLock<UpsilonCdf> = OnceLock::new();
        TABLE.get_or_init(UpsilonCdf::build)
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 1.0 - self.eval(-x);
        }
        if x >= TAIL_SWITCH {
            return 1.0 - tail_sf(x);
        }
        let pos = x / CDF_STEP;
        let i = (pos.floor() as usize).min(self.values.len() - 2);
        let t = pos - i as f64;
        let (f0, f1) = (self.values[i], self.values[i + 1]);
        let (d0, d1) = (self.density[i] * CDF_STEP, self.density[i + 1] * CDF_STEP);
        let t2 = t * t;
        let t3 = t2 * t;
        f0 * (2.0 * t3 - 3.0 * t2 + 1.0)
            + f1 * (3.0 * t2 - 2.0 * t3)
            + d0 * (t3 - 2.0 * t2 + t)
            + d1 * (t3 - t2)
    }

    /// Interior mass 2(F(60) - 1/2) plus both analytic tails; equals the
    /// integral of the density over the whole line.
    pub fn total_mass(&self) -> f64 {
        2.0 * (self.values[self.values.len() - 1] - 0.5) + 2.0 * tail_sf(TAIL_SWITCH)
    }
}

/// CDF of Upsilon via the shared table.
pub fn upsilon_cdf(x: f64) -> f64 {
    UpsilonCdf::shared().eval(x)
}

/// Quantile of Upsilon by bisection on the CDF to 1e-10.
pub fn upsilon_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("quantile level {p} outside (0, 1)")));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    let target = p.max(1.0 - p);
    let mut hi = 1.0;
    while upsilon_cdf(hi) < target {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if upsilon_cdf(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let q = 0.5 * (lo + hi);
    Ok(if p < 0.5 { -q } else { q })
}
