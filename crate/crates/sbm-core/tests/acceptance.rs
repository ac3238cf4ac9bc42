//! Statistical acceptance gates for the whole toolkit, one test per gate.
//! Every test prints a single verdict line with its measured numbers, so a
//! run under --nocapture gives a twelve-line scoreboard. Gates that encode
//! known open problems still run the faithful computation and fail loudly
//! rather than being weakened; the verdict line carries the evidence.

use rayon::prelude::*;
use sbm_core::htest::null_statistic_sample;
use sbm_core::ks::{ks_one_sample, ks_one_sample_precomputed};
use sbm_core::likelihood::log_likelihood_ratio;
use sbm_core::limit::{c_h_mc, draw_upsilon, mu_constant, upsilon_cdf, UpsilonCdf};
use sbm_core::sim::{local_time_proxy, sbm_transition};
use sbm_core::special::{normal_cdf, normal_pdf};
use sbm_core::stats::{median, ols_slope, quantile};
use sbm_core::studies::{
    jacod_constant, jacod_sum, power_histogram, rate_regression, table1_study, table2_study,
    variance_scaling,
};
use sbm_core::{mle, simulate_path, GridPath, RngStream, SbmParams};
use std::time::Instant;

fn simulate(theta: f64, x0: f64, n: usize, seed: u64, id: u64) -> GridPath {
    let params = SbmParams::new(theta, x0, 1.0, n).unwrap();
    let mut stream = RngStream::new(seed, id);
    simulate_path(&params, &mut stream).unwrap()
}

fn verdict(index: u32, name: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("acceptance {index:02} {name}: {tag} ({detail})");
}

/// Transition CDF by marching composite-Simpson quadrature of the density
/// between consecutive sorted points, anchored far in the left tail.
/// Pieces are no wider than sigma/8 and panels split at the y = 0 kink;
/// the density sign is forced to the side the panel lies on, because piece
/// endpoints can land on the wrong side of 0 by one rounding error.
fn transition_cdf_at(theta: f64, x: f64, delta: f64, sorted: &[f64]) -> Vec<f64> {
    let s = delta.sqrt();
    let lo = (x - 12.0 * s).min(sorted[0] - s);
    let q = |y: f64, side: f64| {
        normal_pdf(y - x, delta) + side * theta * normal_pdf(x.abs() + y.abs(), delta)
    };
    let simpson = |a: f64, b: f64| {
        let side = if a + b < 0.0 { -1.0 } else { 1.0 };
        let pieces = ((b - a) / (s / 8.0)).ceil().max(1.0) as usize;
        let h = (b - a) / pieces as f64;
        let mut acc = 0.0;
        for i in 0..pieces {
            let l = a + i as f64 * h;
            let r = l + h;
            acc += (h / 6.0) * (q(l, side) + 4.0 * q(0.5 * (l + r), side) + q(r, side));
        }
        acc
    };
    let panel = |a: f64, b: f64| {
        if a < 0.0 && b > 0.0 {
            simpson(a, 0.0) + simpson(0.0, b)
        } else {
            simpson(a, b)
        }
    };
    let mut acc = 0.0f64;
    let mut prev = lo;
    sorted
        .iter()
        .map(|&y| {
            acc += panel(prev, y);
            prev = y;
            acc.clamp(0.0, 1.0)
        })
        .collect()
}

#[test]
fn transition_sampler_matches_quadrature_cdf() {
    let t0 = Instant::now();
    let mut max_d = 0.0f64;
    let mut min_p = 1.0f64;
    for (ti, &theta) in [-0.8f64, 0.0, 0.5, 1.0].iter().enumerate() {
        for (xi, &x) in [0.0f64, 0.3].iter().enumerate() {
            for (di, &delta) in [0.01f64, 1.0].iter().enumerate() {
                let id = (ti as u64) * 100 + (xi as u64) * 10 + di as u64;
                let mut stream = RngStream::new(314, id);
                let mut draws: Vec<f64> = (0..100_000)
                    .map(|_| sbm_transition(x, theta, delta, &mut stream))
                    .collect();
                draws.sort_by(f64::total_cmp);
                let cdf = transition_cdf_at(theta, x, delta, &draws);
                let r = ks_one_sample_precomputed(&cdf).unwrap();
                max_d = max_d.max(r.d);
                min_p = min_p.min(r.p_value);
            }
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    let pass = min_p > 0.01 && secs < 60.0;
    let detail =
        format!("16 cells x 1e5 draws, max D={max_d:.5}, min p={min_p:.4}, {secs:.1}s");
    verdict(1, "transition-sampler-vs-quadrature-cdf", pass, &detail);
    assert!(pass, "{detail}");
}

#[test]
fn derivative_constants_match_monte_carlo_oracle() {
    let t0 = Instant::now();
    let (mu1, _) = mu_constant(1).unwrap();
    let (mu2, _) = mu_constant(2).unwrap();
    let pair_gap = (mu1 + mu2).abs();
    let mut max_dev = 0.0f64;
    for k in 1..=6u32 {
        let (mu, _) = mu_constant(k as usize).unwrap();
        // Oracle: plain Monte Carlo of the kernel-mean integral. The odd
        // kernels are antisymmetric with mean zero; their constant is the
        // kernel-mean of twice the index, so the oracle pairs k -> 2k there
        // and carries a sign flip on even k.
        let (j, sign) = if k % 2 == 0 { (k, -1.0) } else { (2 * k, 1.0) };
        let mut stream = RngStream::new(2024, k as u64);
        let (est, se) = c_h_mc(j, 10_000_000, &mut stream);
        max_dev = max_dev.max((mu - sign * est).abs() / se);
    }
    let secs = t0.elapsed().as_secs_f64();
    let pass = pair_gap <= 1e-9 && max_dev <= 3.0 && secs < 120.0;
    let detail =
        format!("|mu1+mu2|={pair_gap:.1e}, worst oracle gap {max_dev:.2} se, {secs:.1}s");
    verdict(2, "derivative-constants-vs-mc-oracle", pass, &detail);
    assert!(pass, "{detail}");
}

#[test]
fn limit_law_sampler_density_and_cdf_agree() {
    let t0 = Instant::now();
    let mut stream = RngStream::new(777, 0);
    let draws: Vec<_> = (0..1_000_000).map(|_| draw_upsilon(&mut stream)).collect();

    let hs: Vec<f64> = draws.iter().map(|s| s.h).collect();
    let half_normal = |x: f64| if x <= 0.0 { 0.0 } else { 2.0 * normal_cdf(x) - 1.0 };
    let h_ks = ks_one_sample(&hs, half_normal).unwrap();

    let mass = UpsilonCdf::shared().total_mass();
    let mass_gap = (mass - 1.0).abs();

    let values: Vec<f64> = draws.iter().map(|s| s.value).collect();
    let sup = ks_one_sample(&values, upsilon_cdf).unwrap().d;

    let secs = t0.elapsed().as_secs_f64();
    let pass = h_ks.p_value > 0.01 && mass_gap <= 1e-8 && sup < 0.005 && secs < 60.0;
    let detail = format!(
        "mixing law p={:.3}, density mass 1{:+.1e}, sampler-vs-cdf sup={sup:.5}, {secs:.1}s",
        h_ks.p_value,
        mass - 1.0
    );
    verdict(3, "limit-law-sampler-density-cdf", pass, &detail);
    assert!(pass, "{detail}");
}

#[test]
fn estimator_gap_study_reproduces_reference_table() {
    let t0 = Instant::now();
    let result = table1_study(&[100, 1000, 10_000], 100, 7).unwrap();
    // reference means 0.026 / 0.013 / 0.002 with a factor-2 band each way
    let targets = [0.026, 0.013, 0.002];
    let mut pass = true;
    let mut detail = String::new();
    for (row, target) in result.table.iter().zip(targets) {
        let m = row[1];
        let scaled = row[3];
        pass &= m >= target / 2.0 && m <= target * 2.0;
        pass &= (0.3..=6.0).contains(&scaled);
        detail += &format!("n={} mean={m:.4} n34={scaled:.2}; ", row[0]);
    }
    let secs = t0.elapsed().as_secs_f64();
    pass &= secs < 300.0;
    detail += &format!("{secs:.1}s");
    verdict(4, "estimator-gap-reference-table", pass, &detail);
    assert!(pass, "{detail}");
}

#[test]
fn score_root_is_exact_and_matches_grid_search() {
    let t0 = Instant::now();

    // part 1: score residual at the returned root across a 1008-path suite
    let thetas = [-0.9, -0.5, 0.0, 0.3, 0.8, 1.0];
    let x0s = [0.0, 0.3];
    let ns = [50usize, 200, 1000];
    let mut cells = Vec::new();
    for (ti, &theta) in thetas.iter().enumerate() {
        for (xi, &x0) in x0s.iter().enumerate() {
            for (ni, &n) in ns.iter().enumerate() {
                cells.push((theta, x0, n, ((ti * 6 + xi * 3 + ni) as u64) << 32));
            }
        }
    }
    let residuals: Vec<(f64, f64)> = cells
        .par_iter()
        .flat_map_iter(|&(theta, x0, n, base)| {
            (0..28u64).map(move |rep| (theta, x0, n, base + rep))
        })
        .map(|(theta, x0, n, id)| {
            let report = mle(&simulate(theta, x0, n, 501, id));
            if report.boundary {
                (0.0, n as f64)
            } else {
                (report.score_residual.abs(), n as f64)
            }
        })
        .collect();
    let worst_residual =
        residuals.iter().map(|&(r, n)| r / (1e-10 * n)).fold(0.0f64, f64::max);

    // part 2: the root against a 1e-6-grid argmax of the likelihood on
    // 50 short paths with iid values, which keep interior roots common
    let mut worst_gap = 0.0f64;
    let mut interior = 0usize;
    for i in 0..50u64 {
        let mut stream = RngStream::new(55, i);
        let vals: Vec<f64> = (0..4).map(|_| 0.5 * stream.draw_gaussian()).collect();
        let path = GridPath::from_values(1.0, vals).unwrap();
        let report = mle(&path);
        let m = 1_000_000i64;
        let mut best = (f64::NEG_INFINITY, 0.0);
        for j in -m..=m {
            let theta = j as f64 / m as f64;
            let v = log_likelihood_ratio(&path, theta);
            if v > best.0 {
                best = (v, theta);
            }
        }
        worst_gap = worst_gap.max((report.theta_mle - best.1).abs());
        interior += usize::from(!report.boundary);
    }

    let secs = t0.elapsed().as_secs_f64();
    let pass = worst_residual <= 1.0 && worst_gap <= 1e-4 && interior >= 10 && secs < 60.0;
    let detail = format!(
        "worst residual {worst_residual:.1e}x bound over 1008 paths, grid gap {worst_gap:.1e} \
         ({interior}/50 interior roots), {secs:.1}s"
    );
    verdict(5, "score-root-residual-and-grid-argmax", pass, &detail);
    assert!(pass, "{detail}");
}

#[test]
fn estimator_gap_decay_and_second_order_term() {
    let t0 = Instant::now();
    let ns = [100usize, 1000, 10_000];
    let mut med_gap = Vec::new();
    let mut med_gap_d2 = Vec::new();
    for (ni, &n) in ns.iter().enumerate() {
        let reports: Vec<_> = (0..500u64)
            .into_par_iter()
            .map(|rep| mle(&simulate(0.0, 0.0, n, 11, ((ni as u64) << 32) + rep)))
            .collect();
        let mut gap = Vec::new();
        let mut gap_d2 = Vec::new();
        for r in &reports {
            let u = r.alpha_scaled;
            if r.boundary || !u.is_finite() || u.abs() >= 1.0 {
                continue;
            }
            // second-order term of the root expansion: d^(2) alpha^2 / sqrt(n)
            let term2 = r.expansion[0] * u * u;
            gap.push((r.theta_mle - u).abs());
            gap_d2.push((r.theta_mle - (u + term2)).abs());
        }
        med_gap.push(median(&gap));
        med_gap_d2.push(median(&gap_d2));
    }
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = med_gap.iter().map(|m| m.ln()).collect();
    let (slope, _, _) = ols_slope(&xs, &ys).unwrap();

    let secs = t0.elapsed().as_secs_f64();
    let slope_ok = (-1.0..=-0.5).contains(&slope);
    // Known open gate: the second-order term overshoots at theta = 0. Its
    // coefficient tracks +0.5 u on typical paths while the full gap runs
    // near -0.35 u^3, so stopping after the even term lands farther from
    // the root than not correcting at all, at every n tried.
    let d2_ok = med_gap_d2[2] <= med_gap[2];
    let pass = slope_ok && d2_ok && secs < 300.0;
    let detail = format!(
        "gap slope {slope:.3}, median gap at n=1e4 {:.3e} -> {:.3e} with second-order term, {secs:.1}s",
        med_gap[2], med_gap_d2[2]
    );
    verdict(6, "estimator-gap-decay-and-second-order-term", pass, &detail);
    assert!(pass, "{detail}");
}

#[test]
fn scaled_estimator_matches_limit_law_not_normal() {
    let t0 = Instant::now();
    let result = table2_study(&[1000], 10_000, 10_000, 23).unwrap();
    let row = &result.table[0];
    let (d_upsilon, d_normal) = (row[1], row[3]);
    let secs = t0.elapsed().as_secs_f64();
    let pass = d_upsilon < 0.04 && d_normal > 0.05 && secs < 600.0;
    let detail =
        format!("D vs limit law {d_upsilon:.4}, D vs matched normal {d_normal:.4}, {secs:.1}s");
    verdict(7, "scaled-estimator-vs-limit-law", pass, &detail);
    assert!(pass, "{detail}");
}

#[test]
fn convergence_rate_and_variance_scaling_exponents() {
    let t0 = Instant::now();
    let (rate_fit, _) =
        rate_regression(&[100, 316, 1000, 3162, 10_000, 31_623, 100_000], 500, 0).unwrap();
    let (var_fit, _) =
        variance_scaling(&[50, 250, 1250, 6250, 31_250, 100_000], 10_000, 0).unwrap();
    let secs = t0.elapsed().as_secs_f64();
    let rate_ok = (-0.30..=-0.10).contains(&rate_fit.slope);
    let var_ok = (0.0..=0.2).contains(&var_fit.slope);
    let pass = rate_ok && var_ok && secs < 900.0;
    let detail = format!(
        "rate slope {:.4} (r2 {:.3}), variance slope {:.4} (r2 {:.3}), {secs:.1}s",
        rate_fit.slope, rate_fit.r2, var_fit.slope, var_fit.r2
    );
    verdict(8, "rate-and-variance-scaling-exponents", pass, &detail);
    assert!(pass, "{detail}");
}

#[test]
fn calibrated_test_holds_level_and_separates_alternative() {
    let t0 = Instant::now();
    let null = null_statistic_sample(1000, 1.0, 0.0, 2000, 40);
    let threshold = quantile(&null, 0.975);
    let scale = 1000f64.powf(0.25);
    let statistic = |theta: f64, seed: u64, trial: u64| {
        let r = mle(&simulate(theta, 0.0, 1000, seed, trial));
        if r.boundary && r.alpha_n.is_finite() {
            r.alpha_n
        } else {
            scale * r.theta_mle
        }
    };
    let level_hits: usize = (0..2000u64)
        .into_par_iter()
        .map(|i| usize::from(statistic(0.0, 41, i).abs() > threshold))
        .sum();
    let power_hits: usize = (0..2000u64)
        .into_par_iter()
        .map(|i| usize::from(statistic(0.5, 42, i).abs() > threshold))
        .sum();
    let level = level_hits as f64 / 2000.0;
    let power = power_hits as f64 / 2000.0;
    let secs = t0.elapsed().as_secs_f64();
    let level_ok = (0.04..=0.06).contains(&level);
    // Known open gate: the null statistic carries atoms at +-n^{1/4} from
    // one-sided paths (about 2% of the mass at n = 1000), which push the
    // faithful 97.5% quantile to 3.56, well past the alternative's typical
    // statistic. Any threshold low enough for power 0.5 at theta = 0.5
    // triples the size; see the decision record for the tradeoff curve.
    let power_ok = power > 0.5;
    let pass = level_ok && power_ok && secs < 600.0;
    let detail = format!(
        "threshold {threshold:.3}, level {level:.4}, power at theta=0.5 {power:.4}, {secs:.1}s"
    );
    verdict(9, "test-level-and-power", pass, &detail);
    assert!(pass, "{detail}");
}

#[test]
fn habitat_generator_recovered_from_simulated_data() {
    use sbm_core::habitat::{decide_generator, simulate_habitat, Generator, HabitatModel};
    let t0 = Instant::now();
    let mut hits = Vec::new();
    for (gi, generator) in [Generator::L, Generator::A].into_iter().enumerate() {
        let model = HabitatModel::new(4.0, 1.0, generator).unwrap();
        let correct: usize = (0..100u64)
            .into_par_iter()
            .map(|trial| {
                let mut stream = RngStream::new(34, 100 * gi as u64 + trial);
                let path = simulate_habitat(&model, 0.0, 1.0, 10_000, &mut stream).unwrap();
                match decide_generator(&path) {
                    Ok(d) => usize::from(d.decided == generator),
                    Err(_) => 0,
                }
            })
            .sum();
        hits.push(correct);
    }
    let secs = t0.elapsed().as_secs_f64();
    let pass = hits.iter().all(|&h| h >= 90) && secs < 300.0;
    let detail = format!("recovered {}/100 and {}/100, {secs:.1}s", hits[0], hits[1]);
    verdict(10, "habitat-generator-recovery", pass, &detail);
    assert!(pass, "{detail}");
}

#[test]
fn occupation_sums_track_local_time_at_the_quadrature_constant() {
    let t0 = Instant::now();
    let h = |x: f64, _y: f64| (-x * x).exp();
    let pairs: Vec<(f64, f64)> = (0..500u64)
        .into_par_iter()
        .map(|rep| {
            let path = simulate(0.0, 0.0, 100_000, 44, rep);
            (local_time_proxy(&path), jacod_sum(&path, h))
        })
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let (slope, _, r2) = ols_slope(&xs, &ys).unwrap();
    let corr = r2.sqrt();
    let c = jacod_constant(h, 10.0, 1e-10).unwrap();
    let secs = t0.elapsed().as_secs_f64();
    let pass = (slope / c - 1.0).abs() <= 0.10 && corr > 0.9 && secs < 300.0;
    let detail = format!(
        "slope {slope:.4} vs constant {c:.4} (ratio {:.4}), corr {corr:.4}, {secs:.1}s",
        slope / c
    );
    verdict(11, "occupation-sum-vs-local-time", pass, &detail);
    assert!(pass, "{detail}");
}

#[test]
fn studies_are_byte_identical_across_worker_counts() {
    let t0 = Instant::now();
    let render = || {
        let t1 = table1_study(&[100, 1000, 10_000], 100, 7).unwrap();
        let t2 = table2_study(&[1000], 10_000, 10_000, 23).unwrap();
        let pw = power_histogram(0.5, 1000, 2000, 31, 42).unwrap();
        let null = null_statistic_sample(1000, 1.0, 0.0, 2000, 40);
        let threshold = quantile(&null, 0.975);
        let mut out = String::new();
        for r in [&t1, &t2, &pw] {
            out += &sbm_core::io::table_csv_string("acceptance", &r.table_columns, &r.table);
            out += &sbm_core::io::table_csv_string("acceptance", &r.record_columns, &r.records);
        }
        out += &sbm_core::io::table_csv_string(
            "acceptance",
            &["threshold".to_string()],
            &[vec![threshold]],
        );
        out
    };
    let runs: Vec<String> = [1usize, 4, 8]
        .iter()
        .map(|&workers| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .unwrap()
                .install(render)
        })
        .collect();
    let secs = t0.elapsed().as_secs_f64();
    let pass = runs[0] == runs[1] && runs[0] == runs[2];
    let detail = format!(
        "{} CSV bytes per run, identical under 1/4/8 workers: {}, {secs:.1}s",
        runs[0].len(),
        pass
    );
    verdict(12, "study-output-determinism-across-workers", pass, &detail);
    assert!(pass, "{detail}");
}
