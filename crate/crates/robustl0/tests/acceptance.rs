//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed.

use std::process::ExitCode;
use std::time::Instant;

use rand_distr::{Distribution, StandardNormal};
use robustl0::core::bench::{
    self, delta_grid, success_check, transition_point, SuccessCriterion, SweepConfig,
    TransitionRecord,
};
use robustl0::core::decode::{
    c_schedule, hard_threshold, parallel_l0, robust_l0, robust_l0_with, DecoderOptions,
    ScoreConfig, ScoreMode, Sequential, Variant,
};
use robustl0::core::estimate::{em_estimate, quantile_noise_estimate, EmConfig};
use robustl0::core::model::{generate_problem, GenParams, SparseSignal};
use robustl0::core::posterior::{
    empirical_posteriors, gaussian_pdf, mixture_sample, remainder_e, remainder_z,
    sparse_sum_sample, GaussianPosterior,
};
use robustl0::core::rng::{seeded, Rng64};
use robustl0::core::stats::{ks_two_sample, mean, median};
use robustl0::exec::{build_pool, RayonExecutor};
use robustl0::formats;
use robustl0::harness::SweepRunner;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn normal(r: &mut Rng64) -> f64 {
    StandardNormal.sample(r)
}

/// Fine bins of width `w` on `[-fine, fine]`, then bins growing by half
/// out to `outer`.
fn bin_edges(w: f64, fine: f64, outer: f64) -> Vec<f64> {
    let steps = (fine / w).round() as i64;
    let mut right = vec![];
    let mut width = w;
    let mut e = steps as f64 * w;
    while e < outer {
        width *= 1.5;
        e += width;
        right.push(e);
    }
    let mut edges: Vec<f64> = right.iter().rev().map(|v| -v).collect();
    edges.extend((-steps..=steps).map(|i| i as f64 * w));
    edges.extend(right);
    edges
}

/// Average of `p` over `[lo, hi]` weighted by the sketch-entry density
/// `sum_q e^-lambda lambda^q/q! phi(w | q s2 + v0)`.
fn bin_average(p: impl Fn(f64) -> f64, lambda: f64, s2: f64, v0: f64, lo: f64, hi: f64) -> f64 {
    let mut weights = vec![];
    let mut w = (-lambda).exp();
    for q in 0..80 {
        weights.push((w, q as f64 * s2 + v0));
        w *= lambda / (q + 1) as f64;
    }
    let integrate = |f: &dyn Fn(f64) -> f64| {
        let steps = 256;
        let h = (hi - lo) / steps as f64;
        let mut s = f(lo) + f(hi);
        for i in 1..steps {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(lo + h * i as f64);
        }
        s * h / 3.0
    };
    let density = |x: f64| {
        weights
            .iter()
            .map(|&(c, v)| c * gaussian_pdf(x, v).unwrap())
            .sum::<f64>()
    };
    integrate(&|x| p(x) * density(x)) / integrate(&density)
}

fn c1_posterior_agreement() -> Outcome {
    let (n, delta, d, instances) = (1 << 15, 0.3, 7, 50);
    let mut worst = (0.0f64, 0.0f64);
    let mut lines = vec![];
    for (cell, &(rho, sigma_n)) in [(0.1, 1e-3), (0.1, 1e-2), (0.3, 1e-3), (0.3, 1e-2)]
        .iter()
        .enumerate()
    {
        let probs: Vec<_> = (0..instances)
            .map(|i| {
                let seed = 1000 * cell as u64 + i;
                let params = GenParams::from_ratios(n, delta, rho, d, 1.0, sigma_n, seed);
                generate_problem(&params, &mut seeded(seed)).unwrap()
            })
            .collect();
        let edges = bin_edges(sigma_n, 12.0 * sigma_n, 6.0);
        let emp = empirical_posteriors(&probs, &edges, &mut seeded(77 + cell as u64)).unwrap();
        let post = GaussianPosterior::new(1.0, sigma_n, d, probs[0].params.rho()).unwrap();
        let d_rho = d as f64 * post.rho();
        let v = sigma_n * sigma_n;
        let (mut dz, mut de, mut bins) = (0.0f64, 0.0f64, 0);
        for b in 0..emp.num_bins() {
            let (lo, hi) = (edges[b], edges[b + 1]);
            if emp.counts_z[b] >= 200 {
                dz = dz.max(
                    (emp.pz_hat[b].unwrap() - bin_average(|w| post.pz(w), d_rho, 1.0, v, lo, hi))
                        .abs(),
                );
                bins += 1;
            }
            if emp.counts_e[b] >= 200 {
                de = de.max(
                    (emp.pe_hat[b].unwrap()
                        - bin_average(|w| post.pe(w), 2.0 * d_rho, 1.0, 2.0 * v, lo, hi))
                    .abs(),
                );
            }
        }
        worst = (worst.0.max(dz), worst.1.max(de));
        lines.push(format!(
            "rho={rho} sigma={sigma_n}: dz={dz:.4} de={de:.4} bins={bins}"
        ));
    }
    check(worst.0 < 0.05 && worst.1 < 0.05, lines.join("; "))
}

fn c2_lemma1() -> Outcome {
    let count = 100_000;
    let a = sparse_sum_sample(10_000, 0.7, normal, count, &mut seeded(1)).unwrap();
    let b = mixture_sample(0.7, normal, count, &mut seeded(2)).unwrap();
    let ks = ks_two_sample(&a, &b);
    // coupled draws (same seed) isolate the distributional gap from sampling noise
    let mut means = vec![];
    for n in [100, 1_000, 10_000] {
        let dists: Vec<f64> = (0..10)
            .map(|s| {
                let a = sparse_sum_sample(n, 0.7, normal, count, &mut seeded(100 + s)).unwrap();
                let b = mixture_sample(0.7, normal, count, &mut seeded(100 + s)).unwrap();
                ks_two_sample(&a, &b)
            })
            .collect();
        means.push(mean(&dists));
    }
    let monotone = means.windows(2).all(|w| w[1] < w[0]);
    check(
        ks < 0.01 && monotone,
        format!("KS(n=1e4)={ks:.5}; mean coupled KS over n=1e2,1e3,1e4: {means:?}"),
    )
}

/// Composite Simpson on `[-half, half]`.
fn simpson(f: impl Fn(f64) -> f64, half: f64, intervals: usize) -> f64 {
    let h = 2.0 * half / intervals as f64;
    let mut s = f(-half) + f(half);
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(-half + h * i as f64);
    }
    s * h / 3.0
}

/// `int w^2 sum_{q > ell} lambda^q/q! phi(w | q s2 + v0) dw / R(ell)`.
fn tail_second_moment(lambda: f64, s2: f64, v0: f64, ell: usize, remainder: f64) -> f64 {
    let mut terms = vec![];
    let mut weight = (1..=ell + 1).fold(1.0, |w, q| w * lambda / q as f64);
    for q in ell + 1..ell + 120 {
        terms.push((weight, q as f64 * s2 + v0));
        weight *= lambda / (q + 1) as f64;
    }
    let vmax = terms.iter().map(|t| t.1).fold(0.0, f64::max);
    let half = 40.0 * vmax.sqrt();
    let density = |w: f64| {
        terms
            .iter()
            .map(|&(c, v)| c * gaussian_pdf(w, v).unwrap())
            .sum::<f64>()
    };
    simpson(|w| w * w * density(w), half, 400_000) / remainder
}

fn c3_tail_variance() -> Outcome {
    let (d, sigma_s, sigma_n) = (7usize, 1.0, 1e-2);
    let mut worst = 0.0f64;
    for d_rho in [0.35, 0.7, 2.1] {
        for ell in [0usize, 1, 5] {
            let post =
                GaussianPosterior::with_truncation(sigma_s, sigma_n, d, d_rho / d as f64, ell)
                    .unwrap();
            let s2 = sigma_s * sigma_s;
            let vz = tail_second_moment(d_rho, s2, sigma_n * sigma_n, ell, remainder_z(ell, d_rho));
            let ve = tail_second_moment(
                2.0 * d_rho,
                s2,
                2.0 * sigma_n * sigma_n,
                ell,
                remainder_e(ell, d_rho),
            );
            worst = worst.max((vz / post.tail_variance_z() - 1.0).abs());
            worst = worst.max((ve / post.tail_variance_e() - 1.0).abs());
        }
    }
    check(worst < 1e-6, format!("max relative error {worst:.2e}"))
}

fn c4_noiseless() -> Outcome {
    let (n, delta, d) = (1 << 12, 0.5, 7);
    let alpha = DecoderOptions::default().alpha_for(d);
    let crit = SuccessCriterion {
        c1: 0.0,
        ..SuccessCriterion::default()
    };
    let mut ok = 0;
    let mut worst_ratio = 0.0f64;
    for s in 0..100u64 {
        let rho = 0.02 * (1 + s % 10) as f64;
        let params = GenParams::from_ratios(n, delta, rho, d, 1.0, 0.0, s);
        let p = generate_problem(&params, &mut seeded(s)).unwrap();
        let bound = 4 * (params.k as f64).log2().ceil() as usize;
        let rep = parallel_l0(&p.matrix, &p.y, alpha, 10 * bound).unwrap();
        let exact = rep.converged
            && rep.xhat.support() == p.x.support()
            && success_check(&p.x, &rep.xhat, &crit, params.m, 0.0).unwrap();
        if exact && rep.iterations <= bound {
            ok += 1;
        }
        worst_ratio = worst_ratio.max(rep.iterations as f64 / bound as f64);
    }
    check(
        ok >= 95,
        format!("{ok}/100 exact within 4*ceil(log2 k) sweeps (alpha={alpha}, rho=0.02..0.2, max sweeps/bound {worst_ratio:.2})"),
    )
}

fn robust_successes(sigma_n: f64, seeds: std::ops::Range<u64>) -> usize {
    let (n, delta, rho, d) = (1 << 14, 0.3, 0.1, 7);
    seeds
        .filter(|&s| {
            let params = GenParams::from_ratios(n, delta, rho, d, 1.0, sigma_n, s);
            let p = generate_problem(&params, &mut seeded(s)).unwrap();
            let posterior = GaussianPosterior::new(1.0, sigma_n, d, params.rho()).unwrap();
            let c = c_schedule(params.delta(), params.rho(), ScoreMode::Continuous);
            let cfg = ScoreConfig {
                mode: ScoreMode::Continuous,
                adaptive_k: false,
                alpha: 3.5,
                c,
                k: params.k,
                posterior,
            };
            let max_iters = 3 * (1.0 / c).ceil() as usize;
            let rep = robust_l0(&p.matrix, &p.yhat, &cfg, max_iters).unwrap();
            success_check(
                &p.x,
                &rep.xhat,
                &SuccessCriterion::default(),
                params.m,
                sigma_n,
            )
            .unwrap()
        })
        .count()
}

fn c5_robust_operating_point() -> Outcome {
    let first10 = robust_successes(1e-3, 0..10);
    let low20 = first10 + robust_successes(1e-3, 10..20);
    let high20 = robust_successes(1e-1, 0..20);
    check(
        first10 >= 8 && high20 < low20,
        format!("sigma=1e-3: {first10}/10 ({low20}/20); sigma=1e-1: {high20}/20"),
    )
}

fn c6_transition() -> Outcome {
    let cfg = SweepConfig {
        variant: Variant::RobustL0,
        n: 1 << 14,
        delta: 0.3,
        d: 7,
        sigma_s: 1.0,
        sigma_n: 1e-3,
        criterion: SuccessCriterion::default(),
        trials: 10,
        seed_base: 2024,
        options: DecoderOptions::default(),
    };
    let mut runner = SweepRunner::new(1, None).unwrap();
    let recs = runner.rho_sweep(&cfg).unwrap();
    let pts: Vec<(f64, f64)> = recs.iter().map(|r| (r.rho, r.fraction())).collect();
    let tp = transition_point(&pts, 0.5).unwrap();
    let tail: Vec<String> = recs
        .iter()
        .rev()
        .take(4)
        .rev()
        .map(|r| format!("{:.2}:{}", r.rho, r.successes))
        .collect();
    check(
        !tp.undefined && (0.15..=0.40).contains(&tp.rho_star),
        format!(
            "rho*={:.4} (alpha={}), last cells {}",
            tp.rho_star,
            DecoderOptions::default().alpha_for(7),
            tail.join(" ")
        ),
    )
}

fn c7_estimators() -> Outcome {
    let mut parts = vec![];
    let mut ok = true;
    for sigma_n in [1e-3, 1e-2] {
        let errs: Vec<f64> = (0..50)
            .map(|s| {
                let params = GenParams::from_ratios(1 << 14, 0.5, 0.1, 7, 1.0, sigma_n, s);
                let p = generate_problem(&params, &mut seeded(s)).unwrap();
                let est = quantile_noise_estimate(&p.yhat, 7, params.rho(), 1.0, 2).unwrap();
                (est.sigma_n_hat / sigma_n - 1.0).abs()
            })
            .collect();
        let med = median(&errs);
        ok &= med < 0.25;
        parts.push(format!("quantile sigma={sigma_n}: median rel err {med:.3}"));
    }
    let mut worst = 0.0f64;
    for s in 0..20 {
        let params = GenParams::from_ratios(1 << 15, 0.3, 0.1, 7, 1.0, 1e-2, s);
        let p = generate_problem(&params, &mut seeded(s)).unwrap();
        let (est, _) = em_estimate(&p.yhat, 7, &EmConfig::default()).unwrap();
        worst = worst.max(est.rho_hat.map_or(f64::INFINITY, |r| (r - 0.1).abs()));
    }
    ok &= worst <= 0.03;
    parts.push(format!("EM max |rho_hat - 0.1| = {worst:.4}"));
    check(ok, parts.join("; "))
}

fn c8_properties() -> Outcome {
    let mut failed = vec![];
    let mut expect = |ok: bool, what: &str| {
        if !ok {
            failed.push(what.to_string());
        }
    };

    // posterior invariants on dense grids
    for &(sigma_n, rho) in &[(1e-3, 0.1), (1e-2, 0.3), (1e-1, 0.05), (3e-2, 0.6)] {
        let post = GaussianPosterior::new(1.0, sigma_n, 7, rho).unwrap();
        let grid: Vec<f64> = (0..=20_000).map(|i| 10.0 * i as f64 / 20_000.0).collect();
        let (mut prev_z, mut prev_e) = (f64::INFINITY, f64::INFINITY);
        for &w in &grid {
            let (z, e) = (post.pz(w), post.pe(w));
            expect(z == post.pz(-w) && e == post.pe(-w), "symmetry");
            expect(
                (0.0..=1.0).contains(&z) && (0.0..=1.0).contains(&e),
                "bound",
            );
            expect(z <= prev_z && e <= prev_e, "monotonicity");
            expect(
                post.pz_scaled(w) <= 1.0 && post.pe_scaled(w) <= 1.0,
                "scaled bound",
            );
            (prev_z, prev_e) = (z, e);
        }
        expect(
            post.pz_scaled(0.0) == 1.0 && post.pe_scaled(0.0) == 1.0,
            "scaled peak",
        );
    }

    // hard thresholding
    let x = SparseSignal::from_pairs(3, [(0, 3.0), (1, -5.0), (2, 1.0)]).unwrap();
    expect(
        hard_threshold(&x, 2) == SparseSignal::from_pairs(3, [(0, 3.0), (1, -5.0)]).unwrap(),
        "H_k order",
    );
    let tie = SparseSignal::from_pairs(3, [(0, 2.0), (1, -2.0), (2, 2.0)]).unwrap();
    expect(
        hard_threshold(&tie, 2) == SparseSignal::from_pairs(3, [(0, 2.0), (1, -2.0)]).unwrap(),
        "H_k ties",
    );
    expect(hard_threshold(&x, 3) == x, "H_k identity");

    // success threshold arithmetic
    let t = SuccessCriterion::default().threshold(10.0, 100, 0.01);
    expect((t - 0.085_816_6).abs() < 1e-6, "success threshold");

    // c schedule
    expect(
        c_schedule(0.04, 0.3, ScoreMode::Quantised) == 0.01,
        "c quantised low delta",
    );
    expect(
        c_schedule(0.3, 0.15, ScoreMode::Quantised) == 0.075,
        "c quantised",
    );
    expect(
        c_schedule(0.2, 0.4, ScoreMode::Continuous) == 0.025,
        "c continuous",
    );

    // delta grid
    let g = delta_grid();
    expect(
        g.len() == 24 && g[0] == 0.02 && g[3] == 0.08 && g[4] == 0.1,
        "delta grid head",
    );
    expect((g[23] - 0.99).abs() < 1e-12, "delta grid tail");

    // serialization round trips
    let dir = tempfile::tempdir().unwrap();
    let params = GenParams {
        n: 2000,
        m: 600,
        k: 60,
        d: 7,
        sigma_s: 1.0,
        sigma_n: 1e-3,
        seed: 5,
    };
    let p = generate_problem(&params, &mut seeded(5)).unwrap();
    let path = dir.path().join("p.json");
    formats::write_problem(&path, &p).unwrap();
    expect(
        formats::read_problem(&path)
            .unwrap()
            .into_instance()
            .as_ref()
            == Some(&p),
        "problem round trip",
    );
    let post = GaussianPosterior::new(1.0, 1e-3, 7, params.rho()).unwrap();
    let cfg = ScoreConfig {
        mode: ScoreMode::Continuous,
        adaptive_k: false,
        alpha: 3.5,
        c: 0.025,
        k: params.k,
        posterior: post,
    };
    let rep = robust_l0(&p.matrix, &p.yhat, &cfg, 120).unwrap();
    let rpath = dir.path().join("r.json");
    formats::write_report(&rpath, &rep, Variant::RobustL0).unwrap();
    let back = formats::read_report(&rpath)
        .unwrap()
        .to_report(params.n, &rpath)
        .unwrap();
    expect(
        back == (rep.clone(), Variant::RobustL0),
        "report round trip",
    );

    // determinism: fixed seeds, column executor and sweep worker counts
    let again = robust_l0(
        &generate_problem(&params, &mut seeded(5)).unwrap().matrix,
        &p.yhat,
        &cfg,
        120,
    )
    .unwrap();
    expect(again == rep, "decode determinism");
    let par = build_pool(3)
        .install(|| robust_l0_with(&p.matrix, &p.yhat, &cfg, 120, &RayonExecutor))
        .unwrap();
    expect(par == rep, "multi-worker decode");
    let seq = robust_l0_with(&p.matrix, &p.yhat, &cfg, 120, &Sequential).unwrap();
    expect(seq == rep, "sequential executor");
    let sweep = SweepConfig {
        variant: Variant::RobustL0Quantised,
        n: 2048,
        delta: 0.3,
        d: 7,
        sigma_s: 1.0,
        sigma_n: 1e-3,
        criterion: SuccessCriterion::default(),
        trials: 4,
        seed_base: 9,
        options: DecoderOptions::default(),
    };
    let strip = |rs: Vec<TransitionRecord>| -> Vec<TransitionRecord> {
        rs.into_iter()
            .map(|r| TransitionRecord {
                mean_wall_ms: 0.0,
                ..r
            })
            .collect()
    };
    let one = strip(
        SweepRunner::new(1, None)
            .unwrap()
            .rho_sweep(&sweep)
            .unwrap(),
    );
    let three = strip(
        SweepRunner::new(3, None)
            .unwrap()
            .rho_sweep(&sweep)
            .unwrap(),
    );
    let core = strip(bench::rho_sweep(&sweep, |c, s| bench::run_cell(c, s, &Sequential)).unwrap());
    expect(
        one == three && one == core,
        "multi-worker sweep determinism",
    );
    let csv = dir.path().join("sweep.csv");
    formats::append_records(&csv, &one).unwrap();
    let read = strip(formats::read_records(&csv).unwrap());
    expect(read == one, "records round trip");

    check(
        failed.is_empty(),
        if failed.is_empty() {
            "all invariants hold".into()
        } else {
            failed.join(", ")
        },
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 posterior agreement", c1_posterior_agreement),
        ("2 sparse-sum limit", c2_lemma1),
        ("3 tail-lump variance", c3_tail_variance),
        ("4 noiseless exactness", c4_noiseless),
        ("5 robust operating point", c5_robust_operating_point),
        ("6 transition shape", c6_transition),
        ("7 estimator sanity", c7_estimators),
        ("8 property suites", c8_properties),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failures = 0;
    for (name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {name} ({secs:.1}s): {detail}"),
            Err(detail) => {
                failures += 1;
                println!("FAIL criterion {name} ({secs:.1}s): {detail}");
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
