//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each, and
//! exits non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use orss_core::leverage::offline_ridge_scores;
use orss_core::linalg::gram;
use orss_core::verify::{bss_count_comparator, row_count_comparator};
use orss_core::{
    certify, gen_doubling_cliques, gen_gaussian, online_ridge_scores, permute_stream, run_sampler,
    Accuracy, Algorithm, GraphStreamSpec, OnlineBss, OnlineSample, PsdState, RowStream, SlimSample,
    StreamingSampler, WeightedRow,
};

type Rows = Vec<Vec<f64>>;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn gaussian(n: usize, d: usize, seed: u64) -> Rows {
    gen_gaussian(n, d, seed).collect_rows().unwrap()
}

fn identity(d: usize, repeats: usize) -> Rows {
    (0..repeats)
        .flat_map(|_| (0..d).map(move |k| common::unit(d, k)))
        .collect()
}

fn cliques(d: usize, copies: usize, eps: f64, delta: f64) -> Rows {
    gen_doubling_cliques(GraphStreamSpec::lower_bound(d, copies, eps, delta))
        .unwrap()
        .collect_rows()
        .unwrap()
}

/// Gaussian rows rescaled by factors spread over six orders of magnitude.
fn multiscale(n: usize, d: usize, seed: u64) -> Rows {
    gaussian(n, d, seed)
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            let s = 10f64.powf(((i * 7919 + seed as usize) % 61) as f64 / 10.0 - 3.0);
            r.into_iter().map(|x| x * s).collect()
        })
        .collect()
}

fn permuted(d: usize, rows: &Rows, seed: u64) -> Rows {
    permute_stream(RowStream::from_rows(d, rows.clone()), seed)
        .unwrap()
        .collect_rows()
        .unwrap()
}

fn mean(xs: impl IntoIterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.into_iter().collect();
    v.iter().sum::<f64>() / v.len() as f64
}

/// 1. Deterministic score-sum bound, zero tolerance, under < 10 s.
fn score_sum_bound() -> Outcome {
    let start = Instant::now();
    let streams: Vec<(&str, usize, Rows)> = vec![
        ("gaussian 500x10", 10, gaussian(500, 10, 0)),
        ("identity d=10", 10, identity(10, 1)),
        ("1000 x e1", 4, vec![common::unit(4, 0); 1000]),
        ("cliques d=6 N=8", 6, cliques(6, 8, 0.5, 0.1)),
    ];
    let mut runs = 0;
    let mut worst: f64 = 0.0;
    for (name, d, rows) in &streams {
        for perm_seed in 0..3 {
            let rows = permuted(*d, rows, perm_seed);
            for lambda in [0.01, 0.2, 1.0, 10.0] {
                let t = online_ridge_scores(*d, &rows, lambda).unwrap();
                runs += 1;
                let ratio = t.sum() / t.sum_bound();
                worst = worst.max(ratio);
                if t.sum() > t.sum_bound() {
                    return outcome(
                        false,
                        format!(
                            "{name} perm {perm_seed} λ={lambda}: {} > {}",
                            t.sum(),
                            t.sum_bound()
                        ),
                    );
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        secs < 10.0,
        format!("{runs} runs, max sum/bound = {worst:.3}, {secs:.2}s (< 10s)"),
    )
}

/// 2. Online scores dominate offline scores elementwise (tol 1e-10).
fn overestimation() -> Outcome {
    let mut worst = f64::INFINITY;
    for seed in 0..20 {
        let rows = gaussian(50, 8, 1000 + seed);
        for lambda in [0.1, 1.0] {
            let on = online_ridge_scores(8, &rows, lambda).unwrap();
            let off = offline_ridge_scores(8, &rows, lambda).unwrap();
            for (a, b) in on.scores.iter().zip(&off.scores) {
                worst = worst.min(a - b);
            }
        }
    }
    outcome(
        worst >= -1e-10,
        format!("min(online − offline) = {worst:.3e} over 20 matrices"),
    )
}

/// 3. Online-BSS always certifies and its gaps stay positive definite.
fn bss_never_fails() -> Outcome {
    let start = Instant::now();
    let d = 8;
    let mut runs = 0;
    let mut min_gap = f64::INFINITY;
    for &eps in &[0.3, 0.7] {
        for &delta in &[0.05, 0.5] {
            let acc = Accuracy::new(eps, delta).unwrap();
            for seed in 0..20u64 {
                let streams: [(&str, Rows); 5] = [
                    ("gaussian", gaussian(300, d, seed)),
                    ("identity", identity(d, 40)),
                    ("repeated e1", vec![common::unit(d, 0); 300]),
                    ("cliques", cliques(d, 4, eps, delta)),
                    ("multiscale", multiscale(300, d, seed)),
                ];
                for (name, rows) in &streams {
                    let mut bss = OnlineBss::<f64>::new(d, acc, seed).unwrap();
                    let mut kept = Vec::new();
                    for r in rows {
                        let dec = match bss.step(r) {
                            Ok(dec) => dec,
                            Err(e) => {
                                return outcome(
                                    false,
                                    format!("{name} ε={eps} δ={delta} seed {seed}: {e}"),
                                )
                            }
                        };
                        let (u, l) = bss.gap_min_eigenvalues().unwrap();
                        min_gap = min_gap.min(u.min(l));
                        if !(u > 0.0 && l > 0.0) {
                            return outcome(
                                false,
                                format!("{name} seed {seed}: gap eigenvalues {u:e}, {l:e}"),
                            );
                        }
                        if let Some(row) = dec.rescaled(r) {
                            kept.push(WeightedRow {
                                row,
                                weight: dec.rescale,
                            });
                        }
                    }
                    let cert = certify(d, rows, &kept, eps, delta).unwrap();
                    runs += 1;
                    if !cert.passed {
                        return outcome(
                            false,
                            format!(
                                "{name} ε={eps} δ={delta} seed {seed}: margins [{}, {}]",
                                cert.min_eig, cert.max_eig
                            ),
                        );
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        elapsed < Duration::from_secs(120),
        format!(
            "{runs}/{runs} certified, min gap eigenvalue {min_gap:.3e}, {:.1}s (< 120s)",
            elapsed.as_secs_f64()
        ),
    )
}

/// 4. Mean Online-BSS kept count ≤ (8/ε²)·Σ lᵢ at ridge 2δ/ε, no slack.
fn bss_expected_count() -> Outcome {
    let cases: [(&str, usize, Rows, f64, f64); 3] = [
        (
            "gaussian 500x10 ε=0.5 δ=0.1",
            10,
            gaussian(500, 10, 7),
            0.5,
            0.1,
        ),
        (
            "gaussian 2000x5 ε=0.9 δ=1",
            5,
            gaussian(2000, 5, 8),
            0.9,
            1.0,
        ),
        (
            "cliques d=8 N=8 ε=0.5 δ=0.1",
            8,
            cliques(8, 8, 0.5, 0.1),
            0.5,
            0.1,
        ),
    ];
    let mut passed = true;
    let mut parts = Vec::new();
    for (name, d, rows, eps, delta) in &cases {
        let acc = Accuracy::new(*eps, *delta).unwrap();
        let comparator = bss_count_comparator(*d, rows, acc).unwrap();
        let m = mean((0..50).map(|seed| {
            run_sampler(Algorithm::Bss, *d, rows, acc, seed)
                .unwrap()
                .stats
                .kept as f64
        }));
        passed &= m <= comparator;
        parts.push(format!(
            "{name}: {m:.1}/{comparator:.1} = {:.3}",
            m / comparator
        ));
    }
    outcome(passed, parts.join("; "))
}

/// 5. Online-Sample certifies ≥ 90% and stays under 4× the row comparator.
fn online_sample_correctness() -> Outcome {
    let d = 20;
    let rows = gaussian(500, d, 5);
    let acc = Accuracy::new(0.5, 0.1).unwrap();
    let norm = orss_core::linalg::spectral_norm_sq(gram(d, &rows).unwrap().view()).unwrap();
    let comparator = row_count_comparator(d, norm, acc.eps, acc.delta);
    let mut passes = 0;
    let mut max_kept = 0;
    for seed in 0..50 {
        let run = run_sampler(Algorithm::Online, d, &rows, acc, seed).unwrap();
        max_kept = max_kept.max(run.stats.kept);
        passes += certify(d, &rows, &run.kept, acc.eps, acc.delta)
            .unwrap()
            .passed as usize;
    }
    let rate = passes as f64 / 50.0;
    outcome(
        rate >= 0.9 && max_kept as f64 <= 4.0 * comparator,
        format!(
            "pass rate {rate:.2} (≥ 0.90); max kept {max_kept} ≤ 4×{comparator:.0} = {:.0}",
            4.0 * comparator
        ),
    )
}

/// 6. Slim-Sample's inner memory is at most half of Online-Sample's output.
fn slim_memory() -> Outcome {
    let d = 20;
    let rows = gaussian(500, d, 5);
    let acc = Accuracy::new(0.2, 0.1).unwrap();
    let online_mean = mean((0..20).map(|seed| {
        let mut s = OnlineSample::<f64>::new(d, acc, seed).unwrap();
        rows.iter().for_each(|r| {
            s.step(r).unwrap();
        });
        s.kept_count() as f64
    }));
    let mut worst_peak = 0;
    let mut passes = 0;
    for seed in 0..20 {
        let mut s = SlimSample::<f64>::new(d, acc, seed).unwrap();
        let mut kept = Vec::new();
        for r in &rows {
            let dec = s.step(r).unwrap();
            if let Some(row) = dec.rescaled(r) {
                kept.push(WeightedRow {
                    row,
                    weight: dec.rescale,
                });
            }
        }
        worst_peak = worst_peak.max(s.peak_inner_rows());
        passes += certify(d, &rows, &kept, acc.eps, acc.delta).unwrap().passed as usize;
    }
    let limit = 0.5 * online_mean;
    let rate = passes as f64 / 20.0;
    outcome(
        worst_peak as f64 <= limit && rate >= 0.9,
        format!(
            "max inner peak {worst_peak} vs 0.5 × online mean {online_mean:.1} = {limit:.1}; outer pass rate {rate:.2}"
        ),
    )
}

/// 7. Maintained inverse after 10⁴ absorbs at d = 16 (rel. Frobenius < 1e-7).
fn inverse_accuracy() -> Outcome {
    let d = 16;
    let rows = gaussian(10_000, d, 3);
    let lambda = 0.05;
    let mut s = PsdState::<f64>::new(d, lambda).unwrap();
    for r in &rows {
        s.absorb_row(r, 1.0).unwrap();
    }
    let fresh = common::regularized_gram(d, &rows, lambda)
        .try_inverse()
        .unwrap();
    let err = common::rel_fro(&common::to_na(s.inverse()), &fresh);
    outcome(err < 1e-7, format!("relative error {err:.3e} (< 1e-7)"))
}

/// 8. Online-BSS kept count grows with the number of doubling cliques.
fn lower_bound_growth() -> Outcome {
    let d = 8;
    let (eps, delta) = (0.25, 0.1);
    let acc = Accuracy::new(eps, delta).unwrap();
    let means: Vec<f64> = [2usize, 4, 8]
        .iter()
        .map(|&n| {
            let rows = cliques(d, n, eps, delta);
            mean((0..20).map(|seed| {
                run_sampler(Algorithm::Bss, d, &rows, acc, seed)
                    .unwrap()
                    .stats
                    .kept as f64
            }))
        })
        .collect();
    let monotone = means.windows(2).all(|w| w[1] > w[0]);
    outcome(
        monotone && means[2] >= 3.0 * means[0],
        format!(
            "mean kept N=2: {:.1}, N=4: {:.1}, N=8: {:.1} (ratio {:.2} ≥ 3)",
            means[0],
            means[1],
            means[2],
            means[2] / means[0]
        ),
    )
}

/// 9. Batch scoring matches the per-row pipeline; 64-row sketches stay within 2×.
fn batch_equivalence() -> Outcome {
    let mut worst = 0.0f64;
    for (d, n, eps, delta, seed) in [
        (10, 2000, 0.9, 1.0, 1u64),
        (10, 500, 0.5, 0.1, 2),
        (6, 3000, 0.7, 0.01, 3),
    ] {
        let rows = gaussian(n, d, seed);
        let acc = Accuracy::new(eps, delta).unwrap();
        let mut per_row = OnlineSample::<f64>::new(d, acc, seed).unwrap();
        let mut batched = OnlineSample::<f64>::new(d, acc, seed).unwrap();
        for r in &rows {
            let a = per_row.step(r).unwrap();
            let b = batched.step_block(std::slice::from_ref(r), d).unwrap()[0];
            worst = worst.max((a.probability - b.probability).abs());
            if a.kept != b.kept {
                return outcome(false, "batched pipeline diverged from per-row decisions");
            }
        }
    }

    let d = 10;
    let (mut within, mut total) = (0usize, 0usize);
    for seed in 0..20 {
        let rows = gaussian(200, d, 500 + seed);
        let acc = Accuracy::new(0.5, 0.1).unwrap();
        let mut s = OnlineSample::<f64>::new(d, acc, seed).unwrap();
        for r in &rows {
            let est = s.batch_scores(std::slice::from_ref(r), 64).unwrap()[0].estimate;
            let mut reg = common::to_na(s.sample_gram());
            for i in 0..d {
                reg[(i, i)] += acc.lambda();
            }
            let exact = common::quad(&reg.try_inverse().unwrap(), r);
            total += 1;
            let ratio = est / exact;
            if (0.5..=2.0).contains(&ratio) {
                within += 1;
            }
            s.step(r).unwrap();
        }
    }
    let frac = within as f64 / total as f64;
    outcome(
        worst <= 1e-9 && frac >= 0.95,
        format!(
            "max |Δp| = {worst:.2e} (≤ 1e-9); {:.1}% of sketched scores within 2× (≥ 95%)",
            100.0 * frac
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 score-sum bound", score_sum_bound),
        ("2 online overestimates offline", overestimation),
        ("3 online-bss never fails", bss_never_fails),
        ("4 online-bss expected count", bss_expected_count),
        ("5 online-sample correctness", online_sample_correctness),
        ("6 slim-sample memory", slim_memory),
        ("7 inverse maintenance", inverse_accuracy),
        ("8 lower-bound stream growth", lower_bound_growth),
        ("9 batch-mode equivalence", batch_equivalence),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let o = run();
        println!(
            "[{}] criterion {name}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.passed);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
