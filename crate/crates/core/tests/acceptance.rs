//! Acceptance gate. Runs every criterion, prints one line per criterion and
//! exits non-zero if any of them fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use ctp_core::density::{self, DensityMatrix};
use ctp_core::experiments::{self, ScreenPattern};
use ctp_core::lattice::{self, HopRange, LatticeConfig};
use ctp_core::measure::{self, MeasureContext};
use ctp_core::sampling::{self, NormalizedDistribution};
use ctp_core::{Complex64, SlitExperiment};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn default_lattice() -> LatticeConfig {
    LatticeConfig::new(64, 8, 0.5).unwrap()
}

/// Two slits symmetric about the source, barrier half way.
fn exp1() -> SlitExperiment {
    SlitExperiment::new(default_lattice(), 32, 4, vec![28, 36], []).unwrap()
}

fn max_abs_diff(a: &DensityMatrix, b: &DensityMatrix) -> (f64, f64) {
    let diff = (&a.entries - &b.entries).iter().map(|v| v.norm()).fold(0.0, f64::max);
    let scale = b.entries.iter().map(|v| v.norm()).fold(0.0, f64::max);
    (diff, scale)
}

fn axiom_suite() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut failed = Vec::new();
    let mut witnesses = 0;
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let size = rng.random_range(2..=200);
        let ctx = MeasureContext::random(6, 4, size, &mut rng).unwrap();
        let report = measure::verify_axioms(&ctx, 1000, seed).unwrap();
        worst = worst
            .max(report.additivity.max_residual)
            .max(report.conjugation.max_residual)
            .max(report.factorization.max_residual);
        witnesses += report.complex_witness.is_some() as usize;
        if !report.passed() {
            failed.push(seed);
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: failed.is_empty() && worst <= 1e-10 && elapsed <= Duration::from_secs(60),
        detail: format!(
            "50 contexts x 1000 events, max additivity/conjugation/factorization residual {worst:.2e}, \
             complex witnesses {witnesses}/50, failing seeds {failed:?}, {elapsed:.1?}"
        ),
    }
}

fn evaluator_equivalence() -> Outcome {
    let start = Instant::now();
    let mut configs = 0usize;
    let mut worst = 0.0f64;
    for s in 2..=6usize {
        for t in 2..=5usize {
            for barrier in 1..t {
                for a in 0..s {
                    for b in a + 1..s {
                        let mut ranges: Vec<HopRange> = (1..s).map(HopRange::Limited).collect();
                        ranges.push(HopRange::All);
                        for &range in &ranges {
                            let config = LatticeConfig::new(s, t, 0.5)
                                .unwrap()
                                .with_hop_range(range)
                                .unwrap()
                                .with_mask(barrier, [a, b])
                                .unwrap();
                            for src in 0..s {
                                for dst in 0..s {
                                    let naive = lattice::path_sum_naive(&config, src, dst).unwrap();
                                    let fast = lattice::path_sum_fast(&config, src, dst).unwrap();
                                    worst = worst.max((naive - fast).norm());
                                    configs += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: worst <= 1e-10 && elapsed <= Duration::from_secs(120),
        detail: format!("{configs} source/target/slit configs, max |naive - fast| {worst:.2e}, {elapsed:.1?}"),
    }
}

fn exp1_exp2_identity() -> Outcome {
    let e1 = exp1();
    let e2 = e1.with_measured([1]).unwrap();
    let p1 = experiments::pattern(&e1).unwrap();
    let p2 = experiments::pattern(&e2).unwrap();
    let scale = p1.scale();
    let mut worst = 0.0f64;
    let mut worst_interference = 0.0f64;
    for (r1, r2) in p1.rows.iter().zip(&p2.rows) {
        let cross = 2.0 * (r1.slit_amps[0] * r1.slit_amps[1].conj()).re;
        worst = worst.max(((r1.total - r2.total) - Complex64::new(cross, 0.0)).norm());
        worst_interference = worst_interference.max(r2.interference.norm());
    }
    let rel = worst / scale;
    let rel_interference = worst_interference / scale;
    Outcome {
        pass: rel <= 1e-12 && rel_interference <= 1e-12,
        detail: format!(
            "max |Φ1 - Φ2 - 2Re φ1φ2*| = {rel:.2e} x scale, max |Exp.2 interference| = {rel_interference:.2e} x scale (scale {scale:.3e})"
        ),
    }
}

fn null_event_witness() -> Outcome {
    let a = Complex64::new(0.6, -0.8);
    let synthetic = ScreenPattern::from_amplitudes(vec![vec![a, -a]], BTreeSet::new());
    let row = &synthetic.rows[0];
    let diag = row.event_classes(&BTreeSet::new())[0].1;
    let synthetic_ok = row.total == Complex64::new(0.0, 0.0) && diag == Complex64::new(a.norm_sqr(), 0.0) && diag.re > 0.0;

    let e = exp1();
    let sites = experiments::find_null_events(&e, 1e-3).unwrap();
    let p = experiments::pattern(&e).unwrap();
    let max = p.max_total();
    let verified = sites.iter().all(|&x| {
        let r = &p.rows[x];
        r.total.re <= 1e-3 * max && r.slit_amps.iter().any(|a| a.norm_sqr() >= 1e-3 * max)
    });
    let ratios: Vec<String> = sites
        .iter()
        .map(|&x| format!("x={x}: Φ/max={:.1e}", p.rows[x].total.re / max))
        .collect();
    Outcome {
        pass: synthetic_ok && !sites.is_empty() && verified,
        detail: format!(
            "synthetic Φ(E)={} with Φ(E11)={:.2}; lattice witnesses {sites:?} [{}]",
            row.total,
            diag.re,
            ratios.join(", ")
        ),
    }
}

fn density_consistency() -> Outcome {
    let base = exp1();
    let mut lines = Vec::new();
    let mut pass = true;
    for measured in [vec![], vec![1], vec![0, 1]] {
        let e = base.with_measured(measured.clone()).unwrap();
        let rho = density::density_at(&e, e.screen_t()).unwrap();
        let p = experiments::pattern(&e).unwrap();
        let diag = density::diagonal_pattern(&rho);
        let diag_err = diag
            .iter()
            .zip(p.totals())
            .map(|(d, t)| (d - t).abs())
            .fold(0.0, f64::max)
            / p.scale();
        let report = rho.report();
        let psd = report.min_eigenvalue / report.trace;
        let early = density::density_at(&e, e.barrier_t).unwrap();
        let evolved = density::evolve_density(&early, &e, e.screen_t() - e.barrier_t).unwrap();
        let (diff, scale) = max_abs_diff(&evolved, &rho);
        let route = diff / scale;
        let evolved_report = evolved.report();
        let ok = diag_err <= 1e-10
            && report.hermiticity_residual <= 1e-12
            && psd >= -1e-10
            && evolved_report.min_eigenvalue >= -1e-10 * evolved_report.trace
            && route <= 1e-10;
        pass &= ok;
        lines.push(format!(
            "measured {measured:?}: diag {diag_err:.1e}, herm {:.1e}, λmin/tr {psd:.1e}, route {route:.1e}, rank {}",
            report.hermiticity_residual, report.rank_estimate
        ));
    }
    Outcome {
        pass,
        detail: lines.join("; "),
    }
}

fn born_lln() -> Outcome {
    let start = Instant::now();
    let e = exp1();
    let dist = sampling::normalize(&experiments::pattern(&e).unwrap()).unwrap();
    let n = 100_000u64;
    let mut bound_passes = 0;
    let mut null_ok = 0;
    for seed in 0..100u64 {
        let report = sampling::sample(&dist, n, seed).unwrap();
        let outcome = sampling::lln_check(&report, &dist);
        bound_passes += outcome.per_bin.iter().all(|&b| b) as usize;
        null_ok += outcome.null_respected as usize;
    }

    // A hop-limited variant leaves the outer screen sites unreachable.
    let mut limited = e.clone();
    limited.config.hop_range = HopRange::Limited(3);
    let limited_dist = sampling::normalize(&experiments::pattern(&limited).unwrap()).unwrap();
    let zero_bins = limited_dist.probs.iter().filter(|&&p| p == 0.0).count();
    let limited_null_ok = (0..100u64)
        .filter(|&seed| {
            let report = sampling::sample(&limited_dist, n, seed).unwrap();
            sampling::lln_check(&report, &limited_dist).null_respected
        })
        .count();

    let msd = |dist: &NormalizedDistribution, n: u64| -> f64 {
        (0..30u64)
            .map(|seed| sampling::mean_squared_deviation(&sampling::sample(dist, n, 1000 + seed).unwrap()))
            .sum::<f64>()
            / 30.0
    };
    let ratio = msd(&dist, 4 * n) / msd(&dist, n);
    let born = sampling::born_check(&e, n, 7).unwrap();
    let elapsed = start.elapsed();
    Outcome {
        pass: bound_passes >= 99
            && null_ok == 100
            && limited_null_ok == 100
            && zero_bins > 0
            && (0.15..=0.45).contains(&ratio)
            && born.route_residual <= 1e-10
            && elapsed <= Duration::from_secs(60),
        detail: format!(
            "4σ bound held in {bound_passes}/100 seeds, null bins empty in {null_ok}/100 (Exp.1) and \
             {limited_null_ok}/100 ({zero_bins} null bins, hop range 3), MSD ratio N→4N {ratio:.3}, \
             route residual {:.1e}, {elapsed:.1?}",
            born.route_residual
        ),
    }
}

fn n_slit_generalization() -> Outcome {
    let e = SlitExperiment::new(default_lattice(), 32, 4, vec![26, 32, 38], [0]).unwrap();
    let p = experiments::pattern(&e).unwrap();
    let scale = p.scale();
    let mut worst = 0.0f64;
    for x in 0..e.config.sites {
        let phi = experiments::slit_amplitudes(&e, x).unwrap();
        let recomputed = Complex64::new(phi[0].norm_sqr(), 0.0)
            + phi[1] * phi[1].conj()
            + phi[1] * phi[2].conj()
            + phi[2] * phi[1].conj()
            + phi[2] * phi[2].conj();
        worst = worst.max((recomputed - p.rows[x].total).norm());
    }
    let rel = worst / scale;
    Outcome {
        pass: rel <= 1e-12,
        detail: format!("n=3, m=1: max |pattern - formula| = {rel:.2e} x scale"),
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("AC1 axiom suite", axiom_suite),
        ("AC2 evaluator equivalence", evaluator_equivalence),
        ("AC3 Exp.1/Exp.2 identity", exp1_exp2_identity),
        ("AC4 null-event witness", null_event_witness),
        ("AC5 density consistency", density_consistency),
        ("AC6 Born/LLN frequencies", born_lln),
        ("AC7 n-slit generalization", n_slit_generalization),
    ];
    let mut failures = 0;
    for (name, run) in criteria {
        let outcome = run();
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {name}: {}", outcome.detail);
        failures += (!outcome.pass) as usize;
    }
    if failures == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} criteria failed");
        ExitCode::FAILURE
    }
}
