//! Normalized screen distributions, seeded sampling and frequency checks.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::density;
use crate::error::{CtpError, Result};
use crate::experiments::{self, ScreenPattern, SlitExperiment};
use crate::tolerance;

/// `Φ̃ = Φ / Z` over the screen sites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedDistribution {
    pub bins: Vec<usize>,
    pub probs: Vec<f64>,
    pub z: f64,
}

impl NormalizedDistribution {
    /// Normalizes non-negative weights. Negative weights within `tolerance`
    /// of the largest weight are treated as zero.
    pub fn from_weights(bins: Vec<usize>, weights: &[f64], tolerance: f64) -> Result<Self> {
        if bins.len() != weights.len() {
            return Err(CtpError::Domain("bins and weights differ in length".into()));
        }
        let scale = weights.iter().fold(0.0f64, |m, w| m.max(w.abs()));
        if let Some(w) = weights.iter().find(|&&w| !w.is_finite() || w < -tolerance * scale.max(1.0)) {
            return Err(CtpError::Invariant(format!("weight {w} is not a non-negative real")));
        }
        let z: f64 = weights.iter().sum();
        if !(z > 0.0) {
            return Err(CtpError::Degenerate(format!("normalization constant Z = {z} is not positive")));
        }
        let clamped: Vec<f64> = weights.iter().map(|w| w.max(0.0)).collect();
        let kept: f64 = clamped.iter().sum();
        let probs = clamped.iter().map(|w| w / kept).collect();
        Ok(NormalizedDistribution { bins, probs, z })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Normalizes a screen pattern by `Z = Σₓ Φ(E(x))`.
pub fn normalize(pattern: &ScreenPattern) -> Result<NormalizedDistribution> {
    let scale = pattern.scale().max(1.0);
    if let Some(row) = pattern
        .rows
        .iter()
        .find(|r| !(r.total.im.abs() <= tolerance::ACCUMULATED * scale))
    {
        return Err(CtpError::Invariant(format!(
            "screen site {} has non-real C-probability {}",
            row.x, row.total
        )));
    }
    let bins = pattern.rows.iter().map(|r| r.x).collect();
    NormalizedDistribution::from_weights(bins, &pattern.totals(), tolerance::ACCUMULATED)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyReport {
    pub n: u64,
    pub seed: u64,
    pub bins: Vec<usize>,
    pub counts: Vec<u64>,
    /// `Φ̃` per bin.
    pub probs: Vec<f64>,
    /// Empirical relative frequencies `p`.
    pub frequencies: Vec<f64>,
    pub deviations: Vec<f64>,
    pub bounds: Vec<f64>,
    pub pass: bool,
}

/// Per-bin outcome of the frequency check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlnOutcome {
    pub per_bin: Vec<bool>,
    /// Bins with `Φ̃ = 0` never occurred.
    pub null_respected: bool,
    pub pass: bool,
}

/// `4·sqrt(Φ̃(1−Φ̃)/N)`.
pub fn deviation_bound(prob: f64, n: u64) -> f64 {
    4.0 * (prob * (1.0 - prob) / n as f64).max(0.0).sqrt()
}

/// `n` independent inverse-CDF draws from `dist` using a generator seeded by
/// `seed`. Identical inputs give identical reports.
pub fn sample(dist: &NormalizedDistribution, n: u64, seed: u64) -> Result<FrequencyReport> {
    if n == 0 {
        return Err(CtpError::Domain("need at least one sample".into()));
    }
    if dist.is_empty() {
        return Err(CtpError::Domain("cannot sample an empty distribution".into()));
    }
    let mut cdf = Vec::with_capacity(dist.len());
    let mut acc = 0.0;
    for p in &dist.probs {
        acc += p;
        cdf.push(acc);
    }
    let top = acc;
    // Last bin that can actually be drawn, for u landing on the rounding gap.
    let last = dist.probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; dist.len()];
    for _ in 0..n {
        let u = rng.random::<f64>() * top;
        let k = cdf.partition_point(|&c| c <= u).min(last);
        counts[k] += 1;
    }
    let mut report = FrequencyReport {
        n,
        seed,
        bins: dist.bins.clone(),
        frequencies: counts.iter().map(|&c| c as f64 / n as f64).collect(),
        counts,
        probs: dist.probs.clone(),
        deviations: Vec::new(),
        bounds: dist.probs.iter().map(|&p| deviation_bound(p, n)).collect(),
        pass: false,
    };
    report.deviations = report
        .frequencies
        .iter()
        .zip(&dist.probs)
        .map(|(f, p)| (f - p).abs())
        .collect();
    report.pass = lln_check(&report, dist).pass;
    Ok(report)
}

/// Checks every bin against its 4σ binomial bound and that null bins stayed
/// empty.
pub fn lln_check(report: &FrequencyReport, dist: &NormalizedDistribution) -> LlnOutcome {
    let n = report.n;
    let per_bin: Vec<bool> = dist
        .probs
        .iter()
        .zip(&report.counts)
        .map(|(&p, &count)| {
            if p == 0.0 {
                return count == 0;
            }
            let freq = count as f64 / n as f64;
            (freq - p).abs() <= deviation_bound(p, n)
        })
        .collect();
    let null_respected = dist
        .probs
        .iter()
        .zip(&report.counts)
        .all(|(&p, &c)| p != 0.0 || c == 0);
    let pass = per_bin.len() == report.counts.len() && per_bin.iter().all(|&b| b) && null_respected;
    LlnOutcome {
        per_bin,
        null_respected,
        pass,
    }
}

/// Mean of the squared per-bin deviations.
pub fn mean_squared_deviation(report: &FrequencyReport) -> f64 {
    if report.deviations.is_empty() {
        return 0.0;
    }
    report.deviations.iter().map(|d| d * d).sum::<f64>() / report.deviations.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BornReport {
    /// `Φ̃` from the screen pattern.
    pub pattern_probs: Vec<f64>,
    /// `|ψ̃|²` (no detectors) or normalized `diag ρ` (with detectors).
    pub state_probs: Vec<f64>,
    pub route_residual: f64,
    pub frequencies: FrequencyReport,
    pub lln: LlnOutcome,
    pub pass: bool,
}

/// Computes `Φ̃` along two routes, checks they agree, then samples it.
pub fn born_check(exp: &SlitExperiment, n: u64, seed: u64) -> Result<BornReport> {
    let pattern = experiments::pattern(exp)?;
    let dist = normalize(&pattern)?;
    let components = density::slit_wavefunctions(exp, exp.screen_t())?;
    let state_probs = if exp.measured.is_empty() {
        let dim = exp.config.sites;
        let psi: Vec<Complex64> = (0..dim)
            .map(|x| components.iter().map(|c| c.values[x]).sum())
            .collect();
        let norm: f64 = psi.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(CtpError::Degenerate("the wave function vanishes on the screen".into()));
        }
        psi.iter().map(|v| (v / norm).norm_sqr()).collect::<Vec<_>>()
    } else {
        let rho = density::assemble_density(&components, exp)?;
        let diag = density::diagonal_pattern(&rho);
        let trace: f64 = diag.iter().sum();
        if !(trace > 0.0) {
            return Err(CtpError::Degenerate("the density matrix has zero trace".into()));
        }
        diag.iter().map(|d| d / trace).collect()
    };
    let route_residual = dist
        .probs
        .iter()
        .zip(&state_probs)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let frequencies = sample(&dist, n, seed)?;
    let lln = lln_check(&frequencies, &dist);
    Ok(BornReport {
        pattern_probs: dist.probs.clone(),
        state_probs,
        route_residual,
        pass: lln.pass && route_residual <= tolerance::ACCUMULATED,
        frequencies,
        lln,
    })
}
