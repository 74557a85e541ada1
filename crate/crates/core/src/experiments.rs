//! n-slit experiments on the lattice.
//!
//! A particle leaves `source` at slice 0, crosses a barrier at `barrier_t`
//! whose only open sites are the slits, and is observed on the screen at the
//! final slice. With slits `1..m` measured and `m+1..n` unmeasured the
//! observed event at screen site `x` has C-probability
//!
//! ```text
//! Φ(E(x)) = Σ_{k measured} |φₖ|² + Σ_{k,l unmeasured} φₖ·conj(φₗ)
//! ```
//!
//! where `φₖ` is the path sum from the source to `x` through slit `k` alone.

use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CtpError, Result};
use crate::lattice::{self, LatticeConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlitExperiment {
    pub config: LatticeConfig,
    pub source: usize,
    pub barrier_t: usize,
    /// Open barrier sites, in slit order.
    pub slits: Vec<usize>,
    /// Zero-based indices into `slits` of the slits carrying a detector.
    pub measured: BTreeSet<usize>,
}

impl SlitExperiment {
    pub fn new(
        config: LatticeConfig,
        source: usize,
        barrier_t: usize,
        slits: Vec<usize>,
        measured: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let exp = SlitExperiment {
            config,
            source,
            barrier_t,
            slits,
            measured: measured.into_iter().collect(),
        };
        exp.validate()?;
        Ok(exp)
    }

    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        let s = self.config.sites;
        if self.source >= s {
            return Err(CtpError::InvalidConfig(format!("source {} outside 0..{s}", self.source)));
        }
        if self.barrier_t == 0 || self.barrier_t >= self.config.steps {
            return Err(CtpError::InvalidConfig(format!(
                "barrier slice {} must lie strictly between 0 and T = {}",
                self.barrier_t, self.config.steps
            )));
        }
        if self.slits.is_empty() {
            return Err(CtpError::InvalidConfig("at least one slit is required".into()));
        }
        let distinct: BTreeSet<usize> = self.slits.iter().copied().collect();
        if distinct.len() != self.slits.len() {
            return Err(CtpError::InvalidConfig("slit positions must be distinct".into()));
        }
        if let Some(&x) = self.slits.iter().find(|&&x| x >= s) {
            return Err(CtpError::InvalidConfig(format!("slit {x} outside 0..{s}")));
        }
        if let Some(&k) = self.measured.iter().find(|&&k| k >= self.slits.len()) {
            return Err(CtpError::InvalidConfig(format!(
                "measured slit index {k} but only {} slits",
                self.slits.len()
            )));
        }
        Ok(())
    }

    pub fn screen_t(&self) -> usize {
        self.config.steps
    }

    pub fn slit_count(&self) -> usize {
        self.slits.len()
    }

    pub fn with_measured(&self, measured: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut exp = self.clone();
        exp.measured = measured.into_iter().collect();
        exp.validate()?;
        Ok(exp)
    }

    pub fn all_measured(&self) -> Self {
        let mut exp = self.clone();
        exp.measured = (0..self.slits.len()).collect();
        exp
    }

    pub fn unmeasured(&self) -> Vec<usize> {
        (0..self.slits.len()).filter(|k| !self.measured.contains(k)).collect()
    }

    /// Lattice with every slit open at the barrier.
    pub fn full_config(&self) -> LatticeConfig {
        let mut c = self.config.clone();
        c.masks.insert(self.barrier_t, self.slits.iter().copied().collect());
        c
    }

    /// Lattice with only slit `k` open at the barrier.
    pub fn slit_config(&self, k: usize) -> LatticeConfig {
        let mut c = self.config.clone();
        c.masks.insert(self.barrier_t, [self.slits[k]].into());
        c
    }

    /// `φₖ(x)` for every slit `k` (outer) and screen site `x` (inner).
    pub fn screen_amplitudes(&self) -> Result<Vec<Vec<Complex64>>> {
        self.validate()?;
        (0..self.slits.len())
            .map(|k| lattice::propagate_from_source(&self.slit_config(k), self.source, self.screen_t()))
            .collect()
    }
}

/// Slit classes `E_kl`: plus-leg through slit `k`, minus-leg through slit `l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EventClass {
    pub plus_slit: usize,
    pub minus_slit: usize,
}

impl EventClass {
    pub fn is_interference(&self) -> bool {
        self.plus_slit != self.minus_slit
    }
}

/// Event classes allowed when the slits in `measured` carry detectors.
pub fn allowed_classes(slit_count: usize, measured: &BTreeSet<usize>) -> Vec<EventClass> {
    let mut out = Vec::new();
    for k in 0..slit_count {
        for l in 0..slit_count {
            let allowed = if measured.contains(&k) || measured.contains(&l) {
                k == l && measured.contains(&k)
            } else {
                true
            };
            if allowed {
                out.push(EventClass {
                    plus_slit: k,
                    minus_slit: l,
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenRow {
    pub x: usize,
    pub total: Complex64,
    /// `Σₖ |φₖ|²` over every slit.
    pub direct: f64,
    /// `Σ φₖ·conj(φₗ)` over unmeasured `k ≠ l`.
    pub interference: Complex64,
    pub slit_amps: Vec<Complex64>,
}

impl ScreenRow {
    pub fn from_amplitudes(x: usize, slit_amps: Vec<Complex64>, measured: &BTreeSet<usize>) -> Self {
        let direct: f64 = slit_amps.iter().map(|a| a.norm_sqr()).sum();
        let mut interference = Complex64::new(0.0, 0.0);
        for (k, ak) in slit_amps.iter().enumerate() {
            for (l, al) in slit_amps.iter().enumerate() {
                if k != l && !measured.contains(&k) && !measured.contains(&l) {
                    interference += ak * al.conj();
                }
            }
        }
        ScreenRow {
            x,
            total: Complex64::new(direct, 0.0) + interference,
            direct,
            interference,
            slit_amps,
        }
    }

    /// `|φₖ|²` per slit.
    pub fn slit_probs(&self) -> Vec<f64> {
        self.slit_amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `Φ(E_kl) = φₖ·conj(φₗ)` for the allowed classes.
    pub fn event_classes(&self, measured: &BTreeSet<usize>) -> Vec<(EventClass, Complex64)> {
        allowed_classes(self.slit_amps.len(), measured)
            .into_iter()
            .map(|c| (c, self.slit_amps[c.plus_slit] * self.slit_amps[c.minus_slit].conj()))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenPattern {
    pub measured: BTreeSet<usize>,
    pub rows: Vec<ScreenRow>,
}

impl ScreenPattern {
    /// Pattern from per-site slit amplitudes `amps[x][k]`.
    pub fn from_amplitudes(amps: Vec<Vec<Complex64>>, measured: BTreeSet<usize>) -> Self {
        let rows = amps
            .into_iter()
            .enumerate()
            .map(|(x, a)| ScreenRow::from_amplitudes(x, a, &measured))
            .collect();
        ScreenPattern { measured, rows }
    }

    pub fn totals(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.total.re).collect()
    }

    pub fn max_total(&self) -> f64 {
        self.rows.iter().map(|r| r.total.re).fold(0.0, f64::max)
    }

    /// Magnitude against which tolerances on this pattern are scaled.
    pub fn scale(&self) -> f64 {
        self.rows.iter().map(|r| r.direct).fold(0.0, f64::max)
    }

    /// Sites where the observed event is (relatively) null while some
    /// diagonal subevent `E_kk` is not.
    pub fn null_sites(&self, rel_tol: f64) -> Vec<usize> {
        let max = self.max_total();
        if max <= 0.0 {
            return Vec::new();
        }
        let threshold = rel_tol * max;
        self.rows
            .iter()
            .filter(|r| r.total.re <= threshold && r.slit_amps.iter().any(|a| a.norm_sqr() >= threshold))
            .map(|r| r.x)
            .collect()
    }
}

pub fn slit_amplitudes(exp: &SlitExperiment, x: usize) -> Result<Vec<Complex64>> {
    if x >= exp.config.sites {
        return Err(CtpError::InvalidConfig(format!("screen site {x} outside the lattice")));
    }
    exp.validate()?;
    (0..exp.slit_count())
        .map(|k| lattice::path_sum_fast(&exp.slit_config(k), exp.source, x))
        .collect()
}

pub fn pattern(exp: &SlitExperiment) -> Result<ScreenPattern> {
    let by_slit = exp.screen_amplitudes()?;
    let by_site = (0..exp.config.sites)
        .map(|x| by_slit.iter().map(|amps| amps[x]).collect())
        .collect();
    Ok(ScreenPattern::from_amplitudes(by_site, exp.measured.clone()))
}

/// Additive pattern: every slit treated as measured.
pub fn classical_baseline(exp: &SlitExperiment) -> Result<ScreenPattern> {
    pattern(&exp.all_measured())
}

pub fn event_decomposition(exp: &SlitExperiment, x: usize) -> Result<Vec<(EventClass, Complex64)>> {
    let amps = slit_amplitudes(exp, x)?;
    Ok(ScreenRow::from_amplitudes(x, amps, &exp.measured).event_classes(&exp.measured))
}

/// Null-event witnesses of an experiment without detectors.
pub fn find_null_events(exp: &SlitExperiment, rel_tol: f64) -> Result<Vec<usize>> {
    if !exp.measured.is_empty() {
        return Err(CtpError::Domain(
            "null events are searched for with every slit unmeasured".into(),
        ));
    }
    Ok(pattern(exp)?.null_sites(rel_tol))
}
