//! Per-slit wave functions and the non-normalized density matrix.
//!
//! Behind the barrier the state is described by
//! `ρ(x₊, x₋; t) = Σ_blocks Ψ_b(x₊, t)·conj(Ψ_b(x₋, t))`, where each measured
//! slit forms its own block and all unmeasured slits together form one block
//! whose wave function is the sum of their `ψₖ`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CtpError, Result};
use crate::experiments::SlitExperiment;
use crate::lattice::{self, PropagatorMatrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveFunction {
    pub values: Vec<Complex64>,
    pub t: usize,
    /// Index of the slit this component went through.
    pub label: usize,
}

impl WaveFunction {
    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub entries: DMatrix<Complex64>,
    pub t: usize,
    /// Number of rank-one terms the matrix was assembled from.
    pub rank_bound: usize,
}

/// Structural diagnostics of a density matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub t: usize,
    pub trace: f64,
    /// `max |ρ(a,b) − conj ρ(b,a)|` divided by `max(1, max |ρ|)`.
    pub hermiticity_residual: f64,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub rank_estimate: usize,
    pub rank_bound: usize,
}

impl DensityReport {
    pub fn is_psd(&self) -> bool {
        self.min_eigenvalue >= -crate::tolerance::PSD_RELATIVE * self.trace.abs()
    }
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        let m = &self.entries;
        let n = m.nrows();
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                worst = worst.max((m[(a, b)] - m[(b, a)].conj()).norm());
                scale = scale.max(m[(a, b)].norm());
            }
        }
        crate::tolerance::scaled(worst, scale)
    }

    /// Ascending eigenvalues of the hermitian part.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.entries + self.entries.adjoint()) * Complex64::new(0.5, 0.0);
        let mut values: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
        values.sort_by(f64::total_cmp);
        values
    }

    pub fn report(&self) -> DensityReport {
        let eig = self.eigenvalues();
        let max = eig.last().copied().unwrap_or(0.0);
        let min = eig.first().copied().unwrap_or(0.0);
        let cutoff = 1e-9 * max.abs();
        DensityReport {
            t: self.t,
            trace: self.trace().re,
            hermiticity_residual: self.hermiticity_residual(),
            min_eigenvalue: min,
            max_eigenvalue: max,
            rank_estimate: eig.iter().filter(|&&v| v > cutoff && v > 0.0).count(),
            rank_bound: self.rank_bound,
        }
    }

    fn rank_one(values: &[Complex64]) -> DMatrix<Complex64> {
        let n = values.len();
        DMatrix::from_fn(n, n, |a, b| values[a] * values[b].conj())
    }
}

/// `ψₖ(·, t)` for each slit: a delta at the source propagated with only slit
/// `k` open at the barrier.
pub fn slit_wavefunctions(exp: &SlitExperiment, t: usize) -> Result<Vec<WaveFunction>> {
    exp.validate()?;
    if t < exp.barrier_t || t > exp.screen_t() {
        return Err(CtpError::Domain(format!(
            "components exist between the barrier (t={}) and the screen (t={}), not at t={t}",
            exp.barrier_t,
            exp.screen_t()
        )));
    }
    (0..exp.slit_count())
        .map(|k| {
            let values = lattice::propagate_from_source(&exp.slit_config(k), exp.source, t)?;
            Ok(WaveFunction { values, t, label: k })
        })
        .collect()
}

/// Assembles `ρ` from the slit components according to `exp.measured`.
pub fn assemble_density(components: &[WaveFunction], exp: &SlitExperiment) -> Result<DensityMatrix> {
    let first = components
        .first()
        .ok_or_else(|| CtpError::Domain("no components to assemble".into()))?;
    let t = first.t;
    let dim = first.values.len();
    if let Some(bad) = components.iter().find(|c| c.t != t) {
        return Err(CtpError::Domain(format!(
            "component {} lives at t={}, others at t={t}",
            bad.label, bad.t
        )));
    }
    if components.iter().any(|c| c.values.len() != dim) {
        return Err(CtpError::Domain("components have different lengths".into()));
    }
    let mut blocks: Vec<Vec<Complex64>> = Vec::new();
    let mut unmeasured: Option<Vec<Complex64>> = None;
    for c in components {
        if exp.measured.contains(&c.label) {
            blocks.push(c.values.clone());
        } else {
            match &mut unmeasured {
                Some(sum) => sum.iter_mut().zip(&c.values).for_each(|(s, v)| *s += v),
                None => unmeasured = Some(c.values.clone()),
            }
        }
    }
    blocks.extend(unmeasured);
    let mut entries = DMatrix::zeros(dim, dim);
    for block in &blocks {
        entries += DensityMatrix::rank_one(block);
    }
    Ok(DensityMatrix {
        entries,
        t,
        rank_bound: blocks.len(),
    })
}

/// `diag(ρ)` with the (vanishing) imaginary parts dropped.
pub fn diagonal_pattern(rho: &DensityMatrix) -> Vec<f64> {
    rho.entries.diagonal().iter().map(|v| v.re).collect()
}

/// `ρ ↦ (M K) ρ (M K)†` for `steps` slices.
pub fn evolve_density(rho: &DensityMatrix, exp: &SlitExperiment, steps: usize) -> Result<DensityMatrix> {
    let target = rho.t + steps;
    if target > exp.screen_t() {
        return Err(CtpError::Domain(format!(
            "evolving {steps} steps from t={} overshoots T = {}",
            rho.t,
            exp.screen_t()
        )));
    }
    if rho.dim() != exp.config.sites {
        return Err(CtpError::Domain("density matrix does not match the lattice".into()));
    }
    let config = exp.full_config();
    let kernel = PropagatorMatrix::new(&config);
    let mut entries = rho.entries.clone();
    for t in rho.t + 1..=target {
        let step = kernel.masked(&config, t);
        entries = &step * entries * step.adjoint();
    }
    Ok(DensityMatrix {
        entries,
        t: target,
        rank_bound: rho.rank_bound,
    })
}

/// Density matrix of the experiment's preparation at slice `t`.
pub fn density_at(exp: &SlitExperiment, t: usize) -> Result<DensityMatrix> {
    assemble_density(&slit_wavefunctions(exp, t)?, exp)
}
