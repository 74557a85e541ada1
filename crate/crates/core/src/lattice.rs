//! One-dimensional space-time lattice and discrete path sums.
//!
//! A forward path hops between sites `0..S` over `T` time steps. Each hop of
//! length `Δx` contributes the kinetic phase `exp(i·α·Δx²)`, so a path's
//! amplitude is `exp(i·α·ΣΔx²)`. Paths may not leave the lattice (hard walls)
//! and must stay on the open sites of every masked slice.
//!
//! Two evaluators compute the same sum over paths: [`path_sum_naive`]
//! enumerates every path, [`path_sum_fast`] multiplies masked transfer
//! matrices.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CtpError, Result};
use crate::measure::{Orientation, Path};
use crate::tolerance::ENUMERATION_LIMIT;

/// Maximum `|Δx|` per step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HopRange {
    All,
    Limited(usize),
}

impl Serialize for HopRange {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            HopRange::All => s.serialize_str("all"),
            HopRange::Limited(r) => s.serialize_u64(*r as u64),
        }
    }
}

impl<'de> Deserialize<'de> for HopRange {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Count(usize),
            Name(String),
        }
        match Raw::deserialize(d)? {
            Raw::Count(r) => Ok(HopRange::Limited(r)),
            Raw::Name(s) if s == "all" => Ok(HopRange::All),
            Raw::Name(s) => Err(serde::de::Error::custom(format!("hop range must be \"all\" or a count, got {s:?}"))),
        }
    }
}

impl std::str::FromStr for HopRange {
    type Err = CtpError;

    fn from_str(s: &str) -> Result<Self> {
        if s == "all" {
            return Ok(HopRange::All);
        }
        s.parse()
            .map(HopRange::Limited)
            .map_err(|_| CtpError::InvalidConfig(format!("hop range must be \"all\" or a count, got {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeConfig {
    pub sites: usize,
    pub steps: usize,
    /// Kinetic phase coefficient.
    pub alpha: f64,
    pub hop_range: HopRange,
    /// Open sites per time slice; slices without an entry are fully open.
    #[serde(default)]
    pub masks: BTreeMap<usize, BTreeSet<usize>>,
}

impl LatticeConfig {
    pub fn new(sites: usize, steps: usize, alpha: f64) -> Result<Self> {
        let config = LatticeConfig {
            sites,
            steps,
            alpha,
            hop_range: HopRange::All,
            masks: BTreeMap::new(),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_hop_range(mut self, hop_range: HopRange) -> Result<Self> {
        self.hop_range = hop_range;
        self.validate()?;
        Ok(self)
    }

    pub fn with_mask(mut self, t: usize, open: impl IntoIterator<Item = usize>) -> Result<Self> {
        self.masks.insert(t, open.into_iter().collect());
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites < 2 {
            return Err(CtpError::InvalidConfig(format!("need at least 2 sites, got {}", self.sites)));
        }
        if self.steps < 1 {
            return Err(CtpError::InvalidConfig("need at least one time step".into()));
        }
        if !self.alpha.is_finite() {
            return Err(CtpError::InvalidConfig(format!("alpha must be finite, got {}", self.alpha)));
        }
        if let HopRange::Limited(r) = self.hop_range {
            if r < 1 || r > self.sites - 1 {
                return Err(CtpError::InvalidConfig(format!(
                    "hop range {r} outside 1..={}",
                    self.sites - 1
                )));
            }
        }
        for (&t, open) in &self.masks {
            if t > self.steps {
                return Err(CtpError::InvalidConfig(format!("mask at slice {t} beyond T = {}", self.steps)));
            }
            if open.is_empty() {
                return Err(CtpError::InvalidConfig(format!("mask at slice {t} has no open site")));
            }
            if let Some(&x) = open.iter().find(|&&x| x >= self.sites) {
                return Err(CtpError::InvalidConfig(format!("mask at slice {t} opens site {x} outside the lattice")));
            }
        }
        Ok(())
    }

    pub fn max_hop(&self) -> usize {
        match self.hop_range {
            HopRange::All => self.sites - 1,
            HopRange::Limited(r) => r,
        }
    }

    pub fn is_open(&self, t: usize, x: usize) -> bool {
        x < self.sites && self.masks.get(&t).is_none_or(|open| open.contains(&x))
    }

    /// `exp(i·α·Δx²)`.
    pub fn step_phase(&self, dx: usize) -> Complex64 {
        Complex64::from_polar(1.0, self.alpha * (dx * dx) as f64)
    }

    fn phase_table(&self) -> Vec<Complex64> {
        (0..=self.max_hop()).map(|dx| self.step_phase(dx)).collect()
    }

    fn hop_window(&self, x: usize) -> std::ops::RangeInclusive<usize> {
        let r = self.max_hop();
        x.saturating_sub(r)..=(x + r).min(self.sites - 1)
    }

    fn check_site(&self, x: usize, what: &str) -> Result<()> {
        if x >= self.sites {
            return Err(CtpError::InvalidConfig(format!("{what} {x} outside 0..{}", self.sites)));
        }
        Ok(())
    }

    pub fn propagator(&self) -> PropagatorMatrix {
        PropagatorMatrix::new(self)
    }
}

/// One-step kernel `K[x'][x] = exp(i·α·(x'−x)²)` for `|x'−x| ≤ R`, else 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagatorMatrix {
    entries: DMatrix<Complex64>,
}

impl PropagatorMatrix {
    pub fn new(config: &LatticeConfig) -> Self {
        let r = config.max_hop();
        let entries = DMatrix::from_fn(config.sites, config.sites, |to, from| {
            let dx = to.abs_diff(from);
            if dx <= r {
                config.step_phase(dx)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        PropagatorMatrix { entries }
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// `M_t K`: the kernel followed by projection onto the open sites of
    /// slice `t`.
    pub fn masked(&self, config: &LatticeConfig, t: usize) -> DMatrix<Complex64> {
        let mut m = self.entries.clone();
        for to in 0..config.sites {
            if !config.is_open(t, to) {
                m.row_mut(to).fill(Complex64::new(0.0, 0.0));
            }
        }
        m
    }
}

/// `Π exp(i·α·Δx²)` along a valid forward path.
pub fn path_amplitude(path: &Path, config: &LatticeConfig) -> Result<Complex64> {
    let sites = match path.orientation() {
        Orientation::Forward => path.sites().to_vec(),
        Orientation::Backward => path.time_ordered(),
    };
    if sites.len() != config.steps + 1 {
        return Err(CtpError::InvalidPath(format!(
            "path has {} sites, expected {}",
            sites.len(),
            config.steps + 1
        )));
    }
    for (t, &x) in sites.iter().enumerate() {
        if x >= config.sites {
            return Err(CtpError::InvalidPath(format!("site {x} at t={t} is outside the lattice")));
        }
        if !config.is_open(t, x) {
            return Err(CtpError::InvalidPath(format!("site {x} is closed at t={t}")));
        }
    }
    let mut action: u64 = 0;
    for w in sites.windows(2) {
        let dx = w[0].abs_diff(w[1]);
        if dx > config.max_hop() {
            return Err(CtpError::InvalidPath(format!(
                "hop of {dx} exceeds the range {}",
                config.max_hop()
            )));
        }
        action += (dx * dx) as u64;
    }
    Ok(Complex64::from_polar(1.0, config.alpha * action as f64))
}

/// `reach[t][x]`: site `x` at slice `t` is open and can still reach `target`
/// at slice `T`.
fn reachability(config: &LatticeConfig, target: usize) -> Vec<Vec<bool>> {
    let (s, steps) = (config.sites, config.steps);
    let mut reach = vec![vec![false; s]; steps + 1];
    reach[steps][target] = config.is_open(steps, target);
    for t in (0..steps).rev() {
        for x in 0..s {
            reach[t][x] = config.is_open(t, x) && config.hop_window(x).any(|y| reach[t + 1][y]);
        }
    }
    reach
}

/// Number of valid paths from `source` to `target`, saturating.
pub fn count_paths(config: &LatticeConfig, source: usize, target: usize) -> Result<u128> {
    config.validate()?;
    config.check_site(source, "source")?;
    config.check_site(target, "target")?;
    let mut counts = vec![0u128; config.sites];
    if config.is_open(0, source) {
        counts[source] = 1;
    }
    for t in 1..=config.steps {
        let next = (0..config.sites)
            .map(|x| {
                if !config.is_open(t, x) {
                    return 0;
                }
                config
                    .hop_window(x)
                    .fold(0u128, |acc, y| acc.saturating_add(counts[y]))
            })
            .collect();
        counts = next;
    }
    Ok(counts[target])
}

/// Every mask- and hop-respecting forward path from `source` at `t = 0` to
/// `target` at `t = T`, in lexicographic order.
pub fn enumerate_paths(config: &LatticeConfig, source: usize, target: usize) -> Result<Vec<Path>> {
    let count = count_paths(config, source, target)?;
    if count > ENUMERATION_LIMIT {
        return Err(CtpError::Capacity {
            count,
            limit: ENUMERATION_LIMIT,
            hint: "use the transfer-matrix evaluator or a smaller lattice",
        });
    }
    let reach = reachability(config, target);
    let mut out = Vec::with_capacity(count as usize);
    if !reach[0][source] {
        return Ok(out);
    }
    let mut current = vec![source];
    fn walk(config: &LatticeConfig, reach: &[Vec<bool>], current: &mut Vec<usize>, out: &mut Vec<Path>) {
        let t = current.len() - 1;
        if t == config.steps {
            out.push(Path::forward(current.clone()));
            return;
        }
        let x = current[t];
        for y in config.hop_window(x) {
            if reach[t + 1][y] {
                current.push(y);
                walk(config, reach, current, out);
                current.pop();
            }
        }
    }
    walk(config, &reach, &mut current, &mut out);
    Ok(out)
}

/// Sum of amplitudes over the explicit path list.
pub fn path_sum_naive(config: &LatticeConfig, source: usize, target: usize) -> Result<Complex64> {
    let paths = enumerate_paths(config, source, target)?;
    paths.iter().map(|p| path_amplitude(p, config)).sum()
}

/// Same sum as [`path_sum_naive`], by propagating a delta at `source`.
pub fn path_sum_fast(config: &LatticeConfig, source: usize, target: usize) -> Result<Complex64> {
    config.validate()?;
    config.check_site(target, "target")?;
    let state = propagate_from_source(config, source, config.steps)?;
    Ok(state[target])
}

/// Wave function at slice `t` of a delta launched from `source` at slice 0.
pub fn propagate_from_source(config: &LatticeConfig, source: usize, t: usize) -> Result<Vec<Complex64>> {
    config.validate()?;
    config.check_site(source, "source")?;
    let mut state = vec![Complex64::new(0.0, 0.0); config.sites];
    if config.is_open(0, source) {
        state[source] = Complex64::new(1.0, 0.0);
    }
    propagate(&state, config, 0, t)
}

/// Applies `M_t K` for `t = from_t + 1 ..= to_t`.
pub fn propagate(state: &[Complex64], config: &LatticeConfig, from_t: usize, to_t: usize) -> Result<Vec<Complex64>> {
    if from_t > to_t || to_t > config.steps {
        return Err(CtpError::Domain(format!(
            "cannot propagate from slice {from_t} to {to_t} on a lattice with T = {}",
            config.steps
        )));
    }
    if state.len() != config.sites {
        return Err(CtpError::Domain(format!(
            "state has {} entries, the lattice has {} sites",
            state.len(),
            config.sites
        )));
    }
    let phases = config.phase_table();
    let mut current = state.to_vec();
    let mut next = vec![Complex64::new(0.0, 0.0); config.sites];
    for t in from_t + 1..=to_t {
        for (to, slot) in next.iter_mut().enumerate() {
            *slot = if config.is_open(t, to) {
                // Sources at equal distance are added before the phase is
                // applied, so mirrored geometries give bitwise mirrored sums.
                let mut acc = phases[0] * current[to];
                for (d, phase) in phases.iter().enumerate().skip(1) {
                    let left = to.checked_sub(d).map(|x| current[x]);
                    let right = current.get(to + d).copied();
                    match (left, right) {
                        (Some(a), Some(b)) => acc += phase * (a + b),
                        (Some(a), None) | (None, Some(a)) => acc += phase * a,
                        (None, None) => break,
                    }
                }
                acc
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        std::mem::swap(&mut current, &mut next);
    }
    Ok(current)
}
