//! Trajectory pairs, events and the complex measure `Φ`.
//!
//! The sample space is `Ω = Ω₊ × Ω₋`, where `Ω₊` is a finite set of forward
//! paths and `Ω₋` is its time reversal. An elementary event is a
//! [`TrajectoryPair`]; its C-probability is `φ(γ₊)·conj(φ(γ̌₋))`, with `φ` the
//! amplitude attached to each forward path. Every subset of `Ω` is an event.
//!
//! Internally events are handled as [`PairSet`]s: sorted sets of index pairs
//! `(i, j)` meaning `(Ω₊[i], reverse(Ω₊[j]))`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_complex::Complex64;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CtpError, Result};
use crate::lattice::{self, LatticeConfig};
use crate::tolerance::{self, scaled};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Forward,
    Backward,
}

/// A lattice path.
///
/// `sites` is stored in traversal order. A forward path visits `sites[i]` at
/// time `i`; a backward path starts at the last time slice, so it visits
/// `sites[i]` at time `T - i`. Reversal is therefore an index reversal plus an
/// orientation flip, and leaves the set of visited space-time points unchanged.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Path {
    sites: Vec<usize>,
    orientation: Orientation,
}

impl Path {
    pub fn forward(sites: Vec<usize>) -> Self {
        Path {
            sites,
            orientation: Orientation::Forward,
        }
    }

    pub fn backward(sites: Vec<usize>) -> Self {
        Path {
            sites,
            orientation: Orientation::Backward,
        }
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Number of time steps `T`.
    pub fn steps(&self) -> usize {
        self.sites.len().saturating_sub(1)
    }

    /// Time reversal `γ̌`.
    pub fn reversed(&self) -> Path {
        let mut sites = self.sites.clone();
        sites.reverse();
        let orientation = match self.orientation {
            Orientation::Forward => Orientation::Backward,
            Orientation::Backward => Orientation::Forward,
        };
        Path { sites, orientation }
    }

    /// Site occupied at time slice `t`, if `t ≤ T`.
    pub fn site_at(&self, t: usize) -> Option<usize> {
        let steps = self.steps();
        if t > steps || self.sites.is_empty() {
            return None;
        }
        Some(match self.orientation {
            Orientation::Forward => self.sites[t],
            Orientation::Backward => self.sites[steps - t],
        })
    }

    pub fn passes(&self, point: SpaceTimePoint) -> bool {
        self.site_at(point.t) == Some(point.x)
    }

    /// Site sequence indexed by time, whatever the orientation.
    pub fn time_ordered(&self) -> Vec<usize> {
        match self.orientation {
            Orientation::Forward => self.sites.clone(),
            Orientation::Backward => self.sites.iter().rev().copied().collect(),
        }
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arrow = match self.orientation {
            Orientation::Forward => "+",
            Orientation::Backward => "-",
        };
        write!(f, "{arrow}{:?}", self.sites)
    }
}

/// `γ = (γ₊, γ₋)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TrajectoryPair {
    plus: Path,
    minus: Path,
}

impl TrajectoryPair {
    pub fn new(plus: Path, minus: Path) -> Result<Self> {
        if plus.orientation != Orientation::Forward || minus.orientation != Orientation::Backward {
            return Err(CtpError::InvalidPath(
                "a trajectory pair needs a forward plus-leg and a backward minus-leg".into(),
            ));
        }
        if plus.sites.is_empty() || plus.sites.len() != minus.sites.len() {
            return Err(CtpError::InvalidPath(format!(
                "legs must be non-empty and share T (got {} and {} sites)",
                plus.sites.len(),
                minus.sites.len()
            )));
        }
        Ok(TrajectoryPair { plus, minus })
    }

    /// The pair `(γ, γ̌)` built from one forward path.
    pub fn diagonal(path: &Path) -> Result<Self> {
        TrajectoryPair::new(path.clone(), path.reversed())
    }

    pub fn plus(&self) -> &Path {
        &self.plus
    }

    pub fn minus(&self) -> &Path {
        &self.minus
    }

    pub fn adjoint(&self) -> TrajectoryPair {
        TrajectoryPair {
            plus: self.minus.reversed(),
            minus: self.plus.reversed(),
        }
    }
}

/// `γ⁺ = (γ̌₋, γ̌₊)`.
pub fn adjoint(pair: &TrajectoryPair) -> TrajectoryPair {
    pair.adjoint()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SpaceTimePoint {
    pub t: usize,
    pub x: usize,
}

impl SpaceTimePoint {
    pub fn new(t: usize, x: usize) -> Self {
        SpaceTimePoint { t, x }
    }
}

/// Constraint record of a symbolic event.
///
/// `confirm` points must lie on both legs, `exclude` points on neither. The
/// per-leg sets only constrain one leg and are what separates the slit classes
/// `E_kl` with `k ≠ l`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraints {
    pub confirm: BTreeSet<SpaceTimePoint>,
    pub exclude: BTreeSet<SpaceTimePoint>,
    pub plus_through: BTreeSet<SpaceTimePoint>,
    pub minus_through: BTreeSet<SpaceTimePoint>,
}

impl Constraints {
    /// Interpretation-postulate event `E_{x,y}`.
    pub fn observation(
        confirm: impl IntoIterator<Item = SpaceTimePoint>,
        exclude: impl IntoIterator<Item = SpaceTimePoint>,
    ) -> Self {
        Constraints {
            confirm: confirm.into_iter().collect(),
            exclude: exclude.into_iter().collect(),
            ..Default::default()
        }
    }

    fn check(&self, sites: usize, steps: usize) -> Result<()> {
        let all = self
            .confirm
            .iter()
            .chain(&self.exclude)
            .chain(&self.plus_through)
            .chain(&self.minus_through);
        for p in all {
            if p.t > steps || p.x >= sites {
                return Err(CtpError::ConstraintDomain(format!(
                    "point (t={}, x={}) lies outside the {sites}x{} lattice",
                    p.t,
                    p.x,
                    steps + 1
                )));
            }
        }
        for p in &self.exclude {
            if self.confirm.contains(p) || self.plus_through.contains(p) || self.minus_through.contains(p) {
                return Err(CtpError::Constraint(format!(
                    "point (t={}, x={}) is both required and excluded",
                    p.t, p.x
                )));
            }
        }
        Ok(())
    }

    fn admits_plus(&self, path: &Path) -> bool {
        self.confirm.iter().chain(&self.plus_through).all(|&p| path.passes(p))
            && !self.exclude.iter().any(|&p| path.passes(p))
    }

    fn admits_minus(&self, path: &Path) -> bool {
        self.confirm.iter().chain(&self.minus_through).all(|&p| path.passes(p))
            && !self.exclude.iter().any(|&p| path.passes(p))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Event {
    Explicit(BTreeSet<TrajectoryPair>),
    Symbolic(Constraints),
    /// Union of events; the members need not be disjoint.
    Union(Vec<Event>),
}

impl Event {
    pub fn empty() -> Self {
        Event::Explicit(BTreeSet::new())
    }

    pub fn explicit(pairs: impl IntoIterator<Item = TrajectoryPair>) -> Self {
        Event::Explicit(pairs.into_iter().collect())
    }

    pub fn observation(
        confirm: impl IntoIterator<Item = SpaceTimePoint>,
        exclude: impl IntoIterator<Item = SpaceTimePoint>,
    ) -> Self {
        Event::Symbolic(Constraints::observation(confirm, exclude))
    }

    pub fn adjoint(&self) -> Event {
        match self {
            Event::Explicit(pairs) => Event::Explicit(pairs.iter().map(TrajectoryPair::adjoint).collect()),
            Event::Symbolic(c) => Event::Symbolic(Constraints {
                confirm: c.confirm.clone(),
                exclude: c.exclude.clone(),
                plus_through: c.minus_through.clone(),
                minus_through: c.plus_through.clone(),
            }),
            Event::Union(parts) => Event::Union(parts.iter().map(Event::adjoint).collect()),
        }
    }
}

/// Canonical index form of an event: sorted, duplicate-free `(plus, minus)`
/// indices into `Ω₊`, where the minus index denotes the reversed path.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct PairSet(Vec<(usize, usize)>);

impl PairSet {
    pub fn new() -> Self {
        PairSet(Vec::new())
    }

    /// `A × B̌` for index sets `A` and `B`.
    pub fn rectangle(plus: &BTreeSet<usize>, minus: &BTreeSet<usize>) -> Self {
        let mut pairs = Vec::with_capacity(plus.len() * minus.len());
        for &i in plus {
            for &j in minus {
                pairs.push((i, j));
            }
        }
        PairSet(pairs)
    }

    /// Pure event `A × Ǎ`.
    pub fn pure(indices: &BTreeSet<usize>) -> Self {
        PairSet::rectangle(indices, indices)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, pair: (usize, usize)) -> bool {
        self.0.binary_search(&pair).is_ok()
    }

    pub fn adjoint(&self) -> PairSet {
        self.0.iter().map(|&(i, j)| (j, i)).collect()
    }

    pub fn union(&self, other: &PairSet) -> PairSet {
        self.0.iter().chain(&other.0).copied().collect()
    }

    pub fn is_disjoint(&self, other: &PairSet) -> bool {
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        small.iter().all(|p| !large.contains(p))
    }

    pub fn plus_support(&self) -> BTreeSet<usize> {
        self.0.iter().map(|&(i, _)| i).collect()
    }

    pub fn minus_support(&self) -> BTreeSet<usize> {
        self.0.iter().map(|&(_, j)| j).collect()
    }

    pub fn is_hermitian(&self) -> bool {
        self.0.iter().all(|&(i, j)| self.contains((j, i)))
    }

    pub fn is_pure(&self) -> bool {
        let support = self.plus_support();
        support == self.minus_support() && self.len() == support.len() * support.len()
    }

    /// Disjoint union of pure blocks: the index relation must be an
    /// equivalence relation whose classes are complete.
    pub fn is_mixed(&self) -> bool {
        let Some(max) = self.0.iter().map(|&(i, j)| i.max(j)).max() else {
            return true;
        };
        let mut parent: Vec<usize> = (0..=max).collect();
        let mut used = vec![false; max + 1];
        fn find(parent: &mut [usize], mut k: usize) -> usize {
            while parent[k] != k {
                parent[k] = parent[parent[k]];
                k = parent[k];
            }
            k
        }
        for &(i, j) in &self.0 {
            used[i] = true;
            used[j] = true;
            let a = find(&mut parent, i);
            let b = find(&mut parent, j);
            if a != b {
                parent[a] = b;
            }
        }
        let mut sizes = vec![0usize; max + 1];
        for k in 0..=max {
            if used[k] {
                sizes[find(&mut parent, k)] += 1;
            }
        }
        sizes.iter().map(|s| s * s).sum::<usize>() == self.len()
    }

    /// Disjoint union of the pure events `Aₖ × Ǎₖ`; the blocks must be
    /// pairwise disjoint.
    pub fn mixed(blocks: &[BTreeSet<usize>]) -> Self {
        let mut owner: Vec<(usize, usize)> = blocks
            .iter()
            .enumerate()
            .flat_map(|(b, block)| block.iter().map(move |&i| (i, b)))
            .collect();
        owner.sort_unstable();
        let members: Vec<Vec<usize>> = blocks.iter().map(|b| b.iter().copied().collect()).collect();
        let mut pairs = Vec::with_capacity(members.iter().map(|m| m.len() * m.len()).sum());
        for &(i, b) in &owner {
            pairs.extend(members[b].iter().map(|&j| (i, j)));
        }
        PairSet(pairs)
    }
}

impl FromIterator<(usize, usize)> for PairSet {
    fn from_iter<I: IntoIterator<Item = (usize, usize)>>(iter: I) -> Self {
        let mut pairs: Vec<_> = iter.into_iter().collect();
        pairs.sort_unstable();
        pairs.dedup();
        PairSet(pairs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub hermitian: bool,
    pub pure: bool,
    pub mixed: bool,
}

impl Classification {
    pub fn of(pairs: &PairSet) -> Self {
        Classification {
            hermitian: pairs.is_hermitian(),
            pure: pairs.is_pure(),
            mixed: pairs.is_mixed(),
        }
    }
}

/// Finite sample space together with the forward amplitudes `φ`.
///
/// Immutable once built; share it freely between threads.
#[derive(Debug, Clone)]
pub struct MeasureContext {
    sites: usize,
    steps: usize,
    paths: Vec<Path>,
    amplitudes: Vec<Complex64>,
    index: HashMap<Vec<usize>, usize>,
}

impl MeasureContext {
    /// Builds `Ω₊` from `(path, φ(path))` entries. Paths are put in
    /// lexicographic order; duplicates are rejected.
    pub fn new(sites: usize, steps: usize, entries: Vec<(Path, Complex64)>) -> Result<Self> {
        if sites == 0 {
            return Err(CtpError::InvalidConfig("a lattice needs at least one site".into()));
        }
        let mut entries = entries;
        for (path, amp) in &entries {
            if path.orientation != Orientation::Forward {
                return Err(CtpError::InvalidPath(format!("{path} is not a forward path")));
            }
            if path.sites.len() != steps + 1 {
                return Err(CtpError::InvalidPath(format!("{path} does not have {} sites", steps + 1)));
            }
            if let Some(&x) = path.sites.iter().find(|&&x| x >= sites) {
                return Err(CtpError::InvalidPath(format!("{path} leaves the lattice at site {x}")));
            }
            if !amp.re.is_finite() || !amp.im.is_finite() {
                return Err(CtpError::InvalidConfig(format!("amplitude of {path} is not finite")));
            }
        }
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(CtpError::InvalidConfig("duplicate forward path in the sample space".into()));
        }
        let index = entries
            .iter()
            .enumerate()
            .map(|(k, (p, _))| (p.sites.clone(), k))
            .collect();
        let (paths, amplitudes) = entries.into_iter().unzip();
        Ok(MeasureContext {
            sites,
            steps,
            paths,
            amplitudes,
            index,
        })
    }

    /// All lattice paths from `source` to `target`, weighted by their kinetic
    /// phase.
    pub fn from_lattice(config: &LatticeConfig, source: usize, target: usize) -> Result<Self> {
        let paths = lattice::enumerate_paths(config, source, target)?;
        let entries = paths
            .into_iter()
            .map(|p| {
                let amp = lattice::path_amplitude(&p, config)?;
                Ok((p, amp))
            })
            .collect::<Result<Vec<_>>>()?;
        MeasureContext::new(config.sites, config.steps, entries)
    }

    /// `size` distinct random paths with random unit-modulus amplitudes.
    pub fn random<R: Rng>(sites: usize, steps: usize, size: usize, rng: &mut R) -> Result<Self> {
        let capacity = (sites as u128).checked_pow(steps as u32 + 1).unwrap_or(u128::MAX);
        if (size as u128) > capacity {
            return Err(CtpError::Capacity {
                count: size as u128,
                limit: capacity,
                hint: "the lattice has fewer distinct paths than requested",
            });
        }
        let mut seen = BTreeSet::new();
        while seen.len() < size {
            let sites_vec: Vec<usize> = (0..=steps).map(|_| rng.random_range(0..sites)).collect();
            seen.insert(sites_vec);
        }
        let entries = seen
            .into_iter()
            .map(|s| {
                let theta = rng.random_range(0.0..std::f64::consts::TAU);
                (Path::forward(s), Complex64::from_polar(1.0, theta))
            })
            .collect();
        MeasureContext::new(sites, steps, entries)
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn omega_plus(&self) -> &[Path] {
        &self.paths
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// `|Ω| = |Ω₊|²`.
    pub fn omega_size(&self) -> usize {
        self.paths.len() * self.paths.len()
    }

    pub fn index_of(&self, path: &Path) -> Option<usize> {
        match path.orientation {
            Orientation::Forward => self.index.get(&path.sites).copied(),
            Orientation::Backward => self.index.get(&path.reversed().sites).copied(),
        }
    }

    pub fn pair(&self, plus: usize, minus: usize) -> TrajectoryPair {
        TrajectoryPair {
            plus: self.paths[plus].clone(),
            minus: self.paths[minus].reversed(),
        }
    }

    /// `Σφ` over `Ω₊`.
    pub fn amplitude_sum(&self) -> Complex64 {
        self.amplitudes.iter().sum()
    }

    /// Copy with amplitudes divided by `Σφ`, so that `Φ(Ω) = 1`.
    pub fn normalized(&self) -> Result<Self> {
        let sum = self.amplitude_sum();
        if sum.norm() == 0.0 || !sum.norm().is_finite() {
            return Err(CtpError::Degenerate("amplitudes sum to zero; Φ(Ω) cannot be normalized".into()));
        }
        let mut out = self.clone();
        for a in &mut out.amplitudes {
            *a /= sum;
        }
        Ok(out)
    }

    pub fn omega(&self) -> PairSet {
        let all: BTreeSet<usize> = (0..self.len()).collect();
        PairSet::pure(&all)
    }

    /// Index form of an event.
    pub fn resolve(&self, event: &Event) -> Result<PairSet> {
        match event {
            Event::Explicit(pairs) => pairs
                .iter()
                .map(|pair| {
                    let i = self.index_of(&pair.plus);
                    let j = self.index_of(&pair.minus);
                    match (i, j) {
                        (Some(i), Some(j)) => Ok((i, j)),
                        _ => Err(CtpError::ConstraintDomain(format!(
                            "pair ({}, {}) is not in the sample space",
                            pair.plus, pair.minus
                        ))),
                    }
                })
                .collect(),
            Event::Symbolic(c) => {
                c.check(self.sites, self.steps)?;
                let plus: BTreeSet<usize> = (0..self.len()).filter(|&i| c.admits_plus(&self.paths[i])).collect();
                // γ̌ visits the same space-time points as γ.
                let minus: BTreeSet<usize> = (0..self.len()).filter(|&j| c.admits_minus(&self.paths[j])).collect();
                Ok(PairSet::rectangle(&plus, &minus))
            }
            Event::Union(parts) => {
                let mut all = Vec::new();
                for part in parts {
                    all.extend(self.resolve(part)?.0);
                }
                Ok(all.into_iter().collect())
            }
        }
    }

    /// `Σ_{(i,j)∈E} φᵢ·conj(φⱼ)` in canonical order.
    pub fn measure_pairs(&self, pairs: &PairSet) -> Complex64 {
        pairs
            .iter()
            .map(|(i, j)| self.amplitudes[i] * self.amplitudes[j].conj())
            .sum()
    }

    pub fn to_event(&self, pairs: &PairSet) -> Event {
        Event::Explicit(pairs.iter().map(|(i, j)| self.pair(i, j)).collect())
    }
}

pub fn measure(event: &Event, ctx: &MeasureContext) -> Result<Complex64> {
    if ctx.is_empty() {
        return Err(CtpError::Domain("the sample space is empty".into()));
    }
    let pairs = ctx.resolve(event)?;
    Ok(ctx.measure_pairs(&pairs))
}

pub fn classify(event: &Event, ctx: &MeasureContext) -> Result<Classification> {
    let pairs = ctx.resolve(event)?;
    Ok(Classification::of(&pairs))
}

/// Expands any event into the explicit set of its trajectory pairs.
pub fn expand_symbolic(event: &Event, ctx: &MeasureContext) -> Result<Event> {
    let pairs = ctx.resolve(event)?;
    Ok(ctx.to_event(&pairs))
}

/// Running maximum of one family of residuals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckStat {
    pub checked: usize,
    pub failures: usize,
    pub max_residual: f64,
    pub tolerance: f64,
}

impl CheckStat {
    fn new(tolerance: f64) -> Self {
        CheckStat {
            checked: 0,
            failures: 0,
            max_residual: 0.0,
            tolerance,
        }
    }

    fn record(&mut self, residual: f64) {
        self.checked += 1;
        if !(residual <= self.tolerance) {
            self.failures += 1;
        }
        if residual > self.max_residual || residual.is_nan() {
            self.max_residual = residual;
        }
    }

    fn record_flag(&mut self, ok: bool) {
        self.record(if ok { 0.0 } else { f64::INFINITY });
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Outcome of [`verify_axioms`]. Failures are counted, never thrown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub seed: u64,
    pub trials: usize,
    pub omega_plus: usize,
    /// `Φ(Ω)` after normalization.
    pub total: Complex64,
    pub total_residual: f64,
    pub additivity: CheckStat,
    pub conjugation: CheckStat,
    pub factorization: CheckStat,
    pub hermitian_real: CheckStat,
    pub pure_modulus: CheckStat,
    pub positivity: CheckStat,
    pub classification: CheckStat,
    /// Some non-hermitian event with a non-real C-probability.
    pub complex_witness: Option<Complex64>,
}

impl AxiomReport {
    pub fn checks(&self) -> [(&'static str, &CheckStat); 7] {
        [
            ("additivity", &self.additivity),
            ("conjugation", &self.conjugation),
            ("factorization", &self.factorization),
            ("hermitian-real", &self.hermitian_real),
            ("pure-modulus", &self.pure_modulus),
            ("positivity", &self.positivity),
            ("classification", &self.classification),
        ]
    }

    pub fn passed(&self) -> bool {
        self.total_residual <= tolerance::ALGEBRAIC
            && self.complex_witness.is_some()
            && self.checks().iter().all(|(_, c)| c.passed())
    }
}

fn random_subset<R: Rng>(rng: &mut R, n: usize) -> BTreeSet<usize> {
    let p: f64 = rng.random();
    (0..n).filter(|_| rng.random_bool(p)).collect()
}

fn random_pairs<R: Rng>(rng: &mut R, n: usize, max_len: usize) -> Vec<(usize, usize)> {
    let total = n * n;
    let k = rng.random_range(0..=max_len.min(total));
    index::sample(rng, total, k).into_iter().map(|c| (c / n, c % n)).collect()
}

/// Randomized check of additivity, conjugation, factorization and the
/// reality/positivity properties of hermitian, pure and mixed events.
///
/// Runs on the normalized copy of `ctx`, since factorization presumes
/// `Φ(Ω) = 1`.
pub fn verify_axioms(ctx: &MeasureContext, trials: usize, seed: u64) -> Result<AxiomReport> {
    if ctx.omega_size() > tolerance::OMEGA_LIMIT {
        return Err(CtpError::Capacity {
            count: ctx.omega_size() as u128,
            limit: tolerance::OMEGA_LIMIT as u128,
            hint: "use a smaller sample space for exhaustive expansion",
        });
    }
    if ctx.is_empty() {
        return Err(CtpError::Domain("the sample space is empty".into()));
    }
    let ctx = ctx.normalized()?;
    let n = ctx.len();
    let amp = ctx.amplitudes();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let total = ctx.measure_pairs(&ctx.omega());
    let mut report = AxiomReport {
        seed,
        trials,
        omega_plus: n,
        total,
        total_residual: (total - Complex64::new(1.0, 0.0)).norm(),
        additivity: CheckStat::new(tolerance::ACCUMULATED),
        conjugation: CheckStat::new(tolerance::ACCUMULATED),
        factorization: CheckStat::new(tolerance::ACCUMULATED),
        hermitian_real: CheckStat::new(tolerance::ALGEBRAIC),
        pure_modulus: CheckStat::new(tolerance::ALGEBRAIC),
        positivity: CheckStat::new(tolerance::ALGEBRAIC),
        classification: CheckStat::new(0.0),
        complex_witness: None,
    };
    let magnitude = |pairs: &PairSet| -> f64 { pairs.iter().map(|(i, j)| amp[i].norm() * amp[j].norm()).sum() };
    let all: BTreeSet<usize> = (0..n).collect();

    for _ in 0..trials {
        // Additivity on a random disjoint split.
        let raw = random_pairs(&mut rng, n, 64);
        let (left, right): (Vec<_>, Vec<_>) = raw.iter().partition(|_| rng.random_bool(0.5));
        let e1: PairSet = left.into_iter().collect();
        let e2: PairSet = right.into_iter().collect();
        let e = e1.union(&e2);
        let phi = ctx.measure_pairs(&e);
        let split = ctx.measure_pairs(&e1) + ctx.measure_pairs(&e2);
        report.additivity.record(scaled((phi - split).norm(), magnitude(&e)));

        // Conjugation.
        let adj = e.adjoint();
        let phi_adj = ctx.measure_pairs(&adj);
        report.conjugation.record(scaled((phi_adj - phi.conj()).norm(), magnitude(&e)));
        if !e.is_hermitian() && phi.im.abs() > 1e-9 && report.complex_witness.is_none() {
            report.complex_witness = Some(phi);
        }

        // Hermitian closure E ∪ E⁺.
        let herm = e.union(&adj);
        let class = Classification::of(&herm);
        report.classification.record_flag(class.hermitian);
        report
            .hermitian_real
            .record(scaled(ctx.measure_pairs(&herm).im.abs(), magnitude(&herm)));

        // Factorization Φ(A×B) = Φ(A×Ω₋)·Φ(Ω₊×B).
        let a = random_subset(&mut rng, n);
        let b = random_subset(&mut rng, n);
        let rect = ctx.measure_pairs(&PairSet::rectangle(&a, &b));
        let left = ctx.measure_pairs(&PairSet::rectangle(&a, &all));
        let right = ctx.measure_pairs(&PairSet::rectangle(&all, &b));
        let scale = left.norm() * right.norm() + rect.norm();
        report.factorization.record(scaled((rect - left * right).norm(), scale));

        // Pure event A × Ǎ.
        let pure = PairSet::pure(&a);
        let class = Classification::of(&pure);
        report
            .classification
            .record_flag(class.pure && class.hermitian && class.mixed);
        let phi_pure = ctx.measure_pairs(&pure);
        let sum_a: Complex64 = a.iter().map(|&i| amp[i]).sum();
        let abs_sum: f64 = a.iter().map(|&i| amp[i].norm()).sum();
        let modulus_scale = abs_sum * abs_sum;
        let modulus_residual = if modulus_scale == 0.0 {
            phi_pure.norm()
        } else {
            (phi_pure - Complex64::new(sum_a.norm_sqr(), 0.0)).norm() / modulus_scale
        };
        report.pure_modulus.record(modulus_residual);
        report.positivity.record((-phi_pure.re).max(0.0));

        // Mixed event: disjoint pure blocks over a random partition.
        let blocks = rng.random_range(2..=4usize);
        let mut parts = vec![BTreeSet::new(); blocks];
        for &i in &b {
            parts[rng.random_range(0..blocks)].insert(i);
        }
        let mixed = PairSet::mixed(&parts);
        let class = Classification::of(&mixed);
        let nonempty = parts.iter().filter(|p| !p.is_empty()).count();
        report
            .classification
            .record_flag(class.mixed && class.hermitian && (nonempty > 1 || class.pure) && (nonempty <= 1 || !class.pure));
        let phi_mixed = ctx.measure_pairs(&mixed);
        report.positivity.record(scaled((-phi_mixed.re).max(0.0), magnitude(&mixed)));
        report
            .hermitian_real
            .record(scaled(phi_mixed.im.abs(), magnitude(&mixed)));
    }
    Ok(report)
}
