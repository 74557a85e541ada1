//! Numerical tolerances shared by the engine and its checks.
//!
//! Lattice amplitudes carry no normalization constant, so quantities derived
//! from them grow with the number of paths. Tolerances on such quantities are
//! applied relative to a scale (see [`scaled`]); tolerances on normalized
//! quantities are absolute.

/// Algebraic identities evaluated with a handful of floating-point operations.
pub const ALGEBRAIC: f64 = 1e-12;

/// Sums accumulated over many terms.
pub const ACCUMULATED: f64 = 1e-10;

/// Lower eigenvalue bound for density matrices, relative to the trace.
pub const PSD_RELATIVE: f64 = 1e-10;

/// Default relative tolerance for null-event detection.
pub const NULL_EVENT_DEFAULT: f64 = 1e-3;

/// Hard limit on the number of explicitly enumerated paths.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

/// Hard limit on `|Ω| = |Ω₊|²` for exhaustive event expansion.
pub const OMEGA_LIMIT: usize = 1_000_000;

/// `|diff|` divided by `max(1, scale)`.
pub fn scaled(diff: f64, scale: f64) -> f64 {
    diff / scale.abs().max(1.0)
}
