//! Monte Carlo wave-function trajectories, intensity segmentation and
//! empirical jump statistics.
//!
//! The simulator also records the hidden intensity level, the subspace
//! carrying most of the conditional state. Counting on that trace measures
//! the transition rates directly; segmenting the photon record measures
//! them the way an experiment would and is only meaningful when periods
//! are much longer than the counting window.

mod counts;
mod segment;
mod simulate;

pub use counts::{count_jumps, Comparison, Estimate, JumpCounts};
pub use segment::{
    default_window, level_trace, segment_periods, segment_window_levels, Period, PeriodTrace, MIN_COUNTS_PER_WINDOW,
};
pub use simulate::{
    simulate, simulate_many, Emission, EmissionRecord, LevelChange, Simulator, CONDITION_GUARD, DEFAULT_LABEL_THRESHOLD,
    TIME_TOLERANCE,
};

use crate::model::SystemParams;

/// Photon rate of one driven atom on the strong transition,
/// A3 Ω3² / (A3² + 2 Ω3²).
pub fn bright_rate(p: &SystemParams) -> f64 {
    let (a, om) = (p.a[2], p.omega3);
    a * om * om / (a * a + 2.0 * om * om)
}
