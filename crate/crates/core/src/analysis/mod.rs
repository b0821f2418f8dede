//! Histogram-to-trace conversion and figure-of-merit extraction.
//!
//! The processing chain is: Coates correction of the first-stop bias (the
//! TAC records at most one stop per start, so later bins see only the shots
//! that survived earlier ones), then optional dark-baseline subtraction, then
//! the 5*log10 display rendering under which one-way attenuation reads
//! directly as the trace slope.

mod metrics;
mod peaks;

pub use metrics::{
    accuracy_experiment, beat_length, dynamic_range, fit_slope, AccuracySummary, DynamicRange,
    SlopeFit,
};
pub use peaks::{find_peaks, resolvable, two_point_resolution, PeakConfig, PeakReport};

use serde::{Deserialize, Serialize};

use crate::detection::Histogram;
use crate::error::AnalysisError;
use crate::units::{time_to_distance, GroupIndexContext};

/// Display level of an empty bin: half a count keeps the log finite.
pub const FLOOR_COUNTS: f64 = 0.5;

/// A histogram rendered against distance.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    /// Bin-center one-way distances, m (strictly increasing, uniform).
    pub distance_m: Vec<f64>,
    /// Display level: 5*log10(corrected counts); empty bins at the floor.
    pub level_db: Vec<f64>,
    /// Raw first-stop counts.
    pub counts: Vec<u64>,
    /// Coates-corrected counts (pile-up bias removed).
    pub corrected: Vec<f64>,
    pub bin_width_s: f64,
    pub bin_length_m: f64,
    pub origin_s: f64,
    pub shots: u64,
    pub group_index: f64,
}

/// Display rendering of a linear count level.
pub fn display_db(counts: f64) -> f64 {
    5.0 * counts.max(FLOOR_COUNTS).log10()
}

/// Converts a histogram to a distance-domain trace using the given group
/// index for the axis.
pub fn to_trace(h: &Histogram, ctx: GroupIndexContext) -> Result<Trace, AnalysisError> {
    if h.counts.is_empty() {
        return Err(AnalysisError::EmptyTrace);
    }
    let corrected = coates_correct(&h.counts, h.shots);
    let mut distance = Vec::with_capacity(h.counts.len());
    let mut level = Vec::with_capacity(h.counts.len());
    for (i, c) in corrected.iter().enumerate() {
        let t = h.bin_center_time(i);
        let d = time_to_distance(t.max(0.0), ctx).expect("non-negative bin time");
        distance.push(d);
        level.push(display_db(*c));
    }
    let bin_length_m =
        time_to_distance(h.bin_width_s, ctx).expect("positive bin width");
    Ok(Trace {
        distance_m: distance,
        level_db: level,
        counts: h.counts.clone(),
        corrected,
        bin_width_s: h.bin_width_s,
        bin_length_m,
        origin_s: h.origin_s,
        shots: h.shots,
        group_index: ctx.n_g,
    })
}

/// Coates correction: per-bin rate estimate that removes the first-stop
/// depletion. Bin i sees only the `shots - sum(counts[..i])` shots that had
/// no earlier stop, so the unbiased per-shot intensity is
/// -ln(1 - n_i / remaining) and the corrected count is shots times that.
pub fn coates_correct(counts: &[u64], shots: u64) -> Vec<f64> {
    let shots_f = shots as f64;
    let mut remaining = shots_f;
    counts
        .iter()
        .map(|&n| {
            if n == 0 {
                return 0.0;
            }
            let n_f = n as f64;
            if remaining <= 0.0 {
                return 0.0;
            }
            let ratio = (n_f / remaining).min(1.0 - 1e-12);
            let lambda = -(-ratio).ln_1p();
            remaining -= n_f;
            shots_f * lambda
        })
        .collect()
}

/// Mean corrected count over a distance window; the dark-floor estimate used
/// for baseline subtraction.
pub fn estimate_baseline(trace: &Trace, window: (f64, f64)) -> Result<f64, AnalysisError> {
    let vals: Vec<f64> = trace
        .distance_m
        .iter()
        .zip(&trace.corrected)
        .filter(|(d, _)| **d >= window.0 && **d <= window.1)
        .map(|(_, c)| *c)
        .collect();
    if vals.is_empty() {
        return Err(AnalysisError::NoNoiseRegion(format!(
            "window [{}, {}] m holds no samples",
            window.0, window.1
        )));
    }
    Ok(vals.iter().sum::<f64>() / vals.len() as f64)
}

/// Aggregate report serialized for the `analyze` and `accuracy` subcommands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct AnalysisReport {
    pub peaks: Vec<PeakReport>,
    /// Two-point resolution: FWHM of the narrowest isolated peak, m.
    pub delta_m: Option<f64>,
    pub slope_db_per_km: Option<f64>,
    pub slope_r2: Option<f64>,
    pub dynamic_range_db: Option<f64>,
    pub noise_floor_db: Option<f64>,
    pub beat_length_m: Option<f64>,
    pub accuracy: Option<AccuracySummary>,
    #[serde(default)]
    pub scenario_hash: String,
    #[serde(default)]
    pub seed: u64,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
