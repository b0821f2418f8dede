//! Reflection-peak detection with sub-bin interpolation.

use serde::{Deserialize, Serialize};

use crate::error::AnalysisError;

use super::{display_db, Trace, FLOOR_COUNTS};

/// Peak-finder knobs.
#[derive(Debug, Clone)]
pub struct PeakConfig {
    /// Minimum display-dB prominence above the local baseline.
    pub min_prominence_db: f64,
    /// Sliding-median window for the local baseline, bins. Defaults to a
    /// fifth of the trace (odd).
    pub baseline_window_bins: Option<usize>,
    /// |skewness| above this flags a peak as asymmetric (a merged pair).
    pub asymmetry_threshold: f64,
}

impl Default for PeakConfig {
    fn default() -> Self {
        PeakConfig {
            min_prominence_db: 3.0,
            baseline_window_bins: None,
            asymmetry_threshold: 0.15,
        }
    }
}

/// One detected reflection peak.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakReport {
    /// Sub-bin interpolated position on the displayed distance axis, m.
    pub position_m: f64,
    /// Round-trip time of the apex, s.
    pub position_s: f64,
    /// Display height above the local baseline, dB.
    pub height_db: f64,
    /// Full width at half maximum on the distance axis, m.
    pub fwhm_m: f64,
    /// Baseline-subtracted corrected counts integrated over the peak.
    pub area_counts: f64,
    /// Third standardized moment of the peak profile.
    pub skewness: f64,
    /// True when the profile is skewed enough to suggest a merged pair.
    pub asymmetric: bool,
}

/// Finds local maxima exceeding the local baseline by `min_prominence_db`.
///
/// The baseline is a sliding median of the corrected counts, so both the dark
/// floor and the slowly varying Rayleigh level count as "local terrain".
/// Candidate regions are runs of bins above baseline * 10^(prominence/5);
/// each run yields one peak with sub-bin apex (parabolic interpolation) and
/// FWHM from linear interpolation of the half-maximum crossings in linear
/// counts.
pub fn find_peaks(trace: &Trace, config: &PeakConfig) -> Result<Vec<PeakReport>, AnalysisError> {
    let n = trace.corrected.len();
    if n == 0 {
        return Err(AnalysisError::EmptyTrace);
    }
    if config.min_prominence_db <= 0.0 {
        return Err(AnalysisError::Other(
            "min_prominence_db must be positive".into(),
        ));
    }
    let window = config
        .baseline_window_bins
        .unwrap_or_else(|| (n / 5).max(9))
        .max(3)
        | 1;
    let baseline = sliding_median(&trace.corrected, window);
    let factor = 10f64.powf(config.min_prominence_db / 5.0);

    let mut peaks = Vec::new();
    let mut i = 0;
    while i < n {
        if trace.corrected[i] > (baseline[i] * factor).max(FLOOR_COUNTS * factor) {
            let start = i;
            let mut end = i;
            while end + 1 < n
                && trace.corrected[end + 1]
                    > (baseline[end + 1] * factor).max(FLOOR_COUNTS * factor)
            {
                end += 1;
            }
            if let Some(p) = measure_peak(trace, &baseline, start, end) {
                peaks.push(p);
            }
            i = end + 1;
        } else {
            i += 1;
        }
    }
    peaks.retain(|p| p.height_db >= config.min_prominence_db);
    for p in &mut peaks {
        p.asymmetric = p.skewness.abs() > config.asymmetry_threshold;
    }
    Ok(peaks)
}

fn measure_peak(
    trace: &Trace,
    baseline: &[f64],
    start: usize,
    end: usize,
) -> Option<PeakReport> {
    let n = trace.corrected.len();
    let apex = (start..=end).max_by(|&a, &b| {
        trace.corrected[a]
            .partial_cmp(&trace.corrected[b])
            .expect("finite counts")
    })?;
    let base = baseline[apex];
    let sub = |i: usize| trace.corrected[i] - base;

    // Sub-bin apex by parabolic interpolation through the apex and neighbors.
    let (offset, apex_value) = if apex > 0 && apex + 1 < n {
        parabola_vertex(sub(apex - 1), sub(apex), sub(apex + 1))
    } else {
        (0.0, sub(apex))
    };
    if apex_value <= 0.0 {
        return None;
    }
    let half = apex_value / 2.0;
    let apex_pos = apex as f64 + offset;

    // Half-maximum crossings, linear interpolation in linear counts.
    let mut left = apex_pos - 0.5;
    for i in (0..apex).rev() {
        if sub(i) <= half {
            let hi = sub(i + 1);
            let lo = sub(i);
            let frac = if hi > lo { (half - lo) / (hi - lo) } else { 0.5 };
            left = i as f64 + frac;
            break;
        }
        if i == 0 {
            left = 0.0;
        }
    }
    let mut right = apex_pos + 0.5;
    let mut found_right = false;
    for i in apex + 1..n {
        if sub(i) <= half {
            let hi = sub(i - 1);
            let lo = sub(i);
            let frac = if hi > lo { (hi - half) / (hi - lo) } else { 0.5 };
            right = (i - 1) as f64 + frac;
            found_right = true;
            break;
        }
    }
    if !found_right {
        right = (n - 1) as f64;
    }
    let fwhm_bins = (right - left).max(1e-6);

    // Area and skewness over the peak footprint.
    let pad = (3.0 * fwhm_bins).ceil() as usize;
    let lo = start.saturating_sub(pad);
    let hi = (end + pad).min(n - 1);
    let mut mass = 0.0;
    let mut mean = 0.0;
    for i in lo..=hi {
        let v = sub(i).max(0.0);
        mass += v;
        mean += v * i as f64;
    }
    if mass <= 0.0 {
        return None;
    }
    mean /= mass;
    let mut m2 = 0.0;
    let mut m3 = 0.0;
    for i in lo..=hi {
        let v = sub(i).max(0.0);
        let d = i as f64 - mean;
        m2 += v * d * d;
        m3 += v * d * d * d;
    }
    m2 /= mass;
    m3 /= mass;
    let skewness = if m2 > 0.0 { m3 / m2.powf(1.5) } else { 0.0 };

    let bin_m = trace.bin_length_m;
    let position_m = trace.distance_m[0] + apex_pos * bin_m;
    let position_s = trace.origin_s + (apex_pos + 0.5) * trace.bin_width_s;
    let height_db = display_db(apex_value + base) - display_db(base);

    Some(PeakReport {
        position_m,
        position_s,
        height_db,
        fwhm_m: fwhm_bins * bin_m,
        area_counts: mass,
        skewness,
        asymmetric: false,
    })
}

/// Vertex of the parabola through (-1, ym), (0, y0), (1, yp):
/// offset in [-0.5, 0.5] and interpolated apex value.
fn parabola_vertex(ym: f64, y0: f64, yp: f64) -> (f64, f64) {
    let denom = ym - 2.0 * y0 + yp;
    if denom >= 0.0 {
        return (0.0, y0);
    }
    let offset = 0.5 * (ym - yp) / denom;
    let offset = offset.clamp(-0.5, 0.5);
    let value = y0 - 0.25 * (ym - yp) * offset;
    (offset, value)
}

fn sliding_median(data: &[f64], window: usize) -> Vec<f64> {
    let n = data.len();
    let half = window / 2;
    // Subsample long windows; the baseline only needs to be robust, not exact.
    let stride = (window / 64).max(1);
    let mut buf: Vec<f64> = Vec::with_capacity(window / stride + 1);
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(n - 1);
            buf.clear();
            let mut j = lo;
            while j <= hi {
                buf.push(data[j]);
                j += stride;
            }
            buf.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
            buf[buf.len() / 2]
        })
        .collect()
}

/// Two peaks count as resolvable when the trace dips at least 3 display-dB
/// below the lower apex between them.
pub fn resolvable(trace: &Trace, a: &PeakReport, b: &PeakReport, dip_db: f64) -> bool {
    let (lo, hi) = if a.position_m <= b.position_m {
        (a.position_m, b.position_m)
    } else {
        (b.position_m, a.position_m)
    };
    let mut dip = f64::INFINITY;
    for (d, lvl) in trace.distance_m.iter().zip(&trace.level_db) {
        if *d > lo && *d < hi {
            dip = dip.min(*lvl);
        }
    }
    if !dip.is_finite() {
        return false;
    }
    let lower_apex = apex_level(trace, a).min(apex_level(trace, b));
    dip <= lower_apex - dip_db
}

fn apex_level(trace: &Trace, p: &PeakReport) -> f64 {
    let i = trace
        .distance_m
        .iter()
        .position(|d| *d >= p.position_m)
        .unwrap_or(trace.level_db.len() - 1)
        .min(trace.level_db.len() - 1);
    trace.level_db[i]
}

/// FWHM of the narrowest peak that is not flagged as a merged pair.
pub fn two_point_resolution(peaks: &[PeakReport]) -> Result<f64, AnalysisError> {
    peaks
        .iter()
        .filter(|p| !p.asymmetric)
        .map(|p| p.fwhm_m)
        .min_by(|a, b| a.partial_cmp(b).expect("finite widths"))
        .ok_or(AnalysisError::NoPeaks {
            min_prominence_db: 0.0,
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::fwhm_to_sigma;
    use approx::assert_relative_eq;

    /// Noiseless Gaussian peak on a flat floor.
    fn gaussian_trace(center_bin: f64, fwhm_bins: f64, amplitude: f64, n: usize) -> Trace {
        let sigma = fwhm_to_sigma(fwhm_bins);
        let bin_m = 0.001;
        let corrected: Vec<f64> = (0..n)
            .map(|i| {
                let d = (i as f64 - center_bin) / sigma;
                2.0 + amplitude * (-0.5 * d * d).exp()
            })
            .collect();
        let level_db: Vec<f64> = corrected.iter().map(|c| display_db(*c)).collect();
        Trace {
            distance_m: (0..n).map(|i| (i as f64 + 0.5) * bin_m).collect(),
            level_db,
            counts: corrected.iter().map(|c| c.round() as u64).collect(),
            corrected,
            bin_width_s: 9.79e-12,
            bin_length_m: bin_m,
            origin_s: 0.0,
            shots: 1_000_000,
            group_index: 1.468,
        }
    }

    #[test]
    fn recovers_width_and_position_of_an_analytic_gaussian() {
        // >= 10 bins across the FWHM; estimator must land within 3 % of the
        // width and bin/10 of the position.
        for center in [200.0, 200.37, 200.5] {
            let trace = gaussian_trace(center, 12.0, 5000.0, 400);
            let peaks = find_peaks(&trace, &PeakConfig::default()).unwrap();
            assert_eq!(peaks.len(), 1, "center {center}");
            let p = &peaks[0];
            assert_relative_eq!(p.fwhm_m, 0.012, max_relative = 0.03);
            let expected_pos = trace.distance_m[0] + center * 0.001;
            assert!(
                (p.position_m - expected_pos).abs() < 0.001 / 10.0,
                "position {} vs {} (center {center})",
                p.position_m,
                expected_pos
            );
            assert!(!p.asymmetric, "symmetric peak flagged: skew {}", p.skewness);
        }
    }

    #[test]
    fn flat_trace_has_no_peaks() {
        let trace = gaussian_trace(200.0, 12.0, 0.0, 400);
        let peaks = find_peaks(&trace, &PeakConfig::default()).unwrap();
        assert!(peaks.is_empty());
    }

    #[test]
    fn two_separated_gaussians_are_found_and_resolvable() {
        let mut trace = gaussian_trace(120.0, 10.0, 4000.0, 400);
        let sigma = fwhm_to_sigma(10.0);
        for i in 0..400 {
            let d = (i as f64 - 260.0) / sigma;
            trace.corrected[i] += 2500.0 * (-0.5 * d * d).exp();
        }
        trace.level_db = trace.corrected.iter().map(|c| display_db(*c)).collect();
        let peaks = find_peaks(&trace, &PeakConfig::default()).unwrap();
        assert_eq!(peaks.len(), 2);
        assert!(resolvable(&trace, &peaks[0], &peaks[1], 3.0));
        let delta = two_point_resolution(&peaks).unwrap();
        assert_relative_eq!(delta, 0.010, max_relative = 0.05);
    }

    #[test]
    fn merged_unequal_pair_reports_one_asymmetric_peak() {
        // Separation below the width: a 10:1 pair merges into a skewed blob.
        let mut trace = gaussian_trace(200.0, 40.0, 40_000.0, 800);
        let sigma = fwhm_to_sigma(40.0);
        for i in 0..800 {
            let d = (i as f64 - 232.0) / sigma;
            trace.corrected[i] += 4_000.0 * (-0.5 * d * d).exp();
        }
        trace.level_db = trace.corrected.iter().map(|c| display_db(*c)).collect();
        let peaks = find_peaks(&trace, &PeakConfig::default()).unwrap();
        assert_eq!(peaks.len(), 1);
        assert!(
            peaks[0].asymmetric,
            "merged pair not flagged: skew {}",
            peaks[0].skewness
        );
    }

    #[test]
    fn empty_trace_is_an_error() {
        let trace = Trace {
            distance_m: vec![],
            level_db: vec![],
            counts: vec![],
            corrected: vec![],
            bin_width_s: 1e-9,
            bin_length_m: 0.1,
            origin_s: 0.0,
            shots: 1,
            group_index: 1.468,
        };
        assert!(find_peaks(&trace, &PeakConfig::default()).is_err());
    }
}
