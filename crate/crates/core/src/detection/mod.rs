//! Photon-counting detection module and TCSPC timing chain.
//!
//! The detector is an efficiency/dark-rate/jitter/dead-time black box. The
//! timing chain is a start-stop TAC that records the first stop per start
//! into a histogram. `SimulationModel` carries everything precomputed for
//! both the Monte Carlo engine ([`simulate`]) and the analytic oracle
//! ([`RateModel`]).

mod histogram;
mod rate;
mod simulate;

pub use histogram::Histogram;
pub use rate::RateModel;
pub use simulate::simulate;

use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, DomainError};
use crate::link::ImpulseResponse;
use crate::photonics::{
    broadened_fwhm_from_accums, DispersionModel, JonesState, PolarizationPath, PolarizationSpec,
    PulseSource,
};
use crate::units::{fwhm_to_sigma, photon_energy};

/// Maximum histogram size: 2^26 bins.
pub const MAX_BINS: u64 = 1 << 26;

/// Photon-counting detector abstraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorModel {
    #[serde(default = "default_efficiency")]
    pub efficiency: f64,
    #[serde(default = "default_dark_rate")]
    pub dark_rate_hz: f64,
    #[serde(default = "default_jitter")]
    pub jitter_fwhm_s: f64,
    #[serde(default = "default_dead_time")]
    pub dead_time_s: f64,
    /// Polarization analyzer in front of the detector; absent means
    /// polarization-insensitive.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polarization_analyzer: Option<PolarizationSpec>,
}

fn default_efficiency() -> f64 {
    0.008
}
fn default_dark_rate() -> f64 {
    2000.0
}
fn default_jitter() -> f64 {
    40e-12
}
fn default_dead_time() -> f64 {
    1e-6
}

impl Default for DetectorModel {
    fn default() -> Self {
        DetectorModel {
            efficiency: default_efficiency(),
            dark_rate_hz: default_dark_rate(),
            jitter_fwhm_s: default_jitter(),
            dead_time_s: default_dead_time(),
            polarization_analyzer: None,
        }
    }
}

impl DetectorModel {
    pub fn validate(&self) -> Vec<String> {
        let mut problems = Vec::new();
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            problems.push(format!(
                "detector efficiency must be in (0, 1], got {}",
                self.efficiency
            ));
        }
        if self.dark_rate_hz < 0.0 {
            problems.push(format!("dark rate must be non-negative, got {}", self.dark_rate_hz));
        }
        if self.jitter_fwhm_s < 0.0 {
            problems.push(format!("jitter must be non-negative, got {}", self.jitter_fwhm_s));
        }
        if self.dead_time_s < 0.0 {
            problems.push(format!("dead time must be non-negative, got {}", self.dead_time_s));
        }
        problems
    }
}

/// Noise-equivalent power (h c / lambda / eta) * sqrt(2 * dark rate), W/sqrt(Hz).
pub fn nep(det: &DetectorModel, wavelength: f64) -> Result<f64, DomainError> {
    if det.efficiency <= 0.0 {
        return Err(DomainError::NonPositive {
            quantity: "detector efficiency",
            value: det.efficiency,
        });
    }
    Ok(photon_energy(wavelength)? / det.efficiency * (2.0 * det.dark_rate_hz).sqrt())
}

/// Start-signal configuration of the TAC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TacMode {
    /// Optical start: a second photon-counting module sees a tap of the pulse.
    Configuration1,
    /// Electrical start: the laser-driver signal through a delay generator.
    Configuration2,
}

/// TAC settings. The TAC records the first stop per start (single-stop
/// conversion), which is what makes pile-up physics appear.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TacConfig {
    pub mode: TacMode,
    pub bin_width_s: f64,
    pub range_s: f64,
    /// Delay-generator setting for configuration 2. The histogram origin
    /// defaults to this so both configurations share a time axis.
    #[serde(default)]
    pub start_delay_s: f64,
    /// Calibrated extra electronics jitter of laser driver and TAC, FWHM.
    #[serde(default)]
    pub extra_jitter_fwhm_s: f64,
}

impl TacConfig {
    pub fn num_bins(&self) -> Result<usize, ConfigError> {
        if self.bin_width_s <= 0.0 {
            return Err(ConfigError::Invalid(format!(
                "bin width must be positive, got {}",
                self.bin_width_s
            )));
        }
        if self.range_s < self.bin_width_s {
            return Err(ConfigError::Invalid(format!(
                "range {} must be at least one bin width {}",
                self.range_s, self.bin_width_s
            )));
        }
        let n = (self.range_s / self.bin_width_s).round();
        if !(n >= 1.0) {
            return Err(ConfigError::Invalid("empty histogram range".into()));
        }
        if n as u64 > MAX_BINS {
            return Err(ConfigError::HistogramTooLarge {
                requested: n as u64,
                limit: MAX_BINS,
            });
        }
        Ok(n as usize)
    }

    pub fn origin(&self) -> f64 {
        self.start_delay_s
    }

    pub fn validate(&self) -> Vec<String> {
        let mut problems = Vec::new();
        if let Err(e) = self.num_bins() {
            problems.push(e.to_string());
        }
        if self.start_delay_s < 0.0 {
            problems.push(format!(
                "start delay must be non-negative, got {}",
                self.start_delay_s
            ));
        }
        if self.extra_jitter_fwhm_s < 0.0 {
            problems.push(format!(
                "extra jitter must be non-negative, got {}",
                self.extra_jitter_fwhm_s
            ));
        }
        problems
    }
}

/// One generator of stop photons: either a span of Rayleigh backscatter or a
/// discrete reflection.
#[derive(Debug, Clone)]
pub(crate) enum Component {
    Section {
        /// Expected detected photons per shot from this span (before any
        /// polarization projection).
        weight: f64,
        t_start: f64,
        t_end: f64,
        /// Rate decay constant in arrival time, 1/s.
        decay_per_s: f64,
        /// Detected-photon rate density at `t_start`, 1/s per shot.
        rate_at_start: f64,
        z_start: f64,
        /// dz/dt along the section, m/s.
        z_per_s: f64,
        /// Dispersion accumulation at z_start (sum of D*2L), s/m.
        disp_accum_start: f64,
        dispersion_si: f64,
    },
    Reflection {
        weight: f64,
        t: f64,
        z: f64,
        /// Extra temporal sigma from dispersion at this depth, s.
        disp_sigma: f64,
    },
}

impl Component {
    pub(crate) fn weight(&self) -> f64 {
        match self {
            Component::Section { weight, .. } => *weight,
            Component::Reflection { weight, .. } => *weight,
        }
    }
}

/// Polarization handling for a run.
#[derive(Debug, Clone)]
pub(crate) struct PolarizationModel {
    pub path: PolarizationPath,
    pub input: JonesState,
    pub analyzer: JonesState,
    pub scrambler_on: bool,
}

impl PolarizationModel {
    /// Projection factor for a fixed input state at depth z.
    pub fn factor(&self, z: f64, input: &JonesState) -> f64 {
        self.path.projected_backscatter(z, input, &self.analyzer)
    }
}

/// Everything the Monte Carlo engine and the oracle need, precomputed.
/// Immutable during a run; safe to share across threads.
#[derive(Debug, Clone)]
pub struct SimulationModel {
    pub(crate) components: Vec<Component>,
    /// Total per-shot detected-photon mean before polarization thinning.
    pub(crate) photon_mean: f64,
    pub(crate) dark_rate: f64,
    pub(crate) dead_time: f64,
    /// Start-reference jitter, sigma.
    pub(crate) start_sigma: f64,
    /// Quadrature of pulse, stop jitter, and extra electronics jitter, sigma.
    pub(crate) base_sigma: f64,
    pub(crate) origin: f64,
    pub(crate) bin_width: f64,
    pub(crate) num_bins: usize,
    /// Event generation window (absolute detector time).
    pub(crate) window_start: f64,
    pub(crate) window_end: f64,
    pub(crate) pol: Option<PolarizationModel>,
    pub(crate) dispersion_model: DispersionModel,
    pub(crate) spectral_width_m: f64,
    pub(crate) source_fwhm_s: f64,
    pub(crate) wavelength_m: f64,
    pub display_group_index: f64,
    pub scenario_hash: String,
}

/// Builds the engine model for one acquisition.
///
/// `start_detector` must be given for configuration 1 and absent for
/// configuration 2, where the electrical trigger (delayed by
/// `tac.start_delay_s`) is the reference and `source.trigger_jitter_rms_s`
/// sets the start jitter.
pub fn build_model(
    ir: &ImpulseResponse,
    source: &PulseSource,
    stop_detector: &DetectorModel,
    start_detector: Option<&DetectorModel>,
    tac: &TacConfig,
    scrambler_on: bool,
) -> Result<SimulationModel, ConfigError> {
    let mut problems = source.validate();
    problems.extend(stop_detector.validate());
    problems.extend(tac.validate());
    match (tac.mode, start_detector) {
        (TacMode::Configuration1, None) => {
            problems.push("configuration 1 requires a start detector".into())
        }
        (TacMode::Configuration2, Some(_)) => {
            problems.push("configuration 2 uses the electrical trigger; start detector must be absent".into())
        }
        _ => {}
    }
    if tac.mode == TacMode::Configuration2 && source.trigger_jitter_rms_s <= 0.0 {
        problems.push("configuration 2 requires source trigger_jitter_rms_s > 0".into());
    }
    if !problems.is_empty() {
        return Err(ConfigError::Scenario(problems));
    }
    let num_bins = tac.num_bins()?;

    let photons = source.photons_per_pulse()?;
    let eta = stop_detector.efficiency;
    let start_sigma = match tac.mode {
        TacMode::Configuration1 => fwhm_to_sigma(start_detector.unwrap().jitter_fwhm_s),
        TacMode::Configuration2 => source.trigger_jitter_rms_s,
    };
    let base_sigma = fwhm_to_sigma(
        crate::units::quadrature_width(&[
            source.fwhm_s,
            stop_detector.jitter_fwhm_s,
            tac.extra_jitter_fwhm_s,
        ])
        .map_err(|e| ConfigError::Invalid(e.to_string()))?,
    );

    let origin = tac.origin();
    let range_end = origin + num_bins as f64 * tac.bin_width_s;

    // Largest dispersion sigma anywhere on the link bounds the clip margin.
    let disp_sigma = |accum: f64| -> f64 {
        let fwhm = broadened_fwhm_from_accums(
            source,
            accum,
            beta2_accum(accum, source),
            source.dispersion_model,
        );
        fwhm_to_sigma((fwhm * fwhm - source.fwhm_s * source.fwhm_s).max(0.0).sqrt())
    };
    let max_disp_sigma = ir
        .sections
        .iter()
        .map(|s| disp_accum_end(s))
        .chain(ir.reflections.iter().map(|r| r.disp_accum))
        .fold(0.0f64, |acc, a| acc.max(disp_sigma(a)));
    let margin = 6.0 * (base_sigma + start_sigma + max_disp_sigma) + tac.bin_width_s;
    let window_start = origin - stop_detector.dead_time_s - margin;
    let window_end = range_end + margin;

    let mut components = Vec::new();
    let mut photon_mean = 0.0;
    for s in &ir.sections {
        // Clip to the observation window in arrival time.
        let t_lo = s.t_start.max(window_start);
        let t_hi = s.t_end.min(window_end);
        if t_hi <= t_lo {
            continue;
        }
        let z_per_s = crate::units::SPEED_OF_LIGHT / (2.0 * s.group_index);
        let z_lo = s.z_at(t_lo);
        let decay_per_s = s.decay_per_m * z_per_s;
        // Detected photons per second of arrival time at t_lo.
        let rate_at_start = eta * photons * s.density_at(z_lo) * z_per_s;
        let span = t_hi - t_lo;
        let weight = if decay_per_s.abs() < 1e-15 {
            rate_at_start * span
        } else {
            rate_at_start * (1.0 - (-decay_per_s * span).exp()) / decay_per_s
        };
        if weight <= 0.0 {
            continue;
        }
        photon_mean += weight;
        components.push(Component::Section {
            weight,
            t_start: t_lo,
            t_end: t_hi,
            decay_per_s,
            rate_at_start,
            z_start: z_lo,
            z_per_s,
            disp_accum_start: s.disp_accum_at(z_lo),
            dispersion_si: s.dispersion_si,
        });
    }
    for r in &ir.reflections {
        let sig = disp_sigma(r.disp_accum);
        if r.t < window_start - 6.0 * sig || r.t > window_end + 6.0 * sig {
            continue;
        }
        let weight = eta * photons * r.fraction;
        if weight <= 0.0 {
            continue;
        }
        photon_mean += weight;
        components.push(Component::Reflection {
            weight,
            t: r.t,
            z: r.z,
            disp_sigma: sig,
        });
    }

    let pol = stop_detector.polarization_analyzer.as_ref().map(|spec| PolarizationModel {
        path: PolarizationPath::from_impulse_response(ir),
        input: source.polarization.to_state(),
        analyzer: spec.to_state(),
        scrambler_on,
    });

    Ok(SimulationModel {
        components,
        photon_mean,
        dark_rate: stop_detector.dark_rate_hz,
        dead_time: stop_detector.dead_time_s,
        start_sigma,
        base_sigma,
        origin,
        bin_width: tac.bin_width_s,
        num_bins,
        window_start,
        window_end,
        pol,
        dispersion_model: source.dispersion_model,
        spectral_width_m: source.spectral_width_m,
        source_fwhm_s: source.fwhm_s,
        wavelength_m: source.wavelength_m,
        display_group_index: 1.468,
        scenario_hash: String::new(),
    })
}

fn disp_accum_end(s: &crate::link::RayleighSection) -> f64 {
    s.disp_accum_at(s.z_end)
}

/// Beta2-weighted accumulation matching a D-weighted accumulation `d2l`,
/// assuming a single wavelength (exact for piecewise paths since beta2 is
/// proportional to D at fixed lambda).
fn beta2_accum(d2l: f64, source: &PulseSource) -> f64 {
    crate::photonics::beta2_si(1.0, source.wavelength_m) * d2l
}

impl SimulationModel {
    /// Extra temporal sigma from dispersion for a photon returned at depth z
    /// with dispersion accumulation `accum`.
    pub(crate) fn dispersion_sigma(&self, accum: f64) -> f64 {
        match self.dispersion_model {
            DispersionModel::SourceLinewidth => {
                let added = (accum * self.spectral_width_m).abs();
                fwhm_to_sigma(added)
            }
            DispersionModel::TransformLimited => {
                let t0 = self.source_fwhm_s / crate::units::FWHM_PER_E_HALF_WIDTH;
                let b2l = crate::photonics::beta2_si(1.0, self.wavelength_m) * accum;
                let ratio = b2l / (t0 * t0);
                let total = self.source_fwhm_s * (1.0 + ratio * ratio).sqrt();
                fwhm_to_sigma((total * total - self.source_fwhm_s * self.source_fwhm_s).max(0.0).sqrt())
            }
        }
    }

    /// Expected detected photons per shot inside the observation window,
    /// before pile-up and polarization projection.
    pub fn per_shot_photon_mean(&self) -> f64 {
        self.photon_mean
    }

    /// Expected in-range detected photons per shot with the mean polarization
    /// projection applied (1/2 under scrambling, the fixed-state projection
    /// average otherwise). Dark counts excluded; pile-up not applied.
    pub fn per_shot_stop_probability(&self) -> f64 {
        let rate = self.rate_model();
        let n = self.num_bins.min(1 << 14);
        let range = self.num_bins as f64 * self.bin_width;
        let coarse_width = range / n as f64;
        let expectations = rate.bin_expectations(self.origin, coarse_width, n);
        (expectations.iter().sum::<f64>() - self.dark_rate * range).max(0.0)
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_width
    }

    pub fn num_bins(&self) -> usize {
        self.num_bins
    }

    pub fn dark_rate(&self) -> f64 {
        self.dark_rate
    }

    pub fn with_scenario_hash(mut self, hash: impl Into<String>) -> Self {
        self.scenario_hash = hash.into();
        self
    }

    pub fn with_display_group_index(mut self, n_g: f64) -> Self {
        self.display_group_index = n_g;
        self
    }
}
