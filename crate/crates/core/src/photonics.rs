//! Pulse source model, chromatic-dispersion broadening along the link, and
//! Jones-calculus polarization evolution for P-OTDR.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::link::{ImpulseResponse, LinkElement, LinkPlan, RayleighSection};
use crate::units::{photon_energy, FWHM_PER_E_HALF_WIDTH, SPEED_OF_LIGHT};

/// Ratio of Gaussian pulse energy to peak_power * fwhm: sqrt(2*pi)/(2*sqrt(2 ln 2)).
pub const GAUSSIAN_ENERGY_PER_PEAK_FWHM: f64 = 1.064_467_019_431_226;

/// How the probe pulse broadens under chromatic dispersion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DispersionModel {
    TransformLimited,
    /// Broadening driven by the source linewidth; the default, since
    /// gain-switched sources are far from transform limited.
    #[default]
    SourceLinewidth,
}

/// Probe laser model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSource {
    #[serde(default = "default_wavelength")]
    pub wavelength_m: f64,
    /// Temporal width, FWHM, s.
    pub fwhm_s: f64,
    pub peak_power_w: f64,
    /// Electrical driver jitter (rms) used as the start reference in
    /// configuration 2.
    #[serde(default)]
    pub trigger_jitter_rms_s: f64,
    /// Source spectral width (FWHM), m. Zero means transform limited.
    #[serde(default)]
    pub spectral_width_m: f64,
    #[serde(default)]
    pub dispersion_model: DispersionModel,
    #[serde(default)]
    pub polarization: PolarizationSpec,
}

fn default_wavelength() -> f64 {
    1551e-9
}

impl PulseSource {
    /// Pulse energy assuming the Gaussian temporal shape, J.
    pub fn pulse_energy(&self) -> f64 {
        self.peak_power_w * self.fwhm_s * GAUSSIAN_ENERGY_PER_PEAK_FWHM
    }

    /// Mean photon number per pulse.
    pub fn photons_per_pulse(&self) -> Result<f64, ConfigError> {
        let e = photon_energy(self.wavelength_m)
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(self.pulse_energy() / e)
    }

    /// Smallest spectral width compatible with the temporal width
    /// (time-bandwidth product 0.441 for Gaussians).
    pub fn transform_limit_spectral_width(&self) -> f64 {
        0.441 * self.wavelength_m * self.wavelength_m / (SPEED_OF_LIGHT * self.fwhm_s)
    }

    pub fn validate(&self) -> Vec<String> {
        let mut problems = Vec::new();
        if self.fwhm_s <= 0.0 {
            problems.push(format!("source fwhm_s must be positive, got {}", self.fwhm_s));
        }
        if self.peak_power_w <= 0.0 {
            problems.push(format!(
                "source peak_power_w must be positive, got {}",
                self.peak_power_w
            ));
        }
        if self.wavelength_m <= 0.0 {
            problems.push(format!(
                "source wavelength_m must be positive, got {}",
                self.wavelength_m
            ));
        }
        if self.trigger_jitter_rms_s < 0.0 {
            problems.push(format!(
                "trigger_jitter_rms_s must be non-negative, got {}",
                self.trigger_jitter_rms_s
            ));
        }
        problems
    }
}

/// Group-velocity dispersion parameter beta2 = -D lambda^2 / (2 pi c), s^2/m.
pub fn beta2_si(dispersion_si: f64, wavelength: f64) -> f64 {
    -dispersion_si * wavelength * wavelength / (2.0 * std::f64::consts::PI * SPEED_OF_LIGHT)
}

/// Dispersion length T0^2/|beta2|, m (T0 is the half-width at 1/e intensity).
pub fn dispersion_length(fwhm: f64, dispersion_si: f64, wavelength: f64) -> f64 {
    let t0 = fwhm / FWHM_PER_E_HALF_WIDTH;
    let b2 = beta2_si(dispersion_si, wavelength);
    if b2 == 0.0 {
        f64::INFINITY
    } else {
        t0 * t0 / b2.abs()
    }
}

/// FWHM of the probe pulse after the round trip to one-way distance `z`, s.
///
/// Both models accumulate piecewise over the plan's segments; air gaps and
/// events contribute nothing.
pub fn dispersion_broadened_fwhm(
    source: &PulseSource,
    plan: &LinkPlan,
    z: f64,
    model: DispersionModel,
) -> f64 {
    let mut remaining = z.max(0.0);
    // Signed accumulations over the round-trip path (factor 2 per meter).
    let mut d2l = 0.0; // sum of D * 2L, s/m of spectral width
    let mut b2l = 0.0; // sum of beta2 * 2L, s^2
    for el in &plan.elements {
        if remaining <= 0.0 {
            break;
        }
        match el {
            LinkElement::Fiber(seg) => {
                let take = remaining.min(seg.length_m);
                d2l += seg.dispersion_si() * 2.0 * take;
                b2l += beta2_si(seg.dispersion_si(), source.wavelength_m) * 2.0 * take;
                remaining -= take;
            }
            LinkElement::Event(crate::link::LinkEvent::AirGap { length_m, .. }) => {
                remaining -= length_m.min(remaining);
            }
            LinkElement::Event(_) => {}
        }
    }
    broadened_fwhm_from_accums(source, d2l, b2l, model)
}

/// Shared broadening law given the accumulated dispersion terms.
pub fn broadened_fwhm_from_accums(
    source: &PulseSource,
    d2l: f64,
    b2l: f64,
    model: DispersionModel,
) -> f64 {
    match model {
        DispersionModel::SourceLinewidth => {
            let added = (d2l * source.spectral_width_m).abs();
            (source.fwhm_s * source.fwhm_s + added * added).sqrt()
        }
        DispersionModel::TransformLimited => {
            let t0 = source.fwhm_s / FWHM_PER_E_HALF_WIDTH;
            let ratio = b2l / (t0 * t0);
            source.fwhm_s * (1.0 + ratio * ratio).sqrt()
        }
    }
}

// ---------------------------------------------------------------------------
// Jones calculus
// ---------------------------------------------------------------------------

/// Normalized two-component polarization state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JonesState {
    pub x: Complex64,
    pub y: Complex64,
}

impl JonesState {
    pub fn new(x: Complex64, y: Complex64) -> Self {
        let norm = (x.norm_sqr() + y.norm_sqr()).sqrt();
        JonesState {
            x: x / norm,
            y: y / norm,
        }
    }

    /// Linear polarization at `angle` rad from the x axis.
    pub fn linear(angle: f64) -> Self {
        JonesState {
            x: Complex64::new(angle.cos(), 0.0),
            y: Complex64::new(angle.sin(), 0.0),
        }
    }

    pub fn circular_left() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        JonesState {
            x: Complex64::new(s, 0.0),
            y: Complex64::new(0.0, s),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.x.norm_sqr() + self.y.norm_sqr()
    }

    /// Power transmitted through an analyzer set to `analyzer`: |<a|s>|^2.
    pub fn project_onto(&self, analyzer: &JonesState) -> f64 {
        (analyzer.x.conj() * self.x + analyzer.y.conj() * self.y).norm_sqr()
    }
}

/// 2x2 complex Jones operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JonesMatrix {
    pub m: [[Complex64; 2]; 2],
}

impl JonesMatrix {
    pub const IDENTITY: JonesMatrix = JonesMatrix {
        m: [
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        ],
    };

    pub fn mul(&self, rhs: &JonesMatrix) -> JonesMatrix {
        let a = &self.m;
        let b = &rhs.m;
        JonesMatrix {
            m: [
                [
                    a[0][0] * b[0][0] + a[0][1] * b[1][0],
                    a[0][0] * b[0][1] + a[0][1] * b[1][1],
                ],
                [
                    a[1][0] * b[0][0] + a[1][1] * b[1][0],
                    a[1][0] * b[0][1] + a[1][1] * b[1][1],
                ],
            ],
        }
    }

    pub fn transpose(&self) -> JonesMatrix {
        JonesMatrix {
            m: [[self.m[0][0], self.m[1][0]], [self.m[0][1], self.m[1][1]]],
        }
    }

    pub fn apply(&self, s: &JonesState) -> JonesState {
        JonesState {
            x: self.m[0][0] * s.x + self.m[0][1] * s.y,
            y: self.m[1][0] * s.x + self.m[1][1] * s.y,
        }
    }
}

/// Jones matrix of `dz` meters of linear birefringence with the given axis
/// orientation and beat length. `None` beat length means isotropic (identity).
pub fn segment_jones(axis_rad: f64, beat_length_m: Option<f64>, dz: f64) -> JonesMatrix {
    let Some(lb) = beat_length_m else {
        return JonesMatrix::IDENTITY;
    };
    // Retardance between the axes grows by 2 pi per beat length.
    let half = std::f64::consts::PI * dz / lb;
    let fast = Complex64::from_polar(1.0, -half);
    let slow = Complex64::from_polar(1.0, half);
    let (sin, cos) = axis_rad.sin_cos();
    let c = Complex64::new(cos, 0.0);
    let s = Complex64::new(sin, 0.0);
    // R(theta) * diag(fast, slow) * R(-theta)
    JonesMatrix {
        m: [
            [c * c * fast + s * s * slow, c * s * (fast - slow)],
            [c * s * (fast - slow), s * s * fast + c * c * slow],
        ],
    }
}

/// One-way Jones operator of the plan prefix up to one-way distance `z`.
pub fn propagate_jones_matrix(plan: &LinkPlan, z: f64) -> JonesMatrix {
    let mut acc = JonesMatrix::IDENTITY;
    let mut remaining = z.max(0.0);
    for el in &plan.elements {
        if remaining <= 0.0 {
            break;
        }
        match el {
            LinkElement::Fiber(seg) => {
                let take = remaining.min(seg.length_m);
                acc = segment_jones(seg.birefringence_axis_rad, seg.beat_length_m, take).mul(&acc);
                remaining -= take;
            }
            LinkElement::Event(crate::link::LinkEvent::AirGap { length_m, .. }) => {
                remaining -= length_m.min(remaining);
            }
            LinkElement::Event(_) => {}
        }
    }
    acc
}

/// Propagates a state one way to distance `z`.
pub fn propagate_jones(state: &JonesState, plan: &LinkPlan, z: f64) -> JonesState {
    propagate_jones_matrix(plan, z).apply(state)
}

/// Round-trip operator at `z`: Rayleigh backscatter preserves polarization and
/// the reciprocal backward pass is the transpose in the laboratory frame.
pub fn backscatter_jones(plan: &LinkPlan, z: f64) -> JonesMatrix {
    let j = propagate_jones_matrix(plan, z);
    j.transpose().mul(&j)
}

/// Precomputed cumulative Jones operators along the compiled link, for fast
/// round-trip projection lookups during simulation.
#[derive(Debug, Clone)]
pub struct PolarizationPath {
    entries: Vec<PathEntry>,
}

#[derive(Debug, Clone)]
struct PathEntry {
    z_start: f64,
    z_end: f64,
    axis_rad: f64,
    beat_length_m: Option<f64>,
    upstream: JonesMatrix,
}

impl PolarizationPath {
    pub fn from_sections(sections: &[RayleighSection]) -> Self {
        let mut entries = Vec::with_capacity(sections.len());
        let mut acc = JonesMatrix::IDENTITY;
        for s in sections {
            entries.push(PathEntry {
                z_start: s.z_start,
                z_end: s.z_end,
                axis_rad: s.birefringence_axis_rad,
                beat_length_m: s.beat_length_m,
                upstream: acc,
            });
            acc = segment_jones(s.birefringence_axis_rad, s.beat_length_m, s.z_end - s.z_start)
                .mul(&acc);
        }
        entries.push(PathEntry {
            z_start: f64::INFINITY,
            z_end: f64::INFINITY,
            axis_rad: 0.0,
            beat_length_m: None,
            upstream: acc,
        });
        PolarizationPath { entries }
    }

    pub fn from_impulse_response(ir: &ImpulseResponse) -> Self {
        Self::from_sections(&ir.sections)
    }

    /// True when every entry is isotropic, so all projections are constant.
    pub fn is_trivial(&self) -> bool {
        self.entries.iter().all(|e| e.beat_length_m.is_none())
    }

    pub fn one_way(&self, z: f64) -> JonesMatrix {
        let mut last = &self.entries[0];
        for e in &self.entries {
            if z < e.z_start {
                break;
            }
            last = e;
            if z <= e.z_end {
                return segment_jones(e.axis_rad, e.beat_length_m, z - e.z_start).mul(&e.upstream);
            }
        }
        last.upstream
    }

    pub fn round_trip(&self, z: f64) -> JonesMatrix {
        let j = self.one_way(z);
        j.transpose().mul(&j)
    }

    /// Analyzer-projected backscatter power fraction at `z` for `input`.
    pub fn projected_backscatter(&self, z: f64, input: &JonesState, analyzer: &JonesState) -> f64 {
        self.round_trip(z).apply(input).project_onto(analyzer)
    }
}

/// Serializable polarization state specification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolarizationSpec {
    Linear { angle_rad: f64 },
    CircularLeft,
    CircularRight,
    Elliptical { x: [f64; 2], y: [f64; 2] },
}

impl Default for PolarizationSpec {
    fn default() -> Self {
        PolarizationSpec::Linear { angle_rad: 0.0 }
    }
}

impl PolarizationSpec {
    pub fn to_state(&self) -> JonesState {
        match self {
            PolarizationSpec::Linear { angle_rad } => JonesState::linear(*angle_rad),
            PolarizationSpec::CircularLeft => JonesState::circular_left(),
            PolarizationSpec::CircularRight => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                JonesState {
                    x: Complex64::new(s, 0.0),
                    y: Complex64::new(0.0, -s),
                }
            }
            PolarizationSpec::Elliptical { x, y } => JonesState::new(
                Complex64::new(x[0], x[1]),
                Complex64::new(y[0], y[1]),
            ),
        }
    }
}
