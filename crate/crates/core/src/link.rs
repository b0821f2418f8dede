//! Link plan: the system under test as an ordered list of fiber segments and
//! discrete events, compiled into a reflectivity impulse response.
//!
//! The impulse response stays piecewise-analytic (per-segment exponential
//! Rayleigh density plus a reflection list) so the TCSPC engine can sample it
//! at arbitrary resolution.

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::units::{db_inv, SPEED_OF_LIGHT};

/// Reference pulse width for the Rayleigh backscatter coefficient, s.
pub const BACKSCATTER_REFERENCE_PULSE: f64 = 1e-9;

/// Default Rayleigh backscatter fraction for a 1 ns pulse at 1550 nm, dB.
pub const DEFAULT_BACKSCATTER_DB: f64 = -82.0;

/// One span of uniform fiber.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberSegment {
    pub length_m: f64,
    /// One-way attenuation, dB/km.
    #[serde(default = "default_attenuation")]
    pub attenuation_db_per_km: f64,
    #[serde(default = "default_group_index")]
    pub group_index: f64,
    /// Rayleigh backscatter fraction referenced to a 1 ns pulse, dB.
    #[serde(default = "default_backscatter")]
    pub backscatter_coeff_db: f64,
    /// Chromatic dispersion, ps/(nm*km).
    #[serde(default)]
    pub dispersion_ps_per_nm_km: f64,
    /// Polarization beat length, m. Absent means isotropic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beat_length_m: Option<f64>,
    /// Orientation of the linear birefringence axes, rad.
    #[serde(default)]
    pub birefringence_axis_rad: f64,
}

fn default_attenuation() -> f64 {
    0.2
}
fn default_group_index() -> f64 {
    1.468
}
fn default_backscatter() -> f64 {
    DEFAULT_BACKSCATTER_DB
}

impl FiberSegment {
    pub fn uniform(length_m: f64) -> Self {
        FiberSegment {
            length_m,
            attenuation_db_per_km: default_attenuation(),
            group_index: default_group_index(),
            backscatter_coeff_db: default_backscatter(),
            dispersion_ps_per_nm_km: 0.0,
            beat_length_m: None,
            birefringence_axis_rad: 0.0,
        }
    }

    /// Dispersion in SI units, s/m^2 (seconds per meter of path per meter of
    /// spectral width).
    pub fn dispersion_si(&self) -> f64 {
        self.dispersion_ps_per_nm_km * 1e-6
    }
}

/// End-of-fiber termination style.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FiberEndKind {
    Cleaved,
    Connector,
    /// Angled or index-matched: no reflection.
    Terminated,
}

/// A discrete event along the link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum LinkEvent {
    /// Point reflector (connector face, mechanical splice, ...).
    Reflector { reflectance_db: f64 },
    /// Lossy fusion splice; the loss applies twice (round trip).
    Splice { loss_db: f64 },
    /// Open-beam section with one reflective surface per face (a U-bench).
    AirGap {
        length_m: f64,
        /// Reflectance of each face, dB. Defaults to the glass-air Fresnel value.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        surface_reflectance_db: Option<f64>,
        /// Coupling loss per one-way transit of the gap, dB.
        #[serde(default)]
        transit_loss_db: f64,
    },
    FiberEnd { termination: FiberEndKind },
}

/// One element of a link plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LinkElement {
    Fiber(FiberSegment),
    Event(LinkEvent),
}

/// Ordered description of the system under test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkPlan {
    pub elements: Vec<LinkElement>,
}

impl LinkPlan {
    pub fn new(elements: Vec<LinkElement>) -> Self {
        LinkPlan { elements }
    }

    /// Structural validation; returns every violation, not just the first.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut problems = Vec::new();
        let mut end_seen_at: Option<usize> = None;
        for (i, el) in self.elements.iter().enumerate() {
            if let Some(end_idx) = end_seen_at {
                problems.push(format!(
                    "element {i} ({}) appears after fiber_end at element {end_idx}",
                    describe(el)
                ));
            }
            match el {
                LinkElement::Fiber(seg) => {
                    if seg.length_m < 0.0 {
                        problems.push(format!("element {i} (fiber): negative length {}", seg.length_m));
                    }
                    if seg.attenuation_db_per_km < 0.0 {
                        problems.push(format!(
                            "element {i} (fiber): negative attenuation {}",
                            seg.attenuation_db_per_km
                        ));
                    }
                    if seg.group_index <= 1.0 {
                        problems.push(format!(
                            "element {i} (fiber): group index {} must exceed 1",
                            seg.group_index
                        ));
                    }
                    if let Some(lb) = seg.beat_length_m {
                        if lb <= 0.0 {
                            problems.push(format!("element {i} (fiber): beat length {lb} must be positive"));
                        }
                    }
                }
                LinkElement::Event(ev) => match ev {
                    LinkEvent::Reflector { reflectance_db } => {
                        if *reflectance_db > 0.0 {
                            problems.push(format!(
                                "element {i} (reflector): reflectance {reflectance_db} dB exceeds 0 dB"
                            ));
                        }
                    }
                    LinkEvent::Splice { loss_db } => {
                        if *loss_db < 0.0 {
                            problems.push(format!("element {i} (splice): negative loss {loss_db} dB"));
                        }
                    }
                    LinkEvent::AirGap {
                        length_m,
                        surface_reflectance_db,
                        transit_loss_db,
                    } => {
                        if *length_m < 0.0 {
                            problems.push(format!("element {i} (air_gap): negative length {length_m}"));
                        }
                        if let Some(r) = surface_reflectance_db {
                            if *r > 0.0 {
                                problems.push(format!(
                                    "element {i} (air_gap): surface reflectance {r} dB exceeds 0 dB"
                                ));
                            }
                        }
                        if *transit_loss_db < 0.0 {
                            problems.push(format!(
                                "element {i} (air_gap): negative transit loss {transit_loss_db} dB"
                            ));
                        }
                    }
                    LinkEvent::FiberEnd { .. } => {
                        end_seen_at = Some(i);
                    }
                },
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Scenario(problems))
        }
    }

    /// Round-trip time over the full plan, s. Air gaps travel at n = 1.
    pub fn round_trip_time(&self) -> f64 {
        let mut t = 0.0;
        for el in &self.elements {
            match el {
                LinkElement::Fiber(seg) => t += 2.0 * seg.length_m * seg.group_index / SPEED_OF_LIGHT,
                LinkElement::Event(LinkEvent::AirGap { length_m, .. }) => {
                    t += 2.0 * length_m / SPEED_OF_LIGHT
                }
                LinkElement::Event(_) => {}
            }
        }
        t
    }

    /// Highest shot rate that leaves `guard` seconds of quiet after each
    /// round trip.
    pub fn max_repetition_rate(&self, guard: f64) -> f64 {
        1.0 / (self.round_trip_time() + guard)
    }

    /// Total geometric length, m.
    pub fn total_length(&self) -> f64 {
        self.elements
            .iter()
            .map(|el| match el {
                LinkElement::Fiber(seg) => seg.length_m,
                LinkElement::Event(LinkEvent::AirGap { length_m, .. }) => *length_m,
                LinkElement::Event(_) => 0.0,
            })
            .sum()
    }

    /// Group index used for the displayed distance axis: the first fiber
    /// segment's, or the default when the plan has none.
    pub fn display_group_index(&self) -> f64 {
        self.elements
            .iter()
            .find_map(|el| match el {
                LinkElement::Fiber(seg) => Some(seg.group_index),
                _ => None,
            })
            .unwrap_or_else(default_group_index)
    }
}

fn describe(el: &LinkElement) -> &'static str {
    match el {
        LinkElement::Fiber(_) => "fiber",
        LinkElement::Event(LinkEvent::Reflector { .. }) => "reflector",
        LinkElement::Event(LinkEvent::Splice { .. }) => "splice",
        LinkElement::Event(LinkEvent::AirGap { .. }) => "air_gap",
        LinkElement::Event(LinkEvent::FiberEnd { .. }) => "fiber_end",
    }
}

/// Normal-incidence Fresnel power reflectance between two indices.
pub fn fresnel_reflectance(n1: f64, n2: f64) -> f64 {
    let r = (n1 - n2) / (n1 + n2);
    r * r
}

/// One span of exponential Rayleigh backscatter density.
#[derive(Debug, Clone, PartialEq)]
pub struct RayleighSection {
    /// One-way geometric position of the section start, m.
    pub z_start: f64,
    pub z_end: f64,
    /// Round-trip time at the section start, s.
    pub t_start: f64,
    pub t_end: f64,
    pub group_index: f64,
    /// Returned power fraction per meter at `z_start` (round-trip losses of
    /// everything upstream folded in).
    pub density_at_start: f64,
    /// Linear decay rate per meter: density(z) = density_at_start * exp(-k (z - z_start)).
    pub decay_per_m: f64,
    /// Signed dispersion-time accumulated upstream, s per meter of spectral
    /// width (sum of D * 2L).
    pub disp_accum_start: f64,
    /// Segment dispersion, s/m^2.
    pub dispersion_si: f64,
    /// Upstream group-delay-squared accumulation for the transform-limited
    /// model: sum of beta2-like D*2L terms is resolved by the caller.
    pub beat_length_m: Option<f64>,
    pub birefringence_axis_rad: f64,
}

impl RayleighSection {
    pub fn time_at(&self, z: f64) -> f64 {
        self.t_start + 2.0 * (z - self.z_start) * self.group_index / SPEED_OF_LIGHT
    }

    pub fn z_at(&self, t: f64) -> f64 {
        self.z_start + (t - self.t_start) * SPEED_OF_LIGHT / (2.0 * self.group_index)
    }

    pub fn density_at(&self, z: f64) -> f64 {
        self.density_at_start * (-self.decay_per_m * (z - self.z_start)).exp()
    }

    /// Integral of the density over the whole section (returned energy
    /// fraction contributed by this span).
    pub fn integral(&self) -> f64 {
        let len = self.z_end - self.z_start;
        if self.decay_per_m.abs() < 1e-15 {
            self.density_at_start * len
        } else {
            self.density_at_start * (1.0 - (-self.decay_per_m * len).exp()) / self.decay_per_m
        }
    }

    pub fn disp_accum_at(&self, z: f64) -> f64 {
        self.disp_accum_start + self.dispersion_si * 2.0 * (z - self.z_start)
    }
}

/// A single Fresnel reflection.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteReflection {
    /// One-way geometric position, m.
    pub z: f64,
    /// Round-trip time, s.
    pub t: f64,
    /// Returned power fraction, linear, upstream losses folded in.
    pub fraction: f64,
    /// Dispersion-time accumulated to this point, s per meter of spectral width.
    pub disp_accum: f64,
    pub label: String,
}

/// Compiled reflectivity response of a link plan versus one-way distance.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpulseResponse {
    pub sections: Vec<RayleighSection>,
    pub reflections: Vec<DiscreteReflection>,
    pub total_length_m: f64,
    pub total_round_trip_s: f64,
}

impl ImpulseResponse {
    /// Rayleigh density at one-way position z, per meter.
    pub fn rayleigh_density(&self, z: f64) -> f64 {
        for s in &self.sections {
            if z >= s.z_start && z <= s.z_end {
                return s.density_at(z);
            }
        }
        0.0
    }

    /// Total returned energy fraction (Rayleigh integral plus reflections).
    pub fn total_return_fraction(&self) -> f64 {
        self.sections.iter().map(RayleighSection::integral).sum::<f64>()
            + self.reflections.iter().map(|r| r.fraction).sum::<f64>()
    }
}

/// Compiles a plan into its impulse response for a probe pulse of the given
/// width. The Rayleigh level scales linearly with the pulse width; discrete
/// reflections do not depend on it.
pub fn compile(plan: &LinkPlan, pulse_width: f64) -> Result<ImpulseResponse, ConfigError> {
    plan.validate()?;
    if pulse_width <= 0.0 {
        return Err(ConfigError::Invalid(format!(
            "pulse width must be positive, got {pulse_width}"
        )));
    }

    let mut sections = Vec::new();
    let mut reflections = Vec::new();
    let mut z = 0.0f64;
    let mut t = 0.0f64;
    // Linear round-trip transmission of everything upstream.
    let mut cum_rt = 1.0f64;
    let mut disp_accum = 0.0f64;

    for (i, el) in plan.elements.iter().enumerate() {
        match el {
            LinkElement::Fiber(seg) => {
                if seg.length_m > 0.0 {
                    let alpha_db_per_m = seg.attenuation_db_per_km / 1000.0;
                    let decay_per_m = 2.0 * alpha_db_per_m * std::f64::consts::LN_10 / 10.0;
                    let density0 = cum_rt
                        * db_inv(seg.backscatter_coeff_db)
                        * (pulse_width / BACKSCATTER_REFERENCE_PULSE);
                    let t_end = t + 2.0 * seg.length_m * seg.group_index / SPEED_OF_LIGHT;
                    sections.push(RayleighSection {
                        z_start: z,
                        z_end: z + seg.length_m,
                        t_start: t,
                        t_end,
                        group_index: seg.group_index,
                        density_at_start: density0,
                        decay_per_m,
                        disp_accum_start: disp_accum,
                        dispersion_si: seg.dispersion_si(),
                        beat_length_m: seg.beat_length_m,
                        birefringence_axis_rad: seg.birefringence_axis_rad,
                    });
                    z += seg.length_m;
                    t = t_end;
                    cum_rt *= db_inv(-2.0 * seg.attenuation_db_per_km * seg.length_m / 1000.0);
                    disp_accum += seg.dispersion_si() * 2.0 * seg.length_m;
                }
            }
            LinkElement::Event(ev) => match ev {
                LinkEvent::Reflector { reflectance_db } => {
                    reflections.push(DiscreteReflection {
                        z,
                        t,
                        fraction: cum_rt * db_inv(*reflectance_db),
                        disp_accum,
                        label: format!("reflector[{i}]"),
                    });
                }
                LinkEvent::Splice { loss_db } => {
                    cum_rt *= db_inv(-2.0 * loss_db);
                }
                LinkEvent::AirGap {
                    length_m,
                    surface_reflectance_db,
                    transit_loss_db,
                } => {
                    let n_local = local_glass_index(plan, i);
                    let r = surface_reflectance_db
                        .map(db_inv)
                        .unwrap_or_else(|| fresnel_reflectance(n_local, 1.0));
                    let transit = db_inv(-transit_loss_db);
                    reflections.push(DiscreteReflection {
                        z,
                        t,
                        fraction: cum_rt * r,
                        disp_accum,
                        label: format!("air_gap[{i}] face 1"),
                    });
                    z += length_m;
                    t += 2.0 * length_m / SPEED_OF_LIGHT;
                    reflections.push(DiscreteReflection {
                        z,
                        t,
                        fraction: cum_rt * (1.0 - r) * (1.0 - r) * transit * transit * r,
                        disp_accum,
                        label: format!("air_gap[{i}] face 2"),
                    });
                    cum_rt *= (1.0 - r).powi(4) * transit * transit * transit * transit;
                }
                LinkEvent::FiberEnd { termination } => {
                    let n_local = local_glass_index(plan, i);
                    let r = match termination {
                        FiberEndKind::Cleaved | FiberEndKind::Connector => {
                            fresnel_reflectance(n_local, 1.0)
                        }
                        FiberEndKind::Terminated => 0.0,
                    };
                    if r > 0.0 {
                        reflections.push(DiscreteReflection {
                            z,
                            t,
                            fraction: cum_rt * r,
                            disp_accum,
                            label: format!("fiber_end[{i}]"),
                        });
                    }
                }
            },
        }
    }

    Ok(ImpulseResponse {
        sections,
        reflections,
        total_length_m: z,
        total_round_trip_s: t,
    })
}

/// Group index of the nearest fiber segment at or before element `idx`,
/// falling back to the first segment after it.
fn local_glass_index(plan: &LinkPlan, idx: usize) -> f64 {
    for el in plan.elements[..idx].iter().rev() {
        if let LinkElement::Fiber(seg) = el {
            return seg.group_index;
        }
    }
    for el in plan.elements[idx..].iter() {
        if let LinkElement::Fiber(seg) = el {
            return seg.group_index;
        }
    }
    default_group_index()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn smf(length_m: f64) -> LinkElement {
        LinkElement::Fiber(FiberSegment::uniform(length_m))
    }

    #[test]
    fn fresnel_glass_air() {
        let r = fresnel_reflectance(1.468, 1.0);
        assert_relative_eq!(r, 0.035958, max_relative = 1e-4);
        assert_relative_eq!(10.0 * r.log10(), -14.442, max_relative = 1e-3);
        assert_eq!(fresnel_reflectance(1.5, 1.5), 0.0);
        assert_eq!(fresnel_reflectance(1.0, 1.468), fresnel_reflectance(1.468, 1.0));
    }

    #[test]
    fn round_trip_time_of_sixteen_km() {
        let plan = LinkPlan::new(vec![smf(16_000.0)]);
        let t = plan.round_trip_time();
        assert_relative_eq!(t, 156.695e-6, max_relative = 1e-4);
        assert_relative_eq!(plan.max_repetition_rate(0.0), 6381.8, max_relative = 1e-3);
    }

    #[test]
    fn repetition_rate_with_guard() {
        let empty = LinkPlan::new(vec![]);
        assert_relative_eq!(empty.max_repetition_rate(1e-6), 1e6, max_relative = 1e-9);

        let plan = LinkPlan::new(vec![smf(50_000.0)]);
        assert_relative_eq!(plan.round_trip_time(), 489.67e-6, max_relative = 1e-3);
        assert_relative_eq!(plan.max_repetition_rate(10e-6), 2001.3, max_relative = 1e-3);
    }

    #[test]
    fn rayleigh_slope_is_twice_alpha() {
        let plan = LinkPlan::new(vec![smf(16_000.0)]);
        let ir = compile(&plan, 50e-9).unwrap();
        assert_eq!(ir.sections.len(), 1);
        let s = &ir.sections[0];
        // dB slope of the one-way-returned power over the segment.
        let z1 = 1000.0;
        let z2 = 9000.0;
        let slope_db_per_km =
            10.0 * (s.density_at(z2) / s.density_at(z1)).log10() / ((z2 - z1) / 1000.0);
        assert_relative_eq!(slope_db_per_km, -0.4, max_relative = 1e-9);
    }

    #[test]
    fn empty_plan_compiles_to_nothing() {
        let ir = compile(&LinkPlan::new(vec![]), 50e-9).unwrap();
        assert!(ir.sections.is_empty());
        assert!(ir.reflections.is_empty());
        assert_eq!(ir.total_length_m, 0.0);
    }

    #[test]
    fn u_bench_gives_two_reflections_three_centimeters_apart() {
        let plan = LinkPlan::new(vec![
            smf(2.0),
            LinkElement::Event(LinkEvent::AirGap {
                length_m: 0.03,
                surface_reflectance_db: None,
                transit_loss_db: 0.0,
            }),
        ]);
        let ir = compile(&plan, 30e-12).unwrap();
        assert_eq!(ir.reflections.len(), 2);
        let dt = ir.reflections[1].t - ir.reflections[0].t;
        assert_relative_eq!(dt, 2.0 * 0.03 / SPEED_OF_LIGHT, max_relative = 1e-12);
        assert_relative_eq!(ir.reflections[0].fraction, 0.035958, max_relative = 1e-3);
        // Second face loses two transmissions through face 1.
        let expect = 0.035958 * (1.0 - 0.035958) * (1.0 - 0.035958);
        assert_relative_eq!(ir.reflections[1].fraction, expect, max_relative = 1e-3);
    }

    #[test]
    fn doubling_pulse_width_doubles_rayleigh_only() {
        let plan = LinkPlan::new(vec![
            smf(100.0),
            LinkElement::Event(LinkEvent::FiberEnd {
                termination: FiberEndKind::Cleaved,
            }),
        ]);
        let a = compile(&plan, 50e-9).unwrap();
        let b = compile(&plan, 100e-9).unwrap();
        for z in [0.0, 10.0, 55.5, 99.0] {
            assert_relative_eq!(b.rayleigh_density(z), 2.0 * a.rayleigh_density(z), max_relative = 1e-12);
        }
        assert_eq!(a.reflections, b.reflections);
    }

    #[test]
    fn events_after_fiber_end_are_rejected() {
        let plan = LinkPlan::new(vec![
            smf(1.0),
            LinkElement::Event(LinkEvent::FiberEnd {
                termination: FiberEndKind::Cleaved,
            }),
            LinkElement::Event(LinkEvent::Reflector { reflectance_db: -30.0 }),
        ]);
        let err = compile(&plan, 50e-9).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("element 2"), "unexpected message: {msg}");
        assert!(msg.contains("after fiber_end"), "unexpected message: {msg}");
    }

    #[test]
    fn cumulative_loss_applies_to_downstream_reflections() {
        let plan = LinkPlan::new(vec![
            LinkElement::Event(LinkEvent::Reflector { reflectance_db: -20.0 }),
            smf(5000.0),
            LinkElement::Event(LinkEvent::Splice { loss_db: 0.5 }),
            smf(5000.0),
            LinkElement::Event(LinkEvent::Reflector { reflectance_db: -20.0 }),
        ]);
        let ir = compile(&plan, 50e-9).unwrap();
        assert_eq!(ir.reflections.len(), 2);
        // 10 km of 0.2 dB/km round trip = 4 dB, splice 2 * 0.5 dB = 1 dB.
        let expect = 0.01 * db_inv(-5.0);
        assert_relative_eq!(ir.reflections[1].fraction, expect, max_relative = 1e-9);
        assert!(ir.reflections[1].fraction < ir.reflections[0].fraction);
    }

    proptest! {
        // Reflections of equal local reflectance never gain power downstream.
        #[test]
        fn cumulative_loss_monotonicity(
            lens in proptest::collection::vec(1.0f64..5000.0, 1..5),
            losses in proptest::collection::vec(0.0f64..1.0, 1..5),
        ) {
            let mut elements = Vec::new();
            for (len, loss) in lens.iter().zip(&losses) {
                elements.push(LinkElement::Event(LinkEvent::Reflector { reflectance_db: -30.0 }));
                elements.push(smf(*len));
                elements.push(LinkElement::Event(LinkEvent::Splice { loss_db: *loss }));
            }
            elements.push(LinkElement::Event(LinkEvent::Reflector { reflectance_db: -30.0 }));
            let ir = compile(&LinkPlan::new(elements), 50e-9).unwrap();
            for pair in ir.reflections.windows(2) {
                prop_assert!(pair[1].fraction <= pair[0].fraction * (1.0 + 1e-12));
            }
        }

        // Rayleigh density is pointwise linear in the pulse width.
        #[test]
        fn rayleigh_linear_in_pulse_width(scale in 0.1f64..20.0, z in 0.0f64..900.0) {
            let plan = LinkPlan::new(vec![smf(1000.0)]);
            let base = compile(&plan, 10e-9).unwrap();
            let scaled = compile(&plan, 10e-9 * scale).unwrap();
            let a = base.rayleigh_density(z);
            let b = scaled.rayleigh_density(z);
            prop_assert!((b - scale * a).abs() <= 1e-12 * b.abs().max(1e-300));
        }

        // The two faces of a d-meter air gap are 2d/c apart in round-trip time.
        #[test]
        fn air_gap_timing(gap in 1e-3f64..0.5, lead in 0.1f64..100.0) {
            let plan = LinkPlan::new(vec![
                smf(lead),
                LinkElement::Event(LinkEvent::AirGap {
                    length_m: gap,
                    surface_reflectance_db: None,
                    transit_loss_db: 0.0,
                }),
            ]);
            let ir = compile(&plan, 30e-12).unwrap();
            let dt = ir.reflections[1].t - ir.reflections[0].t;
            prop_assert!((dt - 2.0 * gap / SPEED_OF_LIGHT).abs() < 1e-18);
        }
    }
}
