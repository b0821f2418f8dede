//! Physical constants, time/distance conversion, dB arithmetic, and Gaussian
//! width algebra.
//!
//! Everything internal runs in SI base units (seconds, meters, watts, hertz).
//! Round-trip times convert to one-way distances, so the factor of two lives
//! here and nowhere else.

use serde::{Deserialize, Serialize};

use crate::error::DomainError;

/// Speed of light in vacuum, m/s. Exact by SI definition.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Planck constant, J*s. Exact by SI definition.
pub const PLANCK: f64 = 6.626_070_15e-34;

/// FWHM of a Gaussian divided by its rms width: 2*sqrt(2*ln 2).
pub const FWHM_PER_RMS: f64 = 2.354_820_045_030_949_3;

/// FWHM of a Gaussian divided by its half-width at 1/e intensity: 2*sqrt(ln 2).
pub const FWHM_PER_E_HALF_WIDTH: f64 = 1.665_109_222_315_395_4;

/// Group index context for converting TAC times to displayed distances.
///
/// The default of 1.468 maps a 70 ps round trip to ~7.15 mm of fiber.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupIndexContext {
    pub n_g: f64,
}

impl Default for GroupIndexContext {
    fn default() -> Self {
        GroupIndexContext { n_g: 1.468 }
    }
}

impl GroupIndexContext {
    pub fn new(n_g: f64) -> Result<Self, DomainError> {
        if n_g <= 1.0 {
            return Err(DomainError::NonPositive {
                quantity: "group index - 1",
                value: n_g - 1.0,
            });
        }
        Ok(GroupIndexContext { n_g })
    }

    /// Group velocity c/n_g, m/s.
    pub fn group_velocity(&self) -> f64 {
        SPEED_OF_LIGHT / self.n_g
    }
}

/// Converts a round-trip time to a one-way distance: (c/n_g) * t / 2.
pub fn time_to_distance(t: f64, ctx: GroupIndexContext) -> Result<f64, DomainError> {
    if t < 0.0 {
        return Err(DomainError::Negative {
            quantity: "round-trip time",
            value: t,
        });
    }
    Ok(ctx.group_velocity() * t / 2.0)
}

/// Converts a one-way distance to a round-trip time: 2 * d * n_g / c.
pub fn distance_to_time(d: f64, ctx: GroupIndexContext) -> Result<f64, DomainError> {
    if d < 0.0 {
        return Err(DomainError::Negative {
            quantity: "distance",
            value: d,
        });
    }
    Ok(2.0 * d * ctx.n_g / SPEED_OF_LIGHT)
}

/// Root-sum-square of independent Gaussian widths. Empty input gives 0.
pub fn quadrature_width(components: &[f64]) -> Result<f64, DomainError> {
    let mut sum_sq = 0.0;
    for &w in components {
        if w < 0.0 {
            return Err(DomainError::Negative {
                quantity: "width component",
                value: w,
            });
        }
        sum_sq += w * w;
    }
    Ok(sum_sq.sqrt())
}

/// Direction of a Gaussian width conversion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WidthConversion {
    FwhmToRms,
    RmsToFwhm,
}

/// Converts between FWHM and rms width of a Gaussian.
pub fn gaussian_fwhm_rms(w: f64, direction: WidthConversion) -> Result<f64, DomainError> {
    if w < 0.0 {
        return Err(DomainError::Negative {
            quantity: "width",
            value: w,
        });
    }
    Ok(match direction {
        WidthConversion::FwhmToRms => w / FWHM_PER_RMS,
        WidthConversion::RmsToFwhm => w * FWHM_PER_RMS,
    })
}

pub fn fwhm_to_sigma(fwhm: f64) -> f64 {
    fwhm / FWHM_PER_RMS
}

pub fn sigma_to_fwhm(sigma: f64) -> f64 {
    sigma * FWHM_PER_RMS
}

/// Linear power ratio to dB: 10*log10(x).
pub fn db(x: f64) -> Result<f64, DomainError> {
    if x <= 0.0 {
        return Err(DomainError::NonPositive {
            quantity: "power ratio",
            value: x,
        });
    }
    Ok(10.0 * x.log10())
}

/// dB to linear power ratio: 10^(x/10).
pub fn db_inv(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

/// Photon energy h*c/lambda, J.
pub fn photon_energy(wavelength: f64) -> Result<f64, DomainError> {
    if wavelength <= 0.0 {
        return Err(DomainError::NonPositive {
            quantity: "wavelength",
            value: wavelength,
        });
    }
    Ok(PLANCK * SPEED_OF_LIGHT / wavelength)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const CTX: GroupIndexContext = GroupIndexContext { n_g: 1.468 };

    #[test]
    fn seventy_picoseconds_is_about_seven_millimeters() {
        let d = time_to_distance(70e-12, CTX).unwrap();
        assert_relative_eq!(d, 7.1476e-3, max_relative = 1e-4);
    }

    #[test]
    fn zero_time_is_zero_distance() {
        assert_eq!(time_to_distance(0.0, CTX).unwrap(), 0.0);
    }

    #[test]
    fn fifty_nanoseconds_is_about_five_meters() {
        let d = time_to_distance(50e-9, CTX).unwrap();
        assert_relative_eq!(d, 5.1055, max_relative = 1e-3);
    }

    #[test]
    fn sixteen_kilometer_round_trip() {
        let d = time_to_distance(156.7e-6, CTX).unwrap();
        assert_relative_eq!(d, 16_000.5, max_relative = 1e-4);
        let t = distance_to_time(16_000.0, CTX).unwrap();
        assert_relative_eq!(t, 156.695e-6, max_relative = 1e-4);
    }

    #[test]
    fn one_millimeter_bin_width() {
        let t = distance_to_time(1e-3, CTX).unwrap();
        assert_relative_eq!(t, 9.7934e-12, max_relative = 1e-4);
    }

    #[test]
    fn negative_inputs_are_domain_errors() {
        assert!(time_to_distance(-1e-9, CTX).is_err());
        assert!(distance_to_time(-1.0, CTX).is_err());
    }

    #[test]
    fn quadrature_of_jitter_components() {
        let w = quadrature_width(&[30e-12, 40e-12, 40e-12]).unwrap();
        assert_relative_eq!(w, 64.031e-12, max_relative = 1e-4);
    }

    #[test]
    fn quadrature_single_component_is_identity() {
        assert_eq!(quadrature_width(&[3.5]).unwrap(), 3.5);
        assert_eq!(quadrature_width(&[]).unwrap(), 0.0);
    }

    #[test]
    fn quadrature_of_coarse_mode_widths() {
        let w = quadrature_width(&[50e-9, 50e-9]).unwrap();
        assert_relative_eq!(w, 70.71e-9, max_relative = 1e-3);
        let d = time_to_distance(w, CTX).unwrap();
        assert_relative_eq!(d, 7.22, max_relative = 1e-2);
    }

    #[test]
    fn quadrature_of_centimeter_widths() {
        assert_relative_eq!(
            quadrature_width(&[2.0e-2, 5.16e-2]).unwrap(),
            5.534e-2,
            max_relative = 1e-3
        );
        assert_relative_eq!(
            quadrature_width(&[0.3e-2, 2.0e-2]).unwrap(),
            2.022e-2,
            max_relative = 1e-3
        );
    }

    #[test]
    fn fwhm_rms_conversions() {
        let rms = gaussian_fwhm_rms(30e-12, WidthConversion::FwhmToRms).unwrap();
        assert_relative_eq!(rms, 12.74e-12, max_relative = 1e-3);
        assert_eq!(gaussian_fwhm_rms(0.0, WidthConversion::RmsToFwhm).unwrap(), 0.0);
        let fwhm = gaussian_fwhm_rms(2.0e-2, WidthConversion::RmsToFwhm).unwrap();
        assert_relative_eq!(fwhm, 4.7096e-2, max_relative = 1e-3);
    }

    #[test]
    fn db_of_fresnel_glass_air() {
        assert_relative_eq!(db(0.03596).unwrap(), -14.442, max_relative = 1e-3);
        assert_eq!(db(1.0).unwrap(), 0.0);
        assert_relative_eq!(db(10.0).unwrap(), 10.0, max_relative = 1e-12);
        assert!(db(0.0).is_err());
        assert!(db(-2.0).is_err());
    }

    proptest! {
        #[test]
        fn distance_time_round_trip(d in 1e-6f64..1e6) {
            let t = distance_to_time(d, CTX).unwrap();
            let back = time_to_distance(t, CTX).unwrap();
            prop_assert!((back - d).abs() <= 1e-12 * d);
        }

        #[test]
        fn db_round_trip(x in 1e-12f64..1e12) {
            let back = db_inv(db(x).unwrap());
            prop_assert!((back - x).abs() <= 1e-12 * x);
        }

        #[test]
        fn quadrature_permutation_and_zero_invariant(
            mut xs in proptest::collection::vec(0.0f64..1e3, 1..8),
            seed in 0u64..1000,
        ) {
            let base = quadrature_width(&xs).unwrap();
            // deterministic shuffle
            let n = xs.len();
            for i in 0..n {
                let j = (seed as usize + i * 7) % n;
                xs.swap(i, j);
            }
            let shuffled = quadrature_width(&xs).unwrap();
            prop_assert!((base - shuffled).abs() <= 1e-9 * base.max(1.0));
            xs.push(0.0);
            let padded = quadrature_width(&xs).unwrap();
            prop_assert!((base - padded).abs() <= 1e-9 * base.max(1.0));
        }

        #[test]
        fn quadrature_bounds(xs in proptest::collection::vec(0.0f64..1e3, 1..8)) {
            let q = quadrature_width(&xs).unwrap();
            let max = xs.iter().cloned().fold(0.0f64, f64::max);
            let sum: f64 = xs.iter().sum();
            prop_assert!(q >= max - 1e-12);
            prop_assert!(q <= sum + 1e-12);
        }
    }
}
