//! Analytic stop-rate oracle.
//!
//! `RateModel` evaluates the expected instantaneous stop-click rate r(t) for
//! one launch at t = 0 (dark rate plus the photon flux convolved with the
//! Gaussian system response), per-bin expectations, and the single-stop
//! distribution p(t) = r(t) exp(-int r), which is what a first-stop TAC
//! actually histograms. It shares the component decomposition with the Monte
//! Carlo engine but integrates it independently.

use crate::math::{erf, normal_cdf, GL8_NODES, GL8_WEIGHTS};

use super::{Component, SimulationModel};

/// Analytic expected-rate view over a simulation model.
pub struct RateModel<'a> {
    model: &'a SimulationModel,
}

impl SimulationModel {
    pub fn rate_model(&self) -> RateModel<'_> {
        RateModel { model: self }
    }
}

impl<'a> RateModel<'a> {
    /// Mean polarization projection factor at depth z.
    fn pol_factor(&self, z: f64) -> f64 {
        match &self.model.pol {
            None => 1.0,
            Some(p) => {
                if p.scrambler_on {
                    0.5
                } else {
                    p.factor(z, &p.input)
                }
            }
        }
    }

    fn sigma_for_section(&self, disp_accum: f64) -> f64 {
        let disp = self.model.dispersion_sigma(disp_accum);
        (self.model.base_sigma.powi(2) + self.model.start_sigma.powi(2) + disp * disp).sqrt()
    }

    /// Instantaneous stop-click rate, Hz, including the dark rate. Start
    /// jitter is folded into the Gaussian system response.
    pub fn rate_at(&self, t: f64) -> f64 {
        self.model.dark_rate + self.photon_rate_at(t)
    }

    /// Photon part of the rate, Hz.
    pub fn photon_rate_at(&self, t: f64) -> f64 {
        let mut rate = 0.0;
        for c in &self.model.components {
            rate += self.component_rate(c, t);
        }
        rate
    }

    fn component_rate(&self, c: &Component, t: f64) -> f64 {
        match *c {
            Component::Reflection {
                weight,
                t: t_r,
                z,
                disp_sigma,
            } => {
                let sigma = (self.model.base_sigma.powi(2)
                    + self.model.start_sigma.powi(2)
                    + disp_sigma * disp_sigma)
                    .sqrt();
                if sigma <= 0.0 {
                    return 0.0;
                }
                let u = (t - t_r) / sigma;
                weight * self.pol_factor(z) * (-0.5 * u * u).exp()
                    / (sigma * (2.0 * std::f64::consts::PI).sqrt())
            }
            Component::Section {
                t_start,
                t_end,
                decay_per_s,
                rate_at_start,
                z_start,
                z_per_s,
                disp_accum_start,
                dispersion_si,
                ..
            } => {
                let span = t_end - t_start;
                let tau = t - t_start;
                // Depth used for the slowly varying factors, clamped to the span.
                let z_eval = z_start + tau.clamp(0.0, span) * z_per_s;
                let accum = disp_accum_start + dispersion_si * 2.0 * (z_eval - z_start);
                let sigma = self.sigma_for_section(accum);
                let k = decay_per_s;
                let body = if sigma < 1e-15 {
                    if tau < 0.0 || tau > span {
                        0.0
                    } else {
                        (-k * tau).exp()
                    }
                } else {
                    // exp decay restricted to [0, span], convolved with N(0, sigma)
                    let s2 = std::f64::consts::SQRT_2 * sigma;
                    let shift = k * sigma * sigma;
                    0.5 * (-k * tau + 0.5 * k * k * sigma * sigma).exp()
                        * (erf((tau - shift) / s2) - erf((tau - span - shift) / s2))
                };
                rate_at_start * self.pol_factor(z_eval) * body
            }
        }
    }

    /// Expected number of stop candidates per shot inside each bin
    /// (integral of r over the bin; no pile-up).
    pub fn bin_expectations(&self, origin: f64, bin_width: f64, num_bins: usize) -> Vec<f64> {
        let mut out = vec![self.model.dark_rate * bin_width; num_bins];
        let end = origin + bin_width * num_bins as f64;
        for c in &self.model.components {
            match *c {
                Component::Reflection {
                    weight,
                    t: t_r,
                    z,
                    disp_sigma,
                } => {
                    let sigma = (self.model.base_sigma.powi(2)
                        + self.model.start_sigma.powi(2)
                        + disp_sigma * disp_sigma)
                        .sqrt();
                    if sigma <= 0.0 {
                        if t_r >= origin && t_r < end {
                            let i = ((t_r - origin) / bin_width) as usize;
                            out[i] += weight * self.pol_factor(z);
                        }
                        continue;
                    }
                    let w = weight * self.pol_factor(z);
                    let lo = (((t_r - 8.0 * sigma - origin) / bin_width).floor().max(0.0)) as usize;
                    let hi =
                        ((((t_r + 8.0 * sigma - origin) / bin_width).ceil()).max(0.0) as usize).min(num_bins);
                    let mut cdf_left = normal_cdf((origin + lo as f64 * bin_width - t_r) / sigma);
                    for (i, slot) in out.iter_mut().enumerate().take(hi).skip(lo) {
                        let right = origin + (i + 1) as f64 * bin_width;
                        let cdf_right = normal_cdf((right - t_r) / sigma);
                        *slot += w * (cdf_right - cdf_left);
                        cdf_left = cdf_right;
                    }
                }
                Component::Section {
                    t_start, t_end, ..
                } => {
                    let sigma_guard = 8.0
                        * (self.model.base_sigma + self.model.start_sigma
                            + self.model.dispersion_sigma(reach_accum(c)))
                        .max(bin_width * 1e-9);
                    let lo = (((t_start - sigma_guard - origin) / bin_width).floor().max(0.0)) as usize;
                    let hi = ((((t_end + sigma_guard - origin) / bin_width).ceil()).max(0.0) as usize)
                        .min(num_bins);
                    for (i, slot) in out.iter_mut().enumerate().take(hi).skip(lo) {
                        let a = origin + i as f64 * bin_width;
                        let b = a + bin_width;
                        let mid = 0.5 * (a + b);
                        let half = 0.5 * (b - a);
                        let mut acc = 0.0;
                        for (node, weight) in GL8_NODES.iter().zip(&GL8_WEIGHTS) {
                            acc += weight * self.component_rate(c, mid + half * node);
                        }
                        *slot += acc * half;
                    }
                }
            }
        }
        out
    }

    /// First-stop probability per bin: the survival-weighted fraction of
    /// shots whose earliest in-range stop falls in each bin.
    pub fn first_stop_bin_probs(&self, origin: f64, bin_width: f64, num_bins: usize) -> Vec<f64> {
        let lambdas = self.bin_expectations(origin, bin_width, num_bins);
        let mut survival = 1.0f64;
        lambdas
            .into_iter()
            .map(|lam| {
                let p = survival * (1.0 - (-lam).exp());
                survival *= (-lam).exp();
                p
            })
            .collect()
    }

    /// First-stop expected counts for `shots` starts.
    pub fn first_stop_expected_counts(
        &self,
        origin: f64,
        bin_width: f64,
        num_bins: usize,
        shots: u64,
    ) -> Vec<f64> {
        self.first_stop_bin_probs(origin, bin_width, num_bins)
            .into_iter()
            .map(|p| p * shots as f64)
            .collect()
    }
}

/// Dispersion accumulation at the far end of a section component.
fn reach_accum(c: &Component) -> f64 {
    match *c {
        Component::Section {
            t_start,
            t_end,
            z_per_s,
            disp_accum_start,
            dispersion_si,
            ..
        } => disp_accum_start + dispersion_si * 2.0 * (t_end - t_start) * z_per_s,
        Component::Reflection { .. } => 0.0,
    }
}
