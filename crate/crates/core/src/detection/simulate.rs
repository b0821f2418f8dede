//! Seeded Monte Carlo TCSPC engine.
//!
//! Each shot draws from its own `ChaCha8` stream keyed by the shot index, so
//! the histogram is bit-identical for a given (model, shots, seed) no matter
//! how the work is partitioned across threads.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use rayon::prelude::*;

use crate::photonics::JonesState;

use super::{Component, Histogram, SimulationModel};

/// Runs `shots` laser shots and accumulates the first recorded stop of each
/// into a histogram. Work is spread over the ambient rayon pool.
pub fn simulate(model: &SimulationModel, shots: u64, seed: u64) -> Histogram {
    assert!(shots >= 1, "shots must be >= 1");
    let base = ChaCha8Rng::seed_from_u64(seed);

    let photon_poisson = if model.photon_mean > 0.0 {
        Some(Poisson::new(model.photon_mean).expect("positive mean"))
    } else {
        None
    };
    let dark_mean = model.dark_rate * (model.window_end - model.window_start);
    let dark_poisson = if dark_mean > 0.0 {
        Some(Poisson::new(dark_mean).expect("positive mean"))
    } else {
        None
    };

    // Cumulative component weights for the per-photon component pick.
    let cum_weights: Vec<f64> = {
        let mut acc = 0.0;
        model
            .components
            .iter()
            .map(|c| {
                acc += c.weight();
                acc
            })
            .collect()
    };
    let total_weight = cum_weights.last().copied().unwrap_or(0.0);

    let stops: Vec<Option<u32>> = (0..shots)
        .into_par_iter()
        .map_init(Vec::new, |events, shot| {
            let mut rng = base.clone();
            rng.set_stream(shot);
            run_shot(
                model,
                &photon_poisson,
                &dark_poisson,
                &cum_weights,
                total_weight,
                events,
                &mut rng,
            )
        })
        .collect();

    let mut counts = vec![0u64; model.num_bins];
    for stop in stops.into_iter().flatten() {
        counts[stop as usize] += 1;
    }

    Histogram {
        bin_width_s: model.bin_width,
        origin_s: model.origin,
        counts,
        shots,
        seed,
        scenario_hash: model.scenario_hash.clone(),
        display_group_index: model.display_group_index,
    }
}

fn run_shot(
    model: &SimulationModel,
    photon_poisson: &Option<Poisson<f64>>,
    dark_poisson: &Option<Poisson<f64>>,
    cum_weights: &[f64],
    total_weight: f64,
    events: &mut Vec<f64>,
    rng: &mut ChaCha8Rng,
) -> Option<u32> {
    events.clear();

    // Fixed draw order keeps the stream layout stable.
    let shot_input = match &model.pol {
        Some(p) if p.scrambler_on => Some(random_state(rng)),
        Some(p) => Some(p.input),
        None => None,
    };
    let start_offset = if model.start_sigma > 0.0 {
        let n: f64 = rng.sample(StandardNormal);
        n * model.start_sigma
    } else {
        0.0
    };

    if let Some(poisson) = photon_poisson {
        let n_photons = poisson.sample(rng) as u64;
        for _ in 0..n_photons {
            let pick = rng.random::<f64>() * total_weight;
            let idx = cum_weights.partition_point(|&w| w < pick).min(cum_weights.len() - 1);
            if let Some(t) = sample_photon(model, &model.components[idx], shot_input.as_ref(), rng) {
                events.push(t);
            }
        }
    }

    if let Some(poisson) = dark_poisson {
        let n_dark = poisson.sample(rng) as u64;
        let span = model.window_end - model.window_start;
        for _ in 0..n_dark {
            events.push(model.window_start + rng.random::<f64>() * span);
        }
    }

    if events.is_empty() {
        return None;
    }
    events.sort_unstable_by(|a, b| a.partial_cmp(b).expect("event times are finite"));

    // Non-paralyzable dead time; the TAC records the first accepted click
    // landing inside [origin, origin + range) relative to the start signal.
    let range_end = model.origin + model.num_bins as f64 * model.bin_width;
    let mut blocked_until = f64::NEG_INFINITY;
    for &t in events.iter() {
        if t < blocked_until {
            continue;
        }
        blocked_until = t + model.dead_time;
        let recorded = t - start_offset;
        if recorded < model.origin {
            continue;
        }
        if recorded >= range_end {
            return None;
        }
        return Some(((recorded - model.origin) / model.bin_width) as u32);
    }
    None
}

/// Draws one detected photon's observed arrival time, or None when the
/// polarization projection rejects it.
fn sample_photon(
    model: &SimulationModel,
    component: &Component,
    shot_input: Option<&JonesState>,
    rng: &mut ChaCha8Rng,
) -> Option<f64> {
    let (t_true, z, disp_sigma) = match *component {
        Component::Reflection {
            t, z, disp_sigma, ..
        } => (t, z, disp_sigma),
        Component::Section {
            t_start,
            t_end,
            decay_per_s,
            z_start,
            z_per_s,
            disp_accum_start,
            dispersion_si,
            ..
        } => {
            let span = t_end - t_start;
            let u = rng.random::<f64>();
            let tau = if decay_per_s.abs() < 1e-15 {
                u * span
            } else {
                let depletion = 1.0 - (-decay_per_s * span).exp();
                -(1.0 - u * depletion).ln() / decay_per_s
            };
            let z = z_start + tau * z_per_s;
            let accum = disp_accum_start + dispersion_si * 2.0 * (z - z_start);
            (t_start + tau, z, model.dispersion_sigma(accum))
        }
    };

    if let (Some(pol), Some(input)) = (&model.pol, shot_input) {
        let f = pol.factor(z, input);
        if rng.random::<f64>() >= f {
            return None;
        }
    }

    let sigma = (model.base_sigma * model.base_sigma + disp_sigma * disp_sigma).sqrt();
    let jitter = if sigma > 0.0 {
        let n: f64 = rng.sample(StandardNormal);
        n * sigma
    } else {
        0.0
    };
    Some(t_true + jitter)
}

/// Haar-uniform polarization state (complex Gaussian pair, normalized).
fn random_state(rng: &mut ChaCha8Rng) -> JonesState {
    loop {
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        let c: f64 = rng.sample(StandardNormal);
        let d: f64 = rng.sample(StandardNormal);
        let norm2 = a * a + b * b + c * c + d * d;
        if norm2 > 1e-12 {
            return JonesState::new(Complex64::new(a, b), Complex64::new(c, d));
        }
    }
}
