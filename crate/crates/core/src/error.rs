//! Error types shared across the crate.

use thiserror::Error;

/// Argument outside the physical domain of a conversion or formula.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("{quantity} must be non-negative, got {value}")]
    Negative { quantity: &'static str, value: f64 },
    #[error("{quantity} must be strictly positive, got {value}")]
    NonPositive { quantity: &'static str, value: f64 },
}

/// Invalid link plan, scenario, or simulation configuration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("element {index} ({element}): {reason}")]
    InvalidElement {
        index: usize,
        element: String,
        reason: String,
    },
    #[error("{0}")]
    Invalid(String),
    #[error("scenario validation failed:\n{}", .0.join("\n"))]
    Scenario(Vec<String>),
    #[error("histogram would need {requested} bins, limit is {limit}")]
    HistogramTooLarge { requested: u64, limit: u64 },
    #[error("repetition rate {rate_hz} Hz violates shot period >= round-trip time {round_trip_s} s + guard {guard_s} s")]
    RepetitionRate {
        rate_hz: f64,
        round_trip_s: f64,
        guard_s: f64,
    },
    #[error("failed to parse {what}: {reason}")]
    Parse { what: String, reason: String },
}

/// Analysis could not produce the requested figure of merit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("trace is empty")]
    EmptyTrace,
    #[error("no peaks found above {min_prominence_db} dB prominence")]
    NoPeaks { min_prominence_db: f64 },
    #[error("fit window [{start_m}, {end_m}] m holds {found} usable samples, need at least {needed}")]
    InsufficientSamples {
        start_m: f64,
        end_m: f64,
        found: usize,
        needed: usize,
    },
    #[error("no noise region identifiable: {0}")]
    NoNoiseRegion(String),
    #[error("no beat length detected: {0}")]
    NoBeatLength(String),
    #[error("peaks unresolvable in repeat {repeat}: {reason}")]
    UnresolvableRepeat { repeat: usize, reason: String },
    #[error("{0}")]
    Other(String),
}
