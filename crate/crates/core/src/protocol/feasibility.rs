use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Lifetimes and durations, all in seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityInput {
    pub tau_at: f64,
    pub tau_cav: f64,
    pub interaction_times: Vec<f64>,
    pub sequence_duration: f64,
}

/// Ratios of each lifetime to the duration it has to outlast.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityMargins {
    /// `τ_at / max T`
    pub atomic: f64,
    /// `τ_cav / max T`
    pub cavity: f64,
    /// `τ_at / sequence_duration`
    pub sequence: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub pass: bool,
    pub interactions_ok: bool,
    pub sequence_ok: bool,
    pub margins: FeasibilityMargins,
}

/// Decay-free operation requires every interaction time to be strictly
/// shorter than both lifetimes and the whole sequence strictly shorter than
/// the atomic lifetime.
pub fn feasibility_check(input: &FeasibilityInput) -> Result<FeasibilityReport> {
    let positive = |x: f64| x.is_finite() && x > 0.0;
    if !(positive(input.tau_at) && positive(input.tau_cav) && positive(input.sequence_duration)) {
        return Err(Error::domain("lifetimes and sequence duration must be positive"));
    }
    if input.interaction_times.is_empty() || !input.interaction_times.iter().all(|&t| positive(t)) {
        return Err(Error::domain("interaction times must be a non-empty list of positive values"));
    }
    let longest = input.interaction_times.iter().copied().fold(0.0, f64::max);
    let limit = input.tau_at.min(input.tau_cav);
    let interactions_ok = longest < limit;
    let sequence_ok = input.sequence_duration < input.tau_at;
    Ok(FeasibilityReport {
        pass: interactions_ok && sequence_ok,
        interactions_ok,
        sequence_ok,
        margins: FeasibilityMargins {
            atomic: input.tau_at / longest,
            cavity: input.tau_cav / longest,
            sequence: input.tau_at / input.sequence_duration,
        },
    })
}
