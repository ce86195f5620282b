//! Generation and detection pipelines for the two-photon binomial state.
//!
//! Generation: a first atom prepared as `√p|↑⟩ + e^{iφ₁}√(1−p)|↓⟩` interacts
//! for `gT₁ = π/2` with the empty cavity and leaves the Bernoulli state
//! `|p, π−φ₁⟩`. The field then evolves freely for `Δt`, and a second atom
//! prepared with the phase `φ' = φ₁ + ωΔt` interacts for `gT₂ = π/4 + 2m₂π`.
//! Finding the second atom in `|↓⟩` (probability `𝒫₂ ≈ 1`) leaves the field
//! close to `|2, p, π−φ'⟩`.
//!
//! Detection: a ground-state probe interacts for `gT_P = 41π/4`, crosses the
//! decoding Ramsey zone, and is found in `|↑⟩` for `|2,p,φ⟩` and in `|↓⟩` for
//! the orthogonal state `|2,1−p,π+φ⟩`.

mod feasibility;
mod generation;
mod jitter;
mod measurement;
mod timing;

pub use feasibility::{feasibility_check, FeasibilityInput, FeasibilityMargins, FeasibilityReport};
pub use generation::{
    predicted_psi2, psi2_norm_sqr, psi2_norm_sqr_approx, run_generation, run_generation_at,
    GenerationConfig, GenerationReport, FIRST_ATOM_GT,
};
pub use jitter::{
    monte_carlo_jitter, monte_carlo_samples, summarize, ErrorModel, JitterReport, JitterSample,
    Quantiles,
};
pub use measurement::{
    distinguish_orthogonal, run_measurement, Discrimination, MeasurementReport, OrthogonalLabel,
    MIN_PROBE_N_MAX,
};
pub use timing::{
    delta_exp, gt2_for, m2_range_for_gt, optimize_t2, timing_table, TimingResult, M2_MAX,
    PROBE_GT,
};
