use std::fmt;

use serde::{Deserialize, Serialize};

use super::timing::PROBE_GT;
use crate::fock::{check_probability, project_atom, tensor, AtomLevel, AtomState, FieldState, Ket};
use crate::jc::{jc_closed_form, ramsey_decode_joint};
use crate::{Error, Result};

/// Smallest truncation accepted for a probed field.
pub const MIN_PROBE_N_MAX: usize = 3;

/// Outcome statistics of the probe-atom read-out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementReport {
    pub prob_up: f64,
    pub prob_down: f64,
    /// Normalized field after detecting `|↑⟩`; absent when that outcome has
    /// zero probability.
    pub post_field_up: Option<FieldState>,
    pub post_field_down: Option<FieldState>,
    pub gt_probe: f64,
}

/// Sends a ground-state probe through the cavity for `gT_P = 41π/4` and
/// then through the decoding zone set to `(p, φ)`.
pub fn run_measurement(field: &FieldState, p: f64, phi: f64, g: f64) -> Result<MeasurementReport> {
    check_probability(p)?;
    if !(g.is_finite() && g > 0.0) {
        return Err(Error::domain(format!("coupling g = {g} must be positive")));
    }
    if !field.is_normalized() {
        return Err(Error::Unnormalized {
            norm_sqr: field.norm_sqr(),
        });
    }
    if field.n_max() < MIN_PROBE_N_MAX {
        return Err(Error::domain(format!(
            "probed field needs n_max >= {MIN_PROBE_N_MAX}, got {}",
            field.n_max()
        )));
    }

    let joint = tensor(&AtomState::ground(), field);
    let evolved = jc_closed_form(&joint, g, PROBE_GT / g)?;
    let decoded = ramsey_decode_joint(&evolved, p, phi)?;

    let (up, prob_up) = project_atom(&decoded, AtomLevel::Up);
    let (down, prob_down) = project_atom(&decoded, AtomLevel::Down);
    let condition = |branch: FieldState, prob: f64| {
        if prob > 0.0 {
            branch.normalized().ok()
        } else {
            None
        }
    };
    Ok(MeasurementReport {
        prob_up,
        prob_down,
        post_field_up: condition(up, prob_up),
        post_field_down: condition(down, prob_down),
        gt_probe: PROBE_GT,
    })
}

/// Which member of the orthogonal pair the read-out points to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrthogonalLabel {
    /// `|2, p, φ⟩`, signalled by `|↑⟩`.
    #[serde(rename = "2GBS(p,φ)")]
    Target,
    /// `|2, 1−p, π+φ⟩`, signalled by `|↓⟩`.
    #[serde(rename = "2GBS(1−p,π+φ)")]
    Orthogonal,
}

impl fmt::Display for OrthogonalLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrthogonalLabel::Target => f.write_str("2GBS(p,φ)"),
            OrthogonalLabel::Orthogonal => f.write_str("2GBS(1−p,π+φ)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Discrimination {
    pub label: OrthogonalLabel,
    /// `max(prob_up, prob_down)`; values near ½ flag a field outside the pair.
    pub confidence: f64,
    pub prob_up: f64,
    pub prob_down: f64,
}

/// Single-shot discrimination between `|2,p,φ⟩` and `|2,1−p,π+φ⟩`.
pub fn distinguish_orthogonal(field: &FieldState, p: f64, phi: f64, g: f64) -> Result<Discrimination> {
    let m = run_measurement(field, p, phi, g)?;
    let label = if m.prob_up > 0.5 {
        OrthogonalLabel::Target
    } else {
        OrthogonalLabel::Orthogonal
    };
    Ok(Discrimination {
        label,
        confidence: m.prob_up.max(m.prob_down),
        prob_up: m.prob_up,
        prob_down: m.prob_down,
    })
}
